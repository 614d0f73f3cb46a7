#include "conelab/polycone.hpp"

#include "conelab/numeric.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>

namespace conelab {

namespace {

using Bits = std::vector<std::uint64_t>;

Bits bits_make(std::size_t n) { return Bits((n + 63) / 64, 0); }
void bits_set(Bits& b, std::size_t i) { b[i / 64] |= (std::uint64_t{1} << (i % 64)); }
bool bits_get(const Bits& b, std::size_t i) { return (b[i / 64] >> (i % 64)) & 1; }

std::size_t bits_and_count(const Bits& a, const Bits& b, Bits& out) {
  std::size_t c = 0;
  out.resize(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    out[k] = a[k] & b[k];
    c += static_cast<std::size_t>(__builtin_popcountll(out[k]));
  }
  return c;
}

struct Ray {
  RatVec v;
  Bits tight;  // tight[j] <=> <inserted[j], v> = 0, exact
};

std::vector<RatVec> dedupe(std::vector<RatVec> vs) {
  std::set<RatVec> seen;
  std::vector<RatVec> out;
  for (auto& v : vs)
    if (seen.insert(v).second) out.push_back(std::move(v));
  return out;
}

}  // namespace

DDResult dd_extreme_rays(std::size_t dim, const std::vector<RatVec>& constraints) {
  if (dim == 0) throw std::invalid_argument("dd_extreme_rays: dim must be positive");
  std::vector<RatVec> cons;
  for (const auto& c : constraints) {
    if (c.size() != dim)
      throw std::invalid_argument("dd_extreme_rays: constraint dimension mismatch");
    if (!is_zero(c)) cons.push_back(primitive(c));
  }
  cons = dedupe(std::move(cons));
  const std::size_t m = cons.size();

  std::vector<RatVec> lin;  // rref basis of the current lineality space
  for (std::size_t i = 0; i < dim; ++i) {
    RatVec e(dim, Rat(0));
    e[i] = 1;
    lin.push_back(std::move(e));
  }
  std::vector<Ray> rays;

  auto exact_tight = [&](const RatVec& v, std::size_t upto) {
    Bits b = bits_make(m);
    for (std::size_t j = 0; j < upto; ++j)
      if (dot(cons[j], v) == 0) bits_set(b, j);
    return b;
  };

  for (std::size_t j = 0; j < m; ++j) {
    const RatVec& a = cons[j];
    std::size_t bi = lin.size();
    for (std::size_t i = 0; i < lin.size(); ++i)
      if (dot(a, lin[i]) != 0) { bi = i; break; }

    if (bi != lin.size()) {
      // the constraint cuts the lineality space: peel off one line,
      // keep its positive half as a ray
      RatVec b0 = lin[bi];
      Rat s = dot(a, b0);
      if (s < 0) {
        for (auto& x : b0) x = -x;
        s = -s;
      }
      std::vector<RatVec> new_lin;
      for (std::size_t i = 0; i < lin.size(); ++i) {
        if (i == bi) continue;
        Rat f = dot(a, lin[i]) / s;
        RatVec w = lin[i];
        for (std::size_t k = 0; k < dim; ++k) w[k] -= f * b0[k];
        new_lin.push_back(std::move(w));
      }
      new_lin = rref_basis(new_lin, dim);
      // project rays into the hyperplane of a; tight flags are unchanged
      // because every inserted constraint vanishes on the old lineality space
      for (auto& r : rays) {
        Rat f = dot(a, r.v) / s;
        for (std::size_t k = 0; k < dim; ++k) r.v[k] -= f * b0[k];
        r.v = primitive(reduce_mod_span(r.v, new_lin));
        bits_set(r.tight, j);
      }
      Ray nr;
      nr.v = primitive(reduce_mod_span(b0, new_lin));
      nr.tight = bits_make(m);
      for (std::size_t jj = 0; jj < j; ++jj) bits_set(nr.tight, jj);
      rays.push_back(std::move(nr));
      lin = std::move(new_lin);
    } else {
      std::vector<std::size_t> pos, zer, neg;
      std::vector<Rat> val(rays.size());
      for (std::size_t i = 0; i < rays.size(); ++i) {
        val[i] = dot(a, rays[i].v);
        if (val[i] > 0) pos.push_back(i);
        else if (val[i] == 0) zer.push_back(i);
        else neg.push_back(i);
      }
      std::vector<Ray> next;
      for (auto i : pos) next.push_back(std::move(rays[i]));
      for (auto i : zer) {
        bits_set(rays[i].tight, j);
        next.push_back(std::move(rays[i]));
      }
      if (!pos.empty() && !neg.empty() && dim - lin.size() >= 2) {
        // adjacency by rank: the inserted constraints tight at both rays
        // must cut a face of codimension exactly 2 in the pointed part
        const std::size_t need = dim - lin.size() - 2;
        Bits common;
        std::vector<Ray> born;
        for (std::size_t q = 0; q < pos.size(); ++q) {
          const Ray& p = next[q];  // positive rays sit first in next
          const Rat& vp = val[pos[q]];
          for (auto ni : neg) {
            const Ray& ng = rays[ni];
            std::size_t cnt = bits_and_count(p.tight, ng.tight, common);
            if (cnt < need) continue;
            std::vector<RatVec> tight_rows;
            for (std::size_t jj = 0; jj < j; ++jj)
              if (bits_get(common, jj)) tight_rows.push_back(cons[jj]);
            if (rank_of_rows(tight_rows, dim) != need) continue;
            RatVec w(dim);
            for (std::size_t k = 0; k < dim; ++k)
              w[k] = vp * ng.v[k] - val[ni] * p.v[k];
            Ray nr;
            nr.v = primitive(reduce_mod_span(w, lin));
            nr.tight = exact_tight(nr.v, j);
            bits_set(nr.tight, j);
            born.push_back(std::move(nr));
          }
        }
        for (auto& b : born) next.push_back(std::move(b));
      }
      rays = std::move(next);
      std::set<RatVec> seen;
      std::vector<Ray> uniq;
      for (auto& r : rays)
        if (seen.insert(r.v).second) uniq.push_back(std::move(r));
      rays = std::move(uniq);
    }
  }

  // keep only extreme rays of the pointed part (a no-op for a clean run,
  // hard guarantee regardless)
  DDResult out;
  out.lineality = lin;
  const std::size_t need = dim - lin.size() - 1;
  for (auto& r : rays) {
    std::vector<RatVec> tight_rows;
    for (std::size_t jj = 0; jj < m; ++jj)
      if (bits_get(r.tight, jj)) tight_rows.push_back(cons[jj]);
    if (rank_of_rows(tight_rows, dim) == need) out.rays.push_back(std::move(r.v));
  }
  std::sort(out.rays.begin(), out.rays.end());
  return out;
}

// ---------------------------------------------------------------------------

struct PolyCone::Cache {
  std::mutex m;
  std::shared_ptr<const PolyCone> conv;
  bool is_canonical = false;
  std::size_t lin_dim = 0;       // dim of C ∩ -C
  std::size_t span_codim = 0;    // codim of span(C), = lineality dim of C^v
};

PolyCone::PolyCone(std::size_t dim, std::optional<std::vector<RatVec>> generators,
                   std::optional<std::vector<RatVec>> facets)
    : dim_(dim), cache_(std::make_shared<Cache>()) {
  if (dim_ == 0) throw std::invalid_argument("PolyCone: dim must be positive");
  if (!generators && !facets)
    throw std::invalid_argument("PolyCone: at least one representation required");
  auto clean = [this](std::vector<RatVec> vs, const char* what) {
    std::vector<RatVec> out;
    for (auto& v : vs) {
      if (v.size() != dim_)
        throw std::invalid_argument(std::string("PolyCone: ") + what +
                                    " dimension mismatch");
      if (!is_zero(v)) out.push_back(primitive(v));
    }
    return dedupe(std::move(out));
  };
  if (generators) gens_ = clean(std::move(*generators), "generator");
  if (facets) facets_ = clean(std::move(*facets), "facet");
  if (gens_ && facets_) {
    for (const auto& g : *gens_)
      for (const auto& f : *facets_)
        if (dot(f, g) < 0)
          throw std::invalid_argument(
              "PolyCone: generator violates facet inequality");
  }
}

PolyCone PolyCone::from_generators(std::size_t dim, std::vector<RatVec> gens) {
  return PolyCone(dim, std::move(gens), std::nullopt);
}

PolyCone PolyCone::from_facets(std::size_t dim, std::vector<RatVec> facets) {
  return PolyCone(dim, std::nullopt, std::move(facets));
}

PolyCone PolyCone::orthant(std::size_t n) {
  std::vector<RatVec> es;
  for (std::size_t i = 0; i < n; ++i) {
    RatVec e(n, Rat(0));
    e[i] = 1;
    es.push_back(std::move(e));
  }
  return PolyCone(n, es, es);
}

const std::vector<RatVec>& PolyCone::generators() const {
  if (!gens_) throw std::logic_error("PolyCone: generators not present");
  return *gens_;
}

const std::vector<RatVec>& PolyCone::facets() const {
  if (!facets_) throw std::logic_error("PolyCone: facets not present");
  return *facets_;
}

namespace {

// V-representation of a DD result: extreme rays plus ± the lineality basis.
std::vector<RatVec> vrep_of(const DDResult& dd) {
  std::vector<RatVec> out = dd.rays;
  for (const auto& l : dd.lineality) {
    out.push_back(primitive(l));
    RatVec neg = l;
    for (auto& x : neg) x = -x;
    out.push_back(primitive(neg));
  }
  return out;
}

}  // namespace

const PolyCone& PolyCone::converted() const {
  std::lock_guard<std::mutex> lock(cache_->m);
  if (cache_->is_canonical) return *this;
  if (cache_->conv) return *cache_->conv;

  std::vector<RatVec> canon_gens, canon_facets;
  std::size_t lin_dim = 0, span_codim = 0;
  if (gens_) {
    DDResult dual_dd = dd_extreme_rays(dim_, *gens_);
    canon_facets = vrep_of(dual_dd);
    span_codim = dual_dd.lineality.size();
    DDResult primal_dd = dd_extreme_rays(dim_, canon_facets);
    canon_gens = vrep_of(primal_dd);
    lin_dim = primal_dd.lineality.size();
    if (facets_) {
      // both representations supplied: verify they cut out the same set
      DDResult user_dd = dd_extreme_rays(dim_, *facets_);
      for (const auto& g : vrep_of(user_dd))
        for (const auto& f : canon_facets)
          if (dot(f, g) < 0)
            throw std::invalid_argument(
                "PolyCone: generator and facet representations disagree");
    }
  } else {
    DDResult primal_dd = dd_extreme_rays(dim_, *facets_);
    canon_gens = vrep_of(primal_dd);
    lin_dim = primal_dd.lineality.size();
    DDResult dual_dd = dd_extreme_rays(dim_, canon_gens);
    canon_facets = vrep_of(dual_dd);
    span_codim = dual_dd.lineality.size();
  }

  auto conv = std::make_shared<PolyCone>(dim_, std::move(canon_gens),
                                         std::move(canon_facets));
  conv->cache_->is_canonical = true;
  conv->cache_->lin_dim = lin_dim;
  conv->cache_->span_codim = span_codim;
  cache_->conv = conv;
  return *cache_->conv;
}

std::size_t PolyCone::lineality_dim() const {
  const PolyCone& k = converted();
  return k.cache_->lin_dim;
}

std::size_t PolyCone::span_codim() const {
  const PolyCone& k = converted();
  return k.cache_->span_codim;
}

PolyCone dd_convert(const PolyCone& c) { return c.converted(); }

PolyCone dual(const PolyCone& c) {
  const PolyCone& k = c.converted();
  PolyCone d(k.dim(), k.facets(), k.generators());
  d.cache_->is_canonical = true;
  d.cache_->lin_dim = k.cache_->span_codim;
  d.cache_->span_codim = k.cache_->lin_dim;
  return d;
}

bool member(const PolyCone& c, const RatVec& v) {
  if (v.size() != c.dim())
    throw std::invalid_argument("member: vector dimension mismatch");
  const std::vector<RatVec>& fs =
      c.has_facets() ? c.facets() : c.converted().facets();
  for (const auto& f : fs)
    if (dot(f, v) < 0) return false;
  return true;
}

bool equal(const PolyCone& a, const PolyCone& b) {
  if (a.dim() != b.dim()) return false;
  const PolyCone& ca = a.converted();
  const PolyCone& cb = b.converted();
  for (const auto& g : ca.generators())
    for (const auto& f : cb.facets())
      if (dot(f, g) < 0) return false;
  for (const auto& g : cb.generators())
    for (const auto& f : ca.facets())
      if (dot(f, g) < 0) return false;
  return true;
}

PropernessReport properness(const PolyCone& c) {
  PropernessReport r;
  r.is_sharp = c.lineality_dim() == 0;
  r.is_full_dimensional = c.span_codim() == 0;
  r.is_proper = r.is_sharp && r.is_full_dimensional;
  return r;
}

PolyCone sum(const PolyCone& a, const PolyCone& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("sum: dimension mismatch");
  const auto& ga = a.has_generators() ? a.generators() : a.converted().generators();
  const auto& gb = b.has_generators() ? b.generators() : b.converted().generators();
  std::vector<RatVec> gens = ga;
  gens.insert(gens.end(), gb.begin(), gb.end());
  return PolyCone::from_generators(a.dim(), std::move(gens));
}

PolyCone intersect(const PolyCone& a, const PolyCone& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("intersect: dimension mismatch");
  const auto& fa = a.has_facets() ? a.facets() : a.converted().facets();
  const auto& fb = b.has_facets() ? b.facets() : b.converted().facets();
  std::vector<RatVec> facets = fa;
  facets.insert(facets.end(), fb.begin(), fb.end());
  return PolyCone::from_facets(a.dim(), std::move(facets));
}

namespace {

Eigen::MatrixXd generator_matrix(const PolyCone& c) {
  const auto& gens = c.converted().generators();
  Eigen::MatrixXd G(c.dim(), gens.size());
  for (std::size_t j = 0; j < gens.size(); ++j) {
    Eigen::VectorXd col(c.dim());
    for (std::size_t i = 0; i < c.dim(); ++i)
      col[i] = static_cast<double>(gens[j][i]);
    G.col(j) = col.normalized();
  }
  return G;
}

}  // namespace

Eigen::VectorXd project_onto_cone(const PolyCone& c, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != c.dim())
    throw std::invalid_argument("project_onto_cone: dimension mismatch");
  if (!properness(c).is_proper)
    throw std::invalid_argument("project_onto_cone: cone must be proper");
  Eigen::MatrixXd G = generator_matrix(c);
  Eigen::VectorXd z = nnls(G, v, 1e-12);
  Eigen::VectorXd proj = G * z;
  // KKT: gradient nonnegative everywhere, complementary on the support
  Eigen::VectorXd g = G.transpose() * (proj - v);
  const double scale = std::max(1.0, v.norm());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    double viol = (z[i] > 0) ? std::abs(g[i]) : std::max(0.0, -g[i]);
    if (viol > 1e-10 * scale) {
      std::ostringstream msg;
      msg << "project_onto_cone: KKT residual " << viol << " at generator " << i;
      throw std::runtime_error(msg.str());
    }
  }
  return proj;
}

double selfdual_residual(const PolyCone& c) {
  if (!properness(c).is_proper)
    throw std::invalid_argument("selfdual_residual: cone must be proper");
  const PolyCone& k = c.converted();
  PolyCone kd = dual(k);
  auto one_sided = [](const std::vector<RatVec>& rays, const PolyCone& target) {
    double worst = 0;
    for (const auto& r : rays) {
      Eigen::VectorXd u(r.size());
      for (std::size_t i = 0; i < r.size(); ++i) u[i] = static_cast<double>(r[i]);
      u.normalize();
      Eigen::VectorXd proj = project_onto_cone(target, u);
      worst = std::max(worst, (u - proj).norm());
    }
    return worst;
  };
  return std::max(one_sided(k.generators(), kd),
                  one_sided(kd.generators(), k));
}

}  // namespace conelab
