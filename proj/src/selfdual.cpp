#include "conelab/selfdual.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace conelab {

namespace {

void check_inside_dual(const std::vector<RatVec>& gens) {
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i; j < gens.size(); ++j)
      if (dot(gens[i], gens[j]) < 0) {
        std::ostringstream msg;
        msg << "selfdual_extend_cone: cone is not contained in its dual "
               "(generators "
            << i << " and " << j << " pair negatively)";
        throw std::invalid_argument(msg.str());
      }
}

Eigen::VectorXd to_unit(const RatVec& v) {
  Eigen::VectorXd u(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) u[i] = static_cast<double>(v[i]);
  u.normalize();
  return u;
}

Rat rat_round(double x, int bits) {
  const double scale = std::ldexp(1.0, bits);
  return Rat(Int(static_cast<long long>(std::llround(x * scale))),
             Int(1) << bits);
}

RatVec rationalize(const Eigen::VectorXd& v, int bits) {
  RatVec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = rat_round(v[i], bits);
  return out;
}

// 2d closed form: the right-angle cone sharing C's angular bisector,
// nudged to exact rationals. cone{a, rot90(a)} is exactly self-dual.
PolyCone bisector_cone(const PolyCone& C) {
  const auto& gens = C.converted().generators();
  if (C.dim() != 2 || gens.size() != 2)
    throw std::invalid_argument("bisector strategy needs a proper 2d cone");
  RatVec g1 = gens[0], g2 = gens[1];
  // order counterclockwise
  if (g1[0] * g2[1] - g1[1] * g2[0] < 0) std::swap(g1, g2);
  Eigen::Vector2d u1 = to_unit(g1), u2 = to_unit(g2);
  Eigen::Vector2d bis = (u1 + u2).normalized();
  const double c = std::sqrt(0.5);
  Eigen::Vector2d adir(c * bis[0] + c * bis[1], -c * bis[0] + c * bis[1]);
  for (int bits = 24; bits <= 48; bits += 8) {
    RatVec a = rationalize(adir, bits);
    RatVec b{-a[1], a[0]};
    bool ok = true;
    for (const auto& g : {g1, g2})
      if (dot(a, g) < 0 || dot(b, g) < 0) ok = false;
    if (!ok) continue;
    std::vector<RatVec> rays{primitive(a), primitive(b)};
    return PolyCone(2, rays, rays);
  }
  throw std::runtime_error("bisector strategy failed to rationalize");
}

struct Candidate {
  RatVec ray;
  double dist;
};

std::vector<Candidate> dual_ray_candidates(const PolyCone& E) {
  PolyCone Ed = dual(E);
  std::vector<Candidate> cands;
  for (const auto& r : Ed.generators()) {
    Eigen::VectorXd u = to_unit(r);
    Eigen::VectorXd proj = project_onto_cone(E, u);
    cands.push_back({r, (u - proj).norm()});
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist > b.dist;
    return a.ray < b.ray;
  });
  return cands;
}

void verify_pairwise(const PolyCone& E) {
  const auto& gens = E.converted().generators();
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i; j < gens.size(); ++j)
      if (dot(gens[i], gens[j]) < 0)
        throw std::logic_error(
            "selfdual_extend_cone: accepted step broke the invariant");
}

// drop late rays whose removal barely moves the residual, keeping C inside
PolyCone coarsen(const PolyCone& E, const PolyCone& C, double eps,
                 std::size_t cap, double& residual) {
  PolyCone current = E;
  bool changed = true;
  while (changed && current.converted().generators().size() > cap) {
    changed = false;
    const auto gens = current.converted().generators();
    for (std::size_t drop = gens.size(); drop-- > 0;) {
      std::vector<RatVec> rest;
      for (std::size_t i = 0; i < gens.size(); ++i)
        if (i != drop) rest.push_back(gens[i]);
      PolyCone trimmed = PolyCone::from_generators(current.dim(), rest);
      bool contains_c = true;
      for (const auto& g : C.converted().generators())
        if (!member(trimmed, g)) { contains_c = false; break; }
      if (!contains_c) continue;
      if (!properness(trimmed).is_proper) continue;
      double r = selfdual_residual(trimmed);
      if (std::abs(r - residual) < eps / 10) {
        current = trimmed;
        residual = r;
        changed = true;
        break;
      }
    }
  }
  return current;
}

}  // namespace

std::pair<PolyCone, ExtensionTrace> selfdual_extend_cone(
    const PolyCone& C, double eps, ExtendStrategy strategy,
    std::size_t max_iter, std::uint64_t seed) {
  if (eps <= 0) throw std::invalid_argument("selfdual_extend_cone: eps > 0");
  if (!properness(C).is_proper)
    throw std::invalid_argument("selfdual_extend_cone: cone must be proper");
  const PolyCone K = C.converted();
  check_inside_dual(K.generators());

  ExtensionTrace trace;
  double residual = selfdual_residual(K);
  trace.residual_history.push_back(residual);
  if (equal(K, dual(K))) {
    trace.status = ExtendStatus::EXACT;
    return {K, trace};
  }

  if (strategy == ExtendStrategy::BISECTOR_2D) {
    PolyCone E = bisector_cone(K);
    trace.iterations = 1;
    trace.added_rays = E.generators();
    trace.residual_history.push_back(selfdual_residual(E));
    trace.status = ExtendStatus::EXACT;
    verify_pairwise(E);
    return {E, trace};
  }

  std::mt19937_64 rng(seed);
  const std::size_t ray_cap = 64;
  PolyCone E = K;
  while (trace.iterations < max_iter) {
    if (residual <= eps) {
      trace.status =
          equal(E, dual(E)) ? ExtendStatus::EXACT : ExtendStatus::CONVERGED;
      return {E, trace};
    }
    bool accepted = false;
    for (const auto& cand : dual_ray_candidates(E)) {
      if (cand.dist <= eps / 4) break;  // remaining rays are essentially inside
      RatVec x = cand.ray;
      if (strategy == ExtendStrategy::DAMPED_MIDPOINT) {
        Eigen::VectorXd u = to_unit(cand.ray);
        Eigen::VectorXd mid = u + project_onto_cone(E, u);
        mid.normalize();
        RatVec m = rationalize(mid, 20);
        bool in_dual = true;
        for (const auto& g : E.converted().generators())
          if (dot(m, g) < 0) { in_dual = false; break; }
        if (in_dual && !is_zero(m)) x = primitive(m);
      }
      // admissibility: x lies in the dual and pairs nonnegatively with itself
      bool in_dual = dot(x, x) >= 0;
      for (const auto& g : E.converted().generators())
        if (dot(x, g) < 0) { in_dual = false; break; }
      if (!in_dual) {
        ++trace.rejected_candidates;
        continue;
      }
      PolyCone trial =
          dd_convert(sum(E, PolyCone::from_generators(E.dim(), {x})));
      double r = selfdual_residual(trial);
      if (r <= residual + 1e-12) {
        E = trial;
        residual = r;
        trace.added_rays.push_back(x);
        trace.residual_history.push_back(residual);
        ++trace.iterations;
        verify_pairwise(E);
        accepted = true;
        break;
      }
      ++trace.rejected_candidates;
    }
    if (!accepted) {
      trace.status = ExtendStatus::ITERATION_CAP;
      return {E, trace};
    }
    if (E.converted().generators().size() > ray_cap) {
      E = coarsen(E, K, eps, ray_cap, residual);
    }
  }
  trace.status =
      residual <= eps ? ExtendStatus::CONVERGED : ExtendStatus::ITERATION_CAP;
  if (residual <= eps && equal(E, dual(E))) trace.status = ExtendStatus::EXACT;
  return {E, trace};
}

// ---------------------------------------------------------------------------

namespace {

double system_residual(const OperatorSystem& E, std::size_t L,
                       std::uint64_t seed, PairingProbe* worst_out) {
  OperatorSystem Ed = dual_system(E);
  const auto& mats = Ed.realization();
  double worst = 0;
  for (std::size_t n = 1; n <= L; ++n) {
    PairingProbe p =
        dual_pairing_probe(mats, E.space_dim(), n, 6, seed + 17 * n);
    if (-p.value > worst) {
      worst = std::max(0.0, -p.value);
      if (worst_out) *worst_out = p;
    }
  }
  return worst;
}

}  // namespace

std::pair<OperatorSystem, ExtensionTrace> selfdual_extend_system(
    const OperatorSystem& G, double eps, std::size_t L, std::size_t max_iter,
    std::uint64_t seed) {
  if (eps <= 0) throw std::invalid_argument("selfdual_extend_system: eps > 0");
  if (G.form() != OperatorSystem::Form::GENERATED)
    throw std::invalid_argument(
        "selfdual_extend_system: system must be in generated form");
  OperatorSystem E = G;
  // G inside its dual: every generator realizes psd against the dual
  {
    OperatorSystem Gd = dual_system(G);
    for (const auto& g : G.generators()) {
      if (g.level > L) continue;
      Verdict v = psd_member(realize(g, Gd.realization()), 1e-9);
      if (!v.in())
        throw std::invalid_argument(
            "selfdual_extend_system: system is not contained in its dual");
    }
  }

  ExtensionTrace trace;
  PairingProbe worst;
  double residual = system_residual(E, L, seed, &worst);
  trace.residual_history.push_back(residual);
  if (residual <= 1e-10) {
    trace.status = ExtendStatus::EXACT;
    return {E, trace};
  }

  while (trace.iterations < max_iter) {
    if (residual <= eps) {
      trace.status = ExtendStatus::CONVERGED;
      return {E, trace};
    }
    bool accepted = false;
    for (const SystemElement* cand : {&worst.u, &worst.y}) {
      if (cand->coeffs.empty()) continue;
      // the self-pairing gate: only elements positive on themselves keep
      // the enlarged system inside its dual
      Verdict gate = in_P(*cand, 1e-9);
      if (!gate.in()) {
        ++trace.rejected_candidates;
        continue;
      }
      OperatorSystem Ed = dual_system(E);
      if (!psd_member(realize(*cand, Ed.realization()), 1e-8).in()) {
        ++trace.rejected_candidates;
        continue;
      }
      std::vector<SystemElement> gens = E.generators();
      gens.push_back(*cand);
      OperatorSystem trial =
          OperatorSystem::generated(E.space_dim(), gens, E.truncation());
      PairingProbe trial_worst;
      double r = system_residual(trial, L, seed + trace.iterations + 1,
                                 &trial_worst);
      if (r <= residual + 1e-12) {
        E = trial;
        residual = r;
        worst = trial_worst;
        trace.added_elements.push_back(*cand);
        trace.residual_history.push_back(residual);
        ++trace.iterations;
        accepted = true;
        break;
      }
      ++trace.rejected_candidates;
    }
    if (!accepted) break;
  }
  trace.status =
      residual <= eps ? ExtendStatus::CONVERGED : ExtendStatus::ITERATION_CAP;
  return {E, trace};
}

}  // namespace conelab
