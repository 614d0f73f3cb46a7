#include "conelab/opsys.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "conelab/numeric.hpp"

namespace conelab {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

std::complex<double> cx(double re, double im = 0) { return {re, im}; }

double matrix_scale(const HermMat& M) {
  return std::max(1.0, M.cwiseAbs().maxCoeff());
}

Eigen::SelfAdjointEigenSolver<HermMat> eig(const HermMat& M) {
  Eigen::SelfAdjointEigenSolver<HermMat> es(M);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed");
  return es;
}

HermMat psd_clip(const HermMat& M) {
  auto es = eig(M);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

HermMat hermitize(const HermMat& M, double tol) {
  if (M.rows() != M.cols()) throw std::invalid_argument("hermitize: not square");
  double defect = (M - M.adjoint()).cwiseAbs().maxCoeff();
  if (defect > tol * matrix_scale(M))
    throw std::invalid_argument("hermitize: matrix is not Hermitian");
  return (M + M.adjoint()) / 2.0;
}

std::vector<HermMat> herm_basis(std::size_t k) {
  std::vector<HermMat> basis;
  for (std::size_t i = 0; i < k; ++i) {
    HermMat E = HermMat::Zero(k, k);
    E(i, i) = 1;
    basis.push_back(E);
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      HermMat R = HermMat::Zero(k, k);
      R(i, j) = R(j, i) = cx(1 / kSqrt2);
      basis.push_back(R);
      HermMat I = HermMat::Zero(k, k);
      I(i, j) = cx(0, -1 / kSqrt2);
      I(j, i) = cx(0, 1 / kSqrt2);
      basis.push_back(I);
    }
  return basis;
}

Eigen::VectorXd herm_to_vec(const HermMat& M) {
  const std::size_t k = M.rows();
  Eigen::VectorXd v(k * k);
  std::size_t p = 0;
  for (std::size_t i = 0; i < k; ++i) v[p++] = M(i, i).real();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      v[p++] = kSqrt2 * M(i, j).real();
      v[p++] = kSqrt2 * M(i, j).imag();
    }
  return v;
}

HermMat vec_to_herm(const Eigen::VectorXd& v, std::size_t k) {
  if (static_cast<std::size_t>(v.size()) != k * k)
    throw std::invalid_argument("vec_to_herm: size mismatch");
  HermMat M = HermMat::Zero(k, k);
  std::size_t p = 0;
  for (std::size_t i = 0; i < k; ++i) M(i, i) = v[p++];
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      double re = v[p++] / kSqrt2;
      double im = v[p++] / kSqrt2;
      M(i, j) = cx(re, im);
      M(j, i) = cx(re, -im);
    }
  return M;
}

HermMat kron(const HermMat& A, const HermMat& B) {
  HermMat C(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      C.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return C;
}

SystemElement make_element(std::size_t level, std::vector<HermMat> coeffs) {
  if (level == 0) throw std::invalid_argument("element level must be positive");
  if (coeffs.empty()) throw std::invalid_argument("element needs coefficients");
  SystemElement x;
  x.level = level;
  for (auto& M : coeffs) {
    if (static_cast<std::size_t>(M.rows()) != level)
      throw std::invalid_argument("element coefficient size mismatch");
    x.coeffs.push_back(hermitize(M));
  }
  return x;
}

double pairing(const SystemElement& x, const SystemElement& y) {
  if (x.level != y.level || x.coeffs.size() != y.coeffs.size())
    throw std::invalid_argument("pairing: shape mismatch");
  double s = 0;
  for (std::size_t i = 0; i < x.coeffs.size(); ++i)
    s += (x.coeffs[i] * y.coeffs[i]).trace().real();
  return s;
}

Eigen::VectorXd element_to_vec(const SystemElement& x) {
  const std::size_t block = x.level * x.level;
  Eigen::VectorXd v(block * x.coeffs.size());
  for (std::size_t i = 0; i < x.coeffs.size(); ++i)
    v.segment(i * block, block) = herm_to_vec(x.coeffs[i]);
  return v;
}

SystemElement vec_to_element(const Eigen::VectorXd& v, std::size_t space_dim,
                             std::size_t level) {
  const std::size_t block = level * level;
  if (static_cast<std::size_t>(v.size()) != block * space_dim)
    throw std::invalid_argument("vec_to_element: size mismatch");
  SystemElement x;
  x.level = level;
  for (std::size_t i = 0; i < space_dim; ++i)
    x.coeffs.push_back(vec_to_herm(v.segment(i * block, block), level));
  return x;
}

SystemElement compress(const SystemElement& x, const Eigen::MatrixXcd& V) {
  if (static_cast<std::size_t>(V.rows()) != x.level)
    throw std::invalid_argument("compress: V must map into C^level");
  SystemElement y;
  y.level = V.cols();
  for (const auto& M : x.coeffs) y.coeffs.push_back(V.adjoint() * M * V);
  return y;
}

SystemElement tensor_element(const SystemElement& x, const SystemElement& y,
                             std::size_t d2) {
  if (y.coeffs.size() != d2)
    throw std::invalid_argument("tensor_element: d2 mismatch");
  SystemElement z;
  z.level = x.level * y.level;
  for (const auto& B : x.coeffs)
    for (const auto& C : y.coeffs) z.coeffs.push_back(kron(B, C));
  return z;
}

HermMat realize(const SystemElement& x, const std::vector<HermMat>& mats) {
  if (x.coeffs.size() != mats.size())
    throw std::invalid_argument("realize: coefficient count mismatch");
  const std::size_t k = mats[0].rows(), n = x.level;
  HermMat R = HermMat::Zero(n * k, n * k);
  for (std::size_t i = 0; i < mats.size(); ++i) R += kron(x.coeffs[i], mats[i]);
  return R;
}

// ---------------------------------------------------------------------------

OperatorSystem OperatorSystem::realized(std::vector<HermMat> mats,
                                        std::size_t truncation) {
  if (mats.empty()) throw std::invalid_argument("realized: no matrices");
  OperatorSystem s;
  s.form_ = Form::REALIZED;
  s.d_ = mats.size();
  s.trunc_ = truncation;
  const std::size_t k = mats[0].rows();
  for (auto& M : mats) {
    if (static_cast<std::size_t>(M.rows()) != k)
      throw std::invalid_argument("realized: ragged matrix sizes");
    s.mats_.push_back(hermitize(M));
  }
  return s;
}

OperatorSystem OperatorSystem::generated(std::size_t space_dim,
                                         std::vector<SystemElement> gens,
                                         std::size_t truncation) {
  if (gens.empty()) throw std::invalid_argument("generated: no generators");
  OperatorSystem s;
  s.form_ = Form::GENERATED;
  s.d_ = space_dim;
  s.trunc_ = truncation;
  for (auto& g : gens) {
    if (g.coeffs.size() != space_dim)
      throw std::invalid_argument("generated: generator coefficient count");
    bool zero = true;
    for (const auto& M : g.coeffs)
      if (M.cwiseAbs().maxCoeff() > 0) zero = false;
    if (zero) throw std::invalid_argument("generated: zero generator");
    s.gens_.push_back(std::move(g));
  }
  return s;
}

OperatorSystem OperatorSystem::intrinsic(std::size_t k, std::size_t truncation) {
  return realized(herm_basis(k), truncation);
}

std::size_t OperatorSystem::realization_size() const {
  return realization()[0].rows();
}

const std::vector<HermMat>& OperatorSystem::realization() const {
  if (mats_.empty()) throw std::logic_error("no realized presentation");
  return mats_;
}

const std::vector<SystemElement>& OperatorSystem::generators() const {
  if (form_ != Form::GENERATED)
    throw std::logic_error("no generated presentation");
  return gens_;
}

bool OperatorSystem::intrinsic_like() const {
  if (form_ != Form::REALIZED) return false;
  const std::size_t k = realization_size();
  if (d_ != k * k) return false;
  for (std::size_t i = 0; i < d_; ++i)
    for (std::size_t j = i; j < d_; ++j) {
      double g = (mats_[i] * mats_[j]).trace().real();
      if (std::abs(g - (i == j ? 1.0 : 0.0)) > 1e-9) return false;
    }
  return true;
}

namespace {

SystemElement canonical_generator(const std::vector<HermMat>& mats) {
  // the conjugate makes the dual of the intrinsic system the maximally
  // entangled projector (and the intrinsic system self-dual)
  SystemElement x;
  x.level = mats[0].rows();
  for (const auto& M : mats) x.coeffs.push_back(M.conjugate());
  return x;
}

// direct sum of the generators' coefficient lists: the realized presentation
// of the dual of a generated system
std::vector<HermMat> block_diag_realization(
    const std::vector<SystemElement>& gens, std::size_t d) {
  std::size_t total = 0;
  for (const auto& g : gens) total += g.level;
  std::vector<HermMat> mats(d, HermMat::Zero(total, total));
  std::size_t off = 0;
  for (const auto& g : gens) {
    for (std::size_t i = 0; i < d; ++i)
      mats[i].block(off, off, g.level, g.level) = g.coeffs[i].conjugate();
    off += g.level;
  }
  return mats;
}

// largest min-eigenvalue of sum c_i A_i over the unit ball, by supergradient
// ascent (the objective is concave in c)
double best_min_eig(const std::vector<HermMat>& mats, std::uint64_t seed) {
  const std::size_t d = mats.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double best = -1e300;
  for (int restart = 0; restart < 4; ++restart) {
    Eigen::VectorXd c(d);
    for (auto& v : c.reshaped()) v = g(rng);
    c.normalize();
    for (int it = 0; it < 250; ++it) {
      HermMat S = HermMat::Zero(mats[0].rows(), mats[0].cols());
      for (std::size_t i = 0; i < d; ++i) S += c[i] * mats[i];
      auto es = eig(S);
      double lmin = es.eigenvalues()[0];
      best = std::max(best, lmin);
      Eigen::VectorXcd v = es.eigenvectors().col(0);
      Eigen::VectorXd grad(d);
      for (std::size_t i = 0; i < d; ++i)
        grad[i] = (v.adjoint() * mats[i] * v).real()(0);
      c += (0.5 / std::sqrt(it + 1.0)) * grad;
      if (c.norm() > 1) c.normalize();
    }
  }
  return best;
}

}  // namespace

bool OperatorSystem::proper() const {
  if (proper_) return *proper_;
  bool ok;
  if (tensor_) {
    ok = tensor_->left->proper() && tensor_->right->proper();
  } else if (form_ == Form::REALIZED) {
    // independence of the realization matrices
    const std::size_t k = realization_size();
    Eigen::MatrixXd rows(d_, k * k);
    for (std::size_t i = 0; i < d_; ++i)
      rows.row(i) = herm_to_vec(mats_[i]).transpose();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(rows);
    qr.setThreshold(1e-9);
    ok = static_cast<std::size_t>(qr.rank()) == d_;
    // a positive definite element of the span
    if (ok) {
      double scale = 0;
      for (const auto& M : mats_) scale = std::max(scale, M.cwiseAbs().maxCoeff());
      ok = best_min_eig(mats_, 12345) > 1e-8 * std::max(1.0, scale);
    }
  } else {
    ok = dual_system(*this).proper();
  }
  proper_ = ok;
  return ok;
}

// ---------------------------------------------------------------------------

Verdict psd_member(const HermMat& M, double tol) {
  HermMat H = hermitize(M);
  auto es = eig(H);
  Verdict v;
  v.value = es.eigenvalues()[0];
  if (v.value >= -tol) {
    v.tag = VerdictTag::IN;
    v.vec = es.eigenvectors().col(0);
    v.note = "spectral";
  } else {
    v.tag = VerdictTag::OUT;
    v.vec = es.eigenvectors().col(0);
    v.note = "negative eigenvector";
  }
  return v;
}

HermMat partial_transpose(const HermMat& M, std::size_t m, std::size_t n) {
  if (static_cast<std::size_t>(M.rows()) != m * n)
    throw std::invalid_argument("partial_transpose: size not m*n");
  HermMat T(m * n, m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < n; ++l)
          T(i * n + j, k * n + l) = M(i * n + l, k * n + j);
  return T;
}

Verdict ppt_check(const HermMat& M, std::size_t m, std::size_t n, double tol) {
  Verdict v = psd_member(partial_transpose(hermitize(M), m, n), tol);
  v.note = v.in() ? "partial transpose psd" : "partial transpose eigenvector";
  return v;
}

Verdict middle_product_member(const HermMat& M, std::size_t m, std::size_t n,
                              double tol) {
  if (static_cast<std::size_t>(M.rows()) != m * n)
    throw std::invalid_argument("middle_product_member: size not m*n");
  return psd_member(M, tol);
}

namespace {

// minimum of (v (x) w)* M (v (x) w) via alternating eigenvector descent
struct ProductMin {
  double value = 1e300;
  Eigen::VectorXcd v, w;
};

ProductMin product_descent(const HermMat& M, std::size_t m, std::size_t n,
                           int restarts, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ProductMin best;
  auto rand_unit = [&](std::size_t k) {
    Eigen::VectorXcd u(k);
    for (std::size_t i = 0; i < k; ++i) u[i] = cx(g(rng), g(rng));
    u.normalize();
    return u;
  };
  for (int r = 0; r < std::max(1, restarts); ++r) {
    Eigen::VectorXcd w = rand_unit(n), v;
    double val = 1e300;
    for (int it = 0; it < 60; ++it) {
      HermMat Kw = HermMat::Zero(m, m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < m; ++k) {
          std::complex<double> s = 0;
          for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < n; ++l)
              s += std::conj(w[j]) * M(i * n + j, k * n + l) * w[l];
          Kw(i, k) = s;
        }
      auto esv = eig(Kw);
      v = esv.eigenvectors().col(0);
      HermMat Kv = HermMat::Zero(n, n);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l) {
          std::complex<double> s = 0;
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = 0; k < m; ++k)
              s += std::conj(v[i]) * M(i * n + j, k * n + l) * v[k];
          Kv(j, l) = s;
        }
      auto esw = eig(Kv);
      w = esw.eigenvectors().col(0);
      double nv = esw.eigenvalues()[0];
      if (std::abs(nv - val) < 1e-14) { val = nv; break; }
      val = nv;
    }
    if (val < best.value) {
      best.value = val;
      best.v = v;
      best.w = w;
    }
  }
  return best;
}

// min tr(M rho) over rho psd, ppt, trace one (projected gradient with
// alternating projections); exact separable minimum for 2x2 and 2x3
double ppt_state_min(const HermMat& M, std::size_t m, std::size_t n) {
  const std::size_t N = m * n;
  auto project = [&](HermMat rho, int rounds) {
    for (int r = 0; r < rounds; ++r) {
      rho = psd_clip(rho);
      rho = partial_transpose(psd_clip(partial_transpose(rho, m, n)), m, n);
      double tr = rho.trace().real();
      rho += ((1.0 - tr) / N) * HermMat::Identity(N, N);
    }
    return psd_clip(rho);
  };
  HermMat rho = HermMat::Identity(N, N) / static_cast<double>(N);
  const double eta0 = 0.5 / std::max(1.0, M.cwiseAbs().maxCoeff());
  double best = 1e300;
  for (int it = 0; it < 400; ++it) {
    rho = project(rho - (eta0 / std::sqrt(it + 1.0)) * M, 8);
    if (it % 20 == 19) {
      HermMat clean = project(rho, 60);
      double tr = clean.trace().real();
      if (tr > 1e-9) best = std::min(best, (M * clean).trace().real() / tr);
    }
  }
  return best;
}

}  // namespace

Verdict block_positive_check(const HermMat& Min, std::size_t m, std::size_t n,
                             int restarts, double tol, std::uint64_t seed) {
  HermMat M = hermitize(Min);
  if (static_cast<std::size_t>(M.rows()) != m * n)
    throw std::invalid_argument("block_positive_check: size not m*n");
  std::mt19937_64 rng(seed);
  ProductMin pm = product_descent(M, m, n, restarts, rng);
  Verdict v;
  v.value = pm.value;
  v.vec = pm.v;
  v.vec2 = pm.w;
  if (pm.value < -tol) {
    v.tag = VerdictTag::OUT;
    v.note = "product vector witness";
    return v;
  }
  const bool oracle_dims = (m == 2 && (n == 2 || n == 3)) ||
                           (n == 2 && (m == 2 || m == 3));
  if (oracle_dims) {
    double sep_min = ppt_state_min(M, m, n);
    if (sep_min >= -std::max(tol, 1e-7)) {
      v.tag = VerdictTag::IN;
      v.note = "separable minimum nonnegative";
      return v;
    }
    // the convex relaxation disagrees with the product search: polish a
    // product witness out of the optimizer's state if possible
    ProductMin retry = product_descent(M, m, n, 4 * std::max(1, restarts), rng);
    if (retry.value < -tol) {
      v.tag = VerdictTag::OUT;
      v.value = retry.value;
      v.vec = retry.v;
      v.vec2 = retry.w;
      v.note = "product vector witness";
      return v;
    }
    v.tag = VerdictTag::UNKNOWN;
    v.note = "oracle disagreement";
    return v;
  }
  v.tag = VerdictTag::IN;
  v.certified = false;
  v.note = "no violation found; dimensions beyond the exact criterion";
  return v;
}

// ---------------------------------------------------------------------------

OperatorSystem dual_system(const OperatorSystem& G) {
  OperatorSystem d;
  d.trunc_ = G.truncation();
  d.d_ = G.space_dim();
  if (G.form() == OperatorSystem::Form::REALIZED) {
    d.form_ = OperatorSystem::Form::GENERATED;
    d.gens_ = {canonical_generator(G.realization())};
  } else {
    d.form_ = OperatorSystem::Form::REALIZED;
    d.mats_ = block_diag_realization(G.generators(), G.space_dim());
  }
  if (G.tensor_info()) {
    OperatorSystem::TensorInfo t;
    t.kind = G.tensor_info()->kind == OperatorSystem::TensorKind::MIN
                 ? OperatorSystem::TensorKind::MAX
                 : OperatorSystem::TensorKind::MIN;
    t.left = std::make_shared<OperatorSystem>(dual_system(*G.tensor_info()->left));
    t.right =
        std::make_shared<OperatorSystem>(dual_system(*G.tensor_info()->right));
    d.tensor_ = std::move(t);
  }
  return d;
}

Verdict in_P(const SystemElement& x, double tol) {
  const std::size_t n = x.level;
  HermMat S = HermMat::Zero(n * n, n * n);
  for (const auto& M : x.coeffs) S += kron(M, M.conjugate().eval());
  Verdict v = psd_member(S, tol);
  v.note = v.in() ? "self-pairing psd" : "self-pairing eigenvector";
  return v;
}

OperatorSystem min_tensor_sys(const OperatorSystem& G, const OperatorSystem& H,
                              std::size_t L) {
  if (!G.proper() || !H.proper())
    throw std::invalid_argument("min_tensor_sys: factors must be proper");
  auto gens_of = [](const OperatorSystem& s) {
    if (s.form() == OperatorSystem::Form::GENERATED) return s.generators();
    return std::vector<SystemElement>{canonical_generator(s.realization())};
  };
  std::vector<SystemElement> zs;
  for (const auto& x : gens_of(G))
    for (const auto& y : gens_of(H))
      zs.push_back(tensor_element(x, y, H.space_dim()));
  OperatorSystem s =
      OperatorSystem::generated(G.space_dim() * H.space_dim(), std::move(zs), L);
  OperatorSystem::TensorInfo t;
  t.kind = OperatorSystem::TensorKind::MIN;
  t.left = std::make_shared<OperatorSystem>(G);
  t.right = std::make_shared<OperatorSystem>(H);
  s.tensor_ = std::move(t);
  return s;
}

OperatorSystem max_tensor_sys(const OperatorSystem& G, const OperatorSystem& H,
                              std::size_t L) {
  return dual_system(min_tensor_sys(dual_system(G), dual_system(H), L));
}

// ---------------------------------------------------------------------------
// membership machinery

namespace {

// linear operator vec(y) -> herm_to_vec(realize(y, mats)) and its
// least-squares inverse, used to walk back to the realized psd cone
struct RealizeMap {
  std::size_t d, n, K;
  Eigen::MatrixXd J;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> pinv;

  RealizeMap(const std::vector<HermMat>& mats, std::size_t level)
      : d(mats.size()), n(level), K(mats[0].rows()) {
    const std::size_t in_dim = d * n * n, out_dim = (K * n) * (K * n);
    J.resize(out_dim, in_dim);
    for (std::size_t c = 0; c < in_dim; ++c) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(in_dim);
      e[c] = 1;
      SystemElement y = vec_to_element(e, d, n);
      J.col(c) = herm_to_vec(realize(y, mats));
    }
    pinv.compute(J);
  }
};

// smallest realized eigenvalue of y against the mats
double feasibility(const std::vector<HermMat>& mats, const SystemElement& y) {
  return eig(realize(y, mats)).eigenvalues()[0];
}

// search for y in the realized cone with <x,y> < -tol (dual violation)
std::optional<SystemElement> dual_violation_search(
    const std::vector<HermMat>& mats, const SystemElement& x, double tol,
    std::uint64_t seed) {
  const std::size_t d = x.coeffs.size(), n = x.level;
  RealizeMap map(mats, n);
  Eigen::VectorXd target = element_to_vec(x);
  const double tnorm = std::max(1e-12, target.norm());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;

  auto restore = [&](Eigen::VectorXd y, int rounds) {
    for (int r = 0; r < rounds; ++r) {
      SystemElement ye = vec_to_element(y, d, n);
      HermMat Z = realize(ye, mats);
      HermMat Zc = psd_clip(Z);
      Eigen::VectorXd delta = herm_to_vec(Zc) - herm_to_vec(Z);
      if (delta.norm() < 1e-13) break;
      y += map.pinv.solve(delta);
    }
    return y;
  };

  for (int restart = 0; restart < 6; ++restart) {
    Eigen::VectorXd y(d * n * n);
    for (auto& v : y.reshaped()) v = g(rng);
    y.normalize();
    y = restore(y, 30);
    for (int it = 0; it < 80; ++it) {
      y -= (0.25 / tnorm) / std::sqrt(it + 1.0) * target;
      y = restore(y, 12);
      double nrm = y.norm();
      if (nrm > 1e-9) y /= nrm;
    }
    y = restore(y, 60);
    if (y.norm() < 1e-9) continue;
    y /= y.norm();
    SystemElement ye = vec_to_element(y, d, n);
    if (feasibility(mats, ye) >= -0.1 * tol &&
        element_to_vec(ye).dot(target) < -tol) {
      return ye;
    }
  }
  return std::nullopt;
}

Eigen::MatrixXcd random_isometry_cols(std::mt19937_64& rng, std::size_t rows,
                                      std::size_t cols) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd V(rows, cols);
  for (Eigen::Index i = 0; i < V.rows(); ++i)
    for (Eigen::Index j = 0; j < V.cols(); ++j) V(i, j) = cx(g(rng), g(rng));
  return V;
}

// explicit nonnegative decomposition of x over compressions of the
// generators; a successful fit is an IN witness
bool compression_fit(const std::vector<SystemElement>& gens,
                     const SystemElement& x, double tol, std::uint64_t seed) {
  const std::size_t n = x.level;
  std::mt19937_64 rng(seed);
  std::vector<Eigen::VectorXd> cols;
  for (const auto& gen : gens) {
    if (gen.level < 1) continue;
    std::vector<Eigen::MatrixXcd> vs;
    if (gen.level == n)
      vs.push_back(Eigen::MatrixXcd::Identity(n, n));
    for (int s = 0; s < 60; ++s)
      vs.push_back(random_isometry_cols(rng, gen.level, n));
    for (const auto& V : vs)
      cols.push_back(element_to_vec(compress(gen, V)));
  }
  if (cols.empty()) return false;
  Eigen::MatrixXd D(cols[0].size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) D.col(j) = cols[j];
  Eigen::VectorXd target = element_to_vec(x);
  try {
    Eigen::VectorXd w = nnls(D, target, 1e-12);
    return (D * w - target).norm() <= std::max(tol, 1e-8 * target.norm());
  } catch (const std::runtime_error&) {
    return false;
  }
}

Verdict min_tagged_member(const OperatorSystem& G, const SystemElement& x,
                          double tol);
Verdict max_tagged_member(const OperatorSystem& G, const SystemElement& x,
                          double tol);

Verdict generated_member(const OperatorSystem& G, const SystemElement& x,
                         double tol) {
  // dual certificate: an element of the realized dual pairing negatively
  std::vector<HermMat> dual_mats =
      block_diag_realization(G.generators(), G.space_dim());
  if (auto y = dual_violation_search(dual_mats, x, tol, 2024)) {
    Verdict v;
    v.tag = VerdictTag::OUT;
    v.element = std::make_shared<SystemElement>(*y);
    v.value = pairing(x, *y);
    v.note = "dual element witness";
    return v;
  }
  if (compression_fit(G.generators(), x, tol, 4096)) {
    Verdict v;
    v.tag = VerdictTag::IN;
    v.value = 0;
    v.note = "nonnegative compression decomposition";
    return v;
  }
  Verdict v;
  v.tag = VerdictTag::UNKNOWN;
  v.note = "no certificate found";
  return v;
}

Verdict min_tagged_member(const OperatorSystem& G, const SystemElement& x,
                          double tol) {
  const auto& info = *G.tensor_info();
  const OperatorSystem& A = *info.left;
  const OperatorSystem& B = *info.right;
  // outer bound: the element realized over the factor realizations must be
  // psd whenever both factors expose realized presentations
  if (A.form() == OperatorSystem::Form::REALIZED &&
      B.form() == OperatorSystem::Form::REALIZED) {
    std::vector<HermMat> kron_mats;
    for (const auto& Am : A.realization())
      for (const auto& Bm : B.realization()) kron_mats.push_back(kron(Am, Bm));
    HermMat R = realize(x, kron_mats);
    Verdict psd = psd_member(R, tol);
    if (psd.out()) {
      psd.note = "realized factor rejection";
      return psd;
    }
    if (x.level == 1 && A.intrinsic_like() && B.intrinsic_like()) {
      const std::size_t m = A.realization_size(), n = B.realization_size();
      Verdict ppt = ppt_check(R, m, n, tol);
      if (ppt.out()) {
        ppt.note = "ppt witness";
        return ppt;
      }
      if ((m == 2 && (n == 2 || n == 3)) || (n == 2 && (m == 2 || m == 3))) {
        Verdict v;
        v.tag = VerdictTag::IN;
        v.value = std::min(psd.value, ppt.value);
        v.note = "psd and ppt (exact criterion dimensions)";
        return v;
      }
    }
  }
  // explicit separable decomposition over product compressions
  const std::size_t d2 = B.space_dim();
  std::vector<SystemElement> product_gens = G.generators();
  if (compression_fit(product_gens, x, tol, 777)) {
    Verdict v;
    v.tag = VerdictTag::IN;
    v.note = "nonnegative compression decomposition";
    return v;
  }
  (void)d2;
  Verdict v;
  v.tag = VerdictTag::UNKNOWN;
  v.note = "no certificate found";
  return v;
}

Verdict max_tagged_member(const OperatorSystem& G, const SystemElement& x,
                          double tol) {
  const auto& info = *G.tensor_info();
  const OperatorSystem& A = *info.left;
  const OperatorSystem& B = *info.right;
  // inner bound: psd against the realized presentation implies membership
  if (G.form() == OperatorSystem::Form::REALIZED) {
    Verdict psd = psd_member(realize(x, G.realization()), tol);
    if (psd.in()) {
      psd.note = "psd inner bound";
      return psd;
    }
  }
  if (x.level == 1 && A.intrinsic_like() && B.intrinsic_like()) {
    std::vector<HermMat> kron_mats;
    for (const auto& Am : A.realization())
      for (const auto& Bm : B.realization()) kron_mats.push_back(kron(Am, Bm));
    HermMat R = realize(x, kron_mats);
    Verdict bp = block_positive_check(R, A.realization_size(),
                                      B.realization_size(), 60, tol, 0);
    bp.note = "block positivity: " + bp.note;
    return bp;
  }
  Verdict v;
  v.tag = VerdictTag::UNKNOWN;
  v.note = "no certificate found";
  return v;
}

}  // namespace

PairingProbe dual_pairing_probe(const std::vector<HermMat>& mats,
                                std::size_t space_dim, std::size_t level,
                                int restarts, std::uint64_t seed) {
  RealizeMap map(mats, level);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const std::size_t dim = space_dim * level * level;

  auto restore = [&](Eigen::VectorXd y, int rounds) {
    for (int r = 0; r < rounds; ++r) {
      SystemElement ye = vec_to_element(y, space_dim, level);
      HermMat Z = realize(ye, mats);
      HermMat Zc = psd_clip(Z);
      Eigen::VectorXd delta = herm_to_vec(Zc) - herm_to_vec(Z);
      if (delta.norm() < 1e-13) break;
      y += map.pinv.solve(delta);
    }
    return y;
  };
  auto feasible_unit = [&](Eigen::VectorXd y) -> std::optional<Eigen::VectorXd> {
    y = restore(y, 50);
    double nrm = y.norm();
    if (nrm < 1e-9) return std::nullopt;
    y /= nrm;
    SystemElement ye = vec_to_element(y, space_dim, level);
    if (feasibility(mats, ye) < -1e-9) return std::nullopt;
    return y;
  };

  // pool of feasible directions
  std::vector<Eigen::VectorXd> pool;
  for (int s = 0; s < 6 + restarts && pool.size() < 10; ++s) {
    Eigen::VectorXd y(dim);
    for (auto& v : y.reshaped()) v = g(rng);
    y.normalize();
    if (auto f = feasible_unit(y)) pool.push_back(*f);
  }
  PairingProbe best;
  best.value = 1e300;
  auto consider = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double p = a.dot(b);
    if (p < best.value) {
      best.value = p;
      best.u = vec_to_element(a, space_dim, level);
      best.y = vec_to_element(b, space_dim, level);
    }
  };
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i; j < pool.size(); ++j) consider(pool[i], pool[j]);

  // alternating refinement: fix one side, descend the pairing on the other
  auto minimize_against = [&](const Eigen::VectorXd& target) {
    Eigen::VectorXd y(dim);
    for (auto& v : y.reshaped()) v = g(rng);
    y.normalize();
    y = restore(y, 30);
    for (int it = 0; it < 60; ++it) {
      y -= (0.3 / std::sqrt(it + 1.0)) * target;
      y = restore(y, 10);
      double nrm = y.norm();
      if (nrm > 1e-9) y /= nrm;
    }
    return feasible_unit(y);
  };
  if (!pool.empty()) {
    Eigen::VectorXd a = pool[rng() % pool.size()];
    for (int round = 0; round < 4; ++round) {
      auto b = minimize_against(a);
      if (!b) break;
      consider(a, *b);
      a = *b;
    }
  }
  if (best.value > 1e200) best.value = 0;  // nothing feasible found
  return best;
}

Verdict level_member(const OperatorSystem& G, const SystemElement& x,
                     double tol) {
  if (x.level > G.truncation())
    throw std::invalid_argument("level_member: level exceeds truncation");
  if (x.coeffs.size() != G.space_dim())
    throw std::invalid_argument("level_member: space dimension mismatch");
  bool zero = true;
  for (const auto& M : x.coeffs)
    if (M.cwiseAbs().maxCoeff() > 0) zero = false;
  if (zero) {
    Verdict v;
    v.tag = VerdictTag::IN;
    v.note = "zero element";
    return v;
  }
  if (G.tensor_info()) {
    return G.tensor_info()->kind == OperatorSystem::TensorKind::MIN
               ? min_tagged_member(G, x, tol)
               : max_tagged_member(G, x, tol);
  }
  if (G.form() == OperatorSystem::Form::REALIZED) {
    Verdict v = psd_member(realize(x, G.realization()), tol);
    v.note = v.in() ? "realized psd" : "realized rejection";
    return v;
  }
  return generated_member(G, x, tol);
}

}  // namespace conelab
