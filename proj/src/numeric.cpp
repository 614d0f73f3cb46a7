#include "conelab/numeric.hpp"

#include <sstream>
#include <stdexcept>
#include <vector>

namespace conelab {

Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     double kkt_tol) {
  const Eigen::Index n = A.cols();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  const int max_outer = 3 * static_cast<int>(n) + 30;
  const double scale = std::max(1.0, b.norm());

  auto solve_passive = [&](const std::vector<bool>& p) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i)
      if (p[i]) idx.push_back(i);
    Eigen::MatrixXd Ap(A.rows(), idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(k) = A.col(idx[k]);
    Eigen::VectorXd sol = Ap.colPivHouseholderQr().solve(b);
    Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) full[idx[k]] = sol[k];
    return full;
  };

  for (int outer = 0; outer < max_outer; ++outer) {
    Eigen::VectorXd w = A.transpose() * (b - A * z);
    double wmax = -1;
    Eigen::Index t = -1;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!passive[i] && w[i] > wmax) { wmax = w[i]; t = i; }
    if (t < 0 || wmax <= kkt_tol * scale) return z;
    passive[t] = true;
    Eigen::VectorXd s = solve_passive(passive);
    int inner = 0;
    while (true) {
      double smin = 0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (passive[i]) smin = std::min(smin, s[i]);
      if (smin > -1e-12 * scale) break;
      double alpha = 1.0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (passive[i] && s[i] <= 0 && z[i] - s[i] > 0)
          alpha = std::min(alpha, z[i] / (z[i] - s[i]));
      for (Eigen::Index i = 0; i < n; ++i)
        if (passive[i]) z[i] += alpha * (s[i] - z[i]);
      for (Eigen::Index i = 0; i < n; ++i)
        if (passive[i] && z[i] <= 1e-14 * scale) { z[i] = 0; passive[i] = false; }
      s = solve_passive(passive);
      if (++inner > 2 * n + 10) {
        std::ostringstream msg;
        msg << "nnls: inner loop cap hit (cols=" << n << ")";
        throw std::runtime_error(msg.str());
      }
    }
    z = s;
  }
  std::ostringstream msg;
  msg << "nnls: did not converge (cols=" << n << ", |b|=" << b.norm() << ")";
  throw std::runtime_error(msg.str());
}

}  // namespace conelab
