#pragma once

#include <Eigen/Dense>

namespace conelab {

/// Lawson-Hanson active-set nonnegative least squares: minimizes |A z - b|
/// over z >= 0. kkt_tol bounds the dual feasibility residual relative to
/// max(1, |b|). Throws on iteration-cap overrun.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     double kkt_tol = 1e-12);

}  // namespace conelab
