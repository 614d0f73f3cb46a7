#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace conelab {

using HermMat = Eigen::MatrixXcd;

/// Checks hermiticity to tolerance and returns the symmetrized matrix.
/// Throws if the defect is larger than the tolerance.
HermMat hermitize(const HermMat& M, double tol = 1e-10);

/// Fixed orthonormal (Hilbert-Schmidt) basis of Her_k: diagonal units first
/// (row order), then for each i<j in row-major order the real pair
/// (E_ij+E_ji)/sqrt2 and the imaginary pair i(E_ij-E_ji)/sqrt2.
std::vector<HermMat> herm_basis(std::size_t k);

/// Real coordinates of a Hermitian matrix in the herm_basis order;
/// isometric for the Hilbert-Schmidt inner product.
Eigen::VectorXd herm_to_vec(const HermMat& M);
HermMat vec_to_herm(const Eigen::VectorXd& v, std::size_t k);

HermMat kron(const HermMat& A, const HermMat& B);

/// An element x = sum_i x_i (x) M_i of X (x) Her_n, stored by its coefficient
/// list against the fixed basis of X.
struct SystemElement {
  std::size_t level = 1;
  std::vector<HermMat> coeffs;
};

SystemElement make_element(std::size_t level, std::vector<HermMat> coeffs);

/// <x,y> = sum_i tr(B_i C_i); exact pairing of same-level elements.
double pairing(const SystemElement& x, const SystemElement& y);

Eigen::VectorXd element_to_vec(const SystemElement& x);
SystemElement vec_to_element(const Eigen::VectorXd& v, std::size_t space_dim,
                             std::size_t level);

/// (id (x) V*.V)(x): coefficients become V* M_i V for V: C^n -> C^level.
SystemElement compress(const SystemElement& x, const Eigen::MatrixXcd& V);

/// Kronecker product of elements; coefficient index (i,q) -> i*d2+q, row-major.
SystemElement tensor_element(const SystemElement& x, const SystemElement& y,
                             std::size_t d2);

/// sum_i B_i (x) A_i for x = sum x_i (x) B_i against realization matrices A_i.
HermMat realize(const SystemElement& x, const std::vector<HermMat>& mats);

enum class VerdictTag { IN, OUT, UNKNOWN };

struct Verdict {
  VerdictTag tag = VerdictTag::UNKNOWN;
  bool certified = true;  // false marks heuristic leaning-IN verdicts
  double value = 0.0;     // witnessed quantity (eigenvalue, form value, pairing)
  Eigen::VectorXcd vec;   // eigenvector or first product-vector witness
  Eigen::VectorXcd vec2;  // second product-vector witness
  std::shared_ptr<const SystemElement> element;  // dual-element witness
  std::string note;

  bool in() const { return tag == VerdictTag::IN; }
  bool out() const { return tag == VerdictTag::OUT; }
  bool unknown() const { return tag == VerdictTag::UNKNOWN; }
};

/// A finite-dimensional abstract operator system on X = R^d, truncated at
/// matrix level `truncation`. REALIZED form: level-n cone is the preimage of
/// the psd cone under x = sum x_i (x) B_i |-> sum B_i (x) A_i. GENERATED
/// form: the smallest system containing the generator elements.
///
/// Systems built by min/max_tensor_sys carry bipartite structure; their
/// membership follows the separable / block-positive reading of the factors
/// rather than the raw single-space form.
class OperatorSystem {
 public:
  enum class Form { REALIZED, GENERATED };
  enum class TensorKind { MIN, MAX };

  struct TensorInfo {
    TensorKind kind;
    std::shared_ptr<const OperatorSystem> left, right;
  };

  static OperatorSystem realized(std::vector<HermMat> mats,
                                 std::size_t truncation = 3);
  static OperatorSystem generated(std::size_t space_dim,
                                  std::vector<SystemElement> gens,
                                  std::size_t truncation = 3);
  /// The system on Her_k realized by the full orthonormal Hermitian basis.
  static OperatorSystem intrinsic(std::size_t k, std::size_t truncation = 3);

  Form form() const { return form_; }
  std::size_t space_dim() const { return d_; }
  std::size_t truncation() const { return trunc_; }
  std::size_t realization_size() const;
  const std::vector<HermMat>& realization() const;
  const std::vector<SystemElement>& generators() const;
  const std::optional<TensorInfo>& tensor_info() const { return tensor_; }

  /// REALIZED: realization matrices independent and their span containing a
  /// positive definite element (so every level cone is proper). GENERATED:
  /// properness of the dual realized form.
  bool proper() const;

  /// True when realized by a spanning orthonormal basis of Her_k.
  bool intrinsic_like() const;

 private:
  friend OperatorSystem min_tensor_sys(const OperatorSystem&,
                                       const OperatorSystem&, std::size_t);
  friend OperatorSystem dual_system(const OperatorSystem&);
  OperatorSystem() = default;
  Form form_ = Form::REALIZED;
  std::size_t d_ = 0, trunc_ = 3;
  std::vector<HermMat> mats_;
  std::vector<SystemElement> gens_;
  std::optional<TensorInfo> tensor_;
  mutable std::optional<bool> proper_;
};

/// IN iff the smallest eigenvalue is >= -tol; OUT carries the offending
/// eigenvector.
Verdict psd_member(const HermMat& M, double tol);

/// Membership of x in G(x.level). REALIZED systems decide exactly (psd
/// check); GENERATED systems return a certificate or UNKNOWN; tensor-tagged
/// systems use the bipartite oracles.
Verdict level_member(const OperatorSystem& G, const SystemElement& x,
                     double tol);

/// Level-wise dual. Swaps REALIZED and GENERATED presentations; for
/// bipartite tensor systems, swaps MIN and MAX over the dualized factors.
OperatorSystem dual_system(const OperatorSystem& G);

/// x in P iff sum_i M_i (x) M_i is psd: x pairs nonnegatively against its
/// own generated system.
Verdict in_P(const SystemElement& x, double tol);

OperatorSystem min_tensor_sys(const OperatorSystem& G, const OperatorSystem& H,
                              std::size_t L);
OperatorSystem max_tensor_sys(const OperatorSystem& G, const OperatorSystem& H,
                              std::size_t L);

/// IN iff the partial transpose on the second factor is psd within tol.
Verdict ppt_check(const HermMat& M, std::size_t m, std::size_t n, double tol);

/// Minimizes (v(x)w)* M (v(x)w) by alternating eigenvector descent from
/// seeded restarts. OUT with a product witness below -tol; IN is certified
/// for (2,2) and (2,3) (via the ppt relaxation), heuristic otherwise.
Verdict block_positive_check(const HermMat& M, std::size_t m, std::size_t n,
                             int restarts, double tol, std::uint64_t seed);

/// The psd cone of the product dimension, sitting between the separable
/// and block-positive cones.
Verdict middle_product_member(const HermMat& M, std::size_t m, std::size_t n,
                              double tol);

HermMat partial_transpose(const HermMat& M, std::size_t m, std::size_t n);

/// Most negative pairing between unit elements of the realized cone at the
/// given level, with the witnessing pair (heuristic search, seeded). A value
/// near zero is evidence that the cone pairs nonnegatively with itself.
struct PairingProbe {
  double value = 0;
  SystemElement u, y;
};
PairingProbe dual_pairing_probe(const std::vector<HermMat>& mats,
                                std::size_t space_dim, std::size_t level,
                                int restarts, std::uint64_t seed);

}  // namespace conelab
