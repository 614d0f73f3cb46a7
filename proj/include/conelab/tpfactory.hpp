#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "conelab/conetensor.hpp"
#include "conelab/opsys.hpp"
#include "conelab/polycone.hpp"

namespace conelab {

enum class Stem { SIMPLEX, OPERATOR };

/// One realization-family entry (D, E, c, x). For the simplex stem the level
/// is 1 and x is a rational vector in the flattened V (x) W (index v*dim(E)+w).
struct SimplexEntry {
  PolyCone D, E;
  RatVec x;
};

/// Operator-stem entry: x lives over V (x) W at matrix level `level`.
/// Factors must be presented in realized form.
struct OperatorEntry {
  OperatorSystem D, E;
  std::size_t level;
  SystemElement x;
};

class FamilyError : public std::invalid_argument {
 public:
  enum class Code { EMPTY_FAMILY, SIGN_CONDITION_VIOLATED };
  FamilyError(Code code, std::size_t index, const std::string& what)
      : std::invalid_argument(what), code(code), index(index) {}
  Code code;
  std::size_t index;  // offending entry for SIGN_CONDITION_VIOLATED
};

/// Validated finite realization family. Every x must lie in the signed
/// intrinsic cone ±(D ⊗max E) (exact on the simplex side, psd inner check
/// on the operator side); an empty family would describe the full space.
class TensorFamily {
 public:
  Stem stem() const { return stem_; }
  const std::vector<SimplexEntry>& simplex_entries() const { return sentries_; }
  const std::vector<OperatorEntry>& operator_entries() const { return oentries_; }

 private:
  friend TensorFamily build_family(std::vector<SimplexEntry>);
  friend TensorFamily build_family(std::vector<OperatorEntry>);
  Stem stem_ = Stem::SIMPLEX;
  std::vector<SimplexEntry> sentries_;
  std::vector<OperatorEntry> oentries_;
};

TensorFamily build_family(std::vector<SimplexEntry> entries);
TensorFamily build_family(std::vector<OperatorEntry> entries);

/// A tensor product defined by a family; when clamp_max is set, membership
/// is additionally intersected with the maximal tensor product.
struct ConstructedProduct {
  TensorFamily family;
  bool clamp_max = true;
};

/// Wraps a family; clamp_max defaults to whether the family contains the
/// minimal tensor product (then clamping yields the classical functorial
/// range), and to false otherwise.
ConstructedProduct make_product(TensorFamily family);
ConstructedProduct make_product(TensorFamily family, bool clamp_max);

/// Exact membership for the simplex stem: a is in G (x) H iff for every
/// entry the shuffled element x_i (x) a satisfies all facets of
/// (D_i min G) max (E_i min H).
bool tp_member_cone(const ConstructedProduct& P, const PolyCone& G,
                    const PolyCone& H, const RatVec& a);

/// The constructed product at (G, H) as an explicit facet-represented cone
/// (same inequalities tp_member_cone evaluates).
PolyCone materialize(const ConstructedProduct& P, const PolyCone& G,
                     const PolyCone& H);

/// dual(P applied to the duals); pairs with conetensor::dual_tensor for the
/// CONSTRUCTED kind.
PolyCone dual_tensor_constructed(const ConstructedProduct& P, const PolyCone& G,
                                 const PolyCone& H);

/// Operator-stem membership at level n, certified where possible: OUT with a
/// violating product witness; IN via the psd inner bound, the block
/// positivity oracle, or exhausted polyhedral factor duals; else UNKNOWN.
Verdict tp_member_opsys(const ConstructedProduct& P, const OperatorSystem& G,
                        const OperatorSystem& H, std::size_t n,
                        const SystemElement& a, double tol,
                        std::uint64_t seed);

/// True iff every x_i lies in +(D_i max E_i) (the gate for the product to
/// contain the minimal tensor product). Operator entries require a certified
/// IN verdict.
bool contains_min_check(const ConstructedProduct& P);

/// Functoriality of the constructed product under positive maps, sampled on
/// exactly-represented members (simplex stem).
bool functoriality_check_constructed(const ConstructedProduct& P,
                                     const RatMat& f, const RatMat& g,
                                     const PolyCone& G, const PolyCone& G2,
                                     const PolyCone& H, const PolyCone& H2,
                                     std::size_t samples, std::uint64_t seed);

}  // namespace conelab
