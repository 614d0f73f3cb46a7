#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "conelab/polycone.hpp"

namespace conelab {

/// Which tensor product of cones to apply. CONSTRUCTED kinds carry the id of
/// a registered realization family; MIDDLE_PSD only exists on the operator
/// side and is rejected by the polyhedral operations.
struct TensorKind {
  enum class Tag { MIN, MAX, CONSTRUCTED, MIDDLE_PSD };
  Tag tag = Tag::MIN;
  std::string family_id;

  static TensorKind Min() { return {Tag::MIN, {}}; }
  static TensorKind Max() { return {Tag::MAX, {}}; }
  static TensorKind Constructed(std::string id) {
    return {Tag::CONSTRUCTED, std::move(id)};
  }
  static TensorKind MiddlePsd() { return {Tag::MIDDLE_PSD, {}}; }
};

/// Cone generated by the Kronecker products g (x) h of the generators.
/// Index convention: (g (x) h)[i*dim(D)+j] = g[i]*h[j].
PolyCone min_tensor(const PolyCone& C, const PolyCone& D);

/// Dual of the min tensor of the duals; its facets are the pairwise
/// Kronecker products of the factor facets.
PolyCone max_tensor(const PolyCone& C, const PolyCone& D);

/// dual(tensor(kind, dual C, dual D)); swaps MIN and MAX.
PolyCone dual_tensor(const TensorKind& kind, const PolyCone& C,
                     const PolyCone& D);

/// True iff f maps every generator of C into C2, exactly.
bool positive_map(const RatMat& f, const PolyCone& C, const PolyCone& C2);

/// Samples members of C (x) D, pushes them through f (x) g and tests
/// membership in C2 (x) D2, all exactly. Positivity of f and g is a
/// precondition and verified. For MIN and MAX the outcome is always true;
/// a false return signals a broken construction.
bool functoriality_check(const TensorKind& kind, const RatMat& f,
                         const RatMat& g, const PolyCone& C, const PolyCone& C2,
                         const PolyCone& D, const PolyCone& D2,
                         std::size_t samples, std::uint64_t seed);

/// Nonnegative random combination of the generators (used for sampling
/// members of exactly-represented cones).
RatVec sample_member(const PolyCone& C, std::mt19937_64& rng);

}  // namespace conelab
