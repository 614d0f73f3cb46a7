#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "conelab/opsys.hpp"
#include "conelab/polycone.hpp"

namespace conelab {

enum class ExtendStrategy { GREEDY_DUAL_RAY, BISECTOR_2D, DAMPED_MIDPOINT };
enum class ExtendStatus { CONVERGED, ITERATION_CAP, EXACT };

/// Record of one enlargement run. residual_history holds the residual before
/// the first step and after every accepted step; it is non-increasing.
struct ExtensionTrace {
  std::size_t iterations = 0;
  std::vector<RatVec> added_rays;              // cone runs
  std::vector<SystemElement> added_elements;   // operator-system runs
  std::vector<double> residual_history;
  ExtendStatus status = ExtendStatus::ITERATION_CAP;
  std::size_t rejected_candidates = 0;
};

/// Enlarges a proper cone C with C contained in its dual to an
/// (approximately) self-dual cone E with C ⊆ E ⊆ C^v, both inclusions exact.
/// GREEDY_DUAL_RAY absorbs the farthest extreme ray of the current dual each
/// step; DAMPED_MIDPOINT moves half-way instead; BISECTOR_2D emits the
/// exactly self-dual right-angle cone over C's bisector (dimension 2 only).
/// The exact invariant <g_i, g_j> >= 0 over all generator pairs is checked
/// after every accepted step.
std::pair<PolyCone, ExtensionTrace> selfdual_extend_cone(
    const PolyCone& C, double eps, ExtendStrategy strategy,
    std::size_t max_iter, std::uint64_t seed);

/// Numerical counterpart for truncated operator systems: grows the generated
/// system G by elements of its dual that pass the self-pairing gate (in_P),
/// which preserves G ⊆ G^v. The residual at level n is the most negative
/// pairing found between unit elements of the dual's level-n cone.
std::pair<OperatorSystem, ExtensionTrace> selfdual_extend_system(
    const OperatorSystem& G, double eps, std::size_t L, std::size_t max_iter,
    std::uint64_t seed);

}  // namespace conelab
