#pragma once

#include <Eigen/Dense>

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "conelab/ratlin.hpp"

namespace conelab {

struct PropernessReport {
  bool is_closed = true;  // polyhedral cones are closed
  bool is_sharp = false;
  bool is_full_dimensional = false;
  bool is_proper = false;
};

/// A polyhedral cone in R^dim, carrying a generator (V) and/or facet (H)
/// representation. Facets are inner normals: cone = {y : <f,y> >= 0 for all f}.
/// Stored vectors are primitive integer vectors (denominators cleared, gcd 1).
///
/// Values are immutable; the canonical double-description conversion is
/// memoized per cone and shared between copies.
class PolyCone {
 public:
  PolyCone(std::size_t dim, std::optional<std::vector<RatVec>> generators,
           std::optional<std::vector<RatVec>> facets);

  static PolyCone from_generators(std::size_t dim, std::vector<RatVec> gens);
  static PolyCone from_facets(std::size_t dim, std::vector<RatVec> facets);
  static PolyCone orthant(std::size_t n);

  std::size_t dim() const { return dim_; }
  bool has_generators() const { return gens_.has_value(); }
  bool has_facets() const { return facets_.has_value(); }
  const std::vector<RatVec>& generators() const;
  const std::vector<RatVec>& facets() const;

  /// Canonical form with both representations; computed once, shared.
  const PolyCone& converted() const;

  /// Dimension of C ∩ -C (0 iff sharp).
  std::size_t lineality_dim() const;
  /// Codimension of span(C) (0 iff full-dimensional).
  std::size_t span_codim() const;

 private:
  friend PolyCone dual(const PolyCone&);
  struct Cache;
  std::size_t dim_;
  std::optional<std::vector<RatVec>> gens_, facets_;
  std::shared_ptr<Cache> cache_;
};

/// Minimal V-representation of {x : <c,x> >= 0 for all c in constraints}:
/// a lineality basis (rref, canonical) plus the extreme rays of the pointed
/// part, each reduced modulo the lineality space and primitive.
struct DDResult {
  std::vector<RatVec> lineality;
  std::vector<RatVec> rays;
};
DDResult dd_extreme_rays(std::size_t dim, const std::vector<RatVec>& constraints);

/// Both representations populated; rays/facets irredundant for proper cones.
PolyCone dd_convert(const PolyCone& c);

/// The dual cone {y : <y,x> >= 0 for all x in c}, obtained by exchanging
/// the generator and facet roles of the converted form.
PolyCone dual(const PolyCone& c);

/// Exact membership test.
bool member(const PolyCone& c, const RatVec& v);

/// Exact equality as point sets (mutual containment).
bool equal(const PolyCone& a, const PolyCone& b);

PropernessReport properness(const PolyCone& c);

/// Cone generated by the union of generators.
PolyCone sum(const PolyCone& a, const PolyCone& b);
/// Cone cut out by the union of facets.
PolyCone intersect(const PolyCone& a, const PolyCone& b);

/// Euclidean projection onto a proper cone, by active-set nonnegative least
/// squares over the generators. KKT residual <= 1e-10 on success; throws
/// on non-convergence.
Eigen::VectorXd project_onto_cone(const PolyCone& c, const Eigen::VectorXd& v);

/// delta(c) = max over unit extreme rays u of c of dist(u, c^v), and
/// symmetrically for extreme rays of c^v against c. Zero iff c is self-dual
/// (up to float tolerance). Requires c proper.
double selfdual_residual(const PolyCone& c);

}  // namespace conelab
