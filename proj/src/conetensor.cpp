#include "conelab/conetensor.hpp"

#include <stdexcept>

namespace conelab {

namespace {

void require_proper(const PolyCone& c, const char* who) {
  if (!properness(c).is_proper)
    throw std::invalid_argument(std::string(who) + ": cone must be proper");
}

}  // namespace

PolyCone min_tensor(const PolyCone& C, const PolyCone& D) {
  require_proper(C, "min_tensor");
  require_proper(D, "min_tensor");
  const auto& gc = C.converted().generators();
  const auto& gd = D.converted().generators();
  std::vector<RatVec> gens;
  gens.reserve(gc.size() * gd.size());
  for (const auto& g : gc)
    for (const auto& h : gd) gens.push_back(kron(g, h));
  return PolyCone::from_generators(C.dim() * D.dim(), std::move(gens));
}

PolyCone max_tensor(const PolyCone& C, const PolyCone& D) {
  require_proper(C, "max_tensor");
  require_proper(D, "max_tensor");
  return dual(min_tensor(dual(C), dual(D)));
}

PolyCone dual_tensor(const TensorKind& kind, const PolyCone& C,
                     const PolyCone& D) {
  switch (kind.tag) {
    case TensorKind::Tag::MIN:
      return dual(min_tensor(dual(C), dual(D)));
    case TensorKind::Tag::MAX:
      return dual(max_tensor(dual(C), dual(D)));
    default:
      throw std::invalid_argument(
          "dual_tensor: kind not available on polyhedral cones");
  }
}

bool positive_map(const RatMat& f, const PolyCone& C, const PolyCone& C2) {
  if (f.cols() != C.dim() || f.rows() != C2.dim())
    throw std::invalid_argument("positive_map: shape mismatch");
  for (const auto& g : C.converted().generators())
    if (!member(C2, matvec(f, g))) return false;
  return true;
}

RatVec sample_member(const PolyCone& C, std::mt19937_64& rng) {
  const auto& gens = C.converted().generators();
  std::uniform_int_distribution<int> coeff(0, 3);
  RatVec v(C.dim(), Rat(0));
  bool nonzero = false;
  for (const auto& g : gens) {
    int c = coeff(rng);
    if (c == 0) continue;
    nonzero = true;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += Rat(c) * g[i];
  }
  if (!nonzero && !gens.empty()) return gens[rng() % gens.size()];
  return v;
}

bool functoriality_check(const TensorKind& kind, const RatMat& f,
                         const RatMat& g, const PolyCone& C, const PolyCone& C2,
                         const PolyCone& D, const PolyCone& D2,
                         std::size_t samples, std::uint64_t seed) {
  if (!positive_map(f, C, C2) || !positive_map(g, D, D2))
    throw std::invalid_argument("functoriality_check: maps must be positive");
  PolyCone source = kind.tag == TensorKind::Tag::MAX ? max_tensor(C, D)
                                                     : min_tensor(C, D);
  PolyCone target = kind.tag == TensorKind::Tag::MAX ? max_tensor(C2, D2)
                                                     : min_tensor(C2, D2);
  if (kind.tag != TensorKind::Tag::MIN && kind.tag != TensorKind::Tag::MAX)
    throw std::invalid_argument("functoriality_check: unsupported kind here");
  RatMat fg = kron(f, g);
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    RatVec z = sample_member(source, rng);
    if (!member(target, matvec(fg, z))) return false;
  }
  return true;
}

}  // namespace conelab
