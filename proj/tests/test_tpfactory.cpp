#include <doctest.h>

#include <random>

#include "conelab/tpfactory.hpp"

using namespace conelab;

namespace {

RatVec rv(std::initializer_list<int> xs) {
  RatVec v;
  for (int x : xs) v.emplace_back(x);
  return v;
}

PolyCone halfline() { return PolyCone::orthant(1); }

SimplexEntry unit_entry() {
  return SimplexEntry{halfline(), halfline(), rv({1})};
}

PolyCone random_proper(std::mt19937_64& rng, std::size_t dim,
                       std::size_t max_gens) {
  std::uniform_int_distribution<int> coord(-3, 3);
  std::uniform_int_distribution<std::size_t> cnt(dim, max_gens);
  while (true) {
    std::vector<RatVec> gens;
    std::size_t want = cnt(rng);
    while (gens.size() < want) {
      RatVec g(dim);
      for (auto& x : g) x = coord(rng);
      if (!is_zero(g)) gens.push_back(std::move(g));
    }
    PolyCone c = PolyCone::from_generators(dim, std::move(gens));
    if (properness(c).is_proper) return c;
  }
}

RatVec random_vector(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_int_distribution<int> coord(-4, 4);
  RatVec v(dim);
  for (auto& x : v) x = coord(rng);
  return v;
}

OperatorSystem trivial_sys() {
  HermMat one(1, 1);
  one(0, 0) = 1;
  return OperatorSystem::realized({one});
}

HermMat bell_matrix() {
  HermMat B = HermMat::Zero(4, 4);
  B(0, 0) = B(0, 3) = B(3, 0) = B(3, 3) = 1;
  return B;
}

SystemElement element_from_matrix(const HermMat& M) {
  std::vector<HermMat> coeffs;
  for (const auto& A : herm_basis(2))
    for (const auto& B : herm_basis(2)) {
      HermMat c(1, 1);
      c(0, 0) = (M * kron(A, B)).trace().real();
      coeffs.push_back(c);
    }
  return make_element(1, std::move(coeffs));
}

}  // namespace

TEST_CASE("family validation") {
  CHECK(build_family({unit_entry()}).simplex_entries().size() == 1);
  CHECK_THROWS_AS(build_family(std::vector<SimplexEntry>{}), FamilyError);

  // a negated elementary tensor is a valid entry (either sign is allowed)
  PolyCone c = PolyCone::from_generators(2, {rv({1, 0}), rv({1, 1})});
  SimplexEntry neg{c, PolyCone::orthant(2), RatVec(4, Rat(0))};
  RatVec d = rv({2, 1});  // interior of c
  RatVec e = rv({1, 1});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) neg.x[i * 2 + j] = -(d[i] * e[j]);
  CHECK(build_family({neg}).simplex_entries().size() == 1);

  // an element outside both signed copies is rejected with its index
  SimplexEntry bad{PolyCone::orthant(2), PolyCone::orthant(2),
                   rv({1, 0, 0, -1})};
  try {
    build_family({unit_entry(), bad});
    FAIL("expected FamilyError");
  } catch (const FamilyError& err) {
    CHECK(err.code == FamilyError::Code::SIGN_CONDITION_VIOLATED);
    CHECK(err.index == 1);
  }
}

TEST_CASE("unit family reproduces the maximal tensor product") {
  ConstructedProduct P = make_product(build_family({unit_entry()}));
  CHECK(P.clamp_max);  // the unit entry contains the minimal product
  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    PolyCone G = random_proper(rng, 2 + t % 2, 4);
    PolyCone H = random_proper(rng, 2 + (t / 2) % 2, 4);
    PolyCone mx = max_tensor(G, H);
    for (int s = 0; s < 6; ++s) {
      RatVec a = random_vector(rng, G.dim() * H.dim());
      CHECK(tp_member_cone(P, G, H, a) == member(mx, a));
    }
    CHECK(equal(materialize(P, G, H), mx));
  }
}

TEST_CASE("products of members always belong when entries are inside max") {
  std::mt19937_64 rng(9);
  PolyCone D = random_proper(rng, 2, 3);
  PolyCone E = random_proper(rng, 2, 3);
  // an elementary positive tensor entry
  RatVec d = D.converted().generators()[0];
  RatVec e = E.converted().generators()[0];
  SimplexEntry ent{D, E, kron(d, e)};
  ConstructedProduct P = make_product(build_family({ent, unit_entry()}));
  CHECK(contains_min_check(P));
  for (int t = 0; t < 10; ++t) {
    PolyCone G = random_proper(rng, 2, 4);
    PolyCone H = random_proper(rng, 2, 4);
    for (const auto& g : G.converted().generators())
      for (const auto& h : H.converted().generators())
        CHECK(tp_member_cone(P, G, H, kron(g, h)));
  }
}

TEST_CASE("clamp rejects elements outside max") {
  ConstructedProduct P = make_product(build_family({unit_entry()}), true);
  PolyCone G = PolyCone::orthant(2), H = PolyCone::orthant(2);
  RatVec outside = rv({1, 0, 0, -1});
  CHECK_FALSE(tp_member_cone(P, G, H, outside));
}

TEST_CASE("contains-min gate and its violating witness") {
  std::mt19937_64 rng(17);
  PolyCone D = random_proper(rng, 2, 3);
  PolyCone E = random_proper(rng, 2, 3);
  // interior point of D tensored with an interior point of E, negated:
  // valid entry, but outside +(D max E)
  RatVec d(D.dim(), Rat(0)), e(E.dim(), Rat(0));
  for (const auto& g : D.converted().generators())
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i];
  for (const auto& g : E.converted().generators())
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += g[i];
  SimplexEntry neg{D, E, kron(d, e)};
  for (auto& v : neg.x) v = -v;
  ConstructedProduct P = make_product(build_family({neg}));
  CHECK_FALSE(contains_min_check(P));
  CHECK_FALSE(P.clamp_max);

  // a violating minimal generator exists and is found
  PolyCone G = random_proper(rng, 2, 3);
  PolyCone H = random_proper(rng, 2, 3);
  bool found = false;
  for (const auto& g : G.converted().generators()) {
    for (const auto& h : H.converted().generators())
      if (!tp_member_cone(P, G, H, kron(g, h))) { found = true; break; }
    if (found) break;
  }
  CHECK(found);
}

TEST_CASE("enlarging the family shrinks the product") {
  std::mt19937_64 rng(23);
  PolyCone D = random_proper(rng, 2, 3);
  PolyCone E = random_proper(rng, 2, 3);
  RatVec d = D.converted().generators()[0];
  RatVec e = E.converted().generators()[0];
  ConstructedProduct small = make_product(build_family({unit_entry()}), false);
  ConstructedProduct big =
      make_product(build_family({unit_entry(), SimplexEntry{D, E, kron(d, e)}}),
                   false);
  for (int t = 0; t < 8; ++t) {
    PolyCone G = random_proper(rng, 2, 4);
    PolyCone H = random_proper(rng, 2, 4);
    for (int s = 0; s < 10; ++s) {
      RatVec a = random_vector(rng, 4);
      if (tp_member_cone(big, G, H, a)) CHECK(tp_member_cone(small, G, H, a));
    }
  }
}

TEST_CASE("unit family duality matches the min/max exchange") {
  ConstructedProduct P = make_product(build_family({unit_entry()}));
  std::mt19937_64 rng(31);
  for (int t = 0; t < 5; ++t) {
    PolyCone G = random_proper(rng, 2, 4);
    PolyCone H = random_proper(rng, 2, 4);
    CHECK(equal(dual_tensor_constructed(P, G, H), min_tensor(G, H)));
  }
}

TEST_CASE("constructed products are closed under convex combinations") {
  ConstructedProduct P = make_product(build_family({unit_entry()}));
  std::mt19937_64 rng(37);
  PolyCone G = random_proper(rng, 2, 4);
  PolyCone H = random_proper(rng, 2, 4);
  PolyCone M = materialize(P, G, H);
  std::mt19937_64 rng2(41);
  for (int t = 0; t < 50; ++t) {
    RatVec a = sample_member(M, rng2);
    RatVec b = sample_member(M, rng2);
    RatVec mix(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      mix[i] = Rat(2) * a[i] + Rat(3) * b[i];
    CHECK(tp_member_cone(P, G, H, mix));
  }
}

TEST_CASE("constructed functoriality under positive maps") {
  ConstructedProduct P = make_product(build_family({unit_entry()}));
  PolyCone o2 = PolyCone::orthant(2);
  RatMat id2 = RatMat::identity(2);
  CHECK(functoriality_check_constructed(P, id2, id2, o2, o2, o2, o2, 20, 1));

  // a genuinely moving positive map
  RatMat f(2, 2);
  f.at(0, 0) = 1; f.at(0, 1) = 1; f.at(1, 1) = 2;
  PolyCone c = PolyCone::from_generators(2, {rv({1, 0}), rv({3, 4})});
  CHECK(positive_map(f, c, o2));
  CHECK(functoriality_check_constructed(P, f, id2, c, o2, o2, o2, 30, 2));
}

// ---------------------------------------------------------------------------
// operator stem

TEST_CASE("operator families validate the sign condition") {
  OperatorSystem triv = trivial_sys();
  HermMat one(1, 1);
  one(0, 0) = 1;
  OperatorEntry unit{triv, triv, 1, make_element(1, {one})};
  TensorFamily fam = build_family({unit});
  CHECK(fam.operator_entries().size() == 1);

  HermMat D = HermMat::Zero(2, 2);
  D(0, 0) = 1;
  D(1, 1) = -1;
  OperatorEntry bad{triv, triv, 2, make_element(2, {D})};
  CHECK_THROWS_AS(build_family({unit, bad}), FamilyError);
}

TEST_CASE("unit operator family membership at level one") {
  OperatorSystem triv = trivial_sys();
  HermMat one(1, 1);
  one(0, 0) = 1;
  ConstructedProduct P =
      make_product(build_family({OperatorEntry{triv, triv, 1,
                                               make_element(1, {one})}}));
  OperatorSystem G = OperatorSystem::intrinsic(2);

  // Bell is block positive (it is psd): certified IN
  Verdict bell = tp_member_opsys(P, G, G, 1, element_from_matrix(bell_matrix()),
                                 1e-7, 5);
  CHECK(bell.in());

  // the negated identity is rejected by any valid family
  Verdict neg = tp_member_opsys(
      P, G, G, 1, element_from_matrix((-HermMat::Identity(4, 4)).eval()), 1e-7,
      6);
  CHECK(neg.out());

  // elementary products of positives are members
  HermMat Pm = HermMat::Zero(2, 2), Qm = HermMat::Zero(2, 2);
  Pm(0, 0) = 2; Pm(1, 1) = 1;
  Qm(0, 0) = 1; Qm(1, 1) = 3;
  Verdict prod = tp_member_opsys(P, G, G, 1,
                                 element_from_matrix(kron(Pm, Qm)), 1e-7, 7);
  CHECK(prod.in());

  // swap: not psd yet block positive, certified at (2,2)
  HermMat S = HermMat::Zero(4, 4);
  S(0, 0) = S(3, 3) = 1;
  S(1, 2) = S(2, 1) = 1;
  Verdict swp = tp_member_opsys(P, G, G, 1, element_from_matrix(S), 1e-6, 8);
  CHECK(swp.in());
}

TEST_CASE("operator contains-min gate") {
  OperatorSystem triv = trivial_sys();
  HermMat one(1, 1);
  one(0, 0) = 1;
  ConstructedProduct unit =
      make_product(build_family({OperatorEntry{triv, triv, 1,
                                               make_element(1, {one})}}));
  CHECK(contains_min_check(unit));

  HermMat minus(1, 1);
  minus(0, 0) = -1;
  ConstructedProduct negated =
      make_product(build_family({OperatorEntry{triv, triv, 1,
                                               make_element(1, {minus})}}));
  CHECK_FALSE(contains_min_check(negated));
}
