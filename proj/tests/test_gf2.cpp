#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "pdtf/gf2.hpp"

using namespace pdtf;

namespace {

F2Subspace span_of(std::initializer_list<std::initializer_list<int>> gens, int n) {
  F2Subspace s(n);
  for (const auto& g : gens) s.insert(F2Vector::from_coords(g, n).bits);
  return s;
}

uint64_t mask_of(std::initializer_list<int> coords, int n) {
  return F2Vector::from_coords(coords, n).bits;
}

}  // namespace

TEST_CASE("vector coordinate round trip") {
  F2Vector v = F2Vector::from_coords({1, 3, 5}, 6);
  CHECK(v.bits == 0b10101);
  CHECK(v.weight() == 3);
  CHECK(v.coords() == std::vector<int>{1, 3, 5});
  CHECK(F2Vector(0, 4).is_zero());
  CHECK_THROWS(F2Vector(0b10000, 4));
}

TEST_CASE("insert on empty, repeated, and dependent vectors") {
  F2Subspace s(6);
  CHECK(s.insert(mask_of({1, 2}, 6)));
  CHECK(s.rank() == 1);
  CHECK_FALSE(s.insert(mask_of({1, 2}, 6)));
  CHECK(s.rank() == 1);

  F2Subspace t = span_of({{1, 2}, {2, 3}}, 6);
  CHECK(t.rank() == 2);
  CHECK_FALSE(t.insert(mask_of({1, 3}, 6)));
  // {1,3} = {1,2} xor {2,3}; confirm against the four span members.
  std::vector<uint64_t> span = t.enumerate_span();
  std::set<uint64_t> members(span.begin(), span.end());
  CHECK(members == std::set<uint64_t>{0, 0b011, 0b110, 0b101});
}

TEST_CASE("membership") {
  F2Subspace s = span_of({{1, 2, 3}}, 5);
  CHECK(s.contains(mask_of({1, 2, 3}, 5)));
  CHECK_FALSE(s.contains(mask_of({1}, 5)));
  CHECK(s.contains(0));
  CHECK(span_of({{1, 2}, {2, 3}}, 5).contains(mask_of({1, 3}, 5)));
}

TEST_CASE("membership agrees with span enumeration") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 4 + static_cast<int>(rng() % 9);
    F2Subspace s(n);
    for (int g = 0; g < 5; ++g) s.insert(rng() & ((uint64_t{1} << n) - 1));
    REQUIRE(s.rank() <= 10);
    std::vector<uint64_t> span = s.enumerate_span();
    std::set<uint64_t> members(span.begin(), span.end());
    CHECK(members.size() == size_t{1} << s.rank());
    for (uint64_t v = 0; v < (uint64_t{1} << n); ++v)
      CHECK(s.contains(v) == (members.count(v) > 0));
  }
}

TEST_CASE("fixed coordinates") {
  CHECK(span_of({{1, 2, 3}}, 4).fixed_coordinates() == 0);
  CHECK(span_of({{1}, {2}}, 4).fixed_coordinates() == 0b11);
  // {2} = {1,2} xor {1}, so all three coordinates end up fixed.
  CHECK(span_of({{1, 2}, {1}, {3}}, 4).fixed_coordinates() == 0b111);
}

TEST_CASE("cleanness test and witnesses") {
  F2Subspace s = span_of({{1, 2, 3}}, 4);
  CHECK(is_k_clean(s, 2).clean);
  KCleanResult r = is_k_clean(s, 3);
  CHECK_FALSE(r.clean);
  CHECK(*r.violating_set == 0b111);
  CHECK(*r.witness == 1);
  CHECK(is_k_clean(span_of({{1}, {2}, {3}}, 4), 3).clean);
}

TEST_CASE("subspace cleanup examples") {
  F2Subspace s = span_of({{1, 2, 3}}, 4);
  CleanSubspaceResult res = clean_subspace(s, 3);
  CHECK(res.subspace == span_of({{1}, {2}, {3}}, 4));
  CHECK(res.subspace.rank() == 3);
  CHECK(res.added_witnesses.size() == 2);
  CHECK(is_k_clean(res.subspace, 3).clean);

  CHECK(clean_subspace(s, 2).subspace == s);
  F2Subspace single = span_of({{1}}, 4);
  for (int k = 2; k <= 4; ++k) CHECK(clean_subspace(single, k).subspace == single);
}

TEST_CASE("cleanup is order-invariant and rank-bounded") {
  WitnessRule rules[5] = {WitnessRule::kBatchMinimal, WitnessRule::kBatchReverse,
                          WitnessRule::kSingleLowest, WitnessRule::kSingleHighest,
                          WitnessRule::kSingleRandom};
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 5 + static_cast<int>(rng() % 8);
    F2Subspace s(n);
    int gens = 2 + static_cast<int>(rng() % 4);
    for (int g = 0; g < gens; ++g) s.insert(rng() & ((uint64_t{1} << n) - 1));
    int k = 2 + static_cast<int>(rng() % 2);
    CleanSubspaceResult base = clean_subspace(s, k, rules[0], 1);
    CHECK(is_k_clean(base.subspace, k).clean);
    CHECK(base.subspace.rank() <= s.rank() * k);
    for (int p = 1; p < 5; ++p) {
      CleanSubspaceResult other = clean_subspace(s, k, rules[p], rng());
      CHECK(other.subspace == base.subspace);
      CHECK(other.added_witnesses.size() == base.added_witnesses.size());
    }
  }
}

TEST_CASE("canonical form is insertion-order independent") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 6 + static_cast<int>(rng() % 6);
    std::vector<uint64_t> gens;
    for (int g = 0; g < 5; ++g) gens.push_back(rng() & ((uint64_t{1} << n) - 1));
    F2Subspace a(n);
    for (uint64_t g : gens) a.insert(g);
    std::shuffle(gens.begin(), gens.end(), rng);
    F2Subspace b(n);
    for (uint64_t g : gens) b.insert(g);
    CHECK(a == b);
  }
}

TEST_CASE("weight counting with the subspace bound") {
  F2Subspace s = span_of({{1, 2}, {3, 4}}, 5);
  CHECK(weight_members(s, 2) == 2);
  CHECK(weight_members(s, 4) == 1);
  CHECK(weight_members(s, 0) == 0);
  int d = s.rank();
  for (int l = 1; l <= 5; ++l)
    CHECK(weight_members(s, l) <=
          std::min(binomial(int64_t{d} * l, l), (int64_t{1} << d) - 1));
}

TEST_CASE("binomial") {
  CHECK(binomial(4, 2) == 6);
  CHECK(binomial(10, 0) == 1);
  CHECK(binomial(3, 5) == 0);
  CHECK(binomial(12, 3) == 220);
}

TEST_CASE("coset correlations match exhaustive averages") {
  int n = 6;
  AffineCoset coset(n);
  CHECK(coset.correlation(0) == 1);
  coset.constrain(mask_of({1, 2}, n), -1);
  CHECK(coset.correlation(mask_of({1, 2}, n)) == -1);
  CHECK(coset.correlation(mask_of({1}, n)) == 0);
  coset.constrain(mask_of({2, 3}, n), -1);
  CHECK(coset.correlation(mask_of({1, 3}, n)) == 1);  // product of the two signs

  // Oracle: average x_S over the points satisfying both constraints.
  for (uint64_t s = 0; s < (uint64_t{1} << n); ++s) {
    int64_t total = 0, count = 0;
    for (uint64_t x = 0; x < (uint64_t{1} << n); ++x) {
      if (weight(x & 0b011) % 2 != 1) continue;
      if (weight(x & 0b110) % 2 != 1) continue;
      ++count;
      total += weight(x & s) % 2 ? -1 : 1;
    }
    CHECK(count == (int64_t{1} << (n - 2)));
    CHECK(total == coset.correlation(s) * count);
  }
}

TEST_CASE("contradictory constraints are rejected") {
  AffineCoset coset(4);
  CHECK(coset.constrain(0b0011, 1));
  CHECK(coset.constrain(0b0110, 1));
  // {1,3} is implied with sign +1; forcing -1 must throw.
  CHECK_THROWS(coset.constrain(0b0101, -1));
  CHECK_FALSE(coset.constrain(0b0101, 1));
  CHECK(coset.subspace() == span_of({{1, 2}, {2, 3}}, 4));
}
