#include "pdtf/gf2.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <stdexcept>

namespace pdtf {

int weight(uint64_t bits) { return std::popcount(bits); }

uint64_t coord_mask(int i) {
  if (i < 1 || i > kMaxDim) throw std::invalid_argument("coordinate out of [1,64]");
  return uint64_t{1} << (i - 1);
}

void require_dim(int n, int other, const char* what) {
  if (n != other) throw std::invalid_argument(std::string("dimension mismatch in ") + what);
}

static void check_n(int n) {
  if (n < 0 || n > kMaxDim) throw std::invalid_argument("ambient dimension must be in [0,64]");
}

static uint64_t full_mask(int n) { return n == 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1; }

F2Vector::F2Vector(uint64_t bits_, int n_) : bits(bits_), n(n_) {
  check_n(n_);
  if (bits & ~full_mask(n_)) throw std::invalid_argument("coordinate outside [n]");
}

F2Vector F2Vector::from_coords(const std::vector<int>& coords, int n) {
  uint64_t m = 0;
  for (int c : coords) m |= coord_mask(c);
  return F2Vector(m, n);
}

std::vector<int> F2Vector::coords() const {
  std::vector<int> out;
  for (int i = 1; i <= n; ++i)
    if (bits & coord_mask(i)) out.push_back(i);
  return out;
}

F2Subspace::F2Subspace(int n) : n_(n) { check_n(n); }

uint64_t F2Subspace::reduce(uint64_t vec) const {
  for (uint64_t row : rows_) {
    uint64_t pivot = row & (~row + 1);
    if (vec & pivot) vec ^= row;
  }
  return vec;
}

bool F2Subspace::insert(uint64_t vec) {
  if (vec & ~full_mask(n_)) throw std::invalid_argument("dimension mismatch in insert");
  vec = reduce(vec);
  if (vec == 0) return false;
  uint64_t pivot = vec & (~vec + 1);
  for (uint64_t& row : rows_)
    if (row & pivot) row ^= vec;
  auto it = std::upper_bound(rows_.begin(), rows_.end(), vec,
                             [](uint64_t a, uint64_t b) { return (a & (~a + 1)) < (b & (~b + 1)); });
  rows_.insert(it, vec);
  return true;
}

bool F2Subspace::contains(uint64_t vec) const { return reduce(vec) == 0; }

uint64_t F2Subspace::fixed_coordinates() const {
  uint64_t out = 0;
  for (int i = 1; i <= n_; ++i)
    if (contains(coord_mask(i))) out |= coord_mask(i);
  return out;
}

std::vector<uint64_t> F2Subspace::enumerate_span() const {
  if (rank() > 24) throw std::runtime_error("span enumeration guard: rank > 24");
  std::vector<uint64_t> out;
  out.reserve(size_t{1} << rank());
  out.push_back(0);
  uint64_t cur = 0;
  for (uint64_t i = 1; i < (uint64_t{1} << rank()); ++i) {
    cur ^= rows_[std::countr_zero(i)];  // Gray-code step
    out.push_back(cur);
  }
  return out;
}

F2Subspace make_span(const std::vector<F2Vector>& gens, int n) {
  F2Subspace s(n);
  for (const auto& g : gens) {
    require_dim(n, g.n, "make_span");
    s.insert(g.bits);
  }
  return s;
}

KCleanResult is_k_clean(const F2Subspace& s, int k) {
  if (k < 1 || k > s.n()) throw std::invalid_argument("is_k_clean: k out of [1,n]");
  uint64_t fixed = s.fixed_coordinates();
  std::vector<uint64_t> members = s.enumerate_span();
  // Minimal violating set: increasing weight, then numeric mask order.
  std::sort(members.begin(), members.end(), [](uint64_t a, uint64_t b) {
    int wa = weight(a), wb = weight(b);
    return wa != wb ? wa < wb : a < b;
  });
  for (uint64_t m : members) {
    int w = weight(m);
    if (w < 1) continue;
    if (w > k) break;
    uint64_t messy = m & ~fixed;
    if (messy != 0) {
      KCleanResult r;
      r.clean = false;
      r.witness = std::countr_zero(messy) + 1;
      r.violating_set = m;
      return r;
    }
  }
  return {};
}

CleanSubspaceResult clean_subspace(const F2Subspace& s, int k, WitnessRule rule, uint64_t seed) {
  if (k < 2) throw std::invalid_argument("clean_subspace: k must be >= 2");
  std::mt19937_64 rng(seed);
  CleanSubspaceResult res{s, {}};
  for (;;) {
    KCleanResult kc = is_k_clean(res.subspace, k);
    if (kc.clean) return res;
    uint64_t viol = *kc.violating_set;
    uint64_t fixed = res.subspace.fixed_coordinates();
    std::vector<int> messy;
    for (int i = 1; i <= res.subspace.n(); ++i)
      if ((viol & coord_mask(i)) && !(fixed & coord_mask(i))) messy.push_back(i);
    std::vector<int> picked;
    switch (rule) {
      case WitnessRule::kBatchMinimal:
        picked.assign(messy.begin(), messy.end() - 1);
        break;
      case WitnessRule::kBatchReverse:
        picked.assign(messy.rbegin(), messy.rend() - 1);
        break;
      case WitnessRule::kSingleLowest:
        picked.push_back(messy.front());
        break;
      case WitnessRule::kSingleHighest:
        picked.push_back(messy.back());
        break;
      case WitnessRule::kSingleRandom:
        picked.push_back(messy[rng() % messy.size()]);
        break;
    }
    for (int i : picked) {
      res.subspace.insert(coord_mask(i));
      res.added_witnesses.push_back(i);
    }
  }
}

int64_t weight_members(const F2Subspace& s, int l) {
  if (l <= 0) return 0;
  int64_t count = 0;
  for (uint64_t m : s.enumerate_span())
    if (weight(m) == l) ++count;
  return count;
}

int64_t binomial(int64_t n, int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  int64_t r = 1;
  for (int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

AffineCoset::AffineCoset(int n) : n_(n) { check_n(n); }

F2Subspace AffineCoset::subspace() const {
  F2Subspace s(n_);
  for (uint64_t row : rows_) s.insert(row);
  return s;
}

bool AffineCoset::constrain(uint64_t vec, int sign) {
  if (vec & ~full_mask(n_)) throw std::invalid_argument("dimension mismatch in constrain");
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1/-1");
  int8_t neg = sign < 0 ? 1 : 0;
  for (size_t r = 0; r < rows_.size(); ++r) {
    uint64_t pivot = rows_[r] & (~rows_[r] + 1);
    if (vec & pivot) {
      vec ^= rows_[r];
      neg ^= negs_[r];
    }
  }
  if (vec == 0) {
    if (neg != 0) throw std::runtime_error("contradictory sign constraint");
    return false;
  }
  uint64_t pivot = vec & (~vec + 1);
  for (size_t r = 0; r < rows_.size(); ++r)
    if (rows_[r] & pivot) {
      rows_[r] ^= vec;
      negs_[r] ^= neg;
    }
  auto cmp = [](uint64_t a, uint64_t b) { return (a & (~a + 1)) < (b & (~b + 1)); };
  size_t pos = std::upper_bound(rows_.begin(), rows_.end(), vec, cmp) - rows_.begin();
  rows_.insert(rows_.begin() + pos, vec);
  negs_.insert(negs_.begin() + pos, neg);
  return true;
}

int AffineCoset::correlation(uint64_t vec) const {
  if (vec & ~full_mask(n_)) throw std::invalid_argument("dimension mismatch in correlation");
  int8_t neg = 0;
  for (size_t r = 0; r < rows_.size(); ++r) {
    uint64_t pivot = rows_[r] & (~rows_[r] + 1);
    if (vec & pivot) {
      vec ^= rows_[r];
      neg ^= negs_[r];
    }
  }
  if (vec != 0) return 0;
  return neg ? -1 : 1;
}

}  // namespace pdtf
