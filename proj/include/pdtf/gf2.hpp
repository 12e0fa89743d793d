#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pdtf {

// Coordinates are 1-based ([n] convention); coordinate i maps to bit i-1.
inline constexpr int kMaxDim = 64;

int weight(uint64_t bits);
uint64_t coord_mask(int i);

// Subset of [n] as a fixed-width bit mask.
struct F2Vector {
  uint64_t bits = 0;
  int n = 0;

  F2Vector() = default;
  F2Vector(uint64_t bits_, int n_);
  static F2Vector from_coords(const std::vector<int>& coords, int n);

  std::vector<int> coords() const;
  int weight() const { return pdtf::weight(bits); }
  bool is_zero() const { return bits == 0; }
  bool operator==(const F2Vector&) const = default;
};

// GF(2) row space in reduced row-echelon form. Rows are kept sorted by
// pivot (lowest set coordinate); each pivot coordinate is zero in every
// other row, so two equal subspaces have identical row lists.
class F2Subspace {
 public:
  explicit F2Subspace(int n = 0);

  int n() const { return n_; }
  int rank() const { return static_cast<int>(rows_.size()); }
  const std::vector<uint64_t>& rows() const { return rows_; }

  // Returns true iff vec was independent of the current span.
  bool insert(uint64_t vec);
  bool contains(uint64_t vec) const;
  // Reduces vec by the basis; zero result means membership.
  uint64_t reduce(uint64_t vec) const;

  // All i with {i} in the span, as a mask.
  uint64_t fixed_coordinates() const;

  // 2^rank members, XOR-Gray order starting at 0. Guarded at rank <= 24.
  std::vector<uint64_t> enumerate_span() const;

  bool operator==(const F2Subspace&) const = default;

 private:
  int n_;
  std::vector<uint64_t> rows_;
};

F2Subspace make_span(const std::vector<F2Vector>& gens, int n);

struct KCleanResult {
  bool clean = true;
  std::optional<int> witness;            // a mess-witness coordinate
  std::optional<uint64_t> violating_set;  // minimum-weight violating member
};

// Def: every member of weight in [1,k] has all its coordinates fixed.
// The minimal violating set is found by scanning span members in
// increasing weight, ties broken by numeric mask order.
KCleanResult is_k_clean(const F2Subspace& s, int k);

enum class WitnessRule {
  kBatchMinimal,   // add all but the last coordinate of the minimal set
  kBatchReverse,   // same batch, emitted in reverse order
  kSingleLowest,   // one singleton at a time, lowest coordinate
  kSingleHighest,  // one singleton at a time, highest coordinate
  kSingleRandom,   // one singleton at a time, seeded choice
};

struct CleanSubspaceResult {
  F2Subspace subspace;
  std::vector<int> added_witnesses;  // coordinates, in insertion order
};

CleanSubspaceResult clean_subspace(const F2Subspace& s, int k,
                                   WitnessRule rule = WitnessRule::kBatchMinimal,
                                   uint64_t seed = 0);

// |{S in span : weight(S) = l}| with the empty set excluded.
int64_t weight_members(const F2Subspace& s, int l);

int64_t binomial(int64_t n, int64_t k);

// Affine coset described dually: constrained parities with forced signs.
// Each row carries the chi value in {+1,-1} forced on that parity; the
// sign assignment extends multiplicatively to the whole span.
class AffineCoset {
 public:
  explicit AffineCoset(int n = 0);

  int n() const { return n_; }
  int rank() const { return static_cast<int>(rows_.size()); }
  F2Subspace subspace() const;

  // Adds the constraint chi_vec = sign. Returns false if vec was already
  // in the span (no rank change; the caller must not contradict it).
  bool constrain(uint64_t vec, int sign);

  // +1/-1 if vec is in the span (with the extended sign), 0 otherwise.
  int correlation(uint64_t vec) const;

  bool operator==(const AffineCoset&) const = default;

 private:
  int n_;
  std::vector<uint64_t> rows_;  // RREF, pivot-sorted; augmented with negs_
  std::vector<int8_t> negs_;    // 1 if the row's sign is -1
};

void require_dim(int n, int other, const char* what);

}  // namespace pdtf
