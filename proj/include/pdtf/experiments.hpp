#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdtf/cleanup.hpp"
#include "pdtf/fourier.hpp"

namespace pdtf {

// Sign pattern a_S supported on |S| = level, indexed by subset mask.
struct SignPattern {
  int n = 0;
  int level = 0;
  std::vector<int8_t> sign;  // size 2^n, values in {-1,0,+1}

  static SignPattern from_spectrum(const Spectrum& spec, int level);
  static SignPattern all_ones(int n, int level);
};

// One random root-to-leaf walk with the per-step martingale values
// X_T^(i) and the even/odd step decomposition (Y_i, Z_i) over the newly
// fixed coordinates.
struct WalkStep {
  int node = -1;      // v_i
  int64_t x = 0;      // X_T^(i), recomputed from scratch
  int64_t y = 0;      // even part of the increment (0 at i = 0)
  int64_t z = 0;      // odd part of the increment (0 at i = 0)
  uint64_t newly_fixed = 0;  // I_i = J(v_{i-1})
};

struct WalkTrace {
  std::vector<WalkStep> steps;  // index i = depth along the path
  bool telescoping_ok = true;   // X^(i) - X^(i-1) == Y_i + Z_i at every step
};

// X_T^(i) at a given node, from scratch.
int64_t walk_value(const ParityDecisionTree& tree, int node, uint64_t tmask,
                   const SignPattern& signs);

WalkTrace walk_trace(const CleanTree& ct, uint64_t tmask, const SignPattern& signs, uint64_t seed);

struct MartingaleCheck {
  bool increment_ok = true;      // X-increment == Y + Z at every branch
  bool z_mean_zero = true;       // Z_pos + Z_neg == 0 at every internal node
  bool y_constant = true;        // Y identical across sibling branches
  bool y_zero = true;            // every step with |I| <= 1 has Y == 0
  bool level1_bounded = true;    // |sum a_j v_j^(i)| <= i at every node (level-1 signs)
  int64_t max_abs_y = 0;
};

// Branch-exhaustive verification over every internal node of the tree.
MartingaleCheck check_martingale_structure(const CleanTree& ct, uint64_t tmask,
                                           const SignPattern& signs);

// Exhaustive leaf enumeration of E[T(v)*sum_S a_S v_S]; equals the exact
// level mass when signs come from the spectrum and level <= k.
Dyadic level_mass_via_leaves(const CleanTree& ct, const SignPattern& signs);

struct WalkEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  int64_t trials = 0;
};

WalkEstimate level_mass_via_walks(const CleanTree& ct, const SignPattern& signs, int64_t trials,
                                  uint64_t seed);

enum class StepRule {
  kUnit,      // Delta = 1 at every step
  kAdaptive,  // magnitude depends on the sign history, sum Delta^2 <= U
};

struct AzumaRow {
  double beta;
  double empirical;  // Pr[max_i |X^(i)| >= beta*sqrt(2U)], U = sum Delta^2 budget
  double bound;      // 2*exp(-beta^2/2)
  double mc_sigma;
  bool pass;  // empirical <= bound + 3*mc_sigma
};

std::vector<AzumaRow> azuma_empirical(int steps, StepRule rule, const std::vector<double>& betas,
                                      int64_t trials, uint64_t seed);

struct HypercontractivityResult {
  int checked = 0;
  int failures = 0;
};

// Exact check of E[f^q] <= (q-1)^(d*q/2) * E[f^2]^(q/2) for random
// integer-coefficient multilinear polynomials of degree <= d; q in {4,6,8}.
HypercontractivityResult hypercontractivity_check(int degree, int q, int n, int trials,
                                                  uint64_t seed);

// Uniform distribution over a linear code; independence order equals
// dual minimum distance minus one.
struct KWiseDistribution {
  F2Subspace code;
  int independence = 0;
};

// Orthogonal complement under the standard inner product.
F2Subspace dual_subspace(const F2Subspace& s);

KWiseDistribution make_kwise_distribution(const F2Subspace& code);

// Exhaustive unbiasedness of every character of weight <= k.
bool verify_kwise(const KWiseDistribution& dist, int k);

// Sparse integer-coefficient multilinear polynomial.
struct IntPolynomial {
  int n = 0;
  std::vector<std::pair<uint64_t, int>> terms;  // (mask, coefficient)
  int degree() const;
  int64_t eval(uint64_t point) const;  // point encodes -1 entries as set bits
};

struct MomentCheckResult {
  bool moment_bound_ok = false;      // E[(f-mu)^(2l)] <= sigma^(2l)*(2l-1)^(d*l)
  bool moments_match_uniform = false;  // degree <= independence moments agree
};

MomentCheckResult kwise_moment_check(const KWiseDistribution& dist, const IntPolynomial& f, int l);

struct SweepConfig {
  int n = 8;
  std::vector<int> depths;
  std::vector<int> ks;
  std::vector<int> levels;
  std::vector<uint64_t> seeds;
  QueryPolicy policy = QueryPolicy::kUniform;
  int jobs = 1;
};

SweepConfig sweep_config_from_json(const std::string& text);
std::string sweep(const SweepConfig& config);  // CSV, deterministic row order

}  // namespace pdtf
