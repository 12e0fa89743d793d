#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdtf/tree.hpp"

namespace pdtf {

// Dyadic rational num / 2^log2den, normalized (num odd or zero).
struct Dyadic {
  int64_t num = 0;
  int log2den = 0;

  Dyadic() = default;
  Dyadic(int64_t numerator, int log2denominator);
  static Dyadic from_int(int64_t v) { return Dyadic(v, 0); }

  Dyadic operator+(const Dyadic& o) const;
  Dyadic operator-(const Dyadic& o) const;
  Dyadic operator*(const Dyadic& o) const;
  Dyadic abs() const { return Dyadic(num < 0 ? -num : num, log2den); }
  bool operator==(const Dyadic&) const = default;
  bool operator<(const Dyadic& o) const;
  bool operator<=(const Dyadic& o) const { return *this < o || *this == o; }
  double to_double() const;
};

// Exact spectrum of a function on 2^n points: numerators over 2^n,
// indexed by the subset mask.
struct Spectrum {
  int n = 0;
  std::vector<int64_t> num;  // size 2^n; coefficient(S) = num[S] / 2^n

  Dyadic coeff(uint64_t mask) const { return Dyadic(num[mask], n); }
};

// In-place Walsh-Hadamard transform of an integer table.
void wht_inplace(std::vector<int64_t>& a);

// Exact spectrum from a 0/1 truth table (index = point mask; guard n <= 24).
Spectrum wht(const std::vector<uint8_t>& truth_table);

Spectrum spectrum(const ParityDecisionTree& tree);  // via truth table

// T-hat(S) = sum over leaves of 2^{-depth} * label * P_v-hat(S); exact and
// valid for every tree by the leaf partition of the cube.
Spectrum spectrum_via_leaves(const ParityDecisionTree& tree);

Dyadic level_mass(const Spectrum& spec, int level);
Dyadic total_mass(const Spectrum& spec);
Dyadic parseval_sum(const Spectrum& spec);  // sum of squared coefficients

struct LevelRow {
  int level = 0;
  Dyadic mass;
  // Exact constant-free bounds; PASS iff mass <= bound.
  Dyadic km_bound;         // p * min{C(d*l, l), 2^d - 1}; p*d at level 1
  bool pass = true;
  // Informational ratio against the unproven-constant branch
  // mass / (d^{l/2} * (l*log2 n)^l); not a pass/fail column.
  double ratio = 0.0;
};

struct LevelMassReport {
  int n = 0;
  int depth = 0;
  int64_t size = 0;
  Dyadic p;  // T-hat(empty)
  Dyadic total;        // L_1(T)
  bool km_total_pass;  // L_1(T) <= size
  std::vector<LevelRow> rows;
  double level1_conjecture_ratio = 0.0;  // mass / (p*sqrt(d*log(1/p)))
  bool all_pass() const;
};

LevelMassReport bound_report(const ParityDecisionTree& tree, int max_level);

std::string report_csv(const LevelMassReport& rep);
std::string spectrum_csv(const Spectrum& spec);

// Closed-form bound evaluators (log base 2).
// R(D,d,k,eps) = kappa * sqrt((D + d*k*(1/eps)^(1/k)) * log(1/eps))
double bound_R(double D, double d, double k, double eps, double kappa = 1.0);
// M(D,d,k,l,t,eps) = (tau*(D+d*k)*(n^l/eps)^(6/k)*log(n^l/eps))^(t/2), tau = 1e4
double bound_M(double D, double d, double k, int l, int t, double eps, double n);
// S(d,l,t,eps) = sqrt((tau*d)^t * log(n^{l-t}/eps)...log(n^{l-1}/eps)), tau = 32
double bound_S(double d, int l, int t, double eps, double n);

struct TruncationResult {
  Dyadic mass_truncated;
  Dyadic mass_original;
  Dyadic drift;        // |difference|
  Dyadic drift_bound;  // C(n,l) * Pr[disagree]
  bool within_bound;
};

TruncationResult mass_after_truncation(const ParityDecisionTree& tree, int depth, int level);

}  // namespace pdtf
