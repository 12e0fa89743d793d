#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdtf/fourier.hpp"

namespace pdtf {

struct NoisyNode {
  bool is_leaf = false;
  int q = 0;          // 1-based coordinate index
  double gamma = 0.0;  // correlation in [-1,1]
  int pos_child = -1;
  int neg_child = -1;
  int label = 0;
};

class NoisyDecisionTree {
 public:
  NoisyDecisionTree() = default;
  NoisyDecisionTree(int n, std::vector<NoisyNode> nodes, int root);

  int n() const { return n_; }
  int root() const { return root_; }
  const std::vector<NoisyNode>& nodes() const { return nodes_; }
  const NoisyNode& node(int id) const { return nodes_.at(id); }

  double cost() const;  // max over root-to-leaf paths of sum gamma^2
  int depth() const;

 private:
  int n_ = 0;
  int root_ = 0;
  std::vector<NoisyNode> nodes_;
};

struct BiasBranch {
  double bias;
  double probability;
};

struct BiasUpdate {
  BiasBranch pos;  // edge labeled +1
  BiasBranch neg;  // edge labeled -1
};

// Claim: edge +1 gives bias (a+g)/(1+g*a) with probability (1+g*a)/2 and
// symmetrically for -1; |gamma| = 1 is the deterministic-read limit.
BiasUpdate child_bias(double alpha, double gamma);

// Exact acceptance probability E[T(x)] for a fixed input point.
double acceptance_probability(const NoisyDecisionTree& tree, uint64_t x);

// Monte-Carlo sample of the randomized output on a fixed input.
int sample_output(const NoisyDecisionTree& tree, uint64_t x, uint64_t seed);

// Real-valued spectrum, indexed by subset mask.
struct RealSpectrum {
  int n = 0;
  std::vector<double> coeff;

  double level_mass(int level) const;
  double parseval() const;  // sum of squared coefficients
};

// Bias propagation: DFS accumulating per-coordinate biases and reach
// probabilities; each accepting leaf contributes reach * prod_{j in S} alpha_j.
RealSpectrum exact_spectrum(const NoisyDecisionTree& tree);

// Independent route: WHT of the acceptance-probability table (guard n <= 20).
RealSpectrum spectrum_via_truth_table(const NoisyDecisionTree& tree);

struct NoisyLevelRow {
  int level;
  double mass;
  double ratio;  // mass / (p * d^{l/2} * sqrt(log(1/p) * log(n^l/p)^{l-1}))
};

struct NoisyReport {
  int n = 0;
  double cost = 0.0;
  double p = 0.0;
  double parseval = 0.0;
  bool parseval_pass = false;  // sum coeff^2 <= p
  std::vector<NoisyLevelRow> rows;
};

NoisyReport noisy_bound_report(const NoisyDecisionTree& tree, int max_level);

std::string noisy_report_csv(const NoisyReport& rep);

// Random cost-bounded tree; zero-correlation queries pad every path to the
// same length.
NoisyDecisionTree random_noisy_tree(int n, int depth, double max_cost, uint64_t seed);

std::string to_json(const NoisyDecisionTree& tree);
NoisyDecisionTree noisy_tree_from_json(const std::string& text);

}  // namespace pdtf
