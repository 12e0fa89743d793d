#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdtf/gf2.hpp"

namespace pdtf {

// Points of {+-1}^n are encoded as masks: bit i-1 set means x_i = -1,
// i.e. Enc(b) = ((-1)^{b_1},...). The parity prod_{i in Q} x_i is then
// (-1)^{|Q & b|}.
inline int parity_sign(uint64_t query, uint64_t point) {
  return (weight(query & point) & 1) ? -1 : 1;
}

struct TreeNode {
  bool is_leaf = false;
  uint64_t query = 0;  // non-empty for internal nodes
  int pos_child = -1;  // edge labeled +1
  int neg_child = -1;  // edge labeled -1
  int label = 0;       // 0/1 for leaves
};

struct NodeContext {
  F2Subspace subspace;         // S_v
  AffineCoset coset;           // P_v
  std::vector<int8_t> fixed;   // v^(i): index j-1 holds P_v-hat(j) in {-1,0,+1}
  uint64_t fixed_mask = 0;     // nonzero entries of fixed
  uint64_t newly_fixed = 0;    // J(v), internal nodes only
  int depth = 0;
  int parent = -1;
};

class ParityDecisionTree {
 public:
  ParityDecisionTree() = default;
  ParityDecisionTree(int n, std::vector<TreeNode> nodes, int root);

  int n() const { return n_; }
  int root() const { return root_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int id) const { return nodes_.at(id); }
  int depth() const;          // max leaf depth
  int64_t size() const;       // number of leaves
  std::vector<int> leaves() const;

  struct EvalResult {
    int label;
    std::vector<int> path;  // node ids, root..leaf
  };
  EvalResult evaluate(uint64_t x) const;

  // Contexts are computed once in a root-down pass and cached.
  const NodeContext& context(int id) const;

  // Exact 0/1 truth table over all 2^n points (guarded at n <= 24).
  std::vector<uint8_t> truth_table() const;

 private:
  int n_ = 0;
  int root_ = 0;
  std::vector<TreeNode> nodes_;
  mutable std::vector<NodeContext> contexts_;
  mutable bool contexts_ready_ = false;
  void build_contexts() const;
};

// P_v-hat(S): +-1 iff S is in the span with the coset's sign, else 0.
int correlation(const NodeContext& ctx, uint64_t set);

struct ValidationIssue {
  int node = -1;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

// Structural well-formedness, non-redundancy Q_v not in S_v, and the
// per-path accounting sum |J(v_i)| <= path length.
ValidationReport validate(const ParityDecisionTree& tree);

enum class QueryPolicy {
  kSingleton,     // standard decision tree
  kUniform,       // uniform random non-redundant parity
  kSmallSupport,  // parity on a random subset of size <= 3
};

ParityDecisionTree random_pdt(int n, int depth, QueryPolicy policy, uint64_t seed);

// Replaces every node at the given depth by a 0-leaf.
ParityDecisionTree truncate_depth(const ParityDecisionTree& tree, int depth);

// Exhaustive agreement over all 2^n points; guarded at n <= 20.
bool equivalent(const ParityDecisionTree& t1, const ParityDecisionTree& t2);

std::string to_json(const ParityDecisionTree& tree);
ParityDecisionTree tree_from_json(const std::string& text);

}  // namespace pdtf
