#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdtf/tree.hpp"

namespace pdtf {

enum class NodeFlag : uint8_t { kClean, kCleaning };

// A k-clean tree: every leaf subspace is k-clean, every internal node is
// either k-clean or a cleaning node querying a singleton mess-witness, and
// each clean internal node starts a block of non-adaptive queries.
struct CleanTree {
  ParityDecisionTree tree;
  int k = 2;
  int source_depth = 0;  // depth d of the tree the cleanup started from
  std::vector<NodeFlag> node_flags;
  std::vector<int> clean_ancestor;  // C(v), nearest clean ancestor incl. itself
  std::vector<int> block_len;       // l(v) for clean internal nodes, else 0
};

CleanTree cleanup_tree(const ParityDecisionTree& tree, int k,
                       WitnessRule rule = WitnessRule::kBatchMinimal,
                       uint64_t seed = 0);

// Checks every CleanTree invariant from scratch plus the per-path
// accounting: <= source_depth clean nodes, sum |J| <= path length, and
// sum over |J(v_{i-1})|>1 steps of |J(v_i)| <= 2*source_depth.
ValidationReport verify_clean(const CleanTree& ct);

struct AncestorInfo {
  int clean_ancestor = -1;  // C(v)
  uint64_t fixed_since = 0;  // L(v): union of J over strict ancestors back to C(v)
};

std::vector<AncestorInfo> clean_ancestor_map(const CleanTree& ct);

std::string to_json(const CleanTree& ct);
CleanTree clean_tree_from_json(const std::string& text);

}  // namespace pdtf
