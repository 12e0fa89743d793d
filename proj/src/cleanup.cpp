#include "pdtf/cleanup.hpp"

#include <bit>
#include <functional>
#include <stdexcept>

#include "json.hpp"

namespace pdtf {

CleanTree cleanup_tree(const ParityDecisionTree& tree, int k, WitnessRule rule, uint64_t seed) {
  if (k < 2) throw std::invalid_argument("cleanup_tree: k must be >= 2");
  CleanTree ct;
  ct.k = k;
  ct.source_depth = tree.depth();

  std::vector<TreeNode> nodes;
  std::vector<NodeFlag> flags;
  std::vector<int> anc;
  std::vector<int> block;
  uint64_t block_counter = 0;

  // Emits the subtree simulating original node v under the given coset.
  // The subspace of the emitted node is k-clean on entry (root base case,
  // restored after every cleaning chain).
  std::function<int(int, const AffineCoset&)> build = [&](int v, const AffineCoset& coset) -> int {
    const TreeNode& orig = tree.node(v);
    if (orig.is_leaf) {
      int id = static_cast<int>(nodes.size());
      nodes.push_back({true, 0, -1, -1, orig.label});
      flags.push_back(NodeFlag::kClean);
      anc.push_back(id);
      block.push_back(0);
      return id;
    }
    F2Subspace span = coset.subspace();
    if (span.contains(orig.query)) {
      int sign = coset.correlation(orig.query);
      return build(sign > 0 ? orig.pos_child : orig.neg_child, coset);
    }
    int id = static_cast<int>(nodes.size());
    nodes.push_back({false, orig.query, -1, -1, 0});
    flags.push_back(NodeFlag::kClean);
    anc.push_back(id);
    block.push_back(0);

    // The cleaning queries depend only on the grown subspace, not on the
    // query answers, so both branches share the same chain (non-adaptive
    // block of length 1 + #witnesses).
    F2Subspace grown = span;
    grown.insert(orig.query);
    auto cleaned = clean_subspace(grown, k, rule, seed ^ (0x9e3779b97f4a7c15ull * ++block_counter));
    block[id] = 1 + static_cast<int>(cleaned.added_witnesses.size());

    std::function<int(size_t, int, const AffineCoset&)> chain =
        [&](size_t step, int orig_child, const AffineCoset& cs) -> int {
      if (step == cleaned.added_witnesses.size()) return build(orig_child, cs);
      uint64_t q = coord_mask(cleaned.added_witnesses[step]);
      int cid = static_cast<int>(nodes.size());
      nodes.push_back({false, q, -1, -1, 0});
      flags.push_back(NodeFlag::kCleaning);
      anc.push_back(id);
      block.push_back(0);
      for (int sign : {+1, -1}) {
        AffineCoset next = cs;
        next.constrain(q, sign);
        int child = chain(step + 1, orig_child, next);
        (sign > 0 ? nodes[cid].pos_child : nodes[cid].neg_child) = child;
      }
      return cid;
    };
    for (int sign : {+1, -1}) {
      AffineCoset next = coset;
      next.constrain(orig.query, sign);
      int child = chain(0, sign > 0 ? orig.pos_child : orig.neg_child, next);
      (sign > 0 ? nodes[id].pos_child : nodes[id].neg_child) = child;
    }
    return id;
  };

  int root = build(tree.root(), AffineCoset(tree.n()));
  ct.tree = ParityDecisionTree(tree.n(), std::move(nodes), root);
  ct.node_flags = std::move(flags);
  ct.clean_ancestor = std::move(anc);
  ct.block_len = std::move(block);
  return ct;
}

ValidationReport verify_clean(const CleanTree& ct) {
  ValidationReport rep = validate(ct.tree);
  if (!rep.ok()) return rep;
  auto add = [&](int id, std::string msg) { rep.issues.push_back({id, std::move(msg)}); };
  const ParityDecisionTree& t = ct.tree;
  int nn = static_cast<int>(t.nodes().size());
  if (static_cast<int>(ct.node_flags.size()) != nn || static_cast<int>(ct.block_len.size()) != nn ||
      static_cast<int>(ct.clean_ancestor.size()) != nn) {
    add(-1, "flag/ancestor/block arrays do not match node count");
    return rep;
  }

  // Per-node classification, recomputed from scratch.
  std::vector<int8_t> is_clean(nn, 0);
  for (int id = 0; id < nn; ++id) {
    const TreeNode& nd = t.node(id);
    const NodeContext& ctx = t.context(id);
    bool clean = is_k_clean(ctx.subspace, ct.k).clean;
    is_clean[id] = clean ? 1 : 0;
    if (nd.is_leaf) {
      if (!clean) add(id, "leaf subspace is not k-clean");
      continue;
    }
    if (clean) {
      if (ct.node_flags[id] != NodeFlag::kClean) add(id, "clean node flagged cleaning");
      continue;
    }
    if (ct.node_flags[id] != NodeFlag::kCleaning) add(id, "messy node flagged clean");
    if (weight(nd.query) != 1) {
      add(id, "cleaning node query is not a singleton");
      continue;
    }
    // The queried coordinate must be a mess-witness of S_v.
    int i = std::countr_zero(nd.query) + 1;
    if (ctx.subspace.contains(nd.query)) {
      add(id, "cleaning query already fixed");
      continue;
    }
    bool witness = false;
    for (uint64_t m : ctx.subspace.enumerate_span())
      if (weight(m) >= 1 && weight(m) <= ct.k && (m & nd.query)) witness = true;
    if (!witness) add(id, "cleaning query coordinate is not a mess-witness");
  }

  // Non-adaptive blocks from each clean internal node.
  for (int id = 0; id < nn; ++id) {
    if (t.node(id).is_leaf || ct.node_flags[id] != NodeFlag::kClean) continue;
    std::vector<int> level{id};
    int depth = 0;
    for (;;) {
      std::vector<int> next;
      for (int u : level) {
        if (t.node(u).is_leaf) continue;
        next.push_back(t.node(u).pos_child);
        next.push_back(t.node(u).neg_child);
      }
      ++depth;
      level = std::move(next);
      if (level.empty()) {
        add(id, "block ends without reaching k-clean nodes");
        break;
      }
      bool all_clean = true, all_cleaning = true;
      uint64_t q = t.node(level.front()).is_leaf ? 0 : t.node(level.front()).query;
      bool same_query = true;
      for (int u : level) {
        if (is_clean[u]) all_cleaning = false;
        else all_clean = false;
        uint64_t uq = t.node(u).is_leaf ? 0 : t.node(u).query;
        if (uq != q) same_query = false;
      }
      if (all_clean) {
        if (ct.block_len[id] != depth) add(id, "block_len mismatch");
        break;
      }
      if (!all_cleaning) {
        add(id, "block mixes clean and cleaning nodes at one depth");
        break;
      }
      if (!same_query) {
        add(id, "cleaning nodes at one block depth query different coordinates");
        break;
      }
    }
  }

  // Path accounting.
  struct Frame {
    int id;
    int clean_nodes;
    int jsum;
    int cor48;
    int prev_jsz;  // |J(v_{i-1})|, -1 at the root
  };
  std::vector<Frame> stack{{t.root(), 0, 0, 0, -1}};
  while (!stack.empty()) {
    Frame fr = stack.back();
    stack.pop_back();
    const TreeNode& nd = t.node(fr.id);
    const NodeContext& ctx = t.context(fr.id);
    if (nd.is_leaf) {
      if (fr.clean_nodes > ct.source_depth) add(fr.id, "more than d clean nodes on a path");
      if (fr.jsum > ctx.depth) add(fr.id, "sum |J| exceeds path length");
      if (fr.cor48 > 2 * ct.source_depth) add(fr.id, "sum of |J| after multi-fix steps exceeds 2d");
      continue;
    }
    int jsz = weight(ctx.newly_fixed);
    Frame next = fr;
    next.clean_nodes += is_clean[fr.id] ? 1 : 0;
    next.jsum += jsz;
    if (fr.prev_jsz > 1) next.cor48 += jsz;
    next.prev_jsz = jsz;
    next.id = nd.pos_child;
    stack.push_back(next);
    next.id = nd.neg_child;
    stack.push_back(next);
  }
  return rep;
}

std::vector<AncestorInfo> clean_ancestor_map(const CleanTree& ct) {
  const ParityDecisionTree& t = ct.tree;
  int nn = static_cast<int>(t.nodes().size());
  std::vector<AncestorInfo> out(nn);
  std::function<void(int, const AncestorInfo&)> walk = [&](int id, const AncestorInfo& from_parent) {
    const TreeNode& nd = t.node(id);
    bool self_clean = nd.is_leaf || ct.node_flags[id] == NodeFlag::kClean;
    out[id] = self_clean ? AncestorInfo{id, 0} : from_parent;
    if (nd.is_leaf) return;
    AncestorInfo down{out[id].clean_ancestor, out[id].fixed_since | t.context(id).newly_fixed};
    walk(nd.pos_child, down);
    walk(nd.neg_child, down);
  };
  walk(t.root(), AncestorInfo{t.root(), 0});
  return out;
}

std::string to_json(const CleanTree& ct) {
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(to_json(ct.tree));
  j["k"] = ct.k;
  j["source_depth"] = ct.source_depth;
  nlohmann::ordered_json fl = nlohmann::ordered_json::array();
  for (NodeFlag f : ct.node_flags) fl.push_back(f == NodeFlag::kClean ? "clean" : "cleaning");
  j["flags"] = fl;
  return j.dump(2) + "\n";
}

CleanTree clean_tree_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  CleanTree ct;
  ct.tree = tree_from_json(text);
  ct.k = j.at("k").get<int>();
  ct.source_depth = j.at("source_depth").get<int>();
  for (const auto& f : j.at("flags"))
    ct.node_flags.push_back(f.get<std::string>() == "clean" ? NodeFlag::kClean : NodeFlag::kCleaning);
  // Ancestors and block lengths are derivable; recompute.
  int nn = static_cast<int>(ct.tree.nodes().size());
  ct.clean_ancestor.assign(nn, -1);
  ct.block_len.assign(nn, 0);
  auto anc = clean_ancestor_map(ct);
  for (int i = 0; i < nn; ++i) ct.clean_ancestor[i] = anc[i].clean_ancestor;
  for (int id = 0; id < nn; ++id) {
    if (ct.tree.node(id).is_leaf || ct.node_flags[id] != NodeFlag::kClean) continue;
    int len = 0, u = id;
    // Block length along any branch: walk until the next non-cleaning node.
    for (;;) {
      ++len;
      u = ct.tree.node(u).pos_child;
      if (ct.tree.node(u).is_leaf || ct.node_flags[u] != NodeFlag::kCleaning) break;
    }
    ct.block_len[id] = len;
  }
  return ct;
}

}  // namespace pdtf
