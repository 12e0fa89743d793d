#include "pdtf/tree.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace pdtf {

ParityDecisionTree::ParityDecisionTree(int n, std::vector<TreeNode> nodes, int root)
    : n_(n), root_(root), nodes_(std::move(nodes)) {
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("tree dimension out of [1,64]");
  if (root_ < 0 || root_ >= static_cast<int>(nodes_.size()))
    throw std::invalid_argument("root id out of range");
}

int ParityDecisionTree::depth() const {
  int best = 0;
  for (int id = 0; id < static_cast<int>(nodes_.size()); ++id)
    if (nodes_[id].is_leaf) best = std::max(best, context(id).depth);
  return best;
}

int64_t ParityDecisionTree::size() const {
  int64_t leaves = 0;
  for (const auto& nd : nodes_)
    if (nd.is_leaf) ++leaves;
  return leaves;
}

std::vector<int> ParityDecisionTree::leaves() const {
  std::vector<int> out;
  for (int id = 0; id < static_cast<int>(nodes_.size()); ++id)
    if (nodes_[id].is_leaf) out.push_back(id);
  return out;
}

ParityDecisionTree::EvalResult ParityDecisionTree::evaluate(uint64_t x) const {
  EvalResult res;
  int cur = root_;
  for (;;) {
    res.path.push_back(cur);
    const TreeNode& nd = nodes_.at(cur);
    if (nd.is_leaf) {
      res.label = nd.label;
      return res;
    }
    cur = parity_sign(nd.query, x) > 0 ? nd.pos_child : nd.neg_child;
    if (cur < 0 || cur >= static_cast<int>(nodes_.size()))
      throw std::runtime_error("malformed tree: child id out of range");
  }
}

void ParityDecisionTree::build_contexts() const {
  contexts_.assign(nodes_.size(), NodeContext());
  std::vector<int> stack{root_};
  std::vector<int8_t> visited(nodes_.size(), 0);
  contexts_[root_].subspace = F2Subspace(n_);
  contexts_[root_].coset = AffineCoset(n_);
  contexts_[root_].fixed.assign(n_, 0);
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (visited[id]) throw std::runtime_error("malformed tree: node reached twice");
    visited[id] = 1;
    NodeContext& ctx = contexts_[id];
    const TreeNode& nd = nodes_[id];
    if (nd.is_leaf) continue;
    if (nd.query == 0) throw std::runtime_error("malformed tree: empty query");
    F2Subspace grown = ctx.subspace;
    grown.insert(nd.query);
    ctx.newly_fixed = grown.fixed_coordinates() & ~ctx.fixed_mask;
    for (int sign : {+1, -1}) {
      int child = sign > 0 ? nd.pos_child : nd.neg_child;
      if (child < 0 || child >= static_cast<int>(nodes_.size()))
        throw std::runtime_error("malformed tree: child id out of range");
      NodeContext& cc = contexts_[child];
      cc.subspace = grown;
      cc.coset = ctx.coset;
      cc.coset.constrain(nd.query, sign);
      cc.fixed = ctx.fixed;
      cc.fixed_mask = ctx.fixed_mask;
      uint64_t nf = ctx.newly_fixed;
      while (nf) {
        int j = std::countr_zero(nf);
        nf &= nf - 1;
        cc.fixed[j] = static_cast<int8_t>(cc.coset.correlation(uint64_t{1} << j));
        cc.fixed_mask |= uint64_t{1} << j;
      }
      cc.depth = ctx.depth + 1;
      cc.parent = id;
      stack.push_back(child);
    }
  }
  contexts_ready_ = true;
}

const NodeContext& ParityDecisionTree::context(int id) const {
  if (!contexts_ready_) build_contexts();
  if (id < 0 || id >= static_cast<int>(contexts_.size()))
    throw std::invalid_argument("unknown node id");
  return contexts_[id];
}

std::vector<uint8_t> ParityDecisionTree::truth_table() const {
  if (n_ > 24) throw std::runtime_error("truth table guard: n > 24");
  std::vector<uint8_t> out(size_t{1} << n_);
  for (uint64_t x = 0; x < out.size(); ++x) out[x] = static_cast<uint8_t>(evaluate(x).label);
  return out;
}

int correlation(const NodeContext& ctx, uint64_t set) { return ctx.coset.correlation(set); }

ValidationReport validate(const ParityDecisionTree& tree) {
  ValidationReport rep;
  auto add = [&](int id, std::string msg) { rep.issues.push_back({id, std::move(msg)}); };
  // Structural pass; context() throws on malformed trees, so do it by hand.
  std::vector<int> indeg(tree.nodes().size(), 0);
  for (int id = 0; id < static_cast<int>(tree.nodes().size()); ++id) {
    const TreeNode& nd = tree.node(id);
    if (nd.is_leaf) {
      if (nd.label != 0 && nd.label != 1) add(id, "leaf label not 0/1");
      continue;
    }
    if (nd.query == 0) add(id, "internal node with empty query");
    for (int child : {nd.pos_child, nd.neg_child}) {
      if (child < 0 || child >= static_cast<int>(tree.nodes().size()))
        add(id, "child id out of range");
      else
        ++indeg[child];
    }
  }
  for (int id = 0; id < static_cast<int>(tree.nodes().size()); ++id) {
    if (id == tree.root() && indeg[id] != 0) add(id, "root has a parent");
    if (id != tree.root() && indeg[id] != 1) add(id, "node in-degree != 1");
  }
  if (!rep.ok()) return rep;

  // Non-redundancy and path J-accounting.
  struct Frame {
    int id;
    F2Subspace span;
    int jsum;
    int depth;
  };
  std::vector<Frame> stack{{tree.root(), F2Subspace(tree.n()), 0, 0}};
  while (!stack.empty()) {
    Frame fr = std::move(stack.back());
    stack.pop_back();
    const TreeNode& nd = tree.node(fr.id);
    if (nd.is_leaf) {
      if (fr.jsum > fr.depth) add(fr.id, "path J-sum exceeds path length");
      continue;
    }
    if (fr.span.contains(nd.query)) {
      add(fr.id, "redundant query: implied by ancestors");
      continue;
    }
    uint64_t before = fr.span.fixed_coordinates();
    F2Subspace grown = fr.span;
    grown.insert(nd.query);
    int jsz = weight(grown.fixed_coordinates() & ~before);
    stack.push_back({nd.pos_child, grown, fr.jsum + jsz, fr.depth + 1});
    stack.push_back({nd.neg_child, grown, fr.jsum + jsz, fr.depth + 1});
  }
  return rep;
}

ParityDecisionTree random_pdt(int n, int depth, QueryPolicy policy, uint64_t seed) {
  if (depth < 0 || depth > n) throw std::invalid_argument("random_pdt: need 0 <= depth <= n");
  std::mt19937_64 rng(seed);
  std::vector<TreeNode> nodes;
  uint64_t full = n == 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1;

  auto sample_query = [&](const F2Subspace& span) -> uint64_t {
    for (int tries = 0; tries < 1000; ++tries) {
      uint64_t q = 0;
      switch (policy) {
        case QueryPolicy::kSingleton:
          q = uint64_t{1} << (rng() % n);
          break;
        case QueryPolicy::kUniform:
          q = rng() & full;
          break;
        case QueryPolicy::kSmallSupport: {
          int sz = 1 + static_cast<int>(rng() % 3);
          for (int i = 0; i < sz; ++i) q |= uint64_t{1} << (rng() % n);
          break;
        }
      }
      if (q != 0 && !span.contains(q)) return q;
    }
    throw std::runtime_error("random_pdt: could not extend without redundancy");
  };

  // Recursive lambda via explicit stack would reorder RNG draws between
  // runs of equal seed only if traversal order changed; keep it recursive.
  std::function<int(int, const F2Subspace&)> build = [&](int at, const F2Subspace& span) -> int {
    if (at == depth) {
      nodes.push_back({true, 0, -1, -1, static_cast<int>(rng() & 1)});
      return static_cast<int>(nodes.size()) - 1;
    }
    uint64_t q = sample_query(span);
    F2Subspace grown = span;
    grown.insert(q);
    int id = static_cast<int>(nodes.size());
    nodes.push_back({false, q, -1, -1, 0});
    nodes[id].pos_child = build(at + 1, grown);
    nodes[id].neg_child = build(at + 1, grown);
    return id;
  };
  int root = build(0, F2Subspace(n));
  return ParityDecisionTree(n, std::move(nodes), root);
}

ParityDecisionTree truncate_depth(const ParityDecisionTree& tree, int depth) {
  if (depth < 0) throw std::invalid_argument("truncate_depth: negative depth");
  std::vector<TreeNode> nodes;
  std::function<int(int, int)> build = [&](int id, int at) -> int {
    const TreeNode& nd = tree.node(id);
    int out = static_cast<int>(nodes.size());
    if (at == depth && !nd.is_leaf) {
      nodes.push_back({true, 0, -1, -1, 0});
      return out;
    }
    nodes.push_back(nd);
    if (!nd.is_leaf) {
      nodes[out].pos_child = build(nd.pos_child, at + 1);
      nodes[out].neg_child = build(nd.neg_child, at + 1);
    }
    return out;
  };
  int root = build(tree.root(), 0);
  return ParityDecisionTree(tree.n(), std::move(nodes), root);
}

bool equivalent(const ParityDecisionTree& t1, const ParityDecisionTree& t2) {
  require_dim(t1.n(), t2.n(), "equivalent");
  if (t1.n() > 20) throw std::runtime_error("equivalence guard: n > 20");
  for (uint64_t x = 0; x < (uint64_t{1} << t1.n()); ++x)
    if (t1.evaluate(x).label != t2.evaluate(x).label) return false;
  return true;
}

std::string to_json(const ParityDecisionTree& tree) {
  nlohmann::ordered_json j;
  j["n"] = tree.n();
  j["root"] = tree.root();
  j["nodes"] = nlohmann::ordered_json::array();
  for (int id = 0; id < static_cast<int>(tree.nodes().size()); ++id) {
    const TreeNode& nd = tree.node(id);
    nlohmann::ordered_json nj;
    nj["id"] = id;
    if (nd.is_leaf) {
      nj["leaf"] = nd.label;
    } else {
      nj["query"] = F2Vector(nd.query, tree.n()).coords();
      nj["pos_child"] = nd.pos_child;
      nj["neg_child"] = nd.neg_child;
    }
    j["nodes"].push_back(nj);
  }
  return j.dump(2) + "\n";
}

ParityDecisionTree tree_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  int n = j.at("n").get<int>();
  int root = j.at("root").get<int>();
  std::vector<TreeNode> nodes;
  for (const auto& nj : j.at("nodes")) {
    int id = nj.at("id").get<int>();
    if (id < 0) throw std::invalid_argument("negative node id");
    if (id >= static_cast<int>(nodes.size())) nodes.resize(id + 1);
    TreeNode nd;
    if (nj.contains("leaf")) {
      nd.is_leaf = true;
      nd.label = nj.at("leaf").get<int>();
    } else {
      nd.query = F2Vector::from_coords(nj.at("query").get<std::vector<int>>(), n).bits;
      nd.pos_child = nj.at("pos_child").get<int>();
      nd.neg_child = nj.at("neg_child").get<int>();
    }
    nodes[id] = nd;
  }
  return ParityDecisionTree(n, std::move(nodes), root);
}

}  // namespace pdtf
