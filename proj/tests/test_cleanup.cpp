#include <random>

#include "doctest.h"
#include "pdtf/cleanup.hpp"

using namespace pdtf;

namespace {

ParityDecisionTree parity3() {
  std::vector<TreeNode> nodes;
  nodes.push_back({true, 0, -1, -1, 0});
  nodes.push_back({true, 0, -1, -1, 1});
  nodes.push_back({false, 0b111, 0, 1, 0});
  return ParityDecisionTree(4, std::move(nodes), 2);
}

ParityDecisionTree chain1234() {
  std::vector<TreeNode> nodes;
  auto leaf = [&](int label) {
    nodes.push_back({true, 0, -1, -1, label});
    return static_cast<int>(nodes.size()) - 1;
  };
  auto internal = [&](uint64_t q, int pos, int neg) {
    nodes.push_back({false, q, pos, neg, 0});
    return static_cast<int>(nodes.size()) - 1;
  };
  int cur = internal(0b0001, leaf(1), leaf(0));
  cur = internal(0b1001, cur, leaf(0));
  cur = internal(0b0101, cur, leaf(0));
  cur = internal(0b0011, cur, leaf(0));
  return ParityDecisionTree(4, std::move(nodes), cur);
}

}  // namespace

TEST_CASE("standard decision trees are untouched") {
  ParityDecisionTree dt = random_pdt(8, 5, QueryPolicy::kSingleton, 21);
  for (int k : {2, 3, 4}) {
    CleanTree ct = cleanup_tree(dt, k);
    CHECK(ct.tree.nodes().size() == dt.nodes().size());
    CHECK(ct.tree.depth() == dt.depth());
    CHECK(equivalent(dt, ct.tree));
    for (NodeFlag f : ct.node_flags) CHECK(f == NodeFlag::kClean);
    CHECK(verify_clean(ct).ok());
  }
}

TEST_CASE("triple-parity tree: k=3 adds two cleaning queries per branch") {
  ParityDecisionTree t = parity3();
  CleanTree ct = cleanup_tree(t, 3);
  CHECK(ct.tree.depth() == 3);  // d*k = 1*3
  CHECK(equivalent(t, ct.tree));
  CHECK(verify_clean(ct).ok());
  CHECK(ct.block_len[ct.tree.root()] == 3);
  F2Subspace expect(4);
  expect.insert(0b001);
  expect.insert(0b010);
  expect.insert(0b100);
  for (int leaf : ct.tree.leaves()) {
    const NodeContext& ctx = ct.tree.context(leaf);
    CHECK(ctx.subspace == expect);
    CHECK(is_k_clean(ctx.subspace, 3).clean);
    // Signs stay consistent: the product of the three singleton values
    // equals the answer to the original query.
    CHECK(ctx.fixed[0] * ctx.fixed[1] * ctx.fixed[2] == ctx.coset.correlation(0b111));
  }
  // k=2 leaves it alone.
  CleanTree ct2 = cleanup_tree(t, 2);
  CHECK(ct2.tree.depth() == 1);
  CHECK(ct2.tree.nodes().size() == t.nodes().size());
  CHECK(verify_clean(ct2).ok());
}

TEST_CASE("random corpus: equivalence, depth bound, verifier") {
  std::mt19937_64 rng(31);
  QueryPolicy policies[3] = {QueryPolicy::kSingleton, QueryPolicy::kUniform,
                             QueryPolicy::kSmallSupport};
  for (int trial = 0; trial < 15; ++trial) {
    int n = 5 + static_cast<int>(rng() % 6);
    int d = 2 + static_cast<int>(rng() % 4);
    ParityDecisionTree t = random_pdt(n, d, policies[trial % 3], rng());
    for (int k = 2; k <= 3; ++k) {
      CleanTree ct = cleanup_tree(t, k);
      CHECK(equivalent(t, ct.tree));
      CHECK(ct.tree.depth() <= d * k);
      CHECK(verify_clean(ct).ok());
    }
  }
}

TEST_CASE("verifier rejects hand-built violations") {
  ParityDecisionTree t = parity3();
  // Flag the messy single-query tree as already 3-clean.
  CleanTree fake;
  fake.tree = t;
  fake.k = 3;
  fake.source_depth = 1;
  fake.node_flags.assign(t.nodes().size(), NodeFlag::kClean);
  fake.clean_ancestor.assign(t.nodes().size(), t.root());
  fake.block_len.assign(t.nodes().size(), 0);
  fake.block_len[t.root()] = 1;
  CHECK_FALSE(verify_clean(fake).ok());

  // Tamper with one cleaning node so the block queries differ per depth.
  CleanTree ct = cleanup_tree(t, 3);
  REQUIRE(verify_clean(ct).ok());
  std::vector<TreeNode> nodes = ct.tree.nodes();
  int tampered = -1;
  for (int id = 0; id < static_cast<int>(nodes.size()); ++id)
    if (!nodes[id].is_leaf && ct.node_flags[id] == NodeFlag::kCleaning &&
        nodes[id].query == 0b010 && tampered < 0) {
      nodes[id].query = 0b100;
      tampered = id;
    }
  REQUIRE(tampered >= 0);
  CleanTree bad = ct;
  bad.tree = ParityDecisionTree(ct.tree.n(), std::move(nodes), ct.tree.root());
  CHECK_FALSE(verify_clean(bad).ok());
}

TEST_CASE("clean ancestors and coordinates fixed since") {
  ParityDecisionTree dt = random_pdt(6, 4, QueryPolicy::kSingleton, 5);
  CleanTree cdt = cleanup_tree(dt, 3);
  auto anc = clean_ancestor_map(cdt);
  for (int id = 0; id < static_cast<int>(cdt.tree.nodes().size()); ++id) {
    CHECK(anc[id].clean_ancestor == id);
    CHECK(anc[id].fixed_since == 0);
  }

  CleanTree ct = cleanup_tree(parity3(), 3);
  auto map = clean_ancestor_map(ct);
  int root = ct.tree.root();
  int c1 = ct.tree.node(root).pos_child;
  int c2 = ct.tree.node(c1).pos_child;
  CHECK(ct.node_flags[c1] == NodeFlag::kCleaning);
  CHECK(ct.node_flags[c2] == NodeFlag::kCleaning);
  CHECK(map[c1].clean_ancestor == root);
  CHECK(map[c1].fixed_since == 0);  // the original query fixes nothing
  CHECK(map[c2].clean_ancestor == root);
  CHECK(map[c2].fixed_since == ct.tree.context(c1).newly_fixed);
  // Siblings in a block share L and J.
  int c1n = ct.tree.node(root).neg_child;
  CHECK(map[c1n].fixed_since == map[c1].fixed_since);
  CHECK(ct.tree.context(c1n).newly_fixed == ct.tree.context(c1).newly_fixed);
}

TEST_CASE("multi-reveal chain satisfies the corollary accounting") {
  ParityDecisionTree c = chain1234();
  for (int k : {2, 3}) {
    CleanTree ct = cleanup_tree(c, k);
    CHECK(equivalent(c, ct.tree));
    CHECK(verify_clean(ct).ok());
  }
}

TEST_CASE("serialization round trip") {
  CleanTree ct = cleanup_tree(random_pdt(7, 4, QueryPolicy::kSmallSupport, 13), 3);
  std::string j = to_json(ct);
  CleanTree back = clean_tree_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.k == ct.k);
  CHECK(back.source_depth == ct.source_depth);
  CHECK(back.block_len == ct.block_len);
  CHECK(back.clean_ancestor == ct.clean_ancestor);
  CHECK(verify_clean(back).ok());
}
