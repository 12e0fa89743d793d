#include <random>

#include "doctest.h"
#include "pdtf/tree.hpp"

using namespace pdtf;

namespace {

// Single query {1,2,3}: answer +1 -> label 0, answer -1 -> label 1.
ParityDecisionTree parity3() {
  std::vector<TreeNode> nodes;
  nodes.push_back({true, 0, -1, -1, 0});
  nodes.push_back({true, 0, -1, -1, 1});
  nodes.push_back({false, 0b111, 0, 1, 0});
  return ParityDecisionTree(4, std::move(nodes), 2);
}

// Query {1} then {2}; label 1 only on the (-1,-1) path.
ParityDecisionTree and2() {
  std::vector<TreeNode> nodes;
  nodes.push_back({true, 0, -1, -1, 0});   // 0: reject
  nodes.push_back({true, 0, -1, -1, 1});   // 1: accept
  nodes.push_back({false, 0b10, 0, 1, 0});  // 2: query {2}
  nodes.push_back({true, 0, -1, -1, 0});   // 3: reject
  nodes.push_back({false, 0b01, 3, 2, 0});  // 4: query {1}
  return ParityDecisionTree(2, std::move(nodes), 4);
}

// One path queries {1,2},{1,3},{1,4},{1}; off-path children are 0-leaves.
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

TEST_CASE("evaluation follows parity answers") {
  ParityDecisionTree t = parity3();
  CHECK(t.evaluate(0b0001).label == 1);  // x1 = -1 flips the product
  CHECK(t.evaluate(0).label == 0);       // all-ones point
  CHECK(t.evaluate(0b0111).label == 1);  // three flips
  ParityDecisionTree a = and2();
  CHECK(a.evaluate(0b11).label == 1);
  CHECK(a.evaluate(0b01).label == 0);
  CHECK(a.evaluate(0b10).label == 0);
  CHECK(a.evaluate(0b00).label == 0);
}

TEST_CASE("node contexts: root, coset signs, revealed coordinates") {
  ParityDecisionTree t = parity3();
  const NodeContext& root = t.context(t.root());
  CHECK(root.subspace.rank() == 0);
  CHECK(root.fixed_mask == 0);
  CHECK(root.depth == 0);
  CHECK(root.newly_fixed == 0);  // {1,2,3} fixes no single coordinate

  const NodeContext& neg = t.context(1);
  CHECK(neg.coset.correlation(0b111) == -1);
  CHECK(neg.fixed_mask == 0);
  CHECK(correlation(neg, 0b111) == -1);
  CHECK(correlation(neg, 0b001) == 0);
  CHECK(correlation(neg, 0) == 1);

  // The last query of the {1,2},{1,3},{1,4},{1} chain reveals 4 coordinates.
  ParityDecisionTree c = chain1234();
  int last = -1;
  for (int id = 0; id < static_cast<int>(c.nodes().size()); ++id)
    if (!c.node(id).is_leaf && c.node(id).query == 0b0001) last = id;
  REQUIRE(last >= 0);
  CHECK(c.context(last).newly_fixed == 0b1111);
  CHECK(c.context(last).fixed_mask == 0);
}

TEST_CASE("fixed values match the coset on every branch") {
  ParityDecisionTree c = chain1234();
  for (uint64_t x = 0; x < 16; ++x) {
    auto res = c.evaluate(x);
    int leaf = res.path.back();
    const NodeContext& ctx = c.context(leaf);
    for (int j = 0; j < 4; ++j)
      if (ctx.fixed_mask & (uint64_t{1} << j))
        CHECK(ctx.fixed[j] == parity_sign(uint64_t{1} << j, x));
  }
}

TEST_CASE("validation catches redundancy and checks path accounting") {
  CHECK(validate(parity3()).ok());
  CHECK(validate(and2()).ok());
  ParityDecisionTree c = chain1234();
  CHECK(validate(c).ok());
  auto res = c.evaluate(0);
  int jsum = 0;
  for (int id : res.path) jsum += weight(c.context(id).newly_fixed);
  CHECK(jsum == 4);
  CHECK(jsum <= static_cast<int>(res.path.size()) - 1);

  // Querying {1} twice on one path is redundant.
  std::vector<TreeNode> bad;
  bad.push_back({true, 0, -1, -1, 0});
  bad.push_back({true, 0, -1, -1, 1});
  bad.push_back({false, 0b1, 0, 1, 0});
  bad.push_back({true, 0, -1, -1, 0});
  bad.push_back({false, 0b1, 2, 3, 0});
  CHECK_FALSE(validate(ParityDecisionTree(2, std::move(bad), 4)).ok());
}

TEST_CASE("every point reaching a node is counted by its coset") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 5 + static_cast<int>(rng() % 4);
    ParityDecisionTree t = random_pdt(n, 3, QueryPolicy::kUniform, rng());
    std::vector<int64_t> counts(t.nodes().size(), 0);
    for (uint64_t x = 0; x < (uint64_t{1} << n); ++x)
      for (int id : t.evaluate(x).path) ++counts[id];
    for (int id = 0; id < static_cast<int>(t.nodes().size()); ++id)
      CHECK(counts[id] == int64_t{1} << (n - t.context(id).subspace.rank()));
  }
}

TEST_CASE("random generation: determinism and policy guarantees") {
  ParityDecisionTree leaf_only = random_pdt(4, 0, QueryPolicy::kUniform, 1);
  CHECK(leaf_only.size() == 1);
  CHECK(leaf_only.depth() == 0);

  CHECK(to_json(random_pdt(8, 5, QueryPolicy::kUniform, 42)) ==
        to_json(random_pdt(8, 5, QueryPolicy::kUniform, 42)));

  ParityDecisionTree dt = random_pdt(7, 5, QueryPolicy::kSingleton, 3);
  CHECK(validate(dt).ok());
  for (int id = 0; id < static_cast<int>(dt.nodes().size()); ++id)
    if (!dt.node(id).is_leaf) {
      CHECK(weight(dt.node(id).query) == 1);
      CHECK(weight(dt.context(id).newly_fixed) == 1);
    }
  ParityDecisionTree sm = random_pdt(9, 4, QueryPolicy::kSmallSupport, 4);
  CHECK(validate(sm).ok());
  for (const auto& nd : sm.nodes())
    if (!nd.is_leaf) CHECK(weight(nd.query) <= 3);
}

TEST_CASE("depth truncation") {
  ParityDecisionTree t = parity3();
  CHECK(equivalent(t, truncate_depth(t, 1)));
  ParityDecisionTree zero = truncate_depth(t, 0);
  CHECK(zero.size() == 1);
  for (uint64_t x = 0; x < 16; ++x) CHECK(zero.evaluate(x).label == 0);

  ParityDecisionTree big = random_pdt(10, 6, QueryPolicy::kUniform, 8);
  ParityDecisionTree cut = truncate_depth(big, 4);
  CHECK(cut.depth() <= 4);
  int64_t disagree = 0;
  for (uint64_t x = 0; x < (uint64_t{1} << 10); ++x)
    if (big.evaluate(x).label != cut.evaluate(x).label) ++disagree;
  int64_t depth4 = 0;
  for (int id = 0; id < static_cast<int>(big.nodes().size()); ++id)
    if (big.context(id).depth == 4) ++depth4;
  // Pr[disagree] <= 2^-4 * (#depth-4 nodes)
  CHECK(disagree <= depth4 * (int64_t{1} << (10 - 4)));
}

TEST_CASE("equivalence") {
  ParityDecisionTree t = parity3();
  CHECK(equivalent(t, t));
  std::vector<TreeNode> nodes;
  nodes.push_back({true, 0, -1, -1, 1});
  nodes.push_back({true, 0, -1, -1, 0});
  nodes.push_back({false, 0b111, 0, 1, 0});
  ParityDecisionTree flipped(4, std::move(nodes), 2);
  CHECK_FALSE(equivalent(t, flipped));
}

TEST_CASE("JSON round trip is byte-identical") {
  for (uint64_t seed : {1, 2, 3}) {
    ParityDecisionTree t = random_pdt(8, 4, QueryPolicy::kUniform, seed);
    std::string j = to_json(t);
    CHECK(to_json(tree_from_json(j)) == j);
    CHECK(equivalent(t, tree_from_json(j)));
  }
}
