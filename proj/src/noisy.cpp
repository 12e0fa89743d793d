#include "pdtf/noisy.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pdtf {

NoisyDecisionTree::NoisyDecisionTree(int n, std::vector<NoisyNode> nodes, int root)
    : n_(n), root_(root), nodes_(std::move(nodes)) {
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("noisy tree dimension out of [1,64]");
  for (const auto& nd : nodes_) {
    if (nd.is_leaf) continue;
    if (nd.q < 1 || nd.q > n) throw std::invalid_argument("query index out of [1,n]");
    if (std::abs(nd.gamma) > 1.0) throw std::invalid_argument("correlation outside [-1,1]");
  }
}

double NoisyDecisionTree::cost() const {
  std::function<double(int)> walk = [&](int id) -> double {
    const NoisyNode& nd = nodes_.at(id);
    if (nd.is_leaf) return 0.0;
    return nd.gamma * nd.gamma + std::max(walk(nd.pos_child), walk(nd.neg_child));
  };
  return walk(root_);
}

int NoisyDecisionTree::depth() const {
  std::function<int(int)> walk = [&](int id) -> int {
    const NoisyNode& nd = nodes_.at(id);
    if (nd.is_leaf) return 0;
    return 1 + std::max(walk(nd.pos_child), walk(nd.neg_child));
  };
  return walk(root_);
}

BiasUpdate child_bias(double alpha, double gamma) {
  if (std::abs(alpha) > 1.0 || std::abs(gamma) > 1.0)
    throw std::invalid_argument("child_bias: parameters outside [-1,1]");
  BiasUpdate upd;
  upd.pos.probability = (1.0 + gamma * alpha) / 2.0;
  upd.neg.probability = (1.0 - gamma * alpha) / 2.0;
  if (std::abs(gamma) == 1.0) {
    // Deterministic read: the edge equals gamma * x_j.
    upd.pos.bias = upd.pos.probability > 0 ? gamma : alpha;
    upd.neg.bias = upd.neg.probability > 0 ? -gamma : alpha;
    return upd;
  }
  upd.pos.bias = (alpha + gamma) / (1.0 + gamma * alpha);
  upd.neg.bias = (alpha - gamma) / (1.0 - gamma * alpha);
  return upd;
}

double acceptance_probability(const NoisyDecisionTree& tree, uint64_t x) {
  std::function<double(int)> walk = [&](int id) -> double {
    const NoisyNode& nd = tree.node(id);
    if (nd.is_leaf) return nd.label;
    double xj = (x >> (nd.q - 1)) & 1 ? -1.0 : 1.0;
    double ppos = (1.0 + nd.gamma * xj) / 2.0;
    return ppos * walk(nd.pos_child) + (1.0 - ppos) * walk(nd.neg_child);
  };
  return walk(tree.root());
}

int sample_output(const NoisyDecisionTree& tree, uint64_t x, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int id = tree.root();
  for (;;) {
    const NoisyNode& nd = tree.node(id);
    if (nd.is_leaf) return nd.label;
    double xj = (x >> (nd.q - 1)) & 1 ? -1.0 : 1.0;
    double ppos = (1.0 + nd.gamma * xj) / 2.0;
    id = unif(rng) < ppos ? nd.pos_child : nd.neg_child;
  }
}

double RealSpectrum::level_mass(int level) const {
  double total = 0.0;
  for (uint64_t s = 0; s < coeff.size(); ++s)
    if (weight(s) == level) total += std::abs(coeff[s]);
  return total;
}

double RealSpectrum::parseval() const {
  double total = 0.0;
  for (double c : coeff) total += c * c;
  return total;
}

RealSpectrum exact_spectrum(const NoisyDecisionTree& tree) {
  RealSpectrum spec;
  spec.n = tree.n();
  spec.coeff.assign(size_t{1} << tree.n(), 0.0);
  std::vector<double> alpha(tree.n(), 0.0);
  std::function<void(int, double)> walk = [&](int id, double reach) {
    if (reach == 0.0) return;
    const NoisyNode& nd = tree.node(id);
    if (nd.is_leaf) {
      if (nd.label == 0) return;
      // prod[m] built by peeling the lowest bit of each subset mask.
      std::vector<double> prod(spec.coeff.size());
      prod[0] = 1.0;
      for (uint64_t m = 1; m < prod.size(); ++m) {
        int j = std::countr_zero(m);
        prod[m] = prod[m & (m - 1)] * alpha[j];
      }
      for (uint64_t m = 0; m < prod.size(); ++m) spec.coeff[m] += reach * prod[m];
      return;
    }
    double saved = alpha[nd.q - 1];
    BiasUpdate upd = child_bias(saved, nd.gamma);
    alpha[nd.q - 1] = upd.pos.bias;
    walk(nd.pos_child, reach * upd.pos.probability);
    alpha[nd.q - 1] = upd.neg.bias;
    walk(nd.neg_child, reach * upd.neg.probability);
    alpha[nd.q - 1] = saved;
  };
  walk(tree.root(), 1.0);
  return spec;
}

RealSpectrum spectrum_via_truth_table(const NoisyDecisionTree& tree) {
  if (tree.n() > 20) throw std::runtime_error("noisy spectrum guard: n > 20");
  size_t sz = size_t{1} << tree.n();
  std::vector<double> table(sz);
  for (uint64_t x = 0; x < sz; ++x) table[x] = acceptance_probability(tree, x);
  // Real-valued WHT.
  for (size_t h = 1; h < sz; h <<= 1)
    for (size_t i = 0; i < sz; i += h << 1)
      for (size_t j = i; j < i + h; ++j) {
        double a = table[j], b = table[j + h];
        table[j] = a + b;
        table[j + h] = a - b;
      }
  RealSpectrum spec;
  spec.n = tree.n();
  spec.coeff.resize(sz);
  for (size_t s = 0; s < sz; ++s) spec.coeff[s] = table[s] / static_cast<double>(sz);
  return spec;
}

NoisyReport noisy_bound_report(const NoisyDecisionTree& tree, int max_level) {
  NoisyReport rep;
  rep.n = tree.n();
  rep.cost = tree.cost();
  RealSpectrum spec = exact_spectrum(tree);
  rep.p = spec.coeff[0];
  rep.parseval = spec.parseval();
  rep.parseval_pass = rep.parseval <= rep.p + 1e-12;
  for (int l = 0; l <= std::min(max_level, tree.n()); ++l) {
    NoisyLevelRow row{l, spec.level_mass(l), 0.0};
    if (l >= 1 && rep.p > 0 && rep.cost > 0) {
      double logs = std::log2(1.0 / rep.p) *
                    std::pow(std::log2(std::pow(static_cast<double>(tree.n()), l) / rep.p),
                             static_cast<double>(l - 1));
      double denom = rep.p * std::pow(rep.cost, l / 2.0) * std::sqrt(std::max(logs, 1e-300));
      row.ratio = denom > 0 ? row.mass / denom : 0.0;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

std::string noisy_report_csv(const NoisyReport& rep) {
  std::ostringstream os;
  os << "level,mass,ratio\n";
  for (const auto& row : rep.rows) os << row.level << ',' << row.mass << ',' << row.ratio << '\n';
  return os.str();
}

NoisyDecisionTree random_noisy_tree(int n, int depth, double max_cost, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<NoisyNode> nodes;
  std::function<int(int, double)> build = [&](int at, double budget) -> int {
    if (at == depth) {
      nodes.push_back({true, 0, 0.0, -1, -1, static_cast<int>(rng() & 1)});
      return static_cast<int>(nodes.size()) - 1;
    }
    NoisyNode nd;
    nd.q = 1 + static_cast<int>(rng() % n);
    // Zero-correlation padding keeps every path the same length.
    double remaining_steps = depth - at;
    double cap = std::min(1.0, std::sqrt(std::max(0.0, budget) / remaining_steps));
    nd.gamma = (unif(rng) * 2.0 - 1.0) * cap;
    int id = static_cast<int>(nodes.size());
    nodes.push_back(nd);
    double left = budget - nd.gamma * nd.gamma;
    nodes[id].pos_child = build(at + 1, left);
    nodes[id].neg_child = build(at + 1, left);
    return id;
  };
  int root = build(0, max_cost);
  return NoisyDecisionTree(n, std::move(nodes), root);
}

std::string to_json(const NoisyDecisionTree& tree) {
  nlohmann::ordered_json j;
  j["n"] = tree.n();
  j["root"] = tree.root();
  j["nodes"] = nlohmann::ordered_json::array();
  for (int id = 0; id < static_cast<int>(tree.nodes().size()); ++id) {
    const NoisyNode& nd = tree.node(id);
    nlohmann::ordered_json nj;
    nj["id"] = id;
    if (nd.is_leaf) {
      nj["leaf"] = nd.label;
    } else {
      nj["q"] = nd.q;
      nj["gamma"] = nd.gamma;
      nj["pos_child"] = nd.pos_child;
      nj["neg_child"] = nd.neg_child;
    }
    j["nodes"].push_back(nj);
  }
  return j.dump(2) + "\n";
}

NoisyDecisionTree noisy_tree_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  int n = j.at("n").get<int>();
  int root = j.at("root").get<int>();
  std::vector<NoisyNode> nodes;
  for (const auto& nj : j.at("nodes")) {
    int id = nj.at("id").get<int>();
    if (id >= static_cast<int>(nodes.size())) nodes.resize(id + 1);
    NoisyNode nd;
    if (nj.contains("leaf")) {
      nd.is_leaf = true;
      nd.label = nj.at("leaf").get<int>();
    } else {
      nd.q = nj.at("q").get<int>();
      nd.gamma = nj.at("gamma").get<double>();
      nd.pos_child = nj.at("pos_child").get<int>();
      nd.neg_child = nj.at("neg_child").get<int>();
    }
    nodes[id] = nd;
  }
  return NoisyDecisionTree(n, std::move(nodes), root);
}

}  // namespace pdtf
