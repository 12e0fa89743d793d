#include "pdtf/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <future>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pdtf {

namespace {

using TermList = std::vector<std::pair<uint64_t, int>>;  // (mask, sign)

TermList nonzero_terms(const SignPattern& signs) {
  TermList terms;
  for (uint64_t m = 0; m < signs.sign.size(); ++m)
    if (signs.sign[m] != 0) terms.push_back({m, signs.sign[m]});
  return terms;
}

// prod_{j in S} v_j with v in {-1,0,+1} per coordinate; 0 if any is unfixed.
int fixed_product(const NodeContext& ctx, uint64_t s) {
  if ((s & ctx.fixed_mask) != s) return 0;
  int prod = 1;
  for (uint64_t rest = s; rest; rest &= rest - 1)
    prod *= ctx.fixed[std::countr_zero(rest)];
  return prod;
}

int64_t value_at(const NodeContext& ctx, uint64_t tmask, const TermList& terms) {
  int64_t total = 0;
  for (const auto& [m, a] : terms) {
    if ((m & tmask) != tmask) continue;
    total += a * fixed_product(ctx, m ^ tmask);
  }
  return total;
}

// The step increment split by the parity of |J|, J ranging over the
// nonempty subsets of the newly fixed coordinates outside T.  The set of
// coordinates a step reveals lives on the parent node's context.
void split_increment(const NodeContext& prev, const NodeContext& cur, uint64_t tmask,
                     const TermList& terms, int64_t* y, int64_t* z) {
  *y = 0;
  *z = 0;
  uint64_t avail = prev.newly_fixed & ~tmask;
  for (uint64_t j = avail; j; j = (j - 1) & avail) {
    int vj = fixed_product(cur, j);
    int64_t contrib = vj * value_at(prev, tmask | j, terms);
    if (weight(j) % 2 == 0)
      *y += contrib;
    else
      *z += contrib;
  }
}

}  // namespace

SignPattern SignPattern::from_spectrum(const Spectrum& spec, int level) {
  SignPattern out;
  out.n = spec.n;
  out.level = level;
  out.sign.assign(spec.num.size(), 0);
  for (uint64_t m = 0; m < spec.num.size(); ++m)
    if (weight(m) == level && spec.num[m] != 0) out.sign[m] = spec.num[m] > 0 ? 1 : -1;
  return out;
}

SignPattern SignPattern::all_ones(int n, int level) {
  SignPattern out;
  out.n = n;
  out.level = level;
  out.sign.assign(size_t{1} << n, 0);
  for (uint64_t m = 0; m < out.sign.size(); ++m)
    if (weight(m) == level) out.sign[m] = 1;
  return out;
}

int64_t walk_value(const ParityDecisionTree& tree, int node, uint64_t tmask,
                   const SignPattern& signs) {
  return value_at(tree.context(node), tmask, nonzero_terms(signs));
}

WalkTrace walk_trace(const CleanTree& ct, uint64_t tmask, const SignPattern& signs, uint64_t seed) {
  const ParityDecisionTree& tree = ct.tree;
  TermList terms = nonzero_terms(signs);
  std::mt19937_64 rng(seed);
  WalkTrace trace;
  int id = tree.root();
  for (;;) {
    const NodeContext& ctx = tree.context(id);
    WalkStep step;
    step.node = id;
    step.x = value_at(ctx, tmask, terms);
    if (ctx.parent >= 0) {
      const NodeContext& prev = tree.context(ctx.parent);
      step.newly_fixed = prev.newly_fixed;
      split_increment(prev, ctx, tmask, terms, &step.y, &step.z);
      if (step.x != trace.steps.back().x + step.y + step.z) trace.telescoping_ok = false;
    }
    trace.steps.push_back(step);
    const TreeNode& nd = tree.node(id);
    if (nd.is_leaf) break;
    id = (rng() & 1) ? nd.pos_child : nd.neg_child;
  }
  return trace;
}

MartingaleCheck check_martingale_structure(const CleanTree& ct, uint64_t tmask,
                                           const SignPattern& signs) {
  const ParityDecisionTree& tree = ct.tree;
  TermList terms = nonzero_terms(signs);
  SignPattern ones = signs.level == 1 ? signs : SignPattern::all_ones(tree.n(), 1);
  TermList level1 = nonzero_terms(ones);
  MartingaleCheck chk;
  for (int id = 0; id < static_cast<int>(tree.nodes().size()); ++id) {
    const NodeContext& ctx = tree.context(id);
    if (std::abs(value_at(ctx, 0, level1)) > ctx.depth) chk.level1_bounded = false;
    const TreeNode& nd = tree.node(id);
    if (nd.is_leaf) continue;
    int64_t x = value_at(ctx, tmask, terms);
    int64_t ys[2], zs[2];
    int children[2] = {nd.pos_child, nd.neg_child};
    for (int b = 0; b < 2; ++b) {
      const NodeContext& cctx = tree.context(children[b]);
      split_increment(ctx, cctx, tmask, terms, &ys[b], &zs[b]);
      if (value_at(cctx, tmask, terms) != x + ys[b] + zs[b]) chk.increment_ok = false;
      if (weight(ctx.newly_fixed) <= 1 && ys[b] != 0) chk.y_zero = false;
      chk.max_abs_y = std::max(chk.max_abs_y, std::abs(ys[b]));
    }
    if (zs[0] + zs[1] != 0) chk.z_mean_zero = false;
    if (ys[0] != ys[1]) chk.y_constant = false;
  }
  return chk;
}

Dyadic level_mass_via_leaves(const CleanTree& ct, const SignPattern& signs) {
  TermList terms = nonzero_terms(signs);
  Dyadic total;
  for (int leaf : ct.tree.leaves()) {
    if (ct.tree.node(leaf).label == 0) continue;
    const NodeContext& ctx = ct.tree.context(leaf);
    total = total + Dyadic(value_at(ctx, 0, terms), ctx.depth);
  }
  return total;
}

WalkEstimate level_mass_via_walks(const CleanTree& ct, const SignPattern& signs, int64_t trials,
                                  uint64_t seed) {
  const ParityDecisionTree& tree = ct.tree;
  TermList terms = nonzero_terms(signs);
  std::mt19937_64 rng(seed);
  double sum = 0.0, sumsq = 0.0;
  for (int64_t t = 0; t < trials; ++t) {
    int id = tree.root();
    while (!tree.node(id).is_leaf) {
      const TreeNode& nd = tree.node(id);
      id = (rng() & 1) ? nd.pos_child : nd.neg_child;
    }
    double v = tree.node(id).label == 0
                   ? 0.0
                   : static_cast<double>(value_at(tree.context(id), 0, terms));
    sum += v;
    sumsq += v * v;
  }
  WalkEstimate est;
  est.trials = trials;
  est.estimate = sum / trials;
  double var = std::max(0.0, sumsq / trials - est.estimate * est.estimate);
  est.std_error = std::sqrt(var / trials);
  return est;
}

std::vector<AzumaRow> azuma_empirical(int steps, StepRule rule, const std::vector<double>& betas,
                                      int64_t trials, uint64_t seed) {
  std::mt19937_64 rng(seed);
  double budget = steps;  // U; unit steps use it exactly, adaptive stays under it
  std::vector<int64_t> exceed(betas.size(), 0);
  for (int64_t t = 0; t < trials; ++t) {
    double x = 0.0, used = 0.0, peak = 0.0;
    for (int i = 0; i < steps; ++i) {
      double delta;
      if (rule == StepRule::kUnit) {
        delta = 1.0;
      } else {
        // History-dependent magnitude: spend faster while ahead.
        double frac = x > 0 ? 0.5 : 0.1;
        delta = std::sqrt((budget - used) * frac);
      }
      used += delta * delta;
      x += (rng() & 1) ? delta : -delta;
      peak = std::max(peak, std::abs(x));
    }
    double norm = peak / std::sqrt(2.0 * budget);
    for (size_t b = 0; b < betas.size(); ++b)
      if (norm >= betas[b]) ++exceed[b];
  }
  std::vector<AzumaRow> rows;
  for (size_t b = 0; b < betas.size(); ++b) {
    AzumaRow row;
    row.beta = betas[b];
    row.empirical = static_cast<double>(exceed[b]) / trials;
    row.bound = 2.0 * std::exp(-betas[b] * betas[b] / 2.0);
    double p = std::max(row.empirical, 1.0 / trials);
    row.mc_sigma = std::sqrt(p * (1.0 - p) / trials);
    row.pass = row.empirical <= row.bound + 3.0 * row.mc_sigma;
    rows.push_back(row);
  }
  return rows;
}

int IntPolynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms)
    if (c != 0) d = std::max(d, weight(m));
  return d;
}

int64_t IntPolynomial::eval(uint64_t point) const {
  int64_t total = 0;
  for (const auto& [m, c] : terms) total += c * parity_sign(m, point);
  return total;
}

namespace {

__int128 ipow(__int128 base, int exp) {
  __int128 r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

IntPolynomial random_polynomial(int n, int degree, std::mt19937_64& rng) {
  IntPolynomial f;
  f.n = n;
  int nterms = 1 + static_cast<int>(rng() % 12);
  std::vector<int64_t> coeff(size_t{1} << n, 0);
  for (int t = 0; t < nterms; ++t) {
    int sz = static_cast<int>(rng() % (degree + 1));
    uint64_t mask = 0;
    while (weight(mask) < sz) mask |= coord_mask(1 + static_cast<int>(rng() % n));
    coeff[mask] += (rng() & 1) ? 1 : -1;
  }
  for (uint64_t m = 0; m < coeff.size(); ++m)
    if (coeff[m] != 0) f.terms.push_back({m, static_cast<int>(coeff[m])});
  return f;
}

}  // namespace

HypercontractivityResult hypercontractivity_check(int degree, int q, int n, int trials,
                                                  uint64_t seed) {
  if (q != 4 && q != 6 && q != 8) throw std::invalid_argument("q must be 4, 6, or 8");
  if (n < 1 || n > 14) throw std::invalid_argument("hypercontractivity guard: n in [1,14]");
  std::mt19937_64 rng(seed);
  HypercontractivityResult res;
  for (int t = 0; t < trials; ++t) {
    IntPolynomial f = random_polynomial(n, degree, rng);
    if (f.terms.empty()) continue;
    __int128 s2 = 0, sq = 0;
    for (uint64_t x = 0; x < (uint64_t{1} << n); ++x) {
      __int128 v = f.eval(x);
      s2 += v * v;
      sq += ipow(v, q);
    }
    int d = f.degree();
    // E[f^q] <= (q-1)^(dq/2) E[f^2]^(q/2), cleared of the 2^n denominators.
    __int128 lhs = sq * ipow(2, n * (q / 2 - 1));
    __int128 rhs = ipow(q - 1, d * q / 2) * ipow(s2, q / 2);
    ++res.checked;
    if (lhs > rhs) ++res.failures;
  }
  return res;
}

F2Subspace dual_subspace(const F2Subspace& s) {
  // One dual basis vector per non-pivot coordinate.
  int n = s.n();
  uint64_t pivots = 0;
  for (uint64_t row : s.rows()) pivots |= row & (~row + 1);
  F2Subspace dual(n);
  for (int f = 0; f < n; ++f) {
    if ((pivots >> f) & 1) continue;
    uint64_t v = uint64_t{1} << f;
    for (uint64_t row : s.rows())
      if ((row >> f) & 1) v |= row & (~row + 1);
    dual.insert(v);
  }
  return dual;
}

KWiseDistribution make_kwise_distribution(const F2Subspace& code) {
  int n = code.n();
  F2Subspace dual = dual_subspace(code);
  KWiseDistribution dist;
  dist.code = code;
  if (dual.rank() == 0) {
    dist.independence = n;
  } else {
    int minw = n + 1;
    for (uint64_t v : dual.enumerate_span())
      if (v != 0) minw = std::min(minw, weight(v));
    dist.independence = minw - 1;
  }
  return dist;
}

bool verify_kwise(const KWiseDistribution& dist, int k) {
  // Every character of weight in [1,k] must sum to zero over the code.
  int n = dist.code.n();
  if (n > 16) throw std::invalid_argument("verify_kwise guard: n > 16");
  std::vector<uint64_t> members = dist.code.enumerate_span();
  for (uint64_t s = 1; s < (uint64_t{1} << n); ++s) {
    if (weight(s) > k) continue;
    int64_t total = 0;
    for (uint64_t c : members) total += parity_sign(s, c);
    if (total != 0) return false;
  }
  return true;
}

MomentCheckResult kwise_moment_check(const KWiseDistribution& dist, const IntPolynomial& f, int l) {
  int n = dist.code.n();
  int d = f.degree();
  if (l < 1 || 2 * l * d > dist.independence)
    throw std::invalid_argument("kwise_moment_check: need 2*l*degree <= independence");
  int64_t mu = 0;  // expectation = empty coefficient, valid since degree <= independence
  for (const auto& [m, c] : f.terms)
    if (m == 0) mu = c;
  auto centered = [&](uint64_t x) -> __int128 { return f.eval(x) - mu; };
  int r = dist.code.rank();
  __int128 a = 0, b = 0;
  for (uint64_t c : dist.code.enumerate_span()) {
    __int128 g = centered(c);
    a += ipow(g, 2 * l);
    b += g * g;
  }
  __int128 au = 0, bu = 0;
  for (uint64_t x = 0; x < (uint64_t{1} << n); ++x) {
    __int128 g = centered(x);
    au += ipow(g, 2 * l);
    bu += g * g;
  }
  MomentCheckResult res;
  res.moments_match_uniform = a * ipow(2, n - r) == au && b * ipow(2, n - r) == bu;
  // E[g^(2l)] <= E[g^2]^l * (2l-1)^(dl), cleared of the 2^r denominators.
  res.moment_bound_ok = a * ipow(2, r * (l - 1)) <= ipow(b, l) * ipow(2 * l - 1, d * l);
  return res;
}

SweepConfig sweep_config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  SweepConfig cfg;
  cfg.n = j.value("n", 8);
  cfg.depths = j.value("depths", std::vector<int>{3, 4});
  cfg.ks = j.value("ks", std::vector<int>{2});
  cfg.levels = j.value("levels", std::vector<int>{1, 2});
  cfg.seeds = j.value("seeds", std::vector<uint64_t>{1});
  cfg.jobs = j.value("jobs", 1);
  std::string policy = j.value("policy", "uniform");
  if (policy == "singleton")
    cfg.policy = QueryPolicy::kSingleton;
  else if (policy == "small")
    cfg.policy = QueryPolicy::kSmallSupport;
  else if (policy == "uniform")
    cfg.policy = QueryPolicy::kUniform;
  else
    throw std::invalid_argument("unknown policy: " + policy);
  return cfg;
}

namespace {

std::string sweep_instance(const SweepConfig& cfg, int depth, uint64_t seed) {
  std::ostringstream os;
  ParityDecisionTree tree = random_pdt(cfg.n, depth, cfg.policy, seed);
  int max_level = *std::max_element(cfg.levels.begin(), cfg.levels.end());
  for (int k : cfg.ks) {
    CleanTree ct = cleanup_tree(tree, k);
    LevelMassReport rep = bound_report(ct.tree, max_level);
    for (int level : cfg.levels) {
      if (level >= static_cast<int>(rep.rows.size())) continue;
      const LevelRow& row = rep.rows[level];
      os << cfg.n << ',' << depth << ',' << seed << ',' << k << ',' << rep.depth << ','
         << row.level << ',' << row.mass.num << ',' << row.mass.log2den << ','
         << row.km_bound.num << ',' << row.km_bound.log2den << ','
         << (row.pass ? "PASS" : "FAIL") << ',' << row.ratio << '\n';
    }
  }
  return os.str();
}

}  // namespace

std::string sweep(const SweepConfig& config) {
  std::string header =
      "n,depth,seed,k,clean_depth,level,mass_num,mass_log2den,bound_num,bound_log2den,pass,ratio\n";
  if (config.depths.empty() || config.ks.empty() || config.levels.empty() || config.seeds.empty())
    return header;
  std::vector<std::pair<int, uint64_t>> tasks;
  for (int depth : config.depths)
    for (uint64_t seed : config.seeds) tasks.push_back({depth, seed});
  std::vector<std::string> parts(tasks.size());
  int jobs = std::max(1, config.jobs);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      parts[i] = sweep_instance(config, tasks[i].first, tasks[i].second);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::future<void>> futs;
    for (int w = 0; w < jobs; ++w) futs.push_back(std::async(std::launch::async, worker));
    for (auto& f : futs) f.get();
  }
  for (const std::string& p : parts) header += p;
  return header;
}

}  // namespace pdtf
