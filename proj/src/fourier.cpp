#include "pdtf/fourier.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pdtf {

Dyadic::Dyadic(int64_t numerator, int log2denominator) : num(numerator), log2den(log2denominator) {
  if (log2den < 0) throw std::invalid_argument("negative dyadic exponent");
  if (num == 0) {
    log2den = 0;
    return;
  }
  while (log2den > 0 && (num & 1) == 0) {
    num >>= 1;
    --log2den;
  }
}

Dyadic Dyadic::operator+(const Dyadic& o) const {
  int d = std::max(log2den, o.log2den);
  return Dyadic((num << (d - log2den)) + (o.num << (d - o.log2den)), d);
}

Dyadic Dyadic::operator-(const Dyadic& o) const { return *this + Dyadic(-o.num, o.log2den); }

Dyadic Dyadic::operator*(const Dyadic& o) const { return Dyadic(num * o.num, log2den + o.log2den); }

bool Dyadic::operator<(const Dyadic& o) const {
  int d = std::max(log2den, o.log2den);
  return (num << (d - log2den)) < (o.num << (d - o.log2den));
}

double Dyadic::to_double() const { return std::ldexp(static_cast<double>(num), -log2den); }

void wht_inplace(std::vector<int64_t>& a) {
  size_t sz = a.size();
  if (sz == 0 || (sz & (sz - 1))) throw std::invalid_argument("table size must be a power of two");
  for (size_t h = 1; h < sz; h <<= 1)
    for (size_t i = 0; i < sz; i += h << 1)
      for (size_t j = i; j < i + h; ++j) {
        int64_t x = a[j], y = a[j + h];
        a[j] = x + y;
        a[j + h] = x - y;
      }
}

Spectrum wht(const std::vector<uint8_t>& truth_table) {
  size_t sz = truth_table.size();
  int n = std::countr_zero(sz);
  if (sz != (size_t{1} << n) || n > 24) throw std::invalid_argument("wht guard: need 2^n entries, n <= 24");
  Spectrum spec;
  spec.n = n;
  spec.num.assign(truth_table.begin(), truth_table.end());
  wht_inplace(spec.num);
  return spec;
}

Spectrum spectrum(const ParityDecisionTree& tree) { return wht(tree.truth_table()); }

Spectrum spectrum_via_leaves(const ParityDecisionTree& tree) {
  Spectrum spec;
  spec.n = tree.n();
  spec.num.assign(size_t{1} << tree.n(), 0);
  for (int leaf : tree.leaves()) {
    const NodeContext& ctx = tree.context(leaf);
    if (tree.node(leaf).label == 0) continue;
    int64_t reach = int64_t{1} << (tree.n() - ctx.depth);  // 2^n * 2^{-depth}
    for (uint64_t s : ctx.subspace.enumerate_span())
      spec.num[s] += reach * ctx.coset.correlation(s);
  }
  return spec;
}

Dyadic level_mass(const Spectrum& spec, int level) {
  int64_t total = 0;
  for (uint64_t s = 0; s < spec.num.size(); ++s)
    if (weight(s) == level) total += std::abs(spec.num[s]);
  return Dyadic(total, spec.n);
}

Dyadic total_mass(const Spectrum& spec) {
  int64_t total = 0;
  for (int64_t v : spec.num) total += std::abs(v);
  return Dyadic(total, spec.n);
}

Dyadic parseval_sum(const Spectrum& spec) {
  if (spec.n > 20) throw std::runtime_error("parseval guard: n > 20");
  int64_t total = 0;
  for (int64_t v : spec.num) total += v * v;
  return Dyadic(total, 2 * spec.n);
}

bool LevelMassReport::all_pass() const {
  if (!km_total_pass) return false;
  for (const auto& row : rows)
    if (!row.pass) return false;
  return true;
}

LevelMassReport bound_report(const ParityDecisionTree& tree, int max_level) {
  LevelMassReport rep;
  rep.n = tree.n();
  rep.depth = tree.depth();
  rep.size = tree.size();
  Spectrum spec = spectrum(tree);
  rep.p = spec.coeff(0);
  rep.total = total_mass(spec);
  rep.km_total_pass = rep.total <= Dyadic::from_int(rep.size);
  int d = rep.depth;
  for (int l = 0; l <= std::min(max_level, tree.n()); ++l) {
    LevelRow row;
    row.level = l;
    row.mass = level_mass(spec, l);
    if (l == 0) {
      row.km_bound = rep.p;
      row.pass = row.mass == rep.p.abs();
      row.ratio = rep.p.to_double();
    } else {
      int64_t count_bound =
          std::min(binomial(static_cast<int64_t>(d) * l, l), (int64_t{1} << std::min(d, 62)) - 1);
      row.km_bound = rep.p * Dyadic::from_int(count_bound);
      row.pass = row.mass <= row.km_bound;
      double denom = std::pow(static_cast<double>(d), l / 2.0) *
                     std::pow(l * std::log2(std::max(2.0, static_cast<double>(tree.n()))), l);
      row.ratio = denom > 0 ? row.mass.to_double() / denom : 0.0;
    }
    rep.rows.push_back(row);
  }
  double p = rep.p.to_double();
  if (p > 0 && d > 0) {
    double denom = p * std::sqrt(d * std::log2(1.0 / p));
    Dyadic m1 = rep.rows.size() > 1 ? rep.rows[1].mass : Dyadic();
    rep.level1_conjecture_ratio = denom > 0 ? m1.to_double() / denom : 0.0;
  }
  return rep;
}

std::string report_csv(const LevelMassReport& rep) {
  std::ostringstream os;
  os << "level,mass_num,mass_log2den,bound_num,bound_log2den,pass,ratio\n";
  for (const auto& row : rep.rows)
    os << row.level << ',' << row.mass.num << ',' << row.mass.log2den << ',' << row.km_bound.num
       << ',' << row.km_bound.log2den << ',' << (row.pass ? "PASS" : "FAIL") << ',' << row.ratio
       << '\n';
  return os.str();
}

std::string spectrum_csv(const Spectrum& spec) {
  std::ostringstream os;
  os << "mask,numerator,log2denominator\n";
  os << std::hex;
  for (uint64_t s = 0; s < spec.num.size(); ++s) {
    if (spec.num[s] == 0) continue;
    Dyadic c = spec.coeff(s);
    os << s << ',' << std::dec << c.num << ',' << c.log2den << '\n' << std::hex;
  }
  return os.str();
}

double bound_R(double D, double d, double k, double eps, double kappa) {
  if (eps <= 0 || eps > 0.5 || k < 1) throw std::invalid_argument("bound_R: parameter range");
  return kappa * std::sqrt((D + d * k * std::pow(1.0 / eps, 1.0 / k)) * std::log2(1.0 / eps));
}

double bound_M(double D, double d, double k, int l, int t, double eps, double n) {
  if (eps <= 0 || eps > 0.5 || k < 1 || t < 0 || t > l) throw std::invalid_argument("bound_M: parameter range");
  if (t == 0) return 1.0;
  double tau = 1e4;
  double ratio = std::pow(n, l) / eps;
  double base = tau * (D + d * k) * std::pow(ratio, 6.0 / k) * std::log2(ratio);
  return std::pow(base, t / 2.0);
}

double bound_S(double d, int l, int t, double eps, double n) {
  if (eps <= 0 || eps > 0.5 || t < 0 || t > l) throw std::invalid_argument("bound_S: parameter range");
  if (t == 0) return 1.0;
  double tau = 32.0;
  double prod = std::pow(tau * d, t);
  for (int e = l - t; e <= l - 1; ++e) prod *= std::log2(std::pow(n, e) / eps);
  return std::sqrt(prod);
}

TruncationResult mass_after_truncation(const ParityDecisionTree& tree, int depth, int level) {
  ParityDecisionTree trunc = truncate_depth(tree, depth);
  Spectrum a = spectrum(tree);
  Spectrum b = spectrum(trunc);
  TruncationResult res;
  res.mass_original = level_mass(a, level);
  res.mass_truncated = level_mass(b, level);
  res.drift = (res.mass_original - res.mass_truncated).abs();
  int64_t disagree = 0;
  auto ta = tree.truth_table();
  auto tb = trunc.truth_table();
  for (size_t x = 0; x < ta.size(); ++x)
    if (ta[x] != tb[x]) ++disagree;
  res.drift_bound = Dyadic(disagree, tree.n()) * Dyadic::from_int(binomial(tree.n(), level));
  res.within_bound = res.drift <= res.drift_bound;
  return res;
}

}  // namespace pdtf
