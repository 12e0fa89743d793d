#include <cmath>
#include <random>

#include "doctest.h"
#include "pdtf/noisy.hpp"

using namespace pdtf;

namespace {

NoisyDecisionTree depth1(double gamma, int n = 2) {
  std::vector<NoisyNode> nodes;
  nodes.push_back({true, 0, 0.0, -1, -1, 1});
  nodes.push_back({true, 0, 0.0, -1, -1, 0});
  nodes.push_back({false, 1, gamma, 0, 1, 0});
  return NoisyDecisionTree(n, std::move(nodes), 2);
}

}  // namespace

TEST_CASE("bias update law") {
  BiasUpdate mid = child_bias(0.0, 0.5);
  CHECK(mid.pos.bias == doctest::Approx(0.5));
  CHECK(mid.pos.probability == doctest::Approx(0.5));
  CHECK(mid.neg.bias == doctest::Approx(-0.5));
  CHECK(mid.neg.probability == doctest::Approx(0.5));

  BiasUpdate idle = child_bias(0.7, 0.0);
  CHECK(idle.pos.bias == doctest::Approx(0.7));
  CHECK(idle.neg.bias == doctest::Approx(0.7));
  CHECK(idle.pos.probability == doctest::Approx(0.5));

  BiasUpdate det = child_bias(1.0, 0.3);
  CHECK(det.pos.bias == doctest::Approx(1.0));
  CHECK(det.neg.bias == doctest::Approx(1.0));

  BiasUpdate full = child_bias(0.2, 1.0);
  CHECK(full.pos.bias == doctest::Approx(1.0));
  CHECK(full.neg.bias == doctest::Approx(-1.0));
  CHECK(full.pos.probability == doctest::Approx(0.6));
  CHECK_THROWS(child_bias(1.5, 0.0));
}

TEST_CASE("acceptance probabilities") {
  NoisyDecisionTree t = depth1(0.4);
  CHECK(acceptance_probability(t, 0b00) == doctest::Approx(0.7));   // x1 = +1
  CHECK(acceptance_probability(t, 0b01) == doctest::Approx(0.3));   // x1 = -1
  NoisyDecisionTree det = depth1(1.0);
  CHECK(acceptance_probability(det, 0b00) == doctest::Approx(1.0));
  CHECK(acceptance_probability(det, 0b01) == doctest::Approx(0.0));

  std::vector<NoisyNode> ones;
  ones.push_back({true, 0, 0.0, -1, -1, 1});
  ones.push_back({true, 0, 0.0, -1, -1, 1});
  ones.push_back({false, 2, 0.9, 0, 1, 0});
  NoisyDecisionTree allone(3, std::move(ones), 2);
  for (uint64_t x = 0; x < 8; ++x) CHECK(acceptance_probability(allone, x) == doctest::Approx(1.0));
}

TEST_CASE("sampling agrees with the exact probability") {
  NoisyDecisionTree t = depth1(0.6);
  int64_t hits = 0, trials = 20000;
  for (int64_t i = 0; i < trials; ++i) hits += sample_output(t, 0b01, 1000 + i);
  double exact = acceptance_probability(t, 0b01);
  double sigma = std::sqrt(exact * (1 - exact) / trials);
  CHECK(std::abs(static_cast<double>(hits) / trials - exact) <= 4 * sigma);
}

TEST_CASE("spectra: closed forms and the two routes") {
  RealSpectrum s = exact_spectrum(depth1(0.8));
  CHECK(s.coeff[0] == doctest::Approx(0.5));
  CHECK(s.coeff[1] == doctest::Approx(0.4));  // gamma/2
  CHECK(s.coeff[2] == doctest::Approx(0.0));

  RealSpectrum dict = exact_spectrum(depth1(1.0));
  CHECK(dict.coeff[0] == doctest::Approx(0.5));
  CHECK(dict.coeff[1] == doctest::Approx(0.5));

  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 3 + static_cast<int>(rng() % 8);
    NoisyDecisionTree t = random_noisy_tree(n, 3 + trial % 3, 2.0, rng());
    CHECK(t.cost() <= 2.0 + 1e-12);
    RealSpectrum a = exact_spectrum(t);
    RealSpectrum b = spectrum_via_truth_table(t);
    for (size_t s2 = 0; s2 < a.coeff.size(); ++s2)
      CHECK(a.coeff[s2] == doctest::Approx(b.coeff[s2]).epsilon(1e-10));
    CHECK(a.parseval() <= a.coeff[0] + 1e-12);
  }
}

TEST_CASE("repeated queries refine the same coordinate") {
  // Querying coordinate 1 twice with gamma = 0.5 each.
  std::vector<NoisyNode> nodes;
  for (int i = 0; i < 4; ++i) nodes.push_back({true, 0, 0.0, -1, -1, 1});
  for (int i = 4; i < 8; ++i) nodes.push_back({true, 0, 0.0, -1, -1, 0});
  nodes.push_back({false, 1, 0.5, 0, 4, 0});   // 8
  nodes.push_back({false, 1, 0.5, 1, 5, 0});   // 9
  nodes.push_back({false, 1, 0.5, 8, 9, 0});   // 10: root
  NoisyDecisionTree t(1, std::move(nodes), 10);
  CHECK(t.cost() == doctest::Approx(0.5));
  CHECK(t.depth() == 2);
  RealSpectrum a = exact_spectrum(t);
  RealSpectrum b = spectrum_via_truth_table(t);
  CHECK(a.coeff[0] == doctest::Approx(b.coeff[0]).epsilon(1e-12));
  CHECK(a.coeff[1] == doctest::Approx(b.coeff[1]).epsilon(1e-12));
}

TEST_CASE("report: ratio closed form and degenerate trees") {
  for (double gamma : {0.3, 0.6, 0.9}) {
    NoisyDecisionTree t = depth1(gamma);
    NoisyReport rep = noisy_bound_report(t, 2);
    CHECK(rep.parseval_pass);
    CHECK(rep.rows[1].mass == doctest::Approx(gamma / 2));
    CHECK(rep.rows[1].mass / std::sqrt(rep.cost) == doctest::Approx(0.5));
  }
  std::vector<NoisyNode> zeros;
  zeros.push_back({true, 0, 0.0, -1, -1, 0});
  zeros.push_back({true, 0, 0.0, -1, -1, 0});
  zeros.push_back({false, 1, 0.4, 0, 1, 0});
  NoisyReport rep = noisy_bound_report(NoisyDecisionTree(2, std::move(zeros), 2), 2);
  for (const auto& row : rep.rows) CHECK(row.mass == doctest::Approx(0.0));
  std::string csv = noisy_report_csv(rep);
  CHECK(csv.rfind("level,mass,ratio\n", 0) == 0);
}

TEST_CASE("serialization round trip") {
  NoisyDecisionTree t = random_noisy_tree(5, 4, 1.5, 77);
  std::string j = to_json(t);
  NoisyDecisionTree back = noisy_tree_from_json(j);
  CHECK(to_json(back) == j);
  RealSpectrum a = exact_spectrum(t), b = exact_spectrum(back);
  for (size_t s = 0; s < a.coeff.size(); ++s) CHECK(a.coeff[s] == doctest::Approx(b.coeff[s]));
}
