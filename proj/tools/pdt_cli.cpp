#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "pdtf/cleanup.hpp"
#include "pdtf/experiments.hpp"
#include "pdtf/fourier.hpp"
#include "pdtf/noisy.hpp"
#include "pdtf/selfcheck.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;   // an exact bound reported FAIL
constexpr int kExitUsage = 2;  // bad flags or guard violations

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--in", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw CLI::ValidationError("--out", "cannot open " + path);
  out << content;
}

pdtf::QueryPolicy parse_policy(const std::string& name) {
  if (name == "singleton") return pdtf::QueryPolicy::kSingleton;
  if (name == "uniform") return pdtf::QueryPolicy::kUniform;
  if (name == "small") return pdtf::QueryPolicy::kSmallSupport;
  throw CLI::ValidationError("--policy", "unknown policy " + name);
}

pdtf::WitnessRule parse_rule(const std::string& name) {
  if (name == "batch") return pdtf::WitnessRule::kBatchMinimal;
  if (name == "batch-reverse") return pdtf::WitnessRule::kBatchReverse;
  if (name == "lowest") return pdtf::WitnessRule::kSingleLowest;
  if (name == "highest") return pdtf::WitnessRule::kSingleHighest;
  if (name == "random") return pdtf::WitnessRule::kSingleRandom;
  throw CLI::ValidationError("--rule", "unknown rule " + name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parity decision tree toolkit"};
  app.require_subcommand(1);

  int n = 8, depth = 4, k = 2, level = 4, degree = 3, q = 4, steps = 100, jobs = 1;
  int64_t trials = 100000;
  uint64_t seed = 0;
  double cost = 1.0;
  std::string in = "-", out = "-", policy = "uniform", rule = "batch", config, name,
              step_rule = "adaptive";
  bool quick = false;

  auto* gen = app.add_subcommand("gen", "random tree to JSON");
  gen->add_option("--n", n, "dimension")->check(CLI::Range(1, 64));
  gen->add_option("--depth", depth, "tree depth")->check(CLI::Range(0, 60));
  gen->add_option("--seed", seed, "RNG seed")->required();
  gen->add_option("--policy", policy, "singleton|uniform|small");
  gen->add_option("--out", out, "output path or -");

  auto* validate = app.add_subcommand("validate", "check tree well-formedness");
  validate->add_option("--in", in, "tree JSON path or -");

  auto* clean = app.add_subcommand("clean", "k-cleanup transformation");
  clean->add_option("--in", in, "tree JSON path or -");
  clean->add_option("--k", k, "cleanness parameter")->required()->check(CLI::Range(1, 64));
  clean->add_option("--rule", rule, "batch|batch-reverse|lowest|highest|random");
  clean->add_option("--seed", seed, "RNG seed (random rule only)");
  clean->add_option("--out", out, "output path or -");

  auto* spectrum_cmd = app.add_subcommand("spectrum", "exact spectrum CSV");
  spectrum_cmd->add_option("--in", in, "tree JSON path or -");
  spectrum_cmd->add_option("--out", out, "output path or -");

  auto* bounds = app.add_subcommand("bounds", "level-mass report CSV");
  bounds->add_option("--in", in, "tree JSON path or -");
  bounds->add_option("--level", level, "max level")->check(CLI::Range(0, 64));
  bounds->add_option("--out", out, "output path or -");

  auto* ngen = app.add_subcommand("noisy-gen", "random noisy tree to JSON");
  ngen->add_option("--n", n, "dimension")->check(CLI::Range(1, 64));
  ngen->add_option("--depth", depth, "tree depth")->check(CLI::Range(0, 60));
  ngen->add_option("--cost", cost, "total cost budget")->check(CLI::NonNegativeNumber);
  ngen->add_option("--seed", seed, "RNG seed")->required();
  ngen->add_option("--out", out, "output path or -");

  auto* nspec = app.add_subcommand("noisy-spectrum", "noisy spectrum CSV");
  nspec->add_option("--in", in, "noisy tree JSON path or -");
  nspec->add_option("--out", out, "output path or -");

  auto* nbounds = app.add_subcommand("noisy-bounds", "noisy level-mass report CSV");
  nbounds->add_option("--in", in, "noisy tree JSON path or -");
  nbounds->add_option("--level", level, "max level")->check(CLI::Range(0, 64));
  nbounds->add_option("--out", out, "output path or -");

  auto* experiment = app.add_subcommand("experiment", "named experiment to CSV");
  experiment->add_option("name", name, "sweep|azuma|hyper")->required();
  experiment->add_option("--config", config, "sweep config JSON path");
  experiment->add_option("--jobs", jobs, "parallel workers")->check(CLI::Range(1, 64));
  experiment->add_option("--seed", seed, "RNG seed");
  experiment->add_option("--steps", steps, "walk length");
  experiment->add_option("--trials", trials, "Monte-Carlo trials");
  experiment->add_option("--rule", step_rule, "unit|adaptive");
  experiment->add_option("--n", n, "dimension");
  experiment->add_option("--degree", degree, "polynomial degree");
  experiment->add_option("--q", q, "norm exponent (4, 6, or 8)");
  experiment->add_option("--out", out, "output path or -");

  auto* selftest = app.add_subcommand("selftest", "full verification suite");
  selftest->add_flag("--quick", quick, "reduced corpus, <= 60 s");
  selftest->add_option("--seed", seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      write_output(out, pdtf::to_json(pdtf::random_pdt(n, depth, parse_policy(policy), seed)));
      return kExitOk;
    }
    if (validate->parsed()) {
      pdtf::ValidationReport rep = pdtf::validate(pdtf::tree_from_json(read_input(in)));
      for (const auto& issue : rep.issues)
        std::cout << "node " << issue.node << ": " << issue.message << "\n";
      std::cout << (rep.ok() ? "PASS" : "FAIL") << "\n";
      return rep.ok() ? kExitOk : kExitFail;
    }
    if (clean->parsed()) {
      pdtf::CleanTree ct =
          pdtf::cleanup_tree(pdtf::tree_from_json(read_input(in)), k, parse_rule(rule), seed);
      write_output(out, pdtf::to_json(ct));
      pdtf::ValidationReport rep = pdtf::verify_clean(ct);
      for (const auto& issue : rep.issues)
        std::cerr << "node " << issue.node << ": " << issue.message << "\n";
      std::cerr << (rep.ok() ? "PASS" : "FAIL") << "\n";
      return rep.ok() ? kExitOk : kExitFail;
    }
    if (spectrum_cmd->parsed()) {
      write_output(out, pdtf::spectrum_csv(pdtf::spectrum(pdtf::tree_from_json(read_input(in)))));
      return kExitOk;
    }
    if (bounds->parsed()) {
      pdtf::LevelMassReport rep =
          pdtf::bound_report(pdtf::tree_from_json(read_input(in)), level);
      write_output(out, pdtf::report_csv(rep));
      return rep.all_pass() ? kExitOk : kExitFail;
    }
    if (ngen->parsed()) {
      write_output(out, pdtf::to_json(pdtf::random_noisy_tree(n, depth, cost, seed)));
      return kExitOk;
    }
    if (nspec->parsed()) {
      pdtf::RealSpectrum spec = pdtf::exact_spectrum(pdtf::noisy_tree_from_json(read_input(in)));
      std::ostringstream os;
      os << "mask,coefficient\n" << std::hex;
      for (uint64_t s = 0; s < spec.coeff.size(); ++s)
        if (spec.coeff[s] != 0.0) os << s << ',' << std::dec << spec.coeff[s] << '\n' << std::hex;
      write_output(out, os.str());
      return kExitOk;
    }
    if (nbounds->parsed()) {
      pdtf::NoisyReport rep =
          pdtf::noisy_bound_report(pdtf::noisy_tree_from_json(read_input(in)), level);
      write_output(out, pdtf::noisy_report_csv(rep));
      return rep.parseval_pass ? kExitOk : kExitFail;
    }
    if (experiment->parsed()) {
      if (name == "sweep") {
        if (config.empty()) throw CLI::ValidationError("--config", "sweep needs a config file");
        pdtf::SweepConfig cfg = pdtf::sweep_config_from_json(read_input(config));
        cfg.jobs = jobs;
        std::string csv = pdtf::sweep(cfg);
        write_output(out, csv);
        return csv.find(",FAIL,") == std::string::npos ? kExitOk : kExitFail;
      }
      if (name == "azuma") {
        pdtf::StepRule sr =
            step_rule == "unit" ? pdtf::StepRule::kUnit : pdtf::StepRule::kAdaptive;
        std::ostringstream os;
        os << "beta,empirical,bound,mc_sigma,pass\n";
        bool ok = true;
        for (const auto& row : pdtf::azuma_empirical(steps, sr, {1.0, 2.0, 3.0}, trials, seed)) {
          os << row.beta << ',' << row.empirical << ',' << row.bound << ',' << row.mc_sigma << ','
             << (row.pass ? "PASS" : "FAIL") << '\n';
          ok = ok && row.pass;
        }
        write_output(out, os.str());
        return ok ? kExitOk : kExitFail;
      }
      if (name == "hyper") {
        pdtf::HypercontractivityResult res = pdtf::hypercontractivity_check(
            degree, q, n, static_cast<int>(trials), seed);
        std::ostringstream os;
        os << "checked,failures,pass\n"
           << res.checked << ',' << res.failures << ',' << (res.failures == 0 ? "PASS" : "FAIL")
           << '\n';
        write_output(out, os.str());
        return res.failures == 0 ? kExitOk : kExitFail;
      }
      throw CLI::ValidationError("name", "unknown experiment " + name);
    }
    if (selftest->parsed()) {
      if (!selftest->count("--seed")) seed = 17;
      pdtf::SelfTestReport rep = pdtf::run_selftest(quick, seed, std::cout);
      return rep.all_pass() ? kExitOk : kExitFail;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
