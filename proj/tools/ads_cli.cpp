#include "ads/error.hpp"
#include "ads/exact.hpp"
#include "ads/io.hpp"
#include "ads/knn_shapley.hpp"
#include "ads/monte_carlo.hpp"
#include "ads/parallel.hpp"
#include "ads/scenarios.hpp"
#include "ads/stateful.hpp"
#include "verify_fixtures.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>

namespace {

using namespace ads;

constexpr int kExitCheckFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitTooLarge = 3;

struct ValueArgs {
  std::string method;
  std::string data;
  std::string groups;
  std::string test;
  std::string utility = "knn";
  std::string knn_norm = "effective";
  std::string out;
  int k = 5;
  double epsilon = 0.1;
  double delta = 0.1;
  std::optional<double> r;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> max_permutations;
  std::uint64_t cap = kDefaultEnumerationCap;
  bool timing = false;
};

struct VerifyArgs {
  std::string fixture = "all";
  std::string report;
  std::string data;
  std::string groups;
  std::string test;
  std::string utility = "knn";
  std::string knn_norm = "effective";
  int k = 5;
};

struct ScenarioArgs {
  ScenarioSpec spec;
  std::optional<std::uint64_t> seed;
  std::string out;
};

/// Dataset, pool, ordering and optional test set loaded from files.
struct Inputs {
  DatasetFile data;
  SourcePool pool;
  OrderedGroups groups;
  std::map<SourceId, ContributorId> ownership;
  InstanceTable test;
  bool has_test = false;
};

Inputs load_inputs(const std::string& data_path, const std::string& groups_path, const std::string& test_path) {
  Inputs in;
  in.data = read_dataset(data_path);
  if (groups_path.empty()) {
    in.pool = make_pool(in.data);
    in.groups = OrderedGroups::single_group(in.pool.size());
  } else {
    auto gf = read_groups(groups_path);
    if (gf.ownership.empty()) {
      in.pool = make_pool(in.data);
    } else {
      in.pool = make_pool(in.data, gf.ownership);
    }
    in.groups = validate_groups(gf.groups, in.pool);
  }
  in.ownership = ownership_of(in.pool);
  if (!test_path.empty()) {
    in.test = read_dataset(test_path).table;
    in.has_test = true;
  }
  return in;
}

KnnConfig knn_config(int k, const std::string& norm) {
  KnnConfig cfg;
  cfg.k = k;
  cfg.normalization = norm == "fixed" ? KnnNormalization::kFixed : KnnNormalization::kEffective;
  return cfg;
}

/// Concrete utility selected on the command line; stateful learners are
/// exposed both as themselves and anchored at their initial state.
struct UtilityChoice {
  std::unique_ptr<Utility> plain;
  std::unique_ptr<StatefulUtility> learner;
};

UtilityChoice make_utility(const std::string& name, const Inputs& in, const KnnConfig& cfg) {
  auto need_test = [&] {
    if (!in.has_test) throw Error(ErrorCode::kParseError, "--utility " + name + " needs --test");
  };
  UtilityChoice out;
  if (name == "knn") {
    need_test();
    out.plain = std::make_unique<KnnUtility>(in.pool, in.test, cfg);
  } else if (name == "one-nn") {
    need_test();
    out.plain = std::make_unique<OneNnUtility>(in.pool, in.test);
  } else if (name == "prototype") {
    need_test();
    out.learner = std::make_unique<PrototypeUtility>(in.pool, in.test);
  } else {
    out.learner = std::make_unique<SignVoteUtility>(in.pool);
  }
  if (out.learner) out.plain = std::make_unique<AnchoredUtility>(*out.learner, out.learner->initial_state());
  return out;
}

std::string format_residual(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", r);
  return buf;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

int run_value(const ValueArgs& a) {
  const auto started = std::chrono::steady_clock::now();
  const Inputs in = load_inputs(a.data, a.groups, a.test);
  const auto cfg = knn_config(a.k, a.knn_norm);
  ValuationReport report;
  if (a.method == "knn") {
    if (!in.has_test) throw Error(ErrorCode::kParseError, "--method knn needs --test");
    report = knn_ads(in.groups, in.pool, in.test, cfg, threads_from_env(), &in.ownership);
  } else {
    const auto utility = make_utility(a.utility, in, cfg);
    const Utility& v = *utility.plain;
    auto need_learner = [&]() -> const StatefulUtility& {
      if (!utility.learner) {
        throw Error(ErrorCode::kParseError, "--method " + a.method + " needs --utility prototype or sign-vote");
      }
      return *utility.learner;
    };
    McConfig mc;
    mc.epsilon = a.epsilon;
    mc.delta = a.delta;
    mc.range_bound = a.r.value_or(v.range_bound());
    mc.max_permutations_override = a.max_permutations;
    mc.threads = threads_from_env();
    const bool sampled = a.method == "mc" || a.method == "within-round-mc";
    if (sampled) {
      if (!a.seed) throw Error(ErrorCode::kParseError, "--seed is required for --method " + a.method);
      mc.seed = *a.seed;
    }
    if (a.method == "exact-perm") report = exact_ads_permutation(in.groups, v, a.cap);
    else if (a.method == "exact-subset") report = exact_ads_subset(in.groups, v, a.cap);
    else if (a.method == "ds") report = exact_ds(in.pool.size(), v, a.cap);
    else if (a.method == "mc") report = mc_ads(in.groups, v, mc);
    else if (a.method == "within-round") report = within_round_values(in.groups, need_learner(), a.cap);
    else if (a.method == "within-round-loo") report = within_round_loo(in.groups, need_learner());
    else report = mc_within_round(in.groups, need_learner(), mc);
    report = attach_pool(std::move(report), in.pool);
    if (a.utility == "knn") report.metadata.k = a.k;
  }
  if (a.timing) {
    report.metadata.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  }
  emit(a.out, dump_report(report));
  return 0;
}

void print_check(const cli::CheckResult& c) {
  std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " residual=" << format_residual(c.residual);
  if (!c.note.empty()) std::cout << ' ' << c.note;
  std::cout << '\n';
}

/// Re-checks efficiency and contributor sums of a stored report.
std::vector<cli::CheckResult> verify_report(const VerifyArgs& a) {
  const auto report = read_report(a.report);
  const Inputs in = load_inputs(a.data, a.groups, a.test);
  const bool knn = report.method == "knn";
  const auto utility = make_utility(knn ? "knn" : a.utility, in, knn_config(a.k, knn ? "fixed" : a.knn_norm));
  const Utility& v = *utility.plain;

  // Values are matched to the pool by source id.
  ValuationReport aligned = report;
  aligned.source_ids = in.pool.source_ids();
  aligned.values.assign(in.pool.size(), 0.0);
  for (std::size_t z = 0; z < in.pool.size(); ++z) aligned.values[z] = report.value_of(aligned.source_ids[z]);

  double tolerance = knn ? 1e-8 : kExactResidualTolerance;
  if (report.metadata.epsilon) {
    tolerance = 2.0 * static_cast<double>(in.pool.size()) * *report.metadata.epsilon *
                report.metadata.range_bound.value_or(1.0);
  }
  std::vector<cli::CheckResult> checks;
  const bool sequential = report.method.rfind("within-round", 0) == 0 || report.method == "mc-within-round";
  if (!sequential) {
    const auto residuals = verify_group_efficiency(aligned, in.groups, v);
    for (std::size_t t = 0; t < residuals.size(); ++t) {
      checks.push_back({"group-efficiency[" + std::to_string(t + 1) + "]", residuals[t] <= tolerance, residuals[t], {}});
    }
    const double global = verify_efficiency(aligned, v);
    checks.push_back({"efficiency", global <= tolerance, global, {}});
  }
  const auto regrouped = aggregate_contributors(aligned, in.ownership);
  double worst = 0.0;
  for (const auto& [id, value] : regrouped.contributor_values) {
    auto it = report.contributor_values.find(id);
    worst = std::max(worst, it == report.contributor_values.end() ? std::abs(value) : std::abs(value - it->second));
  }
  checks.push_back({"contributor-sums", worst <= 1e-12, worst, {}});
  return checks;
}

int run_verify(const VerifyArgs& a) {
  std::vector<cli::CheckResult> checks;
  if (!a.report.empty()) {
    if (a.data.empty()) throw Error(ErrorCode::kParseError, "--report needs --data");
    checks = verify_report(a);
  } else {
    bool matched = false;
    for (const auto& [name, run] : cli::fixtures()) {
      if (a.fixture != "all" && a.fixture != name) continue;
      matched = true;
      for (auto& c : run()) checks.push_back(std::move(c));
    }
    if (!matched) throw Error(ErrorCode::kParseError, "unknown fixture " + a.fixture);
  }
  bool ok = true;
  for (const auto& c : checks) {
    print_check(c);
    ok = ok && c.passed;
  }
  std::cout << (ok ? "all checks passed" : "verification failed") << '\n';
  return ok ? 0 : kExitCheckFailed;
}

int run_scenario_command(ScenarioArgs a) {
  if (!a.seed) throw Error(ErrorCode::kInvalidScenario, "--seed is required");
  a.spec.seed = *a.seed;
  const auto result = run_scenario(a.spec);
  if (!a.out.empty()) {
    write_text(a.out + ".json", scenario_to_json(result).dump(2) + "\n");
    if (!result.curves.empty()) write_text(a.out + "_curves.csv", curves_csv(result.curves));
  }
  std::printf("scenario %s, %zu seed(s) from %llu\n", result.scenario.c_str(), a.spec.seeds,
              static_cast<unsigned long long>(a.spec.seed));
  for (const auto& s : result.splits) {
    std::printf("  split %-4s %-10s contributors=%.6f broker=%.6f contributor_share=%.6f\n", s.method.c_str(),
                s.stage.c_str(), s.contributors, s.broker, s.contributor_share());
  }
  for (const auto& [key, value] : result.summary) std::printf("  %-30s %.6f\n", key.c_str(), value);
  for (const auto& c : result.curves) {
    if (c.metric == "cumulative-noisy-share") continue;
    std::printf("  curve %-16s %-18s", c.method.c_str(), c.metric.c_str());
    for (std::size_t j = 0; j < c.y.size(); ++j) std::printf(" %.4f", c.y[j]);
    std::printf("\n");
  }
  return 0;
}

int fail(std::string_view code, const std::string& detail, int exit_code) {
  std::cerr << "ERROR " << code << ' ' << detail << '\n';
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymmetric data valuation: exact, Monte Carlo and KNN engines"};
  app.set_config("--config", "", "TOML/INI file with default flag values");
  app.require_subcommand(1);

  ValueArgs value;
  auto* value_cmd = app.add_subcommand("value", "Value every source and write a report");
  value_cmd->add_option("--method", value.method, "Valuation engine")
      ->required()
      ->check(CLI::IsMember({"exact-perm", "exact-subset", "ds", "mc", "knn", "within-round", "within-round-loo",
                             "within-round-mc"}));
  value_cmd->add_option("--data", value.data, "Training CSV")->required();
  value_cmd->add_option("--groups", value.groups, "Ordered groups JSON (default: one group)");
  value_cmd->add_option("--test", value.test, "Test CSV");
  value_cmd->add_option("--utility", value.utility, "Utility for non-KNN engines")
      ->check(CLI::IsMember({"knn", "one-nn", "prototype", "sign-vote"}));
  value_cmd->add_option("--knn-norm", value.knn_norm, "KNN vote denominator: min(K, m) or K")
      ->check(CLI::IsMember({"effective", "fixed"}));
  value_cmd->add_option("--k", value.k, "Neighbors")->check(CLI::PositiveNumber);
  value_cmd->add_option("--epsilon", value.epsilon, "MC accuracy");
  value_cmd->add_option("--delta", value.delta, "MC failure probability");
  value_cmd->add_option("--r", value.r, "Range of one-step marginals (default: utility's bound)");
  value_cmd->add_option("--seed", value.seed, "MC seed (required for sampled methods)");
  value_cmd->add_option("--max-permutations", value.max_permutations, "Budget override; voids the guarantee");
  value_cmd->add_option("--cap", value.cap, "Enumeration cap");
  value_cmd->add_option("--out", value.out, "Report path (default: stdout)");
  value_cmd->add_flag("--timing", value.timing, "Record wall-clock seconds in the report");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run bundled checks or re-check a stored report");
  verify_cmd->add_option("--fixture", verify.fixture, "all | toy | random | ds-special | lemma1 | lemma2 | knn-oracle");
  verify_cmd->add_option("--report", verify.report, "Report JSON to re-check");
  verify_cmd->add_option("--data", verify.data, "Training CSV for --report");
  verify_cmd->add_option("--groups", verify.groups, "Groups JSON for --report");
  verify_cmd->add_option("--test", verify.test, "Test CSV for --report");
  verify_cmd->add_option("--utility", verify.utility, "Utility the report was computed with")
      ->check(CLI::IsMember({"knn", "one-nn", "prototype", "sign-vote"}));
  verify_cmd->add_option("--knn-norm", verify.knn_norm)->check(CLI::IsMember({"effective", "fixed"}));
  verify_cmd->add_option("--k", verify.k)->check(CLI::PositiveNumber);

  ScenarioArgs scenario;
  auto& s = scenario.spec;
  auto* scenario_cmd = app.add_subcommand("scenario", "Run a synthetic experiment over several seeds");
  scenario_cmd->add_option("--scenario", s.scenario, "replication | augmentation | sequential-noisy | intervention | topk")
      ->required();
  scenario_cmd->add_option("--seed", scenario.seed, "First seed (required)");
  scenario_cmd->add_option("--seeds", s.seeds, "Number of seeds");
  scenario_cmd->add_option("--classes", s.classes);
  scenario_cmd->add_option("--dim", s.dim);
  scenario_cmd->add_option("--separation", s.separation);
  scenario_cmd->add_option("--spread", s.spread);
  scenario_cmd->add_option("--sources", s.sources);
  scenario_cmd->add_option("--instances-per-source", s.instances_per_source);
  scenario_cmd->add_option("--test-size", s.test_size);
  scenario_cmd->add_option("--factor", s.factor, "Replication factor or copies per original + 1");
  scenario_cmd->add_option("--jitter", s.jitter);
  scenario_cmd->add_option("--aug-flip", s.aug_flip);
  scenario_cmd->add_option("--k", s.k);
  scenario_cmd->add_option("--rounds", s.rounds);
  scenario_cmd->add_option("--per-round", s.per_round);
  scenario_cmd->add_option("--noisy-share", s.noisy_share);
  scenario_cmd->add_option("--flip", s.flip);
  scenario_cmd->add_option("--topk", s.topk);
  scenario_cmd->add_option("--epsilon", s.epsilon);
  scenario_cmd->add_option("--delta", s.delta);
  scenario_cmd->add_option("--fraction-max", s.fraction_max);
  scenario_cmd->add_option("--fraction-step", s.fraction_step);
  scenario_cmd->add_option("--random-repeats", s.random_repeats);
  scenario_cmd->add_option("--out", scenario.out, "Output prefix for <prefix>.json and <prefix>_curves.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("ParseError", e.what(), kExitInvalid);
  }

  try {
    if (*value_cmd) return run_value(value);
    if (*verify_cmd) return run_verify(verify);
    return run_scenario_command(scenario);
  } catch (const Error& e) {
    return fail(to_string(e.code()), e.detail(), e.code() == ErrorCode::kEnumerationTooLarge ? kExitTooLarge : kExitInvalid);
  } catch (const std::exception& e) {
    return fail("IoError", e.what(), kExitInvalid);
  }
}
