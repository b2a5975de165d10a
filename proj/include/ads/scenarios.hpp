#pragma once

#include "ads/dataset.hpp"
#include "ads/groups.hpp"
#include "ads/report.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace ads {

/// Generator and experiment parameters shared by all scenarios.
struct ScenarioSpec {
  std::string scenario = "replication";  // replication | augmentation | sequential-noisy | intervention | topk
  std::uint64_t seed = 0;
  std::size_t seeds = 1;

  std::size_t classes = 3;
  std::size_t dim = 2;
  double separation = 2.5;  // distance of class centers from the origin
  double spread = 1.0;      // per-coordinate standard deviation
  std::size_t sources = 4;
  std::size_t instances_per_source = 5;
  std::size_t test_size = 60;

  int factor = 2;             // replication copies, or augmented copies per original + 1
  double jitter = 0.4;        // augmentation noise scale
  double aug_flip = 0.25;     // chance an augmented copy carries a wrong label
  int k = 5;                  // KNN neighbors for augmentation and intervention

  std::size_t rounds = 5;
  std::size_t per_round = 6;
  double noisy_share = 0.5;
  double flip = 0.7;
  std::vector<std::size_t> topk = {3, 4};
  double epsilon = 0.05;      // MC fallback for rounds above 8 contributors
  double delta = 0.05;

  double fraction_max = 0.30;
  double fraction_step = 0.05;
  std::size_t random_repeats = 5;
};

/// Throws InvalidScenario (or FractionOutOfRange) for out-of-range parameters.
void validate(const ScenarioSpec& spec);

/// Mean curve over seeds with a normal-approximation 95% half-width.
struct CurveSeries {
  std::string method;
  std::string metric;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> ci;
};

CurveSeries summarize(std::string method, std::string metric, std::vector<double> x,
                      const std::vector<std::vector<double>>& per_seed);

/// Totals of one valuation split between original contributors and the broker.
struct MarketSplit {
  std::string method;
  std::string stage;  // e.g. "before", "after"
  double contributors = 0.0;
  double broker = 0.0;
  double grand() const { return contributors + broker; }
  double contributor_share() const { return grand() == 0.0 ? 0.0 : contributors / grand(); }
};

struct ScenarioResult {
  std::string scenario;
  std::vector<MarketSplit> splits;  // from the first seed
  std::vector<CurveSeries> curves;
  std::map<std::string, double> summary;
};

/// Seed of run `index` in a multi-seed experiment.
std::uint64_t run_seed(const ScenarioSpec& spec, std::size_t index);

/// Labeled Gaussian blobs, classes in round-robin order.
struct Blobs {
  FeatureMatrix x;
  std::vector<int> y;
};
FeatureMatrix class_centers(const ScenarioSpec& spec);
Blobs make_blobs(std::size_t count, const FeatureMatrix& centers, double spread, std::mt19937_64& rng);

/// Originals, their copies or augmentations, and a held-out test set. Groups
/// are (originals, derived); derived sources are owned by "broker".
struct MarketData {
  SourcePool pool;
  InstanceTable test;
  OrderedGroups groups;
  std::vector<SourceIndex> originals;
  std::vector<SourceIndex> derived;
};

MarketData replication_market(const ScenarioSpec& spec, std::uint64_t seed);
/// One source per augmented instance; originals are one source per contributor.
MarketData augmentation_market(const ScenarioSpec& spec, std::uint64_t seed);

struct ReplicationOutcome {
  MarketSplit ds;
  MarketSplit ads;
  double gain = 0.0;  // v(D_orig) - v(empty)
};
ReplicationOutcome run_replication_seed(const ScenarioSpec& spec, std::uint64_t seed);

struct AugmentationOutcome {
  std::vector<MarketSplit> splits;  // ads before/after, ds after
  std::size_t retained = 0;
  std::size_t generated = 0;
};
AugmentationOutcome run_augmentation_seed(const ScenarioSpec& spec, std::uint64_t seed);

/// Relative utility after removing/adding the lowest-, highest- and randomly
/// chosen derived sources, one entry per fraction.
struct InterventionOutcome {
  std::vector<double> fractions;
  std::map<std::string, std::vector<double>> curves;  // e.g. "remove-highest"
};
std::vector<double> fraction_grid(const ScenarioSpec& spec);
InterventionOutcome run_intervention_curves(const ScenarioSpec& spec, const MarketData& market,
                                            const ValuationReport& report, std::uint64_t seed);
InterventionOutcome run_intervention_seed(const ScenarioSpec& spec, std::uint64_t seed);

/// Sequential federated-style run with a share of label-flipping contributors.
struct SequentialData {
  SourcePool pool;
  InstanceTable test;
  OrderedGroups rounds;
  std::vector<bool> noisy;  // per source
};
SequentialData sequential_market(const ScenarioSpec& spec, std::uint64_t seed);

struct SequentialOutcome {
  std::map<std::string, std::vector<double>> values;    // "ads", "loo", "random"
  std::map<std::string, double> auc;                    // mean per-round detection AUC
  std::map<std::string, std::vector<double>> detection; // cumulative noisy share by inspected count
  std::map<std::string, std::vector<double>> topk;      // "<method>@<k>" accuracy after each round
  std::vector<double> round_residuals;
};
SequentialOutcome run_sequential_seed(const ScenarioSpec& spec, std::uint64_t seed);

/// Probability that a noisy source is valued below a clean one (ties count
/// half), averaged over rounds that hold both kinds.
double detection_auc(const std::vector<double>& values, const std::vector<bool>& noisy, const OrderedGroups& rounds);

/// Cumulative share of noisy sources among the j lowest-valued, j = 1..n.
std::vector<double> detection_curve(const std::vector<double>& values, const std::vector<bool>& noisy);

/// Runs spec.seeds seeds and aggregates.
ScenarioResult run_scenario(const ScenarioSpec& spec);

}  // namespace ads
