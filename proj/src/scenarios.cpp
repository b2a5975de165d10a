#include "ads/scenarios.hpp"

#include "ads/error.hpp"
#include "ads/exact.hpp"
#include "ads/knn_shapley.hpp"
#include "ads/knn_utility.hpp"
#include "ads/monte_carlo.hpp"
#include "ads/parallel.hpp"
#include "ads/stateful.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace ads {
namespace {

std::string padded(std::size_t value, int width = 4) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return digits;
}

void bad(const std::string& what) { throw Error(ErrorCode::kInvalidScenario, what); }

KnnConfig market_knn(const ScenarioSpec& spec) {
  KnnConfig cfg;
  cfg.k = spec.k;
  cfg.normalization = KnnNormalization::kFixed;
  return cfg;
}

InstanceTable test_table(const ScenarioSpec& spec, const FeatureMatrix& centers, std::mt19937_64& rng) {
  auto blobs = make_blobs(spec.test_size, centers, spec.spread, rng);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < spec.test_size; ++i) ids.push_back("test-" + padded(i));
  return InstanceTable(std::move(ids), std::move(blobs.x), std::move(blobs.y));
}

int other_label(int label, std::size_t classes, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, static_cast<int>(classes) - 2);
  const int draw = pick(rng);
  return draw >= label ? draw + 1 : draw;
}

/// Same instances, only the listed sources.
SourcePool sub_pool(const SourcePool& pool, const std::vector<SourceIndex>& keep) {
  std::vector<DataSource> sources;
  for (auto z : keep) sources.push_back(pool.source(z));
  return SourcePool(pool.instances(), std::move(sources));
}

MarketSplit split_of(std::string method, std::string stage, const std::vector<double>& values,
                     const std::vector<SourceIndex>& originals, const std::vector<SourceIndex>& derived) {
  MarketSplit split{std::move(method), std::move(stage)};
  for (auto z : originals) split.contributors += values[z];
  for (auto z : derived) split.broker += values[z];
  return split;
}

std::vector<SourceIndex> iota_indices(std::size_t from, std::size_t to) {
  std::vector<SourceIndex> out(to - from);
  std::iota(out.begin(), out.end(), from);
  return out;
}

OrderedGroups market_groups(const std::vector<SourceIndex>& originals, const std::vector<SourceIndex>& derived,
                            std::size_t n) {
  if (derived.empty()) return OrderedGroups::single_group(n);
  return OrderedGroups::from_indices({originals, derived}, n);
}

double mean_of(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

void validate(const ScenarioSpec& spec) {
  static const std::vector<std::string> known{"replication", "augmentation", "sequential-noisy", "intervention",
                                              "topk"};
  if (std::find(known.begin(), known.end(), spec.scenario) == known.end()) bad("unknown scenario " + spec.scenario);
  if (spec.seeds < 1) bad("seeds must be >= 1");
  if (spec.classes < 2) bad("classes must be >= 2");
  if (spec.dim < 1 || spec.dim > 10) bad("dim must lie in [1, 10]");
  if (!(spec.spread > 0.0)) bad("spread must be > 0");
  if (spec.sources < 1 || spec.instances_per_source < 1) bad("sources and instances per source must be >= 1");
  if (spec.test_size < 1) bad("test size must be >= 1");
  if (spec.k < 1) bad("k must be >= 1");
  if (spec.scenario == "replication" && (spec.factor < 1 || spec.factor > 3)) bad("replication factor must be 1, 2 or 3");
  if ((spec.scenario == "augmentation" || spec.scenario == "intervention") && spec.factor < 2) {
    bad("augmentation needs factor >= 2");
  }
  if (spec.jitter < 0.0) bad("jitter must be >= 0");
  for (double p : {spec.aug_flip, spec.flip, spec.noisy_share}) {
    if (!(p >= 0.0 && p <= 1.0)) bad("probabilities must lie in [0, 1]");
  }
  if (spec.rounds < 1 || spec.per_round < 2) bad("need >= 1 round and >= 2 contributors per round");
  for (auto k : spec.topk) {
    if (k < 1 || k > spec.per_round) bad("top-k size " + std::to_string(k) + " outside [1, per_round]");
  }
  if (!(spec.fraction_max >= 0.0 && spec.fraction_max <= 1.0)) {
    throw Error(ErrorCode::kFractionOutOfRange, "fraction max " + std::to_string(spec.fraction_max));
  }
  if (!(spec.fraction_step > 0.0 && spec.fraction_step <= 1.0)) {
    throw Error(ErrorCode::kFractionOutOfRange, "fraction step " + std::to_string(spec.fraction_step));
  }
}

CurveSeries summarize(std::string method, std::string metric, std::vector<double> x,
                      const std::vector<std::vector<double>>& per_seed) {
  CurveSeries out{std::move(method), std::move(metric), std::move(x), {}, {}};
  const std::size_t points = out.x.size();
  const auto n = static_cast<double>(per_seed.size());
  for (std::size_t j = 0; j < points; ++j) {
    double sum = 0.0;
    for (const auto& run : per_seed) sum += run[j];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& run : per_seed) ss += (run[j] - mean) * (run[j] - mean);
    const double sd = per_seed.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    out.y.push_back(mean);
    out.ci.push_back(1.96 * sd / std::sqrt(n));
  }
  return out;
}

std::uint64_t run_seed(const ScenarioSpec& spec, std::size_t index) { return spec.seed + index; }

FeatureMatrix class_centers(const ScenarioSpec& spec) {
  const auto C = static_cast<Eigen::Index>(spec.classes);
  FeatureMatrix centers = FeatureMatrix::Zero(C, static_cast<Eigen::Index>(spec.dim));
  for (Eigen::Index c = 0; c < C; ++c) {
    if (spec.dim == 1) {
      centers(c, 0) = spec.separation * static_cast<double>(c);
      continue;
    }
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(C);
    centers(c, 0) = spec.separation * std::cos(angle);
    centers(c, 1) = spec.separation * std::sin(angle);
  }
  return centers;
}

Blobs make_blobs(std::size_t count, const FeatureMatrix& centers, double spread, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, spread);
  Blobs out{FeatureMatrix(static_cast<Eigen::Index>(count), centers.cols()), std::vector<int>(count)};
  for (std::size_t i = 0; i < count; ++i) {
    const auto c = static_cast<Eigen::Index>(i % static_cast<std::size_t>(centers.rows()));
    out.y[i] = static_cast<int>(c);
    for (Eigen::Index j = 0; j < centers.cols(); ++j) {
      out.x(static_cast<Eigen::Index>(i), j) = centers(c, j) + noise(rng);
    }
  }
  return out;
}

MarketData replication_market(const ScenarioSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto centers = class_centers(spec);
  const std::size_t count = spec.sources * spec.instances_per_source;
  auto blobs = make_blobs(count, centers, spec.spread, rng);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < count; ++i) ids.push_back("orig-" + padded(i));
  std::vector<DataSource> sources;
  for (std::size_t s = 0; s < spec.sources; ++s) {
    DataSource src{"o" + padded(s, 2), "contrib-" + padded(s, 2), {}};
    for (std::size_t i = 0; i < spec.instances_per_source; ++i) src.instances.push_back(i * spec.sources + s);
    sources.push_back(std::move(src));
  }
  for (int copy = 1; copy < spec.factor; ++copy) {
    for (std::size_t s = 0; s < spec.sources; ++s) {
      sources.push_back({"copy" + std::to_string(copy) + "-" + padded(s, 2), "broker", sources[s].instances});
    }
  }
  const std::size_t n = sources.size();
  auto test = test_table(spec, centers, rng);
  SourcePool pool(InstanceTable(std::move(ids), std::move(blobs.x), std::move(blobs.y)), std::move(sources));
  auto originals = iota_indices(0, spec.sources);
  auto derived = iota_indices(spec.sources, n);
  auto groups = market_groups(originals, derived, n);
  return {std::move(pool), std::move(test), std::move(groups), std::move(originals), std::move(derived)};
}

MarketData augmentation_market(const ScenarioSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto centers = class_centers(spec);
  const std::size_t count = spec.sources * spec.instances_per_source;
  auto blobs = make_blobs(count, centers, spec.spread, rng);
  const std::size_t per = static_cast<std::size_t>(spec.factor - 1);
  const std::size_t total = count * (1 + per);
  FeatureMatrix x(static_cast<Eigen::Index>(total), blobs.x.cols());
  x.topRows(static_cast<Eigen::Index>(count)) = blobs.x;
  std::vector<int> y = blobs.y;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < count; ++i) ids.push_back("orig-" + padded(i));
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::bernoulli_distribution corrupt(spec.aug_flip);
  std::vector<DataSource> sources;
  for (std::size_t s = 0; s < spec.sources; ++s) {
    DataSource src{"o" + padded(s, 2), "contrib-" + padded(s, 2), {}};
    for (std::size_t i = 0; i < spec.instances_per_source; ++i) src.instances.push_back(i * spec.sources + s);
    sources.push_back(std::move(src));
  }
  std::size_t row = count;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t c = 0; c < per; ++c, ++row) {
      const auto r = static_cast<Eigen::Index>(row);
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        x(r, j) = blobs.x(static_cast<Eigen::Index>(i), j) + spec.jitter * jitter(rng);
      }
      y.push_back(corrupt(rng) ? other_label(blobs.y[i], spec.classes, rng) : blobs.y[i]);
      ids.push_back("syn-" + padded(i) + "-" + std::to_string(c));
      sources.push_back({"a" + padded(i) + "-" + std::to_string(c), "broker", {row}});
    }
  }
  const std::size_t n = sources.size();
  auto test = test_table(spec, centers, rng);
  SourcePool pool(InstanceTable(std::move(ids), std::move(x), std::move(y)), std::move(sources));
  auto originals = iota_indices(0, spec.sources);
  auto derived = iota_indices(spec.sources, n);
  auto groups = market_groups(originals, derived, n);
  return {std::move(pool), std::move(test), std::move(groups), std::move(originals), std::move(derived)};
}

ReplicationOutcome run_replication_seed(const ScenarioSpec& spec, std::uint64_t seed) {
  const auto market = replication_market(spec, seed);
  OneNnUtility v(market.pool, market.test);
  const auto ds = exact_ds(market.pool.size(), v);
  const auto ordered = exact_ads_subset(market.groups, v);
  ReplicationOutcome out;
  out.ds = split_of("ds", "replicated", ds.values, market.originals, market.derived);
  out.ads = split_of("ads", "replicated", ordered.values, market.originals, market.derived);
  out.gain = v.value(market.originals) - v.empty_value();
  return out;
}

AugmentationOutcome run_augmentation_seed(const ScenarioSpec& spec, std::uint64_t seed) {
  const auto market = augmentation_market(spec, seed);
  const auto cfg = market_knn(spec);
  AugmentationOutcome out;
  out.generated = market.derived.size();

  KnnUtility v(market.pool, market.test, cfg);
  MarketSplit before{"ads", "before"};
  before.contributors = v.value(market.originals) - v.empty_value();
  out.splits.push_back(before);

  const auto full = knn_ads(market.groups, market.pool, market.test, cfg);
  out.splits.push_back(split_of("ads", "augmented", full.values, market.originals, market.derived));

  std::vector<SourceIndex> keep = market.originals;
  for (auto z : market.derived) {
    if (full.values[z] > 0.0) keep.push_back(z);
  }
  out.retained = keep.size() - market.originals.size();
  const auto retained_pool = sub_pool(market.pool, keep);
  const auto originals = iota_indices(0, market.originals.size());
  const auto derived = iota_indices(market.originals.size(), keep.size());
  const auto groups = market_groups(originals, derived, keep.size());
  const auto after = knn_ads(groups, retained_pool, market.test, cfg);
  out.splits.push_back(split_of("ads", "retained", after.values, originals, derived));
  const auto ds = knn_ads(OrderedGroups::single_group(keep.size()), retained_pool, market.test, cfg);
  out.splits.push_back(split_of("ds", "retained", ds.values, originals, derived));
  return out;
}

std::vector<double> fraction_grid(const ScenarioSpec& spec) {
  if (!(spec.fraction_max >= 0.0 && spec.fraction_max <= 1.0)) {
    throw Error(ErrorCode::kFractionOutOfRange, "fraction max " + std::to_string(spec.fraction_max));
  }
  if (!(spec.fraction_step > 0.0 && spec.fraction_step <= 1.0)) {
    throw Error(ErrorCode::kFractionOutOfRange, "fraction step " + std::to_string(spec.fraction_step));
  }
  std::vector<double> grid;
  const auto steps = static_cast<std::size_t>(std::floor(spec.fraction_max / spec.fraction_step + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) grid.push_back(static_cast<double>(i) * spec.fraction_step);
  return grid;
}

InterventionOutcome run_intervention_curves(const ScenarioSpec& spec, const MarketData& market,
                                            const ValuationReport& report, std::uint64_t seed) {
  InterventionOutcome out;
  out.fractions = fraction_grid(spec);
  if (report.values.size() != market.pool.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "report does not match the market's sources");
  }
  KnnUtility v(market.pool, market.test, market_knn(spec));
  const double full_baseline = [&] {
    std::vector<SourceIndex> all(market.pool.size());
    std::iota(all.begin(), all.end(), SourceIndex{0});
    return v.value(all);
  }();
  const double orig_baseline = v.value(market.originals);
  if (full_baseline == 0.0 || orig_baseline == 0.0) bad("baseline utility is zero; relative accuracy undefined");

  std::vector<SourceIndex> ascending = market.derived;
  std::stable_sort(ascending.begin(), ascending.end(),
                   [&](SourceIndex a, SourceIndex b) { return report.values[a] < report.values[b]; });
  const std::vector<SourceIndex> descending(ascending.rbegin(), ascending.rend());
  std::mt19937_64 rng(seed ^ 0x5bd1e995u);
  std::vector<std::vector<SourceIndex>> shuffles(std::max<std::size_t>(1, spec.random_repeats), market.derived);
  for (auto& order : shuffles) std::shuffle(order.begin(), order.end(), rng);

  auto remove = [&](const std::vector<SourceIndex>& order, std::size_t count) {
    std::vector<SourceIndex> kept = market.originals;
    kept.insert(kept.end(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end());
    std::sort(kept.begin(), kept.end());
    return v.value(kept) / full_baseline;
  };
  auto add = [&](const std::vector<SourceIndex>& order, std::size_t count) {
    std::vector<SourceIndex> kept = market.originals;
    kept.insert(kept.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(kept.begin(), kept.end());
    return v.value(kept) / orig_baseline;
  };
  for (double f : out.fractions) {
    const auto count = std::min(market.derived.size(),
                                static_cast<std::size_t>(std::llround(f * static_cast<double>(market.derived.size()))));
    out.curves["remove-lowest"].push_back(remove(ascending, count));
    out.curves["remove-highest"].push_back(remove(descending, count));
    out.curves["add-lowest"].push_back(add(ascending, count));
    out.curves["add-highest"].push_back(add(descending, count));
    double removed = 0.0, added = 0.0;
    for (const auto& order : shuffles) {
      removed += remove(order, count);
      added += add(order, count);
    }
    out.curves["remove-random"].push_back(removed / static_cast<double>(shuffles.size()));
    out.curves["add-random"].push_back(added / static_cast<double>(shuffles.size()));
  }
  return out;
}

InterventionOutcome run_intervention_seed(const ScenarioSpec& spec, std::uint64_t seed) {
  const auto market = augmentation_market(spec, seed);
  const auto report = knn_ads(market.groups, market.pool, market.test, market_knn(spec));
  return run_intervention_curves(spec, market, report, seed);
}

SequentialData sequential_market(const ScenarioSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto centers = class_centers(spec);
  const std::size_t contributors = spec.per_round;
  std::vector<std::size_t> roster(contributors);
  std::iota(roster.begin(), roster.end(), std::size_t{0});
  std::shuffle(roster.begin(), roster.end(), rng);
  const auto noisy_count =
      static_cast<std::size_t>(std::llround(spec.noisy_share * static_cast<double>(contributors)));
  std::vector<bool> noisy_contributor(contributors, false);
  for (std::size_t j = 0; j < noisy_count; ++j) noisy_contributor[roster[j]] = true;

  const std::size_t per = spec.instances_per_source;
  const std::size_t total = spec.rounds * contributors * per;
  FeatureMatrix x(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(spec.dim));
  std::vector<int> y;
  std::vector<std::string> ids;
  std::vector<DataSource> sources;
  std::vector<bool> noisy;
  std::vector<std::vector<SourceIndex>> rounds(spec.rounds);
  std::bernoulli_distribution flip(spec.flip);
  std::size_t row = 0;
  for (std::size_t t = 0; t < spec.rounds; ++t) {
    for (std::size_t j = 0; j < contributors; ++j) {
      auto blobs = make_blobs(per, centers, spec.spread, rng);
      // Start each contributor at a random class so small sources are not all alike.
      const auto offset = static_cast<int>(rng() % spec.classes);
      DataSource src{"r" + std::to_string(t + 1) + "-c" + padded(j, 2), "contrib-" + padded(j, 2), {}};
      for (std::size_t i = 0; i < per; ++i, ++row) {
        const int clean = (blobs.y[i] + offset) % static_cast<int>(spec.classes);
        x.row(static_cast<Eigen::Index>(row)) =
            blobs.x.row(static_cast<Eigen::Index>(i)) - centers.row(blobs.y[i]) + centers.row(clean);
        y.push_back(noisy_contributor[j] && flip(rng) ? other_label(clean, spec.classes, rng) : clean);
        ids.push_back("r" + std::to_string(t + 1) + "-c" + padded(j, 2) + "-" + padded(i, 3));
        src.instances.push_back(row);
      }
      rounds[t].push_back(sources.size());
      sources.push_back(std::move(src));
      noisy.push_back(noisy_contributor[j]);
    }
  }
  auto test = test_table(spec, centers, rng);
  const std::size_t n = sources.size();
  SourcePool pool(InstanceTable(std::move(ids), std::move(x), std::move(y)), std::move(sources));
  return {std::move(pool), std::move(test), OrderedGroups::from_indices(std::move(rounds), n), std::move(noisy)};
}

double detection_auc(const std::vector<double>& values, const std::vector<bool>& noisy, const OrderedGroups& rounds) {
  double total = 0.0;
  std::size_t counted = 0;
  for (const auto& group : rounds.groups()) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (auto a : group) {
      if (!noisy[a]) continue;
      for (auto b : group) {
        if (noisy[b]) continue;
        ++pairs;
        if (values[a] < values[b]) wins += 1.0;
        else if (values[a] == values[b]) wins += 0.5;
      }
    }
    if (pairs == 0) continue;
    total += wins / static_cast<double>(pairs);
    ++counted;
  }
  return counted == 0 ? 0.5 : total / static_cast<double>(counted);
}

std::vector<double> detection_curve(const std::vector<double>& values, const std::vector<bool>& noisy) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  const auto noisy_total = static_cast<double>(std::count(noisy.begin(), noisy.end(), true));
  std::vector<double> curve;
  double found = 0.0;
  for (auto z : order) {
    found += noisy[z] ? 1.0 : 0.0;
    curve.push_back(noisy_total == 0.0 ? 0.0 : found / noisy_total);
  }
  return curve;
}

SequentialOutcome run_sequential_seed(const ScenarioSpec& spec, std::uint64_t seed) {
  const auto data = sequential_market(spec, seed);
  const auto learner = prototype_utility(data.pool, data.test);
  const std::size_t n = data.pool.size();
  SequentialOutcome out;

  std::size_t widest = 0;
  for (const auto& g : data.rounds.groups()) widest = std::max(widest, g.size());
  ValuationReport ads_report;
  if (widest <= 8) {
    ads_report = within_round_values(data.rounds, learner);
  } else {
    McConfig cfg;
    cfg.epsilon = spec.epsilon;
    cfg.delta = spec.delta;
    cfg.seed = seed;
    ads_report = mc_within_round(data.rounds, learner, cfg);
  }
  out.values["ads"] = ads_report.values;
  out.values["loo"] = within_round_loo(data.rounds, learner).values;
  std::mt19937_64 rng(seed ^ 0x2545f4914f6cdd1dULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto& random_values = out.values["random"];
  for (std::size_t z = 0; z < n; ++z) random_values.push_back(unit(rng));
  out.round_residuals = ads_report.group_residuals;

  for (const auto& [method, values] : out.values) {
    out.auc[method] = detection_auc(values, data.noisy, data.rounds);
    out.detection[method] = detection_curve(values, data.noisy);
  }

  for (auto k : spec.topk) {
    for (const auto& [method, values] : out.values) {
      auto state = learner.initial_state();
      auto& curve = out.topk[method + "@" + std::to_string(k)];
      for (const auto& group : data.rounds.groups()) {
        std::vector<SourceIndex> ranked = group;
        std::stable_sort(ranked.begin(), ranked.end(),
                         [&](SourceIndex a, SourceIndex b) { return values[a] > values[b]; });
        ranked.resize(k);
        std::sort(ranked.begin(), ranked.end());
        state = learner.update(state, ranked);
        curve.push_back(learner.score(state));
      }
    }
  }
  auto state = learner.initial_state();
  auto& everyone = out.topk["all"];
  for (const auto& group : data.rounds.groups()) {
    state = learner.update(state, group);
    everyone.push_back(learner.score(state));
  }
  return out;
}

namespace {

template <typename Outcome, typename Fn>
std::vector<Outcome> over_seeds(const ScenarioSpec& spec, Fn&& fn) {
  std::vector<Outcome> outcomes(spec.seeds);
  parallel_for(spec.seeds, threads_from_env(), [&](std::size_t i) { outcomes[i] = fn(spec, run_seed(spec, i)); });
  return outcomes;
}

std::vector<double> index_axis(std::size_t count, double scale) {
  std::vector<double> x;
  for (std::size_t i = 1; i <= count; ++i) x.push_back(static_cast<double>(i) * scale);
  return x;
}

/// Mean and 95% half-width of a sample.
std::pair<double, double> mean_ci(const std::vector<double>& xs) {
  const double mean = mean_of(xs);
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : xs) ss += (v - mean) * (v - mean);
  const auto n = static_cast<double>(xs.size());
  return {mean, 1.96 * std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

ScenarioResult run_scenario(const ScenarioSpec& spec) {
  validate(spec);
  ScenarioResult result;
  result.scenario = spec.scenario;
  result.summary["seeds"] = static_cast<double>(spec.seeds);

  if (spec.scenario == "replication") {
    const auto runs = over_seeds<ReplicationOutcome>(spec, run_replication_seed);
    result.splits = {runs.front().ds, runs.front().ads};
    std::vector<double> ds_share, ads_share, broker;
    for (const auto& r : runs) {
      ds_share.push_back(r.ds.contributor_share());
      ads_share.push_back(r.ads.contributor_share());
      broker.push_back(std::abs(r.ads.broker));
    }
    result.summary["factor"] = spec.factor;
    result.summary["ds_contributor_share"] = mean_of(ds_share);
    result.summary["ads_contributor_share"] = mean_of(ads_share);
    result.summary["ads_broker_abs_max"] = *std::max_element(broker.begin(), broker.end());
    return result;
  }
  if (spec.scenario == "augmentation") {
    const auto runs = over_seeds<AugmentationOutcome>(spec, run_augmentation_seed);
    result.splits = runs.front().splits;
    std::vector<double> retained, broker_after, drift;
    for (const auto& r : runs) {
      retained.push_back(static_cast<double>(r.retained) / static_cast<double>(std::max<std::size_t>(1, r.generated)));
      broker_after.push_back(r.splits[2].broker);
      drift.push_back(std::abs(r.splits[2].contributors - r.splits[0].contributors));
    }
    result.summary["retained_fraction"] = mean_of(retained);
    result.summary["broker_total_retained"] = mean_of(broker_after);
    result.summary["contributor_total_drift_max"] = *std::max_element(drift.begin(), drift.end());
    return result;
  }
  if (spec.scenario == "intervention") {
    const auto runs = over_seeds<InterventionOutcome>(spec, run_intervention_seed);
    const auto& x = runs.front().fractions;
    for (const auto& [method, first] : runs.front().curves) {
      std::vector<std::vector<double>> per_seed;
      for (const auto& r : runs) per_seed.push_back(r.curves.at(method));
      result.curves.push_back(summarize(method, "relative-accuracy", x, per_seed));
    }
    for (const auto& c : result.curves) result.summary["mean_" + c.method] = mean_of(c.y);
    return result;
  }
  // sequential-noisy and topk share one pipeline.
  const auto runs = over_seeds<SequentialOutcome>(spec, run_sequential_seed);
  const std::size_t n = runs.front().values.at("ads").size();
  for (const auto& [method, first] : runs.front().detection) {
    std::vector<std::vector<double>> per_seed;
    for (const auto& r : runs) per_seed.push_back(r.detection.at(method));
    result.curves.push_back(summarize(method, "cumulative-noisy-share", index_axis(n, 1.0 / static_cast<double>(n)),
                                      per_seed));
  }
  for (const auto& [method, first] : runs.front().topk) {
    std::vector<std::vector<double>> per_seed;
    for (const auto& r : runs) per_seed.push_back(r.topk.at(method));
    result.curves.push_back(summarize(method, "topk-accuracy", index_axis(spec.rounds, 1.0), per_seed));
  }
  double ads_beats_loo = 0.0;
  double worst_residual = 0.0;
  for (const auto& [method, auc] : runs.front().auc) {
    std::vector<double> aucs;
    for (const auto& r : runs) aucs.push_back(r.auc.at(method));
    const auto [mean, ci] = mean_ci(aucs);
    result.summary["auc_" + method] = mean;
    result.summary["auc_" + method + "_ci"] = ci;
  }
  for (const auto& r : runs) {
    ads_beats_loo += r.auc.at("ads") > r.auc.at("loo") ? 1.0 : 0.0;
    for (double res : r.round_residuals) worst_residual = std::max(worst_residual, res);
  }
  result.summary["ads_beats_loo_share"] = ads_beats_loo / static_cast<double>(runs.size());
  result.summary["round_residual_max"] = worst_residual;
  return result;
}

}  // namespace ads
