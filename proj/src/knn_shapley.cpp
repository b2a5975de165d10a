#include "ads/knn_shapley.hpp"

#include "ads/error.hpp"
#include "ads/exact.hpp"
#include "ads/parallel.hpp"
#include "ads/summation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace ads {
namespace {

constexpr std::size_t kExactBinomialLimit = 60;
constexpr std::size_t kTestBlock = 16;

/// Pascal triangle up to kExactBinomialLimit; every entry fits in uint64.
const std::vector<std::vector<std::uint64_t>>& pascal() {
  static const auto table = [] {
    std::vector<std::vector<std::uint64_t>> rows(kExactBinomialLimit + 1);
    for (std::size_t n = 0; n <= kExactBinomialLimit; ++n) {
      rows[n].assign(n + 1, 1);
      for (std::size_t k = 1; k < n; ++k) rows[n][k] = rows[n - 1][k - 1] + rows[n - 1][k];
    }
    return rows;
  }();
  return table;
}

long double exact_binomial(long long n, long long k) {
  if (n < 0 || k < 0 || k > n) return 0.0L;
  return static_cast<long double>(pascal()[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)]);
}

double log_binomial(double n, double k) { return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1); }

/// sum_{s=u}^{m-2} C(s,u) C(m-2-s, i-1-u) / C(m-2, i-1).
double hypergeometric_tail(std::size_t m, std::size_t i, std::size_t u) {
  const long long top = static_cast<long long>(m) - 2;
  const long long pick = static_cast<long long>(i) - 1;
  const long long uu = static_cast<long long>(u);
  if (uu > pick || top < 0) return 0.0;
  if (static_cast<std::size_t>(top) <= kExactBinomialLimit) {
    const long double denom = exact_binomial(top, pick);
    long double sum = 0.0L;
    for (long long s = uu; s <= top; ++s) sum += exact_binomial(s, uu) * exact_binomial(top - s, pick - uu);
    return static_cast<double>(sum / denom);
  }
  // First term from log-space binomials, the rest by the term ratio in s.
  double term = std::exp(log_binomial(static_cast<double>(top - uu), static_cast<double>(pick - uu)) -
                         log_binomial(static_cast<double>(top), static_cast<double>(pick)));
  CompensatedSum sum;
  for (long long s = uu; s <= top; ++s) {
    sum.add(term);
    const long long rest = top - s;          // m-2-s
    const long long need = pick - uu;        // i-1-u
    if (rest - need <= 0 || rest == 0) break;
    term *= static_cast<double>(s + 1) / static_cast<double>(s + 1 - uu) *
            static_cast<double>(rest - need) / static_cast<double>(rest);
  }
  return sum.value();
}

double match(std::span<const int> labels, std::size_t position, int y_test) {
  return position < labels.size() && labels[position] == y_test ? 1.0 : 0.0;
}

/// 1[label of the j-th nearest (1-based) in P_t matches]; 0 if it does not exist.
double prior_match(const NeighborRanking& ranking, std::span<const int> prior_labels, long long j, int y_test) {
  if (j < 1 || static_cast<std::size_t>(j) > ranking.prior_size) return 0.0;
  return match(prior_labels, static_cast<std::size_t>(j - 1), y_test);
}

/// Displacement sum shared by cases 3 and 4:
/// 1/(m-1) sum_s sum_{u=lo}^{min(hi,s)} H(s,u) (1[y_i] - 1[y_{P,K-u}]) / K.
double displacement_sum(std::size_t m, std::size_t i, long long lo, long long hi, double match_i,
                        const NeighborRanking& ranking, std::span<const int> prior_labels, int k, int y_test) {
  CompensatedSum total;
  const long long cap = std::min<long long>(hi, static_cast<long long>(i) - 1);
  for (long long u = std::max<long long>(lo, 0); u <= cap; ++u) {
    const double weight = hypergeometric_tail(m, i, static_cast<std::size_t>(u));
    total.add(weight * (match_i - prior_match(ranking, prior_labels, k - u, y_test)));
  }
  return total.value() / (static_cast<double>(m - 1) * static_cast<double>(k));
}

}  // namespace

NeighborRanking precedence_counts(const InstanceTable& table, std::span<const InstanceIndex> prior,
                                  std::span<const InstanceIndex> current, const Instance& test, const KnnConfig& cfg) {
  if (table.size() > 0 && table.dim() != test.features.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "training dimension " + std::to_string(table.dim()) +
                                                   " vs test dimension " + std::to_string(test.features.size()));
  }
  struct Entry {
    NeighborKey key;
    bool is_current;
    std::size_t position;
  };
  std::vector<Entry> entries;
  entries.reserve(prior.size() + current.size());
  const Eigen::RowVectorXd query = test.features.transpose();
  for (std::size_t p = 0; p < prior.size(); ++p) {
    const auto i = prior[p];
    entries.push_back({{rank_distance(table.row(i), query, cfg.metric), table.id_rank()[i], p}, false, p});
  }
  for (std::size_t p = 0; p < current.size(); ++p) {
    const auto i = current[p];
    entries.push_back(
        {{rank_distance(table.row(i), query, cfg.metric), table.id_rank()[i], prior.size() + p}, true, p});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.key < b.key; });
  NeighborRanking ranking;
  ranking.prior_size = prior.size();
  std::size_t seen_prior = 0;
  for (const auto& e : entries) {
    if (e.is_current) {
      ranking.current.push_back(e.position);
      ranking.counts.push_back(seen_prior);
    } else {
      ranking.prior.push_back(e.position);
      ++seen_prior;
    }
  }
  return ranking;
}

BaseBranch classify_base(std::size_t c_max, std::size_t prior_size, int k) {
  const auto K = static_cast<std::size_t>(k);
  if (K <= c_max) return BaseBranch::kOutOfReach;
  return prior_size == c_max ? BaseBranch::kPriorExhausted : BaseBranch::kPriorDisplaced;
}

StepCase classify_step(std::size_t c_i, std::size_t c_next, int k) {
  const auto K = static_cast<std::size_t>(k);
  if (K <= c_i) return StepCase::kBeyondK;
  if (c_next == c_i) return StepCase::kEqualCounts;
  if (K > c_next) return StepCase::kIncreasingBelowK;
  return StepCase::kCrossingK;
}

double knn_ads_base_value(const NeighborRanking& ranking, std::span<const int> current_labels,
                          std::span<const int> prior_labels, int k, int y_test) {
  const std::size_t m = ranking.current.size();
  if (m == 0) throw Error(ErrorCode::kIndexOutOfRange, "empty group has no base value");
  const std::size_t c_max = ranking.counts[m - 1];
  const double scale = static_cast<double>(k) * static_cast<double>(m);
  const double farthest = match(current_labels, m - 1, y_test);
  const auto branch = classify_base(c_max, ranking.prior_size, k);
  if (branch == BaseBranch::kOutOfReach) return 0.0;
  // q_max is in the top K for the subset sizes s < K - c_max; a group smaller
  // than K - c_max caps that range at m.
  const long long reach = std::min<long long>(k - static_cast<long long>(c_max), static_cast<long long>(m));
  const double entering = static_cast<double>(reach) / scale * farthest;
  if (branch == BaseBranch::kPriorExhausted) return entering;
  double displaced = 0.0;
  for (long long s = 0; s < reach; ++s) displaced += prior_match(ranking, prior_labels, k - s, y_test);
  return entering - displaced / scale;
}

double knn_ads_step(std::size_t i, const NeighborRanking& ranking, std::span<const int> current_labels,
                    std::span<const int> prior_labels, int k, int y_test, double value_next) {
  const std::size_t m = ranking.current.size();
  if (i < 1 || i >= m) throw Error(ErrorCode::kIndexOutOfRange, "step index " + std::to_string(i));
  const std::size_t c_i = ranking.counts[i - 1];
  const std::size_t c_next = ranking.counts[i];
  const double K = static_cast<double>(k);
  const double match_i = match(current_labels, i - 1, y_test);
  const double match_next = match(current_labels, i, y_test);
  const double id = static_cast<double>(i);
  const auto ki = static_cast<long long>(k);
  double diff = 0.0;
  switch (classify_step(c_i, c_next, k)) {
    case StepCase::kBeyondK:
      diff = 0.0;
      break;
    case StepCase::kEqualCounts:
      diff = (match_i - match_next) / K * std::min(K - static_cast<double>(c_i), id) / id;
      break;
    case StepCase::kIncreasingBelowK:
      diff = (match_i - match_next) / K * std::min(K - static_cast<double>(c_next), id) / id +
             displacement_sum(m, i, ki - static_cast<long long>(c_next), ki - static_cast<long long>(c_i) - 1,
                              match_i, ranking, prior_labels, k, y_test);
      break;
    case StepCase::kCrossingK:
      diff = displacement_sum(m, i, 0, ki - static_cast<long long>(c_i) - 1, match_i, ranking, prior_labels, k,
                              y_test);
      break;
  }
  return value_next + diff;
}

std::vector<Occurrence> occurrences_of(const SourcePool& pool) {
  std::vector<Occurrence> out;
  for (SourceIndex z = 0; z < pool.size(); ++z) {
    for (auto i : pool.source(z).instances) out.push_back({z, i});
  }
  return out;
}

namespace {

/// Fenwick tree over group positions.
class GroupCounter {
 public:
  explicit GroupCounter(std::size_t groups) : tree_(groups + 1, 0) {}
  void add(std::size_t group) {
    for (std::size_t j = group + 1; j < tree_.size(); j += j & (~j + 1)) ++tree_[j];
  }
  /// Number of recorded entries in groups [0, group).
  std::size_t before(std::size_t group) const {
    std::size_t total = 0;
    for (std::size_t j = group; j > 0; j -= j & (~j + 1)) total += tree_[j];
    return total;
  }

 private:
  std::vector<std::size_t> tree_;
};

InstanceValuation per_test_point(const OrderedGroups& groups, const SourcePool& pool, const Instance& test,
                                 const KnnConfig& cfg, KnnCaseCounts* tally) {
  if (cfg.k < 1) throw Error(ErrorCode::kInvalidTolerance, "K must be >= 1");
  const auto& table = pool.instances();
  if (table.size() > 0 && table.dim() != test.features.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "training dimension " + std::to_string(table.dim()) +
                                                   " vs test dimension " + std::to_string(test.features.size()));
  }
  if (groups.source_count() != pool.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "groups cover " + std::to_string(groups.source_count()) +
                                                   " sources, pool has " + std::to_string(pool.size()));
  }
  InstanceValuation out;
  out.occurrences = occurrences_of(pool);
  const std::size_t n = out.occurrences.size();
  out.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));

  const Eigen::RowVectorXd query = test.features.transpose();
  std::vector<NeighborKey> keys(n);
  for (std::size_t o = 0; o < n; ++o) {
    const auto i = out.occurrences[o].instance;
    keys[o] = NeighborKey{rank_distance(table.row(i), query, cfg.metric), table.id_rank()[i], o};
  }
  std::sort(keys.begin(), keys.end());
  std::vector<std::size_t> order(n);
  for (std::size_t r = 0; r < n; ++r) order[r] = keys[r].occurrence;

  const std::size_t T = groups.group_count();
  const auto K = static_cast<std::size_t>(cfg.k);
  std::vector<NeighborRanking> rankings(T);
  std::vector<std::vector<std::size_t>> heads(T);  // first K members of each group, rank order
  GroupCounter counter(T);
  for (auto o : order) {
    const std::size_t g = groups.group_number(out.occurrences[o].source) - 1;
    rankings[g].current.push_back(o);
    rankings[g].counts.push_back(counter.before(g));
    if (heads[g].size() < K) heads[g].push_back(o);
    counter.add(g);
  }
  // P_t's first K: merge of the previous prior head with group t-1's head.
  std::vector<std::size_t> prior_head;
  std::size_t prior_size = 0;
  std::vector<std::size_t> rank_of(n);
  for (std::size_t r = 0; r < n; ++r) rank_of[order[r]] = r;
  for (std::size_t t = 0; t < T; ++t) {
    rankings[t].prior = prior_head;
    rankings[t].prior_size = prior_size;
    std::vector<std::size_t> merged;
    std::merge(prior_head.begin(), prior_head.end(), heads[t].begin(), heads[t].end(), std::back_inserter(merged),
               [&](std::size_t a, std::size_t b) { return rank_of[a] < rank_of[b]; });
    if (merged.size() > K) merged.resize(K);
    prior_head = std::move(merged);
    prior_size += rankings[t].current.size();
  }

  std::vector<int> current_labels;
  std::vector<int> prior_labels;
  for (std::size_t t = 0; t < T; ++t) {
    const auto& ranking = rankings[t];
    const std::size_t m = ranking.current.size();
    if (m == 0) continue;
    current_labels.clear();
    prior_labels.clear();
    for (auto o : ranking.current) current_labels.push_back(table.label(out.occurrences[o].instance));
    for (auto o : ranking.prior) prior_labels.push_back(table.label(out.occurrences[o].instance));

    double value = knn_ads_base_value(ranking, current_labels, prior_labels, cfg.k, test.label);
    if (tally) ++tally->base[static_cast<int>(classify_base(ranking.counts[m - 1], ranking.prior_size, cfg.k))];
    out.values[static_cast<Eigen::Index>(ranking.current[m - 1])] = value;
    for (std::size_t i = m - 1; i >= 1; --i) {
      value = knn_ads_step(i, ranking, current_labels, prior_labels, cfg.k, test.label, value);
      if (tally) ++tally->step[static_cast<int>(classify_step(ranking.counts[i - 1], ranking.counts[i], cfg.k))];
      out.values[static_cast<Eigen::Index>(ranking.current[i - 1])] = value;
    }
  }
  return out;
}

}  // namespace

InstanceValuation knn_ads_per_test_point(const OrderedGroups& groups, const SourcePool& pool, const Instance& test,
                                         const KnnConfig& cfg) {
  return per_test_point(groups, pool, test, cfg, nullptr);
}

InstanceValuation knn_ads_per_test_point(const OrderedGroups& groups, const SourcePool& pool, const Instance& test,
                                         const KnnConfig& cfg, KnnCaseCounts& counts) {
  return per_test_point(groups, pool, test, cfg, &counts);
}

InstanceValuation knn_ads_instances(const OrderedGroups& groups, const SourcePool& pool,
                                    const InstanceTable& test_set, const KnnConfig& cfg, std::size_t threads) {
  if (test_set.size() == 0) throw Error(ErrorCode::kDimensionMismatch, "KNN-ADS needs a non-empty test set");
  InstanceValuation out;
  out.occurrences = occurrences_of(pool);
  const auto n = static_cast<Eigen::Index>(out.occurrences.size());
  const std::size_t blocks = (test_set.size() + kTestBlock - 1) / kTestBlock;
  std::vector<Eigen::VectorXd> partial(blocks, Eigen::VectorXd::Zero(n));
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t end = std::min(test_set.size(), (b + 1) * kTestBlock);
    for (std::size_t q = b * kTestBlock; q < end; ++q) {
      partial[b] += per_test_point(groups, pool, test_set.instance(q), cfg, nullptr).values;
    }
  });
  out.values = Eigen::VectorXd::Zero(n);
  for (const auto& p : partial) out.values += p;
  out.values /= static_cast<double>(test_set.size());
  return out;
}

ValuationReport knn_ads(const OrderedGroups& groups, const SourcePool& pool, const InstanceTable& test_set,
                        const KnnConfig& cfg, std::size_t threads, const std::map<SourceId, ContributorId>* ownership) {
  const auto instances = knn_ads_instances(groups, pool, test_set, cfg, threads);
  std::vector<double> values(pool.size(), 0.0);
  for (std::size_t o = 0; o < instances.occurrences.size(); ++o) {
    values[instances.occurrences[o].source] += instances.values[static_cast<Eigen::Index>(o)];
  }
  auto report = make_report("knn", std::move(values));
  report.source_ids = pool.source_ids();
  report = aggregate_contributors(std::move(report), ownership ? *ownership : ownership_of(pool));
  KnnConfig fixed = cfg;
  fixed.normalization = KnnNormalization::kFixed;
  KnnUtility utility(pool, test_set, fixed);
  report.metadata.utility = utility.tag();
  report.metadata.k = cfg.k;
  report.group_residuals = verify_group_efficiency(report, groups, utility);
  report.efficiency_residual = verify_efficiency(report, utility);
  return report;
}

}  // namespace ads
