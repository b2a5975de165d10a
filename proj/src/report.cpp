#include "ads/report.hpp"

#include "ads/error.hpp"
#include "ads/summation.hpp"

namespace ads {

double ValuationReport::value_of(const SourceId& id) const {
  for (std::size_t z = 0; z < source_ids.size(); ++z) {
    if (source_ids[z] == id) return values[z];
  }
  throw Error(ErrorCode::kUnknownSource, id);
}

double ValuationReport::total() const {
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  return sum.value();
}

ValuationReport make_report(std::string method, std::vector<double> values) {
  ValuationReport report;
  report.method = std::move(method);
  report.source_ids.reserve(values.size());
  for (std::size_t z = 0; z < values.size(); ++z) report.source_ids.push_back(std::to_string(z));
  report.values = std::move(values);
  return report;
}

ValuationReport attach_pool(ValuationReport report, const SourcePool& pool) {
  if (report.values.size() != pool.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "report has " + std::to_string(report.values.size()) +
                                                   " values for " + std::to_string(pool.size()) + " sources");
  }
  report.source_ids = pool.source_ids();
  return aggregate_contributors(std::move(report), ownership_of(pool));
}

ValuationReport aggregate_contributors(ValuationReport report, const std::map<SourceId, ContributorId>& ownership,
                                       const std::vector<ContributorId>& contributors) {
  std::map<ContributorId, CompensatedSum> sums;
  for (const auto& c : contributors) sums[c];
  for (std::size_t z = 0; z < report.source_ids.size(); ++z) {
    auto it = ownership.find(report.source_ids[z]);
    if (it == ownership.end()) throw Error(ErrorCode::kUnownedSource, report.source_ids[z]);
    sums[it->second].add(report.values[z]);
  }
  report.contributor_values.clear();
  for (const auto& [c, s] : sums) report.contributor_values[c] = s.value();
  return report;
}

std::map<SourceId, ContributorId> ownership_of(const SourcePool& pool) {
  std::map<SourceId, ContributorId> out;
  for (const auto& s : pool.sources()) out[s.id] = s.contributor;
  return out;
}

}  // namespace ads
