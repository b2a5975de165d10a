#pragma once

#include "ads/dataset.hpp"
#include "ads/report.hpp"
#include "ads/scenarios.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ads {

/// Rows of `instance_id,source_id,label,f1..fd`. Sources appear in order of
/// first mention.
struct DatasetFile {
  InstanceTable table;
  std::vector<SourceId> source_order;
  std::vector<SourceId> source_of;  // per instance
};

DatasetFile parse_dataset(std::istream& in, const std::string& origin = "<stream>");
DatasetFile read_dataset(const std::filesystem::path& path);

/// Ordered groups by source id plus source ownership.
struct GroupsFile {
  std::vector<std::vector<SourceId>> groups;
  std::map<SourceId, ContributorId> ownership;
};

GroupsFile parse_groups(const nlohmann::json& doc);
GroupsFile read_groups(const std::filesystem::path& path);
nlohmann::json groups_to_json(const GroupsFile& groups);

/// Builds the pool; every source must appear in `ownership` (UnownedSource).
SourcePool make_pool(const DatasetFile& data, const std::map<SourceId, ContributorId>& ownership);
/// Pool whose contributors are the source ids themselves.
SourcePool make_pool(const DatasetFile& data);

nlohmann::json report_to_json(const ValuationReport& report);
ValuationReport report_from_json(const nlohmann::json& doc);
std::string dump_report(const ValuationReport& report);
ValuationReport read_report(const std::filesystem::path& path);

nlohmann::json scenario_to_json(const ScenarioResult& result);
/// Flat `method,metric,x,y,ci` table.
std::string curves_csv(const std::vector<CurveSeries>& curves);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ads
