#include "ads/io.hpp"

#include "ads/error.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace ads {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void parse_failure(const std::string& origin, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParseError, origin + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(std::string_view text, const std::string& origin, std::size_t line, const char* what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    parse_failure(origin, line, std::string("bad ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

template <typename T>
json optional_json(const std::optional<T>& value) {
  return value ? json(*value) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& doc, const char* key) {
  if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
  return doc.at(key).get<T>();
}

}  // namespace

DatasetFile parse_dataset(std::istream& in, const std::string& origin) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) parse_failure(origin, 1, "missing header");
  ++line_no;
  const auto header = split_fields(line);
  if (header.size() < 3 || header[0] != "instance_id" || header[1] != "source_id" || header[2] != "label") {
    parse_failure(origin, 1, "header must start with instance_id,source_id,label");
  }
  const std::size_t d = header.size() - 3;
  std::vector<std::string> ids;
  std::vector<int> labels;
  std::vector<double> values;
  DatasetFile out;
  std::unordered_map<std::string, bool> known_sources;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      parse_failure(origin, line_no,
                    "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) parse_failure(origin, line_no, "empty instance_id");
    ids.emplace_back(fields[0]);
    std::string source(fields[1]);
    if (source.empty()) parse_failure(origin, line_no, "empty source_id for instance " + ids.back());
    if (known_sources.emplace(source, true).second) out.source_order.push_back(source);
    out.source_of.push_back(std::move(source));
    labels.push_back(parse_number<int>(fields[2], origin, line_no, "label"));
    for (std::size_t j = 0; j < d; ++j) values.push_back(parse_number<double>(fields[3 + j], origin, line_no, "feature"));
  }
  FeatureMatrix features(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * d + j];
  }
  out.table = InstanceTable(std::move(ids), std::move(features), std::move(labels));
  return out;
}

DatasetFile read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return parse_dataset(in, path.string());
}

GroupsFile parse_groups(const json& doc) {
  GroupsFile out;
  try {
    const auto& groups = doc.at("groups");
    std::vector<std::pair<long long, std::vector<SourceId>>> indexed;
    for (const auto& g : groups) indexed.emplace_back(g.at("index").get<long long>(), g.at("source_ids").get<std::vector<SourceId>>());
    std::sort(indexed.begin(), indexed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t t = 0; t < indexed.size(); ++t) {
      if (indexed[t].first != static_cast<long long>(t + 1)) {
        throw Error(ErrorCode::kIndexOutOfRange, "group indices must be 1..T without gaps; found " +
                                                     std::to_string(indexed[t].first));
      }
      out.groups.push_back(std::move(indexed[t].second));
    }
    if (doc.contains("ownership")) {
      for (const auto& o : doc.at("ownership")) {
        const auto source = o.at("source_id").get<SourceId>();
        if (!out.ownership.emplace(source, o.at("contributor_id").get<ContributorId>()).second) {
          throw Error(ErrorCode::kParseError, "source " + source + " owned twice");
        }
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("groups document: ") + e.what());
  }
  return out;
}

GroupsFile read_groups(const std::filesystem::path& path) {
  const auto text = read_text(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  return parse_groups(doc);
}

json groups_to_json(const GroupsFile& groups) {
  json doc;
  doc["groups"] = json::array();
  for (std::size_t t = 0; t < groups.groups.size(); ++t) {
    doc["groups"].push_back({{"index", t + 1}, {"source_ids", groups.groups[t]}});
  }
  doc["ownership"] = json::array();
  for (const auto& [source, owner] : groups.ownership) {
    doc["ownership"].push_back({{"source_id", source}, {"contributor_id", owner}});
  }
  return doc;
}

SourcePool make_pool(const DatasetFile& data, const std::map<SourceId, ContributorId>& ownership) {
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<DataSource> sources;
  for (const auto& id : data.source_order) {
    auto it = ownership.find(id);
    if (it == ownership.end()) throw Error(ErrorCode::kUnownedSource, id);
    slot[id] = sources.size();
    sources.push_back({id, it->second, {}});
  }
  for (std::size_t i = 0; i < data.source_of.size(); ++i) sources[slot.at(data.source_of[i])].instances.push_back(i);
  return SourcePool(data.table, std::move(sources));
}

SourcePool make_pool(const DatasetFile& data) {
  std::map<SourceId, ContributorId> self;
  for (const auto& id : data.source_order) self[id] = id;
  return make_pool(data, self);
}

json report_to_json(const ValuationReport& report) {
  const auto& m = report.metadata;
  json doc;
  doc["method"] = report.method;
  doc["config"] = {{"utility", m.utility},
                   {"seed", optional_json(m.seed)},
                   {"samples", optional_json(m.samples)},
                   {"epsilon", optional_json(m.epsilon)},
                   {"delta", optional_json(m.delta)},
                   {"range_bound", optional_json(m.range_bound)},
                   {"k", optional_json(m.k)},
                   {"guarantee_void", m.guarantee_void},
                   {"utility_evaluations", optional_json(m.utility_evaluations)}};
  doc["sources"] = json::array();
  for (std::size_t z = 0; z < report.values.size(); ++z) {
    doc["sources"].push_back({{"id", report.source_ids[z]}, {"value", report.values[z]}});
  }
  doc["contributors"] = json::array();
  for (const auto& [id, value] : report.contributor_values) doc["contributors"].push_back({{"id", id}, {"value", value}});
  doc["checks"] = {{"group_residuals", report.group_residuals},
                   {"efficiency_residual", optional_json(report.efficiency_residual)}};
  if (m.wall_clock_seconds) doc["wall_clock_seconds"] = *m.wall_clock_seconds;
  return doc;
}

ValuationReport report_from_json(const json& doc) {
  ValuationReport r;
  try {
    r.method = doc.at("method").get<std::string>();
    const auto& c = doc.at("config");
    r.metadata.utility = c.at("utility").get<std::string>();
    r.metadata.seed = optional_from<std::uint64_t>(c, "seed");
    r.metadata.samples = optional_from<std::uint64_t>(c, "samples");
    r.metadata.epsilon = optional_from<double>(c, "epsilon");
    r.metadata.delta = optional_from<double>(c, "delta");
    r.metadata.range_bound = optional_from<double>(c, "range_bound");
    r.metadata.k = optional_from<int>(c, "k");
    r.metadata.guarantee_void = c.value("guarantee_void", false);
    r.metadata.utility_evaluations = optional_from<std::uint64_t>(c, "utility_evaluations");
    r.metadata.wall_clock_seconds = optional_from<double>(doc, "wall_clock_seconds");
    for (const auto& s : doc.at("sources")) {
      r.source_ids.push_back(s.at("id").get<std::string>());
      r.values.push_back(s.at("value").get<double>());
    }
    for (const auto& s : doc.at("contributors")) r.contributor_values[s.at("id").get<std::string>()] = s.at("value").get<double>();
    const auto& checks = doc.at("checks");
    r.group_residuals = checks.at("group_residuals").get<std::vector<double>>();
    r.efficiency_residual = optional_from<double>(checks, "efficiency_residual");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("report document: ") + e.what());
  }
  return r;
}

std::string dump_report(const ValuationReport& report) { return report_to_json(report).dump(2) + "\n"; }

ValuationReport read_report(const std::filesystem::path& path) {
  const auto text = read_text(path);
  try {
    return report_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

json scenario_to_json(const ScenarioResult& result) {
  json doc;
  doc["scenario"] = result.scenario;
  doc["summary"] = result.summary;
  doc["splits"] = json::array();
  for (const auto& s : result.splits) {
    doc["splits"].push_back({{"method", s.method},
                             {"stage", s.stage},
                             {"contributors", s.contributors},
                             {"broker", s.broker},
                             {"grand_total", s.grand()},
                             {"contributor_share", s.contributor_share()}});
  }
  doc["curves"] = json::array();
  for (const auto& c : result.curves) {
    doc["curves"].push_back({{"method", c.method}, {"metric", c.metric}, {"x", c.x}, {"y", c.y}, {"ci", c.ci}});
  }
  return doc;
}

std::string curves_csv(const std::vector<CurveSeries>& curves) {
  std::ostringstream out;
  out.precision(17);
  out << "method,metric,x,y,ci\n";
  for (const auto& c : curves) {
    for (std::size_t j = 0; j < c.x.size(); ++j) {
      out << c.method << ',' << c.metric << ',' << c.x[j] << ',' << c.y[j] << ',' << c.ci[j] << '\n';
    }
  }
  return out.str();
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace ads
