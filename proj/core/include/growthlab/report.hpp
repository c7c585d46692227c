#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace growthlab {

/// Scenario outcome plus the evidence needed to recompute the verdict
/// offline. Everything except `meta` is deterministic for a fixed config and
/// seed; `meta` (timestamp, runtime) is excluded from byte comparisons.
struct Report {
  std::string id;
  std::string kind;
  std::string verdict;  // "pass" | "fail" | "inapplicable"
  long seed = 0;
  nlohmann::ordered_json environment = nlohmann::ordered_json::object();
  nlohmann::ordered_json measured = nlohmann::ordered_json::object();
  nlohmann::ordered_json expected = nlohmann::ordered_json::object();
  nlohmann::ordered_json tolerances = nlohmann::ordered_json::object();
  nlohmann::ordered_json exclusions = nlohmann::ordered_json::object();
  nlohmann::ordered_json clauses = nlohmann::ordered_json::array();
  std::vector<std::string> notes;
  /// Evidence tables: (basename, CSV content); written next to the report.
  std::vector<std::pair<std::string, std::string>> evidence;
  double runtime_seconds = 0.0;
  std::string timestamp;

  bool passed() const { return verdict == "pass"; }

  nlohmann::ordered_json to_json(bool include_meta = true) const;
};

/// CSV assembly with a fixed header row.
std::string make_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

/// Atomic file write (temp + rename).
void write_file_atomic(const std::string& path, const std::string& content);

/// Serialize and write `report.id + ".json"` plus evidence CSVs under dir.
void write_report(const Report& report, const std::string& dir);

}  // namespace growthlab
