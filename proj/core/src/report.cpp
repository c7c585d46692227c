#include "growthlab/report.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <filesystem>

namespace growthlab {

nlohmann::ordered_json Report::to_json(bool include_meta) const {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["id"] = id;
  j["kind"] = kind;
  j["verdict"] = verdict;
  j["seed"] = seed;
  j["environment"] = environment;
  j["measured"] = measured;
  j["expected"] = expected;
  j["tolerances"] = tolerances;
  j["exclusions"] = exclusions;
  j["clauses"] = clauses;
  j["notes"] = notes;
  nlohmann::ordered_json ev = nlohmann::ordered_json::array();
  for (const auto& [name, _] : evidence) ev.push_back(name);
  j["evidence_files"] = ev;
  if (include_meta) {
    nlohmann::ordered_json meta;
    meta["timestamp"] = timestamp;
    meta["runtime_seconds"] = runtime_seconds;
    j["meta"] = meta;
  }
  return j;
}

std::string make_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) os << ",";
    os << header[i];
  }
  os << "\n";
  char buf[64];
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("make_csv: row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      os << buf;
    }
    os << "\n";
  }
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void write_report(const Report& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir + "/" + report.id + ".json", report.to_json(true).dump(2) + "\n");
  for (const auto& [name, csv] : report.evidence)
    write_file_atomic(dir + "/" + report.id + "." + name + ".csv", csv);
}

}  // namespace growthlab
