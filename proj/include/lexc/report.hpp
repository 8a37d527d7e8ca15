#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace lexc {

using Json = nlohmann::json;

// One pass/fail line. `oracle` names the reference quantity and `anchor`
// the statement it checks.
struct Criterion {
  std::string id;
  std::string description;
  std::string oracle;
  std::string anchor;
  double estimate = 0.0;
  double lower = 0.0;  // acceptance band
  double upper = 0.0;
  bool pass = false;
  // Informational lines are reported but do not affect the exit status.
  bool gated = true;
  Json detail = Json::object();

  static Criterion band(std::string id, std::string description, std::string oracle,
                        std::string anchor, double estimate, double lower, double upper);
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) { rows.push_back(std::move(row)); }
};

struct Report {
  std::string experiment;
  Json inputs = Json::object();
  Json estimates = Json::object();
  std::vector<Criterion> criteria;
  std::map<std::string, CsvTable> tables;  // file stem -> table

  bool all_pass() const;
  Json summary() const;
};

struct Manifest {
  std::uint64_t seed = 0;
  std::uint32_t shards = 1;
  std::string git_describe;
  double wall_seconds = 0.0;
  std::string experiment;
  std::string config_text;
};

std::string git_describe();

// JSON text with sorted keys, two-space indent and a trailing newline.
std::string dump_json(const Json& j);
std::string csv_text(const CsvTable& table);

// Writes summary.json, manifest.json, config.ini and <stem>.csv files into
// `dir` (created if missing).
void write_report(const Report& report, const Manifest& manifest, const std::string& dir);

// PASS/FAIL lines for a terminal.
std::string format_criteria(const Report& report);

}  // namespace lexc
