#include "lexc/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "lexc/errors.hpp"

#ifndef LEXC_GIT_DESCRIBE
#define LEXC_GIT_DESCRIBE "unknown"
#endif

namespace lexc {

namespace {

Json number(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

Criterion Criterion::band(std::string id, std::string description, std::string oracle,
                          std::string anchor, double estimate, double lower, double upper) {
  Criterion c;
  c.id = std::move(id);
  c.description = std::move(description);
  c.oracle = std::move(oracle);
  c.anchor = std::move(anchor);
  c.estimate = estimate;
  c.lower = lower;
  c.upper = upper;
  c.pass = std::isfinite(estimate) && estimate >= lower && estimate <= upper;
  return c;
}

bool Report::all_pass() const {
  for (const auto& c : criteria) {
    if (c.gated && !c.pass) return false;
  }
  return true;
}

Json Report::summary() const {
  Json lines = Json::array();
  for (const auto& c : criteria) {
    lines.push_back({{"id", c.id},
                     {"description", c.description},
                     {"oracle", c.oracle},
                     {"anchor", c.anchor},
                     {"estimate", number(c.estimate)},
                     {"lower", number(c.lower)},
                     {"upper", number(c.upper)},
                     {"pass", c.pass},
                     {"gated", c.gated},
                     {"detail", c.detail}});
  }
  return {{"experiment", experiment},
          {"inputs", inputs},
          {"estimates", estimates},
          {"criteria", lines},
          {"all_pass", all_pass()}};
}

std::string git_describe() { return LEXC_GIT_DESCRIBE; }

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string csv_text(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw ContractViolation("csv_text: row width does not match the header");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += fmt::format("{:.17g}", row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_report(const Report& report, const Manifest& manifest, const std::string& dir) {
  const std::filesystem::path root(dir);
  std::filesystem::create_directories(root);
  write_file(root / "summary.json", dump_json(report.summary()));
  const Json m = {{"seed", manifest.seed},
                  {"shards", manifest.shards},
                  {"git_describe", manifest.git_describe},
                  {"wall_seconds", manifest.wall_seconds},
                  {"experiment", manifest.experiment},
                  {"outputs", [&] {
                     Json files = Json::array({"summary.json", "config.ini"});
                     for (const auto& [stem, _] : report.tables) files.push_back(stem + ".csv");
                     return files;
                   }()}};
  write_file(root / "manifest.json", dump_json(m));
  if (!manifest.config_text.empty()) write_file(root / "config.ini", manifest.config_text);
  for (const auto& [stem, table] : report.tables) write_file(root / (stem + ".csv"), csv_text(table));
}

std::string format_criteria(const Report& report) {
  std::string out;
  for (const auto& c : report.criteria) {
    const char* tag = !c.gated ? "INFO" : c.pass ? "PASS" : "FAIL";
    out += fmt::format("{} {} {}: estimate={:.6g} band=[{:.6g}, {:.6g}] oracle={}{}\n", tag,
                       report.experiment, c.id, c.estimate, c.lower, c.upper, c.oracle,
                       c.gated ? "" : (c.pass ? " (in band, not gated)" : " (outside band, not gated)"));
  }
  return out;
}

}  // namespace lexc
