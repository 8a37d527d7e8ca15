#pragma once

#include <map>
#include <string>
#include <vector>

#include "lexc/config.hpp"
#include "lexc/report.hpp"

namespace lexc {

struct ExperimentInfo {
  ExperimentKind kind;
  // key=value pairs separated by ';' (see parse_features).
  std::string model_features;
  std::string verifies;
  std::string anchor;
};

const std::vector<ExperimentInfo>& experiment_table();
// Tab separated with a header row.
std::string format_experiment_table();
// Throws ConfigError on malformed text.
std::map<std::string, std::string> parse_features(const std::string& text);

// Validates, runs and returns the report. Nothing is written to disk.
Report run_experiment(const ExperimentConfig& config);

Report run_closed_forms(const ExperimentConfig& config);
Report run_scalefn(const ExperimentConfig& config);
Report run_brownian_baseline(const ExperimentConfig& config);
Report run_arcsine(const ExperimentConfig& config);
Report run_meander(const ExperimentConfig& config);
Report run_height_tail(const ExperimentConfig& config);
Report run_equivalence(const ExperimentConfig& config);
Report run_big_jump(const ExperimentConfig& config);
Report run_drift_profile(const ExperimentConfig& config);
Report run_conditioned_start(const ExperimentConfig& config);

// Shared by the experiment files.
namespace detail {

Json config_inputs(const ExperimentConfig& config);
CsvTable ecdf_pair_table(std::vector<double> a, std::vector<double> b);
CsvTable ecdf_vs_cdf_table(std::vector<double> a, const std::function<double(double)>& cdf);
CsvTable qq_table(std::vector<double> a, std::vector<double> b, std::size_t points = 99);

}  // namespace detail

}  // namespace lexc
