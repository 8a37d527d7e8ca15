#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lexc/config.hpp"
#include "lexc/errors.hpp"
#include "lexc/excursion.hpp"
#include "lexc/experiments.hpp"
#include "lexc/levy_model.hpp"
#include "lexc/pathsim.hpp"
#include "lexc/report.hpp"
#include "lexc/scalefn.hpp"

namespace py = pybind11;

namespace {

lexc::ExperimentConfig config_from_text(const std::string& text) {
  std::istringstream is(text);
  return lexc::parse_config(is);
}

const lexc::ProcessSpec& require_model(const lexc::ExperimentConfig& c) {
  if (!c.model) throw lexc::ConfigError("config has no [model] section");
  return *c.model;
}

}  // namespace

PYBIND11_MODULE(_lexc, m) {
  m.doc() = "Excursion experiments for Levy processes";

  py::register_exception<lexc::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<lexc::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<lexc::InsufficientDataError>(m, "InsufficientDataError", PyExc_RuntimeError);
  py::register_exception<lexc::UnsupportedError>(m, "UnsupportedError", PyExc_RuntimeError);

  m.def("git_describe", &lexc::git_describe);
  m.def("experiment_kinds", [] {
    std::vector<std::string> out;
    for (auto k : lexc::all_experiment_kinds()) out.push_back(lexc::to_string(k));
    return out;
  });
  m.def("experiment_table", &lexc::format_experiment_table);

  m.def("stable_lifetime_tail", &lexc::stable_lifetime_tail, py::arg("t"), py::arg("rho"));
  m.def("stable_height_tail", &lexc::stable_height_tail, py::arg("x"), py::arg("alpha"));
  m.def("height_lifetime_ratio_constant", &lexc::height_lifetime_ratio_constant, py::arg("alpha"));
  m.def("stable_scale_function", &lexc::stable_scale_function, py::arg("x"), py::arg("alpha"));
  m.def("pareto_limit_cdf", &lexc::pareto_limit_cdf, py::arg("x"), py::arg("beta"), py::arg("theta"));

  m.def(
      "normalize_config", [](const std::string& text) { return lexc::serialize(config_from_text(text)); },
      py::arg("ini_text"), "Parse INI text and return its canonical form.");

  m.def(
      "run_experiment",
      [](const std::string& text, std::optional<std::uint64_t> seed, std::optional<std::uint32_t> shards) {
        auto c = config_from_text(text);
        if (seed) c.seed = *seed;
        if (shards) c.shards = *shards;
        lexc::Report r;
        {
          py::gil_scoped_release release;
          r = lexc::run_experiment(c);
        }
        return lexc::dump_json(r.summary());
      },
      py::arg("ini_text"), py::arg("seed") = py::none(), py::arg("shards") = py::none(),
      "Run an experiment from INI text; returns the summary as JSON text.");

  m.def(
      "simulate",
      [](const std::string& text, double horizon, double dt, double x0, std::uint64_t seed, std::uint32_t stream) {
        const auto c = config_from_text(text);
        lexc::RngStream rng(seed, 0, stream);
        const auto path = lexc::simulate(require_model(c), horizon, dt, x0, rng);
        std::vector<std::pair<std::size_t, double>> jumps;
        for (const auto& j : path.jumps) jumps.emplace_back(j.index, j.size);
        return py::make_tuple(path.times, path.values, jumps);
      },
      py::arg("ini_text"), py::arg("horizon"), py::arg("dt"), py::arg("x0") = 0.0, py::arg("seed") = 0,
      py::arg("stream") = 0, "Simulate one path of the configured model: (times, values, [(index, size)]).");

  m.def(
      "excursions",
      [](std::vector<double> times, std::vector<double> values, double min_lifetime, double zero_tol) {
        lexc::Path path;
        path.times = std::move(times);
        path.values = std::move(values);
        if (path.times.size() != path.values.size()) throw lexc::ConfigError("times and values differ in length");
        const auto ens = lexc::decompose_excursions(path, zero_tol, min_lifetime);
        std::vector<std::tuple<double, double, double>> out;
        for (const auto& e : ens.excursions) out.emplace_back(e.start_time, e.lifetime, e.height);
        return out;
      },
      py::arg("times"), py::arg("values"), py::arg("min_lifetime") = 0.0, py::arg("zero_tol") = 0.0,
      "Closed excursions of X - inf X: [(start, lifetime, height)].");

  m.def(
      "scale_function",
      [](const std::string& text, std::vector<double> x, int order) {
        const auto c = config_from_text(text);
        lexc::ScaleFunctionOptions opt;
        opt.order = order;
        return lexc::scale_function(require_model(c), x, opt).w;
      },
      py::arg("ini_text"), py::arg("x"), py::arg("order") = 14);
}
