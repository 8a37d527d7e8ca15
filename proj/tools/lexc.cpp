// lexc: run excursion experiments from INI configs.
//
//   lexc run --config exp.ini [--seed N] [--shards N] [--out DIR] [--dump-paths]
//   lexc list-experiments
//   lexc scalefn --config exp.ini [--out DIR]
//   lexc simulate --config exp.ini [--seed N] [--shards N] [--out DIR] [--dump-paths]
//
// Exit status: 0 all criteria pass, 1 some criterion failed, 2 bad config or
// usage, 3 insufficient data or other runtime failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "lexc/config.hpp"
#include "lexc/errors.hpp"
#include "lexc/excursion.hpp"
#include "lexc/experiments.hpp"
#include "lexc/pathsim.hpp"
#include "lexc/report.hpp"
#include "lexc/scalefn.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> shards;
  std::optional<std::string> out;
  bool dump_paths = false;
};

lexc::ExperimentConfig load(const Overrides& o) {
  auto c = lexc::load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.shards) c.shards = *o.shards;
  if (o.out) c.out_dir = *o.out;
  return c;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void dump_paths(const lexc::ExperimentConfig& c, const std::filesystem::path& dir) {
  if (!c.model) return;
  std::filesystem::create_directories(dir);
  const std::size_t count = std::min<std::size_t>(c.param_count("dump_count", 3), c.budget.replicas);
  const double horizon = std::min(c.budget.horizon, c.param("dump_horizon", c.budget.horizon));
  for (std::size_t i = 0; i < count; ++i) {
    // replica i of a natural run: shard i % shards, stream i / shards
    const auto shard = static_cast<std::uint32_t>(i % c.shards);
    const auto local = static_cast<std::uint32_t>(i / c.shards);
    lexc::RngStream rng(c.seed, shard, local);
    const auto path = lexc::simulate(*c.model, horizon, c.budget.dt, 0.0, rng);
    const auto sub = dir / lexc::to_string(c.kind) / fmt::format("shard_{:04d}", shard);
    std::filesystem::create_directories(sub);
    std::ofstream out(sub / fmt::format("replica_{:06d}.csv", i), std::ios::binary);
    lexc::write_path_csv(path, out);
  }
}

int cmd_run(const Overrides& o) {
  const auto c = load(o);
  const auto started = std::chrono::steady_clock::now();
  const auto report = lexc::run_experiment(c);
  lexc::Manifest m;
  m.seed = c.seed;
  m.shards = c.shards;
  m.git_describe = lexc::git_describe();
  m.experiment = lexc::to_string(c.kind);
  m.config_text = lexc::serialize(c);
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  lexc::write_report(report, m, c.out_dir);
  if (o.dump_paths) dump_paths(c, std::filesystem::path(c.out_dir) / "paths");
  std::cout << lexc::format_criteria(report);
  std::cout << fmt::format("{} {} ({:.1f} s) -> {}\n", report.all_pass() ? "PASSED" : "FAILED",
                           lexc::to_string(c.kind), m.wall_seconds, c.out_dir);
  return report.all_pass() ? 0 : 1;
}

int cmd_scalefn(const Overrides& o, double x_min, double x_max, std::size_t points, int order) {
  const auto c = load(o);
  if (!c.model) throw lexc::ConfigError("scalefn needs a [model] section");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = x_min * std::pow(x_max / x_min, static_cast<double>(i) / static_cast<double>(points - 1));
  }
  const auto table = lexc::scale_function(*c.model, grid, lexc::ScaleFunctionOptions{order, false, false});
  if (o.out) {
    std::filesystem::create_directories(*o.out);
    std::ofstream out(std::filesystem::path(*o.out) / "scale_function.csv", std::ios::binary);
    lexc::write_scale_csv(table, out);
  } else {
    lexc::write_scale_csv(table, std::cout);
  }
  return 0;
}

int cmd_simulate(const Overrides& o) {
  const auto c = load(o);
  if (!c.model) throw lexc::ConfigError("simulate needs a [model] section");
  const std::filesystem::path dir(c.out_dir);
  std::filesystem::create_directories(dir);
  lexc::DecomposeOptions opt;
  opt.zero_tol = c.effective_zero_tol();
  opt.min_lifetime = c.effective_delta();
  opt.window_end = c.effective_window_end();
  opt.keep_censored = true;
  opt.store_values_min_lifetime = std::numeric_limits<double>::infinity();
  lexc::ExcursionEnsemble ens;
  for (std::size_t r = 0; r < c.budget.replicas; ++r) {
    lexc::RngStream rng(c.seed, static_cast<std::uint32_t>(r % c.shards),
                        static_cast<std::uint32_t>(r / c.shards));
    const auto path = lexc::simulate(*c.model, c.budget.horizon, c.budget.dt, c.thresholds.x0, rng);
    auto one = lexc::decompose_excursions(path, opt);
    for (auto& e : one.excursions) {
      e.shard = static_cast<std::uint32_t>(r % c.shards);
      e.replica = static_cast<std::uint32_t>(r);
    }
    ens.merge(std::move(one));
  }
  const double threshold = c.param("jump_threshold", 0.0);
  std::ofstream out(dir / "excursions.csv", std::ios::binary);
  lexc::write_ensemble_csv(ens, threshold, out);
  write_text(dir / "config.ini", lexc::serialize(c));
  if (o.dump_paths) dump_paths(c, dir / "paths");
  std::cout << fmt::format("{} excursions from {} paths -> {}\n", ens.size(), ens.paths, dir.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Excursion experiments for Levy processes"};
  app.require_subcommand(1);
  Overrides o;
  double x_min = 0.1, x_max = 10.0;
  std::size_t points = 41;
  int order = 14;

  auto add_common = [&](CLI::App* sub, bool sim) {
    sub->add_option("--config", o.config, "experiment config (INI)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    if (sim) {
      sub->add_option("--seed", o.seed, "master seed (u64)");
      sub->add_option("--shards", o.shards, "shard count")->check(CLI::Range(1, 4096));
      sub->add_flag("--dump-paths", o.dump_paths, "also write sample paths as CSV");
    }
  };
  auto* run = app.add_subcommand("run", "run an experiment and write its report");
  add_common(run, true);
  auto* list = app.add_subcommand("list-experiments", "print the experiment table");
  auto* scale = app.add_subcommand("scalefn", "tabulate the scale function of the configured model");
  add_common(scale, false);
  scale->add_option("--x-min", x_min, "smallest x")->check(CLI::PositiveNumber);
  scale->add_option("--x-max", x_max, "largest x")->check(CLI::PositiveNumber);
  scale->add_option("--points", points, "grid points")->check(CLI::Range(5, 100000));
  scale->add_option("--order", order, "Stehfest order (even)");
  auto* sim = app.add_subcommand("simulate", "simulate paths and write excursion summaries");
  add_common(sim, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*list) {
      std::cout << lexc::format_experiment_table();
      return 0;
    }
    if (*run) return cmd_run(o);
    if (*scale) return cmd_scalefn(o, x_min, x_max, points, order);
    if (*sim) return cmd_simulate(o);
  } catch (const lexc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const lexc::InsufficientDataError& e) {
    std::cerr << "insufficient data: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
