#include <set>
#include <sstream>

#include "doctest.h"
#include "lexc/errors.hpp"
#include "lexc/experiments.hpp"

using namespace lexc;

TEST_CASE("experiment table covers every kind once") {
  const auto& table = experiment_table();
  CHECK(table.size() == 10);
  std::set<ExperimentKind> kinds;
  for (const auto& row : table) {
    kinds.insert(row.kind);
    CHECK_FALSE(row.verifies.empty());
    CHECK_FALSE(row.anchor.empty());
    CHECK_NOTHROW(parse_features(row.model_features));
  }
  CHECK(kinds.size() == all_experiment_kinds().size());
  const std::string text = format_experiment_table();
  std::istringstream is(text);
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) {
    CHECK(line.find('\t') != std::string::npos);
    ++rows;
  }
  CHECK(rows == 11);
}

TEST_CASE("feature strings") {
  const auto f = parse_features("model=stable;alpha=(1,2);rho=any");
  CHECK(f.at("model") == "stable");
  CHECK(f.at("alpha") == "(1,2)");
  CHECK(f.at("rho") == "any");
  CHECK_THROWS_AS(parse_features(""), ConfigError);
  CHECK_THROWS_AS(parse_features("alpha=1"), ConfigError);  // model= is required
  CHECK_THROWS_AS(parse_features("model=levy;alpha"), ConfigError);
  CHECK_THROWS_AS(parse_features("model=levy;=1"), ConfigError);
  CHECK_THROWS_AS(parse_features("model=levy;model=stable"), ConfigError);
}

TEST_CASE("closed forms and scale function experiments pass") {
  ExperimentConfig c;
  c.kind = ExperimentKind::closed_forms;
  auto r = run_experiment(c);
  CHECK_FALSE(r.criteria.empty());
  CHECK(r.all_pass());

  c.kind = ExperimentKind::scalefn;
  c.params["closed_form_order"] = "24";
  c.params["extended_precision"] = "true";
  r = run_experiment(c);
  CHECK(r.all_pass());
}

TEST_CASE("runs are reproducible for a fixed seed") {
  ExperimentConfig c;
  c.kind = ExperimentKind::arcsine;
  c.model = LevyModel(0.0, 1.0, JumpLaw::none());
  c.budget.horizon = 1.0;
  c.budget.dt = 1e-3;
  c.budget.replicas = 200;
  c.seed = 5;
  c.shards = 2;
  const auto a = run_experiment(c), b = run_experiment(c);
  CHECK(dump_json(a.summary()) == dump_json(b.summary()));
  for (const auto& [stem, t] : a.tables) CHECK(csv_text(t) == csv_text(b.tables.at(stem)));
}

TEST_CASE("helper tables") {
  const auto t = detail::ecdf_pair_table({1, 2, 3}, {2, 3, 4});
  CHECK(t.header.size() >= 3);
  CHECK_FALSE(t.rows.empty());
  const auto q = detail::qq_table({1, 2, 3, 4}, {2, 4, 6, 8}, 3);
  CHECK(q.rows.size() == 3);
  for (const auto& row : q.rows) CHECK(row[2] == doctest::Approx(2.0 * row[1]));
}
