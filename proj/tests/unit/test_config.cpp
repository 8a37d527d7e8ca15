#include <sstream>

#include "doctest.h"
#include "lexc/config.hpp"
#include "lexc/errors.hpp"

using namespace lexc;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

const char* kDrift = R"([experiment]
kind = big_jump
seed = 7
shards = 3
out = out/x

[model]
type = levy
beta = 1
sigma = 0.05
jumps = compound_pareto
jump_rate = 1.2
jump_scale = 0.02
jump_theta = 1.5

[budget]
horizon = 50
window_end = 40
dt = 0.01
replicas = 20

[thresholds]
t = 2, 4
zero_tol = 0

[params]
min_nu_bar = 1e-3
)";

}  // namespace

TEST_CASE("parse a full config") {
  const auto c = parse(kDrift);
  CHECK(c.kind == ExperimentKind::big_jump);
  CHECK(c.seed == 7);
  CHECK(c.shards == 3);
  CHECK(c.out_dir == "out/x");
  REQUIRE(c.model.has_value());
  const auto& m = std::get<LevyModel>(*c.model);
  CHECK(m.beta_drift() == 1.0);
  CHECK(m.jumps().theta() == 1.5);
  CHECK(c.budget.replicas == 20);
  CHECK(c.thresholds.t_levels == std::vector<double>{2.0, 4.0});
  CHECK(c.effective_delta() == 0.01);
  CHECK(c.effective_window_end() == 40.0);
  CHECK(c.effective_zero_tol() == 0.0);
  CHECK(c.param("min_nu_bar", 0.0) == 1e-3);
  CHECK(c.param("missing", 2.5) == 2.5);
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("serialize round trip is lossless") {
  auto c = parse(kDrift);
  c.budget.dt = 0.1 + 0.2;  // not representable in few digits
  c.thresholds.x0 = 1.0 / 3.0;
  const std::string text = serialize(c);
  const auto back = parse(text);
  CHECK(serialize(back) == text);
  CHECK(back.budget.dt == c.budget.dt);
  CHECK(back.thresholds.x0 == c.thresholds.x0);
  CHECK(*back.model == *c.model);
  CHECK(back.params == c.params);

  ExperimentConfig s;
  s.kind = ExperimentKind::meander;
  s.model = StableParams(1.5, 0.5);
  s.thresholds.t_levels = {1.0, 4.0};
  s.thresholds.x0 = 0.01;
  const auto sb = parse(serialize(s));
  CHECK(std::get<StableParams>(*sb.model) == std::get<StableParams>(*s.model));
}

TEST_CASE("unknown sections, keys and bad values are rejected") {
  CHECK_THROWS_AS(parse("[experiment]\nkind = arcsine\n[bogus]\na = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nkind = arcsine\nfoo = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nkind = nope\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nseed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nkind = arcsine\nseed = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nkind = arcsine\nshards = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nkind = arcsine\n[budget]\ndt = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nkind = arcsine\n[model]\ntype = gaussian\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("validation catches incompatible settings") {
  auto c = parse(kDrift);
  c.budget.window_end = 100.0;
  CHECK_THROWS_AS(validate(c), ConfigError);

  c = parse(kDrift);
  c.thresholds.delta = 1e-3;  // below dt
  CHECK_THROWS_AS(validate(c), ConfigError);

  c = parse(kDrift);
  c.model = LevyModel(1.0, 0.0, JumpLaw::pareto(1.2, 0.02, 1.5));  // 0 irregular upwards
  CHECK_THROWS_AS(validate(c), ConfigError);

  c = parse(kDrift);
  c.kind = ExperimentKind::arcsine;
  CHECK_THROWS_AS(validate(c), ConfigError);

  c = parse(kDrift);
  c.kind = ExperimentKind::height_tail;
  CHECK_THROWS_AS(validate(c), ConfigError);

  c = parse(kDrift);
  c.thresholds.x0 = 5.0;  // above beta * t
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("number formatting and lists") {
  CHECK(parse_double_list("1, 2.5,1e-3") == std::vector<double>{1.0, 2.5, 1e-3});
  CHECK(parse_double_list("").empty());
  CHECK_THROWS_AS(parse_double_list("1, x"), ConfigError);
  CHECK(format_double(0.5) == "0.5");
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
  for (auto k : all_experiment_kinds()) CHECK(parse_experiment_kind(to_string(k)) == k);
}
