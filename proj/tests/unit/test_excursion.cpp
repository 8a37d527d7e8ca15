#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "lexc/errors.hpp"
#include "lexc/excursion.hpp"

using namespace lexc;

namespace {

// unit grid; reflected values 0,1,2,1,0,1,0,0,5,5 and one jump of +5 at t=8
Path hand_path() {
  Path p;
  for (int i = 0; i < 10; ++i) p.times.push_back(i);
  p.values = {0, 1, 2, 1, -1, 0, -1, -2, 3, 3};
  p.jumps = {{8, 5.0}};
  return p;
}

}  // namespace

TEST_CASE("running extrema") {
  const Path p = hand_path();
  const auto inf = running_infimum(p);
  const auto sup = running_supremum(p);
  CHECK(inf == std::vector<double>{0, 0, 0, 0, -1, -1, -1, -2, -2, -2});
  CHECK(sup.back() == 3.0);
  CHECK(sup[4] == 2.0);
}

TEST_CASE("decomposition of a hand-made path follows the midpoint convention") {
  DecomposeOptions opt;
  opt.keep_censored = true;
  const auto ens = decompose_excursions(hand_path(), opt);
  REQUIRE(ens.size() == 3);
  const auto& a = ens.excursions[0];
  CHECK(a.start_time == doctest::Approx(0.5));
  CHECK(a.lifetime == doctest::Approx(3.0));
  CHECK(a.height == doctest::Approx(2.0));
  CHECK_FALSE(a.censored());
  CHECK(a.values.front() == 0.0);
  CHECK(a.values.back() == 0.0);
  CHECK(a.value_at(1.0) == doctest::Approx(1.0));  // grid points sit at 0.5, 1.5, 2.5
  CHECK(a.value_at(1.5) == doctest::Approx(2.0));
  CHECK(a.value_at(10.0) == 0.0);

  const auto& b = ens.excursions[1];
  CHECK(b.start_time == doctest::Approx(4.5));
  CHECK(b.lifetime == doctest::Approx(1.0));
  CHECK(b.height == doctest::Approx(1.0));

  const auto& c = ens.excursions[2];
  CHECK(c.censored());
  CHECK(c.start_time == doctest::Approx(7.5));
  CHECK(c.height == doctest::Approx(5.0));
  REQUIRE(c.jumps.size() == 1);
  CHECK(c.jumps[0].size == doctest::Approx(5.0));
  CHECK(c.jumps[0].time == doctest::Approx(0.5));

  CHECK(ens.local_time_total == doctest::Approx(2.0));
  CHECK(ens.horizon_total == doctest::Approx(9.0));
  CHECK(ens.tally.count == 2);
  CHECK(ens.tally.sum == doctest::Approx(4.0));
}

TEST_CASE("options: censoring, min lifetime, window, keep filter, probes") {
  DecomposeOptions opt;
  opt.keep_censored = false;
  opt.min_lifetime = 2.0;
  auto ens = decompose_excursions(hand_path(), opt);
  REQUIRE(ens.size() == 1);
  CHECK(ens.excursions[0].lifetime == doctest::Approx(3.0));
  CHECK(ens.tally.count == 1);

  opt = {};
  opt.window_end = 4.0;
  ens = decompose_excursions(hand_path(), opt);
  CHECK(ens.size() == 1);
  CHECK(ens.horizon_total == doctest::Approx(4.0));

  opt = {};
  opt.keep_min_lifetime = 2.5;
  opt.record_lifetimes = true;
  ens = decompose_excursions(hand_path(), opt);
  CHECK(ens.size() == 1);        // only the lifetime-3 excursion is materialized
  CHECK(ens.tally.count == 2);   // both closed excursions are counted
  CHECK(ens.lifetime_sample.size() == 2);
  CHECK(ens.lifetime_sample_horizon == doctest::Approx(9.0));

  opt = {};
  opt.keep_min_lifetime = 100.0;
  opt.keep_min_height = 1.5;
  ens = decompose_excursions(hand_path(), opt);
  CHECK(ens.size() == 1);
  CHECK(ens.excursions[0].height == doctest::Approx(2.0));

  opt = {};
  opt.probe_times = {1.0, 2.0};
  ens = decompose_excursions(hand_path(), opt);
  REQUIRE(ens.size() == 2);
  CHECK(ens.excursions[0].probes[0] == doctest::Approx(1.0));
  CHECK(ens.excursions[0].probes[1] == doctest::Approx(2.0));
  CHECK(std::isnan(ens.excursions[1].probes[0]));
}

TEST_CASE("zero tolerance merges shallow returns") {
  DecomposeOptions opt;
  opt.zero_tol = 0.5;
  opt.keep_censored = true;
  Path p;
  p.times = {0, 1, 2, 3, 4};
  p.values = {0, 2, 0.3, 2, 0.1};
  DecomposeOptions exact;
  exact.keep_censored = true;
  const auto tight = decompose_excursions(p, exact);
  const auto loose = decompose_excursions(p, opt);
  CHECK(tight.size() == 1);  // 0.1 and 0.3 stay above the infimum 0
  CHECK(loose.size() == 2);
}

TEST_CASE("a jump from a fresh infimum starts a new excursion") {
  // left limit at t=3 is -1, below the running infimum 0, then a jump to 0.5
  Path p;
  p.times = {0, 1, 2, 3, 4};
  p.values = {0, 1, 0.5, 0.5, -2};
  p.jumps = {{3, 1.5}};
  const auto ens = decompose_excursions(p, DecomposeOptions{});
  REQUIRE(ens.size() == 2);
  CHECK(ens.excursions[0].lifetime == doctest::Approx(2.0));
  CHECK(ens.excursions[1].start_time == doctest::Approx(2.5));
  CHECK(ens.excursions[1].height == doctest::Approx(1.5));
  CHECK(ens.excursions[1].jumps.size() == 1);
  CHECK(ens.excursions[0].jumps.empty());
}

TEST_CASE("big jumps inside an excursion") {
  Excursion e;
  e.lifetime = 10.0;
  e.jumps = {{0.5, 0.2}, {1.0, 3.0}, {4.0, 5.0}, {11.0, 9.0}};
  const auto j = first_big_jump(e, 2.0);
  REQUIRE(j.has_value());
  CHECK(j->time == 1.0);
  CHECK(big_jump_count(e, 2.0, 10.0) == 2);
  CHECK(big_jump_count(e, 2.0, 2.0) == 1);
  CHECK_FALSE(first_big_jump(e, 100.0).has_value());
}

TEST_CASE("last passage at the infimum") {
  const Path p = hand_path();
  CHECK(last_passage_at_infimum(p, 6.0) == doctest::Approx(6.0));
  CHECK(last_passage_at_infimum(p, 5.5) == doctest::Approx(4.0));
  CHECK(last_passage_at_infimum(p, 9.0) == doctest::Approx(8.0));  // left limit at t=8
  CHECK(last_passage_at_infimum(p, 3.0) == doctest::Approx(0.0));
}

TEST_CASE("invariants on simulated paths") {
  const LevyModel m(0.0, 1.0, JumpLaw::pareto(0.5, 0.3, 1.5, JumpSide::two_sided));
  DecomposeOptions opt;
  opt.keep_censored = true;
  opt.window_end = 40.0;
  ExcursionEnsemble left, right, all;
  for (std::uint32_t r = 0; r < 30; ++r) {
    RngStream rng(31, 0, r);
    const Path path = simulate(m, 50.0, 1e-2, 0.0, rng);
    auto ens = decompose_excursions(path, opt);
    double last_end = -1.0;
    for (const auto& e : ens.excursions) {
      REQUIRE(e.start_time < 40.0);
      REQUIRE(e.start_time >= last_end - 1e-9);  // disjoint and ordered
      last_end = e.start_time + e.lifetime;
      REQUIRE(e.lifetime > 0.0);
      REQUIRE(e.height > 0.0);
      for (double v : e.values) REQUIRE(v >= 0.0);
      if (!e.censored()) REQUIRE(e.values.back() == 0.0);
    }
    // the infimum falls by exactly the local time
    const auto inf = running_infimum(path);
    std::size_t k = 0;
    while (k + 1 < path.size() && path.times[k + 1] <= 40.0) ++k;
    CHECK(ens.local_time_total == doctest::Approx(-inf[k]).epsilon(1e-9));
    if (r % 2 == 0) {
      left.merge(ens);
    } else {
      right.merge(ens);
    }
    all.merge(std::move(ens));
  }
  ExcursionEnsemble combined = left;
  combined.merge(right);
  CHECK(combined.size() == all.size());
  CHECK(combined.tally.count == all.tally.count);
  CHECK(combined.tally.sum == doctest::Approx(all.tally.sum));
  CHECK(combined.horizon_total == doctest::Approx(all.horizon_total));
  CHECK(combined.paths == all.paths);
}

TEST_CASE("default zero tolerance scales with the step") {
  const ProcessSpec bm = LevyModel(0.0, 1.0, JumpLaw::none());
  CHECK(default_zero_tol(bm, 1e-2) > default_zero_tol(bm, 1e-4));
  CHECK(default_zero_tol(bm, 1e-2) > 0.0);
}

TEST_CASE("ensemble CSV layout") {
  DecomposeOptions opt;
  opt.keep_censored = true;
  const auto ens = decompose_excursions(hand_path(), opt);
  std::ostringstream os;
  write_ensemble_csv(ens, 1.0, os);
  const std::string csv = os.str();
  CHECK(csv.rfind("shard,replica,start,lifetime,height,J_time,J_size,censored\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
