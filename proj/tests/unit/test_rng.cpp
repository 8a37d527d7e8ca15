#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "lexc/rng.hpp"

using lexc::RngStream;

TEST_CASE("philox known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(lexc::philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(lexc::philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(lexc::philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and keyed") {
  RngStream a(42, 1, 7), b(42, 1, 7);
  for (int i = 0; i < 100; ++i) REQUIRE(a() == b());

  // changing any key component changes the stream
  std::set<std::uint64_t> firsts;
  for (auto [seed, shard, sub] : std::vector<std::tuple<std::uint64_t, std::uint32_t, std::uint32_t>>{
           {42, 1, 7}, {43, 1, 7}, {42, 2, 7}, {42, 1, 8}, {42, 0, 0}}) {
    RngStream s(seed, shard, sub);
    firsts.insert(s());
  }
  CHECK(firsts.size() == 5);

  RngStream parent(9, 3);
  RngStream child = parent.substream(5);
  RngStream direct(9, 3, 5);
  CHECK(child() == direct());
}

TEST_CASE("uniform lies in (0,1) with the right moments") {
  RngStream rng(1, 0);
  const int n = 200000;
  double sum = 0, sum_sq = 0, lo = 1, hi = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
    sum_sq += u * u;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  const double mean = sum / n, var = sum_sq / n - mean * mean;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(1.0 / 12).epsilon(0.02));
}

TEST_CASE("normal and exponential moments") {
  RngStream rng(2, 0);
  const int n = 200000;
  double s1 = 0, s2 = 0, s4 = 0, e1 = 0, e2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
    const double e = rng.exponential();
    REQUIRE(e > 0.0);
    e1 += e;
    e2 += e * e;
  }
  CHECK(std::abs(s1 / n) < 0.01);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.015));
  CHECK(s4 / n == doctest::Approx(3.0).epsilon(0.05));
  CHECK(e1 / n == doctest::Approx(1.0).epsilon(0.015));
  CHECK(e2 / n == doctest::Approx(2.0).epsilon(0.04));
}

TEST_CASE("adjacent streams are uncorrelated") {
  RngStream a(5, 0, 0), b(5, 0, 1);
  const int n = 100000;
  double sab = 0, sa = 0, sb = 0, saa = 0, sbb = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.uniform(), y = b.uniform();
    sab += x * y;
    sa += x;
    sb += y;
    saa += x * x;
    sbb += y * y;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double corr = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
  CHECK(std::abs(corr) < 0.015);
}
