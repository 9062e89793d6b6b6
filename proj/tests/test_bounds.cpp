#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace qpencil;

namespace {
const DiagonalPencil kWorked = oracles::worked_curve();
}

TEST_CASE("bound evaluators on pinned inputs") {
  // (sqrt(3) + 1) log 3
  CHECK(thm11_bound(Int(3), 0.0, 1) ==
        Catch::Approx(3.0014646).epsilon(1e-6));
  CHECK(thm11_bound(Int(1000000), 1.5, 2) ==
        Catch::Approx(std::pow(2.0, 1.5) * (std::pow(1e6, 0.125) + 4.0) *
                      std::log(1e6))
            .epsilon(1e-9));
  CHECK(cor12_bound(Int(1000), 2.0) ==
        Catch::Approx(std::pow(std::log(1e3), 3.0)).epsilon(1e-9));
  CHECK(eq13_bound(Int(8), 1.0) ==
        Catch::Approx(2.0 * std::pow(8.0, 0.125) * std::log(8.0))
            .epsilon(1e-9));
  CHECK(eq14_bound(Int(8), Int(2), 0.5) ==
        Catch::Approx(std::pow(2.0, 6.5) * std::pow(8.0, 0.125) *
                      std::log(8.0))
            .epsilon(1e-9));
  CHECK(thm31_bound(Int(1000), Int(1), 0.01) ==
        Catch::Approx(std::pow(1e3, 0.51) + std::log(1e3) + 1.0)
            .epsilon(1e-9));
  CHECK(thm31_bound(Int(1000), Int(256), 0.01) ==
        Catch::Approx(std::pow(1e3, 0.51) / std::pow(256.0, 0.125) +
                      std::log(1e3) + 1.0)
            .epsilon(1e-9));
  CHECK(thm13_bound(Int(1024), 0.005) ==
        Catch::Approx(std::pow(1024.0, 0.495)).epsilon(1e-9));
}

TEST_CASE("bound evaluator domains") {
  CHECK_THROWS_AS(thm11_bound(Int(2), 0.0, 1), constraint_error);
  CHECK_THROWS_AS(thm11_bound(Int(10), -1.0, 1), argument_error);
  CHECK_THROWS_AS(thm11_bound(Int(10), 1.0, 0), argument_error);
  CHECK_THROWS_AS(cor12_bound(Int(2), 0.0), constraint_error);
  CHECK_THROWS_AS(thm31_bound(Int(10), Int(0), 0.1), argument_error);
  CHECK_THROWS_AS(thm31_bound(Int(10), Int(1), 0.0), constraint_error);
  CHECK_THROWS_AS(eq14_bound(Int(10), Int(1), -0.1), constraint_error);
  // delta must stay strictly inside (0, 3/392).
  CHECK_THROWS_AS(thm13_bound(Int(10), 0.0), constraint_error);
  CHECK_THROWS_AS(thm13_bound(Int(10), 3.0 / 392.0), constraint_error);
  CHECK_THROWS_AS(thm13_bound(Int(10), 0.5), constraint_error);
  CHECK_NOTHROW(thm13_bound(Int(10), 0.00765));
}

TEST_CASE("dichotomy exponent bookkeeping") {
  CHECK(thm13_exponent_identity());
  Rat lost = Rat(3, 49) * Rat(1, 8);
  CHECK(lost == Rat(3, 392));
  CHECK(Rat(1, 2) - lost == Rat(193, 392));
}

TEST_CASE("dichotomy crossing height") {
  CHECK(dichotomy_crossing(pow_int(Int(2), 49)) ==
        Catch::Approx(8.0).epsilon(1e-12));
  for (long b : {1000L, 1000000L, 1000000000L}) {
    double closed = dichotomy_crossing(Int(b));
    double numeric = dichotomy_crossing_numeric(Int(b));
    CHECK(std::fabs(closed - numeric) < 1e-9);
  }
  CHECK(dichotomy_crossing(Int(1000000)) ==
        Catch::Approx(std::pow(1e6, 3.0 / 49.0)).epsilon(1e-12));
  CHECK_THROWS_AS(dichotomy_crossing(Int(1)), constraint_error);
  CHECK_THROWS_AS(dichotomy_crossing_numeric(Int(1)), constraint_error);
}

TEST_CASE("Mertens-style sum stays under the doubled loglog") {
  for (long v : {2L, 6L, 30L, 210L, 2310L, 30030L, 510510L, 9699690L,
                 223092870L, 6469693230L, 200560490130L})
    CHECK(mertens_check(Int(v)));
  CHECK(mertens_check(Int(999999937)));
  CHECK(mertens_check(pow_int(Int(2), 40)));
  CHECK(mertens_check(pow_int(Int(10), 12)));

  std::mt19937_64 rng(811);
  for (int trial = 0; trial < 500; ++trial) {
    Int v = 2 + Int(static_cast<unsigned long>(rng() % 1000000000000ull));
    CHECK(mertens_check(v));
  }

  CHECK_THROWS_AS(mertens_check(Int(1)), constraint_error);
  CHECK_THROWS_AS(mertens_check(Int(0)), constraint_error);
  CHECK_THROWS_AS(mertens_check(Int(-6)), constraint_error);
  // Square of a prime beyond the trial-division range: the factorisation
  // cannot be certified, so the check must refuse rather than guess.
  CHECK_THROWS_AS(mertens_check(Int("100000000380000000361")),
                  unsupported_error);
}

TEST_CASE("curve labels") {
  CHECK(curve_label(kWorked) == "a=(1 -1 -1 1) b=(1 2 -3 0)");
}

TEST_CASE("bound table rows") {
  BoundParams prm;
  auto rows = bound_table(kWorked, {Int(1), Int(10), Int(100)}, prm);
  REQUIRE(rows.size() == 3);

  const BoundReport& r0 = rows[0];
  CHECK(r0.B == 1);
  CHECK(r0.H == 5);
  CHECK(r0.abs_disc == Rat(2025, 16));
  CHECK(r0.rank_source == "estimate");
  CHECK(r0.rank_c_ok);
  CHECK(r0.rank_value ==
        Catch::Approx(0.722 * std::log(2025.0 / 16.0)).epsilon(1e-12));
  // Below B = 3 the evaluators have no domain, so the columns are absent.
  CHECK_FALSE(r0.thm11.has_value());
  CHECK_FALSE(r0.thm13.has_value());
  REQUIRE(r0.nb.has_value());
  CHECK(*r0.nb == 8);
  CHECK(r0.ratios.empty());

  const BoundReport& r1 = rows[1];
  CHECK(r1.B == 10);
  REQUIRE(r1.thm11.has_value());
  CHECK(*r1.thm11 ==
        Catch::Approx(thm11_bound(Int(10), r1.rank_value, prm.m)));
  REQUIRE(r1.nb.has_value());
  CHECK(*r1.nb == 8);
  REQUIRE(r1.ratios.size() == 6);
  CHECK(r1.ratios[0].first == "thm11");
  CHECK(r1.ratios[0].second == Catch::Approx(8.0 / *r1.thm11));
  CHECK(r1.ratios[5].first == "thm13");

  const BoundReport& r2 = rows[2];
  REQUIRE(r2.nb.has_value());
  CHECK(*r2.nb == count_points(kWorked, Int(100)));
}

TEST_CASE("bound table options") {
  BoundParams prm;
  prm.rank = 2.0;
  prm.with_enumeration = false;
  auto rows = bound_table(kWorked, {Int(50)}, prm);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].rank_source == "user");
  CHECK(rows[0].rank_value == 2.0);
  CHECK_FALSE(rows[0].nb.has_value());
  CHECK(rows[0].ratios.empty());
  REQUIRE(rows[0].thm11.has_value());
  CHECK(*rows[0].thm11 == Catch::Approx(thm11_bound(Int(50), 2.0, prm.m)));

  prm.rank = -1.0;
  CHECK_THROWS_AS(bound_table(kWorked, {Int(50)}, prm), argument_error);
}

TEST_CASE("bound table guards") {
  CHECK_THROWS_AS(bound_table(kWorked, {}), argument_error);
  CHECK_THROWS_AS(bound_table(kWorked, {Int(0)}), argument_error);
  DiagonalPencil sing{{Int(1), Int(1), Int(1), Int(1)},
                      {Int(1), Int(1), Int(2), Int(3)}};
  CHECK_THROWS_AS(bound_table(sing, {Int(10)}), singular_pencil_error);
}

TEST_CASE("bound table is worker-count independent") {
  BoundParams one, four;
  one.workers = 1;
  four.workers = 4;
  std::vector<Int> bs = {Int(1), Int(5), Int(10), Int(20), Int(40), Int(80)};
  auto a = bound_table(kWorked, bs, one);
  auto b = bound_table(kWorked, bs, four);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].B == b[i].B);
    CHECK(a[i].nb == b[i].nb);
    CHECK(a[i].thm11 == b[i].thm11);
    CHECK(a[i].thm13 == b[i].thm13);
    CHECK(a[i].ratios == b[i].ratios);
  }
}
