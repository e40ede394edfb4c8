#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ghostspec/verify.hpp"

namespace gs = ghostspec;

TEST_CASE("generated problems are reproducible across calls") {
  for (std::uint64_t k : {0ull, 3ull, 17ull, 99ull}) {
    const gs::sl_problem p1 = gs::random_th3_problem(7, k);
    const gs::sl_problem p2 = gs::random_th3_problem(7, k);
    CHECK(p1.q.breakpoints == p2.q.breakpoints);
    CHECK(p1.r.breakpoints == p2.r.breakpoints);
    REQUIRE(p1.q.pieces.size() == p2.q.pieces.size());
    for (std::size_t i = 0; i < p1.q.pieces.size(); ++i)
      CHECK(p1.q.pieces[i][0] == p2.q.pieces[i][0]);
  }
  // different seeds decorrelate
  bool differs = false;
  for (std::uint64_t k = 0; k < 6; ++k) {
    const gs::sl_problem a = gs::random_th3_problem(7, k);
    const gs::sl_problem b = gs::random_th3_problem(8, k);
    differs = differs || a.q.pieces[0][0] != b.q.pieces[0][0] ||
              a.r.breakpoints != b.r.breakpoints;
  }
  CHECK(differs);
}

TEST_CASE("generated problems stay inside the documented envelope") {
  int point_cases = 0, block_cases = 0;
  for (std::uint64_t k = 0; k < 200; ++k) {
    INFO("index " << k);
    const gs::sl_problem p = gs::random_th3_problem(7, k);
    CHECK_NOTHROW(p.validate());
    CHECK(p.a == -1.0);
    CHECK(p.b == 1.0);
    CHECK(p.init_slope == gs::complex{1, 0});

    // potential: 1-3 constant pieces with values in [-50, 10]
    CHECK(p.q.piece_count() >= 1);
    CHECK(p.q.piece_count() <= 3);
    for (const auto& piece : p.q.pieces) {
      CHECK(piece[0] >= -50.0);
      CHECK(piece[0] <= 10.0);
      CHECK(piece[1] == 0.0);
      CHECK(piece[2] == 0.0);
      CHECK(piece[3] == 0.0);
    }

    // weight: one sign change, magnitudes in {1, 2}
    const gs::weight_profile prof = gs::classify_weight(p.r);
    CHECK(gs::is_turning_profile(prof));
    REQUIRE(prof.c.has_value());
    for (const auto& piece : p.r.pieces) {
      const double m = std::abs(piece[0]);
      CHECK((m == 0.0 || m == 1.0 || m == 2.0));
    }
    if (prof.kind == gs::weight_kind::turning_interval) {
      ++block_cases;
      const double len = *prof.d - *prof.c;
      CHECK(len >= 0.05 - 1e-12);
      CHECK(len <= 0.6 + 1e-12);
      CHECK(*prof.c >= -0.85 - 1e-12);
      CHECK(*prof.d <= 0.85 + 1e-12);
    } else {
      REQUIRE(prof.kind == gs::weight_kind::single_turning_point);
      ++point_cases;
      CHECK(*prof.c >= -0.6 - 1e-12);
      CHECK(*prof.c <= 0.6 + 1e-12);
    }
  }
  // both branches of the generator appear
  CHECK(point_cases > 20);
  CHECK(block_cases > 20);
}

TEST_CASE("check aggregation") {
  std::vector<gs::check_result> checks;
  CHECK(gs::all_pass(checks));
  checks.push_back({"a", true, ""});
  checks.push_back({"b", true, ""});
  CHECK(gs::all_pass(checks));
  checks.push_back({"c", false, "broken"});
  CHECK_FALSE(gs::all_pass(checks));
}

TEST_CASE("step-halving order of the integrator core") {
  const double order = gs::convergence_order_study();
  CHECK(order > 3.5);
  CHECK(order < 6.0);
}

TEST_CASE("example verification suite accepts the imaginary-pair example") {
  const auto* ex = gs::find_example("exa4");
  REQUIRE(ex != nullptr);
  const auto checks = gs::run_example_suite(*ex);
  CHECK_FALSE(checks.empty());
  for (const auto& c : checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.pass);
  }
  bool saw_bound = false;
  for (const auto& c : checks) saw_bound = saw_bound || c.name == "exa4 M <= N";
  CHECK(saw_bound);
}

TEST_CASE("randomized problems pass the invariant battery") {
  for (std::uint64_t k : {0ull, 1ull}) {
    const gs::random_problem_result res = gs::run_random_problem(7, k);
    INFO("index " << k);
    for (const auto& c : res.checks) {
      INFO(c.name << ": " << c.detail);
      CHECK(c.pass);
    }
    CHECK(res.pass);
    CHECK(res.failure_context.empty());
    CHECK(res.index == k);
  }
}

TEST_CASE("suite runner preserves problem order") {
  const auto results = gs::run_random_suite(7, 3);
  REQUIRE(results.size() == 3);
  for (std::size_t i = 0; i < results.size(); ++i) {
    CHECK(results[i].index == i);
    CHECK(results[i].pass);
  }
}
