#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ghostspec/zeros.hpp"

namespace gs = ghostspec;

namespace {

constexpr double pi = 3.14159265358979323846264338327950288;

gs::zero_list make_list(double a, double b, std::vector<double> zeros, bool za = false,
                        bool zb = false) {
  gs::zero_list z;
  z.a = a;
  z.b = b;
  z.zeros = std::move(zeros);
  z.endpoint_zero_a = za;
  z.endpoint_zero_b = zb;
  return z;
}

}  // namespace

TEST_CASE("zero location on an oscillatory function") {
  const auto z = gs::locate_zeros_of([](double x) { return std::sin(3 * x); }, 0.0, pi, 1e-9);
  REQUIRE(z.zeros.size() == 2);
  CHECK(z.zeros[0] == Catch::Approx(pi / 3).margin(1e-9));
  CHECK(z.zeros[1] == Catch::Approx(2 * pi / 3).margin(1e-9));
  CHECK(z.endpoint_zero_a);
  CHECK(z.endpoint_zero_b);
  CHECK(z.cluster_warnings.empty());
}

TEST_CASE("zero location on a zero-free function") {
  const auto z =
      gs::locate_zeros_of([](double x) { return 2.0 + std::cos(x); }, -1.0, 5.0, 1e-9);
  CHECK(z.zeros.empty());
  CHECK_FALSE(z.endpoint_zero_a);
  CHECK_FALSE(z.endpoint_zero_b);
}

TEST_CASE("zero location input guards") {
  CHECK_THROWS_AS(gs::locate_zeros_of([](double) { return 0.0; }, 0.0, 1.0, 1e-9),
                  gs::domain_error);
  CHECK_THROWS_AS(gs::locate_zeros_of([](double x) { return x; }, 0.0, 1.0, 0.0),
                  gs::domain_error);
}

TEST_CASE("near-tangency produces a cluster warning instead of a zero") {
  const auto z = gs::locate_zeros_of(
      [](double x) { return (x - 0.5) * (x - 0.5) + 1e-8; }, 0.0, 1.0, 1e-9);
  CHECK(z.zeros.empty());
  REQUIRE_FALSE(z.cluster_warnings.empty());
  CHECK(z.cluster_warnings[0].x == Catch::Approx(0.5).margin(1e-2));
  CHECK(z.cluster_warnings[0].magnitude < 1e-6);
}

TEST_CASE("unstable zero counts are reported as nonconvergence") {
  // zeros accumulate toward the (off-grid) singular point, so every grid
  // refinement finds more of them
  CHECK_THROWS_AS(gs::locate_zeros_of(
                      [](double x) { return std::sin(1.0 / (x - 0.4999991)); }, 0.0,
                      1.0, 1e-9),
                  gs::convergence_error);
}

TEST_CASE("strict alternation accepts a proper interleaving") {
  const auto a = make_list(0, 4, {1.0, 3.0});
  const auto b = make_list(0, 4, {2.0});
  const auto res = gs::check_interior_interlacing(a, b);
  CHECK(res.ok);
  CHECK(res.violations.empty());
  // symmetric in the argument order
  CHECK(gs::check_interior_interlacing(b, a).ok);
}

TEST_CASE("strict alternation rejects an empty or crowded gap") {
  const auto a = make_list(0, 4, {1.0, 3.0});
  const auto empty_gap = gs::check_interior_interlacing(a, make_list(0, 4, {}));
  CHECK_FALSE(empty_gap.ok);
  REQUIRE(empty_gap.violations.size() == 1);
  CHECK(empty_gap.violations[0].lo == 1.0);
  CHECK(empty_gap.violations[0].hi == 3.0);
  CHECK(empty_gap.violations[0].other_count == 0);
  CHECK_FALSE(empty_gap.violations[0].coincident);

  const auto crowded =
      gs::check_interior_interlacing(a, make_list(0, 4, {1.5, 1.6}));
  CHECK_FALSE(crowded.ok);
  bool saw_two = false;
  for (const auto& v : crowded.violations) saw_two = saw_two || v.other_count == 2;
  CHECK(saw_two);
}

TEST_CASE("strict alternation rejects a shared zero") {
  const auto a = make_list(0, 4, {1.0, 3.0});
  const auto b = make_list(0, 4, {1.0 + 1e-12, 2.0});
  const auto res = gs::check_interior_interlacing(a, b);
  CHECK_FALSE(res.ok);
  bool saw_coincident = false;
  for (const auto& v : res.violations) saw_coincident = saw_coincident || v.coincident;
  CHECK(saw_coincident);
}

TEST_CASE("endpoint audit expects endpoint-inclusive separation to fail") {
  // both components vanish at both endpoints: shared zeros there must break
  // the endpoint-inclusive alternation
  const auto a = make_list(0, 4, {1.0, 3.0}, true, true);
  const auto b = make_list(0, 4, {2.0}, true, true);
  CHECK(gs::endpoint_nonseparation_audit(a, b));

  // a cleanly separated pair is the anomalous outcome
  const auto c = make_list(0, 4, {1.0, 3.0});
  const auto d = make_list(0, 4, {2.0});
  CHECK_FALSE(gs::endpoint_nonseparation_audit(c, d));
}
