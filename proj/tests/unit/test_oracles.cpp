#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "ghostspec/integrate.hpp"
#include "ghostspec/oracles.hpp"

namespace gs = ghostspec;
using gs::complex;

namespace {

double cdist(complex u, complex v) { return std::abs(u - v); }

constexpr double pi = 3.14159265358979323846264338327950288;

}  // namespace

TEST_CASE("Airy pair matches the frozen high-precision table") {
  struct row {
    complex z, ai, bi, dai, dbi;
  };
  // reference values computed with 40-digit arithmetic, rounded to double
  const row rows[] = {
      {{0, 0},
       {0.35502805388781724, 0},
       {0.61492662744600074, 0},
       {-0.2588194037928068, 0},
       {0.44828835735382636, 0}},
      {{1, 0},
       {0.13529241631288142, 0},
       {1.2074235949528713, 0},
       {-0.15914744129679321, 0},
       {0.93243593339277563, 0}},
      {{-2.5, 0},
       {-0.11232506769296609, 0},
       {-0.43242247184070529, 0},
       {0.67885273426479436, 0},
       {-0.22042015487462959, 0}},
      {{1, 1},
       {0.060458308371838149, -0.1518895658771814},
       {0.71665807338276843, 0.61988929040084476},
       {-0.13062795349964752, 0.16306759644932392},
       {0.075662844174965993, 0.78370099878545528}},
      {{-3, 0.5},
       {-0.52817234188234968, 0.18682298552967844},
       {-0.28118440073447649, -0.37685627747539381},
       {0.49990997337087834, 0.62687921674662166},
       {-0.9137050544612227, 0.36723195628136689}},
      {{2, -2},
       {-0.063959228274258275, 0.0021206787026224184},
       {-1.3357392070661755, -0.54950700697165638},
       {0.10223125956387929, -0.041225840034327747},
       {-2.485391698246339, -0.065055423128366999}},
      {{0, 0.5},
       {0.35364922337510189, -0.13680205422852428},
       {0.61720807402952228, 0.21132635103715732},
       {-0.30314078016520545, 0.011153850054972978},
       {0.37132691241803931, -0.01803794206706578}},
      {{-7, 0},
       {0.18428083525050564, 0},
       {0.29376207185441402, 0},
       {-0.77100816841012655, 0},
       {0.49824459005811349, 0}},
      {{4, 4},
       {-0.0034335882756079154, -0.0047859792047167222},
       {-2.57288608315573, 11.053684181007991},
       {0.0034386595276450603, 0.0136931705389692},
       {-16.02988931926409, 21.534273328740005}},
  };
  for (const auto& r : rows) {
    INFO("z = " << r.z.real() << " + " << r.z.imag() << "i");
    const gs::airy_values v = gs::airy_pair(r.z);
    const double scale = std::max({1.0, std::abs(r.ai), std::abs(r.bi), std::abs(r.dai),
                                   std::abs(r.dbi)});
    CHECK(cdist(v.ai, r.ai) < 1e-12 * scale);
    CHECK(cdist(v.bi, r.bi) < 1e-12 * scale);
    CHECK(cdist(v.dai, r.dai) < 1e-12 * scale);
    CHECK(cdist(v.dbi, r.dbi) < 1e-12 * scale);
  }
}

TEST_CASE("Airy pair satisfies the constant Wronskian") {
  for (complex z : {complex{0, 0}, complex{2.5, 1.5}, complex{-4, 2}, complex{-6.5, 0},
                    complex{0, -3}}) {
    const gs::airy_values v = gs::airy_pair(z);
    const complex w = v.ai * v.dbi - v.dai * v.bi;
    INFO("z = " << z.real() << " + " << z.imag() << "i");
    CHECK(cdist(w, {1.0 / pi, 0}) < 1e-13);
  }
}

TEST_CASE("Airy series domain is enforced") {
  CHECK_THROWS_AS(gs::airy_pair({9, 0}), gs::domain_error);
  CHECK_THROWS_AS(gs::airy_pair({6, 6}), gs::domain_error);
  CHECK_NOTHROW(gs::airy_pair({7.9, 0}));
}

TEST_CASE("linear-weight closed form satisfies its initial conditions") {
  for (complex lambda : {complex{3, 4}, complex{0, 12.3}, complex{-2, 1}}) {
    for (complex slope : {complex{1, 0}, complex{1, -1}}) {
      const gs::oracle_state s = gs::eigenfunction_exa2_state(-1.0, lambda, slope);
      INFO("lambda = " << lambda.real() << "+" << lambda.imag() << "i");
      CHECK(std::abs(s.y) < 1e-13);
      CHECK(cdist(s.dy, slope) < 1e-12);
    }
  }
  CHECK_THROWS_AS(gs::eigenfunction_exa2(0.0, {0, 0}, {1, 0}), gs::domain_error);
}

TEST_CASE("linear-weight closed form vanishes at the far end of its eigenvalue") {
  const complex lambda{0, 12.307583426765644};
  const complex slope{1, -1};
  double sup = 0;
  for (int i = 0; i <= 40; ++i)
    sup = std::max(sup, std::abs(gs::eigenfunction_exa2(-1 + i / 20.0, lambda, slope)));
  CHECK(std::abs(gs::eigenfunction_exa2(1.0, lambda, slope)) < 1e-10 * sup);
}

TEST_CASE("numerical shooting reproduces the linear-weight closed form") {
  const auto* ex = gs::find_example("exa2");
  REQUIRE(ex != nullptr);
  const complex lambda{3.0, 4.0};
  const gs::trajectory tr = gs::integrate(ex->problem, lambda, 1e-11, 1e-13);
  const double sup = tr.sup_y();
  for (double x : {-0.8, -0.33, 0.0, 0.41, 0.97}) {
    const complex onum = gs::eigenfunction_exa2(x, lambda, ex->problem.init_slope);
    CHECK(cdist(tr.eval(x).y, onum) < 1e-9 * sup);
  }
}

TEST_CASE("two-cell dispersion relation: symmetry and frozen roots") {
  const double q = 40.0;
  // entire in z with real coefficients, and symmetric under z -> -z
  for (complex z : {complex{10, 2}, complex{-3, 7}, complex{0.5, 0.25}}) {
    const complex d = gs::dispersion_exa1(z, q);
    CHECK(cdist(gs::dispersion_exa1(std::conj(z), q), std::conj(d)) < 1e-13 * (1 + std::abs(d)));
    CHECK(cdist(gs::dispersion_exa1(-z, q), d) < 1e-13 * (1 + std::abs(d)));
  }
  const complex lambda{26.937631878339236, 6.9214994687271987};
  CHECK(std::abs(gs::dispersion_exa1(lambda, q)) < 1e-11);
}

TEST_CASE("three-cell dispersion relation vanishes at the frozen eigenvalues") {
  const double q = 8.0;
  CHECK(std::abs(gs::dispersion_exa3({0, 6.2962486550446482}, q)) < 1e-8);
  CHECK(std::abs(gs::dispersion_exa3({0, 37.786413927124405}, q)) < 1e-8);
  // conjugate symmetry carries over
  const complex probe{5, 3};
  CHECK(cdist(gs::dispersion_exa3(std::conj(probe), q),
              std::conj(gs::dispersion_exa3(probe, q))) < 1e-12);
}

TEST_CASE("constant-weight eigenvalue formula") {
  const auto eigs = gs::constant_weight_eigs(0.0, 0.0, pi, 3);
  REQUIRE(eigs.size() == 3);
  CHECK(eigs[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(eigs[1] == Catch::Approx(4.0).margin(1e-12));
  CHECK(eigs[2] == Catch::Approx(9.0).margin(1e-12));
  const auto shifted = gs::constant_weight_eigs(2.5, 0.0, pi, 1);
  CHECK(shifted[0] == Catch::Approx(3.5).margin(1e-12));
  CHECK_THROWS_AS(gs::constant_weight_eigs(0.0, 0.0, 1.0, 0), gs::domain_error);
}

TEST_CASE("built-in example registry is consistent") {
  const auto& reg = gs::example_registry();
  REQUIRE(reg.size() == 4);
  const char* ids[] = {"exa1", "exa2", "exa3", "exa4"};
  for (int i = 0; i < 4; ++i) {
    INFO(ids[i]);
    CHECK(reg[i].id == ids[i]);
    CHECK_NOTHROW(reg[i].problem.validate());
    CHECK(gs::is_nondefinite(reg[i].problem.r));
    CHECK(reg[i].reference_lambda.imag() > 0);
    CHECK(reg[i].default_region[2] > 0);           // search box above the real axis
    CHECK(reg[i].default_real_window[0] < reg[i].default_real_window[1]);
    CHECK(gs::find_example(ids[i]) == &reg[i]);
  }
  CHECK(gs::find_example("nope") == nullptr);
}
