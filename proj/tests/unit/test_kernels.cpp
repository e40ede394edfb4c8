#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "ghostspec/kernels.hpp"

using ghostspec::complex;
using ghostspec::cs_eval;
using ghostspec::propagate_flow;
using ghostspec::propagate_flow_variational;

namespace {
double cdist(complex a, complex b) { return std::abs(a - b); }
}  // namespace

// Reference values computed independently with 30-digit arithmetic.
TEST_CASE("C/S/E kernels against frozen references") {
  struct row {
    complex w, c, s, e;
  };
  const row rows[] = {
      {{0.2, 0.1},
       {1.1012527603117043, 0.051682004081330804},
       {1.0335837282201792, 0.017002189163717583},
       {0.34003575820132674, 0.0033811954874027294}},
      {{-0.24, 0.0},
       {0.88238088206668415, 0.0},
       {0.96047726626579689, 0.0},
       {0.32540160082963641, 0.0}},
      {{1.0, 2.0},
       {1.3595601541773263, 1.1632832740748893},
       {1.1394658828068806, 0.36620275900309418},
       {0.36285106030280720, 0.071378394466180732}},
      {{-25.0, 0.0},
       {0.28366218546322626, 0.0},
       {-0.19178485493262769, 0.0},
       {-0.019017881615834158, 0.0}},
      {{40.0, -30.0},
       {-252.80391605595117, -322.21190351934808},
       {-19.507306026888498, -54.535093154746522},
       {-0.52062403608978393, -7.0823882861823770}},
      {{120.0, 0.0},
       {28604.060717221526, 0.0},
       {2611.1815469159035, 0.0},
       {216.60732641921352, 0.0}},
  };
  for (const auto& r : rows) {
    auto k = cs_eval(r.w);
    const double scale = std::max(1.0, std::abs(r.c));
    CHECK(cdist(k.c, r.c) <= 1e-14 * scale);
    CHECK(cdist(k.s, r.s) <= 1e-14 * scale);
    CHECK(cdist(k.e, r.e) <= 1e-14 * std::max(1.0, std::abs(r.e)));
  }
}

TEST_CASE("series/closed-form agreement at the switch radius") {
  // Just outside the switch radius the truncated series is still far below
  // round-off, so it must agree with the closed form at the same argument.
  const complex dirs[] = {{1, 0}, {-1, 0}, {0.6, 0.8}, {-0.28, 0.96}, {0, -1}};
  for (complex d : dirs) {
    const complex w = d * 0.2500001;
    auto ser = ghostspec::detail::cs_series(w);
    auto cf = cs_eval(w);  // takes the closed-form branch here
    CHECK(cdist(ser.c, cf.c) <= 1e-13);
    CHECK(cdist(ser.s, cf.s) <= 1e-13);
    CHECK(cdist(ser.e, cf.e) <= 1e-13);
  }
  auto z = cs_eval({0, 0});
  CHECK(z.c == complex{1, 0});
  CHECK(z.s == complex{1, 0});
  CHECK(cdist(z.e, {1.0 / 3.0, 0}) <= 1e-16);
}

TEST_CASE("flow step: free particle is linear") {
  auto st = propagate_flow({0, 0}, 0.7, {0.3, -0.2}, {1.0, 2.0});
  CHECK(cdist(st.y, complex{0.3, -0.2} + 0.7 * complex{1.0, 2.0}) <= 1e-16);
  CHECK(cdist(st.dy, {1.0, 2.0}) <= 1e-16);
}

TEST_CASE("flow step composition: full step equals two half steps") {
  const complex u{-13.0624, -6.9215};  // q0 - lambda r0 for a sample ghost
  const double h = 1.0;
  auto full = propagate_flow(u, h, {0, 0}, {1, 0});
  auto half = propagate_flow(u, h / 2, {0, 0}, {1, 0});
  auto two = propagate_flow(u, h / 2, half.y, half.dy);
  CHECK(cdist(full.y, two.y) <= 1e-13 * std::abs(full.y));
  CHECK(cdist(full.dy, two.dy) <= 1e-13 * std::abs(full.dy));
}

TEST_CASE("flow step solves y'' = u y (defect check)") {
  const complex u{7.0, -3.0};
  // h small enough that the h^2/12 * |u^2 y| difference error sits well
  // below the tolerance, yet large enough to dodge cancellation noise
  const double h = 0.01;
  // second difference of the propagated solution approximates u*y
  auto at = [&](double t) { return propagate_flow(u, t, {0.1, 0.4}, {1, -1}).y; };
  complex y0 = at(0.5 - h), y1 = at(0.5), y2 = at(0.5 + h);
  complex dd = (y2 - 2.0 * y1 + y0) / (h * h);
  CHECK(cdist(dd, u * y1) <= 1e-3 * std::abs(u * y1));
}

TEST_CASE("variational step: lambda derivative via central differences") {
  const double q0 = -40, r0 = -1, h = 0.8;
  const complex lam{26.0, 7.0};
  const complex y0{0.2, -0.1}, dy0{1.0, -1.0};
  auto vs = propagate_flow_variational(q0 - lam * r0, r0, h, y0, dy0, {0, 0}, {0, 0});
  const double d = 1e-6;
  auto plus = propagate_flow(q0 - (lam + d) * r0, h, y0, dy0);
  auto minus = propagate_flow(q0 - (lam - d) * r0, h, y0, dy0);
  complex fd_z = (plus.y - minus.y) / (2 * d);
  complex fd_dz = (plus.dy - minus.dy) / (2 * d);
  CHECK(cdist(vs.z, fd_z) <= 1e-7 * std::max(1.0, std::abs(fd_z)));
  CHECK(cdist(vs.dz, fd_dz) <= 1e-7 * std::max(1.0, std::abs(fd_dz)));
  // the (y, dy) part is the plain flow
  auto plain = propagate_flow(q0 - lam * r0, h, y0, dy0);
  CHECK(cdist(vs.y, plain.y) == 0.0);
  CHECK(cdist(vs.dy, plain.dy) == 0.0);
}

TEST_CASE("variational step: nonzero initial (z, z') propagates homogeneously") {
  // with r0 = 0 the z pair must follow the same flow as (y, dy)
  const complex u{3.0, 1.0};
  auto vs = propagate_flow_variational(u, 0.0, 0.6, {1, 1}, {0, -2}, {0.5, 0}, {0, 0.25});
  auto zf = propagate_flow(u, 0.6, {0.5, 0}, {0, 0.25});
  CHECK(cdist(vs.z, zf.y) <= 1e-15);
  CHECK(cdist(vs.dz, zf.dy) <= 1e-15);
}

TEST_CASE("kernel overflow guard") {
  CHECK_THROWS_AS(cs_eval({4.0e6, 0.0}), ghostspec::overflow_error);
}
