#pragma once

// Entire kernels for the constant-coefficient flow of y'' = u y.
//
// With w = u h^2:
//   C(w) = cosh(sqrt w) = sum w^n / (2n)!
//   S(w) = sinh(sqrt w)/sqrt w = sum w^n / (2n+1)!
//   E(w) = (C(w) - S(w)) / w = sum w^m (2m+2)/(2m+3)!     (E(0) = 1/3)
// All three are entire, so no square-root branch is ever chosen; sqrt only
// appears inside even combinations.

#include <cmath>
#include <complex>

#include "ghostspec/errors.hpp"

namespace ghostspec {

using complex = std::complex<double>;

struct cs_values {
  complex c;  // C(w)
  complex s;  // S(w)
  complex e;  // E(w)
};

namespace detail {

// |w| <= series_radius: degree-10 Maclaurin; next C term at the radius is
// 0.25^11/22! ~ 5e-28, far below double round-off.
inline constexpr double series_radius = 0.25;

inline cs_values cs_series(complex w) {
  complex c{1.0, 0.0}, s{1.0, 0.0}, e{1.0 / 3.0, 0.0};
  complex wn{1.0, 0.0};
  double cfac = 1.0, sfac = 1.0;  // (2n)!, (2n+1)!
  for (int n = 1; n <= 10; ++n) {
    wn *= w;
    cfac *= (2 * n - 1) * (2 * n);
    sfac *= (2 * n) * (2 * n + 1);
    c += wn / cfac;
    s += wn / sfac;
    // E coefficient: (2n+2)/(2n+3)! with (2n+3)! = (2n+1)! (2n+2)(2n+3)
    e += wn * ((2.0 * n + 2.0) / (sfac * (2 * n + 2) * (2 * n + 3)));
  }
  return {c, s, e};
}

}  // namespace detail

inline cs_values cs_eval(complex w) {
  const double aw = std::abs(w);
  if (aw <= detail::series_radius) return detail::cs_series(w);
  const complex rw = std::sqrt(w);  // branch irrelevant: C, S, E are even in rw
  if (std::abs(rw.real()) > 700.0 || std::abs(rw.imag()) > 1e18)
    throw overflow_error(aw);
  const complex c = std::cosh(rw);
  const complex s = std::sinh(rw) / rw;
  return {c, s, (c - s) / w};
}

// One exact step of y'' = u y over [0, h]:  (y, y') -> (y1, y1').
struct flow_step {
  complex y, dy;
};

inline flow_step propagate_flow(complex u, double h, complex y, complex dy) {
  const cs_values k = cs_eval(u * h * h);
  return {y * k.c + dy * (h * k.s), y * (u * h * k.s) + dy * k.c};
}

// Same step augmented with the lambda-derivative pair (z, z') solving
// z'' = u z - r0 y, z(0) = z0, z'(0) = v0  (u = q0 - lambda r0, du/dlambda = -r0).
// Closed form of the forced integrals:
//   z1  = C z + hS v - r0 [ (h^2/2) S y + (h^3/2) E y' ]
//   z1' = uhS z + C v - r0 [ (h/2)(C+S) y + (h^2/2) S y' ]
struct variational_step {
  complex y, dy, z, dz;
};

inline variational_step propagate_flow_variational(complex u, double r0, double h,
                                                   complex y, complex dy,
                                                   complex z, complex dz) {
  const cs_values k = cs_eval(u * h * h);
  const complex uhs = u * h * k.s;
  variational_step out;
  out.y = y * k.c + dy * (h * k.s);
  out.dy = y * uhs + dy * k.c;
  out.z = z * k.c + dz * (h * k.s) -
          r0 * (y * (0.5 * h * h * k.s) + dy * (0.5 * h * h * h * k.e));
  out.dz = z * uhs + dz * k.c -
           r0 * (y * (0.5 * h * (k.c + k.s)) + dy * (0.5 * h * h * k.s));
  return out;
}

}  // namespace ghostspec
