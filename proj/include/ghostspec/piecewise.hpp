#pragma once

// Piecewise polynomials of degree <= 3 on a breakpoint grid. Coefficients are
// stored per piece in the local variable t = x - x_j. Functions are piecewise
// continuous: at an interior breakpoint the right piece wins.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ghostspec/errors.hpp"

namespace ghostspec {

using poly3 = std::array<double, 4>;  // c0 + c1 t + c2 t^2 + c3 t^3

inline double poly_eval(const poly3& c, double t) {
  return ((c[3] * t + c[2]) * t + c[1]) * t + c[0];
}

inline poly3 poly_derivative(const poly3& c) {
  return {c[1], 2.0 * c[2], 3.0 * c[3], 0.0};
}

inline int poly_degree(const poly3& c) {
  for (int d = 3; d > 0; --d)
    if (c[d] != 0.0) return d;
  return 0;
}

// re-center: p(t) -> p(t + delta), coefficients in the new local variable
inline poly3 poly_shift(const poly3& c, double delta) {
  const double d = delta, d2 = d * d, d3 = d2 * d;
  return {c[0] + c[1] * d + c[2] * d2 + c[3] * d3,
          c[1] + 2 * c[2] * d + 3 * c[3] * d2,
          c[2] + 3 * c[3] * d,
          c[3]};
}

// Real roots in [lo, hi], ascending, deduplicated. Closed forms for degree <= 2,
// trigonometric/Cardano solution plus a Newton polish for cubics.
inline std::vector<double> poly_real_roots_in(const poly3& c, double lo, double hi) {
  std::vector<double> roots;
  const int deg = poly_degree(c);
  auto push = [&](double t) {
    if (!(t >= lo - 1e-14 * (1 + std::abs(lo)) && t <= hi + 1e-14 * (1 + std::abs(hi))))
      return;
    t = std::clamp(t, lo, hi);
    for (double r : roots)
      if (std::abs(r - t) <= 1e-12 * (1.0 + std::abs(t))) return;
    roots.push_back(t);
  };
  if (deg == 0) {
    // constant: either no roots or identically zero (callers treat that case
    // through the zero-piece tolerance, not through roots)
  } else if (deg == 1) {
    push(-c[0] / c[1]);
  } else if (deg == 2) {
    const double a = c[2], b = c[1], c0 = c[0];
    const double disc = b * b - 4 * a * c0;
    if (disc >= 0) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (b + (b >= 0 ? sq : -sq));
      push(q / a);
      if (q != 0.0) push(c0 / q);
      else push(-b / a - q / a);
    }
  } else {
    // depressed cubic t = s - b/(3a):  s^3 + p s + q = 0
    const double a = c[3], b = c[2], cc = c[1], d = c[0];
    const double shift = -b / (3 * a);
    const double p = (3 * a * cc - b * b) / (3 * a * a);
    const double q = (2 * b * b * b - 9 * a * b * cc + 27 * a * a * d) / (27 * a * a * a);
    const double disc = -(4 * p * p * p + 27 * q * q);
    std::vector<double> cand;
    if (disc > 0) {
      // three real roots
      const double m = 2 * std::sqrt(-p / 3);
      const double theta = std::acos(std::clamp(3 * q / (p * m), -1.0, 1.0)) / 3;
      for (int k = 0; k < 3; ++k)
        cand.push_back(m * std::cos(theta - 2 * M_PI * k / 3) + shift);
    } else {
      // one real root (Cardano)
      const double h = std::sqrt(std::max(0.0, q * q / 4 + p * p * p / 27));
      const double u = std::cbrt(-q / 2 + h), v = std::cbrt(-q / 2 - h);
      cand.push_back(u + v + shift);
    }
    // Newton polish against the original coefficients
    const poly3 dc = poly_derivative(c);
    for (double t : cand) {
      for (int it = 0; it < 3; ++it) {
        const double f = poly_eval(c, t), df = poly_eval(dc, t);
        if (df != 0.0) t -= f / df;
      }
      push(t);
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

struct poly_range_t {
  double min, max;
};

// Exact range over [lo, hi] via endpoints plus critical points.
inline poly_range_t poly_range(const poly3& c, double lo, double hi) {
  double mn = std::min(poly_eval(c, lo), poly_eval(c, hi));
  double mx = std::max(poly_eval(c, lo), poly_eval(c, hi));
  for (double t : poly_real_roots_in(poly_derivative(c), lo, hi)) {
    const double v = poly_eval(c, t);
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  return {mn, mx};
}

struct piecewise_poly {
  std::vector<double> breakpoints;  // x_0 < x_1 < ... < x_m, m >= 1
  std::vector<poly3> pieces;        // size m, local coordinates

  double a() const { return breakpoints.front(); }
  double b() const { return breakpoints.back(); }
  std::size_t piece_count() const { return pieces.size(); }

  void validate() const {
    if (breakpoints.size() < 2) throw parse_error("piecewise: need at least 2 breakpoints");
    if (pieces.size() + 1 != breakpoints.size())
      throw parse_error("piecewise: piece count must be breakpoints - 1");
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
      if (!(breakpoints[i] < breakpoints[i + 1]))
        throw parse_error("piecewise: breakpoints must be strictly increasing");
      if (!std::isfinite(breakpoints[i]) || !std::isfinite(breakpoints[i + 1]))
        throw parse_error("piecewise: non-finite breakpoint");
    }
    for (const auto& p : pieces)
      for (double v : p)
        if (!std::isfinite(v)) throw parse_error("piecewise: non-finite coefficient");
  }

  // right-piece convention at interior breakpoints; x = b uses the last piece
  std::size_t piece_index(double x) const {
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    const std::ptrdiff_t i = (it - breakpoints.begin()) - 1;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        i, 0, static_cast<std::ptrdiff_t>(pieces.size()) - 1));
  }

  double eval(double x) const {
    const std::size_t i = piece_index(x);
    return poly_eval(pieces[i], x - breakpoints[i]);
  }

  int degree_of_piece(std::size_t i) const { return poly_degree(pieces[i]); }
  bool piece_is_constant(std::size_t i) const { return poly_degree(pieces[i]) == 0; }

  bool is_constant_on(double lo, double hi) const {
    const std::size_t i0 = piece_index(lo);
    std::size_t i1 = piece_index(hi);
    if (i1 > i0 && hi <= breakpoints[i1]) --i1;
    const double v = pieces[i0][0];
    for (std::size_t i = i0; i <= i1; ++i)
      if (!piece_is_constant(i) || pieces[i][0] != v) return false;
    return true;
  }

  poly_range_t range() const {
    poly_range_t r{poly_eval(pieces[0], 0), poly_eval(pieces[0], 0)};
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const auto pr = poly_range(pieces[i], 0.0, breakpoints[i + 1] - breakpoints[i]);
      r.min = std::min(r.min, pr.min);
      r.max = std::max(r.max, pr.max);
    }
    return r;
  }

  static piecewise_poly constant(double a, double b, double value) {
    piecewise_poly p;
    p.breakpoints = {a, b};
    p.pieces = {{value, 0, 0, 0}};
    return p;
  }
};

}  // namespace ghostspec
