#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "integrate.hpp"
#include "problem.hpp"
#include "zeros.hpp"

namespace ghostspec {

struct box {
  double re0 = 0, re1 = 0, im0 = 0, im1 = 0;

  double width() const { return re1 - re0; }
  double height() const { return im1 - im0; }
  complex center() const { return {0.5 * (re0 + re1), 0.5 * (im0 + im1)}; }
  bool contains(complex z) const {
    return z.real() >= re0 && z.real() <= re1 && z.imag() >= im0 && z.imag() <= im1;
  }
  box inflated(double factor) const {
    const complex c = center();
    const double hw = 0.5 * width() * factor, hh = 0.5 * height() * factor;
    return {c.real() - hw, c.real() + hw, c.imag() - hh, c.imag() + hh};
  }
};

struct solve_options {
  double rtol = 1e-10;
  double atol = 1e-12;
  double eigen_tol = 1e-9;   // accepted |D| / sup|y|
  int n_boundary = 256;      // initial boundary samples per box
};

enum class multiplicity { simple, suspected_multiple };

struct eigen_pair {
  complex lambda;            // Im > 0; the conjugate partner is implied
  trajectory traj;
  double residual = 0;       // |D(lambda)| / sup|y|
  multiplicity multiplicity_flag = multiplicity::simple;
};

struct spectrum_report {
  std::vector<double> real_eigs;
  std::vector<eigen_pair> nonreal_pairs;
  int richardson_N = 0;
  bool bound_ok = false;
  box search_region;
  std::array<double, 2> real_window{};
};

inline complex miss_distance(const sl_problem& prob, complex lambda,
                             const solve_options& opts = {}) {
  return integrate(prob, lambda, opts.rtol, opts.atol).end_value().unscaled();
}

namespace detail {

struct miss_sample {
  scaled_value D;
  double sup_log2 = 0;

  double residual() const { return std::exp2(D.log2_abs() - sup_log2); }
  double arg() const { return std::atan2(D.v.imag(), D.v.real()); }
};

inline miss_sample sample_miss(const sl_problem& prob, complex lambda,
                               const solve_options& opts) {
  trajectory tr = integrate(prob, lambda, opts.rtol, opts.atol);
  return {tr.end_value(), tr.sup_log2};
}

struct newton_sample {
  scaled_value D, dD;
  double sup_log2 = 0;

  double residual() const { return std::exp2(D.log2_abs() - sup_log2); }
  double d_residual() const { return std::exp2(dD.log2_abs() - sup_log2); }
};

inline newton_sample sample_newton(const sl_problem& prob, complex lambda,
                                   const solve_options& opts) {
  variational_result vr = variational_integrate(prob, lambda, opts.rtol, opts.atol);
  return {vr.base.end_value(), vr.z_end, vr.base.sup_log2};
}

constexpr double boundary_residual_floor = 1e-12;

inline double wrap_angle(double d) {
  const double pi = 3.14159265358979323846264338327950288;
  while (d > pi) d -= 2 * pi;
  while (d <= -pi) d += 2 * pi;
  return d;
}

}  // namespace detail

// Winding number of the miss distance around zero along the rectangle
// boundary; equals the zero count inside (with multiplicity).  Every segment
// is checked at its midpoint and refined while either adjacent phase steps
// reach pi/2 or the midpoint magnitude dips well below both endpoints (the
// signature of zeros whirling the phase between two samples).
inline int count_in_box(const sl_problem& prob, const box& rect,
                        int n_boundary = 256, const solve_options& opts = {}) {
  if (!(rect.re1 > rect.re0) || !(rect.im1 > rect.im0))
    throw domain_error("count_in_box: degenerate rectangle");
  if (n_boundary < 64) throw domain_error("count_in_box: n_boundary must be >= 64");

  const double pi = 3.14159265358979323846264338327950288;
  struct pt {
    complex z;
    double arg;
    double res;
  };
  auto eval = [&](complex z) -> pt {
    detail::miss_sample m = detail::sample_miss(prob, z, opts);
    if (m.residual() < detail::boundary_residual_floor)
      throw boundary_zero_error{z, m.residual()};
    return {z, m.arg(), m.residual()};
  };

  const std::array<complex, 4> corners = {complex{rect.re0, rect.im0},
                                          complex{rect.re1, rect.im0},
                                          complex{rect.re1, rect.im1},
                                          complex{rect.re0, rect.im1}};
  const int per_edge = std::max(n_boundary / 4, 16);

  double total = 0;
  const auto segment = [&](const pt& p1, const pt& p2, int depth, auto&& self) -> void {
    const pt mid = eval(0.5 * (p1.z + p2.z));
    const double d1 = detail::wrap_angle(mid.arg - p1.arg);
    const double d2 = detail::wrap_angle(p2.arg - mid.arg);
    const bool dip = mid.res < 0.5 * std::min(p1.res, p2.res);
    if (std::abs(d1) < 0.5 * pi && std::abs(d2) < 0.5 * pi && !dip) {
      total += d1 + d2;
      return;
    }
    if (depth > 40) throw boundary_zero_error{mid.z, mid.res};
    self(p1, mid, depth + 1, self);
    self(mid, p2, depth + 1, self);
  };

  pt first = eval(corners[0]);
  pt prev = first;
  for (int e = 0; e < 4; ++e) {
    const complex z0 = corners[static_cast<std::size_t>(e)];
    const complex z1 = corners[static_cast<std::size_t>((e + 1) % 4)];
    for (int i = 1; i <= per_edge; ++i) {
      const double t = static_cast<double>(i) / per_edge;
      pt cur = (e == 3 && i == per_edge) ? first : eval(z0 + t * (z1 - z0));
      segment(prev, cur, 0, segment);
      prev = cur;
    }
  }
  const double w = total / (2 * pi);
  const double rounded = std::round(w);
  if (std::abs(w - rounded) > 0.25)
    throw convergence_error("winding number failed to settle on an integer");
  return static_cast<int>(rounded);
}

namespace detail {

inline int count_with_inflation(const sl_problem& prob, box& rect, int n_boundary,
                                const solve_options& opts) {
  const double im0_floor = rect.im0;
  for (int k = 0; k < 40; ++k) {
    try {
      return count_in_box(prob, rect, n_boundary, opts);
    } catch (const boundary_zero_error&) {
      rect = rect.inflated(1.0 + 0.01 * std::exp2(-k));
      // inflation must not drag the bottom edge onto or below the real axis,
      // where the real spectrum lives
      if (im0_floor > 0 && rect.im0 <= 0) rect.im0 = im0_floor * std::exp2(-(k + 1));
    }
  }
  throw convergence_error("box boundary could not be moved off a zero");
}

struct newton_result {
  complex lambda;
  double residual = std::numeric_limits<double>::infinity();
  bool derivative_collapse = false;
};

// Damped Newton iteration on the miss distance from a seed eigenvalue guess,
// using the analytic lambda-derivative from the augmented system.
inline newton_result newton_polish(const sl_problem& prob, complex seed,
                                   const solve_options& opts) {
  newton_result out;
  complex lam = seed;
  out.lambda = lam;
  for (int it = 0; it < 40; ++it) {
    newton_sample ns = sample_newton(prob, lam, opts);
    if (ns.residual() < out.residual) {
      out.residual = ns.residual();
      out.lambda = lam;
    }
    if (ns.d_residual() < 1e-12) {
      out.derivative_collapse = true;
      break;
    }
    complex step = ns.D.v / ns.dD.v;
    const double cap = 0.5 * (1.0 + std::abs(lam));
    if (std::abs(step) > cap) step *= cap / std::abs(step);
    lam -= step;
    if (std::abs(step) < 1e-13 * (1.0 + std::abs(lam))) {
      newton_sample fin = sample_newton(prob, lam, opts);
      if (fin.residual() < out.residual) {
        out.residual = fin.residual();
        out.lambda = lam;
      }
      break;
    }
  }
  return out;
}

// offsets (as a fraction of the split extent) tried for the subdivision cut
inline const std::array<double, 13>& cut_offsets() {
  static const std::array<double, 13> o = {0.0,     0.01,     -0.01,    0.005,
                                           -0.005,  0.0025,   -0.0025,  0.00125,
                                           -0.00125, 0.02,    -0.02,    0.04,
                                           -0.04};
  return o;
}

}  // namespace detail

// All zeros of the miss distance inside rect (upper half-plane), isolated by
// recursive argument-principle subdivision to diameter 1e-6 and polished by
// Newton steps using the lambda-derivative from the augmented system.
inline std::vector<eigen_pair> find_nonreal(const sl_problem& prob, const box& rect,
                                            const solve_options& opts = {}) {
  if (!(rect.im0 > 0))
    throw domain_error("find_nonreal: rectangle must lie in the open upper half-plane");

  box outer = rect;
  const int total = detail::count_with_inflation(prob, outer, opts.n_boundary, opts);
  std::vector<eigen_pair> found;
  if (total == 0) return found;

  constexpr double isolation_diam = 1e-6;
  constexpr double newton_handoff_diam = 1.0;
  struct work {
    box rect;
    int count;
  };
  std::vector<work> stack{{outer, total}};

  auto accept_root = [&](complex lam, bool multiple_suspect) {
    eigen_pair ep;
    ep.lambda = lam;
    ep.traj = integrate(prob, lam, opts.rtol, opts.atol);
    ep.residual = std::exp2(ep.traj.end_value().log2_abs() - ep.traj.sup_log2);
    ep.multiplicity_flag =
        multiple_suspect ? multiplicity::suspected_multiple : multiplicity::simple;
    found.push_back(std::move(ep));
  };

  while (!stack.empty()) {
    work w = stack.back();
    stack.pop_back();
    const double diam = std::max(w.rect.width(), w.rect.height());

    if (diam <= isolation_diam) {
      // Newton refinement from the box center
      detail::newton_result nr = detail::newton_polish(prob, w.rect.center(), opts);
      if (nr.residual > opts.eigen_tol)
        throw convergence_error("Newton refinement did not reach the residual tolerance");
      if (std::abs(nr.lambda - w.rect.center()) > 1e3 * isolation_diam)
        throw convergence_error("Newton refinement escaped its isolation box");
      accept_root(nr.lambda, w.count > 1 || nr.derivative_collapse);
      continue;
    }

    if (w.count == 1 && diam <= newton_handoff_diam) {
      // a single zero in a modest box: try Newton from the center and verify
      // the root with one small recount instead of bisecting all the way down
      detail::newton_result nr = detail::newton_polish(prob, w.rect.center(), opts);
      if (nr.residual <= opts.eigen_tol && !nr.derivative_collapse &&
          w.rect.contains(nr.lambda)) {
        box tiny{nr.lambda.real() - 1e-4, nr.lambda.real() + 1e-4,
                 nr.lambda.imag() - 1e-4, nr.lambda.imag() + 1e-4};
        tiny.re0 = std::max(tiny.re0, w.rect.re0);
        tiny.re1 = std::min(tiny.re1, w.rect.re1);
        tiny.im0 = std::max(tiny.im0, w.rect.im0);
        tiny.im1 = std::min(tiny.im1, w.rect.im1);
        bool verified = false;
        try {
          verified = count_in_box(prob, tiny, opts.n_boundary, opts) == 1;
        } catch (const error&) {
          verified = false;  // inconclusive recount: take the subdivision path
        }
        if (verified) {
          accept_root(nr.lambda, false);
          continue;
        }
      }
    }

    const bool split_re = w.rect.width() >= w.rect.height();
    const double extent = split_re ? w.rect.width() : w.rect.height();
    bool done = false;
    for (double off : detail::cut_offsets()) {
      const double cut = (split_re ? 0.5 * (w.rect.re0 + w.rect.re1)
                                   : 0.5 * (w.rect.im0 + w.rect.im1)) +
                         off * extent;
      box left = w.rect, right = w.rect;
      if (split_re) {
        left.re1 = cut;
        right.re0 = cut;
      } else {
        left.im1 = cut;
        right.im0 = cut;
      }
      try {
        int cl = count_in_box(prob, left, opts.n_boundary, opts);
        int cr = count_in_box(prob, right, opts.n_boundary, opts);
        if (cl + cr != w.count) {
          // re-count everything at higher resolution; those counts win
          cl = count_in_box(prob, left, 4 * opts.n_boundary, opts);
          cr = count_in_box(prob, right, 4 * opts.n_boundary, opts);
          const int parent = count_in_box(prob, w.rect, 4 * opts.n_boundary, opts);
          if (cl + cr != parent)
            throw convergence_error("zero counts not additive under subdivision");
        }
        if (cl > 0) stack.push_back({left, cl});
        if (cr > 0) stack.push_back({right, cr});
        done = true;
        break;
      } catch (const boundary_zero_error&) {
        continue;  // move the cut and retry
      }
    }
    if (!done)
      throw convergence_error("could not place a subdivision cut away from all zeros");
  }

  std::sort(found.begin(), found.end(), [](const eigen_pair& u, const eigen_pair& v) {
    if (u.lambda.real() != v.lambda.real()) return u.lambda.real() < v.lambda.real();
    return u.lambda.imag() < v.lambda.imag();
  });
  // merge numerically identical roots (possible only for multiple zeros)
  std::vector<eigen_pair> out;
  for (auto& ep : found) {
    if (!out.empty() &&
        std::abs(ep.lambda - out.back().lambda) < 1e-8 * (1.0 + std::abs(ep.lambda))) {
      out.back().multiplicity_flag = multiplicity::suspected_multiple;
      continue;
    }
    out.push_back(std::move(ep));
  }
  return out;
}

namespace detail {

// Normalized real-valued miss distance for real lambda (real init slope).
inline double real_miss(const sl_problem& prob, double lambda,
                        const solve_options& opts) {
  trajectory tr = integrate(prob, complex{lambda, 0}, opts.rtol, opts.atol);
  const scaled_value D = tr.end_value();
  const double mag = std::exp2(D.log2_abs() - tr.sup_log2);
  return D.v.real() < 0 ? -mag : mag;
}

}  // namespace detail

struct real_scan_result {
  std::vector<double> eigs;
  std::vector<double> resolution_warnings;  // locations of unresolved near-zeros
};

inline real_scan_result find_real_detailed(const sl_problem& prob, double lo,
                                           double hi, const solve_options& opts = {}) {
  if (!(lo < hi)) throw domain_error("find_real: window must satisfy lo < hi");
  sl_problem p = prob;
  if (p.init_slope.imag() != 0.0) p.init_slope = {1, 0};  // eigenvalues are slope-independent

  auto f = [&](double lam) { return detail::real_miss(p, lam, opts); };
  const double span = hi - lo;

  struct scan {
    std::vector<double> roots;
    std::vector<double> clusters;
  };
  auto run = [&](std::size_t n) {
    scan out;
    std::vector<double> xs(n + 1), vs(n + 1);
    double sup = 0;
    for (std::size_t i = 0; i <= n; ++i) {
      xs[i] = lo + span * static_cast<double>(i) / static_cast<double>(n);
      vs[i] = f(xs[i]);
      sup = std::max(sup, std::abs(vs[i]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (vs[i] == 0.0) {
        out.roots.push_back(xs[i]);
        continue;
      }
      if (vs[i + 1] == 0.0) continue;
      if ((vs[i] < 0) != (vs[i + 1] < 0))
        out.roots.push_back(detail::bisect_zero(f, xs[i], xs[i + 1], vs[i], 1e-13 * span));
    }
    if (vs[n] == 0.0) out.roots.push_back(xs[n]);
    for (std::size_t i = 1; i + 1 <= n; ++i) {
      const bool local_min = std::abs(vs[i]) <= std::abs(vs[i - 1]) &&
                             std::abs(vs[i]) <= std::abs(vs[i + 1]);
      const bool same_sign = (vs[i - 1] < 0) == (vs[i] < 0) &&
                             (vs[i] < 0) == (vs[i + 1] < 0);
      if (local_min && same_sign && std::abs(vs[i]) < 1e-6 * sup)
        out.clusters.push_back(xs[i]);
    }
    return out;
  };

  std::size_t n = 512;
  scan prev = run(n);
  scan cur = prev;
  bool stable = false;
  for (int round = 0; round < 8; ++round) {
    n *= 2;
    cur = run(n);
    if (cur.roots.size() == prev.roots.size()) {
      stable = true;
      break;
    }
    prev = cur;
  }
  if (!stable)
    throw convergence_error("real-eigenvalue count failed to stabilize");

  real_scan_result out;
  for (double r : cur.roots) {
    // Newton polish via the augmented derivative
    double lam = r;
    for (int it = 0; it < 4; ++it) {
      detail::newton_sample ns = detail::sample_newton(p, {lam, 0}, opts);
      if (ns.d_residual() < 1e-12) break;
      const double step = (ns.D.v / ns.dD.v).real();
      if (!(std::abs(step) < span)) break;
      lam -= step;
      if (std::abs(step) < 1e-14 * (1.0 + std::abs(lam))) break;
    }
    if (lam < lo || lam > hi) lam = r;
    detail::newton_sample ns = detail::sample_newton(p, {lam, 0}, opts);
    if (ns.residual() > opts.eigen_tol)
      throw convergence_error("real eigenvalue refinement missed the residual tolerance");
    out.eigs.push_back(lam);
  }
  std::sort(out.eigs.begin(), out.eigs.end());
  out.eigs.erase(std::unique(out.eigs.begin(), out.eigs.end(),
                             [&](double u, double v) {
                               return std::abs(u - v) < 1e-10 * (1.0 + std::abs(u));
                             }),
                 out.eigs.end());
  out.resolution_warnings = cur.clusters;
  return out;
}

inline std::vector<double> find_real(const sl_problem& prob, double lo, double hi,
                                     const solve_options& opts = {}) {
  return find_real_detailed(prob, lo, hi, opts).eigs;
}

// Count of negative Dirichlet eigenvalues of the companion problem with unit
// weight, verified by the oscillation count of each eigenfunction.
inline int richardson_count_N(const sl_problem& prob, const solve_options& opts = {}) {
  sl_problem companion;
  companion.a = prob.a;
  companion.b = prob.b;
  companion.q = prob.q;
  companion.r = piecewise_poly::constant(prob.a, prob.b, 1.0);
  companion.init_slope = {1, 0};
  companion.validate();

  const double pi = 3.14159265358979323846264338327950288;
  const double L = prob.b - prob.a;
  const double lam_lo = min_of_q(prob) + (pi / L) * (pi / L) - 1.0;
  if (lam_lo >= 0) return 0;

  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<double> eigs = find_real(companion, lam_lo, 0.0, opts);
    std::vector<double> neg;
    for (double e : eigs)
      if (e < -1e-9 * std::max(1.0, std::abs(lam_lo))) neg.push_back(e);

    bool oscillation_ok = true;
    for (std::size_t k = 0; k < neg.size(); ++k) {
      trajectory tr = integrate(companion, {neg[k], 0}, opts.rtol, opts.atol);
      component_view re{&tr, {1, 0}, false};
      zero_list zl = locate_zeros(re, L * 1e-6);
      if (zl.zeros.size() != k) {
        oscillation_ok = false;
        break;
      }
    }
    if (oscillation_ok) return static_cast<int>(neg.size());
  }
  throw convergence_error("oscillation verification of the companion spectrum failed");
}

inline spectrum_report full_spectrum_report(const sl_problem& prob, const box& rect,
                                            std::array<double, 2> real_window,
                                            const solve_options& opts = {}) {
  spectrum_report rep;
  rep.search_region = rect;
  rep.real_window = real_window;
  rep.real_eigs = find_real(prob, real_window[0], real_window[1], opts);
  rep.nonreal_pairs = find_nonreal(prob, rect, opts);
  rep.richardson_N = richardson_count_N(prob, opts);
  rep.bound_ok = static_cast<int>(rep.nonreal_pairs.size()) <= rep.richardson_N;
  return rep;
}

}  // namespace ghostspec
