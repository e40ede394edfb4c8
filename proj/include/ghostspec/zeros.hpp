#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "integrate.hpp"

namespace ghostspec {

// Real-valued view of one Cartesian component of a (rotated) complex
// trajectory: value(x) = Re or Im of rotation * y(x).
struct component_view {
  const trajectory* traj = nullptr;
  complex rotation{1, 0};
  bool imag_part = false;

  double a() const { return traj->a(); }
  double b() const { return traj->b(); }

  double value(double x) const {
    const state s = traj->eval(x);
    const complex v = rotation * s.y;
    return imag_part ? v.imag() : v.real();
  }
  double slope(double x) const {
    const state s = traj->eval(x);
    const complex v = rotation * s.dy;
    return imag_part ? v.imag() : v.real();
  }
};

struct cluster_warning {
  double x = 0;
  double magnitude = 0;  // |component| at the suspicious local minimum
};

struct zero_list {
  double a = 0, b = 0;
  std::vector<double> zeros;  // strictly interior, sorted
  bool endpoint_zero_a = false;
  bool endpoint_zero_b = false;
  std::vector<cluster_warning> cluster_warnings;
};

namespace detail {

template <class F>
double bisect_zero(const F& f, double lo, double hi, double flo, double xtol) {
  for (int it = 0; it < 80 && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((flo < 0) != (fm < 0)) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Sign-change bracketing on a doubling grid, bisection refinement, endpoint
// bucketing, and tangential-zero warnings.  The returned interior count is
// stable under grid doubling.
template <class F>
zero_list locate_zeros_of(const F& fval, double a, double b, double endpoint_tol) {
  if (!(endpoint_tol > 0)) throw domain_error("endpoint_tol must be positive");
  const double span = b - a;
  const double xtol = 1e-12 * span;

  struct scan_result {
    std::vector<double> roots;
    std::vector<cluster_warning> clusters;
    double sup = 0;
  };
  auto scan = [&](std::size_t n) {
    scan_result out;
    std::vector<double> xs(n + 1), vs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      xs[i] = a + span * static_cast<double>(i) / static_cast<double>(n);
      vs[i] = fval(xs[i]);
      out.sup = std::max(out.sup, std::abs(vs[i]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (vs[i] == 0.0) {
        if (i > 0) out.roots.push_back(xs[i]);
        continue;
      }
      if (vs[i + 1] == 0.0) continue;  // handled as left sample of next cell
      if ((vs[i] < 0) != (vs[i + 1] < 0))
        out.roots.push_back(
            detail::bisect_zero(fval, xs[i], xs[i + 1], vs[i], xtol));
    }
    const double cluster_tol = 1e-6 * out.sup;
    for (std::size_t i = 1; i + 1 <= n; ++i) {
      if (vs[i] == 0.0) continue;
      const bool local_min = std::abs(vs[i]) <= std::abs(vs[i - 1]) &&
                             std::abs(vs[i]) <= std::abs(vs[i + 1]);
      const bool same_sign = (vs[i - 1] < 0) == (vs[i] < 0) &&
                             (vs[i] < 0) == (vs[i + 1] < 0);
      if (local_min && same_sign && std::abs(vs[i]) < cluster_tol)
        out.clusters.push_back({xs[i], std::abs(vs[i])});
    }
    return out;
  };

  std::size_t n = 512;
  scan_result prev = scan(n);
  if (prev.sup == 0.0)
    throw domain_error("component is identically zero on the sample grid");
  scan_result cur;
  bool stable = false;
  for (int round = 0; round < 8; ++round) {
    n *= 2;
    cur = scan(n);
    if (cur.roots.size() == prev.roots.size()) {
      bool same = true;
      for (std::size_t i = 0; i < cur.roots.size(); ++i)
        same = same && std::abs(cur.roots[i] - prev.roots[i]) <= 1e-10 * span;
      if (same) {
        stable = true;
        break;
      }
    }
    prev = cur;
  }
  if (!stable)
    throw convergence_error("zero count failed to stabilize under grid doubling");

  zero_list out;
  out.a = a;
  out.b = b;
  const double endpoint_val_tol = 1e-12 * std::max(cur.sup, 1e-300);
  out.endpoint_zero_a = std::abs(fval(a)) <= endpoint_val_tol;
  out.endpoint_zero_b = std::abs(fval(b)) <= endpoint_val_tol;
  for (double r : cur.roots) {
    if (r - a <= endpoint_tol) {
      out.endpoint_zero_a = true;
    } else if (b - r <= endpoint_tol) {
      out.endpoint_zero_b = true;
    } else {
      out.zeros.push_back(r);
    }
  }
  std::sort(out.zeros.begin(), out.zeros.end());
  // drop warnings that merely echo a genuine located zero
  for (const auto& c : cur.clusters) {
    bool near_root = false;
    for (double r : cur.roots)
      near_root = near_root || std::abs(c.x - r) <= 2.0 * span / static_cast<double>(n);
    if (!near_root) out.cluster_warnings.push_back(c);
  }
  return out;
}

inline zero_list locate_zeros(const component_view& comp, double endpoint_tol) {
  return locate_zeros_of([&](double x) { return comp.value(x); }, comp.a(),
                         comp.b(), endpoint_tol);
}

struct interlace_violation {
  double lo = 0, hi = 0;   // offending gap between consecutive same-component zeros
  int other_count = 0;     // zeros of the other component found in the gap
  bool coincident = false; // lo == hi: a shared zero of both components
};

struct interlace_result {
  bool ok = false;
  std::vector<interlace_violation> violations;
};

// Strict alternation of the interior zeros of the two components: between any
// two consecutive zeros of either list lies exactly one zero of the other,
// and no zero is shared.
inline interlace_result check_interior_interlacing(const zero_list& zphi,
                                                   const zero_list& zpsi) {
  const double span = std::max(zphi.b - zphi.a, 1e-300);
  const double coincide_tol = 1e-9 * span;
  interlace_result res;
  res.ok = true;

  struct tagged {
    double x;
    int who;  // 0 = first list, 1 = second
  };
  std::vector<tagged> merged;
  merged.reserve(zphi.zeros.size() + zpsi.zeros.size());
  for (double x : zphi.zeros) merged.push_back({x, 0});
  for (double x : zpsi.zeros) merged.push_back({x, 1});
  std::sort(merged.begin(), merged.end(),
            [](const tagged& u, const tagged& v) { return u.x < v.x; });

  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    if (std::abs(merged[i + 1].x - merged[i].x) <= coincide_tol &&
        merged[i].who != merged[i + 1].who) {
      res.ok = false;
      res.violations.push_back({merged[i].x, merged[i].x, 0, true});
    }
  }
  auto gaps = [&](const std::vector<double>& own, const std::vector<double>& other) {
    for (std::size_t i = 0; i + 1 < own.size(); ++i) {
      int cnt = 0;
      for (double x : other)
        if (x > own[i] + coincide_tol && x < own[i + 1] - coincide_tol) ++cnt;
      if (cnt != 1) {
        res.ok = false;
        res.violations.push_back({own[i], own[i + 1], cnt, false});
      }
    }
  };
  gaps(zphi.zeros, zpsi.zeros);
  gaps(zpsi.zeros, zphi.zeros);
  return res;
}

// Endpoint-inclusive separation must FAIL for a genuine ghost: both
// components vanish at both endpoints, so zeros coincide there.  Returns true
// when the expected failure is observed; a clean endpoint-inclusive
// alternation is the anomalous outcome and returns false.
inline bool endpoint_nonseparation_audit(const zero_list& zphi,
                                         const zero_list& zpsi) {
  auto inclusive = [](const zero_list& z) {
    std::vector<double> v;
    if (z.endpoint_zero_a) v.push_back(z.a);
    v.insert(v.end(), z.zeros.begin(), z.zeros.end());
    if (z.endpoint_zero_b) v.push_back(z.b);
    return v;
  };
  zero_list pa = zphi, pb = zpsi;
  pa.zeros = inclusive(zphi);
  pb.zeros = inclusive(zpsi);
  pa.endpoint_zero_a = pa.endpoint_zero_b = false;
  pb.endpoint_zero_a = pb.endpoint_zero_b = false;
  interlace_result r = check_interior_interlacing(pa, pb);
  return !r.ok;
}

}  // namespace ghostspec
