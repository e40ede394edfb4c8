#pragma once

// Problem model: -y'' + q y = lambda r y on [a,b], y(a) = y(b) = 0, with the
// initial slope y'(a) fixed. A problem is non-definite when the weight r takes
// both signs; the interesting search targets are its non-real eigenvalues.

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "ghostspec/piecewise.hpp"

namespace ghostspec {

struct sl_problem {
  double a = -1.0, b = 1.0;
  piecewise_poly q, r;
  std::complex<double> init_slope{1.0, 0.0};

  void validate() const {
    if (!(a < b)) throw parse_error("problem: need a < b");
    q.validate();
    r.validate();
    const double tol = 1e-12 * (std::abs(a) + std::abs(b) + 1);
    if (std::abs(q.a() - a) > tol || std::abs(q.b() - b) > tol)
      throw parse_error("problem: q must cover exactly [a, b]");
    if (std::abs(r.a() - a) > tol || std::abs(r.b() - b) > tol)
      throw parse_error("problem: r must cover exactly [a, b]");
    if (init_slope == std::complex<double>{0.0, 0.0})
      throw parse_error("problem: init_slope must be nonzero");
  }
};

enum class weight_kind {
  definite,
  single_turning_point,
  turning_interval,
  multi_turning,
  degenerate_endpoint_zero,
};

struct signed_interval {
  double lo, hi;
  int sign;  // -1, 0, +1
};

struct weight_profile {
  std::vector<signed_interval> sign_pattern;
  weight_kind kind = weight_kind::definite;
  std::optional<double> c, d;  // zero interval [c, d]; c == d for a single point
};

inline constexpr double default_weight_tol = 1e-12;

namespace detail {

// maximal constant-sign subintervals of one polynomial piece
inline void append_piece_signs(std::vector<signed_interval>& out, const poly3& p,
                               double x_lo, double x_hi, double tol) {
  bool all_small = true;
  for (double c : p) all_small = all_small && std::abs(c) <= tol;
  if (all_small) {
    out.push_back({x_lo, x_hi, 0});
    return;
  }
  const double len = x_hi - x_lo;
  std::vector<double> cuts{0.0};
  for (double t : poly_real_roots_in(p, 0.0, len))
    if (t > 1e-14 * len && t < len * (1 - 1e-14)) cuts.push_back(t);
  cuts.push_back(len);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    double v = poly_eval(p, mid);
    // guard the sign with a few Chebyshev samples of the subinterval
    for (int k = 0; k < 5; ++k) {
      const double t = 0.5 * (cuts[i] + cuts[i + 1]) +
                       0.5 * (cuts[i + 1] - cuts[i]) * std::cos((2 * k + 1) * M_PI / 10);
      const double s = poly_eval(p, t);
      if (std::abs(s) > std::abs(v)) v = s;
    }
    const int sign = v > 0 ? 1 : (v < 0 ? -1 : 0);
    out.push_back({x_lo + cuts[i], x_lo + cuts[i + 1], sign});
  }
}

}  // namespace detail

inline weight_profile classify_weight(const piecewise_poly& r,
                                      double tol = default_weight_tol) {
  weight_profile out;
  std::vector<signed_interval> raw;
  for (std::size_t i = 0; i < r.piece_count(); ++i)
    detail::append_piece_signs(raw, r.pieces[i], r.breakpoints[i], r.breakpoints[i + 1], tol);
  // merge adjacent intervals of equal sign
  for (const auto& seg : raw) {
    if (!out.sign_pattern.empty() && out.sign_pattern.back().sign == seg.sign)
      out.sign_pattern.back().hi = seg.hi;
    else
      out.sign_pattern.push_back(seg);
  }

  const auto& pat = out.sign_pattern;
  const double a = r.a(), b = r.b();
  bool endpoint_zero = false;
  for (const auto& seg : pat)
    if (seg.sign == 0 && (seg.lo == a || seg.hi == b)) endpoint_zero = true;
  if (endpoint_zero) {
    out.kind = weight_kind::degenerate_endpoint_zero;
    return out;
  }

  // reduced pattern of nonzero blocks; interior zero blocks remembered by index
  std::vector<int> nz_signs;
  std::vector<std::size_t> nz_index;
  for (std::size_t i = 0; i < pat.size(); ++i)
    if (pat[i].sign != 0) {
      nz_signs.push_back(pat[i].sign);
      nz_index.push_back(i);
    }

  int changes = 0;
  for (std::size_t i = 0; i + 1 < nz_signs.size(); ++i)
    if (nz_signs[i] != nz_signs[i + 1]) ++changes;

  if (changes == 0) {
    out.kind = weight_kind::definite;  // one-signed (zero blocks allowed inside)
  } else if (changes == 1 && nz_signs.size() == 2) {
    const std::size_t iL = nz_index[0], iR = nz_index[1];
    if (iR == iL + 1) {
      out.kind = weight_kind::single_turning_point;
      out.c = out.d = pat[iL].hi;
    } else if (iR == iL + 2 && pat[iL + 1].sign == 0) {
      out.kind = weight_kind::turning_interval;
      out.c = pat[iL + 1].lo;
      out.d = pat[iL + 1].hi;
    } else {
      out.kind = weight_kind::multi_turning;
    }
  } else {
    out.kind = weight_kind::multi_turning;
  }
  return out;
}

inline bool is_nondefinite(const piecewise_poly& r, double tol = default_weight_tol) {
  bool pos = false, neg = false;
  for (const auto& seg : classify_weight(r, tol).sign_pattern) {
    pos = pos || seg.sign > 0;
    neg = neg || seg.sign < 0;
  }
  return pos && neg;
}

// true when the weight matches the single-turning-point / turning-interval
// shape for which the one-signedness and separation properties are guaranteed
inline bool is_turning_profile(const weight_profile& p) {
  return p.kind == weight_kind::single_turning_point ||
         p.kind == weight_kind::turning_interval;
}

inline double min_of_q(const sl_problem& prob) { return prob.q.range().min; }

}  // namespace ghostspec
