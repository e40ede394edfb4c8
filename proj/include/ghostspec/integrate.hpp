#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "kernels.hpp"
#include "problem.hpp"

namespace ghostspec {

// One point of a solution: y'' = (q(x) - lambda r(x)) y.
struct state {
  double x = 0;
  complex y{0, 0};
  complex dy{0, 0};
};

// Value carrying a binary scale exponent: true value = v * 2^exp.
// exp is 0 unless the trajectory grew past the rescale threshold.
struct scaled_value {
  complex v{0, 0};
  int exp = 0;

  complex unscaled() const {
    return {std::ldexp(v.real(), exp), std::ldexp(v.imag(), exp)};
  }
  double log2_abs() const { return 0.5 * std::log2(std::norm(v)) + exp; }
};

namespace detail {

constexpr double rescale_threshold = 1e100;
constexpr int rescale_shift = 512;

struct cpoly {  // complex cubic in a local variable
  std::array<complex, 4> c{};

  complex eval(double t) const { return ((c[3] * t + c[2]) * t + c[1]) * t + c[0]; }
  bool is_constant() const { return c[1] == 0.0 && c[2] == 0.0 && c[3] == 0.0; }
  double max_abs(double len) const {
    double m = 0;
    for (int i = 0; i <= 8; ++i) m = std::max(m, std::abs(eval(len * i / 8.0)));
    return 1.25 * m + 1.0;
  }
};

}  // namespace detail

enum class segment_method { closed_form, adaptive };

// Dense-output segment between consecutive trajectory nodes.
// closed_form: constant u, re-propagated exactly from the left node.
// adaptive: two-point quintic Hermite (value, slope, and curvature u*y at
// both ends of the step).
struct traj_segment {
  segment_method method = segment_method::closed_form;
  complex u{0, 0};        // closed_form: the constant coefficient
  complex u_left{0, 0};   // adaptive: u at the segment ends
  complex u_right{0, 0};
};

class trajectory {
 public:
  complex lambda{0, 0};
  std::vector<state> nodes;      // stored at per-node scale node_exp[i]
  std::vector<int> node_exp;     // cumulative power-of-two exponent per node
  std::vector<traj_segment> segments;
  double error_bound = 0;        // absolute, at the scale of sup_y()
  double sup_log2 = -std::numeric_limits<double>::infinity();

  double a() const { return nodes.front().x; }
  double b() const { return nodes.back().x; }
  std::size_t node_count() const { return nodes.size(); }

  // sup over nodes of |y| (guaranteed finite in log2 form via sup_log2)
  double sup_y() const { return std::exp2(sup_log2); }
  bool scaled() const { return node_exp.back() != 0; }

  scaled_value end_value() const { return {nodes.back().y, node_exp.back()}; }
  scaled_value end_slope() const { return {nodes.back().dy, node_exp.back()}; }

  state eval(double x) const {
    auto [s, e] = eval_scaled(x);
    s.y = scaled_value{s.y, e}.unscaled();
    s.dy = scaled_value{s.dy, e}.unscaled();
    return s;
  }

  // state at the scale 2^exp of the enclosing segment's left node
  std::pair<state, int> eval_scaled(double x) const {
    const double xa = a(), xb = b();
    if (!(x >= xa - 1e-12 * (xb - xa) && x <= xb + 1e-12 * (xb - xa)))
      throw domain_error("evaluation point outside trajectory range");
    x = std::clamp(x, xa, xb);
    std::size_t i = segment_index(x);
    const state& L = nodes[i];
    const state& R = nodes[i + 1];
    const traj_segment& seg = segments[i];
    const double h = R.x - L.x;
    const double t = x - L.x;
    state out;
    out.x = x;
    if (seg.method == segment_method::closed_form) {
      flow_step f = propagate_flow(seg.u, t, L.y, L.dy);
      out.y = f.y;
      out.dy = f.dy;
    } else {
      // quintic Hermite in s = t/h with scaled end data
      const int de = node_exp[i + 1] - node_exp[i];
      const complex Ry = {std::ldexp(R.y.real(), de), std::ldexp(R.y.imag(), de)};
      const complex Rdy = {std::ldexp(R.dy.real(), de), std::ldexp(R.dy.imag(), de)};
      const complex A = L.y, B = L.dy * h, C = seg.u_left * L.y * (h * h);
      const complex D = Ry, E = Rdy * h, F = seg.u_right * Ry * (h * h);
      const complex d = D - A;
      const complex a3 = 10.0 * d - 4.0 * E - 6.0 * B - 1.5 * C + 0.5 * F;
      const complex a4 = -15.0 * d + 7.0 * E + 8.0 * B + 1.5 * C - F;
      const complex a5 = 6.0 * d - 3.0 * E - 3.0 * B - 0.5 * C + 0.5 * F;
      const double s = t / h;
      out.y = ((((a5 * s + a4) * s + a3) * s + C * 0.5) * s + B) * s + A;
      out.dy = ((((5.0 * a5 * s + 4.0 * a4) * s + 3.0 * a3) * s + C) * s + B) / h;
    }
    return {out, node_exp[i]};
  }

  std::size_t segment_index(double x) const {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x,
                               [](double v, const state& s) { return v < s.x; });
    std::size_t i = static_cast<std::size_t>(it - nodes.begin());
    if (i > 0) --i;
    return std::min(i, segments.size() - 1);
  }
};

namespace detail {

// Dormand-Prince 5(4) tableau
struct dp5_tableau {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                          e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640,
                          e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
};

template <std::size_t N>
using cvec = std::array<complex, N>;

template <std::size_t N>
struct dp5_result {
  cvec<N> y1;
  double err;  // weighted RMS error estimate (accept if <= 1)
};

template <std::size_t N, class F>
dp5_result<N> dp5_step(const F& f, double x, const cvec<N>& y, double h,
                       double rtol, double atol) {
  using T = dp5_tableau;
  cvec<N> k1 = f(x, y), t{};
  auto axpy = [&](const cvec<N>& base, std::initializer_list<std::pair<double, const cvec<N>*>> terms) {
    cvec<N> r = base;
    for (auto& [c, k] : terms)
      for (std::size_t i = 0; i < N; ++i) r[i] += h * c * (*k)[i];
    return r;
  };
  t = axpy(y, {{T::a21, &k1}});
  cvec<N> k2 = f(x + T::c2 * h, t);
  t = axpy(y, {{T::a31, &k1}, {T::a32, &k2}});
  cvec<N> k3 = f(x + T::c3 * h, t);
  t = axpy(y, {{T::a41, &k1}, {T::a42, &k2}, {T::a43, &k3}});
  cvec<N> k4 = f(x + T::c4 * h, t);
  t = axpy(y, {{T::a51, &k1}, {T::a52, &k2}, {T::a53, &k3}, {T::a54, &k4}});
  cvec<N> k5 = f(x + T::c5 * h, t);
  t = axpy(y, {{T::a61, &k1}, {T::a62, &k2}, {T::a63, &k3}, {T::a64, &k4}, {T::a65, &k5}});
  cvec<N> k6 = f(x + h, t);
  cvec<N> y1 = axpy(y, {{T::b1, &k1}, {T::b3, &k3}, {T::b4, &k4}, {T::b5, &k5}, {T::b6, &k6}});
  cvec<N> k7 = f(x + h, y1);

  double acc = 0;
  for (std::size_t i = 0; i < N; ++i) {
    complex e = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] +
                     T::e5 * k5[i] + T::e6 * k6[i] + T::e7 * k7[i]);
    double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
    double q = std::abs(e) / sc;
    acc += q * q;
  }
  return {y1, std::sqrt(acc / N)};
}

struct merged_piece {
  double lo, hi;
  poly3 q_local;  // in (x - lo)
  poly3 r_local;
};

inline std::vector<merged_piece> merge_pieces(const sl_problem& p) {
  std::vector<double> cuts;
  cuts.reserve(p.q.breakpoints.size() + p.r.breakpoints.size());
  cuts.insert(cuts.end(), p.q.breakpoints.begin(), p.q.breakpoints.end());
  cuts.insert(cuts.end(), p.r.breakpoints.begin(), p.r.breakpoints.end());
  std::sort(cuts.begin(), cuts.end());
  const double tol = 1e-13 * (p.b - p.a);
  std::vector<double> merged;
  for (double c : cuts)
    if (merged.empty() || c - merged.back() > tol) merged.push_back(c);
  merged.front() = p.a;
  merged.back() = p.b;

  std::vector<merged_piece> out;
  out.reserve(merged.size() - 1);
  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    merged_piece mp;
    mp.lo = merged[i];
    mp.hi = merged[i + 1];
    std::size_t jq = p.q.piece_index(mp.lo);
    std::size_t jr = p.r.piece_index(mp.lo);
    mp.q_local = poly_shift(p.q.pieces[jq], mp.lo - p.q.breakpoints[jq]);
    mp.r_local = poly_shift(p.r.pieces[jr], mp.lo - p.r.breakpoints[jr]);
    out.push_back(mp);
  }
  return out;
}

// Engine shared by the plain and the variational integration.  The state is
// (y, y') or (y, y', z, z') with z'' = u z - r y driven by the base solution
// carried in the same vector (exactly the augmented first-order system).
template <bool Variational>
class integrator_core {
 public:
  static constexpr std::size_t NV = Variational ? 4 : 2;

  integrator_core(const sl_problem& p, complex lambda, double rtol, double atol)
      : prob_(p), lambda_(lambda), rtol_(rtol), atol_(atol) {
    if (!(rtol > 0) || !(atol > 0))
      throw domain_error("tolerances must be positive");
    pieces_ = merge_pieces(p);
  }

  trajectory run(const state& init) {
    if (std::abs(init.x - prob_.a) > 1e-12 * (prob_.b - prob_.a))
      throw domain_error("initial state must sit at the left endpoint");
    trajectory tr;
    tr.lambda = lambda_;
    cvec<NV> y{};
    y[0] = init.y;
    y[1] = init.dy;
    exp_ = 0;
    tr.nodes.push_back({prob_.a, y[0], y[1]});
    tr.node_exp.push_back(0);
    note_sup(tr, y[0]);
    for (const merged_piece& mp : pieces_) {
      cpoly u;
      for (int k = 0; k < 4; ++k)
        u.c[static_cast<std::size_t>(k)] =
            complex(mp.q_local[static_cast<std::size_t>(k)], 0) -
            lambda_ * mp.r_local[static_cast<std::size_t>(k)];
      if (u.is_constant() && (!Variational || poly_degree(mp.r_local) == 0))
        run_constant(tr, mp, u.c[0], y);
      else
        run_adaptive(tr, mp, u, y);
    }
    tr.error_bound = err_accum_ + rtol_ * tr.sup_y() + atol_;
    if constexpr (Variational) {
      var_end_ = {y[2], exp_};
      var_end_slope_ = {y[3], exp_};
    }
    return tr;
  }

  scaled_value var_end() const { return var_end_; }
  scaled_value var_end_slope() const { return var_end_slope_; }

 private:
  void note_sup(trajectory& tr, complex yv) {
    double n2 = std::norm(yv);
    if (n2 > 0)
      tr.sup_log2 = std::max(tr.sup_log2, 0.5 * std::log2(n2) + exp_);
  }

  void push_node(trajectory& tr, double x, cvec<NV>& y, const traj_segment& seg) {
    double m = 0;
    for (auto& c : y) m = std::max(m, std::max(std::abs(c.real()), std::abs(c.imag())));
    tr.nodes.push_back({x, y[0], y[1]});
    tr.node_exp.push_back(exp_);
    tr.segments.push_back(seg);
    note_sup(tr, y[0]);
    if (m > rescale_threshold) {
      for (auto& c : y)
        c = {std::ldexp(c.real(), -rescale_shift), std::ldexp(c.imag(), -rescale_shift)};
      exp_ += rescale_shift;
      tr.nodes.back().y = y[0];
      tr.nodes.back().dy = y[1];
      tr.node_exp.back() = exp_;
    }
  }

  void run_constant(trajectory& tr, const merged_piece& mp, complex u, cvec<NV>& y) {
    const double len = mp.hi - mp.lo;
    const double au = std::abs(u);
    double cap = (prob_.b - prob_.a) / 64.0;
    if (au > 1.0) cap = std::min(cap, 1.5 / std::sqrt(au));
    const int n = std::max(1, static_cast<int>(std::ceil(len / cap)));
    const double h = len / n;
    const double r0 = mp.r_local[0];
    for (int i = 0; i < n; ++i) {
      const double x1 = (i + 1 == n) ? mp.hi : mp.lo + (i + 1) * h;
      if constexpr (Variational) {
        variational_step st = propagate_flow_variational(u, r0, h, y[0], y[1], y[2], y[3]);
        y = {st.y, st.dy, st.z, st.dz};
      } else {
        flow_step st = propagate_flow(u, h, y[0], y[1]);
        y = {st.y, st.dy};
      }
      traj_segment seg;
      seg.method = segment_method::closed_form;
      seg.u = u;
      push_node(tr, x1, y, seg);
    }
  }

  void run_adaptive(trajectory& tr, const merged_piece& mp, const cpoly& u, cvec<NV>& y) {
    const double len = mp.hi - mp.lo;
    const double mu = u.max_abs(len);
    // keep the Hermite dense-output error well under the step tolerance
    const double rtol_d = 0.05 * std::max(rtol_, 1e-12);
    double cap = std::pow(720.0 * rtol_d / (mu * mu * mu), 1.0 / 6.0);
    cap = std::max(cap, len / 4096.0);
    cap = std::min(cap, len);

    poly3 rl = mp.r_local;
    auto f = [&](double t, const cvec<NV>& v) {
      cvec<NV> d{};
      const complex ut = u.eval(t);
      d[0] = v[1];
      d[1] = ut * v[0];
      if constexpr (Variational) {
        d[2] = v[3];
        d[3] = ut * v[2] - poly_eval(rl, t) * v[0];
      }
      return d;
    };

    double t = 0;
    double h = std::min(cap, len);
    const double hmin = std::max(len, prob_.b - prob_.a) * 1e-14;
    while (t < len - 0.5 * hmin) {
      h = std::min({h, cap, len - t});
      auto step = dp5_step<NV>(f, t, y, h, rtol_, atol_ * std::exp2(-exp_));
      if (step.err <= 1.0 || h <= hmin * 2) {
        if (step.err > 1.0 && h <= hmin * 2)
          throw step_underflow_error(mp.lo + t);
        const double t1 = t + h;
        traj_segment seg;
        seg.method = segment_method::adaptive;
        seg.u_left = u.eval(t);
        seg.u_right = u.eval(t1);
        cvec<NV> y1 = step.y1;
        double snap = (len - t1 < 0.5 * hmin) ? len : t1;
        err_accum_ += step.err * (rtol_ * std::abs(y[0]) + atol_) * std::exp2(exp_);
        y = y1;
        t = snap;
        push_node(tr, mp.lo + snap, y, seg);
        h *= std::clamp(0.9 * std::pow(std::max(step.err, 1e-10), -0.2), 1.0, 5.0);
      } else {
        h *= std::clamp(0.9 * std::pow(step.err, -0.2), 0.2, 0.9);
        if (h < hmin) throw step_underflow_error(mp.lo + t);
      }
    }
  }

  const sl_problem& prob_;
  complex lambda_;
  double rtol_, atol_;
  std::vector<merged_piece> pieces_;
  int exp_ = 0;
  double err_accum_ = 0;
  scaled_value var_end_{}, var_end_slope_{};
};

}  // namespace detail

// Single closed-form step on a constant-coefficient cell, exposed as the
// elementary operation the solver is built from.
inline state propagate_constant(double q0, double r0, complex lambda,
                                const state& s, double h) {
  const complex u = complex(q0, 0) - lambda * r0;
  flow_step f = propagate_flow(u, h, s.y, s.dy);
  return {s.x + h, f.y, f.dy};
}

inline trajectory integrate(const sl_problem& prob, complex lambda,
                            const state& init, double rtol = 1e-10,
                            double atol = 1e-12) {
  detail::integrator_core<false> core(prob, lambda, rtol, atol);
  return core.run(init);
}

inline trajectory integrate(const sl_problem& prob, complex lambda,
                            double rtol = 1e-10, double atol = 1e-12) {
  return integrate(prob, lambda, state{prob.a, {0, 0}, prob.init_slope}, rtol, atol);
}

// End value and end slope of the lambda-derivative z of the solution,
// z(a) = z'(a) = 0, z'' = (q - lambda r) z - r y, alongside a fresh base run.
struct variational_result {
  trajectory base;
  scaled_value z_end;
  scaled_value dz_end;
};

inline variational_result variational_integrate(const sl_problem& prob,
                                                complex lambda,
                                                const state& init,
                                                double rtol = 1e-10,
                                                double atol = 1e-12) {
  detail::integrator_core<true> core(prob, lambda, rtol, atol);
  trajectory tr = core.run(init);
  return {std::move(tr), core.var_end(), core.var_end_slope()};
}

inline variational_result variational_integrate(const sl_problem& prob,
                                                complex lambda,
                                                double rtol = 1e-10,
                                                double atol = 1e-12) {
  return variational_integrate(prob, lambda,
                               state{prob.a, {0, 0}, prob.init_slope}, rtol, atol);
}

// Local defect of a trajectory against a one-step reference, used by the
// accuracy studies: replays a small fixed RK4 step from the dense state at x
// and reports the normalized mismatch at x + h.
inline double local_defect(const sl_problem& prob, const trajectory& tr,
                           double x, double h) {
  auto u_of = [&](double t) {
    return complex(prob.q.eval(t), 0) - tr.lambda * prob.r.eval(t);
  };
  auto [s0, e0] = tr.eval_scaled(x);
  auto f = [&](double t, complex y, complex dy) {
    return std::pair<complex, complex>{dy, u_of(t) * y};
  };
  complex y = s0.y, dy = s0.dy;
  auto [k1y, k1d] = f(x, y, dy);
  auto [k2y, k2d] = f(x + h / 2, y + h / 2 * k1y, dy + h / 2 * k1d);
  auto [k3y, k3d] = f(x + h / 2, y + h / 2 * k2y, dy + h / 2 * k2d);
  auto [k4y, k4d] = f(x + h, y + h * k3y, dy + h * k3d);
  complex y1 = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
  complex dy1 = dy + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
  auto [s1, e1] = tr.eval_scaled(x + h);
  const double rescale = std::exp2(e0 - e1);
  complex ref_y = s1.y, ref_dy = s1.dy;
  double scale = std::max({std::abs(y), std::abs(dy), std::abs(ref_y) * rescale,
                           std::abs(ref_dy) * rescale, 1e-300});
  return std::max(std::abs(y1 - ref_y * rescale), std::abs(dy1 - ref_dy * rescale)) / scale;
}

}  // namespace ghostspec
