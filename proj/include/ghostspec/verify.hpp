#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ghost.hpp"
#include "oracles.hpp"
#include "random_problems.hpp"
#include "serialize.hpp"
#include "spectrum.hpp"
#include "threads.hpp"

namespace ghostspec {

struct check_result {
  std::string name;
  bool pass = false;
  std::string detail;
};

inline bool all_pass(const std::vector<check_result>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

namespace detail {

inline void add(std::vector<check_result>& out, std::string name, bool pass,
                std::string detail = "") {
  out.push_back({std::move(name), pass, std::move(detail)});
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Newton on a closed-form dispersion relation with a numerical derivative;
// returns the nearby root.
template <class F>
complex dispersion_root(const F& f, complex z0) {
  complex z = z0;
  const double h = 1e-5;
  for (int it = 0; it < 60; ++it) {
    const complex fz = f(z);
    const complex d = (f(z + complex{h, 0}) - f(z - complex{h, 0})) / (2 * h);
    if (std::abs(d) == 0.0) break;
    const complex step = fz / d;
    z -= step;
    if (std::abs(step) < 1e-12 * (1.0 + std::abs(z))) break;
  }
  return z;
}

}  // namespace detail

// Shared invariant bundle checked for every ghost the solver returns.
inline void check_ghost_invariants(std::vector<check_result>& out,
                                   const std::string& tag, const sl_problem& prob,
                                   const eigen_pair& ep, double identity_tol,
                                   const solve_options& opts = {}) {
  ghost_report rep;
  try {
    rep = analyze_ghost(prob, ep);
  } catch (const error& e) {
    detail::add(out, tag + " analysis", false, e.what());
    return;
  }
  detail::add(out, tag + " G one-signed", rep.G.sign != g_sign_verdict::indefinite,
              to_string(rep.G.sign));
  detail::add(out, tag + " identity residual", rep.identity_residual <= identity_tol,
              detail::fmt(rep.identity_residual));
  const double gb = std::abs(rep.G.samples.back().second);
  detail::add(out, tag + " G(b) ~ 0", gb <= 1e-8 * std::max(rep.G.sup_abs, 1e-300),
              detail::fmt(gb));
  detail::add(out, tag + " interior interlacing", rep.interlace_ok);
  detail::add(out, tag + " left endpoint class", rep.left_case.overall_match);
  detail::add(out, tag + " right endpoint class", rep.right_case.overall_match);
  detail::add(out, tag + " endpoint audit", rep.endpoint_audit_passed);
  detail::add(out, tag + " interior vanish count", rep.interior_vanish_count == 0,
              std::to_string(rep.interior_vanish_count));
  // conjugate of an eigenvalue is an eigenvalue (real coefficients)
  detail::miss_sample conj_miss =
      detail::sample_miss(prob, std::conj(ep.lambda), opts);
  detail::add(out, tag + " conjugate eigenvalue", conj_miss.residual() <= opts.eigen_tol,
              detail::fmt(conj_miss.residual()));
}

// Fixed-step accuracy study on the linear-weight example (the only built-in
// problem with a non-constant coefficient): returns the observed order of the
// end-value error when the step is halved; a healthy 5(4) pair gives about 5.
inline double convergence_order_study() {
  const oracle_problem* ex = find_example("exa2");
  const complex lambda{3.0, 4.0};
  const sl_problem& p = ex->problem;
  trajectory ref = integrate(p, lambda, 1e-13, 1e-15);
  const complex yb = ref.end_value().unscaled();
  const complex dyb = ref.end_slope().unscaled();

  auto run_fixed = [&](double h) {
    auto f = [&](double x, const detail::cvec<2>& v) {
      detail::cvec<2> d;
      d[0] = v[1];
      d[1] = (complex(p.q.eval(x), 0) - lambda * p.r.eval(x)) * v[0];
      return d;
    };
    detail::cvec<2> y{complex{0, 0}, p.init_slope};
    const int n = static_cast<int>(std::llround((p.b - p.a) / h));
    double x = p.a;
    for (int i = 0; i < n; ++i) {
      y = detail::dp5_step<2>(f, x, y, h, 1.0, 1.0).y1;
      x += h;
    }
    return std::max(std::abs(y[0] - yb), std::abs(y[1] - dyb));
  };
  const double e1 = run_fixed(0.02);
  const double e2 = run_fixed(0.01);
  return std::log2(e1 / e2);
}

// Full invariant suite for one built-in example.
inline std::vector<check_result> run_example_suite(const oracle_problem& ex,
                                                   const solve_options& opts = {}) {
  std::vector<check_result> out;
  try {
    const box region{ex.default_region[0], ex.default_region[1], ex.default_region[2],
                     ex.default_region[3]};
    std::vector<eigen_pair> ghosts = find_nonreal(ex.problem, region, opts);
    const int N = richardson_count_N(ex.problem, opts);
    const int M = static_cast<int>(ghosts.size());
    detail::add(out, ex.id + " M <= N", M <= N,
                "M=" + std::to_string(M) + " N=" + std::to_string(N));

    // the quoted reference eigenvalue is among the found ghosts
    double best = std::numeric_limits<double>::infinity();
    const eigen_pair* ref_pair = nullptr;
    for (const auto& g : ghosts) {
      const double d = std::abs(g.lambda - ex.reference_lambda);
      if (d < best) {
        best = d;
        ref_pair = &g;
      }
    }
    detail::add(out, ex.id + " reference eigenvalue", best <= 5e-3, detail::fmt(best));

    for (std::size_t i = 0; i < ghosts.size(); ++i)
      check_ghost_invariants(out, ex.id + " ghost " + std::to_string(i), ex.problem,
                             ghosts[i], 1e-7, opts);

    if (ref_pair != nullptr) {
      const complex lam = ref_pair->lambda;
      if (ex.id == "exa1") {
        auto f = [&](complex z) { return dispersion_exa1(z, ex.q_param); };
        const complex root = detail::dispersion_root(f, lam);
        detail::add(out, "exa1 dispersion root agreement", std::abs(root - lam) <= 1e-6,
                    detail::fmt(std::abs(root - lam)));
      } else if (ex.id == "exa3") {
        auto f = [&](complex z) { return dispersion_exa3(z, ex.q_param); };
        const complex root = detail::dispersion_root(f, lam);
        detail::add(out, "exa3 dispersion root agreement", std::abs(root - lam) <= 1e-6,
                    detail::fmt(std::abs(root - lam)));
        const double scale = std::abs(dispersion_exa3(lam + complex{0.5, 0}, ex.q_param));
        detail::add(out, "exa3 dispersion scaled magnitude",
                    std::abs(dispersion_exa3(lam, ex.q_param)) <= 1e-6 * scale,
                    detail::fmt(std::abs(dispersion_exa3(lam, ex.q_param)) / scale));
      } else if (ex.id == "exa2") {
        detail::add(out, "exa2 eigenvalue on the imaginary axis",
                    std::abs(lam.real()) <= 5e-3, detail::fmt(std::abs(lam.real())));
        double worst = 0;
        const double sup = ref_pair->traj.sup_y();
        for (int i = 0; i <= 100; ++i) {
          const double x = -1.0 + 2.0 * i / 100.0;
          const complex yo = eigenfunction_exa2(x, lam, ex.problem.init_slope);
          const complex yi = ref_pair->traj.eval(x).y;
          worst = std::max(worst, std::abs(yo - yi) / sup);
        }
        detail::add(out, "exa2 oracle trajectory agreement", worst <= 1e-8,
                    detail::fmt(worst));
      } else if (ex.id == "exa4") {
        ghost_report rep = analyze_ghost(ex.problem, *ref_pair);
        detail::add(out, "exa4 real part zero-free",
                    rep.phi_zeros.zeros.empty() &&
                        rep.G.sign == g_sign_verdict::negative,
                    "zeros=" + std::to_string(rep.phi_zeros.zeros.size()) +
                        " G=" + to_string(rep.G.sign));
      }
    }
  } catch (const error& e) {
    detail::add(out, ex.id + " suite", false, e.what());
  }
  return out;
}

struct random_problem_result {
  std::uint64_t index = 0;
  bool pass = false;
  bool ghost_found = false;
  std::vector<check_result> checks;
  std::string failure_context;  // serialized problem for replay on failure
};

inline random_problem_result run_random_problem(std::uint64_t seed, std::uint64_t index,
                                                const solve_options& opts = {}) {
  random_problem_result res;
  res.index = index;
  sl_problem prob;
  try {
    prob = random_th3_problem(seed, index);
    const box region{-60, 60, 1e-3, 50};
    std::vector<eigen_pair> ghosts = find_nonreal(prob, region, opts);
    res.ghost_found = !ghosts.empty();

    if (res.ghost_found) {
      // independent winding count over the whole region equals the number of
      // refined roots (when no root was found the search already was a single
      // whole-region count, so a recount would repeat the same evaluation)
      box recount_region = region;
      const int outer =
          detail::count_with_inflation(prob, recount_region, opts.n_boundary, opts);
      detail::add(res.checks, "count equals refined roots",
                  outer == static_cast<int>(ghosts.size()),
                  std::to_string(outer) + " vs " + std::to_string(ghosts.size()));
    }

    // conjugate symmetry of the miss distance at a fixed probe point
    const complex probe{7.0, 3.0};
    const complex Dp = miss_distance(prob, probe, opts);
    const complex Dc = miss_distance(prob, std::conj(probe), opts);
    detail::add(res.checks, "conjugate symmetry of D",
                std::abs(Dc - std::conj(Dp)) <= 1e-10 * std::abs(Dp),
                detail::fmt(std::abs(Dc - std::conj(Dp)) / std::abs(Dp)));

    const int N = richardson_count_N(prob, opts);
    detail::add(res.checks, "M <= N", static_cast<int>(ghosts.size()) <= N,
                "M=" + std::to_string(ghosts.size()) + " N=" + std::to_string(N));

    for (std::size_t g = 0; g < ghosts.size(); ++g)
      check_ghost_invariants(res.checks, "ghost " + std::to_string(g), prob, ghosts[g],
                             1e-6, opts);
    res.pass = all_pass(res.checks);
  } catch (const error& e) {
    detail::add(res.checks, "random problem", false, e.what());
    res.pass = false;
  }
  if (!res.pass) {
    try {
      res.failure_context = to_json(prob).dump();
    } catch (...) {
      res.failure_context = "(problem serialization unavailable)";
    }
  }
  return res;
}

inline std::vector<random_problem_result> run_random_suite(std::uint64_t seed, int count,
                                                           const solve_options& opts = {}) {
  return parallel_map_ordered<random_problem_result>(
      static_cast<std::size_t>(count),
      [&](std::size_t i) { return run_random_problem(seed, i, opts); });
}

}  // namespace ghostspec
