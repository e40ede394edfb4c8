#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "kernels.hpp"
#include "problem.hpp"

namespace ghostspec {

// Airy pair with first derivatives, from the two Maclaurin basis series in
// extended precision with compensated summation.  Valid for |z| <= 8.
struct airy_values {
  complex ai, bi, dai, dbi;
};

inline airy_values airy_pair(complex z) {
  if (std::abs(z) > 8.0)
    throw domain_error("airy_pair: series domain |z| <= 8 exceeded");
  using cld = std::complex<long double>;
  const cld zl(static_cast<long double>(z.real()), static_cast<long double>(z.imag()));
  const cld z3 = zl * zl * zl;

  struct ksum {  // Kahan-compensated complex accumulator
    cld s{0, 0}, c{0, 0};
    void add(cld v) {
      const cld t = s + (v - c);
      c = (t - s) - (v - c);
      s = t;
    }
  };
  ksum f, fp, g, gp;
  cld tf(1, 0), tg = zl, tfp = zl * zl / 2.0L, tgp(1, 0);
  f.add(tf);
  g.add(tg);
  fp.add(tfp);
  gp.add(tgp);
  for (int k = 0; k < 120; ++k) {
    const long double kk = static_cast<long double>(k);
    tf *= z3 / ((3 * kk + 2) * (3 * kk + 3));
    tg *= z3 / ((3 * kk + 3) * (3 * kk + 4));
    tfp *= z3 / ((3 * (kk + 1)) * (3 * kk + 5));  // ratio for k+1 over k, k>=1 terms
    tgp *= z3 / ((3 * kk + 1) * (3 * kk + 3));
    f.add(tf);
    g.add(tg);
    fp.add(tfp);
    gp.add(tgp);
    const long double mag = std::abs(tf) + std::abs(tg) + std::abs(tfp) + std::abs(tgp);
    if (mag < 1e-28L * (std::abs(f.s) + std::abs(g.s) + 1.0L)) break;
  }

  constexpr long double c1 = 0.3550280538878172392600631860041831763980L;  // Ai(0)
  constexpr long double c2 = 0.2588194037928067984051835601892039634793L;  // -Ai'(0)
  constexpr long double rt3 = 1.7320508075688772935274463415058723669428L;
  const cld ai = c1 * f.s - c2 * g.s;
  const cld dai = c1 * fp.s - c2 * gp.s;
  const cld bi = rt3 * (c1 * f.s + c2 * g.s);
  const cld dbi = rt3 * (c1 * fp.s + c2 * gp.s);
  auto dn = [](cld v) {
    return complex(static_cast<double>(v.real()), static_cast<double>(v.imag()));
  };
  return {dn(ai), dn(bi), dn(dai), dn(dbi)};
}

// Closed-form decaying/oscillating solution of the linear-weight example
// y'' = (-7 - lambda x) y with y(-1) = 0, y'(-1) = slope, assembled from the
// Airy pair under the principal cube root of lambda (argument in (-pi, pi]).
struct oracle_state {
  complex y, dy;
};

inline oracle_state eigenfunction_exa2_state(double x, complex lambda, complex slope) {
  if (lambda == complex{0, 0})
    throw domain_error("eigenfunction_exa2: lambda must be nonzero");
  const complex l13 = std::exp(std::log(lambda) / 3.0);
  const complex l23 = l13 * l13;
  const complex c = (lambda - 7.0) / l23;
  const complex zeta = -(lambda * x + 7.0) / l23;
  const airy_values ac = airy_pair(c);
  const airy_values az = airy_pair(zeta);
  const double pi = 3.14159265358979323846264338327950288;
  const complex pref = slope * pi / l13;
  const complex y = pref * (ac.bi * az.ai - ac.ai * az.bi);
  // d zeta / dx = -lambda^(1/3)
  const complex dy = -slope * pi * (ac.bi * az.dai - ac.ai * az.dbi);
  return {y, dy};
}

inline complex eigenfunction_exa2(double x, complex lambda, complex slope) {
  return eigenfunction_exa2_state(x, lambda, slope).y;
}

// Dispersion relation for the two-piece sign weight on [-1,1] with constant
// potential -q: zero exactly at the Dirichlet eigenvalues.  Entirely in z via
// the C/S kernels, so no square-root branch is ever selected.
inline complex dispersion_exa1(complex z, double q) {
  const cs_values L = cs_eval(z - q);    // left cell,  u = z - q
  const cs_values R = cs_eval(-z - q);   // right cell, u = -z - q
  return L.s * R.c + L.c * R.s;
}

// Dispersion relation for the three-piece weight (-1, 0, +1) on [-2,2] with
// constant potential -q, written in the same branch-free kernel form.
inline complex dispersion_exa3(complex lambda, double q) {
  const complex l = lambda;
  const cs_values P = cs_eval(-(q + l));
  const cs_values M = cs_eval(-(q - l));
  const cs_values Q4 = cs_eval(-4.0 * q);
  const cs_values P4 = cs_eval(-4.0 * (q + l));
  const complex Sp = P.s, Cp = P.c;
  const complex Sm = M.s, Cm = M.c;
  const complex S4q = Q4.s, C4q = Q4.c;
  const complex S4p = P4.s, C4p = P4.c;
  const complex A = C4q * Sm + 2.0 * S4q * Cm;
  return 2.0 * (q + l) * S4p * Sp * A + 2.0 * S4p * Cp * (Cm * C4q - 2.0 * q * Sm * S4q) +
         C4p * Cp * A + C4p * Sp * (2.0 * q * S4q * Sm - C4q * Cm);
}

// Dirichlet eigenvalues of y'' = (q_const - lambda) y on [a, b]:
// lambda_k = (k pi / (b - a))^2 + q_const.
inline std::vector<double> constant_weight_eigs(double q_const, double a, double b,
                                                int k_max) {
  if (k_max < 1) throw domain_error("constant_weight_eigs: k_max must be >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k_max));
  const double pi = 3.14159265358979323846264338327950288;
  for (int k = 1; k <= k_max; ++k) {
    const double f = k * pi / (b - a);
    out.push_back(f * f + q_const);
  }
  return out;
}

// Built-in example problems with the reference eigenvalues the verification
// suite checks against.
struct oracle_problem {
  std::string id;
  std::string parameter_label;       // human-readable parameter display
  double q_param = 0;                // potential magnitude parameter, if any
  bool has_parameter = false;
  sl_problem problem;
  complex reference_lambda;          // quoted approximate ghost eigenvalue
  std::array<double, 4> default_region{};      // re0, re1, im0, im1
  std::array<double, 2> default_real_window{};
};

inline const std::vector<oracle_problem>& example_registry() {
  static const std::vector<oracle_problem> reg = [] {
    std::vector<oracle_problem> v;
    const double pi = 3.14159265358979323846264338327950288;

    {
      oracle_problem o;
      o.id = "exa1";
      o.parameter_label = "q=40";
      o.q_param = 40;
      o.has_parameter = true;
      o.problem.a = -1;
      o.problem.b = 1;
      o.problem.q = piecewise_poly::constant(-1, 1, -40.0);
      o.problem.r.breakpoints = {-1, 0, 1};
      o.problem.r.pieces = {{-1, 0, 0, 0}, {1, 0, 0, 0}};
      o.problem.init_slope = {1, -1};
      o.reference_lambda = {26.9376, 6.9215};
      o.default_region = {-60, 60, 1e-3, 50};
      o.default_real_window = {-60, 60};
      v.push_back(std::move(o));
    }
    {
      oracle_problem o;
      o.id = "exa2";
      o.parameter_label = "-";
      o.problem.a = -1;
      o.problem.b = 1;
      o.problem.q = piecewise_poly::constant(-1, 1, -7.0);
      o.problem.r.breakpoints = {-1, 1};
      o.problem.r.pieces = {{-1, 1, 0, 0}};  // r(x) = x, local to x = -1
      o.problem.init_slope = {1, -1};
      o.reference_lambda = {0, 12.3076};
      o.default_region = {-60, 60, 1e-3, 50};
      o.default_real_window = {-60, 60};
      v.push_back(std::move(o));
    }
    {
      oracle_problem o;
      o.id = "exa3";
      o.parameter_label = "q=8";
      o.q_param = 8;
      o.has_parameter = true;
      o.problem.a = -2;
      o.problem.b = 2;
      o.problem.q = piecewise_poly::constant(-2, 2, -8.0);
      o.problem.r.breakpoints = {-2, -1, 1, 2};
      o.problem.r.pieces = {{-1, 0, 0, 0}, {0, 0, 0, 0}, {1, 0, 0, 0}};
      o.problem.init_slope = {1, 0};
      o.reference_lambda = {0, 6.29625};
      o.default_region = {-60, 60, 1e-3, 50};
      o.default_real_window = {-60, 60};
      v.push_back(std::move(o));
    }
    {
      oracle_problem o;
      o.id = "exa4";
      o.parameter_label = "q=π²/4+2";
      o.q_param = pi * pi / 4 + 2;
      o.has_parameter = true;
      o.problem.a = -1;
      o.problem.b = 1;
      o.problem.q = piecewise_poly::constant(-1, 1, -(pi * pi / 4 + 2));
      o.problem.r.breakpoints = {-1, 0, 1};
      o.problem.r.pieces = {{-1, 0, 0, 0}, {1, 0, 0, 0}};
      o.problem.init_slope = {1, -1};
      o.reference_lambda = {0, 3.8741};
      o.default_region = {-60, 60, 1e-3, 50};
      o.default_real_window = {-60, 60};
      v.push_back(std::move(o));
    }
    for (auto& o : v) o.problem.validate();
    return v;
  }();
  return reg;
}

inline const oracle_problem* find_example(const std::string& id) {
  for (const auto& o : example_registry())
    if (o.id == id) return &o;
  return nullptr;
}

}  // namespace ghostspec
