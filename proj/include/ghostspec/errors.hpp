#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace ghostspec {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// malformed problem files, bad CLI values
struct parse_error : error {
  using error::error;
};

// evaluation outside a documented domain (e.g. Airy series radius)
struct domain_error : error {
  using error::error;
};

// constant-piece flow would overflow; caller must shrink the step
struct overflow_error : error {
  double w_magnitude;
  explicit overflow_error(double wm)
      : error("constant-piece propagation overflow, |w| = " + std::to_string(wm)),
        w_magnitude(wm) {}
};

struct step_underflow_error : error {
  double x;
  explicit step_underflow_error(double where)
      : error("adaptive step size underflow at x = " + std::to_string(where)), x(where) {}
};

// |D| vanished on a counting contour; caller perturbs the box
struct boundary_zero_error : error {
  std::complex<double> location;
  double residual;
  boundary_zero_error(std::complex<double> loc, double res)
      : error("miss distance vanishes on box boundary near lambda = (" +
              std::to_string(loc.real()) + ", " + std::to_string(loc.imag()) + ")"),
        location(loc), residual(res) {}
};

struct convergence_error : error {
  using error::error;
};

// a mathematically guaranteed invariant failed: numerics or search bug
struct invariant_violation : error {
  using error::error;
};

}  // namespace ghostspec
