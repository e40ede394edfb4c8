#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "problem.hpp"
#include "spectrum.hpp"
#include "zeros.hpp"

namespace ghostspec {

// A non-real eigenfunction split into real and imaginary parts, normalized so
// that Im lambda > 0 and the real part has nonzero slope at the left endpoint.
struct ghost_decomposition {
  eigen_pair pair;
  complex rotation{1, 0};  // unit factor applied to the stored trajectory
  double dphi_a = 0, dpsi_a = 0, dphi_b = 0, dpsi_b = 0;

  component_view phi() const { return {&pair.traj, rotation, false}; }
  component_view psi() const { return {&pair.traj, rotation, true}; }
  double a() const { return pair.traj.a(); }
  double b() const { return pair.traj.b(); }
};

namespace detail {

inline trajectory conjugated(const trajectory& tr) {
  trajectory out = tr;
  out.lambda = std::conj(tr.lambda);
  for (auto& n : out.nodes) {
    n.y = std::conj(n.y);
    n.dy = std::conj(n.dy);
  }
  for (auto& s : out.segments) {
    s.u = std::conj(s.u);
    s.u_left = std::conj(s.u_left);
    s.u_right = std::conj(s.u_right);
  }
  return out;
}

}  // namespace detail

inline ghost_decomposition decompose(const eigen_pair& input) {
  if (input.lambda.imag() == 0.0)
    throw domain_error("decompose: a non-real eigenvalue is required");
  ghost_decomposition g;
  g.pair = input;
  if (g.pair.lambda.imag() < 0) {
    g.pair.lambda = std::conj(g.pair.lambda);
    g.pair.traj = detail::conjugated(g.pair.traj);
  }
  const complex dya = g.pair.traj.nodes.front().dy;
  if (std::abs(dya) == 0.0)
    throw invariant_violation("decompose: trivial eigenfunction (zero initial slope)");
  if (std::abs(dya.real()) <= 1e-14 * std::abs(dya))
    g.rotation = {0, 1};  // y <- iy so the real part has nonzero initial slope
  const complex da = g.rotation * dya;
  const complex db = g.rotation * g.pair.traj.end_slope().unscaled();
  g.dphi_a = da.real();
  g.dpsi_a = da.imag();
  g.dphi_b = db.real();
  g.dpsi_b = db.imag();
  return g;
}

enum class g_sign_verdict { positive, negative, indefinite };

inline const char* to_string(g_sign_verdict v) {
  switch (v) {
    case g_sign_verdict::positive: return "positive";
    case g_sign_verdict::negative: return "negative";
    default: return "indefinite";
  }
}

struct g_data {
  std::vector<std::pair<double, double>> samples;  // (x, G(x)), starts at (a, 0)
  g_sign_verdict sign = g_sign_verdict::indefinite;
  double sup_abs = 0;
};

namespace detail {

struct gl10 {
  static constexpr std::array<double, 5> x = {0.14887433898163121, 0.43339539412924719,
                                              0.67940956829902441, 0.86506336668898451,
                                              0.97390652851717172};
  static constexpr std::array<double, 5> w = {0.29552422471475287, 0.26926671930999635,
                                              0.21908636251598204, 0.14945134915058059,
                                              0.066671344308688138};
};

// Gauss-Legendre 10-point integral of r |y|^2 over [x0, x1] (one segment).
inline double g_chunk(const sl_problem& prob, const trajectory& tr, double x0,
                      double x1) {
  const double mid = 0.5 * (x0 + x1), half = 0.5 * (x1 - x0);
  double acc = 0;
  for (std::size_t j = 0; j < 5; ++j) {
    for (double sgn : {-1.0, 1.0}) {
      const double x = mid + sgn * half * gl10::x[j];
      const complex y = tr.eval(x).y;
      acc += gl10::w[j] * prob.r.eval(x) * std::norm(y);
    }
  }
  return acc * half;
}

struct kahan {
  double s = 0, c = 0;
  void add(double v) {
    const double t = s + (v - c);
    c = (t - s) - (v - c);
    s = t;
  }
};

}  // namespace detail

// Cumulative weighted energy along the ghost with a one-signedness verdict on
// the interior; raises a diagnostic when a turning-profile weight yields an
// indefinite verdict (that combination is impossible for a true eigenpair).
inline g_data compute_G(const sl_problem& prob, const ghost_decomposition& ghost,
                        int n_samples) {
  if (n_samples < 100) throw domain_error("compute_G: n_samples must be >= 100");
  const trajectory& tr = ghost.pair.traj;
  const double a = tr.a(), b = tr.b();

  // prefix integrals at trajectory nodes
  std::vector<double> node_G(tr.node_count(), 0.0);
  detail::kahan run;
  for (std::size_t i = 0; i + 1 < tr.node_count(); ++i) {
    run.add(detail::g_chunk(prob, tr, tr.nodes[i].x, tr.nodes[i + 1].x));
    node_G[i + 1] = run.s;
  }

  auto G_at = [&](double x) {
    const std::size_t i = tr.segment_index(x);
    double g = node_G[i];
    if (x > tr.nodes[i].x) g += detail::g_chunk(prob, tr, tr.nodes[i].x, x);
    return g;
  };

  g_data out;
  out.samples.reserve(static_cast<std::size_t>(n_samples) + 1);
  for (int i = 0; i <= n_samples; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / n_samples;
    const double g = (i == 0) ? 0.0 : G_at(x);
    out.samples.emplace_back(x, g);
    out.sup_abs = std::max(out.sup_abs, std::abs(g));
  }

  const double eps = (b - a) * 1e-4;
  const double tol_G = 1e-9 * out.sup_abs;
  bool pos = false, neg = false;
  for (const auto& [x, g] : out.samples) {
    if (x <= a + eps || x >= b - eps) continue;
    pos = pos || g > tol_G;
    neg = neg || g < -tol_G;
  }
  out.sign = (pos && neg) ? g_sign_verdict::indefinite
             : pos        ? g_sign_verdict::positive
             : neg        ? g_sign_verdict::negative
                          : g_sign_verdict::indefinite;

  if (out.sign == g_sign_verdict::indefinite &&
      is_turning_profile(classify_weight(prob.r)))
    throw invariant_violation(
        "compute_G: indefinite cumulative energy for a turning-profile weight");
  return out;
}

// sup over the G samples of |phi' psi - phi psi' - Im(lambda) G| divided by
// sup |Im(lambda) G|.
inline double identity_residual(const ghost_decomposition& ghost, const g_data& G) {
  const trajectory& tr = ghost.pair.traj;
  const double im = ghost.pair.lambda.imag();
  double num = 0, den = 0;
  for (const auto& [x, g] : G.samples) {
    const state s = tr.eval(x);
    const complex y = ghost.rotation * s.y;
    const complex dy = ghost.rotation * s.dy;
    const double wronsk = -std::imag(std::conj(y) * dy);  // phi' psi - phi psi'
    num = std::max(num, std::abs(wronsk - im * g));
    den = std::max(den, std::abs(im * g));
  }
  return den > 0 ? num / den : num;
}

enum class endpoint_behavior { no_zero, exactly_one, not_applicable };

inline const char* to_string(endpoint_behavior b) {
  switch (b) {
    case endpoint_behavior::no_zero: return "no zero";
    case endpoint_behavior::exactly_one: return "exactly one";
    default: return "not applicable";
  }
}

struct endpoint_subrecord {
  std::string rule_id;  // side, G sign, and which component supplies the reference zero
  int case_number = 0;  // 1 or 2 by slope-sign relation; 3 when the classified slope vanishes
  endpoint_behavior predicted = endpoint_behavior::not_applicable;
  std::string observed = "n/a";  // "none" | "one" | "several" | "n/a"
  bool applicable = false;
  bool match = true;
};

struct endpoint_record {
  std::string side;    // "left" or "right"
  std::string g_sign;  // verdict string the classification was based on
  endpoint_subrecord by_phi;  // reference zeros taken from phi
  endpoint_subrecord by_psi;  // reference zeros taken from psi
  bool overall_match = true;
};

namespace detail {

// Sign of a component's outgoing derivative at an endpoint; when the stored
// slope vanishes, falls back to the first sample exceeding atol inward (the
// sampled value sign is negated at the right endpoint to convert a value sign
// into a derivative sign).
inline int effective_slope_sign(const component_view& comp, double slope_value,
                                double slope_tol, bool right_end, double atol) {
  if (std::abs(slope_value) > slope_tol) return slope_value > 0 ? 1 : -1;
  const double a = comp.a(), b = comp.b();
  const int n = 4096;
  for (int j = 1; j < n; ++j) {
    const double x = right_end ? b - (b - a) * j / static_cast<double>(n)
                               : a + (b - a) * j / static_cast<double>(n);
    const double v = comp.value(x);
    if (std::abs(v) > atol) {
      int s = v > 0 ? 1 : -1;
      return right_end ? -s : s;
    }
  }
  return 0;
}

struct classify_inputs {
  bool right_end;
  g_sign_verdict g;
  const zero_list* zphi;
  const zero_list* zpsi;
  double dphi, dpsi;      // stored endpoint slopes on this side
  const component_view* phi;
  const component_view* psi;
  double atol;
};

// Case numbering per (side, G sign, reference component): whether slope
// relation "same sign" is the table's case 1 (else case 2).
inline bool case1_is_same(bool right_end, g_sign_verdict g, bool ref_is_psi) {
  if (!right_end) {
    if (g == g_sign_verdict::negative) return !ref_is_psi;  // ref phi: case1 same
    return false;                                           // G > 0: case1 opposite
  }
  if (g == g_sign_verdict::negative) return ref_is_psi;
  return !ref_is_psi;
}

inline endpoint_subrecord classify_one(const classify_inputs& in, bool ref_is_psi) {
  endpoint_subrecord rec;
  rec.rule_id = std::string(in.right_end ? "right" : "left") +
                (in.g == g_sign_verdict::negative ? ":G-neg" : ":G-pos") +
                (ref_is_psi ? ":ref-psi" : ":ref-phi");
  const zero_list& ref = ref_is_psi ? *in.zpsi : *in.zphi;
  const zero_list& cls = ref_is_psi ? *in.zphi : *in.zpsi;
  if (ref.zeros.empty()) {
    rec.applicable = false;
    rec.predicted = endpoint_behavior::not_applicable;
    rec.observed = "n/a";
    rec.match = true;
    return rec;
  }
  rec.applicable = true;
  const double x_ref = in.right_end ? ref.zeros.back() : ref.zeros.front();

  const double d_ref = ref_is_psi ? in.dpsi : in.dphi;
  const double d_cls = ref_is_psi ? in.dphi : in.dpsi;
  const component_view* ref_comp = ref_is_psi ? in.psi : in.phi;
  const component_view* cls_comp = ref_is_psi ? in.phi : in.psi;
  const double slope_tol = 1e-9 * std::max({std::abs(in.dphi), std::abs(in.dpsi), 1e-300});

  const int s_ref = effective_slope_sign(*ref_comp, d_ref, slope_tol, in.right_end, in.atol);
  const int s_cls = effective_slope_sign(*cls_comp, d_cls, slope_tol, in.right_end, in.atol);
  if (s_ref == 0 || s_cls == 0) {
    rec.applicable = false;
    rec.predicted = endpoint_behavior::not_applicable;
    rec.observed = "n/a";
    return rec;
  }
  const bool same = s_ref == s_cls;
  rec.case_number = std::abs(d_cls) <= slope_tol
                        ? 3
                        : (same == case1_is_same(in.right_end, in.g, ref_is_psi) ? 1 : 2);

  // parity of (side, G, reference, relation) decides the prediction
  const int bits = (in.right_end ? 1 : 0) + (in.g == g_sign_verdict::positive ? 1 : 0) +
                   (ref_is_psi ? 1 : 0) + (same ? 1 : 0);
  rec.predicted = (bits % 2 == 1) ? endpoint_behavior::no_zero
                                  : endpoint_behavior::exactly_one;

  int observed = 0;
  for (double z : cls.zeros) {
    if (!in.right_end && z < x_ref) ++observed;
    if (in.right_end && z > x_ref) ++observed;
  }
  rec.observed = observed == 0 ? "none" : observed == 1 ? "one" : "several";
  rec.match = (rec.predicted == endpoint_behavior::no_zero && observed == 0) ||
              (rec.predicted == endpoint_behavior::exactly_one && observed == 1);
  return rec;
}

inline endpoint_record classify_endpoint(const ghost_decomposition& ghost,
                                         g_sign_verdict g, const zero_list& zphi,
                                         const zero_list& zpsi, bool right_end,
                                         double atol) {
  endpoint_record rec;
  rec.side = right_end ? "right" : "left";
  rec.g_sign = to_string(g);
  if (g == g_sign_verdict::indefinite) {
    rec.by_phi.rule_id = rec.side + ":G-indefinite:ref-phi";
    rec.by_psi.rule_id = rec.side + ":G-indefinite:ref-psi";
    rec.overall_match = true;
    return rec;
  }
  const component_view phi = ghost.phi(), psi = ghost.psi();
  classify_inputs in{right_end,
                     g,
                     &zphi,
                     &zpsi,
                     right_end ? ghost.dphi_b : ghost.dphi_a,
                     right_end ? ghost.dpsi_b : ghost.dpsi_a,
                     &phi,
                     &psi,
                     atol};
  rec.by_phi = classify_one(in, false);
  rec.by_psi = classify_one(in, true);
  rec.overall_match = (!rec.by_phi.applicable || rec.by_phi.match) &&
                      (!rec.by_psi.applicable || rec.by_psi.match);
  return rec;
}

}  // namespace detail

inline endpoint_record classify_left_endpoint(const ghost_decomposition& ghost,
                                              g_sign_verdict g, const zero_list& zphi,
                                              const zero_list& zpsi,
                                              double atol = 1e-12) {
  return detail::classify_endpoint(ghost, g, zphi, zpsi, false, atol);
}

inline endpoint_record classify_right_endpoint(const ghost_decomposition& ghost,
                                               g_sign_verdict g, const zero_list& zphi,
                                               const zero_list& zpsi,
                                               double atol = 1e-12) {
  return detail::classify_endpoint(ghost, g, zphi, zpsi, true, atol);
}

// Interior points where |y| dips below tol * sup|y| at a local minimum.
inline int interior_vanish_count(const eigen_pair& pair, double tol) {
  if (!(tol > 0)) throw domain_error("interior_vanish_count: tol must be positive");
  const trajectory& tr = pair.traj;
  const double a = tr.a(), b = tr.b();
  const int n = 4096;
  std::vector<double> mag(static_cast<std::size_t>(n) + 1);
  double sup = 0;
  for (int i = 0; i <= n; ++i) {
    const double x = a + (b - a) * i / static_cast<double>(n);
    mag[static_cast<std::size_t>(i)] = std::abs(tr.eval(x).y);
    sup = std::max(sup, mag[static_cast<std::size_t>(i)]);
  }
  const double ept = (b - a) * 1e-4;
  int count = 0;
  bool in_dip = false;
  for (int i = 1; i < n; ++i) {
    const double x = a + (b - a) * i / static_cast<double>(n);
    if (x <= a + ept || x >= b - ept) {
      in_dip = false;
      continue;
    }
    const bool low = mag[static_cast<std::size_t>(i)] <= tol * sup;
    if (low && !in_dip) ++count;
    in_dip = low;
  }
  return count;
}

struct ghost_report {
  complex lambda;
  complex rotation{1, 0};
  double dphi_a = 0, dpsi_a = 0, dphi_b = 0, dpsi_b = 0;
  g_data G;
  double identity_residual = 0;
  zero_list phi_zeros, psi_zeros;
  bool interlace_ok = false;
  std::vector<interlace_violation> interlace_violations;
  endpoint_record left_case, right_case;
  bool endpoint_audit_passed = false;
  int interior_vanish_count = 0;
};

struct analyze_options {
  int n_samples = 2000;
  double endpoint_tol_factor = 1e-6;  // times (b - a)
  double atol = 1e-12;
  double vanish_tol = 1e-6;
};

inline ghost_report analyze_ghost(const sl_problem& prob, const eigen_pair& pair,
                                  const analyze_options& opts = {}) {
  ghost_decomposition ghost = decompose(pair);
  ghost_report rep;
  rep.lambda = ghost.pair.lambda;
  rep.rotation = ghost.rotation;
  rep.dphi_a = ghost.dphi_a;
  rep.dpsi_a = ghost.dpsi_a;
  rep.dphi_b = ghost.dphi_b;
  rep.dpsi_b = ghost.dpsi_b;

  rep.G = compute_G(prob, ghost, opts.n_samples);
  rep.identity_residual = identity_residual(ghost, rep.G);

  const double ept = (ghost.b() - ghost.a()) * opts.endpoint_tol_factor;
  const component_view phi = ghost.phi(), psi = ghost.psi();
  rep.phi_zeros = locate_zeros(phi, ept);
  rep.psi_zeros = locate_zeros(psi, ept);

  interlace_result ir = check_interior_interlacing(rep.phi_zeros, rep.psi_zeros);
  rep.interlace_ok = ir.ok;
  rep.interlace_violations = std::move(ir.violations);

  rep.left_case = classify_left_endpoint(ghost, rep.G.sign, rep.phi_zeros,
                                         rep.psi_zeros, opts.atol);
  rep.right_case = classify_right_endpoint(ghost, rep.G.sign, rep.phi_zeros,
                                           rep.psi_zeros, opts.atol);
  rep.endpoint_audit_passed = endpoint_nonseparation_audit(rep.phi_zeros, rep.psi_zeros);
  rep.interior_vanish_count = interior_vanish_count(ghost.pair, opts.vanish_tol);

  if (is_turning_profile(classify_weight(prob.r)) && rep.interior_vanish_count != 0)
    throw invariant_violation(
        "analyze_ghost: interior vanishing of a turning-profile ghost");
  return rep;
}

}  // namespace ghostspec
