#pragma once

// JSON / CSV serialization and the small text grammars used by the CLI
// (complex numbers as "re+imi", boxes as "re0,re1,im0,im1").

#include <array>
#include <charconv>
#include <complex>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ghostspec/ghost.hpp"
#include "ghostspec/problem.hpp"
#include "ghostspec/spectrum.hpp"

namespace ghostspec {

// insertion-ordered so emitted documents keep a stable, readable key order
using json = nlohmann::ordered_json;

inline json to_json(const piecewise_poly& p) {
  json jp = json::array();
  for (const auto& piece : p.pieces) {
    json coeffs = json::array();
    int last = poly_degree(piece);
    for (int i = 0; i <= last; ++i) coeffs.push_back(piece[i]);
    jp.push_back(coeffs);
  }
  return json{{"breakpoints", p.breakpoints}, {"pieces", jp}};
}

inline piecewise_poly piecewise_from_json(const json& j) {
  piecewise_poly p;
  try {
    p.breakpoints = j.at("breakpoints").get<std::vector<double>>();
    for (const auto& coeffs : j.at("pieces")) {
      if (!coeffs.is_array() || coeffs.empty() || coeffs.size() > 4)
        throw parse_error("piecewise: each piece needs 1..4 coefficients");
      poly3 piece{0, 0, 0, 0};
      for (std::size_t i = 0; i < coeffs.size(); ++i) piece[i] = coeffs[i].get<double>();
      p.pieces.push_back(piece);
    }
  } catch (const json::exception& e) {
    throw parse_error(std::string("piecewise: ") + e.what());
  }
  p.validate();
  return p;
}

inline json to_json(const sl_problem& prob) {
  return json{{"a", prob.a},
              {"b", prob.b},
              {"init_slope", {prob.init_slope.real(), prob.init_slope.imag()}},
              {"q", to_json(prob.q)},
              {"r", to_json(prob.r)}};
}

inline sl_problem problem_from_json(const json& j) {
  sl_problem p;
  try {
    p.a = j.at("a").get<double>();
    p.b = j.at("b").get<double>();
    const auto& slope = j.at("init_slope");
    if (!slope.is_array() || slope.size() != 2)
      throw parse_error("problem: init_slope must be [re, im]");
    p.init_slope = {slope[0].get<double>(), slope[1].get<double>()};
    p.q = piecewise_from_json(j.at("q"));
    p.r = piecewise_from_json(j.at("r"));
  } catch (const json::exception& e) {
    throw parse_error(std::string("problem: ") + e.what());
  }
  p.validate();
  return p;
}

inline sl_problem load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open problem file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw parse_error("problem file " + path + ": " + e.what());
  }
  return problem_from_json(j);
}

// complex grammar: "re", "imi", "re+imi", "re-imi"; also accepts "i" suffix forms
// like "3.87i" and a bare "i". Whitespace-free.
inline std::complex<double> parse_complex(const std::string& text) {
  const std::string s = text;
  if (s.empty()) throw parse_error("empty complex literal");
  auto fail = [&]() -> std::complex<double> {
    throw parse_error("bad complex literal '" + text + "' (expected re+imi)");
  };
  // split at the last '+' or '-' that is not an exponent sign and not leading
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  auto parse_real = [&](std::string part) -> double {
    if (part.empty()) return fail().real();
    try {
      std::size_t used = 0;
      const double v = std::stod(part, &used);
      if (used != part.size()) fail();
      return v;
    } catch (const std::exception&) {
      fail();
      return 0;
    }
  };
  auto parse_imag_part = [&](std::string part) -> double {
    // part ends with 'i'
    part.pop_back();
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    return parse_real(part);
  };
  if (s.back() == 'i') {
    if (split == std::string::npos) return {0.0, parse_imag_part(s)};
    return {parse_real(s.substr(0, split)), parse_imag_part(s.substr(split))};
  }
  if (split != std::string::npos) {
    // could still be plain real like "1e-3" handled by stod below
  }
  return {parse_real(s), 0.0};
}

inline std::string format_complex(std::complex<double> z) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  return buf;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<double> parse_number_list(const std::string& text, std::size_t n,
                                             const std::string& what) {
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string part =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(part, &used));
      if (used != part.size()) throw parse_error("");
    } catch (const std::exception&) {
      throw parse_error(what + ": bad number '" + part + "' in '" + text + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (vals.size() != n)
    throw parse_error(what + ": expected " + std::to_string(n) + " comma-separated values, got " +
                      std::to_string(vals.size()));
  return vals;
}

inline box parse_box(const std::string& text) {
  const auto v = parse_number_list(text, 4, "box");
  box rect{v[0], v[1], v[2], v[3]};
  if (!(rect.re0 < rect.re1) || !(rect.im0 < rect.im1))
    throw parse_error("box: need re0 < re1 and im0 < im1 in '" + text + "'");
  return rect;
}

inline std::array<double, 2> parse_real_window(const std::string& text) {
  const auto v = parse_number_list(text, 2, "real window");
  if (!(v[0] < v[1])) throw parse_error("real window: need lo < hi in '" + text + "'");
  return {v[0], v[1]};
}

inline json to_json(const spectrum_report& rep) {
  json nonreal = json::array();
  for (const auto& p : rep.nonreal_pairs)
    nonreal.push_back(json{{"re", p.lambda.real()},
                           {"im", p.lambda.imag()},
                           {"residual", p.residual}});
  return json{{"real_eigs", rep.real_eigs},
              {"nonreal", nonreal},
              {"M", static_cast<int>(rep.nonreal_pairs.size())},
              {"N", rep.richardson_N},
              {"bound_ok", rep.bound_ok}};
}

inline json to_json(const zero_list& zl) {
  json warnings = json::array();
  for (const auto& w : zl.cluster_warnings)
    warnings.push_back(json{{"x", w.x}, {"magnitude", w.magnitude}});
  return json{{"zeros", zl.zeros},
              {"endpoint_zero_a", zl.endpoint_zero_a},
              {"endpoint_zero_b", zl.endpoint_zero_b},
              {"cluster_warnings", warnings}};
}

inline json to_json(const endpoint_subrecord& sub) {
  return json{{"rule", sub.rule_id},
              {"case", sub.case_number},
              {"predicted", to_string(sub.predicted)},
              {"observed", sub.observed},
              {"applicable", sub.applicable},
              {"match", sub.match}};
}

inline json to_json(const endpoint_record& rec) {
  return json{{"side", rec.side},
              {"g_sign", rec.g_sign},
              {"by_phi", to_json(rec.by_phi)},
              {"by_psi", to_json(rec.by_psi)},
              {"overall_match", rec.overall_match}};
}

inline json to_json(const ghost_report& rep) {
  json violations = json::array();
  for (const auto& v : rep.interlace_violations)
    violations.push_back(json{{"lo", v.lo},
                              {"hi", v.hi},
                              {"other_count", v.other_count},
                              {"coincident", v.coincident}});
  return json{
      {"lambda", {{"re", rep.lambda.real()}, {"im", rep.lambda.imag()}}},
      {"rotation", {{"re", rep.rotation.real()}, {"im", rep.rotation.imag()}}},
      {"slopes",
       {{"dphi_a", rep.dphi_a},
        {"dpsi_a", rep.dpsi_a},
        {"dphi_b", rep.dphi_b},
        {"dpsi_b", rep.dpsi_b}}},
      {"g_sign", to_string(rep.G.sign)},
      {"g_sup", rep.G.sup_abs},
      {"identity_residual", rep.identity_residual},
      {"phi_zeros", to_json(rep.phi_zeros)},
      {"psi_zeros", to_json(rep.psi_zeros)},
      {"interlace_ok", rep.interlace_ok},
      {"interlace_violations", violations},
      {"left", to_json(rep.left_case)},
      {"right", to_json(rep.right_case)},
      {"endpoint_audit_passed", rep.endpoint_audit_passed},
      {"interior_vanish_count", rep.interior_vanish_count}};
}

// "type,re,im,residual" rows: real eigenvalues first, then the upper-half-plane
// pairs found in the search region.
inline void write_spectrum_csv(std::ostream& os, const spectrum_report& rep) {
  os << "type,re,im,residual\n";
  for (double lam : rep.real_eigs)
    os << "real," << format_double(lam) << ",0,0\n";
  for (const auto& p : rep.nonreal_pairs)
    os << "nonreal," << format_double(p.lambda.real()) << ','
       << format_double(p.lambda.imag()) << ',' << format_double(p.residual) << '\n';
}

// Eigenfunction components and the cumulative weighted mass on the grid the
// analysis already sampled; one row per sample point.
inline void write_plot_csv(std::ostream& os, const ghost_decomposition& ghost,
                           const g_data& G) {
  os << "x,phi,psi,G\n";
  const component_view phi = ghost.phi(), psi = ghost.psi();
  for (const auto& [x, g] : G.samples)
    os << format_double(x) << ',' << format_double(phi.value(x)) << ','
       << format_double(psi.value(x)) << ',' << format_double(g) << '\n';
}

// Raw complex trajectory on a uniform grid.
inline void write_trajectory_csv(std::ostream& os, const trajectory& tr,
                                 int n_rows = 2001) {
  if (n_rows < 2) throw domain_error("write_trajectory_csv: need at least 2 rows");
  os << "x,re_y,im_y,re_dy,im_dy\n";
  const double a = tr.a(), b = tr.b();
  for (int i = 0; i < n_rows; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / (n_rows - 1);
    const state s = tr.eval(x);
    os << format_double(x) << ',' << format_double(s.y.real()) << ','
       << format_double(s.y.imag()) << ',' << format_double(s.dy.real()) << ','
       << format_double(s.dy.imag()) << '\n';
  }
}

}  // namespace ghostspec
