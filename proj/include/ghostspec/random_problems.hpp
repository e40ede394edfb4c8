#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "problem.hpp"

namespace ghostspec {

// Deterministic generator of turning-profile test problems on [-1, 1]:
// piecewise-constant q with 1-3 pieces and values in [-50, 10]; weight with
// one sign change, either at a point or across an interior zero interval,
// with magnitudes in {1, 2}.  The same (seed, index) always yields the same
// problem on every platform.
inline sl_problem random_th3_problem(std::uint64_t seed, std::uint64_t index) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + index + 1);
  auto u01 = [&]() {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
  };
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * u01(); };

  sl_problem p;
  p.a = -1;
  p.b = 1;
  p.init_slope = {1, 0};

  const double s = u01() < 0.5 ? 1.0 : -1.0;
  const double m_left = u01() < 0.5 ? 1.0 : 2.0;
  const double m_right = u01() < 0.5 ? 1.0 : 2.0;
  const bool zero_block = u01() < 0.5;
  if (zero_block) {
    const double len = uni(0.05, 0.6);
    const double center = uni(-0.85 + 0.5 * len, 0.85 - 0.5 * len);
    const double c = center - 0.5 * len, d = center + 0.5 * len;
    p.r.breakpoints = {-1, c, d, 1};
    p.r.pieces = {{s * m_left, 0, 0, 0}, {0, 0, 0, 0}, {-s * m_right, 0, 0, 0}};
  } else {
    const double t = uni(-0.6, 0.6);
    p.r.breakpoints = {-1, t, 1};
    p.r.pieces = {{s * m_left, 0, 0, 0}, {-s * m_right, 0, 0, 0}};
  }

  const int nq = 1 + static_cast<int>(u01() * 3.0);
  std::vector<double> cuts;
  for (int attempt = 0; attempt < 100 && static_cast<int>(cuts.size()) < nq - 1;
       ++attempt) {
    const double c = uni(-0.9, 0.9);
    bool ok = true;
    for (double e : cuts) ok = ok && std::abs(c - e) >= 0.05;
    if (ok) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  p.q.breakpoints.clear();
  p.q.breakpoints.push_back(-1);
  for (double c : cuts) p.q.breakpoints.push_back(c);
  p.q.breakpoints.push_back(1);
  p.q.pieces.clear();
  for (std::size_t i = 0; i + 1 < p.q.breakpoints.size(); ++i)
    p.q.pieces.push_back({uni(-50, 10), 0, 0, 0});

  p.validate();
  return p;
}

}  // namespace ghostspec
