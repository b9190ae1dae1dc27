#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "stieltjes/derivator.hpp"

namespace fixtures {

using stieltjes::Derivator;

// identity on [0, 1] with a unit jump at 0.5
inline Derivator A() { return Derivator::identity(0.0, 1.0, {{0.5, 1.0}}); }

// pure jump on [0, 3]: unit gaps at 0, 1, 2
inline Derivator Bp() { return Derivator(0.0, 3.0, {{0.0, 0.0}, {3.0, 0.0}}, {{0.0, 1.0}, {1.0, 1.0}, {2.0, 1.0}}); }

// identity on [0, 1]
inline Derivator C() { return Derivator::identity(0.0, 1.0); }

// g = 2x on [0, 1]
inline Derivator C2() { return Derivator(0.0, 1.0, {{0.0, 0.0}, {1.0, 2.0}}, {}); }

// continuous with a kink
inline Derivator Ckink() { return Derivator(0.0, 1.0, {{0.0, 0.0}, {0.3, 0.6}, {1.0, 1.0}}, {}); }

// flat on [0.4, 0.6], jump at 0.8
inline Derivator Flat() {
  return Derivator(0.0, 1.0, {{0.0, 0.0}, {0.4, 0.4}, {0.6, 0.4}, {1.0, 0.8}}, {{0.8, 0.5}});
}

/// Random derivator on [0, 1] with at most max_jumps jumps and at most
/// max_segments linear pieces of g^C, some of them flat.
inline Derivator random(std::mt19937& rng, int max_jumps = 5, int max_segments = 6) {
  std::uniform_int_distribution<int> nseg(1, max_segments), njump(0, max_jumps);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int s = nseg(rng);
  std::vector<double> xs{0.0, 1.0};
  while (static_cast<int>(xs.size()) < s + 1) {
    const double x = 0.05 + 0.9 * unit(rng);
    bool ok = true;
    for (double v : xs) ok = ok && std::abs(v - x) > 0.03;
    if (ok) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  std::vector<stieltjes::Breakpoint> bps{{0.0, 0.0}};
  double y = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double slope = unit(rng) < 0.2 ? 0.0 : 0.2 + 2.0 * unit(rng);
    y += slope * (xs[i] - xs[i - 1]);
    bps.push_back({xs[i], y});
  }
  const int m = njump(rng);
  std::vector<double> js;
  if (m > 0 && unit(rng) < 0.3) js.push_back(0.0);
  while (static_cast<int>(js.size()) < m) {
    const double x = 0.02 + 0.95 * unit(rng);
    bool ok = true;
    for (double v : js) ok = ok && std::abs(v - x) > 0.02;
    if (ok) js.push_back(x);
  }
  std::sort(js.begin(), js.end());
  std::vector<stieltjes::Jump> jumps;
  for (double x : js) jumps.push_back({x, 0.1 + unit(rng)});
  return Derivator(0.0, 1.0, std::move(bps), std::move(jumps));
}

/// Uniform grid plus every segment end and a point just right of it.
inline std::vector<double> grid(const Derivator& d, int n) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(d.a() + (d.b() - d.a()) * i / (n - 1));
  for (const auto& s : d.segments()) {
    xs.push_back(s.right);
    if (s.left + 1e-7 < d.b()) xs.push_back(s.left + 1e-7);
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

}  // namespace fixtures
