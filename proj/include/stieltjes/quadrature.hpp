#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "stieltjes/error.hpp"

namespace stieltjes {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
template <std::size_t N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    for (std::size_t i = 0; i < (N + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= N; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      nodes[i] = -x;
      nodes[N - 1 - i] = x;
      weights[i] = w;
      weights[N - 1 - i] = w;
    }
  }

  template <class F>
  double apply(F&& f, double l, double r) const {
    const double h = 0.5 * (r - l), m = 0.5 * (r + l);
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += weights[i] * f(m + h * nodes[i]);
    return h * s;
  }
};

inline const GaussLegendre<16>& gauss16() {
  static const GaussLegendre<16> rule;
  return rule;
}

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t subintervals = 0;
};

inline constexpr std::size_t kMaxSubintervals = std::size_t{1} << 20;

/// Adaptive bisection with the 16-point rule on [l, r]. An interval is
/// accepted when the whole-interval estimate and the sum over its halves
/// differ by less than its share of tol, or by less than the roundoff floor
/// of the estimate itself.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double l, double r, double tol,
                                    std::size_t max_subintervals = kMaxSubintervals) {
  QuadratureResult out;
  if (!(r > l)) return out;
  const auto& gl = gauss16();
  const double total = r - l;
  struct Work {
    double l, r, whole;
  };
  std::vector<Work> stack{{l, r, gl.apply(f, l, r)}};
  std::size_t live = 1;
  while (!stack.empty()) {
    Work w = stack.back();
    stack.pop_back();
    const double m = 0.5 * (w.l + w.r);
    const double left = gl.apply(f, w.l, m);
    const double right = gl.apply(f, m, w.r);
    const double halves = left + right;
    const double diff = std::abs(halves - w.whole);
    const double share = tol * (w.r - w.l) / total;
    const double floor = 1e-14 * (std::abs(left) + std::abs(right));
    if (diff <= share || diff <= floor || !(m > w.l && m < w.r)) {
      out.value += halves;
      out.error += diff;
      ++out.subintervals;
      --live;
      continue;
    }
    live += 1;
    if (live + out.subintervals > max_subintervals)
      throw numerical_error("quadrature: tolerance not reached within the subinterval cap");
    stack.push_back({m, w.r, right});
    stack.push_back({w.l, m, left});
  }
  if (!std::isfinite(out.value)) throw numerical_error("quadrature: non-finite integrand values");
  return out;
}

}  // namespace stieltjes
