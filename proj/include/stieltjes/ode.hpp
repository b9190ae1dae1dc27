#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "stieltjes/error.hpp"

namespace stieltjes {

using OdeState = std::vector<double>;
using OdeRhs = std::function<void(double, const OdeState&, OdeState&)>;

struct OdeOptions {
  double rtol = 1e-11;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0 picks |t1 - t0| / 100
  std::size_t max_steps = 1000000;
};

struct OdeTrajectory {
  std::vector<double> t;
  std::vector<OdeState> y;
  double max_error_estimate = 0.0;
};

/// Dormand-Prince 5(4) with an error-per-step controller. Integrates from
/// t0 to t1 (either direction) and records every accepted step.
inline OdeTrajectory dormand_prince(const OdeRhs& f, double t0, double t1, OdeState y0,
                                    const OdeOptions& opt = {}) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeTrajectory tr;
  tr.t.push_back(t0);
  tr.y.push_back(y0);
  if (t1 == t0) return tr;
  const std::size_t n = y0.size();
  const double dir = t1 > t0 ? 1.0 : -1.0;
  double h = opt.initial_step > 0.0 ? opt.initial_step : std::abs(t1 - t0) / 100.0;
  double t = t0;
  OdeState y = std::move(y0), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n);
  f(t, y, k1);
  for (std::size_t step = 0; step < opt.max_steps; ++step) {
    if (dir * (t1 - t) <= 0.0) return tr;
    const double hs = dir * std::min(h, std::abs(t1 - t));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
    f(t + c2 * hs, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * hs, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * hs, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * hs, tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(t + hs, tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(t + hs, ynew, k7);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(ei) / sc);
    }
    if (!std::isfinite(err)) throw numerical_error("ODE: non-finite state");
    if (err <= 1.0) {
      t += hs;
      y.swap(ynew);
      k1.swap(k7);
      tr.t.push_back(t);
      tr.y.push_back(y);
      tr.max_error_estimate = std::max(tr.max_error_estimate, err * opt.atol);
    }
    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = std::abs(hs) * fac;
    if (h < 1e-14 * std::max(1.0, std::abs(t))) throw numerical_error("ODE: step size underflow");
  }
  throw numerical_error("ODE: step budget exhausted");
}

}  // namespace stieltjes
