#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "stieltjes/derivator.hpp"
#include "stieltjes/error.hpp"
#include "stieltjes/piecewise_polynomial.hpp"
#include "stieltjes/quadrature.hpp"

namespace stieltjes {

inline constexpr double kDefaultTol = 1e-10;

/// A function on [a, b], left-continuous at jumps. The evaluator must be
/// re-entrant. An optional exact piecewise-polynomial form enables closed
/// form integration; optional hints mark kinks for the quadrature.
struct Integrand {
  std::function<double(double)> f;
  std::optional<PiecewisePolynomial> exact;
  std::vector<double> hints;
  // right limit, when known in closed form
  std::function<double(double)> right;

  double operator()(double x) const { return f(x); }

  static Integrand from_function(std::function<double(double)> fn, std::vector<double> hints = {}) {
    Integrand it;
    it.f = std::move(fn);
    it.hints = std::move(hints);
    return it;
  }

  static Integrand from_polynomial(PiecewisePolynomial p) {
    Integrand it;
    auto shared = std::make_shared<const PiecewisePolynomial>(std::move(p));
    it.f = [shared](double x) { return (*shared)(x); };
    it.right = [shared](double x) { return shared->eval_right(x); };
    it.exact = *shared;
    it.hints = shared->breaks();
    return it;
  }

  /// Checks that evaluator and exact form agree at segment midpoints.
  bool consistent(double tol = 1e-12) const {
    if (!exact) return true;
    const auto& br = exact->breaks();
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      if (br[i + 1] == br[i]) continue;
      const double m = 0.5 * (br[i] + br[i + 1]);
      const double v = (*exact)(m);
      if (std::abs(f(m) - v) > tol * (1.0 + std::abs(v))) return false;
    }
    return true;
  }
};

/// Integral over [c, e) against mu_g, with the quadrature error estimate.
inline QuadratureResult ls_integrate_detailed(const Derivator& d, const Integrand& f, double c, double e,
                                              double tol = kDefaultTol) {
  if (!(d.a() <= c && c <= e && e <= d.b())) throw spec_error("integration bounds outside [a, b] or reversed");
  if (f.exact) return {integrate_exact(d, *f.exact, c, e), 0.0, 0};
  QuadratureResult out;
  if (c == e) return out;

  std::vector<double> pts{c, e};
  for (const auto& s : d.segments())
    if (s.left > c && s.left < e) pts.push_back(s.left);
  for (double h : f.hints)
    if (h > c && h < e) pts.push_back(h);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  double cont_len = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (d.segments()[d.segment_index(0.5 * (pts[i] + pts[i + 1]))].slope > 0.0) cont_len += pts[i + 1] - pts[i];

  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double l = pts[i], r = pts[i + 1];
    const double slope = d.segments()[d.segment_index(0.5 * (l + r))].slope;
    if (slope == 0.0) continue;
    // the open interval (l, r) avoids jumps, so f is sampled only where it is regular
    auto q = integrate_adaptive(f.f, l, r, tol * (r - l) / cont_len / slope);
    out.value += slope * q.value;
    out.error += slope * q.error;
    out.subintervals += q.subintervals;
  }
  for (const auto& j : d.jumps())
    if (j.x >= c && j.x < e) out.value += f(j.x) * j.gap;
  return out;
}

inline double ls_integrate(const Derivator& d, const Integrand& f, double c, double e, double tol = kDefaultTol) {
  return ls_integrate_detailed(d, f, c, e, tol).value;
}

inline Integrand product(const Integrand& f, const Integrand& h) {
  if (f.exact && h.exact) return Integrand::from_polynomial(*f.exact * *h.exact);
  std::vector<double> hints = f.hints;
  hints.insert(hints.end(), h.hints.begin(), h.hints.end());
  return Integrand::from_function([f, h](double x) { return f(x) * h(x); }, std::move(hints));
}

inline double l2_inner(const Derivator& d, const Integrand& f, const Integrand& h, double tol = kDefaultTol) {
  return ls_integrate(d, product(f, h), d.a(), d.b(), tol);
}

inline double l2_norm(const Derivator& d, const Integrand& f, double tol = kDefaultTol) {
  return std::sqrt(std::max(0.0, l2_inner(d, f, f, tol)));
}

/// Ramp profile in the g variable: 0 below g(x1) - 1/n, rising to 1 at
/// g(x1), flat up to g(x2) - 1/n, falling to 0 at g(x2). Written as a
/// clipped minimum so that it stays well defined when the rising and
/// falling ramps overlap.
inline double plateau_profile(double y, double y1, double y2, int n) {
  const double up = n * (y - y1) + 1.0;
  const double down = -n * (y - y2);
  return std::max(0.0, std::min({1.0, up, down}));
}

inline Integrand plateau_approx(const Derivator& d, double x1, double x2, int n) {
  if (n < 1) throw spec_error("plateau: n must be at least 1");
  if (!(x1 <= x2)) throw spec_error("plateau: x1 must not exceed x2");
  const double y1 = d.eval(x1), y2 = d.eval(x2);
  if (!(y2 - y1 > 0.0)) throw spec_error("plateau: mu_g([x1, x2)) = 0");
  // kinks of the composed function: preimages of the profile corners
  std::vector<double> hints{x1, x2};
  for (double lvl : {y1 - 1.0 / n, y1, y2 - 1.0 / n, y2}) hints.push_back(d.last_at_or_below(lvl));
  Integrand it = Integrand::from_function(
      [d, y1, y2, n](double x) { return plateau_profile(d.eval(x), y1, y2, n); }, std::move(hints));
  it.right = [d, y1, y2, n](double x) { return plateau_profile(d.eval_right(x), y1, y2, n); };
  return it;
}

struct DerivativeEstimate {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

// Richardson extrapolation of q(h) -> q(0) for q(h) = q0 + c1 h + c2 h^2 + ...,
// halving h each row. Returns the tableau entry with the smallest estimated
// error, Ridders style.
template <class Q>
DerivativeEstimate richardson(Q&& q, double h0, int rows = 12) {
  std::vector<std::vector<double>> t(rows);
  DerivativeEstimate best{0.0, std::numeric_limits<double>::infinity()};
  double h = h0;
  for (int i = 0; i < rows; ++i, h *= 0.5) {
    t[i].push_back(q(h));
    double fac = 1.0;
    for (int k = 1; k <= i; ++k) {
      fac *= 2.0;
      t[i].push_back(t[i][k - 1] + (t[i][k - 1] - t[i - 1][k - 1]) / (fac - 1.0));
      const double err = std::max(std::abs(t[i][k] - t[i][k - 1]), std::abs(t[i][k] - t[i - 1][k - 1]));
      if (err < best.error) best = {t[i][k], err};
    }
    if (i > 3 && std::abs(t[i][i] - t[i - 1][i - 1]) > 2.0 * best.error) break;
  }
  if (rows == 1) best = {t[0][0], 0.0};
  return best;
}

inline double right_limit(const Derivator& d, const Integrand& f, double t) {
  if (f.right) return f.right(t);
  const auto& seg = d.segments()[d.segment_index_right(t)];
  const double h0 = 0.25 * (seg.right - t);
  return richardson([&](double h) { return f(t + h); }, h0).value;
}

inline double jump_quotient(const Derivator& d, const Integrand& f, double t, DerivativeEstimate* est) {
  const double delta = d.gap(t);
  if (f.right) {
    est->value = (f.right(t) - f(t)) / delta;
    est->error = 0.0;
    return est->value;
  }
  const auto& seg = d.segments()[d.segment_index_right(t)];
  auto r = richardson([&](double h) { return f(t + h); }, 0.25 * (seg.right - t));
  est->value = (r.value - f(t)) / delta;
  est->error = r.error / delta;
  return est->value;
}

}  // namespace detail

/// Stieltjes derivative of f with respect to g at t in [a, b).
///
/// Jump points use the right limit of f. Points inside a flat component of
/// g use the value at the right end of that component. Elsewhere the
/// quotient (f(s) - f(t)) / (g(s) - g(t)) is extrapolated to s -> t,
/// two-sided where g increases on both sides.
inline DerivativeEstimate stieltjes_derivative(const Derivator& d, const Integrand& f, double t) {
  if (!(t >= d.a() && t < d.b())) throw spec_error("derivative point must lie in [a, b)");
  DerivativeEstimate est;
  if (d.is_jump(t)) {
    detail::jump_quotient(d, f, t, &est);
    return est;
  }
  const auto segs = d.segments();
  const auto& lseg = segs[d.segment_index(t)];
  const auto& rseg = segs[d.segment_index_right(t)];
  const bool left_flat = (t == d.a()) || lseg.slope == 0.0;
  const bool right_flat = rseg.slope == 0.0;

  if (left_flat && right_flat) {
    const double bn = d.level_set_max(t);
    if (bn >= d.b()) throw spec_error("flat component of g reaches b: derivative undefined");
    return stieltjes_derivative(d, f, bn);
  }

  // distance to the nearest grid point other than t on each side
  const double dl = t - lseg.left;
  const double dr = rseg.right - t;
  const double ft = f(t);
  const double gt = d.eval(t);
  DerivativeEstimate r;
  if (left_flat) {
    r = detail::richardson([&](double h) { return (f(t + h) - ft) / (d.eval(t + h) - gt); }, 0.5 * dr);
  } else if (right_flat) {
    r = detail::richardson([&](double h) { return (ft - f(t - h)) / (gt - d.eval(t - h)); }, 0.5 * dl);
  } else {
    const double h0 = 0.5 * std::min(dl, dr);
    r = detail::richardson([&](double h) { return (f(t + h) - f(t - h)) / (d.eval(t + h) - d.eval(t - h)); }, h0);
  }
  if (!std::isfinite(r.value) || r.error > 1e-3 * std::max(1.0, std::abs(r.value)))
    throw numerical_error("Stieltjes derivative: difference quotient did not converge");
  return r;
}

}  // namespace stieltjes
