#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "stieltjes/derivator.hpp"
#include "stieltjes/error.hpp"
#include "stieltjes/integrate.hpp"
#include "stieltjes/target.hpp"

namespace stieltjes {

/// Greedy partition a = x_0 < ... < x_m = b with g(x_i) - g(x_{i-1}+) <= delta:
/// each next point is the last z with g(z) <= g(x_i+) + delta.
inline std::vector<double> partition_by_oscillation(const Derivator& d, double delta) {
  if (!(delta > 0.0)) throw spec_error("partition: delta must be positive");
  std::vector<double> xs{d.a()};
  while (xs.back() < d.b()) {
    const double x = xs.back();
    const double level = d.eval_right(x) + delta;
    // a remainder lost to rounding in the running level is not worth a cell
    const double slack = 1e-12 * std::max(1.0, std::abs(level));
    double next = d.eval(d.b()) <= level + slack ? d.b() : d.last_at_or_below(level);
    if (!(next > x)) throw numerical_error("partition: no progress at x = " + std::to_string(x));
    xs.push_back(std::min(next, d.b()));
  }
  return xs;
}

/// Largest g(x_i) - g(x_{i-1}+) over the partition.
inline double partition_oscillation(const Derivator& d, const std::vector<double>& xs) {
  double worst = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) worst = std::max(worst, d.eval(xs[i]) - d.eval_right(xs[i - 1]));
  return worst;
}

inline void check_partition(const Derivator& d, const std::vector<double>& xs) {
  if (xs.size() < 2 || xs.front() != d.a() || xs.back() != d.b())
    throw spec_error("partition must start at a and end at b");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw spec_error("partition must be strictly increasing");
}

/// Interpolant that is affine in g on each (x_{i-1}, x_i], matching f(x_{i-1}+)
/// at the left and f(x_i) at the right; constant where that cell has no mass.
inline Integrand g_linear_interpolant(const Derivator& d, const Integrand& f, const std::vector<double>& xs) {
  check_partition(d, xs);
  struct Cell {
    double left, right, g_left_plus, f_left_plus, slope;
  };
  auto cells = std::make_shared<std::vector<Cell>>();
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double gl = d.eval_right(xs[i - 1]);
    const double fl = right_value(d, f, xs[i - 1]);
    const double den = d.eval(xs[i]) - gl;
    cells->push_back({xs[i - 1], xs[i], gl, fl, den > 0.0 ? (f(xs[i]) - fl) / den : 0.0});
  }
  auto dp = std::make_shared<const Derivator>(d);
  const double f0 = f(xs.front());
  auto locate = [cells](double x) {
    auto it = std::lower_bound(cells->begin(), cells->end(), x, [](const Cell& c, double v) { return c.right < v; });
    return it == cells->end() ? cells->size() - 1 : static_cast<std::size_t>(it - cells->begin());
  };
  std::vector<double> hints(xs.begin(), xs.end());
  for (const auto& s : d.segments()) hints.push_back(s.left);
  Integrand it = Integrand::from_function(
      [dp, cells, locate, f0](double x) {
        if (x == dp->a()) return f0;
        const auto& c = (*cells)[locate(x)];
        return c.f_left_plus + (dp->eval(x) - c.g_left_plus) * c.slope;
      },
      std::move(hints));
  it.right = [dp, cells](double x) {
    auto k = std::upper_bound(cells->begin(), cells->end(), x, [](double v, const Cell& c) { return v < c.right; });
    const auto& c = (k == cells->end()) ? cells->back() : *k;
    return c.f_left_plus + (dp->eval_right(x) - c.g_left_plus) * c.slope;
  };
  return it;
}

/// Points for sampled sup-norm checks: per piece, a y-grid mapped back to
/// x, the piece's right end, and the right limit at its open left end.
struct SamplePoint {
  double x;
  bool right_limit;  // compare f(x+) instead of f(x)
  std::size_t piece;
};

inline std::vector<SamplePoint> sample_points(const Derivator& d, int grid_n) {
  std::vector<SamplePoint> out;
  const auto pieces = d.pieces();
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    const auto& p = pieces[j];
    if (!p.left_closed) out.push_back({p.left, true, j});
    else out.push_back({p.left, false, j});
    if (!p.degenerate_y()) {
      for (int i = 1; i < grid_n; ++i) {
        const double y = p.y_left + (p.y_right - p.y_left) * i / grid_n;
        out.push_back({d.gc_inverse(y, p.left, p.right), false, j});
      }
    }
    if (p.right > p.left) out.push_back({p.right, false, j});
  }
  return out;
}

/// Sampled modulus of g-continuity: largest |f(s) - f(t)| over sampled
/// pairs with |g(s) - g(t)| <= delta, right limits included as samples.
inline double sampled_modulus(const Derivator& d, const Integrand& f, double delta, int grid_n = 400) {
  std::vector<std::pair<double, double>> gv;
  for (const auto& sp : sample_points(d, grid_n)) {
    if (sp.right_limit) gv.push_back({d.eval_right(sp.x), right_value(d, f, sp.x)});
    else gv.push_back({d.eval(sp.x), f(sp.x)});
  }
  std::sort(gv.begin(), gv.end());
  double w = 0.0;
  for (std::size_t i = 0; i < gv.size(); ++i)
    for (std::size_t k = i + 1; k < gv.size() && gv[k].first - gv[i].first <= delta; ++k)
      w = std::max(w, std::abs(gv[k].second - gv[i].second));
  return w;
}

}  // namespace stieltjes
