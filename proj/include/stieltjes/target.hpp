#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "stieltjes/derivator.hpp"
#include "stieltjes/error.hpp"
#include "stieltjes/integrate.hpp"

namespace stieltjes {

/// One piece of a target in the variable y = g^C(x).
struct TargetPiece {
  double y_left = 0.0;
  double y_right = 0.0;
  bool degenerate = false;
  std::function<double(double)> f;  // unused when degenerate
  double scalar = 0.0;              // used when degenerate

  double operator()(double y) const { return degenerate ? scalar : f(y); }
};

/// Per-piece representation of a g-continuous function.
struct PiecewiseTarget {
  std::vector<TargetPiece> pieces;
  std::size_t size() const { return pieces.size(); }
  const TargetPiece& operator[](std::size_t j) const { return pieces[j]; }
};

/// x -> F(g(x)), with the right limit F(g(x+)) attached.
inline Integrand compose(const Derivator& d, std::function<double(double)> F) {
  auto dp = std::make_shared<const Derivator>(d);
  std::vector<double> hints;
  for (const auto& s : d.segments()) hints.push_back(s.left);
  Integrand it = Integrand::from_function([dp, F](double x) { return F(dp->eval(x)); }, std::move(hints));
  it.right = [dp, F](double x) { return F(dp->eval_right(x)); };
  return it;
}

/// x -> f_j(g^C(x)) on piece j; the right limit at a jump reads the next piece.
inline Integrand from_pieces(const Derivator& d, const PiecewiseTarget& t) {
  if (t.size() != d.pieces().size()) throw spec_error("target piece count does not match the derivator");
  auto dp = std::make_shared<const Derivator>(d);
  auto tp = std::make_shared<const PiecewiseTarget>(t);
  std::vector<double> hints;
  for (const auto& s : d.segments()) hints.push_back(s.left);
  Integrand it = Integrand::from_function(
      [dp, tp](double x) { return (*tp)[dp->piece_index(x)](dp->continuous_part(x)); }, std::move(hints));
  it.right = [dp, tp](double x) {
    if (x >= dp->b()) throw spec_error("right limit undefined at the right endpoint b");
    return (*tp)[dp->piece_index_right(x)](dp->continuous_part(x));
  };
  return it;
}

/// Target given by y-samples per piece, linearly interpolated. A piece with
/// a degenerate y-interval takes a single sample.
inline PiecewiseTarget samples_target(const Derivator& d,
                                      std::vector<std::vector<std::pair<double, double>>> samples) {
  const auto pieces = d.pieces();
  if (samples.size() != pieces.size())
    throw spec_error("samples target: expected " + std::to_string(pieces.size()) + " pieces, got " +
                     std::to_string(samples.size()));
  PiecewiseTarget t;
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    auto s = std::move(samples[j]);
    if (s.empty()) throw spec_error("samples target: empty piece " + std::to_string(j));
    std::sort(s.begin(), s.end());
    TargetPiece tp{pieces[j].y_left, pieces[j].y_right, pieces[j].degenerate_y(), {}, 0.0};
    if (tp.degenerate) {
      tp.scalar = s.back().second;
    } else {
      const double slack = 1e-12 * (1.0 + std::abs(tp.y_right));
      if (s.front().first > tp.y_left + slack || s.back().first < tp.y_right - slack)
        throw spec_error("samples target: piece " + std::to_string(j) + " does not cover its y-interval");
      auto sp = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(s));
      tp.f = [sp](double y) {
        const auto& v = *sp;
        if (v.size() == 1 || y <= v.front().first) return v.front().second;
        if (y >= v.back().first) return v.back().second;
        auto it = std::upper_bound(v.begin(), v.end(), y,
                                   [](double q, const std::pair<double, double>& p) { return q < p.first; });
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        if (hi.first == lo.first) return hi.second;
        return lo.second + (hi.second - lo.second) * (y - lo.first) / (hi.first - lo.first);
      };
    }
    t.pieces.push_back(std::move(tp));
  }
  return t;
}

/// Right limit f(x+), exact when f carries one.
inline double right_value(const Derivator& d, const Integrand& f, double x) {
  if (f.right) return f.right(x);
  return detail::right_limit(d, f, x);
}

/// Splits a g-continuous f into functions of y = g^C(x), one per piece.
///
/// f_j(y) reads f at the rightmost x of piece j with g^C(x) = y. At the open
/// left end of a piece the right limit of f is used. Throws when f is not
/// constant on a flat segment of g.
inline PiecewiseTarget decompose_target(const Derivator& d, const Integrand& f, double tol = 1e-8) {
  const auto pieces = d.pieces();
  for (const auto& s : d.segments()) {
    if (s.slope != 0.0 || s.right == s.left) continue;
    // f must be constant on (l, r] when g is; probe the open segment
    const double ref = f(s.right);
    for (double t : {0.1, 0.37, 0.5, 0.81, 0.999}) {
      const double x = s.left + t * (s.right - s.left);
      if (std::abs(f(x) - ref) > tol * (1.0 + std::abs(ref)))
        throw spec_error("target is not g-continuous: it varies on the flat segment [" + std::to_string(s.left) +
                         ", " + std::to_string(s.right) + "]");
    }
  }
  auto dp = std::make_shared<const Derivator>(d);
  auto fp = std::make_shared<const Integrand>(f);
  PiecewiseTarget t;
  for (const auto& p : pieces) {
    TargetPiece tp{p.y_left, p.y_right, p.degenerate_y(), {}, 0.0};
    if (tp.degenerate) {
      tp.scalar = f(p.right);
    } else {
      tp.f = [dp, fp, p](double y) {
        const double x = dp->gc_inverse(y, p.left, p.right);
        if (x == p.left && !p.left_closed) return right_value(*dp, *fp, x);
        return (*fp)(x);
      };
    }
    t.pieces.push_back(std::move(tp));
  }
  return t;
}

}  // namespace stieltjes
