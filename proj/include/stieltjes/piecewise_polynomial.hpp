#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "stieltjes/binomial.hpp"
#include "stieltjes/derivator.hpp"
#include "stieltjes/error.hpp"

namespace stieltjes {

/// Piecewise polynomial in x, left-continuous like g.
///
/// Segment i covers (breaks[i], breaks[i+1]] and the first one is closed.
/// breaks may start with a repeated value, which makes segment 0 the single
/// point {breaks[0]}. Coefficients are in powers of the local variable
/// u = x - breaks[i].
class PiecewisePolynomial {
 public:
  PiecewisePolynomial() = default;
  PiecewisePolynomial(std::vector<double> breaks, std::vector<std::vector<double>> coeffs)
      : breaks_(std::move(breaks)), coeffs_(std::move(coeffs)) {
    if (breaks_.size() < 2 || coeffs_.size() + 1 != breaks_.size())
      throw spec_error("piecewise polynomial: need one coefficient list per segment");
    for (std::size_t i = 1; i < breaks_.size(); ++i) {
      const bool dup_ok = (i == 1 && breaks_[1] == breaks_[0]);
      if (!(breaks_[i] > breaks_[i - 1]) && !dup_ok)
        throw spec_error("piecewise polynomial: breaks must increase");
    }
    for (auto& c : coeffs_)
      if (c.empty()) c.push_back(0.0);
  }

  /// The constant v on the segment grid of d.
  static PiecewisePolynomial constant(const Derivator& d, double v) {
    auto br = segment_breaks(d);
    return PiecewisePolynomial(br, std::vector<std::vector<double>>(br.size() - 1, {v}));
  }

  /// Breakpoints of the segment grid of d, with a repeated first entry when a is a jump.
  static std::vector<double> segment_breaks(const Derivator& d) {
    std::vector<double> br;
    for (const auto& s : d.segments()) br.push_back(s.left);
    br.push_back(d.b());
    return br;
  }

  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<std::vector<double>>& coefficients() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }

  std::size_t degree() const {
    std::size_t m = 0;
    for (const auto& c : coeffs_) m = std::max(m, c.size() - 1);
    return m;
  }

  std::size_t segment_of(double x) const {
    auto it = std::lower_bound(breaks_.begin() + 1, breaks_.end(), x);
    if (it == breaks_.end()) return coeffs_.size() - 1;
    return static_cast<std::size_t>(it - breaks_.begin()) - 1;
  }

  std::size_t segment_right_of(double x) const {
    auto it = std::upper_bound(breaks_.begin() + 1, breaks_.end(), x);
    if (it == breaks_.end()) return coeffs_.size() - 1;
    return static_cast<std::size_t>(it - breaks_.begin()) - 1;
  }

  double eval_segment(std::size_t i, double x) const { return horner(coeffs_[i], x - breaks_[i]); }
  double operator()(double x) const { return eval_segment(segment_of(x), x); }
  double eval_right(double x) const { return eval_segment(segment_right_of(x), x); }

  /// Same function on a finer grid that contains all of our breaks.
  PiecewisePolynomial refine(const std::vector<double>& grid) const {
    std::vector<std::vector<double>> out;
    out.reserve(grid.size() - 1);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double l = grid[i], r = grid[i + 1];
      const std::size_t src = (r == l) ? 0 : segment_of(0.5 * (l + r));
      out.push_back(taylor_shift(coeffs_[src], l - breaks_[src]));
    }
    return PiecewisePolynomial(grid, std::move(out));
  }

  /// Union of two break lists; keeps a leading repeated point if either has one.
  static std::vector<double> merge_breaks(const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> g;
    g.reserve(p.size() + q.size());
    g.insert(g.end(), p.begin(), p.end());
    g.insert(g.end(), q.begin(), q.end());
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    const bool dup = (p.size() > 1 && p[0] == p[1]) || (q.size() > 1 && q[0] == q[1]);
    if (dup && g.front() == std::min(p.front(), q.front())) g.insert(g.begin(), g.front());
    return g;
  }

  friend PiecewisePolynomial operator*(const PiecewisePolynomial& p, const PiecewisePolynomial& q) {
    auto grid = merge_breaks(p.breaks_, q.breaks_);
    auto pr = p.breaks_ == grid ? p : p.refine(grid);
    auto qr = q.breaks_ == grid ? q : q.refine(grid);
    for (std::size_t i = 0; i < pr.coeffs_.size(); ++i) pr.coeffs_[i] = multiply(pr.coeffs_[i], qr.coeffs_[i]);
    return pr;
  }

  friend PiecewisePolynomial operator+(const PiecewisePolynomial& p, const PiecewisePolynomial& q) {
    return axpy(1.0, q, p);
  }
  friend PiecewisePolynomial operator-(const PiecewisePolynomial& p, const PiecewisePolynomial& q) {
    return axpy(-1.0, q, p);
  }

  PiecewisePolynomial scaled(double s) const {
    auto out = *this;
    for (auto& c : out.coeffs_)
      for (auto& v : c) v *= s;
    return out;
  }

  /// y + s * x on the merged grid.
  static PiecewisePolynomial axpy(double s, const PiecewisePolynomial& x, const PiecewisePolynomial& y) {
    auto grid = merge_breaks(x.breaks_, y.breaks_);
    auto xr = x.breaks_ == grid ? x : x.refine(grid);
    auto yr = y.breaks_ == grid ? y : y.refine(grid);
    for (std::size_t i = 0; i < yr.coeffs_.size(); ++i) {
      auto& c = yr.coeffs_[i];
      const auto& e = xr.coeffs_[i];
      if (c.size() < e.size()) c.resize(e.size(), 0.0);
      for (std::size_t k = 0; k < e.size(); ++k) c[k] += s * e[k];
    }
    return yr;
  }

  static double horner(const std::vector<double>& c, double u) {
    double s = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * u + *it;
    return s;
  }

  static std::vector<double> multiply(const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> r(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    return r;
  }

  /// Coefficients of c(u + s) in powers of u.
  static std::vector<double> taylor_shift(std::vector<double> c, double s) {
    if (s == 0.0) return c;
    // repeated synthetic division; stable and free of binomial growth
    const std::size_t n = c.size();
    for (std::size_t k = 0; k + 1 < n; ++k)
      for (std::size_t j = n - 1; j > k; --j) c[j - 1] += s * c[j];
    return c;
  }

 private:
  std::vector<double> breaks_;
  std::vector<std::vector<double>> coeffs_;
};

/// Exact integral of p against mu_g over [c, e).
///
/// On every interval of the merged grid both p and the slope of g^C are
/// fixed, so the continuous part reduces to a polynomial antiderivative.
inline double integrate_exact(const Derivator& d, const PiecewisePolynomial& p, double c, double e) {
  if (!(d.a() <= c && c <= e && e <= d.b())) throw spec_error("integration bounds outside [a, b] or reversed");
  if (c == e) return 0.0;
  std::vector<double> pts{c, e};
  for (double x : p.breaks())
    if (x > c && x < e) pts.push_back(x);
  for (const auto& s : d.segments())
    if (s.left > c && s.left < e) pts.push_back(s.left);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  double cont = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double l = pts[i], r = pts[i + 1];
    const double mid = 0.5 * (l + r);
    const double slope = d.segments()[d.segment_index(mid)].slope;
    if (slope == 0.0) continue;
    const std::size_t k = p.segment_of(mid);
    const auto& coef = p.coefficients()[k];
    const double base = p.breaks()[k];
    const double ul = l - base, ur = r - base;
    double sl = 0.0, sr = 0.0;
    for (std::size_t j = coef.size(); j-- > 0;) {
      sl = sl * ul + coef[j] / (j + 1.0);
      sr = sr * ur + coef[j] / (j + 1.0);
    }
    cont += slope * (sr * ur - sl * ul);
  }
  double atoms = 0.0;
  for (const auto& j : d.jumps())
    if (j.x >= c && j.x < e) atoms += p(j.x) * j.gap;
  return cont + atoms;
}

}  // namespace stieltjes

namespace stieltjes {

/// F(x) = integral of p over [a, x) against mu_g, as a piecewise polynomial.
/// F is left-continuous and jumps by p(x_i) * gap(x_i) just after each atom.
inline PiecewisePolynomial antiderivative(const Derivator& d, const PiecewisePolynomial& p) {
  auto grid = PiecewisePolynomial::merge_breaks(PiecewisePolynomial::segment_breaks(d), p.breaks());
  auto pr = p.breaks() == grid ? p : p.refine(grid);
  std::vector<std::vector<double>> out;
  double at_left = 0.0;  // F(l), left-continuous value at the segment's left end
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double l = grid[i], r = grid[i + 1];
    if (r == l) {
      out.push_back({0.0});
      continue;
    }
    const auto& c = pr.coefficients()[i];
    // F(l+) adds the atom at l, valued with the left-continuous p(l)
    const double start = at_left + (d.is_jump(l) ? pr(l) * d.gap(l) : 0.0);
    const double slope = d.segments()[d.segment_index(0.5 * (l + r))].slope;
    std::vector<double> f(c.size() + 1, 0.0);
    f[0] = start;
    for (std::size_t k = 0; k < c.size(); ++k) f[k + 1] = slope * c[k] / (k + 1.0);
    at_left = PiecewisePolynomial::horner(f, r - l);
    out.push_back(std::move(f));
  }
  return PiecewisePolynomial(std::move(grid), std::move(out));
}

}  // namespace stieltjes
