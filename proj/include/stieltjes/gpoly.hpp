#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

#include "stieltjes/binomial.hpp"
#include "stieltjes/chebyshev.hpp"
#include "stieltjes/derivator.hpp"
#include "stieltjes/error.hpp"
#include "stieltjes/integrate.hpp"
#include "stieltjes/piecewise_polynomial.hpp"

namespace stieltjes {

/// Values of the jump monomials g^B_{x0,n}, one constant per piece of g.
struct JumpMonomialTable {
  double center = 0.0;
  int max_degree = 0;
  std::vector<std::vector<double>> values;  // values[n][piece]

  double operator()(int n, std::size_t piece) const { return values[n][piece]; }
};

namespace detail {

// Jump-monomial recursion in a chosen floating type; values[n][piece].
template <class Real>
std::vector<std::vector<Real>> gb_values(const Derivator& d, double x0, int N) {
  if (N < 0) throw spec_error("degree must be nonnegative");
  if (N > kMaxBinomialOrder) throw spec_error("degree above 60 is refused (overflow guard)");
  if (!(x0 >= d.a() && x0 <= d.b())) throw spec_error("center outside [a, b]");
  const auto jumps = d.jumps();
  const auto pieces = d.pieces();
  const std::size_t J = jumps.size();

  // value of g^B_{n} at each jump abscissa, level by level
  std::vector<Real> prev(J, Real(1)), cur(J, Real(0));
  std::vector<std::vector<Real>> values(N + 1, std::vector<Real>(pieces.size(), Real(1)));

  for (int n = 1; n <= N; ++n) {
    // right of x0: prefix sums in increasing order
    Real acc = 0;
    for (std::size_t i = 0; i < J; ++i) {
      if (jumps[i].x < x0) continue;
      cur[i] = n * acc;
      acc += prev[i] * Real(jumps[i].gap);
    }
    // left of x0: suffix sums including the jump itself
    acc = 0;
    for (std::size_t i = J; i-- > 0;) {
      if (jumps[i].x >= x0) continue;
      acc += prev[i] * Real(jumps[i].gap);
      cur[i] = -n * acc;
    }
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      const double x = pieces[p].right;
      Real s = 0;
      if (x >= x0) {
        for (std::size_t i = 0; i < J && jumps[i].x < x; ++i)
          if (jumps[i].x >= x0) s += prev[i] * Real(jumps[i].gap);
        values[n][p] = n * s;
      } else {
        for (std::size_t i = 0; i < J && jumps[i].x < x0; ++i)
          if (jumps[i].x >= x) s += prev[i] * Real(jumps[i].gap);
        values[n][p] = -n * s;
      }
    }
    std::swap(prev, cur);
  }
  return values;
}

}  // namespace detail

/// g^B_{x0,n} for n = 0..N by the finite recursion over the jump set.
///
/// Right of x0: g^B_n(x) = n * sum over jumps t in [x0, x) of g^B_{n-1}(t) gap(t).
/// Left of x0:  g^B_n(x) = -n * sum over jumps t in [x, x0) of g^B_{n-1}(t) gap(t).
inline JumpMonomialTable gb_monomials(const Derivator& d, double x0, int N) {
  JumpMonomialTable tab;
  tab.values = detail::gb_values<double>(d, x0, N);
  tab.center = x0;
  tab.max_degree = N;
  return tab;
}

/// g_{x0,n} as an exact piecewise polynomial in x on the segment grid of d.
inline PiecewisePolynomial monomial_polynomial(const Derivator& d, double x0, int n,
                                               const JumpMonomialTable* table = nullptr) {
  if (n < 0) throw spec_error("degree must be nonnegative");
  JumpMonomialTable local;
  if (!table || table->max_degree < n || table->center != x0) {
    local = gb_monomials(d, x0, n);
    table = &local;
  }
  const double gc0 = d.continuous_part(x0);
  auto breaks = PiecewisePolynomial::segment_breaks(d);
  std::vector<std::vector<double>> coeffs;
  for (const auto& s : d.segments()) {
    const std::size_t piece = d.piece_index(s.right == s.left ? s.left : s.right);
    // (g^C(x) - g^C(x0))^k = (A + slope * u)^k
    const std::vector<double> lin{s.gc_left - gc0, s.slope};
    std::vector<double> pw{1.0};
    std::vector<double> c(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
      const double w = binomial(n, k) * (*table)(n - k, piece);
      if (w != 0.0)
        for (std::size_t i = 0; i < pw.size(); ++i) c[i] += w * pw[i];
      if (k < n) pw = PiecewisePolynomial::multiply(pw, lin);
    }
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    coeffs.push_back(std::move(c));
  }
  return PiecewisePolynomial(std::move(breaks), std::move(coeffs));
}

/// Closed-form g-monomial as an integrand carrying its exact form.
inline Integrand monomial_closed(const Derivator& d, double x0, int n) {
  return Integrand::from_polynomial(monomial_polynomial(d, x0, n));
}

namespace detail {

// Barycentric interpolant through Chebyshev points of the first kind on [l, r].
struct ChebInterp {
  double l = 0.0, r = 0.0;
  std::vector<double> nodes, values, weights;

  static std::vector<double> make_nodes(double l, double r, int m) {
    std::vector<double> x(m);
    for (int j = 0; j < m; ++j)
      x[j] = 0.5 * (l + r) + 0.5 * (r - l) * std::cos(M_PI * (2.0 * j + 1.0) / (2.0 * m));
    return x;
  }

  ChebInterp(double l_, double r_, std::vector<double> x, std::vector<double> v)
      : l(l_), r(r_), nodes(std::move(x)), values(std::move(v)) {
    const int m = static_cast<int>(nodes.size());
    weights.resize(m);
    for (int j = 0; j < m; ++j)
      weights[j] = ((j % 2) ? -1.0 : 1.0) * std::sin(M_PI * (2.0 * j + 1.0) / (2.0 * m));
  }

  double operator()(double x) const {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double dx = x - nodes[j];
      if (dx == 0.0) return values[j];
      const double w = weights[j] / dx;
      num += w * values[j];
      den += w;
    }
    return num / den;
  }
};

}  // namespace detail

/// g_{x0,n} computed from its defining iterated integral, as an oracle
/// independent of the closed form.
///
/// Each level is tabulated on every segment of d at Chebyshev points, where
/// it is a polynomial of degree at most its level, and the next level
/// integrates that interpolant. The last level integrates on demand.
inline Integrand monomial_recursive(const Derivator& d, double x0, int n, double tol = 1e-12) {
  if (n < 0) throw spec_error("degree must be nonnegative");
  if (!(x0 >= d.a() && x0 <= d.b())) throw spec_error("center outside [a, b]");
  if (n == 0) return Integrand::from_function([](double) { return 1.0; });

  auto breaks = PiecewisePolynomial::segment_breaks(d);
  auto dp = std::make_shared<const Derivator>(d);
  auto level_value = [dp, x0, tol](const Integrand& prev, int k, double x) {
    if (x >= x0) return k * ls_integrate(*dp, prev, x0, x, tol);
    return -k * ls_integrate(*dp, prev, x, x0, tol);
  };

  Integrand prev = Integrand::from_function([](double) { return 1.0; }, breaks);
  for (int k = 1; k < n; ++k) {
    auto segs = std::make_shared<std::vector<detail::ChebInterp>>();
    for (const auto& s : d.segments()) {
      if (s.right == s.left) {
        const double v = level_value(prev, k, s.left);
        segs->emplace_back(s.left, s.right, std::vector<double>{s.left}, std::vector<double>{v});
        continue;
      }
      auto nodes = detail::ChebInterp::make_nodes(s.left, s.right, k + 3);
      std::vector<double> vals;
      for (double x : nodes) vals.push_back(level_value(prev, k, x));
      segs->emplace_back(s.left, s.right, std::move(nodes), std::move(vals));
    }
    auto locate = PiecewisePolynomial::constant(d, 0.0);
    prev = Integrand::from_function(
        [segs, locate](double x) { return (*segs)[locate.segment_of(x)](x); }, breaks);
  }
  return Integrand::from_function([prev, n, level_value](double x) { return level_value(prev, n, x); },
                                  breaks);
}

/// Sum of alpha_k g_{x0,k}, bound to a derivator.
class GPolynomial {
 public:
  GPolynomial(Derivator d, double center, std::vector<double> coefficients)
      : d_(std::make_shared<const Derivator>(std::move(d))), center_(center), alpha_(std::move(coefficients)) {
    if (alpha_.empty()) alpha_.push_back(0.0);
    if (!(center_ >= d_->a() && center_ <= d_->b())) throw spec_error("center outside [a, b]");
    table_ = gb_monomials(*d_, center_, degree());
    gc0_ = d_->continuous_part(center_);
  }

  /// Fitted form: p given by Chebyshev coefficients on [0, Y] with center a.
  /// Values are computed from this form, which stays accurate at degrees
  /// where the monomial coefficients suffer heavy cancellation.
  static GPolynomial from_chebyshev(const Derivator& d, double Y, std::vector<double> cheb) {
    FitBasis basis(Y, static_cast<int>(cheb.size()) - 1);
    GPolynomial p(d, d.a(), basis.to_monomial(cheb));
    p.cheb_ = std::move(cheb);
    p.Y_ = Y;
    return p;
  }

  bool has_chebyshev_form() const { return !cheb_.empty(); }
  const std::vector<double>& chebyshev_coefficients() const { return cheb_; }

  const Derivator& derivator() const { return *d_; }
  double center() const { return center_; }
  const std::vector<double>& coefficients() const { return alpha_; }
  int degree() const { return static_cast<int>(alpha_.size()) - 1; }

  /// Sum over monomials: each g_{x0,n}(x) expanded by the binomial formula.
  double eval(double x) const { return eval_piece(d_->piece_index(x), d_->continuous_part(x)); }
  double operator()(double x) const { return eval(x); }

  double eval_right(double x) const {
    if (x >= d_->b()) throw spec_error("right limit undefined at the right endpoint b");
    return eval_piece(d_->piece_index_right(x), d_->continuous_part(x));
  }

  /// Factored form: sum_k p^(k)(g^C(x)) g^B_k(x) / k!, with
  /// p(y) = sum_n alpha_n (y - g^C(x0))^n.
  double eval_factored(double x) const {
    const std::size_t piece = d_->piece_index(x);
    const double u = d_->continuous_part(x) - gc0_;
    const int m = degree();
    double total = 0.0;
    for (int k = 0; k <= m; ++k) {
      const double gb = table_(k, piece);
      if (gb == 0.0) continue;
      // p^(k)(y) / k! = sum_{n >= k} alpha_n C(n, k) u^(n-k)
      double s = 0.0;
      for (int n = m; n >= k; --n) s = s * u + alpha_[n] * binomial(n, k);
      total += s * gb;
    }
    return total;
  }

  PiecewisePolynomial as_piecewise() const {
    PiecewisePolynomial acc = PiecewisePolynomial::constant(*d_, 0.0);
    for (int n = 0; n <= degree(); ++n)
      if (alpha_[n] != 0.0)
        acc = PiecewisePolynomial::axpy(alpha_[n], monomial_polynomial(*d_, center_, n, &table_), acc);
    return acc;
  }

  Integrand as_integrand() const { return Integrand::from_polynomial(as_piecewise()); }

  const JumpMonomialTable& jump_table() const { return table_; }

 private:
  double eval_piece(std::size_t piece, double gc) const {
    if (!cheb_.empty()) return eval_chebyshev(piece, gc);
    const double u = gc - gc0_;
    const int m = degree();
    // powers of u and the binomial sum per degree
    std::vector<double> upow(m + 1, 1.0);
    for (int k = 1; k <= m; ++k) upow[k] = upow[k - 1] * u;
    double total = 0.0;
    for (int n = 0; n <= m; ++n) {
      if (alpha_[n] == 0.0) continue;
      double gn = 0.0;
      for (int k = 0; k <= n; ++k) gn += binomial(n, k) * upow[k] * table_(n - k, piece);
      total += alpha_[n] * gn;
    }
    return total;
  }

  double eval_chebyshev(std::size_t piece, double y) const {
    const int m = degree();
    int kmax = 0;
    while (kmax < m && table_(kmax + 1, piece) != 0.0) ++kmax;
    FitBasis basis(Y_, m);
    auto D = basis.derivatives(y, kmax);
    double total = 0.0;
    for (int k = 0; k <= kmax; ++k) {
      double pk = 0.0;
      for (int i = 0; i <= m; ++i) pk += cheb_[i] * D[k][i];
      total += pk * table_(k, piece) / factorial(k);
    }
    return total;
  }

  std::shared_ptr<const Derivator> d_;
  double center_;
  std::vector<double> alpha_;
  JumpMonomialTable table_;
  double gc0_ = 0.0;
  std::vector<double> cheb_;
  double Y_ = 0.0;
};

/// Same function re-expanded over the monomials centered at x1, using
/// g_{x0,n} = sum_k C(n, k) g_{x0,k}(x1) g_{x1,n-k}.
inline GPolynomial recenter(const GPolynomial& p, double x1) {
  const auto& d = p.derivator();
  const int m = p.degree();
  const auto& a = p.coefficients();
  // g_{x0,j}(x1) for j = 0..m
  std::vector<double> at(m + 1);
  for (int j = 0; j <= m; ++j) {
    std::vector<double> e(j + 1, 0.0);
    e[j] = 1.0;
    at[j] = GPolynomial(d, p.center(), e).eval(x1);
  }
  std::vector<double> beta(m + 1, 0.0);
  for (int mm = 0; mm <= m; ++mm)
    for (int n = mm; n <= m; ++n) beta[mm] += a[n] * binomial(n, mm) * at[n - mm];
  return GPolynomial(d, x1, std::move(beta));
}

/// g-derivative: alpha_k -> (k + 1) alpha_{k+1}.
inline GPolynomial g_derive(const GPolynomial& p) {
  const auto& a = p.coefficients();
  std::vector<double> out;
  for (std::size_t k = 1; k < a.size(); ++k) out.push_back(k * a[k]);
  if (out.empty()) out.push_back(0.0);
  return GPolynomial(p.derivator(), p.center(), std::move(out));
}

/// Truncated g-exponential: sum_{n <= N} lambda^n / n! g_{x0,n}.
inline GPolynomial exp_g_truncated(const Derivator& d, double lambda, double x0, int N) {
  if (N < 0) throw spec_error("truncation order must be nonnegative");
  std::vector<double> c(N + 1);
  double term = 1.0;
  for (int n = 0; n <= N; ++n) {
    c[n] = term;
    term *= lambda / (n + 1);
  }
  return GPolynomial(d, x0, std::move(c));
}

}  // namespace stieltjes
