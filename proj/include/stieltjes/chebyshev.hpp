#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace stieltjes {

/// Chebyshev points of the second kind on [l, r], endpoints included.
inline std::vector<double> chebyshev_lobatto(double l, double r, int m) {
  if (m <= 1) return {0.5 * (l + r)};
  std::vector<double> y(m);
  for (int j = 0; j < m; ++j) {
    const double s = -std::cos(std::numbers::pi * j / (m - 1));
    y[j] = 0.5 * (l + r) + 0.5 * (r - l) * s;
  }
  y.front() = l;
  y.back() = r;
  return y;
}

/// Polynomial basis used by the fitting backends.
///
/// With Y > 0 it is T_i(2y/Y - 1), Chebyshev polynomials shifted to [0, Y].
/// With Y = 0 every constraint sits at y = 0 and plain powers y^i are used.
class FitBasis {
 public:
  FitBasis(double Y, int degree) : Y_(Y), n_(degree) {}

  int size() const { return n_ + 1; }
  bool chebyshev() const { return Y_ > 0.0; }

  /// D[k][i] = k-th derivative in y of basis function i at y, for k <= kmax.
  std::vector<std::vector<double>> derivatives(double y, int kmax) const {
    std::vector<std::vector<double>> D(kmax + 1, std::vector<double>(n_ + 1, 0.0));
    if (!chebyshev()) {
      for (int k = 0; k <= kmax; ++k)
        for (int i = k; i <= n_; ++i) {
          double f = 1.0;
          for (int t = i - k + 1; t <= i; ++t) f *= t;
          D[k][i] = f * std::pow(y, i - k);
        }
      return D;
    }
    const double s = 2.0 * y / Y_ - 1.0;
    // T_{i+1}^(k) = 2 s T_i^(k) + 2 k T_i^(k-1) - T_{i-1}^(k), in s
    for (int k = 0; k <= kmax; ++k) {
      for (int i = 0; i <= n_; ++i) {
        double v;
        if (i == 0) v = (k == 0) ? 1.0 : 0.0;
        else if (i == 1) v = (k == 0) ? s : (k == 1 ? 1.0 : 0.0);
        else v = 2.0 * s * D[k][i - 1] + (k > 0 ? 2.0 * k * D[k - 1][i - 1] : 0.0) - D[k][i - 2];
        D[k][i] = v;
      }
    }
    double scale = 1.0;
    for (int k = 1; k <= kmax; ++k) {
      scale *= 2.0 / Y_;
      for (int i = 0; i <= n_; ++i) D[k][i] *= scale;
    }
    return D;
  }

  /// Monomial coefficients in y of sum_i c_i phi_i(y).
  std::vector<double> to_monomial(const std::vector<double>& c) const {
    if (!chebyshev()) return c;
    const int m = n_ + 1;
    std::vector<double> out(m, 0.0);
    // s = (2/Y) y - 1 as a polynomial in y
    std::vector<double> tm1{1.0}, t{-1.0, 2.0 / Y_};
    auto accumulate = [&](const std::vector<double>& p, double w) {
      for (std::size_t k = 0; k < p.size(); ++k) out[k] += w * p[k];
    };
    accumulate(tm1, c[0]);
    if (m > 1) accumulate(t, c[1]);
    for (int i = 2; i < m; ++i) {
      std::vector<double> next(t.size() + 1, 0.0);
      for (std::size_t k = 0; k < t.size(); ++k) {
        next[k] += -2.0 * t[k];
        next[k + 1] += 2.0 * (2.0 / Y_) * t[k];
      }
      for (std::size_t k = 0; k < tm1.size(); ++k) next[k] -= tm1[k];
      accumulate(next, c[i]);
      tm1 = std::move(t);
      t = std::move(next);
    }
    return out;
  }

 private:
  double Y_;
  int n_;
};

}  // namespace stieltjes
