#pragma once

#include <cmath>
#include <type_traits>
#include <vector>

#include "stieltjes/error.hpp"

namespace stieltjes {

/// Two-point Hermite interpolation.
///
/// Returns the coefficients, in powers of (y - y_left), of the polynomial
/// of degree 2n - 1 whose derivatives of order 0..n-1 equal v at y_left and
/// w at y_right. Built from divided differences over repeated nodes.
///
/// Coefficients are long double: the power basis about y_left is badly
/// conditioned at the far end, and at n = 6 even correctly rounded double
/// coefficients miss the y_right conditions by about 1e-8. In long double the
/// conditions hold to about 1e-10 up to n = 6 and drift to 2e-9 at n = 7.
inline std::vector<long double> hermite_interpolate(double y_left, double y_right, const std::vector<double>& v,
                                                    const std::vector<double>& w) {
  if (!(y_left < y_right)) throw spec_error("hermite: degenerate interval");
  if (v.size() != w.size() || v.empty()) throw spec_error("hermite: need equally many nonzero conditions per end");
  const std::size_t n = v.size(), m = 2 * n;
  const long double h = static_cast<long double>(y_right) - y_left;
  // work in t = (y - y_left) / h so the nodes are 0 and 1
  std::vector<long double> hp(n, 1.0);
  for (std::size_t k = 1; k < n; ++k) hp[k] = hp[k - 1] * h;
  auto node = [&](std::size_t i) { return i < n ? 0.0L : 1.0L; };
  auto deriv = [&](std::size_t i, std::size_t k) { return static_cast<long double>(i < n ? v[k] : w[k]) * hp[k]; };

  std::vector<long double> fact(m, 1.0);
  for (std::size_t k = 1; k < m; ++k) fact[k] = fact[k - 1] * k;

  // column-by-column divided differences; dd[i] holds f[z_i .. z_{i+k}]
  std::vector<long double> dd(m), newton(m);
  for (std::size_t i = 0; i < m; ++i) dd[i] = deriv(i, 0);
  newton[0] = dd[0];
  for (std::size_t k = 1; k < m; ++k) {
    for (std::size_t i = 0; i + k < m; ++i) {
      if (node(i) == node(i + k)) {
        dd[i] = deriv(i, k) / fact[k];
      } else {
        dd[i] = (dd[i + 1] - dd[i]) / (node(i + k) - node(i));
      }
    }
    newton[k] = dd[0];
  }

  // expand sum_k newton[k] * prod_{i<k} (u - z_i)
  std::vector<long double> out(m, 0.0), basis{1.0};
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < basis.size(); ++j) out[j] += newton[k] * basis[j];
    std::vector<long double> next(basis.size() + 1, 0.0);
    const long double z = node(k);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      next[j + 1] += basis[j];
      next[j] -= z * basis[j];
    }
    basis = std::move(next);
  }
  long double scale = 1.0;
  for (std::size_t k = 0; k < m; ++k, scale /= h) out[k] *= scale;
  return out;
}

/// k-th derivative at u of the polynomial with coefficients c in powers of u.
template <class Real>
Real poly_derivative(const std::vector<Real>& c, int k, std::type_identity_t<Real> u) {
  Real s = 0;
  for (int i = static_cast<int>(c.size()) - 1; i >= k; --i) {
    Real f = 1;
    for (int t = i - k + 1; t <= i; ++t) f *= t;
    s = s * u + c[i] * f;
  }
  return s;
}

}  // namespace stieltjes
