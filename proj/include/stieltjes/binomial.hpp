#pragma once

#include <cstdint>
#include <numeric>

#include "stieltjes/error.hpp"

namespace stieltjes {

inline constexpr int kMaxBinomialOrder = 60;

// Exact C(n, k) for n <= 60, built as a running product with a gcd
// reduction at each step so no intermediate exceeds 64 bits.
inline std::uint64_t binomial_exact(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  if (n > kMaxBinomialOrder) throw spec_error("binomial order above 60 is refused (overflow guard)");
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    std::uint64_t den = static_cast<std::uint64_t>(i);
    const std::uint64_t g1 = std::gcd(r, den);
    r /= g1;
    den /= g1;
    num /= den;  // den now divides num because r * num / den is an integer
    r *= num;
  }
  return r;
}

inline double binomial(int n, int k) { return static_cast<double>(binomial_exact(n, k)); }

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace stieltjes
