#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "stieltjes/derivator.hpp"
#include "stieltjes/error.hpp"
#include "stieltjes/gpoly.hpp"
#include "stieltjes/piecewise_polynomial.hpp"
#include "stieltjes/quadrature.hpp"

namespace stieltjes {

inline constexpr int kGramMaxIndex = 30;
inline constexpr int kGramDefaultIndex = 20;

inline double l2_inner_exact(const Derivator& d, const PiecewisePolynomial& p, const PiecewisePolynomial& q) {
  return integrate_exact(d, p * q, d.a(), d.b());
}

/// L^2_g as a weighted l^2 space: 32 Gauss-Legendre nodes on every sloped
/// segment of g^C plus one node per atom. Exact for piecewise polynomials of
/// degree up to 63 per segment, so products of g-monomials up to index 30
/// integrate without error. Values are held in long double: the shifted
/// monomial families are badly conditioned and double inputs alone cost
/// several digits by k = 8.
struct DiscreteL2 {
  using Real = long double;
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  std::vector<double> x;
  Vec w;
  std::vector<std::pair<double, Eigen::Index>> atoms;  // jump abscissa -> node index

  explicit DiscreteL2(const Derivator& d) {
    static const GaussLegendre<32> rule;
    std::vector<Real> ws;
    for (const auto& s : d.segments()) {
      if (s.slope == 0.0 || s.right <= s.left) continue;
      const double m = 0.5 * (s.left + s.right), h = 0.5 * (s.right - s.left);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        x.push_back(m + h * rule.nodes[i]);
        ws.push_back(Real(s.slope) * h * rule.weights[i]);
      }
    }
    for (const auto& j : d.jumps()) {
      if (j.x >= d.b()) continue;  // mu_g lives on [a, b)
      atoms.emplace_back(j.x, static_cast<Eigen::Index>(x.size()));
      x.push_back(j.x);
      ws.push_back(j.gap);
    }
    w = Eigen::Map<Vec>(ws.data(), static_cast<Eigen::Index>(ws.size()));
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(x.size()); }
  Real inner(const Vec& u, const Vec& v) const { return (w.array() * u.array() * v.array()).sum(); }
  Real norm2(const Vec& u) const { return inner(u, u); }
  Eigen::Index atom_index(double xj) const {
    for (const auto& [a, i] : atoms)
      if (a == xj) return i;
    return -1;
  }
};

/// Modified Gram-Schmidt with one reorthogonalization pass in the discrete
/// L^2_g. Members whose residual falls below rel_tol times their own norm
/// are treated as dependent; residual_norm2 keeps every squared residual.
struct Orthonormalized {
  std::vector<DiscreteL2::Vec> q;  // orthonormal node vectors
  std::vector<int> kept;           // family index that produced q[i]
  std::vector<long double> residual_norm2;
  std::vector<long double> norm2;
};

inline Orthonormalized orthonormalize(const DiscreteL2& space, const std::vector<DiscreteL2::Vec>& family,
                                      long double rel_tol = 1e-12L) {
  Orthonormalized out;
  for (std::size_t k = 0; k < family.size(); ++k) {
    DiscreteL2::Vec v = family[k];
    const long double n0 = space.norm2(v);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : out.q) v -= space.inner(q, v) * q;
    const long double nv = space.norm2(v);
    out.norm2.push_back(n0);
    out.residual_norm2.push_back(nv);
    if (n0 == 0.0L || !(std::sqrt(nv) > rel_tol * std::sqrt(n0))) continue;
    out.q.push_back(v / std::sqrt(nv));
    out.kept.push_back(static_cast<int>(k));
  }
  return out;
}

/// Node values of g_{x0,i}, i = (0 or 1)..k, from the closed form
/// sum_j C(i,j) (g^C(x) - g^C(x0))^j g^B_{x0,i-j}(x) in long double.
inline std::vector<DiscreteL2::Vec> monomial_values(const Derivator& d, const DiscreteL2& space, double x0, int k,
                                                    bool include_constant) {
  using Real = DiscreteL2::Real;
  const auto gb = detail::gb_values<Real>(d, x0, k);
  auto gc = [&](double x) {
    const auto& s = d.segments()[d.segment_index(x)];
    return Real(s.gc_left) + Real(s.slope) * (Real(x) - Real(s.left));
  };
  const Real gc0 = gc(x0);
  const int first = include_constant ? 0 : 1;
  std::vector<DiscreteL2::Vec> fam(k + 1 - first, DiscreteL2::Vec(space.size()));
  for (Eigen::Index m = 0; m < space.size(); ++m) {
    const double x = space.x[m];
    const std::size_t piece = d.piece_index(x);
    const Real A = gc(x) - gc0;
    for (int i = first; i <= k; ++i) {
      Real v = 0, pw = 1;
      for (int j = 0; j <= i; ++j) {
        v += Real(binomial(i, j)) * pw * gb[i - j][piece];
        pw *= A;
      }
      fam[i - first](m) = v;
    }
  }
  return fam;
}

/// Gram matrix of (1, g_{x0,1}, ..., g_{x0,k}), or of (g_{x0,1}, ..., g_{x0,k})
/// without the constant, from exact piecewise-polynomial integration.
inline Eigen::MatrixXd gram_matrix(const Derivator& d, double x0, int k, bool include_constant) {
  if (k < 0) throw spec_error("gram: k must be nonnegative");
  if (k > kGramMaxIndex) throw spec_error("gram: k above 30 is refused");
  auto table = gb_monomials(d, x0, k);
  std::vector<PiecewisePolynomial> fam;
  for (int i = include_constant ? 0 : 1; i <= k; ++i) fam.push_back(monomial_polynomial(d, x0, i, &table));
  const int n = static_cast<int>(fam.size());
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) G(i, j) = G(j, i) = l2_inner_exact(d, fam[i], fam[j]);
  return G;
}

struct GramDeterminant {
  double det = 0.0;
  double logdet = -std::numeric_limits<double>::infinity();
  double condition = std::numeric_limits<double>::infinity();
  bool singular = false;
  bool unreliable = false;  // condition above 1e12
};

/// Determinant through a pivoted LDL^T factorization.
inline GramDeterminant gram_det(const Eigen::MatrixXd& M) {
  GramDeterminant out;
  if (M.rows() == 0) {
    out.det = 1.0;
    out.logdet = 0.0;
    out.condition = 1.0;
    return out;
  }
  if (M.rows() != M.cols()) throw spec_error("gram_det: matrix must be square");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  const Eigen::VectorXd D = ldlt.vectorD();
  const double dmax = D.cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  out.condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  double logdet = 0.0, sign = 1.0;
  for (Eigen::Index i = 0; i < D.size(); ++i) {
    if (!(std::abs(D(i)) > 1e-14 * dmax)) {
      out.singular = true;
      break;
    }
    logdet += std::log(std::abs(D(i)));
    if (D(i) < 0.0) sign = -sign;
  }
  out.unreliable = out.condition > 1e12;
  if (out.singular || dmax == 0.0) {
    out.singular = true;
    out.det = 0.0;
    return out;
  }
  out.logdet = logdet;
  out.det = sign * std::exp(logdet);
  return out;
}

/// Determinant of the Gram matrix of g-monomials as the product of squared
/// Gram-Schmidt residuals. Relative accuracy degrades like the square root of
/// the condition number instead of linearly, as a matrix factorization would.
inline GramDeterminant gram_det_family(const Derivator& d, double x0, int k, bool include_constant) {
  if (k < 0 || k > kGramMaxIndex) throw spec_error("gram: k must lie in [0, 30]");
  DiscreteL2 space(d);
  auto basis = orthonormalize(space, monomial_values(d, space, x0, k, include_constant), 1e-15L);
  GramDeterminant out;
  out.condition = std::numeric_limits<double>::quiet_NaN();
  if (basis.q.size() < basis.norm2.size()) {
    out.singular = true;
    out.det = 0.0;
    return out;
  }
  long double logdet = 0.0L;
  for (long double r : basis.residual_norm2) logdet += std::log(r);
  out.logdet = static_cast<double>(logdet);
  out.det = std::exp(out.logdet);
  return out;
}

struct GramReport {
  double center = 0.0;
  int k = 0;
  Eigen::MatrixXd gram_with_constant;
  Eigen::MatrixXd gram_without_constant;
  std::vector<double> ratios;          // r_1..r_k, squared distance of 1 to span{g_1..g_j}
  std::vector<double> det_ratios;      // the same from determinants (NaN where singular)
  std::vector<int> divergent;          // j where the two disagree beyond 1e-6 relative
  std::vector<double> conditions;      // condition number of the Gram matrix with constant, per j
  double beta = 0.0;                   // max of the level set of g through x0
  double limit = 0.0;                  // gap of g at beta
};

/// Distances of the constant 1 to span{g_{x0,1}, ..., g_{x0,j}}, j = 1..kmax,
/// by orthogonalization; determinant ratios are kept as a cross-check.
inline GramReport ratio_sequence(const Derivator& d, double x0, int kmax = kGramDefaultIndex) {
  if (kmax < 1) throw spec_error("ratio_sequence: kmax must be at least 1");
  if (kmax > kGramMaxIndex) throw spec_error("ratio_sequence: kmax above 30 is refused");
  GramReport rep;
  rep.center = x0;
  rep.k = kmax;
  rep.beta = d.level_set_max(x0);
  rep.limit = rep.beta < d.b() ? d.gap(rep.beta) : 0.0;

  rep.gram_with_constant = gram_matrix(d, x0, kmax, true);
  rep.gram_without_constant = rep.gram_with_constant.bottomRightCorner(kmax, kmax);

  DiscreteL2 space(d);
  auto fam = monomial_values(d, space, x0, kmax, false);
  auto basis = orthonormalize(space, fam);
  if (basis.q.empty()) throw spec_error("ratio_sequence: every g_{x0,j} is null in L2_g");

  DiscreteL2::Vec res = DiscreteL2::Vec::Ones(space.size());
  std::size_t used = 0;
  for (int j = 1; j <= kmax; ++j) {
    while (used < basis.q.size() && basis.kept[used] < j) {
      for (int pass = 0; pass < 2; ++pass) res -= space.inner(basis.q[used], res) * basis.q[used];
      ++used;
    }
    rep.ratios.push_back(static_cast<double>(space.norm2(res)));

    const auto with = gram_det(rep.gram_with_constant.topLeftCorner(j + 1, j + 1));
    const auto without = gram_det(rep.gram_without_constant.topLeftCorner(j, j));
    rep.conditions.push_back(with.condition);
    double dr = std::numeric_limits<double>::quiet_NaN();
    if (!without.singular) dr = with.singular ? 0.0 : std::exp(with.logdet - without.logdet);
    rep.det_ratios.push_back(dr);
    const double r = rep.ratios.back();
    if (!std::isnan(dr) && std::abs(dr - r) > 1e-6 * std::max(std::abs(r), 1e-300)) rep.divergent.push_back(j);
  }
  return rep;
}

/// Squared L^2_g distance of the indicator of {x0} to span{1, g_{x0,1..k}}.
/// Equal to gap - gap^2 * sum q_i(x0)^2 for an orthonormal basis q_i of the
/// span; the residual of the indicator is formed directly to avoid cancellation.
inline double indicator_distance(const Derivator& d, double x0, int k) {
  if (!d.is_jump(x0) || x0 >= d.b()) throw spec_error("indicator_distance: x0 must be a jump point");
  if (k < 0 || k > kGramMaxIndex) throw spec_error("indicator_distance: k must lie in [0, 30]");
  DiscreteL2 space(d);
  auto basis = orthonormalize(space, monomial_values(d, space, x0, k, true));
  DiscreteL2::Vec res = DiscreteL2::Vec::Zero(space.size());
  res(space.atom_index(x0)) = 1.0;
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis.q) res -= space.inner(q, res) * q;
  return static_cast<double>(space.norm2(res));
}

struct HilbertCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// For continuous g, det Gram(1, g_1, ..., g_k) = (g(b) - g(a))^((k+1)^2) H_{k+1},
/// with H_n = c_n^4 / c_{2n} and c_n = prod_{i<n} i!.
inline HilbertCheck hilbert_check(const Derivator& d, int k) {
  if (!d.continuous()) throw spec_error("hilbert_check: derivator must have no jumps");
  if (k < 0 || k > kGramMaxIndex) throw spec_error("hilbert_check: k must lie in [0, 30]");
  HilbertCheck out;
  out.lhs = gram_det(gram_matrix(d, d.a(), k, true)).det;
  const int n = k + 1;
  long double logc_n = 0.0L, logc_2n = 0.0L;
  for (int i = 1; i < 2 * n; ++i) {
    const long double lf = std::lgamma(static_cast<long double>(i) + 1.0L);
    if (i < n) logc_n += lf;
    logc_2n += lf;
  }
  const long double mass = d.eval(d.b()) - d.eval(d.a());
  out.rhs = static_cast<double>(std::exp(4.0L * logc_n - logc_2n + (n * n) * std::log(mass)));
  return out;
}

}  // namespace stieltjes
