#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "stieltjes/chebyshev.hpp"
#include "stieltjes/derivator.hpp"
#include "stieltjes/error.hpp"
#include "stieltjes/gpoly.hpp"
#include "stieltjes/hermite.hpp"
#include "stieltjes/integrate.hpp"
#include "stieltjes/ode.hpp"
#include "stieltjes/partition.hpp"
#include "stieltjes/target.hpp"

namespace stieltjes {

inline constexpr int kDefaultDegreeCap = 40;

/// c[j][k] = g^B_{a,k} / k! on piece j, for k <= min(j, max_degree).
struct JumpCoefficients {
  std::vector<std::vector<double>> c;

  std::size_t size() const { return c.size(); }
  const std::vector<double>& operator[](std::size_t j) const { return c[j]; }
  /// Order of the differential operator acting on piece j.
  int order(std::size_t j) const { return static_cast<int>(c[j].size()) - 1; }
};

inline JumpCoefficients jump_coefficients(const Derivator& d, int max_degree) {
  if (max_degree < 0) throw spec_error("max_degree must be nonnegative");
  const auto pieces = d.pieces();
  const int top = std::min<int>(max_degree, static_cast<int>(d.jumps().size()));
  auto tab = gb_monomials(d, d.a(), top);
  JumpCoefficients out;
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    const int kmax = std::min<int>(static_cast<int>(j), top);
    std::vector<double> row(kmax + 1);
    for (int k = 0; k <= kmax; ++k) row[k] = tab(k, j) / factorial(k);
    while (row.size() > 1 && row.back() == 0.0) row.pop_back();
    out.c.push_back(std::move(row));
  }
  return out;
}

struct ApproxResult {
  GPolynomial poly;
  std::string backend;
  std::vector<double> per_piece;
  double sup_error = 0.0;
  double condition = 0.0;
  double l2_residual = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> warnings;
};

/// Per-piece sup |f - p_g| on a y-grid of grid_n points per piece mapped
/// back to x; right limits are compared at the open left end of each piece.
inline std::vector<double> piece_errors(const Derivator& d, const Integrand& f, const GPolynomial& p, int grid_n) {
  std::vector<double> err(d.pieces().size(), 0.0);
  for (const auto& sp : sample_points(d, grid_n)) {
    const double e = sp.right_limit ? std::abs(right_value(d, f, sp.x) - p.eval_right(sp.x))
                                    : std::abs(f(sp.x) - p.eval(sp.x));
    err[sp.piece] = std::max(err[sp.piece], std::isnan(e) ? std::numeric_limits<double>::infinity() : e);
  }
  return err;
}

inline double sup_error(const Derivator& d, const Integrand& f, const GPolynomial& p, int grid_n = 200) {
  auto e = piece_errors(d, f, p, grid_n);
  return *std::max_element(e.begin(), e.end());
}

namespace detail {

struct LsqSolution {
  Eigen::VectorXd x;
  double condition = 0.0;
};

// Least squares through an SVD of the column-equilibrated matrix.
inline LsqSolution solve_lsq(Eigen::MatrixXd A, const Eigen::VectorXd& b, const char* who) {
  Eigen::VectorXd scale(A.cols());
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    const double nrm = A.col(j).norm();
    scale(j) = nrm > 0.0 ? 1.0 / nrm : 1.0;
    A.col(j) *= scale(j);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  const double smin = s.size() ? s(s.size() - 1) : 0.0;
  LsqSolution out;
  out.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (A.rows() < A.cols() || !(smin > 1e-13 * smax))
    throw numerical_error(std::string(who) + ": rank-deficient design matrix (condition number " +
                          std::to_string(out.condition) + ")");
  out.x = scale.asDiagonal() * svd.solve(b);
  return out;
}

inline double mean_row_norm(const std::vector<Eigen::VectorXd>& rows) {
  if (rows.empty()) return 1.0;
  double s = 0.0;
  for (const auto& r : rows) s += r.norm();
  return s / rows.size() > 0.0 ? s / rows.size() : 1.0;
}

inline Eigen::MatrixXd stack(const std::vector<Eigen::VectorXd>& rows, int cols) {
  Eigen::MatrixXd A(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) A.row(i) = rows[i].transpose();
  return A;
}

inline ApproxResult finish(const Derivator& d, const FitBasis& basis, const Eigen::VectorXd& coef,
                           const Integrand& f, std::string backend, double cond, int grid_n) {
  std::vector<double> c(coef.data(), coef.data() + coef.size());
  GPolynomial p = basis.chebyshev() ? GPolynomial::from_chebyshev(d, d.continuous_part(d.b()), c)
                                    : GPolynomial(d, d.a(), c);
  ApproxResult r{p, std::move(backend), {}, 0.0, cond, std::numeric_limits<double>::quiet_NaN(), {}};
  r.per_piece = piece_errors(d, f, p, grid_n);
  r.sup_error = *std::max_element(r.per_piece.begin(), r.per_piece.end());
  return r;
}

inline void check_degree(int degree) {
  if (degree < 0) throw spec_error("degree must be nonnegative");
  if (degree > kMaxBinomialOrder) throw spec_error("degree above 60 is refused (overflow guard)");
}

}  // namespace detail

/// Least-squares fit of p so that sum_k c[j][k] p^(k) matches f_j at
/// Chebyshev points of every nondegenerate y-interval, plus one weighted
/// row per degenerate piece. Returns p_g = sum alpha_n g_{a,n}.
inline ApproxResult fit_sup_lsq(const Derivator& d, const PiecewiseTarget& targets, const JumpCoefficients& c,
                                int degree, int samples_per_piece = 0, int grid_n = 200) {
  detail::check_degree(degree);
  if (targets.size() != c.size() || targets.size() != d.pieces().size())
    throw spec_error("fit: targets, jump coefficients and derivator disagree on the piece count");
  if (samples_per_piece <= 0) samples_per_piece = 4 * (degree + 1);
  const FitBasis basis(d.continuous_part(d.b()), degree);
  const int n = basis.size();

  std::vector<Eigen::VectorXd> rows, point_rows;
  std::vector<double> rhs, point_rhs;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const auto& tp = targets[j];
    const int kmax = std::min(c.order(j), degree);
    auto row_at = [&](double y) {
      auto D = basis.derivatives(y, kmax);
      Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
      for (int k = 0; k <= kmax; ++k)
        for (int i = 0; i < n; ++i) r(i) += c[j][k] * D[k][i];
      return r;
    };
    if (tp.degenerate) {
      point_rows.push_back(row_at(tp.y_left));
      point_rhs.push_back(tp.scalar);
      continue;
    }
    for (double y : chebyshev_lobatto(tp.y_left, tp.y_right, samples_per_piece)) {
      rows.push_back(row_at(y));
      rhs.push_back(tp(y));
    }
  }
  const double w = detail::mean_row_norm(rows);
  for (std::size_t i = 0; i < point_rows.size(); ++i) {
    rows.push_back(w * point_rows[i]);
    rhs.push_back(w * point_rhs[i]);
  }
  auto sol = detail::solve_lsq(detail::stack(rows, n), Eigen::Map<Eigen::VectorXd>(rhs.data(), rhs.size()),
                               "fit_sup_lsq");
  return detail::finish(d, basis, sol.x, from_pieces(d, targets), "sup_lsq", sol.condition, grid_n);
}

/// Orthogonal projection in L^2_g onto span{g_{a,0}, ..., g_{a,degree}}.
///
/// Directions the measure cannot see (for instance monomials vanishing
/// mu_g-almost everywhere) are fixed by a pointwise least-squares fit on
/// the sample grid, so the result is also sensible off the support.
inline ApproxResult fit_l2_projection(const Derivator& d, const Integrand& f, int degree, int grid_n = 200) {
  detail::check_degree(degree);
  const int n = degree + 1;
  auto table = gb_monomials(d, d.a(), degree);
  std::vector<PiecewisePolynomial> g;
  for (int k = 0; k < n; ++k) g.push_back(monomial_polynomial(d, d.a(), k, &table));
  auto inner = [&](const PiecewisePolynomial& p, const PiecewisePolynomial& q) {
    return integrate_exact(d, p * q, d.a(), d.b());
  };
  auto inner_f = [&](const PiecewisePolynomial& p) {
    return ls_integrate(d, product(f, Integrand::from_polynomial(p)), d.a(), d.b());
  };

  Eigen::MatrixXd G(n, n);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    rhs(i) = inner_f(g[i]);
    for (int j = 0; j <= i; ++j) G(i, j) = G(j, i) = inner(g[i], g[j]);
  }
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i) s(i) = G(i, i) > 0.0 ? 1.0 / std::sqrt(G(i, i)) : 0.0;
  Eigen::MatrixXd Gs = s.asDiagonal() * G * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Gs, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff(), lmin = eig.eigenvalues().minCoeff();
  const double cond = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();

  std::vector<std::string> warnings;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::VectorXd> null_dirs;
  if (cond <= 1e12) {
    alpha = s.asDiagonal() * Gs.ldlt().solve(s.asDiagonal() * rhs);
  } else {
    warnings.push_back("Gram condition number " + std::to_string(cond) +
                       " above 1e12: solved by Gram-Schmidt on the monomials");
    // q_i = sum_k T(k, i) g_k, orthonormal in L^2_g; dependent monomials are dropped
    std::vector<PiecewisePolynomial> q;
    std::vector<Eigen::VectorXd> t;
    for (int k = 0; k < n; ++k) {
      PiecewisePolynomial v = g[k];
      Eigen::VectorXd tv = Eigen::VectorXd::Unit(n, k);
      const double n0 = std::sqrt(std::max(0.0, G(k, k)));
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < q.size(); ++i) {
          const double r = inner(q[i], v);
          v = PiecewisePolynomial::axpy(-r, q[i], v);
          tv -= r * t[i];
        }
      }
      const double nv = std::sqrt(std::max(0.0, inner(v, v)));
      if (!(nv > 1e-9 * n0) || n0 == 0.0) {
        null_dirs.push_back(tv);
        continue;
      }
      q.push_back(v.scaled(1.0 / nv));
      t.push_back(tv / nv);
    }
    for (std::size_t i = 0; i < q.size(); ++i) alpha += inner_f(q[i]) * t[i];
  }
  if (!null_dirs.empty()) {
    // directions invisible to mu_g: pointwise fit along the numerical null space
    auto pts = sample_points(d, std::max(8, 2 * n));
    Eigen::MatrixXd A(pts.size(), null_dirs.size());
    Eigen::VectorXd r(pts.size());
    GPolynomial base(d, d.a(), std::vector<double>(alpha.data(), alpha.data() + n));
    std::vector<GPolynomial> nd;
    for (const auto& v : null_dirs) nd.emplace_back(d, d.a(), std::vector<double>(v.data(), v.data() + n));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& sp = pts[i];
      const double fv = sp.right_limit ? right_value(d, f, sp.x) : f(sp.x);
      r(i) = fv - (sp.right_limit ? base.eval_right(sp.x) : base.eval(sp.x));
      for (std::size_t j = 0; j < nd.size(); ++j) A(i, j) = sp.right_limit ? nd[j].eval_right(sp.x) : nd[j].eval(sp.x);
    }
    Eigen::VectorXd z = A.completeOrthogonalDecomposition().solve(r);
    for (std::size_t j = 0; j < null_dirs.size(); ++j) alpha += z(j) * null_dirs[j];
    warnings.push_back(std::to_string(null_dirs.size()) +
                       " direction(s) not determined by the L2 inner product, fixed by pointwise least squares");
  }

  GPolynomial p(d, d.a(), std::vector<double>(alpha.data(), alpha.data() + n));
  ApproxResult res{p, "l2", {}, 0.0, cond, 0.0, std::move(warnings)};
  res.per_piece = piece_errors(d, f, p, grid_n);
  res.sup_error = *std::max_element(res.per_piece.begin(), res.per_piece.end());
  // ||f - p||^2 = ||f||^2 - 2 <f, p> + ||p||^2, evaluated directly to avoid cancellation
  auto diff = Integrand::from_function([f, p](double x) { return f(x) - p.eval(x); }, f.hints);
  for (const auto& seg : d.segments()) diff.hints.push_back(seg.left);
  res.l2_residual = l2_norm(d, diff);
  return res;
}

/// Solutions f^_j of the per-piece linear ODE chain, carrying derivatives
/// up to the operator order of each piece.
class ChainPiece {
 public:
  ChainPiece(TargetPiece target, std::vector<double> coeffs, std::vector<double> start)
      : target_(std::move(target)), c_(std::move(coeffs)) {
    const int m = order();
    if (m == 0 && !target_.degenerate) return;  // f^_1 = f_1
    if (target_.degenerate) {
      // derivatives at a point: lower orders inherited, the top one from the relation
      point_ = std::move(start);
      point_.resize(m + 1, 0.0);
      double s = target_.scalar;
      for (int k = 0; k < m; ++k) s -= c_[k] * point_[k];
      point_[m] = s / c_[m];
      return;
    }
    auto rhs = make_rhs();
    OdeOptions opt;
    traj_ = std::make_shared<OdeTrajectory>(
        dormand_prince(rhs, target_.y_left, target_.y_right, std::vector<double>(start.begin(), start.end()), opt));
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double y_left() const { return target_.y_left; }
  double y_right() const { return target_.y_right; }
  bool degenerate() const { return target_.degenerate; }
  double local_error() const { return traj_ ? traj_->max_error_estimate : 0.0; }

  /// f^_j and its derivatives of order 0..order() at y.
  std::vector<double> derivatives(double y) const {
    const int m = order();
    if (target_.degenerate) return point_;
    if (m == 0) return {target_(y)};
    const auto& ts = traj_->t;
    auto it = std::upper_bound(ts.begin(), ts.end(), y);
    std::size_t i = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
    std::vector<double> z = traj_->y[i];
    if (ts[i] != y) z = dormand_prince(make_rhs(), ts[i], y, z).y.back();
    double s = target_(y);
    for (int k = 0; k < m; ++k) s -= c_[k] * z[k];
    z.push_back(s / c_[m]);
    return z;
  }

  double operator()(double y) const { return derivatives(y)[0]; }

 private:
  OdeRhs make_rhs() const {
    const auto c = c_;
    const auto tgt = target_;
    return [c, tgt](double y, const OdeState& z, OdeState& dz) {
      const std::size_t m = z.size();
      for (std::size_t k = 0; k + 1 < m; ++k) dz[k] = z[k + 1];
      double s = tgt(y);
      for (std::size_t k = 0; k < m; ++k) s -= c[k] * z[k];
      dz[m - 1] = s / c[m];
    };
  }

  TargetPiece target_;
  std::vector<double> c_;
  std::vector<double> point_;
  std::shared_ptr<OdeTrajectory> traj_;
};

/// f^_1 = f_1; f^_j solves sum_k c[j][k] f^_j^(k) = f_j with its lower
/// derivatives at the left end copied from f^_{j-1}.
inline std::vector<ChainPiece> ode_chain(const PiecewiseTarget& targets, const JumpCoefficients& c) {
  if (targets.size() != c.size()) throw spec_error("ode_chain: piece counts differ");
  std::vector<ChainPiece> out;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const int m = c.order(j);
    std::vector<double> start;
    if (m > 0) {
      if (j == 0) throw spec_error("ode_chain: first piece must have order 0");
      auto prev = out.back().derivatives(out.back().y_right());
      if (static_cast<int>(prev.size()) < m)
        throw spec_error("ode_chain: predecessor carries too few derivatives");
      start.assign(prev.begin(), prev.begin() + m);
    }
    out.emplace_back(targets[j], c[j], std::move(start));
  }
  return out;
}

/// Joint least squares of p^(k) against the chain derivatives f^_j^(k),
/// k = 0..order of piece j, at Chebyshev points of each y-interval.
inline ApproxResult fit_constructive(const Derivator& d, const PiecewiseTarget& targets,
                                     const JumpCoefficients& c, int degree, int samples_per_piece = 0,
                                     int grid_n = 200) {
  detail::check_degree(degree);
  if (targets.size() != c.size() || targets.size() != d.pieces().size())
    throw spec_error("fit: targets, jump coefficients and derivator disagree on the piece count");
  if (samples_per_piece <= 0) samples_per_piece = 4 * (degree + 1);
  auto chain = ode_chain(targets, c);
  const FitBasis basis(d.continuous_part(d.b()), degree);
  const int n = basis.size();
  std::vector<Eigen::VectorXd> rows, point_rows;
  std::vector<double> rhs, point_rhs;
  for (std::size_t j = 0; j < chain.size(); ++j) {
    const int kmax = std::min(chain[j].order(), degree);
    auto add = [&](double y, std::vector<Eigen::VectorXd>& rs, std::vector<double>& bs) {
      auto D = basis.derivatives(y, kmax);
      auto v = chain[j].derivatives(y);
      for (int k = 0; k <= kmax; ++k) {
        rs.push_back(Eigen::Map<Eigen::VectorXd>(D[k].data(), n));
        bs.push_back(v[k]);
      }
    };
    if (chain[j].degenerate()) {
      add(chain[j].y_left(), point_rows, point_rhs);
      continue;
    }
    for (double y : chebyshev_lobatto(chain[j].y_left(), chain[j].y_right(), samples_per_piece)) add(y, rows, rhs);
  }
  const double w = detail::mean_row_norm(rows);
  for (std::size_t i = 0; i < point_rows.size(); ++i) {
    rows.push_back(w * point_rows[i]);
    rhs.push_back(w * point_rhs[i]);
  }
  auto sol = detail::solve_lsq(detail::stack(rows, n), Eigen::Map<Eigen::VectorXd>(rhs.data(), rhs.size()),
                               "fit_constructive");
  auto r = detail::finish(d, basis, sol.x, from_pieces(d, targets), "constructive", sol.condition, grid_n);
  double ode_err = 0.0;
  for (const auto& cp : chain) ode_err = std::max(ode_err, cp.local_error());
  if (ode_err > 1e-8) r.warnings.push_back("ODE chain local error estimate " + std::to_string(ode_err));
  return r;
}

}  // namespace stieltjes
