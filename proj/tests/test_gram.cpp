#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "stieltjes/gram.hpp"

using namespace stieltjes;

TEST(GramMatrix, LebesgueMoments) {
  auto G = gram_matrix(fixtures::C(), 0.0, 1, true);
  EXPECT_NEAR(G(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(G(0, 1), 0.5, 1e-15);
  EXPECT_NEAR(G(1, 1), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(G(0, 1), G(1, 0));
}

TEST(GramMatrix, ZeroOrderIsTotalMass) {
  for (const auto& d : {fixtures::A(), fixtures::Bp(), fixtures::C2(), fixtures::Flat()}) {
    auto G = gram_matrix(d, d.a(), 0, true);
    ASSERT_EQ(G.rows(), 1);
    EXPECT_NEAR(G(0, 0), d.total_mass(), 1e-14);
  }
}

TEST(GramMatrix, PureJumpMatchesAtomSums) {
  auto d = fixtures::Bp();
  auto G = gram_matrix(d, 0.0, 3, true);
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; j <= 3; ++j) {
      double s = 0.0;
      for (const auto& jp : d.jumps()) s += jp.gap * oracles::gb_brute(d, 0.0, i, jp.x) * oracles::gb_brute(d, 0.0, j, jp.x);
      EXPECT_EQ(G(i, j), s) << i << "," << j;
    }
}

TEST(GramMatrix, RefusesLargeIndex) {
  EXPECT_THROW(gram_matrix(fixtures::C(), 0.0, 31, true), spec_error);
  EXPECT_NO_THROW(gram_matrix(fixtures::C(), 0.0, 30, true));
}

TEST(GramMatrix, SymmetricPositiveSemidefinite) {
  std::mt19937 rng(5);
  for (int t = 0; t < 10; ++t) {
    auto d = fixtures::random(rng);
    auto G = gram_matrix(d, 0.37, 6, true);
    EXPECT_EQ((G - G.transpose()).norm(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12 * eig.eigenvalues().maxCoeff());
  }
}

TEST(GramDet, SmallExamples) {
  Eigen::Matrix2d m;
  m << 1, 0.5, 0.5, 1.0 / 3.0;
  const double ref = oracles::cofactor_det({{1, 0.5}, {0.5, 1.0 / 3.0}});
  EXPECT_NEAR(gram_det(m).det, ref, 1e-15);
  EXPECT_NEAR(gram_det(m).det, 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(gram_det(m).logdet, std::log(1.0 / 12.0), 1e-14);
  EXPECT_EQ(gram_det(Eigen::MatrixXd::Identity(5, 5)).det, 1.0);
}

TEST(GramDet, NilpotentFamilyIsSingular) {
  auto r = gram_det(gram_matrix(fixtures::Bp(), 0.0, 5, true));
  EXPECT_TRUE(r.singular);
  EXPECT_EQ(r.det, 0.0);
}

TEST(GramDet, HilbertOracleMatchesDirect) {
  for (int n = 1; n <= 6; ++n) {
    Eigen::MatrixXd H(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) H(i, j) = 1.0 / (i + j + 1);
    EXPECT_NEAR(H.determinant() / oracles::hilbert_det(n), 1.0, 1e-8) << n;
  }
}

TEST(GramDet, FamilyMatchesMatrixWhenWellConditioned) {
  for (const auto& d : {fixtures::A(), fixtures::C2(), fixtures::Flat()})
    for (int k = 0; k <= 4; ++k) {
      const double m = gram_det(gram_matrix(d, 0.2, k, true)).det;
      EXPECT_NEAR(gram_det_family(d, 0.2, k, true).det / m, 1.0, 1e-8) << k;
    }
  EXPECT_TRUE(gram_det_family(fixtures::Bp(), 0.0, 4, true).singular);
}

TEST(GramDet, ConditioningFlag) {
  auto G = gram_matrix(fixtures::C(), 0.0, 12, true);
  EXPECT_TRUE(gram_det(G).unreliable);
  EXPECT_FALSE(gram_det(gram_matrix(fixtures::C(), 0.0, 3, true)).unreliable);
}

TEST(Hilbert, ClosedForm) {
  for (const auto& d : {fixtures::C(), fixtures::C2(), fixtures::Ckink()}) {
    const double mass = d.eval(d.b()) - d.eval(d.a());
    for (int k = 0; k <= 6; ++k) {
      auto h = hilbert_check(d, k);
      const double oracle = std::pow(mass, (k + 1) * (k + 1)) * oracles::hilbert_det(k + 1);
      EXPECT_NEAR(h.rhs / oracle, 1.0, 1e-12);
      EXPECT_NEAR(h.lhs / h.rhs, 1.0, 1e-6) << "k=" << k;
    }
  }
  EXPECT_NEAR(hilbert_check(fixtures::C(), 1).lhs, 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(hilbert_check(fixtures::C2(), 1).rhs, 4.0 / 3.0, 1e-14);
  EXPECT_NEAR(hilbert_check(fixtures::C2(), 0).rhs, 2.0, 1e-15);
  EXPECT_THROW(hilbert_check(fixtures::A(), 2), spec_error);
}

TEST(Gram, CenterInvariance) {
  std::mt19937 rng(9);
  std::vector<Derivator> ds{fixtures::A(), fixtures::Bp(), fixtures::C(), fixtures::Flat()};
  for (int t = 0; t < 5; ++t) ds.push_back(fixtures::random(rng));
  for (const auto& d : ds)
    for (int k = 1; k <= 8; ++k) {
      const double ref = gram_det_family(d, d.a(), k, true).det;
      for (double s : {0.25, 0.5, 0.9}) {
        const double x0 = d.a() + s * (d.b() - d.a());
        const double v = gram_det_family(d, x0, k, true).det;
        EXPECT_NEAR(v, ref, 1e-6 * std::abs(ref) + 1e-300) << "k=" << k << " x0=" << x0;
      }
    }
}

namespace {
void expect_ratio_invariants(const Derivator& d, double x0, int kmax) {
  auto rep = ratio_sequence(d, x0, kmax);
  ASSERT_EQ(static_cast<int>(rep.ratios.size()), kmax);
  for (int j = 0; j < kmax; ++j) {
    EXPECT_GE(rep.ratios[j], rep.limit) << "j=" << j + 1;
    if (j > 0) EXPECT_LE(rep.ratios[j], rep.ratios[j - 1]) << "j=" << j + 1;
  }
}
}  // namespace

TEST(RatioSequence, InvariantsOnFixtures) {
  for (const auto& d : {fixtures::A(), fixtures::Bp(), fixtures::C(), fixtures::C2(), fixtures::Ckink(), fixtures::Flat()})
    for (double s : {0.0, 0.3, 0.5, 0.7})
      expect_ratio_invariants(d, d.a() + s * (d.b() - d.a()), 12);
}

TEST(RatioSequence, InvariantsOnRandom) {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    auto d = fixtures::random(rng);
    const double x0 = 0.9 * unit(rng);
    if (d.measure(x0, 1.0) == 0.0 && d.measure(0.0, x0) == 0.0) continue;
    expect_ratio_invariants(d, x0, 10);
  }
}

TEST(RatioSequence, PureJumpExact) {
  auto rep = ratio_sequence(fixtures::Bp(), 0.0, 5);
  EXPECT_NEAR(rep.ratios[2], 1.0, 1e-8);
  EXPECT_NEAR(rep.ratios[4], 1.0, 1e-8);
  EXPECT_EQ(rep.limit, 1.0);
}

TEST(RatioSequence, ContinuousTendsToZero) {
  auto rep = ratio_sequence(fixtures::C(), 0.0, 6);
  EXPECT_EQ(rep.limit, 0.0);
  EXPECT_LT(rep.ratios.back(), rep.ratios.front());
  EXPECT_LT(rep.ratios.back(), 0.05);
  // g_{0,1} = x: 1 - (1/2)^2 / (1/3) = 1/4
  EXPECT_NEAR(rep.ratios[0], 0.25, 1e-14);
}

TEST(RatioSequence, FixtureAProgress) {
  auto rep = ratio_sequence(fixtures::A(), 0.5, 16);
  EXPECT_EQ(rep.beta, 0.5);
  EXPECT_EQ(rep.limit, 1.0);
  const double gap2 = rep.ratios[1] - 1.0, gap16 = rep.ratios[15] - 1.0;
  EXPECT_GT(gap2, 0.0);
  EXPECT_LE(gap16, 0.5 * gap2);
}

TEST(RatioSequence, DeterminantCrossCheck) {
  auto rep = ratio_sequence(fixtures::A(), 0.5, 10);
  for (std::size_t j = 0; j < rep.ratios.size(); ++j)
    if (rep.conditions[j] < 1e10) EXPECT_NEAR(rep.det_ratios[j], rep.ratios[j], 1e-6 * rep.ratios[j]) << j + 1;
  for (int j : rep.divergent) EXPECT_GE(rep.conditions[j - 1], 1e10);
}

TEST(RatioSequence, NullFamilyIsAnError) {
  // only mass is the jump at a, and g_{a,n} vanishes there
  Derivator d(0.0, 1.0, {{0.0, 0.0}, {1.0, 0.0}}, {{0.0, 1.0}});
  EXPECT_THROW(ratio_sequence(d, 0.0, 3), spec_error);
}

TEST(IndicatorDistance, Examples) {
  EXPECT_NEAR(indicator_distance(fixtures::Bp(), 0.0, 3), 0.0, 1e-12);
  for (const auto& d : {fixtures::A(), fixtures::Bp(), fixtures::Flat()})
    for (const auto& j : d.jumps()) {
      const double mu = d.total_mass();
      EXPECT_NEAR(indicator_distance(d, j.x, 0), j.gap - j.gap * j.gap / mu, 1e-14);
    }
  auto A = fixtures::A();
  double prev = indicator_distance(A, 0.5, 0);
  for (int k = 1; k <= 10; ++k) {
    const double v = indicator_distance(A, 0.5, k);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, prev + 1e-14) << k;
    prev = v;
  }
  EXPECT_LT(indicator_distance(A, 0.5, 8), indicator_distance(A, 0.5, 2));
  EXPECT_THROW(indicator_distance(A, 0.3, 2), spec_error);
}
