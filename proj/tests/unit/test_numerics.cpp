#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "qgraph/numerics.hpp"
#include "support/oracles.hpp"
#include "support/random.hpp"

using namespace qgraph;
using qgraph::testing::Rng;

namespace {

ComplexMatrix diag(std::initializer_list<Complex> v) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (Complex z : v) m(i, i) = z, ++i;
  return m;
}

ComplexMatrix random_rank(Rng& rng, Eigen::Index rows, Eigen::Index cols, Eigen::Index rank) {
  return qgraph::testing::gaussian(rng, rows, rank) * qgraph::testing::gaussian(rng, rank, cols);
}

}  // namespace

TEST(Svd, IdentityHasUnitSingularValues) {
  const Svd s = svd(ComplexMatrix::Identity(2, 2));
  ASSERT_EQ(s.sigma.size(), 2);
  EXPECT_NEAR(s.sigma(0), 1.0, 1e-15);
  EXPECT_NEAR(s.sigma(1), 1.0, 1e-15);
}

TEST(Svd, DiagonalWithZero) {
  const Svd s = svd(diag({3.0, 0.0}));
  EXPECT_NEAR(s.sigma(0), 3.0, 1e-15);
  EXPECT_NEAR(s.sigma(1), 0.0, 1e-15);
}

TEST(Svd, ReconstructsAndFactorsAreUnitary) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = static_cast<Eigen::Index>(qgraph::testing::pick(rng, 1, 12));
    const auto c = static_cast<Eigen::Index>(qgraph::testing::pick(rng, 1, 12));
    const ComplexMatrix a = qgraph::testing::gaussian(rng, r, c);
    const Svd s = svd(a);
    EXPECT_LT(max_abs(s.reconstruct() - a), 1e-12 * s.max_singular());
    EXPECT_LT(unitarity_defect(s.u), 1e-12);
    EXPECT_LT(unitarity_defect(s.v), 1e-12);
    for (Eigen::Index i = 0; i < s.sigma.size(); ++i) {
      EXPECT_GE(s.sigma(i), 0.0);
      if (i > 0) EXPECT_LE(s.sigma(i), s.sigma(i - 1));
    }
  }
}

TEST(Svd, RejectsNonFinite) {
  ComplexMatrix a = ComplexMatrix::Identity(2, 2);
  a(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(svd(a), InvalidInput);
  a(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(pseudo_inverse(a), InvalidInput);
}

TEST(PseudoInverse, ZeroMatrix) {
  const ComplexMatrix p = pseudo_inverse(ComplexMatrix::Zero(3, 2));
  EXPECT_EQ(p.rows(), 2);
  EXPECT_EQ(p.cols(), 3);
  EXPECT_EQ(max_abs(p), 0.0);
}

TEST(PseudoInverse, DropsZeroSingularValue) {
  EXPECT_LT(max_abs(pseudo_inverse(diag({2.0, 0.0})) - diag({0.5, 0.0})), 1e-15);
}

TEST(PseudoInverse, UnitaryGivesAdjoint) {
  Rng rng(3);
  const ComplexMatrix u = qgraph::testing::haar_unitary(rng, 5);
  EXPECT_LT(max_abs(pseudo_inverse(u) - u.adjoint()), 1e-12);
}

TEST(PseudoInverse, PenroseConditions) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = static_cast<Eigen::Index>(qgraph::testing::pick(rng, 1, 12));
    const auto c = static_cast<Eigen::Index>(qgraph::testing::pick(rng, 1, 12));
    const auto k = static_cast<Eigen::Index>(qgraph::testing::pick(rng, 1, std::min(r, c)));
    const ComplexMatrix a = random_rank(rng, r, c, k);
    const ComplexMatrix p = pseudo_inverse(a);
    const double scale = std::max(1.0, operator_norm(a) * operator_norm(p));
    EXPECT_LT(max_abs(a * p * a - a), 1e-10 * scale * operator_norm(a));
    EXPECT_LT(max_abs(p * a * p - p), 1e-10 * scale * operator_norm(p));
    const ComplexMatrix ap = a * p, pa = p * a;
    EXPECT_LT(max_abs(ap - ap.adjoint()), 1e-10 * scale);
    EXPECT_LT(max_abs(pa - pa.adjoint()), 1e-10 * scale);
  }
}

TEST(PseudoInverse, RejectsNonPositiveTolerance) {
  EXPECT_THROW(pseudo_inverse(ComplexMatrix::Identity(2, 2), 0.0), InvalidInput);
  EXPECT_THROW(pseudo_inverse(ComplexMatrix::Identity(2, 2), -1.0), InvalidInput);
}

TEST(SpectralRadius, Diagonal) {
  EXPECT_NEAR(spectral_radius(diag({0.5, -0.25})), 0.5, 1e-15);
}

TEST(SpectralRadius, Nilpotent) {
  ComplexMatrix n = ComplexMatrix::Zero(2, 2);
  n(0, 1) = 1.0;
  EXPECT_NEAR(spectral_radius(n), 0.0, 1e-12);
}

TEST(SpectralRadius, MatchesGelfandLimit) {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = static_cast<Eigen::Index>(qgraph::testing::pick(rng, 1, 6));
    const ComplexMatrix a = qgraph::testing::random_contraction(rng, n, 0.1, 0.95) *
                            qgraph::testing::random_contraction(rng, n, 0.5, 1.0);
    const double rho = spectral_radius(a);
    EXPECT_NEAR(rho, qgraph::testing::gelfand_radius(a), 1e-6 * std::max(rho, 1e-3));
    EXPECT_LE(rho, operator_norm(a) + 1e-12);
  }
}

TEST(SpectralRadius, RejectsNonSquare) {
  EXPECT_THROW(spectral_radius(ComplexMatrix::Zero(2, 3)), InvalidInput);
}

TEST(Norms, KnownValues) {
  ComplexMatrix a(2, 2);
  a << Complex(1, 0), Complex(0, -2), Complex(3, 4), Complex(0, 0);
  EXPECT_DOUBLE_EQ(inf_norm(a), 5.0);
  EXPECT_DOUBLE_EQ(max_abs(a), 5.0);
  EXPECT_NEAR(operator_norm(diag({2.0, Complex(0, -7)})), 7.0, 1e-14);
  EXPECT_EQ(operator_norm(ComplexMatrix(0, 0)), 0.0);
}

TEST(Norms, UnitarityDefect) {
  Rng rng(9);
  EXPECT_LT(unitarity_defect(qgraph::testing::haar_unitary(rng, 6)), 1e-13);
  EXPECT_NEAR(unitarity_defect(diag({2.0, 1.0})), 3.0, 1e-15);
  EXPECT_TRUE(std::isinf(unitarity_defect(ComplexMatrix::Zero(2, 3))));
}

TEST(ConditionNumber, SingularIsInfinite) {
  EXPECT_TRUE(std::isinf(condition_number(diag({1.0, 0.0}))));
  EXPECT_NEAR(condition_number(diag({4.0, 0.5})), 8.0, 1e-13);
}

TEST(Gather, SelectsRowsAndColumns) {
  ComplexMatrix a(3, 3);
  a << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const std::vector<std::size_t> rows{2, 0}, cols{1};
  const ComplexMatrix g = gather(a, rows, cols);
  EXPECT_EQ(g(0, 0), Complex(8.0));
  EXPECT_EQ(g(1, 0), Complex(2.0));
}
