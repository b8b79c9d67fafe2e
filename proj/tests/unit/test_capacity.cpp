#include <gtest/gtest.h>

#include <cmath>

#include "qgraph/capacity.hpp"
#include "support/random.hpp"

using namespace qgraph;
using qgraph::testing::Rng;
namespace qt = qgraph::testing;

namespace {

ComplexMatrix diag(double a, double b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST(ErasureCapacity, SpotValues) {
  EXPECT_EQ(erasure_capacity(1.0, 2), 1.0);
  EXPECT_EQ(erasure_capacity(0.5, 2), 0.0);
  EXPECT_EQ(erasure_capacity(0.3, 2), 0.0);
  EXPECT_NEAR(erasure_capacity(0.75, 2), 0.5, 1e-15);
  EXPECT_NEAR(erasure_capacity(1.0, 4), 2.0, 1e-15);
  EXPECT_NEAR(erasure_capacity(0.9, 3), 0.8 * std::log2(3.0), 1e-15);
}

TEST(ErasureCapacity, RejectsOutOfRange) {
  EXPECT_THROW(erasure_capacity(-0.1, 2), InvalidInput);
  EXPECT_THROW(erasure_capacity(1.1, 2), InvalidInput);
  EXPECT_THROW(erasure_capacity(std::nan(""), 2), InvalidInput);
  EXPECT_THROW(erasure_capacity(0.5, 1), InvalidInput);
}

TEST(ErasureCapacity, MonotoneInP) {
  double prev = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double q = erasure_capacity(i / 1000.0, 3);
    EXPECT_GE(q, prev);
    prev = q;
  }
}

TEST(SingularProbabilities, Diagonal) {
  const RealVector p = singular_probabilities(diag(std::sqrt(0.9), std::sqrt(0.2)));
  EXPECT_NEAR(p(0), 0.2, 1e-15);
  EXPECT_NEAR(p(1), 0.9, 1e-15);
  const RealVector z = singular_probabilities(ComplexMatrix::Zero(3, 3));
  EXPECT_EQ(z.maxCoeff(), 0.0);
}

TEST(SingularProbabilities, UnitaryInvariance) {
  Rng rng(1);
  const ComplexMatrix m = diag(std::sqrt(0.9), std::sqrt(0.2));
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix rotated = qt::haar_unitary(rng, 2) * m * qt::haar_unitary(rng, 2);
    EXPECT_LT((singular_probabilities(rotated) - singular_probabilities(m)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SingularProbabilities, ClampAndReject) {
  EXPECT_EQ(singular_probabilities((1.0 + 1e-12) * ComplexMatrix::Identity(2, 2)).maxCoeff(), 1.0);
  EXPECT_THROW(singular_probabilities(1.1 * ComplexMatrix::Identity(2, 2)), InvalidInput);
  EXPECT_THROW(singular_probabilities(ComplexMatrix::Zero(2, 3)), InvalidInput);
}

TEST(CapacityBounds, Examples) {
  const CapacityBounds a = capacity_bounds(diag(1.0, 0.0), 2);
  EXPECT_EQ(a.q_low, 0.0);
  EXPECT_EQ(a.q_up, 1.0);
  const CapacityBounds b = capacity_bounds(diag(std::sqrt(0.8), std::sqrt(0.8)), 2);
  EXPECT_NEAR(b.q_low, 0.6, 1e-15);
  EXPECT_NEAR(b.q_up, 0.6, 1e-15);
  EXPECT_NEAR(b.p_min(), 0.8, 1e-15);
  EXPECT_THROW(capacity_bounds(diag(1.0, 0.0), 3), InvalidInput);
}

TEST(CapacityBounds, OrderedForRandomOperators) {
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = qt::pick(rng, 2, 4);
    const CapacityBounds b = capacity_bounds(qt::random_contraction(rng, static_cast<Eigen::Index>(d)), d);
    EXPECT_GE(b.q_low, 0.0);
    EXPECT_LE(b.q_low, b.q_up);
    EXPECT_LE(b.q_up, std::log2(static_cast<double>(d)) + 1e-15);
    EXPECT_EQ(b.q_up > 0.0, b.p_max() > 0.5);
    EXPECT_EQ(b.q_low > 0.0, b.p_min() > 0.5);
  }
}

TEST(CapacityBounds, UniformSpectrumCollapses) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const double p = qt::uniform(rng, 0.0, 1.0);
    const ComplexMatrix u = qt::haar_unitary(rng, 3);
    const CapacityBounds b = capacity_bounds(std::sqrt(p) * u, 3);
    EXPECT_NEAR(b.q_low, b.q_up, 1e-12);
    EXPECT_NEAR(b.q_up, erasure_capacity(p, 3), 1e-12);
  }
}

TEST(CapacityBounds, FromProbabilitiesSorts) {
  RealVector p(3);
  p << 0.9, 0.1, 0.6;
  const CapacityBounds b = bounds_from_probabilities(p, 2);
  EXPECT_EQ(b.p_min(), 0.1);
  EXPECT_EQ(b.p_max(), 0.9);
  EXPECT_THROW(bounds_from_probabilities(RealVector(0), 2), InvalidInput);
}

TEST(DataProcessing, Examples) {
  const ComplexMatrix m1 = diag(1.0, std::sqrt(0.2));
  const ComplexMatrix m2 = diag(std::sqrt(0.2), 1.0);
  const DataProcessingReport r = check_data_processing(m1, m2, 2);
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.composed.p_max(), 0.2, 1e-15);
  EXPECT_EQ(r.composed.q_up, 0.0);
  EXPECT_EQ(r.first.q_up, 1.0);
  EXPECT_EQ(r.second.q_up, 1.0);

  const ComplexMatrix u(ComplexMatrix::Identity(2, 2));
  const DataProcessingReport id = check_data_processing(u, u, 2);
  EXPECT_TRUE(id.holds);
  EXPECT_EQ(id.composed.q_up, 1.0);
}

TEST(DataProcessing, RandomCompositions) {
  Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const auto d = static_cast<Eigen::Index>(qt::pick(rng, 2, 4));
    const DataProcessingReport r =
        check_data_processing(qt::random_contraction(rng, d), qt::random_contraction(rng, d),
                              static_cast<std::size_t>(d));
    EXPECT_TRUE(r.holds) << r.slack;
  }
}

TEST(Superactivation, Examples) {
  RealVector hi(2), lo(2), mixed(2);
  hi << 0.8, 0.9;
  lo << 0.3, 0.4;
  mixed << 0.4, 0.8;
  EXPECT_TRUE(detect_superactivation(bounds_from_probabilities(hi, 2), bounds_from_probabilities(lo, 2)));
  EXPECT_FALSE(detect_superactivation(bounds_from_probabilities(hi, 2), bounds_from_probabilities(mixed, 2)));
  EXPECT_FALSE(detect_superactivation(bounds_from_probabilities(mixed, 2), bounds_from_probabilities(lo, 2)));
  RealVector half(2);
  half << 0.5, 0.5;
  EXPECT_TRUE(detect_superactivation(bounds_from_probabilities(hi, 2), bounds_from_probabilities(half, 2)));
  RealVector three(3);
  three << 0.8, 0.8, 0.8;
  EXPECT_THROW(detect_superactivation(bounds_from_probabilities(three, 3), bounds_from_probabilities(lo, 2)),
               InvalidInput);
}
