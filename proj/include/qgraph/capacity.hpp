#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "qgraph/numerics.hpp"

namespace qgraph {

inline constexpr double kProbabilityClampTol = 1e-10;

/// Quantum capacity of the erasure channel with transmission probability p
/// on a d-level system: max{0, (2p - 1) log2 d}.
inline double erasure_capacity(double p, std::size_t d) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("erasure_capacity: p must lie in [0, 1]");
  if (d < 2) throw InvalidInput("erasure_capacity: d must be at least 2");
  return std::max(0.0, (2.0 * p - 1.0) * std::log2(static_cast<double>(d)));
}

/// Squared singular values of M in ascending order, clamped into [0, 1].
inline RealVector singular_probabilities(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidInput("singular_probabilities: M must be square and non-empty");
  }
  const Svd dec = svd(m);
  RealVector p(dec.sigma.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    double v = dec.sigma(i) * dec.sigma(i);
    if (v > 1.0 + kProbabilityClampTol) {
      throw InvalidInput("singular_probabilities: M^dagger M exceeds 1 (p = " + std::to_string(v) + ")");
    }
    p(p.size() - 1 - i) = std::min(v, 1.0);
  }
  return p;
}

struct CapacityBounds {
  RealVector p;  // ascending
  std::size_t d = 2;
  double q_low = 0.0;
  double q_up = 0.0;

  double p_min() const { return p(0); }
  double p_max() const { return p(p.size() - 1); }
};

inline CapacityBounds bounds_from_probabilities(RealVector p, std::size_t d) {
  if (p.size() == 0) throw InvalidInput("capacity bounds: empty probability vector");
  std::sort(p.data(), p.data() + p.size());
  CapacityBounds b;
  b.d = d;
  b.q_low = erasure_capacity(p(0), d);
  b.q_up = erasure_capacity(p(p.size() - 1), d);
  b.p = std::move(p);
  return b;
}

/// Q(G_M) lies in [q_low, q_up], set by the smallest and largest singular
/// probability of M.
inline CapacityBounds capacity_bounds(const ComplexMatrix& m, std::size_t d) {
  if (static_cast<std::size_t>(m.rows()) != d) {
    throw InvalidInput("capacity_bounds: M is " + std::to_string(m.rows()) + "x" +
                       std::to_string(m.cols()) + " but d = " + std::to_string(d));
  }
  return bounds_from_probabilities(singular_probabilities(m), d);
}

struct DataProcessingReport {
  CapacityBounds first;     // M1
  CapacityBounds second;    // M2
  CapacityBounds composed;  // M2 M1
  bool holds = false;
  double slack = 0.0;  // min{p_max(M1), p_max(M2)} - p_max(M2 M1)
};

inline DataProcessingReport check_data_processing(const ComplexMatrix& m1, const ComplexMatrix& m2,
                                                  std::size_t d, double tol = 1e-12) {
  DataProcessingReport r;
  r.first = capacity_bounds(m1, d);
  r.second = capacity_bounds(m2, d);
  r.composed = capacity_bounds(m2 * m1, d);
  r.slack = std::min(r.first.p_max(), r.second.p_max()) - r.composed.p_max();
  r.holds = r.slack >= -tol &&
            r.composed.q_up <= std::min(r.first.q_up, r.second.q_up) + tol;
  return r;
}

/// Certified superactivation: the resonant channel provably has positive
/// capacity while the direct one provably has none.
inline bool detect_superactivation(const CapacityBounds& resonant, const CapacityBounds& direct) {
  if (resonant.d != direct.d) throw InvalidInput("detect_superactivation: dimensions differ");
  return resonant.q_low > 0.0 && direct.q_up == 0.0;
}

}  // namespace qgraph
