#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "qgraph/composer.hpp"
#include "qgraph/numerics.hpp"
#include "qgraph/smatrix.hpp"

namespace qgraph::testing {

using Rng = std::mt19937_64;

inline ComplexMatrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0 / std::sqrt(2.0));
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(n(rng), n(rng));
  return m;
}

/// Haar-distributed unitary via QR with phase correction.
inline ComplexMatrix haar_unitary(Rng& rng, Eigen::Index n) {
  if (n == 0) return ComplexMatrix(0, 0);
  const ComplexMatrix z = gaussian(rng, n, n);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Facing port specs for a composable pair: S1's right groups meet S2's left groups.
struct PairSpec {
  PortSpec s1;
  PortSpec s2;
};

/// Group counts in [0, max_k] with at least one facing slot each way.
inline PairSpec random_pair_spec(Rng& rng, std::size_t max_k, std::size_t max_d) {
  const std::size_t d = pick(rng, 1, max_d);
  for (;;) {
    const std::size_t a = pick(rng, 1, max_k);  // S1 right out = S2 left in
    const std::size_t b = pick(rng, 1, max_k);  // S1 right in = S2 left out
    const std::size_t l1_in = pick(rng, 0, max_k);
    const std::size_t r2_in = pick(rng, 0, max_k);
    if (l1_in + b < a || a + r2_in < b) continue;
    const std::size_t l1_out = l1_in + b - a;
    const std::size_t r2_out = a + r2_in - b;
    if (l1_out > max_k || r2_out > max_k) continue;
    return {{l1_in, l1_out, b, a, d}, {a, b, r2_in, r2_out, d}};
  }
}

inline ScatteringMatrix haar_scatterer(Rng& rng, const PortSpec& spec) {
  return ScatteringMatrix(haar_unitary(rng, static_cast<Eigen::Index>(spec.total_in() * spec.dim)), spec);
}

inline std::vector<std::size_t> permutation(Rng& rng, std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

inline Wiring random_wiring(Rng& rng, const PortSpec& s1, const PortSpec& s2) {
  Wiring w;
  const auto fwd = permutation(rng, s1.right_out);
  const auto bwd = permutation(rng, s2.left_out);
  for (std::size_t i = 0; i < fwd.size(); ++i) w.s1_to_s2.emplace_back(i, fwd[i]);
  for (std::size_t i = 0; i < bwd.size(); ++i) w.s2_to_s1.emplace_back(i, bwd[i]);
  return w;
}

/// Orthonormal basis of the complement of a unit vector (n x (n-1)).
inline ComplexMatrix complement(const ComplexVector& v) {
  const ComplexMatrix vm = v;
  Eigen::HouseholderQR<ComplexMatrix> qr(vm);
  const ComplexMatrix q = qr.householderQ();
  return q.rightCols(v.size() - 1);
}

inline ComplexVector random_unit(Rng& rng, Eigen::Index n) {
  ComplexVector v = gaussian(rng, n, 1);
  return v / v.norm();
}

/// Unitary map sending unit vector `in` to phase * `out` and the complement
/// of `in` to the complement of `out` through a Haar unitary.
inline ComplexMatrix pinned_unitary(Rng& rng, const ComplexVector& in, const ComplexVector& out,
                                    Complex phase) {
  const Eigen::Index n = in.size();
  ComplexMatrix m = phase * out * in.adjoint();
  if (n > 1) m += complement(out) * haar_unitary(rng, n - 1) * complement(in).adjoint();
  return m;
}

/// A unitary pair whose loop matrix has a kernel: a mode v sent by S1 from its
/// right-in to its right-out group as w (phase e^{i beta}) and reflected back
/// by S2 onto v (phase e^{i alpha}) with alpha + beta = 0. Standard wiring.
struct SingularPair {
  ScatteringMatrix s1;
  ScatteringMatrix s2;
};

inline SingularPair singular_loop_pair(Rng& rng, const PairSpec& ps) {
  const std::size_t d = ps.s1.dim;
  const auto n1 = static_cast<Eigen::Index>(ps.s1.total_in() * d);
  const auto n2 = static_cast<Eigen::Index>(ps.s2.total_in() * d);
  const auto right_in = static_cast<Eigen::Index>(ps.s1.right_in * d);
  const auto right_out = static_cast<Eigen::Index>(ps.s1.right_out * d);
  const ComplexVector v = random_unit(rng, right_in);   // S1 right-in = S2 left-out
  const ComplexVector w = random_unit(rng, right_out);  // S1 right-out = S2 left-in
  const double alpha = uniform(rng, -M_PI, M_PI);

  ComplexVector in1 = ComplexVector::Zero(n1), out1 = ComplexVector::Zero(n1);
  in1.tail(right_in) = v;
  out1.tail(right_out) = w;
  ComplexVector in2 = ComplexVector::Zero(n2), out2 = ComplexVector::Zero(n2);
  in2.head(right_out) = w;
  out2.head(right_in) = v;
  return {ScatteringMatrix(pinned_unitary(rng, in1, out1, std::polar(1.0, -alpha)), ps.s1),
          ScatteringMatrix(pinned_unitary(rng, in2, out2, std::polar(1.0, alpha)), ps.s2)};
}

/// Homogeneous scatterer [[A1 0][0 A2]] [[C S][S -C]] [[B1 0][0 B2]] with
/// reflection cosines at most max_cos, so reflection blocks have norm <= max_cos
/// and transmission blocks are well conditioned.
inline ScatteringMatrix cs_scatterer(Rng& rng, std::size_t k, std::size_t d, double max_cos) {
  const auto h = static_cast<Eigen::Index>(k * d);
  ComplexMatrix mid = ComplexMatrix::Zero(2 * h, 2 * h);
  for (Eigen::Index i = 0; i < h; ++i) {
    const double c = uniform(rng, 0.0, max_cos);
    const double s = std::sqrt(1.0 - c * c);
    mid(i, i) = c;
    mid(i, h + i) = s;
    mid(h + i, i) = s;
    mid(h + i, h + i) = -c;
  }
  ComplexMatrix a = ComplexMatrix::Zero(2 * h, 2 * h), b = ComplexMatrix::Zero(2 * h, 2 * h);
  a.topLeftCorner(h, h) = haar_unitary(rng, h);
  a.bottomRightCorner(h, h) = haar_unitary(rng, h);
  b.topLeftCorner(h, h) = haar_unitary(rng, h);
  b.bottomRightCorner(h, h) = haar_unitary(rng, h);
  return ScatteringMatrix(a * mid * b, PortSpec::symmetric(k, d));
}

/// Random M with singular values drawn in [lo, hi].
inline ComplexMatrix random_contraction(Rng& rng, Eigen::Index d, double lo = 0.0, double hi = 1.0) {
  RealVector s(d);
  for (Eigen::Index i = 0; i < d; ++i) s(i) = uniform(rng, lo, hi);
  return haar_unitary(rng, d) * s.cast<Complex>().asDiagonal() * haar_unitary(rng, d);
}

inline ComplexMatrix random_density(Rng& rng, Eigen::Index d) {
  const ComplexMatrix g = gaussian(rng, d, d);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

/// Beam splitter with reflection i sin(theta) and transmission cos(theta), d = 1.
inline ScatteringMatrix beamsplitter(double theta) {
  ComplexMatrix m(2, 2);
  const Complex r(0.0, std::sin(theta));
  m << r, std::cos(theta), std::cos(theta), r;
  return ScatteringMatrix(m, PortSpec::symmetric(1, 1));
}

inline ScatteringMatrix swap_scatterer(std::size_t d = 1) {
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix m = ComplexMatrix::Zero(2 * n, 2 * n);
  m.topRightCorner(n, n).setIdentity();
  m.bottomLeftCorner(n, n).setIdentity();
  return ScatteringMatrix(m, PortSpec::symmetric(1, d));
}

inline ScatteringMatrix phase_reflector(double alpha, double beta) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = std::polar(1.0, alpha);
  m(1, 1) = std::polar(1.0, beta);
  return ScatteringMatrix(m, PortSpec::symmetric(1, 1));
}

}  // namespace qgraph::testing
