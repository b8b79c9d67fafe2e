#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qgraph/graph.hpp"
#include "qgraph/smatrix.hpp"

namespace qgraph {

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPositivityTol = 1e-10;

/// d x d block of S_G that carries amplitudes from in_slot to out_slot.
inline ComplexMatrix transmission_operator(const ScatteringMatrix& s_g, std::size_t in_slot,
                                           std::size_t out_slot) {
  return s_g.slot_block(out_slot, in_slot);
}

/// Same, addressing the ports by their dangling labels in `g`.
inline ComplexMatrix transmission_operator(const ScatteringMatrix& s_g, const QuantumGraph& g,
                                           const std::string& in_port,
                                           const std::string& out_port) {
  return transmission_operator(s_g, g.in_index(in_port), g.out_index(out_port));
}

class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
      throw InvalidInput("DensityMatrix: matrix must be square and non-empty");
    }
    require_finite(rho_, "DensityMatrix");
    if (max_abs(rho_ - rho_.adjoint()) > kHermitianTol) {
      throw InvalidInput("DensityMatrix: matrix is not Hermitian");
    }
    if (std::abs(rho_.trace() - Complex(1.0)) > kTraceTol) {
      throw InvalidInput("DensityMatrix: trace differs from 1");
    }
    if (min_eigenvalue() < -kPositivityTol) {
      throw InvalidInput("DensityMatrix: matrix has a negative eigenvalue");
    }
  }

  const ComplexMatrix& matrix() const { return rho_; }
  std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  }

 private:
  ComplexMatrix rho_;
};

namespace detail {

/// Positive square root of a Hermitian matrix that is PSD up to kPositivityTol.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& a, const char* what) {
  const ComplexMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  RealVector ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -kPositivityTol) {
      throw InvalidInput(std::string(what) + ": matrix is not positive semidefinite (eigenvalue " +
                         std::to_string(ev(i)) + ")");
    }
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// State-dependent erasure channel
///   G_M(rho) = M rho M^dagger (+) Tr[(1 - M^dagger M) rho] |0><0|,
/// with the flag |0> appended as basis index d.
class ErasureChannel {
 public:
  explicit ErasureChannel(ComplexMatrix m_op) : m_(std::move(m_op)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
      throw InvalidInput("ErasureChannel: transmission operator must be square and non-empty");
    }
    require_finite(m_, "ErasureChannel");
    loss_sqrt_ = detail::psd_sqrt(ComplexMatrix::Identity(m_.rows(), m_.cols()) - m_.adjoint() * m_,
                                  "ErasureChannel: 1 - M^dagger M");
  }

  const ComplexMatrix& m_op() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t flag_index() const { return dim(); }

  /// sqrt(1 - M^dagger M).
  const ComplexMatrix& loss_root() const { return loss_sqrt_; }

  DensityMatrix apply(const DensityMatrix& rho) const {
    if (rho.dim() != dim()) {
      throw InvalidInput("ErasureChannel::apply: state has dimension " + std::to_string(rho.dim()) +
                         ", channel expects " + std::to_string(dim()));
    }
    const auto d = static_cast<Eigen::Index>(dim());
    ComplexMatrix out = ComplexMatrix::Zero(d + 1, d + 1);
    out.topLeftCorner(d, d) = m_ * rho.matrix() * m_.adjoint();
    const ComplexMatrix loss = ComplexMatrix::Identity(d, d) - m_.adjoint() * m_;
    out(d, d) = Complex((loss * rho.matrix()).trace().real(), 0.0);
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(std::move(out));
  }

  /// K^0 = M embedded in the flagged space, K^a = |0><a| sqrt(1 - M^dagger M).
  std::vector<ComplexMatrix> kraus_set() const {
    const auto d = static_cast<Eigen::Index>(dim());
    std::vector<ComplexMatrix> ks;
    ks.reserve(dim() + 1);
    ComplexMatrix k0 = ComplexMatrix::Zero(d + 1, d);
    k0.topRows(d) = m_;
    ks.push_back(std::move(k0));
    for (Eigen::Index a = 0; a < d; ++a) {
      ComplexMatrix ka = ComplexMatrix::Zero(d + 1, d);
      ka.row(d) = loss_sqrt_.row(a);
      ks.push_back(std::move(ka));
    }
    return ks;
  }

  /// (G_M (x) id)(|Omega><Omega|) with |Omega> = sum_a |a>|a> / sqrt(d).
  /// Rows and columns are ordered output (x) input.
  ComplexMatrix choi() const {
    const auto d = static_cast<Eigen::Index>(dim());
    const Eigen::Index n = (d + 1) * d;
    ComplexMatrix c = ComplexMatrix::Zero(n, n);
    for (const auto& k : kraus_set()) {
      ComplexVector v = ComplexVector::Zero(n);
      for (Eigen::Index o = 0; o <= d; ++o)
        for (Eigen::Index a = 0; a < d; ++a) v(o * d + a) = k(o, a);
      c.noalias() += v * v.adjoint();
    }
    return c / static_cast<double>(d);
  }

 private:
  ComplexMatrix m_;
  ComplexMatrix loss_sqrt_;
};

/// Apply a Kraus set to a state.
inline ComplexMatrix apply_kraus(const std::vector<ComplexMatrix>& kraus, const ComplexMatrix& rho) {
  if (kraus.empty()) throw InvalidInput("apply_kraus: empty Kraus set");
  ComplexMatrix out = ComplexMatrix::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) out.noalias() += k * rho * k.adjoint();
  return out;
}

/// Sum_K K^dagger K.
inline ComplexMatrix kraus_completeness(const std::vector<ComplexMatrix>& kraus) {
  if (kraus.empty()) throw InvalidInput("kraus_completeness: empty Kraus set");
  ComplexMatrix out = ComplexMatrix::Zero(kraus.front().cols(), kraus.front().cols());
  for (const auto& k : kraus) out.noalias() += k.adjoint() * k;
  return out;
}

/// ch2 after ch1. A flagged output stays flagged, so the result is the
/// erasure channel of M2 M1.
inline ErasureChannel compose(const ErasureChannel& ch2, const ErasureChannel& ch1) {
  if (ch2.dim() != ch1.dim()) {
    throw InvalidInput("compose: channel dimensions " + std::to_string(ch2.dim()) + " and " +
                       std::to_string(ch1.dim()) + " differ");
  }
  return ErasureChannel(ch2.m_op() * ch1.m_op());
}

}  // namespace qgraph
