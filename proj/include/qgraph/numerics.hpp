#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "qgraph/errors.hpp"

namespace qgraph {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultPinvTolerance = 1e-12;

/// Induced infinity norm (maximum absolute row sum). Zero for empty matrices.
inline double inf_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Largest absolute entry. Zero for empty matrices.
inline double max_abs(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

inline bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const Complex z = a.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

inline void require_finite(const ComplexMatrix& a, const char* what) {
  if (!all_finite(a)) {
    throw InvalidInput(std::string(what) + ": matrix has non-finite entries");
  }
}

/// ||A^dagger A - 1||_inf for a square matrix; infinity if not square.
inline double unitarity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  return inf_norm(a.adjoint() * a - ComplexMatrix::Identity(a.rows(), a.cols()));
}

/// Full singular value decomposition A = U diag(sigma) V^dagger.
///
/// U is rows x rows and V is cols x cols, both unitary; sigma holds the
/// min(rows, cols) singular values in descending order.
struct Svd {
  ComplexMatrix u;
  RealVector sigma;
  ComplexMatrix v;

  double max_singular() const { return sigma.size() == 0 ? 0.0 : sigma(0); }

  ComplexMatrix reconstruct() const {
    const Eigen::Index r = sigma.size();
    return u.leftCols(r) * sigma.cast<Complex>().asDiagonal() *
           v.leftCols(r).adjoint();
  }
};

inline Svd svd(const ComplexMatrix& a) {
  require_finite(a, "svd");
  Svd out;
  if (a.size() == 0) {
    out.u = ComplexMatrix::Identity(a.rows(), a.rows());
    out.v = ComplexMatrix::Identity(a.cols(), a.cols());
    out.sigma = RealVector(0);
    return out;
  }
  Eigen::JacobiSVD<ComplexMatrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.u = solver.matrixU();
  out.v = solver.matrixV();
  out.sigma = solver.singularValues();
  return out;
}

/// Moore-Penrose pseudo-inverse from an existing decomposition. Singular
/// values at or below rel_tol * sigma_max are treated as zero.
inline ComplexMatrix pseudo_inverse(const Svd& dec, double rel_tol = kDefaultPinvTolerance) {
  if (!(rel_tol > 0.0)) throw InvalidInput("pseudo_inverse: rel_tol must be positive");
  const Eigen::Index rows = dec.u.rows();
  const Eigen::Index cols = dec.v.rows();
  ComplexMatrix out = ComplexMatrix::Zero(cols, rows);
  const double cutoff = rel_tol * dec.max_singular();
  for (Eigen::Index i = 0; i < dec.sigma.size(); ++i) {
    const double s = dec.sigma(i);
    if (s <= cutoff || s == 0.0) break;  // sorted descending
    out.noalias() += (1.0 / s) * dec.v.col(i) * dec.u.col(i).adjoint();
  }
  return out;
}

inline ComplexMatrix pseudo_inverse(const ComplexMatrix& a,
                                    double rel_tol = kDefaultPinvTolerance) {
  return pseudo_inverse(svd(a), rel_tol);
}

/// Largest singular value.
inline double operator_norm(const ComplexMatrix& a) {
  require_finite(a, "operator_norm");
  if (a.size() == 0) return 0.0;
  return Eigen::JacobiSVD<ComplexMatrix>(a).singularValues()(0);
}

/// Largest eigenvalue modulus of a square matrix.
inline double spectral_radius(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidInput("spectral_radius: matrix is not square");
  require_finite(a, "spectral_radius");
  if (a.size() == 0) return 0.0;
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw ConsistencyError("spectral_radius: eigenvalue iteration did not converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// Condition number sigma_max / sigma_min of a square matrix; infinity when singular.
inline double condition_number(const ComplexMatrix& a) {
  const Svd dec = svd(a);
  if (dec.sigma.size() == 0) return 1.0;
  const double smin = dec.sigma(dec.sigma.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return dec.sigma(0) / smin;
}

/// Select rows and columns by index lists.
template <typename RowIdx, typename ColIdx>
ComplexMatrix gather(const ComplexMatrix& a, const RowIdx& rows, const ColIdx& cols) {
  ComplexMatrix out(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          a(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    }
  }
  return out;
}

}  // namespace qgraph
