#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qgraph/numerics.hpp"

namespace qgraph {

enum class Side { left, right };

inline const char* to_string(Side s) { return s == Side::left ? "L" : "R"; }

/// Slot counts of a scatterer, split into left and right groups, plus the
/// internal dimension d carried by every slot.
///
/// Slots are flattened left group first, then right group; each slot is a
/// contiguous block of d amplitudes. In-slots and out-slots are indexed the
/// same way.
struct PortSpec {
  std::size_t left_in = 0;
  std::size_t left_out = 0;
  std::size_t right_in = 0;
  std::size_t right_out = 0;
  std::size_t dim = 1;

  static PortSpec symmetric(std::size_t k, std::size_t d) { return {k, k, k, k, d}; }

  std::size_t total_in() const { return left_in + right_in; }
  std::size_t total_out() const { return left_out + right_out; }
  std::size_t in_count(Side s) const { return s == Side::left ? left_in : right_in; }
  std::size_t out_count(Side s) const { return s == Side::left ? left_out : right_out; }
  std::size_t in_offset(Side s) const { return s == Side::left ? 0 : left_in; }
  std::size_t out_offset(Side s) const { return s == Side::left ? 0 : left_out; }

  bool homogeneous() const {
    return left_in == left_out && left_out == right_in && right_in == right_out;
  }

  /// Largest of the four group counts.
  std::size_t max_group() const {
    return std::max(std::max(left_in, left_out), std::max(right_in, right_out));
  }

  void validate() const {
    if (dim < 1) throw InvalidInput("PortSpec: internal dimension must be at least 1");
    if (total_in() != total_out()) {
      throw InvalidInput("PortSpec: in-slot count " + std::to_string(total_in()) +
                         " differs from out-slot count " + std::to_string(total_out()));
    }
  }

  friend bool operator==(const PortSpec&, const PortSpec&) = default;
};

/// Entry indices covered by the given slots (each slot expands to d entries).
inline std::vector<std::size_t> slot_entries(const std::vector<std::size_t>& slots,
                                             std::size_t d) {
  std::vector<std::size_t> out;
  out.reserve(slots.size() * d);
  for (std::size_t s : slots) {
    for (std::size_t a = 0; a < d; ++a) out.push_back(s * d + a);
  }
  return out;
}

inline constexpr double kUnitarityErrorTol = 1e-8;

enum class Check { none, unitary };

/// Unitary map from incoming to outgoing slot amplitudes.
class ScatteringMatrix {
 public:
  ScatteringMatrix(ComplexMatrix matrix, PortSpec spec, Check check = Check::unitary)
      : matrix_(std::move(matrix)), spec_(spec) {
    spec_.validate();
    const auto rows = static_cast<Eigen::Index>(spec_.total_out() * spec_.dim);
    const auto cols = static_cast<Eigen::Index>(spec_.total_in() * spec_.dim);
    if (matrix_.rows() != rows || matrix_.cols() != cols) {
      throw InvalidInput("ScatteringMatrix: matrix is " + std::to_string(matrix_.rows()) + "x" +
                         std::to_string(matrix_.cols()) + " but port spec requires " +
                         std::to_string(rows) + "x" + std::to_string(cols));
    }
    require_finite(matrix_, "ScatteringMatrix");
    if (check == Check::unitary) {
      const double defect = qgraph::unitarity_defect(matrix_);
      if (defect > kUnitarityErrorTol) {
        throw NonUnitary("ScatteringMatrix: ||S^dagger S - 1|| = " + std::to_string(defect));
      }
    }
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  const PortSpec& spec() const { return spec_; }
  std::size_t dim() const { return spec_.dim; }
  std::size_t slots() const { return spec_.total_in(); }

  /// Group block S^{out,in}: maps the in-group amplitudes to the out-group.
  ComplexMatrix block(Side out, Side in) const {
    const auto d = static_cast<Eigen::Index>(spec_.dim);
    return matrix_.block(static_cast<Eigen::Index>(spec_.out_offset(out)) * d,
                         static_cast<Eigen::Index>(spec_.in_offset(in)) * d,
                         static_cast<Eigen::Index>(spec_.out_count(out)) * d,
                         static_cast<Eigen::Index>(spec_.in_count(in)) * d);
  }

  /// The d x d block from absolute in-slot to absolute out-slot.
  ComplexMatrix slot_block(std::size_t out_slot, std::size_t in_slot) const {
    if (out_slot >= spec_.total_out() || in_slot >= spec_.total_in()) {
      throw InvalidInput("slot_block: slot index out of range");
    }
    const auto d = static_cast<Eigen::Index>(spec_.dim);
    return matrix_.block(static_cast<Eigen::Index>(out_slot) * d,
                         static_cast<Eigen::Index>(in_slot) * d, d, d);
  }

  double unitarity_defect() const { return qgraph::unitarity_defect(matrix_); }

 private:
  ComplexMatrix matrix_;
  PortSpec spec_;
};

/// Left-to-right amplitude map (B_R, A_R) = T (A_L, B_L).
class TransferMatrix {
 public:
  TransferMatrix(ComplexMatrix matrix, std::size_t k, std::size_t d)
      : matrix_(std::move(matrix)), k_(k), d_(d) {
    const auto n = static_cast<Eigen::Index>(2 * k * d);
    if (d < 1 || matrix_.rows() != n || matrix_.cols() != n) {
      throw InvalidInput("TransferMatrix: expected a " + std::to_string(n) + "x" +
                         std::to_string(n) + " matrix");
    }
    require_finite(matrix_, "TransferMatrix");
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  std::size_t k() const { return k_; }
  std::size_t dim() const { return d_; }
  Eigen::Index half() const { return static_cast<Eigen::Index>(k_ * d_); }

  ComplexMatrix ba() const { return matrix_.topLeftCorner(half(), half()); }
  ComplexMatrix bb() const { return matrix_.topRightCorner(half(), half()); }
  ComplexMatrix aa() const { return matrix_.bottomLeftCorner(half(), half()); }
  ComplexMatrix ab() const { return matrix_.bottomRightCorner(half(), half()); }

  double abs_determinant() const { return std::abs(matrix_.determinant()); }

  /// Cascade: (*this) applied after `first`.
  TransferMatrix operator*(const TransferMatrix& first) const {
    if (first.k_ != k_ || first.d_ != d_) throw InvalidInput("TransferMatrix: shape mismatch");
    return TransferMatrix(matrix_ * first.matrix_, k_, d_);
  }

 private:
  ComplexMatrix matrix_;
  std::size_t k_;
  std::size_t d_;
};

inline constexpr double kConversionMaxCondition = 1e8;

namespace detail {

inline ComplexMatrix checked_inverse(const ComplexMatrix& a, const char* what) {
  const double cond = condition_number(a);
  if (!(cond < kConversionMaxCondition)) {
    throw ConversionUnavailable(std::string(what) + " is singular or ill-conditioned (cond = " +
                                std::to_string(cond) + ")");
  }
  return a.partialPivLu().inverse();
}

}  // namespace detail

inline TransferMatrix s_to_t(const ScatteringMatrix& s) {
  const PortSpec& p = s.spec();
  if (!p.homogeneous()) {
    throw InvalidInput("s_to_t: left and right groups must have equal slot counts");
  }
  const ComplexMatrix ll = s.block(Side::left, Side::left);
  const ComplexMatrix lr = s.block(Side::left, Side::right);
  const ComplexMatrix rl = s.block(Side::right, Side::left);
  const ComplexMatrix rr = s.block(Side::right, Side::right);
  const ComplexMatrix lr_inv = detail::checked_inverse(lr, "s_to_t: S^{L,R}");

  const Eigen::Index h = lr.rows();
  ComplexMatrix t(2 * h, 2 * h);
  t.topLeftCorner(h, h) = rl - rr * lr_inv * ll;
  t.topRightCorner(h, h) = rr * lr_inv;
  t.bottomLeftCorner(h, h) = -lr_inv * ll;
  t.bottomRightCorner(h, h) = lr_inv;
  return TransferMatrix(std::move(t), p.left_in, p.dim);
}

inline ScatteringMatrix t_to_s(const TransferMatrix& t) {
  const ComplexMatrix ab_inv = detail::checked_inverse(t.ab(), "t_to_s: T^{A,B}");
  const ComplexMatrix aa = t.aa();
  const Eigen::Index h = t.half();
  ComplexMatrix s(2 * h, 2 * h);
  s.topLeftCorner(h, h) = -ab_inv * aa;
  s.topRightCorner(h, h) = ab_inv;
  s.bottomLeftCorner(h, h) = t.ba() - t.bb() * ab_inv * aa;
  s.bottomRightCorner(h, h) = t.bb() * ab_inv;
  return ScatteringMatrix(std::move(s), PortSpec::symmetric(t.k(), t.dim()), Check::none);
}

}  // namespace qgraph
