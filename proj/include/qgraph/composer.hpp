#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qgraph/numerics.hpp"
#include "qgraph/smatrix.hpp"

namespace qgraph {

/// Internal connections between two scatterers S1 (left) and S2 (right).
///
/// `s1_to_s2` holds pairs (i, j): the i-th right-out slot of S1 feeds the
/// j-th left-in slot of S2. `s2_to_s1` holds pairs (j, i): the j-th left-out
/// slot of S2 feeds the i-th right-in slot of S1. Indices are relative to
/// their group. Every slot of the two facing groups must be wired exactly once.
struct Wiring {
  std::vector<std::pair<std::size_t, std::size_t>> s1_to_s2;
  std::vector<std::pair<std::size_t, std::size_t>> s2_to_s1;

  /// Slot i of S1's right group connects to slot i of S2's left group.
  static Wiring standard(const PortSpec& s1, const PortSpec& s2) {
    if (s1.right_out != s2.left_in || s1.right_in != s2.left_out) {
      throw InvalidInput("Wiring: facing groups of S1 (right) and S2 (left) differ in size");
    }
    Wiring w;
    for (std::size_t i = 0; i < s1.right_out; ++i) w.s1_to_s2.emplace_back(i, i);
    for (std::size_t i = 0; i < s1.right_in; ++i) w.s2_to_s1.emplace_back(i, i);
    return w;
  }

  void validate(const PortSpec& s1, const PortSpec& s2) const {
    if (s1.dim != s2.dim) throw InvalidInput("Wiring: internal dimensions differ");
    check_bijection(s1_to_s2, s1.right_out, s2.left_in, "s1_to_s2");
    check_bijection(s2_to_s1, s2.left_out, s1.right_in, "s2_to_s1");
  }

  bool is_identity() const {
    for (const auto& [a, b] : s1_to_s2)
      if (a != b) return false;
    for (const auto& [a, b] : s2_to_s1)
      if (a != b) return false;
    return true;
  }

 private:
  static void check_bijection(const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                              std::size_t from_count, std::size_t to_count, const char* name) {
    if (from_count != to_count || pairs.size() != from_count) {
      throw InvalidInput(std::string("Wiring: ") + name + " must connect all " +
                         std::to_string(from_count) + " facing slots (" +
                         std::to_string(to_count) + " on the other side, " +
                         std::to_string(pairs.size()) + " pairs given)");
    }
    std::vector<bool> used_from(from_count, false), used_to(to_count, false);
    for (const auto& [a, b] : pairs) {
      if (a >= from_count || b >= to_count) {
        throw InvalidInput(std::string("Wiring: ") + name + " slot index out of range");
      }
      if (used_from[a] || used_to[b]) {
        throw InvalidInput(std::string("Wiring: ") + name + " wires a slot twice");
      }
      used_from[a] = used_to[b] = true;
    }
  }
};

inline constexpr double kKernelSingularTol = 1e-10;
inline constexpr double kKernelResidualTol = 1e-8;
inline constexpr double kDecouplingTol = 1e-8;
inline constexpr double kStarUnitarityTol = 1e-6;

namespace detail {

struct Blocks {
  ComplexMatrix ll, lr, rl, rr;

  explicit Blocks(const ScatteringMatrix& s)
      : ll(s.block(Side::left, Side::left)),
        lr(s.block(Side::left, Side::right)),
        rl(s.block(Side::right, Side::left)),
        rr(s.block(Side::right, Side::right)) {}
};

inline void check_facing(const PortSpec& s2, const PortSpec& s1) {
  if (s1.dim != s2.dim) throw InvalidInput("star: internal dimensions differ");
  if (s1.right_out != s2.left_in || s1.right_in != s2.left_out) {
    throw InvalidInput("star: S1 right group and S2 left group have different slot counts");
  }
}

/// 1 - S2^{L,L} S1^{R,R} on rectangular facing blocks.
inline ComplexMatrix loop_of(const Blocks& s2, const Blocks& s1) {
  const ComplexMatrix p = s2.ll * s1.rr;
  return ComplexMatrix::Identity(p.rows(), p.cols()) - p;
}

/// Assemble the composite from the four block products given the loop inverse.
/// Rows: [S1 left-out, S2 right-out]; columns: [S1 left-in, S2 right-in].
inline ComplexMatrix assemble(const Blocks& s2, const Blocks& s1, const ComplexMatrix& loop_inv) {
  const ComplexMatrix inner = loop_inv * s2.ll * s1.rl;  // internal right-going field
  const ComplexMatrix back = loop_inv * s2.lr;
  const Eigen::Index top = s1.ll.rows(), bottom = s2.rr.rows();
  const Eigen::Index left = s1.ll.cols(), right = s2.rr.cols();
  ComplexMatrix g(top + bottom, left + right);
  g.topLeftCorner(top, left) = s1.ll + s1.lr * inner;
  g.topRightCorner(top, right) = s1.lr * back;
  g.bottomLeftCorner(bottom, left) = s2.rl * s1.rl + s2.rl * s1.rr * inner;
  g.bottomRightCorner(bottom, right) = s2.rr + s2.rl * s1.rr * back;
  return g;
}

inline PortSpec composite_spec(const PortSpec& s2, const PortSpec& s1) {
  return {s1.left_in, s1.left_out, s2.right_in, s2.right_out, s1.dim};
}

/// Reorder S2's left group so that the wiring becomes the identity.
inline ScatteringMatrix rewire(const ScatteringMatrix& s2, const Wiring& w) {
  if (w.is_identity()) return s2;
  const PortSpec& p = s2.spec();
  std::vector<std::size_t> in_order(p.total_in()), out_order(p.total_out());
  for (std::size_t i = 0; i < in_order.size(); ++i) in_order[i] = i;
  for (std::size_t i = 0; i < out_order.size(); ++i) out_order[i] = i;
  for (const auto& [s1_slot, s2_slot] : w.s1_to_s2) in_order[s1_slot] = s2_slot;
  for (const auto& [s2_slot, s1_slot] : w.s2_to_s1) out_order[s1_slot] = s2_slot;
  return ScatteringMatrix(gather(s2.matrix(), slot_entries(out_order, p.dim),
                                 slot_entries(in_order, p.dim)),
                          p, Check::none);
}

}  // namespace detail

/// Loop matrix 1 - S2^{L,L} S1^{R,R} of two scatterers with standard wiring.
inline ComplexMatrix loop_matrix(const ScatteringMatrix& s2, const ScatteringMatrix& s1) {
  detail::check_facing(s2.spec(), s1.spec());
  return detail::loop_of(detail::Blocks(s2), detail::Blocks(s1));
}

/// Slot positions of a scatterer inside its padded (homogeneous) form.
struct PaddedLayout {
  std::size_t target_k = 0;
  std::vector<std::size_t> physical_in;   // original in-slot -> padded in-slot
  std::vector<std::size_t> physical_out;  // original out-slot -> padded out-slot
  std::vector<std::pair<std::size_t, std::size_t>> fictitious;  // padded (in, out)
};

/// Physical slots keep their order at the front of each group. Fictitious
/// in-slots, right group first, are routed in order onto fictitious out-slots,
/// left group first, through identity blocks.
inline PaddedLayout padded_layout(const PortSpec& p, std::size_t target_k) {
  if (target_k < p.max_group()) {
    throw InvalidInput("pad_to_homogeneous: target " + std::to_string(target_k) +
                       " is smaller than a port group of size " + std::to_string(p.max_group()));
  }
  PaddedLayout lay;
  lay.target_k = target_k;
  for (std::size_t i = 0; i < p.left_in; ++i) lay.physical_in.push_back(i);
  for (std::size_t i = 0; i < p.right_in; ++i) lay.physical_in.push_back(target_k + i);
  for (std::size_t i = 0; i < p.left_out; ++i) lay.physical_out.push_back(i);
  for (std::size_t i = 0; i < p.right_out; ++i) lay.physical_out.push_back(target_k + i);

  std::vector<std::size_t> fict_in, fict_out;
  for (std::size_t i = p.right_in; i < target_k; ++i) fict_in.push_back(target_k + i);
  for (std::size_t i = p.left_in; i < target_k; ++i) fict_in.push_back(i);
  for (std::size_t i = p.left_out; i < target_k; ++i) fict_out.push_back(i);
  for (std::size_t i = p.right_out; i < target_k; ++i) fict_out.push_back(target_k + i);
  for (std::size_t i = 0; i < fict_in.size(); ++i) lay.fictitious.emplace_back(fict_in[i], fict_out[i]);
  return lay;
}

/// Embed S into a 2*target_k*d square scatterer with homogeneous groups,
/// routing every fictitious in-slot to a fictitious out-slot.
inline ScatteringMatrix pad_to_homogeneous(const ScatteringMatrix& s, std::size_t target_k) {
  const PortSpec& p = s.spec();
  const PaddedLayout lay = padded_layout(p, target_k);
  const auto d = static_cast<Eigen::Index>(p.dim);
  const auto n = static_cast<Eigen::Index>(2 * target_k) * d;
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (std::size_t j = 0; j < lay.physical_in.size(); ++j) {
    for (std::size_t i = 0; i < lay.physical_out.size(); ++i) {
      out.block(static_cast<Eigen::Index>(lay.physical_out[i]) * d,
                static_cast<Eigen::Index>(lay.physical_in[j]) * d, d, d) =
          s.slot_block(i, j);
    }
  }
  for (const auto& [in, o] : lay.fictitious) {
    out.block(static_cast<Eigen::Index>(o) * d, static_cast<Eigen::Index>(in) * d, d, d) =
        ComplexMatrix::Identity(d, d);
  }
  return ScatteringMatrix(std::move(out), PortSpec::symmetric(target_k, p.dim), Check::none);
}

/// Which slots of a padded composite are physical, and the spec they form.
struct PhysicalSlots {
  std::vector<std::size_t> in_slots;
  std::vector<std::size_t> out_slots;
  PortSpec spec;
};

/// Physical sub-block of a padded composite. Throws DecouplingViolation when
/// physical and fictitious slots exchange amplitude above 1e-8.
inline ScatteringMatrix extract_physical(const ScatteringMatrix& s_bar,
                                         const PhysicalSlots& physical,
                                         Check check = Check::unitary) {
  const PortSpec& p = s_bar.spec();
  if (physical.spec.dim != p.dim || physical.in_slots.size() != physical.spec.total_in() ||
      physical.out_slots.size() != physical.spec.total_out()) {
    throw InvalidInput("extract_physical: slot lists do not match the physical port spec");
  }
  std::vector<bool> phys_in(p.total_in(), false), phys_out(p.total_out(), false);
  for (std::size_t s : physical.in_slots) {
    if (s >= p.total_in() || phys_in[s]) throw InvalidInput("extract_physical: bad in-slot list");
    phys_in[s] = true;
  }
  for (std::size_t s : physical.out_slots) {
    if (s >= p.total_out() || phys_out[s]) throw InvalidInput("extract_physical: bad out-slot list");
    phys_out[s] = true;
  }
  std::vector<std::size_t> fict_in, fict_out;
  for (std::size_t s = 0; s < p.total_in(); ++s)
    if (!phys_in[s]) fict_in.push_back(s);
  for (std::size_t s = 0; s < p.total_out(); ++s)
    if (!phys_out[s]) fict_out.push_back(s);

  const auto in_e = slot_entries(physical.in_slots, p.dim);
  const auto out_e = slot_entries(physical.out_slots, p.dim);
  const auto fin_e = slot_entries(fict_in, p.dim);
  const auto fout_e = slot_entries(fict_out, p.dim);
  const double cross = std::max(max_abs(gather(s_bar.matrix(), out_e, fin_e)),
                                max_abs(gather(s_bar.matrix(), fout_e, in_e)));
  if (cross > kDecouplingTol) {
    throw DecouplingViolation("extract_physical: physical/fictitious coupling " +
                              std::to_string(cross));
  }
  return ScatteringMatrix(gather(s_bar.matrix(), out_e, in_e), physical.spec, check);
}

/// Residuals of the four annihilation identities for one kernel vector V of the loop matrix.
struct KernelResidual {
  double s1_lr_v = 0;          // ||S1^{L,R} V||
  double s2_rl_s1_rr_v = 0;    // ||S2^{R,L} S1^{R,R} V||
  double v_s2_lr = 0;          // ||V^dagger S2^{L,R}||
  double v_s2_ll_s1_rl = 0;    // ||V^dagger S2^{L,L} S1^{R,L}||

  double max() const {
    return std::max(std::max(s1_lr_v, s2_rl_s1_rr_v), std::max(v_s2_lr, v_s2_ll_s1_rl));
  }
};

struct DecouplingReport {
  std::vector<KernelResidual> residuals;  // one per kernel vector
  double max_residual = 0;

  std::size_t kernel_dim() const { return residuals.size(); }
  bool ok() const { return max_residual < kKernelResidualTol; }
};

namespace detail {

inline DecouplingReport decoupling_report(const Blocks& s2, const Blocks& s1, const Svd& loop) {
  DecouplingReport rep;
  for (Eigen::Index i = 0; i < loop.sigma.size(); ++i) {
    if (loop.sigma(i) >= kKernelSingularTol) continue;
    const ComplexVector v = loop.v.col(i);
    KernelResidual r;
    r.s1_lr_v = (s1.lr * v).norm();
    r.s2_rl_s1_rr_v = (s2.rl * (s1.rr * v)).norm();
    r.v_s2_lr = (v.adjoint() * s2.lr).norm();
    r.v_s2_ll_s1_rl = (v.adjoint() * s2.ll * s1.rl).norm();
    rep.max_residual = std::max(rep.max_residual, r.max());
    rep.residuals.push_back(r);
  }
  return rep;
}

/// Star product of facing-compatible blocks with a Moore-Penrose loop inverse.
inline ComplexMatrix star_blocks(const Blocks& s2, const Blocks& s1) {
  const Svd loop = svd(loop_of(s2, s1));
  if (loop.sigma.size() > 0 && loop.sigma(loop.sigma.size() - 1) < kKernelSingularTol) {
    const DecouplingReport rep = decoupling_report(s2, s1, loop);
    if (!rep.ok()) {
      throw ConsistencyError("star: resonant loop mode couples to output ports (residual " +
                             std::to_string(rep.max_residual) + "); inputs are not unitary");
    }
  }
  return assemble(s2, s1, pseudo_inverse(loop));
}

}  // namespace detail

/// Check that every kernel vector of the loop matrix is decoupled from the ports.
inline DecouplingReport kernel_decoupling_check(const ScatteringMatrix& s2,
                                                const ScatteringMatrix& s1) {
  detail::check_facing(s2.spec(), s1.spec());
  const detail::Blocks b2(s2), b1(s1);
  return detail::decoupling_report(b2, b1, svd(detail::loop_of(b2, b1)));
}

/// Redheffer star product S2 * S1: S1's right group is wired to S2's left
/// group, and the composite keeps S1's left group and S2's right group.
/// Scatterers with unequal group sizes are padded with fictitious slots,
/// composed, and the physical block is extracted afterwards.
inline ScatteringMatrix star(const ScatteringMatrix& s2, const ScatteringMatrix& s1,
                             const Wiring& wiring) {
  wiring.validate(s1.spec(), s2.spec());
  const ScatteringMatrix s2w = detail::rewire(s2, wiring);
  const PortSpec out_spec = detail::composite_spec(s2w.spec(), s1.spec());

  ComplexMatrix g;
  if (s1.spec().homogeneous() && s2w.spec().homogeneous()) {
    g = detail::star_blocks(detail::Blocks(s2w), detail::Blocks(s1));
  } else {
    const std::size_t k = std::max(s1.spec().max_group(), s2w.spec().max_group());
    const ScatteringMatrix s1_bar = pad_to_homogeneous(s1, k);
    const ScatteringMatrix s2_bar = pad_to_homogeneous(s2w, k);
    const ScatteringMatrix g_bar(
        detail::star_blocks(detail::Blocks(s2_bar), detail::Blocks(s1_bar)),
        PortSpec::symmetric(k, out_spec.dim), Check::none);
    PhysicalSlots phys{{}, {}, out_spec};
    for (std::size_t i = 0; i < out_spec.left_in; ++i) phys.in_slots.push_back(i);
    for (std::size_t i = 0; i < out_spec.right_in; ++i) phys.in_slots.push_back(k + i);
    for (std::size_t i = 0; i < out_spec.left_out; ++i) phys.out_slots.push_back(i);
    for (std::size_t i = 0; i < out_spec.right_out; ++i) phys.out_slots.push_back(k + i);
    g = extract_physical(g_bar, phys, Check::none).matrix();
  }

  const double defect = unitarity_defect(g);
  if (defect > kStarUnitarityTol) {
    throw ConsistencyError("star: composite is not unitary (defect " + std::to_string(defect) +
                           "); inputs are not unitary");
  }
  return ScatteringMatrix(std::move(g), out_spec, Check::none);
}

inline ScatteringMatrix star(const ScatteringMatrix& s2, const ScatteringMatrix& s1) {
  return star(s2, s1, Wiring::standard(s1.spec(), s2.spec()));
}

/// Star product with the loop inverse replaced by its truncated Neumann
/// series sum_k (S2^{L,L} S1^{R,R})^k. Works on the rectangular facing blocks
/// directly, without fictitious padding.
inline ScatteringMatrix star_via_series(const ScatteringMatrix& s2, const ScatteringMatrix& s1,
                                        const Wiring& wiring, std::size_t max_terms = 10000,
                                        double tol = 1e-14) {
  wiring.validate(s1.spec(), s2.spec());
  const ScatteringMatrix s2w = detail::rewire(s2, wiring);
  const detail::Blocks b2(s2w), b1(s1);
  const ComplexMatrix p = b2.ll * b1.rr;
  const double norm = operator_norm(p);
  if (!(norm < 1.0)) {
    throw SeriesDivergent("star_via_series: ||S2^{L,L} S1^{R,R}|| = " + std::to_string(norm) +
                          " is not below 1");
  }
  ComplexMatrix sum = ComplexMatrix::Identity(p.rows(), p.cols());
  ComplexMatrix term = sum;
  for (std::size_t k = 1; k <= max_terms; ++k) {
    term = term * p;
    sum += term;
    if (operator_norm(term) < tol) break;
  }
  return ScatteringMatrix(detail::assemble(b2, b1, sum),
                          detail::composite_spec(s2w.spec(), s1.spec()), Check::none);
}

inline ScatteringMatrix star_via_series(const ScatteringMatrix& s2, const ScatteringMatrix& s1,
                                        std::size_t max_terms = 10000, double tol = 1e-14) {
  return star_via_series(s2, s1, Wiring::standard(s1.spec(), s2.spec()), max_terms, tol);
}

/// Composite via the transfer-matrix product T2 * T1. Requires homogeneous
/// scatterers with invertible S^{L,R} blocks.
inline ScatteringMatrix star_via_transfer(const ScatteringMatrix& s2, const ScatteringMatrix& s1) {
  return t_to_s(s_to_t(s2) * s_to_t(s1));
}

}  // namespace qgraph
