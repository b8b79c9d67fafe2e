#pragma once

#include <cmath>
#include <complex>
#include <map>

#include "qgraph/composer.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/numerics.hpp"

namespace qgraph::testing {

/// Plane-wave matching for a piecewise-constant potential: region amplitudes
/// (A, B) of A e^{iqx} + B e^{-iqx} are carried across an interface at x by
/// continuity of psi and psi'.
inline Eigen::Matrix2cd interface_matrix(Complex q, double x) {
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd m;
  m << std::exp(i * q * x), std::exp(-i * q * x), i * q * std::exp(i * q * x), -i * q * std::exp(-i * q * x);
  return m;
}

struct OracleAmplitudes {
  Complex t;
  Complex r;
};

/// Barrier of height `level` on [-a, a] in units where k = sqrt(E). Requires E != level.
inline OracleAmplitudes barrier_oracle(double e, double level, double a) {
  const Complex k(std::sqrt(e), 0.0);
  const Complex q = std::sqrt(Complex(e - level, 0.0));
  const Eigen::Matrix2cd t = interface_matrix(k, a).inverse() * interface_matrix(q, a) *
                             interface_matrix(q, -a).inverse() * interface_matrix(k, -a);
  // (t, 0) = T (1, r)
  OracleAmplitudes out;
  out.r = -t(1, 0) / t(1, 1);
  out.t = t(0, 0) + t(0, 1) * out.r;
  return out;
}

/// Gelfand estimate ||A^n||^{1/n} with n = 2^steps, by rescaled repeated squaring.
inline double gelfand_radius(const ComplexMatrix& a, int steps = 40) {
  ComplexMatrix b = a;
  double log_scale = 0.0;
  double n = 1.0;
  for (int s = 0; s < steps; ++s) {
    b = (b * b).eval();
    n *= 2.0;
    const double norm = b.norm();
    if (norm == 0.0) return 0.0;
    b /= norm;
    log_scale = 2.0 * log_scale + std::log(norm);
  }
  return std::exp(log_scale / n);
}

/// Composite of a wired pair by solving the internal field equations directly:
/// v = P_f z1(x1, u), u = P_b w2(v, x2), with every external input at once.
inline ComplexMatrix direct_solve_oracle(const ScatteringMatrix& s2, const ScatteringMatrix& s1,
                                         const Wiring& w) {
  const auto d = static_cast<Eigen::Index>(s1.dim());
  const PortSpec p1 = s1.spec(), p2 = s2.spec();
  const auto n = [d](std::size_t slots) { return static_cast<Eigen::Index>(slots) * d; };
  const ComplexMatrix& a1 = s1.matrix();
  const ComplexMatrix& a2 = s2.matrix();
  const Eigen::Index x1 = n(p1.left_in), u = n(p1.right_in), y1 = n(p1.left_out), z1 = n(p1.right_out);
  const Eigen::Index v = n(p2.left_in), x2 = n(p2.right_in), w2 = n(p2.left_out), y2 = n(p2.right_out);

  ComplexMatrix pf = ComplexMatrix::Zero(v, z1), pb = ComplexMatrix::Zero(u, w2);
  for (const auto& [i, j] : w.s1_to_s2) pf.block(n(j), n(i), d, d).setIdentity();
  for (const auto& [j, i] : w.s2_to_s1) pb.block(n(i), n(j), d, d).setIdentity();

  // Unknowns (u, v); inputs (x1, x2).
  ComplexMatrix lhs = ComplexMatrix::Identity(u + v, u + v);
  lhs.block(0, u, u, v) = -pb * a2.block(0, 0, w2, v);
  lhs.block(u, 0, v, u) = -pf * a1.block(y1, x1, z1, u);
  ComplexMatrix rhs = ComplexMatrix::Zero(u + v, x1 + x2);
  rhs.block(0, x1, u, x2) = pb * a2.block(0, v, w2, x2);
  rhs.block(u, 0, v, x1) = pf * a1.block(y1, 0, z1, x1);
  const ComplexMatrix sol = lhs.colPivHouseholderQr().solve(rhs);
  const ComplexMatrix us = sol.topRows(u), vs = sol.bottomRows(v);

  ComplexMatrix ext1 = ComplexMatrix::Zero(x1, x1 + x2), ext2 = ComplexMatrix::Zero(x2, x1 + x2);
  ext1.leftCols(x1).setIdentity();
  ext2.rightCols(x2).setIdentity();
  ComplexMatrix g(y1 + y2, x1 + x2);
  g.topRows(y1) = a1.block(0, 0, y1, x1) * ext1 + a1.block(0, x1, y1, u) * us;
  g.bottomRows(y2) = a2.block(w2, 0, y2, v) * vs + a2.block(w2, v, y2, x2) * ext2;
  return g;
}

/// Global scattering matrix of a graph from one linear system over all edge
/// amplitudes: a_e = S_u[out(e), :] * (inputs of u). Ordered by dangling labels.
inline ComplexMatrix graph_solve_oracle(const QuantumGraph& g) {
  const auto d = static_cast<Eigen::Index>(g.dim());
  const auto ne = static_cast<Eigen::Index>(g.edges.size());
  const auto np = static_cast<Eigen::Index>(g.dangling_in.size());
  // Source of each vertex input slot: edge index (>= 0) or -(dangling index) - 1.
  std::map<SlotRef, long> source;
  for (std::size_t e = 0; e < g.edges.size(); ++e) source[g.edges[e].to] = static_cast<long>(e);
  for (std::size_t i = 0; i < g.dangling_in.size(); ++i)
    source[g.dangling_in[i].slot] = -static_cast<long>(i) - 1;

  auto feed = [&](const SlotRef& out, ComplexMatrix& k_row, ComplexMatrix& b_row) {
    const Vertex& v = *g.find_vertex(out.vertex);
    for (std::size_t j = 0; j < v.in_slots(); ++j) {
      const ComplexMatrix blk = v.matrix.block(static_cast<Eigen::Index>(out.slot) * d,
                                               static_cast<Eigen::Index>(j) * d, d, d);
      const long src = source.at({v.id, j});
      if (src >= 0) k_row.block(0, src * d, d, d) += blk;
      else b_row.block(0, (-src - 1) * d, d, d) += blk;
    }
  };
  ComplexMatrix k = ComplexMatrix::Zero(ne * d, ne * d), b = ComplexMatrix::Zero(ne * d, np * d);
  for (Eigen::Index e = 0; e < ne; ++e) {
    ComplexMatrix kr = ComplexMatrix::Zero(d, ne * d), br = ComplexMatrix::Zero(d, np * d);
    feed(g.edges[static_cast<std::size_t>(e)].from, kr, br);
    k.middleRows(e * d, d) = kr;
    b.middleRows(e * d, d) = br;
  }
  const ComplexMatrix a = ne == 0 ? ComplexMatrix(0, np * d)
                                  : ComplexMatrix((ComplexMatrix::Identity(ne * d, ne * d) - k)
                                                      .colPivHouseholderQr()
                                                      .solve(b));
  ComplexMatrix out(np * d, np * d);
  for (Eigen::Index o = 0; o < np; ++o) {
    ComplexMatrix kr = ComplexMatrix::Zero(d, ne * d), br = ComplexMatrix::Zero(d, np * d);
    feed(g.dangling_out[static_cast<std::size_t>(o)].slot, kr, br);
    out.middleRows(o * d, d) = (ne > 0 ? ComplexMatrix(kr * a) : ComplexMatrix(ComplexMatrix::Zero(d, np * d))) + br;
  }
  return out;
}

}  // namespace qgraph::testing
