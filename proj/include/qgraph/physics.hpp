#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <cstddef>
#include <string>
#include <thread>
#include <vector>

#include "qgraph/capacity.hpp"
#include "qgraph/channel.hpp"
#include "qgraph/composer.hpp"
#include "qgraph/graph.hpp"

namespace qgraph::physics {

/// Dimensionless model parameters: energies in units of V0, lengths in units
/// of 1/k0 with k0 = sqrt(2 m V0) / hbar.
struct BarrierParams {
  double energy_ratio = 1.0;  // E / V0
  double epsilon = 0.0;       // barrier heights are (1 +- epsilon) V0
  double half_width = 0.0;    // a
  double separation = 0.0;    // w
  double eta = 0.0;           // loss probability

  void validate() const {
    if (!(energy_ratio > 0.0) || !std::isfinite(energy_ratio))
      throw InvalidInput("BarrierParams: E/V0 must be positive");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidInput("BarrierParams: epsilon must lie in [0, 1]");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
      throw InvalidInput("BarrierParams: half width must be positive");
    if (!(separation >= 0.0) || !std::isfinite(separation))
      throw InvalidInput("BarrierParams: separation must be non-negative");
    if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidInput("BarrierParams: eta must lie in [0, 1]");
  }

  BarrierParams at(double e) const {
    BarrierParams p = *this;
    p.energy_ratio = e;
    return p;
  }
};

/// Geometry used for every figure: a = 0.06 sqrt(20), w = 10 sqrt(20).
inline BarrierParams reference_params(double eta, double epsilon) {
  BarrierParams p;
  p.half_width = 0.06 * std::sqrt(20.0);
  p.separation = 10.0 * std::sqrt(20.0);
  p.eta = eta;
  p.epsilon = epsilon;
  return p;
}

enum class Spin { up, down };

/// Transmission and reflection amplitude of one spin channel of a symmetric
/// square barrier on [-a, a], phases referred to x = 0.
struct BarrierAmplitudes {
  Complex t;
  Complex r;
};

inline constexpr double kSinhcSeriesCutoff = 1e-3;

/// sinh(x) / x, with a Taylor expansion near the origin.
inline Complex sinhc(Complex x) {
  if (std::abs(x) < kSinhcSeriesCutoff) {
    const Complex x2 = x * x;
    return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sinh(x) / x;
}

/// Amplitudes for a barrier of height `level` (in V0) at energy e.
/// kappa^2 = level - e is negative above the barrier; every expression is
/// even in kappa, so the complex square root needs no branch choice.
inline BarrierAmplitudes barrier_amplitudes(double e, double level, double a) {
  if (!(e > 0.0)) throw InvalidInput("barrier_amplitudes: E/V0 must be positive");
  const double k = std::sqrt(e);
  const double kappa2 = level - e;
  const Complex kappa = std::sqrt(Complex(kappa2, 0.0));
  const Complex x = 2.0 * a * kappa;
  const Complex s = 2.0 * a * sinhc(x);  // sinh(2 a kappa) / kappa
  const Complex i(0.0, 1.0);
  const Complex phase = std::exp(-2.0 * i * k * a);
  BarrierAmplitudes out;
  out.t = phase / (std::cosh(x) - i * (k * k - kappa2) * s / (2.0 * k));
  out.r = -i * (k * k + kappa2) * s / (2.0 * k) * out.t;
  return out;
}

inline BarrierAmplitudes barrier_amplitudes(const BarrierParams& p, Spin spin) {
  const double level = spin == Spin::up ? 1.0 + p.epsilon : 1.0 - p.epsilon;
  return barrier_amplitudes(p.energy_ratio, level, p.half_width);
}

/// Spin-diagonal two-slot scatterer with blocks [[R, T], [T, R']] (d = 2).
inline ComplexMatrix barrier_matrix(const BarrierAmplitudes& up, const BarrierAmplitudes& dn,
                                    Complex left_phase = 1.0, Complex right_phase = 1.0) {
  ComplexMatrix s = ComplexMatrix::Zero(4, 4);
  s(0, 0) = left_phase * up.r;
  s(1, 1) = left_phase * dn.r;
  s(0, 2) = up.t;
  s(1, 3) = dn.t;
  s(2, 0) = up.t;
  s(3, 1) = dn.t;
  s(2, 2) = right_phase * up.r;
  s(3, 3) = right_phase * dn.r;
  return s;
}

inline ScatteringMatrix barrier_smatrix(const BarrierParams& p) {
  p.validate();
  return ScatteringMatrix(
      barrier_matrix(barrier_amplitudes(p, Spin::up), barrier_amplitudes(p, Spin::down)),
      PortSpec::symmetric(1, 2));
}

/// phi = 2 k w.
inline double translation_phase(const BarrierParams& p) {
  return 2.0 * std::sqrt(p.energy_ratio) * p.separation;
}

/// The barrier moved by w: reflection blocks pick up exp(+i phi) on the left
/// and exp(-i phi) on the right.
inline ScatteringMatrix translated_barrier(const ScatteringMatrix& s1, const BarrierParams& p) {
  if (s1.matrix().rows() != 4 || s1.dim() != 2) {
    throw InvalidInput("translated_barrier: expected a two-slot spin scatterer");
  }
  const Complex e = std::polar(1.0, translation_phase(p));
  ComplexMatrix m = s1.matrix();
  m.topLeftCorner(2, 2) *= e;
  m.bottomRightCorner(2, 2) *= std::conj(e);
  return ScatteringMatrix(std::move(m), s1.spec());
}

/// Point-like loss on the line. Slots 0 and 3 are the line, 1 and 2 the
/// vertical escape edges; a particle stays on the line with amplitude
/// sqrt(1 - eta).
inline ScatteringMatrix loss_smatrix(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidInput("loss_smatrix: eta must lie in [0, 1]");
  const double s = std::sqrt(eta);
  const double c = std::sqrt(1.0 - eta);
  const double pattern[4][4] = {{0, 0, s, c}, {0, 0, -c, s}, {s, -c, 0, 0}, {c, s, 0, 0}};
  ComplexMatrix m = ComplexMatrix::Zero(8, 8);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m.block(2 * i, 2 * j, 2, 2) = pattern[i][j] * ComplexMatrix::Identity(2, 2);
  return ScatteringMatrix(std::move(m), PortSpec::symmetric(2, 2));
}

/// Diagonal transmission operator of the spin channel.
struct SpinChannelPair {
  Complex m_up;
  Complex m_down;
  bool pipeline_fallback = false;  // closed form was singular; value came from star products

  ComplexMatrix matrix() const {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = m_up;
    m(1, 1) = m_down;
    return m;
  }
  double p_up() const { return std::norm(m_up); }
  double p_down() const { return std::norm(m_down); }
  CapacityBounds bounds() const {
    RealVector p(2);
    p << std::min(p_up(), 1.0), std::min(p_down(), 1.0);
    return bounds_from_probabilities(std::move(p), 2);
  }
};

/// Vertex ids and port labels of the pipeline graphs.
inline constexpr int kFirstBarrier = 1;
inline constexpr int kLoss = 2;
inline constexpr int kSecondBarrier = 3;
inline const std::string kSender = "alice";
inline const std::string kReceiver = "bob";

/// Barrier 1 followed by the loss element; Bob reads the line after the loss.
inline QuantumGraph single_barrier_graph(const BarrierParams& p) {
  p.validate();
  QuantumGraph g;
  g.vertices.emplace_back(kFirstBarrier, barrier_smatrix(p));
  g.vertices.emplace_back(kLoss, loss_smatrix(p.eta));
  g.edges.push_back({{kFirstBarrier, 1}, {kLoss, 0}});
  g.edges.push_back({{kLoss, 0}, {kFirstBarrier, 1}});
  g.dangling_in = {{kSender, {kFirstBarrier, 0}},
                   {"loss_up", {kLoss, 1}},
                   {"loss_down", {kLoss, 2}},
                   {"line_right", {kLoss, 3}}};
  g.dangling_out = {{"reflected", {kFirstBarrier, 0}},
                    {"escape_up", {kLoss, 1}},
                    {"escape_down", {kLoss, 2}},
                    {kReceiver, {kLoss, 3}}};
  return g;
}

/// As above with the translated barrier closing the cavity behind the loss.
inline QuantumGraph double_barrier_graph(const BarrierParams& p) {
  QuantumGraph g = single_barrier_graph(p);
  const ScatteringMatrix s1 = barrier_smatrix(p);
  g.vertices.emplace_back(kSecondBarrier, translated_barrier(s1, p));
  g.edges.push_back({{kLoss, 3}, {kSecondBarrier, 0}});
  g.edges.push_back({{kSecondBarrier, 0}, {kLoss, 3}});
  g.dangling_in.back() = {"line_right", {kSecondBarrier, 1}};
  g.dangling_out.back() = {kReceiver, {kSecondBarrier, 1}};
  return g;
}

inline SpinChannelPair from_operator(const ComplexMatrix& m) {
  SpinChannelPair out;
  out.m_up = m(0, 0);
  out.m_down = m(1, 1);
  return out;
}

/// Transmission operator obtained by contracting the graph.
inline ComplexMatrix pipeline_operator(const QuantumGraph& g) {
  return transmission_operator(contract(g), g, kSender, kReceiver);
}

inline SpinChannelPair single_barrier_m(const BarrierParams& p) {
  p.validate();
  const double c = std::sqrt(1.0 - p.eta);
  SpinChannelPair out;
  out.m_up = c * barrier_amplitudes(p, Spin::up).t;
  out.m_down = c * barrier_amplitudes(p, Spin::down).t;
  return out;
}

inline constexpr double kResonantDenominatorFloor = 1e-14;

inline SpinChannelPair double_barrier_m(const BarrierParams& p) {
  p.validate();
  const double c2 = 1.0 - p.eta;
  const Complex e = std::polar(1.0, translation_phase(p));
  SpinChannelPair out;
  for (Spin spin : {Spin::up, Spin::down}) {
    const BarrierAmplitudes b = barrier_amplitudes(p, spin);
    const Complex den = 1.0 - c2 * b.r * e * b.r;
    if (std::abs(den) < kResonantDenominatorFloor) {
      SpinChannelPair fallback = from_operator(pipeline_operator(double_barrier_graph(p)));
      fallback.pipeline_fallback = true;
      return fallback;
    }
    (spin == Spin::up ? out.m_up : out.m_down) = std::sqrt(c2) * b.t * b.t / den;
  }
  return out;
}

struct SweepRow {
  double energy_ratio = 0.0;
  SpinChannelPair single;
  SpinChannelPair dbl;
  CapacityBounds single_bounds;
  CapacityBounds double_bounds;
  bool superactivated = false;
};

struct SweepOptions {
  unsigned threads = 1;
  std::size_t check_stride = 100;  // cross-check every n-th point against the pipeline; 0 disables
  double check_tol = 1e-9;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double max_check_residual = 0.0;
  std::size_t checked_points = 0;
};

/// Largest entrywise deviation between closed forms and graph contraction.
inline double pipeline_residual(const BarrierParams& p) {
  const ComplexMatrix ms = pipeline_operator(single_barrier_graph(p));
  const ComplexMatrix md = pipeline_operator(double_barrier_graph(p));
  return std::max(max_abs(ms - single_barrier_m(p).matrix()),
                  max_abs(md - double_barrier_m(p).matrix()));
}

inline SweepRow sweep_point(const BarrierParams& p) {
  SweepRow row;
  row.energy_ratio = p.energy_ratio;
  row.single = single_barrier_m(p);
  row.dbl = double_barrier_m(p);
  row.single_bounds = row.single.bounds();
  row.double_bounds = row.dbl.bounds();
  row.superactivated = detect_superactivation(row.double_bounds, row.single_bounds);
  return row;
}

inline void validate_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidInput("energy grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) throw InvalidInput("energy grid values must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidInput("energy grid must be strictly increasing");
  }
}

/// `points` equally spaced values from start to stop inclusive.
inline std::vector<double> linear_grid(double start, double stop, std::size_t points) {
  if (points < 2) throw InvalidInput("grid needs at least two points");
  std::vector<double> g(points);
  const double step = (stop - start) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = start + step * static_cast<double>(i);
  g.back() = stop;
  return g;
}

/// Evaluate f(i) for i in [0, n) over contiguous chunks, one per thread.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Per-energy transmission probabilities, capacity bounds and the
/// superactivation flag for both configurations. Rows follow the grid order
/// regardless of thread count.
inline SweepResult energy_sweep(const BarrierParams& base, const std::vector<double>& grid,
                                const SweepOptions& opt = {}) {
  validate_grid(grid);
  base.at(grid.front()).validate();
  SweepResult out;
  out.rows.resize(grid.size());
  std::vector<double> residual(grid.size(), 0.0);
  parallel_for(grid.size(), opt.threads, [&](std::size_t i) {
    const BarrierParams p = base.at(grid[i]);
    out.rows[i] = sweep_point(p);
    if (opt.check_stride > 0 && i % opt.check_stride == 0) residual[i] = pipeline_residual(p);
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (opt.check_stride > 0 && i % opt.check_stride == 0) ++out.checked_points;
    out.max_check_residual = std::max(out.max_check_residual, residual[i]);
  }
  if (out.max_check_residual > opt.check_tol) {
    throw ConsistencyError("energy_sweep: closed form and graph contraction differ by " +
                           std::to_string(out.max_check_residual));
  }
  return out;
}

/// q_low(double) - q_up(single) over an (epsilon, energy) grid, row-major in epsilon.
struct AdvantageMap {
  std::vector<double> energies;
  std::vector<double> epsilons;
  std::vector<double> values;

  double at(std::size_t ie, std::size_t ien) const { return values[ie * energies.size() + ien]; }
};

inline AdvantageMap advantage_map(const BarrierParams& base, const std::vector<double>& energies,
                                  const std::vector<double>& epsilons, unsigned threads = 1) {
  validate_grid(energies);
  if (epsilons.empty()) throw InvalidInput("advantage_map: epsilon grid is empty");
  AdvantageMap m{energies, epsilons, std::vector<double>(energies.size() * epsilons.size())};
  parallel_for(m.values.size(), threads, [&](std::size_t idx) {
    BarrierParams p = base.at(energies[idx % energies.size()]);
    p.epsilon = epsilons[idx / energies.size()];
    p.validate();
    m.values[idx] = double_barrier_m(p).bounds().q_low - single_barrier_m(p).bounds().q_up;
  });
  return m;
}

}  // namespace qgraph::physics
