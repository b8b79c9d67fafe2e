#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qgraph/capacity.hpp"
#include "qgraph/channel.hpp"
#include "qgraph/composer.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/json_io.hpp"
#include "qgraph/physics.hpp"
#include "qgraph/plot.hpp"

namespace qgraph::scenario {

namespace fs = std::filesystem;
using io::json;

enum class Kind { graph_contract, barrier_sweep, star_demo };

inline const char* to_string(Kind k) {
  switch (k) {
    case Kind::graph_contract: return "graph-contract";
    case Kind::barrier_sweep: return "barrier-sweep";
    case Kind::star_demo: return "star-demo";
  }
  return "?";
}

struct Grid {
  double start = 0.005;
  double stop = 2.0;
  std::size_t points = 20000;

  std::vector<double> values() const { return physics::linear_grid(start, stop, points); }
};

struct Scenario {
  Kind kind = Kind::barrier_sweep;
  std::string name;
  fs::path source;

  // barrier-sweep
  physics::BarrierParams params;
  Grid grid;
  std::optional<Grid> epsilon_grid;
  std::size_t verify_stride = 20;

  // graph-contract
  QuantumGraph graph;
  std::optional<ContractionOrder> order;
  std::vector<std::pair<std::string, std::string>> channels;

  // star-demo
  json a;
  json b;
  std::optional<Wiring> wiring;
  std::optional<double> expect_transmission;
};

inline Grid grid_from_json(const json& j, const std::string& where) {
  Grid g;
  g.start = io::parse_number(io::field(j, "start", where), where + ".start");
  g.stop = io::parse_number(io::field(j, "stop", where), where + ".stop");
  g.points = io::parse_count(io::field(j, "points", where), where + ".points");
  if (g.points < 2) io::malformed(where, "grid needs at least two points");
  if (!(g.stop > g.start)) io::malformed(where, "grid stop must exceed start");
  return g;
}

/// Load a scenario. Relative file references resolve against the scenario's directory.
inline Scenario load(const fs::path& path) {
  const json j = io::read_json_file(path.string());
  const std::string where = path.filename().string();
  Scenario s;
  s.source = path;
  const json& kind = io::field(j, "kind", where);
  if (!kind.is_string()) io::malformed(where, "kind must be a string");
  const std::string k = kind.get<std::string>();
  if (k == "graph-contract") {
    s.kind = Kind::graph_contract;
  } else if (k == "barrier-sweep") {
    s.kind = Kind::barrier_sweep;
  } else if (k == "star-demo") {
    s.kind = Kind::star_demo;
  } else {
    io::malformed(where, "unknown kind '" + k + "'");
  }
  s.name = j.contains("name") ? j.at("name").get<std::string>() : path.stem().string();
  if (s.name.empty() || s.name.find_first_of("/\\") != std::string::npos) {
    io::malformed(where, "name must be a plain file stem");
  }

  auto resolve = [&](const json& node, const std::string& w) -> json {
    if (node.is_string()) {
      fs::path p = node.get<std::string>();
      if (p.is_relative()) p = path.parent_path() / p;
      if (!fs::exists(p)) io::malformed(w, "referenced file '" + p.string() + "' does not exist");
      return io::read_json_file(p.string());
    }
    return node;
  };

  switch (s.kind) {
    case Kind::barrier_sweep: {
      const json& p = io::field(j, "params", where);
      s.params.eta = io::parse_number(io::field(p, "eta", where + ".params"), where + ".params.eta");
      s.params.epsilon = io::parse_number(io::field(p, "epsilon", where + ".params"), where + ".params.epsilon");
      s.params.half_width =
          io::parse_number(io::field(p, "half_width", where + ".params"), where + ".params.half_width");
      s.params.separation =
          io::parse_number(io::field(p, "separation", where + ".params"), where + ".params.separation");
      if (j.contains("grid")) s.grid = grid_from_json(j.at("grid"), where + ".grid");
      if (j.contains("epsilon_grid")) {
        Grid g;
        const json& e = j.at("epsilon_grid");
        g.start = io::parse_number(io::field(e, "start", where), where + ".epsilon_grid.start");
        g.stop = io::parse_number(io::field(e, "stop", where), where + ".epsilon_grid.stop");
        g.points = io::parse_count(io::field(e, "points", where), where + ".epsilon_grid.points");
        if (g.points < 2 || !(g.stop > g.start)) io::malformed(where, "invalid epsilon_grid");
        s.epsilon_grid = g;
      }
      if (j.contains("verify_stride")) {
        s.verify_stride = io::parse_count(j.at("verify_stride"), where + ".verify_stride");
        if (s.verify_stride == 0) io::malformed(where, "verify_stride must be positive");
      }
      s.params.at(s.grid.start).validate();
      break;
    }
    case Kind::graph_contract: {
      s.graph = io::graph_from_json(resolve(io::field(j, "graph", where), where + ".graph"), where + ".graph");
      if (j.contains("order")) {
        ContractionOrder o;
        for (const auto& e : j.at("order")) {
          if (!e.is_array() || e.size() != 2) io::malformed(where, "order entries must be [id, id]");
          o.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
        s.order = std::move(o);
      }
      if (j.contains("channels")) {
        for (const auto& c : j.at("channels")) {
          s.channels.emplace_back(io::field(c, "in", where + ".channels").get<std::string>(),
                                  io::field(c, "out", where + ".channels").get<std::string>());
        }
      }
      break;
    }
    case Kind::star_demo: {
      s.a = resolve(io::field(j, "a", where), where + ".a");
      s.b = resolve(io::field(j, "b", where), where + ".b");
      if (j.contains("wiring")) s.wiring = io::wiring_from_json(resolve(j.at("wiring"), where), where + ".wiring");
      if (j.contains("expect_transmission")) {
        s.expect_transmission = io::parse_number(j.at("expect_transmission"), where + ".expect_transmission");
      }
      break;
    }
  }
  return s;
}

// ---- verification ----

struct Check {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;

  bool ok() const { return residual <= threshold; }
};

struct Report {
  std::vector<Check> checks;
  std::vector<std::pair<std::string, double>> values;  // informational

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok(); });
  }

  void add(std::string name, double residual, double threshold) {
    checks.push_back({std::move(name), residual, threshold});
  }

  std::string text() const {
    std::string out;
    char buf[256];
    for (const auto& c : checks) {
      std::snprintf(buf, sizeof buf, "%-4s %-36s %.3e (limit %.1e)\n", c.ok() ? "ok" : "FAIL",
                    c.name.c_str(), c.residual, c.threshold);
      out += buf;
    }
    for (const auto& [k, v] : values) {
      std::snprintf(buf, sizeof buf, "     %-36s %.12g\n", k.c_str(), v);
      out += buf;
    }
    return out;
  }
};

/// Thrown when a verification residual exceeds its limit; carries the report.
class VerificationFailed : public ConsistencyError {
 public:
  explicit VerificationFailed(Report r)
      : ConsistencyError("verification failed\n" + r.text()), report(std::move(r)) {}
  Report report;
};

inline constexpr double kPipelineTol = 1e-9;
inline constexpr double kSeriesTol = 1e-9;
inline constexpr double kUnitaryTol = 1e-9;
inline constexpr double kKrausTol = 1e-10;
inline constexpr double kChoiTol = 1e-10;
inline constexpr double kTraceDevTol = 1e-12;

struct CptpResiduals {
  double kraus = 0.0;
  double choi_negativity = 0.0;
  double trace = 0.0;
};

inline CptpResiduals cptp_residuals(const ErasureChannel& ch) {
  CptpResiduals r;
  const auto d = static_cast<Eigen::Index>(ch.dim());
  r.kraus = inf_norm(kraus_completeness(ch.kraus_set()) - ComplexMatrix::Identity(d, d));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(ch.choi(), Eigen::EigenvaluesOnly);
  r.choi_negativity = std::max(0.0, -es.eigenvalues()(0));
  const DensityMatrix mixed(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
  r.trace = std::abs(ch.apply(mixed).matrix().trace() - Complex(1.0));
  return r;
}

inline void add_cptp(Report& rep, const CptpResiduals& r) {
  rep.add("kraus completeness", r.kraus, kKrausTol);
  rep.add("choi negativity", r.choi_negativity, kChoiTol);
  rep.add("trace deviation", r.trace, kTraceDevTol);
}

inline CptpResiduals worst(CptpResiduals a, const CptpResiduals& b) {
  a.kraus = std::max(a.kraus, b.kraus);
  a.choi_negativity = std::max(a.choi_negativity, b.choi_negativity);
  a.trace = std::max(a.trace, b.trace);
  return a;
}

/// Contraction order that folds vertices in descending id, the reverse of the default.
inline ContractionOrder reverse_order(const QuantumGraph& g) {
  std::vector<int> ids;
  for (const auto& v : g.vertices) ids.push_back(v.id);
  std::sort(ids.rbegin(), ids.rend());
  ContractionOrder o;
  for (std::size_t i = 1; i < ids.size(); ++i) o.emplace_back(ids[0], ids[i]);
  return o;
}

inline Report verify_sweep(const Scenario& s, unsigned threads) {
  const std::vector<double> grid = s.grid.values();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < grid.size(); i += s.verify_stride) idx.push_back(i);
  if (idx.back() != grid.size() - 1) idx.push_back(grid.size() - 1);

  struct Point {
    double pipeline = 0, series = 0, unitary = 0;
    CptpResiduals cptp;
  };
  std::vector<Point> pts(idx.size());
  physics::parallel_for(idx.size(), threads, [&](std::size_t n) {
    const physics::BarrierParams p = s.params.at(grid[idx[n]]);
    Point& pt = pts[n];
    pt.pipeline = physics::pipeline_residual(p);
    const ScatteringMatrix s1 = physics::barrier_smatrix(p);
    const ScatteringMatrix s2 = physics::translated_barrier(s1, p);
    pt.series = max_abs(star(s2, s1).matrix() - star_via_series(s2, s1).matrix());
    const QuantumGraph gs = physics::single_barrier_graph(p);
    const QuantumGraph gd = physics::double_barrier_graph(p);
    const ScatteringMatrix ss = contract(gs);
    const ScatteringMatrix sd = contract(gd);
    pt.unitary = std::max({s1.unitarity_defect(), s2.unitarity_defect(),
                           physics::loss_smatrix(p.eta).unitarity_defect(), ss.unitarity_defect(),
                           sd.unitarity_defect()});
    pt.cptp = worst(cptp_residuals(ErasureChannel(transmission_operator(ss, gs, physics::kSender,
                                                                        physics::kReceiver))),
                    cptp_residuals(ErasureChannel(transmission_operator(sd, gd, physics::kSender,
                                                                        physics::kReceiver))));
  });
  Point w;
  for (const auto& pt : pts) {
    w.pipeline = std::max(w.pipeline, pt.pipeline);
    w.series = std::max(w.series, pt.series);
    w.unitary = std::max(w.unitary, pt.unitary);
    w.cptp = worst(w.cptp, pt.cptp);
  }
  Report rep;
  rep.add("closed form vs pipeline", w.pipeline, kPipelineTol);
  rep.add("star vs geometric series", w.series, kSeriesTol);
  rep.add("unitarity", w.unitary, kUnitaryTol);
  add_cptp(rep, w.cptp);
  rep.values.emplace_back("checked energies", static_cast<double>(idx.size()));
  return rep;
}

inline Report verify_graph(const Scenario& s, std::optional<ScatteringMatrix>* result = nullptr) {
  const auto errors = validate(s.graph);
  if (!errors.empty()) {
    std::string msg = "invalid graph";
    for (const auto& e : errors) msg += "\n  " + e;
    throw InvalidInput(msg);
  }
  Report rep;
  double local = 0.0;
  for (const auto& v : s.graph.vertices) local = std::max(local, unitarity_defect(v.matrix));
  rep.add("vertex unitarity", local, kUnitaryTol);
  if (!rep.ok()) return rep;  // contraction of non-unitary locals is meaningless

  const ScatteringMatrix sg = contract(s.graph, s.order);
  rep.add("global unitarity", sg.unitarity_defect(), kUnitaryTol);
  const ScatteringMatrix rev = contract(s.graph, reverse_order(s.graph));
  rep.add("contraction order independence", max_abs(sg.matrix() - rev.matrix()), kPipelineTol);
  CptpResiduals c;
  for (const auto& [in, out] : s.channels) {
    const ComplexMatrix m = transmission_operator(sg, s.graph, in, out);
    c = worst(c, cptp_residuals(ErasureChannel(m)));
    const RealVector p = singular_probabilities(m);
    rep.values.emplace_back(in + "->" + out + " p_max", p(p.size() - 1));
  }
  if (!s.channels.empty()) add_cptp(rep, c);
  if (result) result->emplace(sg);
  return rep;
}

inline Report verify_star(const Scenario& s, std::optional<ScatteringMatrix>* result = nullptr) {
  const ScatteringMatrix a = io::smatrix_from_json(s.a, "a");
  const ScatteringMatrix b = io::smatrix_from_json(s.b, "b");
  const Wiring w = s.wiring ? *s.wiring : Wiring::standard(a.spec(), b.spec());
  Report rep;
  const ScatteringMatrix ab = star(a, b, w);
  rep.add("unitarity", ab.unitarity_defect(), kUnitaryTol);
  try {
    rep.add("star vs geometric series", max_abs(ab.matrix() - star_via_series(a, b, w).matrix()), kSeriesTol);
  } catch (const SeriesDivergent&) {
    rep.values.emplace_back("geometric series (divergent, skipped)", 1.0);
  }
  if (w.is_identity() && a.spec().homogeneous() && b.spec().homogeneous() && a.spec() == b.spec()) {
    try {
      rep.add("star vs transfer matrices", max_abs(ab.matrix() - star_via_transfer(a, b).matrix()), 1e-8);
    } catch (const ConversionUnavailable&) {
      rep.values.emplace_back("transfer route (unavailable, skipped)", 1.0);
    }
  }
  const double t = operator_norm(ab.block(Side::right, Side::left));
  rep.values.emplace_back("transmission", t);
  if (s.expect_transmission) rep.add("transmission vs expected", std::abs(t - *s.expect_transmission), 1e-12);
  if (result) result->emplace(ab);
  return rep;
}

inline Report verify(const Scenario& s, unsigned threads = 1) {
  switch (s.kind) {
    case Kind::barrier_sweep: return verify_sweep(s, threads);
    case Kind::graph_contract: return verify_graph(s);
    case Kind::star_demo: return verify_star(s);
  }
  return {};
}

// ---- run ----

inline void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + p.string() + "'");
  out << content;
  if (!out) throw InvalidInput("failed writing '" + p.string() + "'");
}

inline constexpr std::size_t kMapEnergyPoints = 400;

inline std::vector<fs::path> run_sweep(const Scenario& s, const fs::path& out_dir, unsigned threads) {
  const Report rep = verify_sweep(s, threads);
  if (!rep.ok()) throw VerificationFailed(rep);

  const std::vector<double> grid = s.grid.values();
  physics::SweepOptions opt;
  opt.threads = threads;
  const physics::SweepResult res = physics::energy_sweep(s.params, grid, opt);

  std::vector<fs::path> written;
  auto emit = [&](const std::string& file, const std::string& content) {
    write_file(out_dir / file, content);
    written.push_back(out_dir / file);
  };
  emit(s.name + ".csv", plot::sweep_csv(res.rows));

  std::vector<bool> sa(res.rows.size());
  std::vector<double> pus, pds, pud, pdd, qls, qus, qld, qud;
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto& r = res.rows[i];
    sa[i] = r.superactivated;
    pus.push_back(r.single.p_up());
    pds.push_back(r.single.p_down());
    pud.push_back(r.dbl.p_up());
    pdd.push_back(r.dbl.p_down());
    qls.push_back(r.single_bounds.q_low);
    qus.push_back(r.single_bounds.q_up);
    qld.push_back(r.double_bounds.q_low);
    qud.push_back(r.double_bounds.q_up);
  }
  const auto windows = plot::windows(grid, sa);
  const bool spin_dependent = s.params.epsilon != 0.0;
  char title[160];
  std::snprintf(title, sizeof title, "eta = %g, epsilon = %g", s.params.eta, s.params.epsilon);

  plot::LinePlot tp;
  tp.title = std::string("Transmission probability, ") + title;
  tp.x_label = "E/V0";
  tp.y_label = "p";
  tp.x = grid;
  tp.series.push_back({"double, up", "#c0392b", pud, false});
  if (spin_dependent) tp.series.push_back({"double, down", "#e67e22", pdd, true});
  tp.series.push_back({"single, up", "#2c3e50", pus, false});
  if (spin_dependent) tp.series.push_back({"single, down", "#2980b9", pds, true});
  emit(s.name + "_transmission.svg", plot::line_svg(tp));

  plot::LinePlot cp;
  cp.title = std::string("Quantum capacity, ") + title;
  cp.x_label = "E/V0";
  cp.y_label = "Q";
  cp.x = grid;
  cp.windows = windows;
  cp.window_label = "superactivation";
  if (spin_dependent) {
    cp.series.push_back({"double, Q_low", "#c0392b", qld, false});
    cp.series.push_back({"single, Q_up", "#2c3e50", qus, false});
  } else {
    cp.series.push_back({"double", "#c0392b", qld, false});
    cp.series.push_back({"single", "#2c3e50", qls, false});
  }
  emit(s.name + "_capacity.svg", plot::line_svg(cp));

  if (s.epsilon_grid) {
    const std::size_t n = std::min<std::size_t>(s.grid.points, kMapEnergyPoints);
    const physics::AdvantageMap m = physics::advantage_map(
        s.params, physics::linear_grid(s.grid.start, s.grid.stop, n), s.epsilon_grid->values(), threads);
    emit(s.name + "_advantage.csv", plot::advantage_csv(m));
    emit(s.name + "_advantage.svg",
         plot::heatmap_svg(m, std::string("Q_low(double) - Q_up(single), eta = ") + plot::tick_label(s.params.eta)));
  }
  return written;
}

inline std::vector<fs::path> run(const Scenario& s, const fs::path& out_dir, unsigned threads = 1) {
  fs::create_directories(out_dir);
  switch (s.kind) {
    case Kind::barrier_sweep: return run_sweep(s, out_dir, threads);
    case Kind::graph_contract: {
      std::optional<ScatteringMatrix> result;
      const Report rep = verify_graph(s, &result);
      if (!rep.ok()) throw VerificationFailed(rep);
      const ScatteringMatrix& sg = *result;
      json j = {{"name", s.name}, {"dangling_in", json::array()}, {"dangling_out", json::array()}};
      for (const auto& p : s.graph.dangling_in) j["dangling_in"].push_back(p.label);
      for (const auto& p : s.graph.dangling_out) j["dangling_out"].push_back(p.label);
      j["smatrix"] = io::to_json(sg);
      json ch = json::array();
      for (const auto& [in, out] : s.channels) {
        const ComplexMatrix m = transmission_operator(sg, s.graph, in, out);
        const RealVector p = singular_probabilities(m);
        json entry = {{"in", in}, {"out", out}, {"m_op", io::to_json(m)},
                      {"p", std::vector<double>(p.data(), p.data() + p.size())}};
        if (sg.dim() >= 2) {  // capacity of a single-level carrier is zero
          const CapacityBounds b = bounds_from_probabilities(p, sg.dim());
          entry["q_low"] = b.q_low;
          entry["q_up"] = b.q_up;
        }
        ch.push_back(std::move(entry));
      }
      j["channels"] = ch;
      write_file(out_dir / (s.name + ".json"), j.dump(2) + "\n");
      return {out_dir / (s.name + ".json")};
    }
    case Kind::star_demo: {
      std::optional<ScatteringMatrix> result;
      const Report rep = verify_star(s, &result);
      if (!rep.ok()) throw VerificationFailed(rep);
      const ScatteringMatrix& ab = *result;
      json j = {{"name", s.name}, {"result", io::to_json(ab)}};
      for (const auto& [k, v] : rep.values) j["values"][k] = v;
      write_file(out_dir / (s.name + ".json"), j.dump(2) + "\n");
      return {out_dir / (s.name + ".json")};
    }
  }
  return {};
}

}  // namespace qgraph::scenario
