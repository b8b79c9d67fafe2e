#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgraph/channel.hpp"
#include "qgraph/composer.hpp"
#include "qgraph/graph.hpp"

namespace qgraph::io {

using nlohmann::json;

[[noreturn]] inline void malformed(const std::string& where, const std::string& what) {
  throw InvalidInput(where + ": " + what);
}

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) malformed(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) malformed(where, std::string("missing field '") + key + "'");
  return *it;
}

/// A number, or a string of the form "x", "sqrt(x)" or "c*sqrt(x)".
inline double parse_number(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) malformed(where, "expected a number");
  static const std::regex num(R"(\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*)");
  static const std::regex root(
      R"(\s*(?:([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*\*\s*)?sqrt\s*\(\s*((?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*\)\s*)");
  const std::string s = j.get<std::string>();
  std::smatch m;
  if (std::regex_match(s, m, num)) return std::stod(m[1]);
  if (std::regex_match(s, m, root)) {
    const double c = m[1].matched ? std::stod(m[1]) : 1.0;
    return c * std::sqrt(std::stod(m[2]));
  }
  malformed(where, "cannot parse number '" + s + "'");
}

inline std::size_t parse_count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) malformed(where, "expected a non-negative integer");
  return j.get<std::size_t>();
}

// ---- matrix literal: {"rows": n, "cols": m, "data": [[re, im], ...]} ----

inline ComplexMatrix matrix_from_json(const json& j, const std::string& where = "matrix") {
  const std::size_t rows = parse_count(field(j, "rows", where), where + ".rows");
  const std::size_t cols = parse_count(field(j, "cols", where), where + ".cols");
  const json& data = field(j, "data", where);
  if (!data.is_array() || data.size() != rows * cols) {
    malformed(where, "data must hold rows * cols = " + std::to_string(rows * cols) + " entries");
  }
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const json& e = data[i];
    const std::string ew = where + ".data[" + std::to_string(i) + "]";
    Complex z;
    if (e.is_array()) {
      if (e.size() != 2) malformed(ew, "complex entry must be [re, im]");
      z = Complex(parse_number(e[0], ew), parse_number(e[1], ew));
    } else {
      z = Complex(parse_number(e, ew), 0.0);
    }
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) malformed(ew, "entry is not finite");
    m(static_cast<Eigen::Index>(i / cols), static_cast<Eigen::Index>(i % cols)) = z;
  }
  return m;
}

inline json to_json(const ComplexMatrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back({m(i, k).real(), m(i, k).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

// ---- port spec and scattering matrix ----

inline PortSpec spec_from_json(const json& j, const std::string& where = "spec") {
  PortSpec p;
  p.left_in = parse_count(field(j, "left_in", where), where + ".left_in");
  p.left_out = parse_count(field(j, "left_out", where), where + ".left_out");
  p.right_in = parse_count(field(j, "right_in", where), where + ".right_in");
  p.right_out = parse_count(field(j, "right_out", where), where + ".right_out");
  p.dim = parse_count(field(j, "internal_dim", where), where + ".internal_dim");
  return p;
}

inline json to_json(const PortSpec& p) {
  return {{"left_in", p.left_in},
          {"left_out", p.left_out},
          {"right_in", p.right_in},
          {"right_out", p.right_out},
          {"internal_dim", p.dim}};
}

inline ScatteringMatrix smatrix_from_json(const json& j, const std::string& where = "smatrix") {
  return ScatteringMatrix(matrix_from_json(field(j, "matrix", where), where + ".matrix"),
                          spec_from_json(field(j, "spec", where), where + ".spec"));
}

inline json to_json(const ScatteringMatrix& s) {
  return {{"spec", to_json(s.spec())}, {"matrix", to_json(s.matrix())}};
}

// ---- wiring: {"s1_to_s2": [[out, in], ...], "s2_to_s1": [[out, in], ...]} ----

inline std::vector<std::pair<std::size_t, std::size_t>> pairs_from_json(const json& j,
                                                                        const std::string& where) {
  if (!j.is_array()) malformed(where, "expected an array of [from, to] pairs");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) malformed(where, "expected a [from, to] pair");
    out.emplace_back(parse_count(e[0], where), parse_count(e[1], where));
  }
  return out;
}

inline Wiring wiring_from_json(const json& j, const std::string& where = "wiring") {
  Wiring w;
  w.s1_to_s2 = pairs_from_json(field(j, "s1_to_s2", where), where + ".s1_to_s2");
  w.s2_to_s1 = pairs_from_json(field(j, "s2_to_s1", where), where + ".s2_to_s1");
  return w;
}

// ---- graph ----

inline SlotRef slot_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer()) {
    malformed(where, "expected [vertex, slot]");
  }
  return {j[0].get<int>(), parse_count(j[1], where)};
}

inline std::vector<DanglingPort> ports_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) malformed(where, "expected an array");
  std::vector<DanglingPort> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    const json& label = field(j[i], "label", w);
    const json& vertex = field(j[i], "vertex", w);
    if (!label.is_string()) malformed(w, "label must be a string");
    if (!vertex.is_number_integer()) malformed(w, "vertex must be an integer id");
    out.push_back({label.get<std::string>(), {vertex.get<int>(), parse_count(field(j[i], "slot", w), w)}});
  }
  return out;
}

/// Vertex matrices are loaded without a unitarity check so that validation
/// and verification can report on them.
inline QuantumGraph graph_from_json(const json& j, const std::string& where = "graph") {
  QuantumGraph g;
  const json& vs = field(j, "vertices", where);
  if (!vs.is_array()) malformed(where, "vertices must be an array");
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const std::string w = where + ".vertices[" + std::to_string(i) + "]";
    const json& id = field(vs[i], "id", w);
    if (!id.is_number_integer()) malformed(w, "id must be an integer");
    const json& sm = field(vs[i], "smatrix", w);
    const PortSpec spec = spec_from_json(field(sm, "spec", w + ".smatrix"), w + ".smatrix.spec");
    ComplexMatrix m = matrix_from_json(field(sm, "matrix", w + ".smatrix"), w + ".smatrix.matrix");
    if (static_cast<std::size_t>(m.rows()) != spec.total_out() * spec.dim ||
        static_cast<std::size_t>(m.cols()) != spec.total_in() * spec.dim) {
      malformed(w, "matrix shape does not match its port spec");
    }
    g.vertices.emplace_back(id.get<int>(), std::move(m), spec.dim);
  }
  const json& es = field(j, "edges", where);
  if (!es.is_array()) malformed(where, "edges must be an array");
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string w = where + ".edges[" + std::to_string(i) + "]";
    g.edges.push_back({slot_from_json(field(es[i], "from", w), w + ".from"),
                       slot_from_json(field(es[i], "to", w), w + ".to")});
  }
  g.dangling_in = ports_from_json(field(j, "dangling_in", where), where + ".dangling_in");
  g.dangling_out = ports_from_json(field(j, "dangling_out", where), where + ".dangling_out");
  return g;
}

inline json to_json(const QuantumGraph& g) {
  json vs = json::array(), es = json::array(), din = json::array(), dout = json::array();
  for (const auto& v : g.vertices) {
    const std::size_t n = v.in_slots();
    json sm = {{"spec", to_json(PortSpec{n, v.out_slots(), 0, 0, v.dim})}, {"matrix", to_json(v.matrix)}};
    vs.push_back({{"id", v.id}, {"smatrix", std::move(sm)}});
  }
  for (const auto& e : g.edges)
    es.push_back({{"from", {e.from.vertex, e.from.slot}}, {"to", {e.to.vertex, e.to.slot}}});
  for (const auto& p : g.dangling_in)
    din.push_back({{"label", p.label}, {"vertex", p.slot.vertex}, {"slot", p.slot.slot}});
  for (const auto& p : g.dangling_out)
    dout.push_back({{"label", p.label}, {"vertex", p.slot.vertex}, {"slot", p.slot.slot}});
  return {{"vertices", vs}, {"edges", es}, {"dangling_in", din}, {"dangling_out", dout}};
}

// ---- channel: {"d": d, "m_op": <matrix literal>} ----

inline ErasureChannel channel_from_json(const json& j, const std::string& where = "channel") {
  const std::size_t d = parse_count(field(j, "d", where), where + ".d");
  ComplexMatrix m = matrix_from_json(field(j, "m_op", where), where + ".m_op");
  if (static_cast<std::size_t>(m.rows()) != d || static_cast<std::size_t>(m.cols()) != d) {
    malformed(where, "m_op must be d x d");
  }
  return ErasureChannel(std::move(m));
}

inline json to_json(const ErasureChannel& ch) {
  return {{"d", ch.dim()}, {"m_op", to_json(ch.m_op())}};
}

// ---- files ----

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace qgraph::io
