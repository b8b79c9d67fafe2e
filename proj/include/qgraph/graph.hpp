#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qgraph/composer.hpp"
#include "qgraph/smatrix.hpp"

namespace qgraph {

struct SlotRef {
  int vertex = 0;
  std::size_t slot = 0;

  friend auto operator<=>(const SlotRef&, const SlotRef&) = default;
};

/// A vertex scatterer. In-slots are the matrix columns (in blocks of d),
/// out-slots the rows. The left/right grouping of a local scatterer plays no
/// role inside a graph: connectivity comes from the edge list alone.
struct Vertex {
  int id = 0;
  ComplexMatrix matrix;
  std::size_t dim = 1;

  Vertex() = default;
  Vertex(int id_, ComplexMatrix m, std::size_t d) : id(id_), matrix(std::move(m)), dim(d) {}
  Vertex(int id_, const ScatteringMatrix& s) : id(id_), matrix(s.matrix()), dim(s.dim()) {}

  std::size_t in_slots() const { return dim == 0 ? 0 : static_cast<std::size_t>(matrix.cols()) / dim; }
  std::size_t out_slots() const { return dim == 0 ? 0 : static_cast<std::size_t>(matrix.rows()) / dim; }
};

/// Internal edge: an out-slot of one vertex feeds an in-slot of another.
struct Edge {
  SlotRef from;
  SlotRef to;
};

/// External port of the graph.
struct DanglingPort {
  std::string label;
  SlotRef slot;
};

struct QuantumGraph {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<DanglingPort> dangling_in;
  std::vector<DanglingPort> dangling_out;

  const Vertex* find_vertex(int id) const {
    for (const auto& v : vertices)
      if (v.id == id) return &v;
    return nullptr;
  }

  std::size_t dim() const { return vertices.empty() ? 1 : vertices.front().dim; }

  /// Position of a dangling port in the global scattering matrix.
  std::size_t in_index(const std::string& label) const { return index_of(dangling_in, label, "in"); }
  std::size_t out_index(const std::string& label) const { return index_of(dangling_out, label, "out"); }

 private:
  static std::size_t index_of(const std::vector<DanglingPort>& ports, const std::string& label,
                              const char* kind) {
    for (std::size_t i = 0; i < ports.size(); ++i)
      if (ports[i].label == label) return i;
    throw InvalidInput(std::string("unknown dangling ") + kind + " port '" + label + "'");
  }
};

/// Check every structural invariant of the graph. Returns the list of
/// violations; an empty list means the graph is valid.
inline std::vector<std::string> validate(const QuantumGraph& g) {
  std::vector<std::string> errors;
  auto vname = [](int id) { return "vertex " + std::to_string(id); };

  std::map<int, const Vertex*> by_id;
  for (const auto& v : g.vertices) {
    if (!by_id.emplace(v.id, &v).second) errors.push_back("duplicate " + vname(v.id));
    if (v.dim < 1) {
      errors.push_back(vname(v.id) + ": internal dimension must be at least 1");
      continue;
    }
    if (v.dim != g.dim()) errors.push_back(vname(v.id) + ": internal dimension differs from the graph's");
    if (v.matrix.rows() % static_cast<Eigen::Index>(v.dim) != 0 ||
        v.matrix.cols() % static_cast<Eigen::Index>(v.dim) != 0) {
      errors.push_back(vname(v.id) + ": matrix shape is not a multiple of the internal dimension");
      continue;
    }
    if (v.in_slots() != v.out_slots()) {
      errors.push_back(vname(v.id) + ": cardinality violation, " + std::to_string(v.in_slots()) +
                       " in-slots but " + std::to_string(v.out_slots()) + " out-slots");
    }
    if (v.in_slots() == 0 && v.out_slots() == 0) {
      errors.push_back(vname(v.id) + ": disconnected vertex with no slots");
    }
    if (!all_finite(v.matrix)) errors.push_back(vname(v.id) + ": matrix has non-finite entries");
  }
  if (g.vertices.empty()) errors.push_back("graph has no vertices");

  std::map<SlotRef, int> in_use, out_use;
  auto check_ref = [&](const SlotRef& r, bool is_in, const std::string& what) {
    auto it = by_id.find(r.vertex);
    if (it == by_id.end()) {
      errors.push_back(what + ": unknown " + vname(r.vertex));
      return;
    }
    const std::size_t n = is_in ? it->second->in_slots() : it->second->out_slots();
    if (r.slot >= n) {
      errors.push_back(what + ": " + (is_in ? "in" : "out") + "-slot " + std::to_string(r.slot) +
                       " out of range for " + vname(r.vertex));
      return;
    }
    auto& use = is_in ? in_use : out_use;
    if (++use[r] == 2) {
      errors.push_back("wiring violation: " + std::string(is_in ? "in" : "out") + "-slot " +
                       std::to_string(r.slot) + " of " + vname(r.vertex) + " is used more than once");
    }
  };

  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const Edge& edge = g.edges[e];
    const std::string what = "edge " + std::to_string(e);
    if (edge.from.vertex == edge.to.vertex) {
      errors.push_back(what + ": self-loop on " + vname(edge.from.vertex) +
                       " is not supported; split the vertex in two");
    }
    check_ref(edge.from, false, what);
    check_ref(edge.to, true, what);
  }
  std::set<std::string> labels_in, labels_out;
  for (const auto& p : g.dangling_in) {
    if (!labels_in.insert(p.label).second) errors.push_back("duplicate dangling in label '" + p.label + "'");
    check_ref(p.slot, true, "dangling in '" + p.label + "'");
  }
  for (const auto& p : g.dangling_out) {
    if (!labels_out.insert(p.label).second) errors.push_back("duplicate dangling out label '" + p.label + "'");
    check_ref(p.slot, false, "dangling out '" + p.label + "'");
  }
  if (g.dangling_in.size() != g.dangling_out.size()) {
    errors.push_back("graph has " + std::to_string(g.dangling_in.size()) + " dangling in-ports but " +
                     std::to_string(g.dangling_out.size()) + " dangling out-ports");
  }

  for (const auto& v : g.vertices) {
    if (v.dim < 1) continue;
    for (std::size_t s = 0; s < v.in_slots(); ++s)
      if (!in_use.count({v.id, s}))
        errors.push_back(vname(v.id) + ": in-slot " + std::to_string(s) + " is neither wired nor dangling");
    for (std::size_t s = 0; s < v.out_slots(); ++s)
      if (!out_use.count({v.id, s}))
        errors.push_back(vname(v.id) + ": out-slot " + std::to_string(s) + " is neither wired nor dangling");
  }
  return errors;
}

using ContractionOrder = std::vector<std::pair<int, int>>;

namespace detail {

/// What a slot of a partially contracted node is attached to.
struct PortTag {
  bool dangling = false;
  std::size_t index = 0;  // dangling port position, or edge index

  friend bool operator==(const PortTag&, const PortTag&) = default;
};

struct Node {
  int id = 0;
  ComplexMatrix matrix;
  std::vector<PortTag> ins;
  std::vector<PortTag> outs;
};

inline Node merge(const Node& a, const Node& b, std::size_t d) {
  // edges leaving a into b, in a's out-slot order; edges leaving b into a likewise
  auto has = [](const std::vector<PortTag>& tags, const PortTag& t) {
    return std::find(tags.begin(), tags.end(), t) != tags.end();
  };
  std::vector<PortTag> a_to_b, b_to_a;
  for (const auto& t : a.outs)
    if (!t.dangling && has(b.ins, t)) a_to_b.push_back(t);
  for (const auto& t : b.outs)
    if (!t.dangling && has(a.ins, t)) b_to_a.push_back(t);

  auto position = [](const std::vector<PortTag>& tags, const PortTag& t) {
    return static_cast<std::size_t>(std::find(tags.begin(), tags.end(), t) - tags.begin());
  };
  // a: left = slots outside the a<->b connection; right = facing slots
  std::vector<std::size_t> a_in, a_out, b_in, b_out;
  for (std::size_t i = 0; i < a.ins.size(); ++i)
    if (!has(b_to_a, a.ins[i])) a_in.push_back(i);
  for (const auto& t : b_to_a) a_in.push_back(position(a.ins, t));
  for (std::size_t i = 0; i < a.outs.size(); ++i)
    if (!has(a_to_b, a.outs[i])) a_out.push_back(i);
  for (const auto& t : a_to_b) a_out.push_back(position(a.outs, t));
  // b: left = facing slots; right = the rest
  for (const auto& t : a_to_b) b_in.push_back(position(b.ins, t));
  for (std::size_t i = 0; i < b.ins.size(); ++i)
    if (!has(a_to_b, b.ins[i])) b_in.push_back(i);
  for (const auto& t : b_to_a) b_out.push_back(position(b.outs, t));
  for (std::size_t i = 0; i < b.outs.size(); ++i)
    if (!has(b_to_a, b.outs[i])) b_out.push_back(i);

  const PortSpec spec_a{a.ins.size() - b_to_a.size(), a.outs.size() - a_to_b.size(), b_to_a.size(),
                        a_to_b.size(), d};
  const PortSpec spec_b{a_to_b.size(), b_to_a.size(), b.ins.size() - a_to_b.size(),
                        b.outs.size() - b_to_a.size(), d};
  const ScatteringMatrix s1(gather(a.matrix, slot_entries(a_out, d), slot_entries(a_in, d)), spec_a,
                            Check::none);
  const ScatteringMatrix s2(gather(b.matrix, slot_entries(b_out, d), slot_entries(b_in, d)), spec_b,
                            Check::none);
  const ScatteringMatrix s = star(s2, s1);

  Node out;
  out.id = a.id;
  out.matrix = s.matrix();
  for (std::size_t i = 0; i < spec_a.left_in; ++i) out.ins.push_back(a.ins[a_in[i]]);
  for (std::size_t i = spec_b.left_in; i < b_in.size(); ++i) out.ins.push_back(b.ins[b_in[i]]);
  for (std::size_t i = 0; i < spec_a.left_out; ++i) out.outs.push_back(a.outs[a_out[i]]);
  for (std::size_t i = spec_b.left_out; i < b_out.size(); ++i) out.outs.push_back(b.outs[b_out[i]]);
  return out;
}

}  // namespace detail

/// Global scattering matrix of the graph, relating dangling in-ports to
/// dangling out-ports in the order they are listed.
///
/// Vertices are merged pairwise with the star product. `order` lists the
/// pairs to merge; a merged node keeps the id of the first member. Nodes left
/// over after `order` is exhausted are folded in ascending id.
inline ScatteringMatrix contract(const QuantumGraph& g,
                                 const std::optional<ContractionOrder>& order = std::nullopt) {
  const auto errors = validate(g);
  if (!errors.empty()) {
    std::string msg = "contract: invalid graph";
    for (const auto& e : errors) msg += "\n  " + e;
    throw InvalidInput(msg);
  }
  const std::size_t d = g.dim();

  std::map<int, detail::Node> nodes;
  for (const auto& v : g.vertices) {
    detail::Node n;
    n.id = v.id;
    n.matrix = v.matrix;
    n.ins.resize(v.in_slots());
    n.outs.resize(v.out_slots());
    nodes.emplace(v.id, std::move(n));
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    nodes[g.edges[e].from.vertex].outs[g.edges[e].from.slot] = {false, e};
    nodes[g.edges[e].to.vertex].ins[g.edges[e].to.slot] = {false, e};
  }
  for (std::size_t i = 0; i < g.dangling_in.size(); ++i)
    nodes[g.dangling_in[i].slot.vertex].ins[g.dangling_in[i].slot.slot] = {true, i};
  for (std::size_t i = 0; i < g.dangling_out.size(); ++i)
    nodes[g.dangling_out[i].slot.vertex].outs[g.dangling_out[i].slot.slot] = {true, i};

  if (order) {
    for (const auto& [first, second] : *order) {
      auto a = nodes.find(first), b = nodes.find(second);
      if (first == second || a == nodes.end() || b == nodes.end()) {
        throw InvalidInput("contract: order pair (" + std::to_string(first) + ", " +
                           std::to_string(second) + ") does not name two live nodes");
      }
      detail::Node merged = detail::merge(a->second, b->second, d);
      nodes.erase(b);
      nodes[first] = std::move(merged);
    }
  }
  while (nodes.size() > 1) {
    auto a = nodes.begin();
    auto b = std::next(a);
    detail::Node merged = detail::merge(a->second, b->second, d);
    nodes.erase(b);
    a->second = std::move(merged);
  }

  const detail::Node& last = nodes.begin()->second;
  const std::size_t n = g.dangling_in.size();
  std::vector<std::size_t> row_of(n), col_of(n);
  for (std::size_t i = 0; i < last.outs.size(); ++i) row_of[last.outs[i].index] = i;
  for (std::size_t i = 0; i < last.ins.size(); ++i) col_of[last.ins[i].index] = i;
  return ScatteringMatrix(gather(last.matrix, slot_entries(row_of, d), slot_entries(col_of, d)),
                          PortSpec{n, n, 0, 0, d}, Check::none);
}

}  // namespace qgraph
