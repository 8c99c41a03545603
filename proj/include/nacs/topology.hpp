#pragma once

// AP layout, the geometric overlap relation, and the three AP graphs
// (learned neighbor graph, overlap graph, non-overlap neighbor graph).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nacs {

using ApId = std::string;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct Rect {
  double width = 0.0;
  double height = 0.0;

  bool contains(const Point& p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= width && p.y <= height;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct AccessPoint {
  ApId id;
  Point position;
  double radius = 0.0;  // meters

  bool covers(const Point& p) const { return distance(position, p) <= radius; }
  friend bool operator==(const AccessPoint&, const AccessPoint&) = default;
};

/// A validated set of access points inside a rectangular world whose lower
/// left corner is the origin.
class Topology {
 public:
  Topology(std::vector<AccessPoint> aps, Rect world) : aps_(std::move(aps)), world_(world) {
    if (aps_.empty()) throw std::invalid_argument("topology needs at least one access point");
    if (!(world_.width > 0.0) || !(world_.height > 0.0))
      throw std::invalid_argument("world bounds must have positive width and height");
    std::set<ApId> seen;
    for (const auto& ap : aps_) {
      if (ap.id.empty()) throw std::invalid_argument("access point id must not be empty");
      if (!seen.insert(ap.id).second) throw std::invalid_argument("duplicate access point id '" + ap.id + "'");
      if (!(ap.radius > 0.0)) throw std::invalid_argument("access point '" + ap.id + "' radius must be > 0");
      if (!world_.contains(ap.position))
        throw std::invalid_argument("access point '" + ap.id + "' lies outside the world bounds");
    }
  }

  const std::vector<AccessPoint>& aps() const { return aps_; }
  const Rect& world() const { return world_; }
  std::size_t size() const { return aps_.size(); }

  const AccessPoint* find(const ApId& id) const {
    auto it = std::find_if(aps_.begin(), aps_.end(), [&](const AccessPoint& ap) { return ap.id == id; });
    return it == aps_.end() ? nullptr : &*it;
  }
  bool contains(const ApId& id) const { return find(id) != nullptr; }

  std::set<ApId> ids() const {
    std::set<ApId> out;
    for (const auto& ap : aps_) out.insert(ap.id);
    return out;
  }

  friend bool operator==(const Topology&, const Topology&) = default;

 private:
  std::vector<AccessPoint> aps_;
  Rect world_;
};

/// Strict disk intersection. Tangent circles do not overlap: a mobile node
/// must be able to sit strictly inside both ranges.
inline bool overlaps(const AccessPoint& a, const AccessPoint& b) {
  if (a.id == b.id) throw std::invalid_argument("overlaps: identical access point ids '" + a.id + "'");
  return distance(a.position, b.position) < a.radius + b.radius;
}

enum class GraphKind { neighbor, overlap, non_overlap };

inline const char* to_string(GraphKind k) {
  switch (k) {
    case GraphKind::neighbor: return "neighbor";
    case GraphKind::overlap: return "overlap";
    case GraphKind::non_overlap: return "non_overlap";
  }
  return "?";
}

using Edge = std::pair<ApId, ApId>;

inline Edge make_edge(const ApId& a, const ApId& b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Undirected simple graph over AP ids.
class ApGraph {
 public:
  ApGraph() = default;
  ApGraph(GraphKind kind, std::set<ApId> vertices) : kind_(kind) {
    for (auto& v : vertices) adjacency_.emplace(v, std::set<ApId>{});
  }

  GraphKind kind() const { return kind_; }

  std::set<ApId> vertices() const {
    std::set<ApId> out;
    for (const auto& [v, _] : adjacency_) out.insert(v);
    return out;
  }
  bool has_vertex(const ApId& v) const { return adjacency_.count(v) != 0; }
  std::size_t vertex_count() const { return adjacency_.size(); }

  /// Returns true when the edge was not present before.
  bool add_edge(const ApId& a, const ApId& b) {
    if (a == b) throw std::invalid_argument("ApGraph: self-loop on '" + a + "'");
    auto ia = adjacency_.find(a);
    auto ib = adjacency_.find(b);
    if (ia == adjacency_.end() || ib == adjacency_.end())
      throw std::invalid_argument("ApGraph: edge (" + a + "," + b + ") references an unknown vertex");
    bool inserted = ia->second.insert(b).second;
    ib->second.insert(a);
    if (inserted) ++edge_count_;
    return inserted;
  }

  bool has_edge(const ApId& a, const ApId& b) const {
    auto it = adjacency_.find(a);
    return it != adjacency_.end() && it->second.count(b) != 0;
  }

  const std::set<ApId>& neighbors(const ApId& v) const {
    auto it = adjacency_.find(v);
    if (it == adjacency_.end()) throw std::invalid_argument("ApGraph: unknown vertex '" + v + "'");
    return it->second;
  }

  std::size_t degree(const ApId& v) const { return neighbors(v).size(); }
  std::size_t edge_count() const { return edge_count_; }

  /// Sorted (a < b) unordered edges.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (const auto& [v, adj] : adjacency_)
      for (const auto& w : adj)
        if (v < w) out.emplace_back(v, w);
    return out;
  }

  friend bool operator==(const ApGraph& a, const ApGraph& b) {
    return a.kind_ == b.kind_ && a.adjacency_ == b.adjacency_;
  }

 private:
  GraphKind kind_ = GraphKind::neighbor;
  std::map<ApId, std::set<ApId>> adjacency_;
  std::size_t edge_count_ = 0;
};

inline ApGraph build_overlap_graph(const Topology& t) {
  ApGraph g(GraphKind::overlap, t.ids());
  const auto& aps = t.aps();
  for (std::size_t i = 0; i < aps.size(); ++i)
    for (std::size_t j = i + 1; j < aps.size(); ++j)
      if (overlaps(aps[i], aps[j])) g.add_edge(aps[i].id, aps[j].id);
  return g;
}

enum class NongMode {
  complement,    // every non-overlapping pair
  intersection,  // observed re-association pairs that do not overlap
  automatic,     // complement until a re-association has been observed
};

inline const char* to_string(NongMode m) {
  switch (m) {
    case NongMode::complement: return "complement";
    case NongMode::intersection: return "intersection";
    case NongMode::automatic: return "auto";
  }
  return "?";
}

/// Without a neighbor graph the result is the complement of `overlap`; with
/// one it is the set of neighbor edges that are not overlap edges.
inline ApGraph build_nong(const ApGraph& overlap, const ApGraph* neighbor = nullptr) {
  if (overlap.kind() != GraphKind::overlap) throw std::invalid_argument("build_nong: first argument must be an overlap graph");
  auto vertices = overlap.vertices();
  ApGraph nong(GraphKind::non_overlap, vertices);
  if (neighbor == nullptr) {
    for (auto i = vertices.begin(); i != vertices.end(); ++i)
      for (auto j = std::next(i); j != vertices.end(); ++j)
        if (!overlap.has_edge(*i, *j)) nong.add_edge(*i, *j);
    return nong;
  }
  if (neighbor->kind() != GraphKind::neighbor) throw std::invalid_argument("build_nong: second argument must be a neighbor graph");
  if (neighbor->vertices() != vertices) throw std::invalid_argument("build_nong: vertex sets of overlap and neighbor graphs differ");
  for (const auto& [a, b] : neighbor->edges())
    if (!overlap.has_edge(a, b)) nong.add_edge(a, b);
  return nong;
}

struct Reassociation {
  ApId from;
  ApId to;
};

inline ApGraph learn_neighbor_graph(const std::set<ApId>& vertices, const std::vector<Reassociation>& log) {
  ApGraph g(GraphKind::neighbor, vertices);
  for (const auto& r : log) {
    if (!g.has_vertex(r.from) || !g.has_vertex(r.to))
      throw std::invalid_argument("learn_neighbor_graph: unknown access point in (" + r.from + "," + r.to + ")");
    if (r.from != r.to) g.add_edge(r.from, r.to);
  }
  return g;
}

/// One `a b` line per edge, sorted, LF terminated.
inline void write_edge_list(std::ostream& os, const ApGraph& g) {
  for (const auto& [a, b] : g.edges()) os << a << ' ' << b << '\n';
}

}  // namespace nacs
