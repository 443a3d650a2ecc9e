#pragma once

// Strand diagrams: planar acyclic graphs of n-ary splits and merges between
// an ordered row of sources (top) and an ordered row of sinks (bottom).
//
// Planarity is purely combinatorial. Every vertex carries ordered port lists
// and the diagram is accepted only if a left-to-right sweep from the sources
// can absorb every vertex in order and end exactly on the sinks.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "thompson/errors.hpp"

namespace thompson {

/// Number of children of a split (equivalently parents of a merge).
class Arity {
 public:
  explicit Arity(int n) : n_(n) {
    if (n < 2) throw ArgumentError("arity must be at least 2, got " + std::to_string(n));
  }
  int value() const { return n_; }
  friend bool operator==(Arity, Arity) = default;

 private:
  int n_;
};

enum class VertexKind : std::uint8_t { split, merge };

/// Node id used in endpoints for the boundary; the port is then the source
/// index (for a tail) or the sink index (for a head).
inline constexpr int kBoundary = -1;

struct Endpoint {
  int node = kBoundary;
  int port = 0;
  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

struct Edge {
  Endpoint tail;
  Endpoint head;
  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class LayerKind : std::uint8_t { split, merge, cup, cap };

/// One elementary slice of a layered tangle acting on a row of strands.
/// split: strand p -> n strands; merge: strands p..p+n-1 -> 1; cup: inserts
/// two joined strands at p; cap: joins strands p, p+1 and removes them.
struct Layer {
  LayerKind kind;
  int position;
  friend bool operator==(const Layer&, const Layer&) = default;
};

class StrandDiagram {
 public:
  /// Validates the incidence structure and planarity, then stores the
  /// diagram in canonical labelling.
  StrandDiagram(Arity arity, int sources, int sinks, std::vector<VertexKind> vertices,
                std::vector<Edge> edges)
      : arity_(arity), sources_(sources), sinks_(sinks), kinds_(std::move(vertices)), edges_(std::move(edges)) {
    build_incidence();
    layers_ = sweep();
    canonicalize();
  }

  static StrandDiagram identity(Arity arity, int strands) {
    if (strands < 0) throw ArgumentError("negative strand count");
    std::vector<Edge> edges;
    for (int i = 0; i < strands; ++i) edges.push_back({{kBoundary, i}, {kBoundary, i}});
    return StrandDiagram(arity, strands, strands, {}, std::move(edges));
  }

  /// Builds a diagram from a sequence of split/merge layers applied to
  /// `strands` parallel strands.
  static StrandDiagram from_layers(Arity arity, int strands, std::span<const Layer> layers) {
    const int n = arity.value();
    std::vector<Endpoint> open;
    for (int i = 0; i < strands; ++i) open.push_back({kBoundary, i});
    std::vector<VertexKind> kinds;
    std::vector<Edge> edges;
    for (const Layer& layer : layers) {
      const int p = layer.position;
      const int v = static_cast<int>(kinds.size());
      if (layer.kind == LayerKind::split) {
        if (p < 0 || p >= static_cast<int>(open.size())) throw ArgumentError("split position out of range");
        kinds.push_back(VertexKind::split);
        edges.push_back({open[static_cast<size_t>(p)], {v, 0}});
        std::vector<Endpoint> outs;
        for (int k = 0; k < n; ++k) outs.push_back({v, k});
        open.erase(open.begin() + p);
        open.insert(open.begin() + p, outs.begin(), outs.end());
      } else if (layer.kind == LayerKind::merge) {
        if (p < 0 || p + n > static_cast<int>(open.size())) throw ArgumentError("merge position out of range");
        kinds.push_back(VertexKind::merge);
        for (int k = 0; k < n; ++k) edges.push_back({open[static_cast<size_t>(p + k)], {v, k}});
        open.erase(open.begin() + p, open.begin() + p + n);
        open.insert(open.begin() + p, Endpoint{v, 0});
      } else {
        throw ArgumentError("strand diagrams have no cups or caps");
      }
    }
    for (int j = 0; j < static_cast<int>(open.size()); ++j) edges.push_back({open[static_cast<size_t>(j)], {kBoundary, j}});
    return StrandDiagram(arity, strands, static_cast<int>(open.size()), std::move(kinds), std::move(edges));
  }

  Arity arity() const { return arity_; }
  int sources() const { return sources_; }
  int sinks() const { return sinks_; }
  int vertex_count() const { return static_cast<int>(kinds_.size()); }
  const std::vector<VertexKind>& vertices() const { return kinds_; }
  const std::vector<Edge>& edges() const { return edges_; }
  VertexKind kind(int v) const { return kinds_[static_cast<size_t>(v)]; }

  int input_count(int v) const { return kind(v) == VertexKind::split ? 1 : arity_.value(); }
  int output_count(int v) const { return kind(v) == VertexKind::split ? arity_.value() : 1; }
  int in_edge(int v, int port) const { return in_[static_cast<size_t>(v)][static_cast<size_t>(port)]; }
  int out_edge(int v, int port) const { return out_[static_cast<size_t>(v)][static_cast<size_t>(port)]; }
  int source_edge(int i) const { return source_edge_[static_cast<size_t>(i)]; }
  int sink_edge(int j) const { return sink_edge_[static_cast<size_t>(j)]; }
  const Edge& edge(int e) const { return edges_[static_cast<size_t>(e)]; }

  int split_count() const {
    return static_cast<int>(std::count(kinds_.begin(), kinds_.end(), VertexKind::split));
  }
  int merge_count() const { return vertex_count() - split_count(); }

  /// Leftmost-first planar layering; position indices are 0-based.
  const std::vector<Layer>& layers() const { return layers_; }

  /// Source i joined straight to sink j with no vertex in between.
  bool is_straight(int source, int sink) const {
    const Edge& e = edge(source_edge(source));
    return e.head.node == kBoundary && e.head.port == sink;
  }

  friend bool operator==(const StrandDiagram& a, const StrandDiagram& b) {
    return a.arity_ == b.arity_ && a.sources_ == b.sources_ && a.sinks_ == b.sinks_ && a.kinds_ == b.kinds_ &&
           a.edges_ == b.edges_;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["arity"] = arity_.value();
    j["sources"] = sources_;
    j["sinks"] = sinks_;
    j["vertices"] = nlohmann::json::array();
    for (int v = 0; v < vertex_count(); ++v)
      j["vertices"].push_back({{"id", v}, {"kind", kind(v) == VertexKind::split ? "split" : "merge"}});
    j["edges"] = nlohmann::json::array();
    for (const Edge& e : edges_) j["edges"].push_back({e.tail.node, e.tail.port, e.head.node, e.head.port});
    return j;
  }

  /// Canonical serialisation; equal group(oid) elements give equal strings.
  std::string encode() const { return to_json().dump(); }

  static StrandDiagram from_json(const nlohmann::json& j) {
    try {
      Arity n(j.at("arity").get<int>());
      int h = j.at("sources").get<int>();
      int k = j.at("sinks").get<int>();
      const auto& verts = j.at("vertices");
      std::vector<VertexKind> kinds(verts.size(), VertexKind::split);
      std::vector<int> id_to_index;
      std::vector<std::pair<int, size_t>> ids;
      for (size_t i = 0; i < verts.size(); ++i) {
        std::string kind = verts[i].at("kind").get<std::string>();
        if (kind == "split") kinds[i] = VertexKind::split;
        else if (kind == "merge") kinds[i] = VertexKind::merge;
        else throw ArgumentError("unknown vertex kind '" + kind + "'");
        ids.emplace_back(verts[i].at("id").get<int>(), i);
      }
      auto index_of = [&](int id) -> int {
        if (id == kBoundary) return kBoundary;
        for (const auto& [vid, idx] : ids)
          if (vid == id) return static_cast<int>(idx);
        throw ArgumentError("edge refers to unknown vertex id " + std::to_string(id));
      };
      std::vector<Edge> edges;
      for (const auto& e : j.at("edges")) {
        if (e.size() != 4) throw ArgumentError("edge must be [from, fromPort, to, toPort]");
        edges.push_back({{index_of(e[0].get<int>()), e[1].get<int>()}, {index_of(e[2].get<int>()), e[3].get<int>()}});
      }
      return StrandDiagram(n, h, k, std::move(kinds), std::move(edges));
    } catch (const nlohmann::json::exception& ex) {
      throw ArgumentError(std::string("malformed diagram JSON: ") + ex.what());
    }
  }

 private:
  void build_incidence() {
    const int n = arity_.value();
    if (sources_ < 0 || sinks_ < 0) throw ArgumentError("negative boundary size");
    in_.assign(kinds_.size(), {});
    out_.assign(kinds_.size(), {});
    for (size_t v = 0; v < kinds_.size(); ++v) {
      in_[v].assign(static_cast<size_t>(kinds_[v] == VertexKind::split ? 1 : n), -1);
      out_[v].assign(static_cast<size_t>(kinds_[v] == VertexKind::split ? n : 1), -1);
    }
    source_edge_.assign(static_cast<size_t>(sources_), -1);
    sink_edge_.assign(static_cast<size_t>(sinks_), -1);
    auto claim = [](std::vector<int>& slots, int port, int e, const char* what) {
      if (port < 0 || port >= static_cast<int>(slots.size()))
        throw ArgumentError(std::string("port out of range at ") + what);
      if (slots[static_cast<size_t>(port)] != -1) throw ArgumentError(std::string("port used twice at ") + what);
      slots[static_cast<size_t>(port)] = e;
    };
    for (size_t e = 0; e < edges_.size(); ++e) {
      const Edge& ed = edges_[e];
      const int id = static_cast<int>(e);
      if (ed.tail.node == kBoundary) claim(source_edge_, ed.tail.port, id, "source");
      else if (ed.tail.node >= 0 && ed.tail.node < static_cast<int>(kinds_.size()))
        claim(out_[static_cast<size_t>(ed.tail.node)], ed.tail.port, id, "vertex output");
      else throw ArgumentError("edge tail refers to a missing vertex");
      if (ed.head.node == kBoundary) claim(sink_edge_, ed.head.port, id, "sink");
      else if (ed.head.node >= 0 && ed.head.node < static_cast<int>(kinds_.size()))
        claim(in_[static_cast<size_t>(ed.head.node)], ed.head.port, id, "vertex input");
      else throw ArgumentError("edge head refers to a missing vertex");
    }
    auto full = [](const std::vector<int>& slots) {
      return std::find(slots.begin(), slots.end(), -1) == slots.end();
    };
    if (!full(source_edge_) || !full(sink_edge_)) throw ArgumentError("unattached source or sink");
    for (size_t v = 0; v < kinds_.size(); ++v)
      if (!full(in_[v]) || !full(out_[v])) throw ArgumentError("vertex with unattached port");
  }

  // Ready merges go first, then the shallowest split, which keeps the
  // frontier narrow on long products.
  std::vector<Layer> sweep() const {
    const int n = arity_.value();
    std::vector<int> depth(kinds_.size(), -1);
    auto depth_of = [&](auto&& self, size_t v) -> int {
      if (depth[v] >= 0) return depth[v];
      depth[v] = 0;
      int d = 0;
      for (int e : in_[v]) {
        const Endpoint tail = edges_[static_cast<size_t>(e)].tail;
        if (tail.node != kBoundary) d = std::max(d, self(self, static_cast<size_t>(tail.node)) + 1);
      }
      return depth[v] = d;
    };
    std::vector<int> frontier = source_edge_;
    std::vector<Layer> layers;
    for (size_t done = 0; done < kinds_.size(); ++done) {
      long merge_at = -1, split_at = -1;
      int best = 0;
      for (size_t p = 0; p < frontier.size() && merge_at < 0; ++p) {
        const Endpoint head = edges_[static_cast<size_t>(frontier[p])].head;
        if (head.node == kBoundary) continue;
        const auto v = static_cast<size_t>(head.node);
        if (kinds_[v] == VertexKind::split) {
          const int d = depth_of(depth_of, v);
          if (split_at < 0 || d < best) split_at = static_cast<long>(p), best = d;
        } else if (head.port == 0 && p + static_cast<size_t>(n) <= frontier.size() &&
                   std::equal(in_[v].begin(), in_[v].end(), frontier.begin() + static_cast<long>(p))) {
          merge_at = static_cast<long>(p);
        }
      }
      if (merge_at >= 0) {
        const auto v = static_cast<size_t>(edges_[static_cast<size_t>(frontier[static_cast<size_t>(merge_at)])].head.node);
        layers.push_back({LayerKind::merge, static_cast<int>(merge_at)});
        frontier.erase(frontier.begin() + merge_at, frontier.begin() + merge_at + n);
        frontier.insert(frontier.begin() + merge_at, out_[v][0]);
      } else if (split_at >= 0) {
        const auto v = static_cast<size_t>(edges_[static_cast<size_t>(frontier[static_cast<size_t>(split_at)])].head.node);
        layers.push_back({LayerKind::split, static_cast<int>(split_at)});
        frontier.erase(frontier.begin() + split_at);
        frontier.insert(frontier.begin() + split_at, out_[v].begin(), out_[v].end());
      } else {
        throw ArgumentError("diagram is cyclic or its port orders are not planar");
      }
    }
    if (frontier != sink_edge_) throw ArgumentError("port orders are not planar: sinks reached out of order");
    return layers;
  }

  // Relabels vertices in depth-first discovery order from source 0, visiting
  // inputs before outputs in port order; edges are then sorted by tail.
  void canonicalize() {
    const size_t vcount = kinds_.size();
    std::vector<int> new_id(vcount, -1);
    int next = 0;
    std::vector<std::pair<int, int>> stack;  // (vertex, next incident slot)
    auto incident = [&](int v, int slot) -> int {
      const auto& ins = in_[static_cast<size_t>(v)];
      if (slot < static_cast<int>(ins.size())) return ins[static_cast<size_t>(slot)];
      return out_[static_cast<size_t>(v)][static_cast<size_t>(slot) - ins.size()];
    };
    auto visit = [&](int v) {
      if (v == kBoundary || new_id[static_cast<size_t>(v)] != -1) return;
      new_id[static_cast<size_t>(v)] = next++;
      stack.emplace_back(v, 0);
      while (!stack.empty()) {
        auto& [u, slot] = stack.back();
        const int total = static_cast<int>(in_[static_cast<size_t>(u)].size() + out_[static_cast<size_t>(u)].size());
        if (slot == total) {
          stack.pop_back();
          continue;
        }
        const Edge& e = edges_[static_cast<size_t>(incident(u, slot++))];
        const int other = e.tail.node == u ? e.head.node : e.tail.node;
        if (other != kBoundary && new_id[static_cast<size_t>(other)] == -1) {
          new_id[static_cast<size_t>(other)] = next++;
          stack.emplace_back(other, 0);
        }
      }
    };
    for (int i = 0; i < sources_; ++i) {
      const Edge& e = edges_[static_cast<size_t>(source_edge_[static_cast<size_t>(i)])];
      visit(e.head.node);
    }
    if (next != static_cast<int>(vcount)) throw ArgumentError("diagram has a component without sources");
    std::vector<VertexKind> kinds(vcount);
    for (size_t v = 0; v < vcount; ++v) kinds[static_cast<size_t>(new_id[v])] = kinds_[v];
    auto remap = [&](Endpoint p) {
      if (p.node != kBoundary) p.node = new_id[static_cast<size_t>(p.node)];
      return p;
    };
    for (Edge& e : edges_) {
      e.tail = remap(e.tail);
      e.head = remap(e.head);
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) { return a.tail < b.tail; });
    kinds_ = std::move(kinds);
    build_incidence();
  }

  Arity arity_;
  int sources_;
  int sinks_;
  std::vector<VertexKind> kinds_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> out_;
  std::vector<int> source_edge_;
  std::vector<int> sink_edge_;
  std::vector<Layer> layers_;
};

/// The (m, m+n-1) forest with a single split on strand i (1-based).
inline StrandDiagram forest_generator(int i, int m, Arity arity) {
  if (m < 1 || i < 1 || i > m)
    throw ArgumentError("forest generator f_" + std::to_string(i) + " needs 1 <= i <= m = " + std::to_string(m));
  const Layer layer{LayerKind::split, i - 1};
  return StrandDiagram::from_layers(arity, m, std::span<const Layer>(&layer, 1));
}

/// Glues the sinks of `top` to the sources of `bottom`. No reduction.
inline StrandDiagram compose(const StrandDiagram& top, const StrandDiagram& bottom) {
  if (!(top.arity() == bottom.arity())) throw CompositionError("arity mismatch in compose");
  if (top.sinks() != bottom.sources())
    throw CompositionError("cannot glue " + std::to_string(top.sinks()) + " sinks onto " +
                           std::to_string(bottom.sources()) + " sources");
  const int offset = top.vertex_count();
  std::vector<VertexKind> kinds = top.vertices();
  kinds.insert(kinds.end(), bottom.vertices().begin(), bottom.vertices().end());
  std::vector<Edge> edges;
  for (const Edge& e : top.edges())
    if (e.head.node != kBoundary) edges.push_back(e);
  auto shift = [&](Endpoint p) {
    if (p.node != kBoundary) p.node += offset;
    return p;
  };
  for (const Edge& e : bottom.edges())
    if (e.tail.node != kBoundary) edges.push_back({shift(e.tail), shift(e.head)});
  for (int j = 0; j < top.sinks(); ++j) {
    const Edge& up = top.edge(top.sink_edge(j));
    const Edge& down = bottom.edge(bottom.source_edge(j));
    edges.push_back({up.tail, shift(down.head)});
  }
  return StrandDiagram(top.arity(), top.sources(), bottom.sinks(), std::move(kinds), std::move(edges));
}

/// Reflection in a horizontal line: sources and sinks swap, splits and merges
/// swap, left-right order is kept.
inline StrandDiagram invert(const StrandDiagram& d) {
  std::vector<VertexKind> kinds = d.vertices();
  for (auto& k : kinds) k = k == VertexKind::split ? VertexKind::merge : VertexKind::split;
  std::vector<Edge> edges;
  edges.reserve(d.edges().size());
  for (const Edge& e : d.edges()) edges.push_back({e.head, e.tail});
  return StrandDiagram(d.arity(), d.sinks(), d.sources(), std::move(kinds), std::move(edges));
}

/// Concatenates `d` with itself `times` times (times >= 0; 0 gives identity).
inline StrandDiagram power_concat(const StrandDiagram& d, int times) {
  if (d.sources() != d.sinks()) throw CompositionError("power of a non-square diagram");
  StrandDiagram acc = StrandDiagram::identity(d.arity(), d.sources());
  for (int i = 0; i < times; ++i) acc = compose(acc, d);
  return acc;
}

/// Where a boundary vertex was cut off, and what it was.
struct DetachedVertex {
  StrandDiagram rest;
  VertexKind kind;
  int position;  // 0-based strand index of the elementary piece
};

namespace detail {

inline StrandDiagram remove_vertex(const StrandDiagram& d, int victim, int new_sources, int new_sinks,
                                   const std::vector<int>& source_map, const std::vector<int>& sink_map,
                                   const std::vector<Edge>& extra) {
  std::vector<VertexKind> kinds;
  std::vector<int> index(static_cast<size_t>(d.vertex_count()), -1);
  for (int v = 0; v < d.vertex_count(); ++v) {
    if (v == victim) continue;
    index[static_cast<size_t>(v)] = static_cast<int>(kinds.size());
    kinds.push_back(d.kind(v));
  }
  auto map = [&](Endpoint p, bool is_tail) {
    if (p.node == kBoundary) p.port = is_tail ? source_map[static_cast<size_t>(p.port)] : sink_map[static_cast<size_t>(p.port)];
    else p.node = index[static_cast<size_t>(p.node)];
    return p;
  };
  std::vector<Edge> edges;
  for (const Edge& e : d.edges()) {
    if (e.tail.node == victim || e.head.node == victim) continue;
    edges.push_back({map(e.tail, true), map(e.head, false)});
  }
  for (Edge e : extra) {
    if (e.tail.node != kBoundary) e.tail.node = index[static_cast<size_t>(e.tail.node)];
    if (e.head.node != kBoundary) e.head.node = index[static_cast<size_t>(e.head.node)];
    edges.push_back(e);
  }
  return StrandDiagram(d.arity(), new_sources, new_sinks, std::move(kinds), std::move(edges));
}

inline std::vector<int> shifted_ports(int count, int from, int delta) {
  std::vector<int> m(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) m[static_cast<size_t>(i)] = i < from ? i : i + delta;
  return m;
}

}  // namespace detail

/// If vertex v touches the bottom boundary with all of its outputs (consecutive
/// sinks), returns `rest` with d == compose(rest, piece at position).
inline std::optional<DetachedVertex> detach_bottom(const StrandDiagram& d, int v) {
  const int n = d.arity().value();
  const int outs = d.output_count(v);
  const Edge& first = d.edge(d.out_edge(v, 0));
  if (first.head.node != kBoundary) return std::nullopt;
  const int j = first.head.port;
  for (int k = 0; k < outs; ++k) {
    const Edge& e = d.edge(d.out_edge(v, k));
    if (e.head.node != kBoundary || e.head.port != j + k) return std::nullopt;
  }
  const int ins = d.input_count(v);
  const int new_sinks = d.sinks() - outs + ins;
  std::vector<int> source_map = detail::shifted_ports(d.sources(), d.sources(), 0);
  std::vector<int> sink_map(static_cast<size_t>(d.sinks()), -1);
  for (int s = 0; s < d.sinks(); ++s)
    if (s < j) sink_map[static_cast<size_t>(s)] = s;
    else if (s >= j + outs) sink_map[static_cast<size_t>(s)] = s - outs + ins;
  std::vector<Edge> extra;
  for (int k = 0; k < ins; ++k) {
    const Edge& e = d.edge(d.in_edge(v, k));
    Endpoint tail = e.tail;
    if (tail.node == kBoundary) tail.port = source_map[static_cast<size_t>(tail.port)];
    extra.push_back({tail, {kBoundary, j + k}});
  }
  // straight edges from a source directly into v are handled through `extra`
  StrandDiagram rest = detail::remove_vertex(d, v, d.sources(), new_sinks, source_map, sink_map, extra);
  (void)n;
  return DetachedVertex{std::move(rest), d.kind(v), j};
}

/// Mirror of detach_bottom: v reads all its inputs from consecutive sources and
/// d == compose(piece at position, rest).
inline std::optional<DetachedVertex> detach_top(const StrandDiagram& d, int v) {
  const int ins = d.input_count(v);
  const Edge& first = d.edge(d.in_edge(v, 0));
  if (first.tail.node != kBoundary) return std::nullopt;
  const int i = first.tail.port;
  for (int k = 0; k < ins; ++k) {
    const Edge& e = d.edge(d.in_edge(v, k));
    if (e.tail.node != kBoundary || e.tail.port != i + k) return std::nullopt;
  }
  const int outs = d.output_count(v);
  const int new_sources = d.sources() - ins + outs;
  std::vector<int> source_map(static_cast<size_t>(d.sources()), -1);
  for (int s = 0; s < d.sources(); ++s)
    if (s < i) source_map[static_cast<size_t>(s)] = s;
    else if (s >= i + ins) source_map[static_cast<size_t>(s)] = s - ins + outs;
  std::vector<int> sink_map = detail::shifted_ports(d.sinks(), d.sinks(), 0);
  std::vector<Edge> extra;
  for (int k = 0; k < outs; ++k) {
    const Edge& e = d.edge(d.out_edge(v, k));
    Endpoint head = e.head;
    if (head.node == kBoundary) head.port = sink_map[static_cast<size_t>(head.port)];
    extra.push_back({{kBoundary, i + k}, head});
  }
  StrandDiagram rest = detail::remove_vertex(d, v, new_sources, d.sinks(), source_map, sink_map, extra);
  return DetachedVertex{std::move(rest), d.kind(v), i};
}

/// The single-vertex diagram (split or merge) sitting at `position` among
/// `strands` input strands.
inline StrandDiagram elementary(Arity arity, VertexKind kind, int position, int strands) {
  const Layer layer{kind == VertexKind::split ? LayerKind::split : LayerKind::merge, position};
  return StrandDiagram::from_layers(arity, strands, std::span<const Layer>(&layer, 1));
}

}  // namespace thompson
