#pragma once

// Reduction of strand diagrams by the two local moves
//   A: a split whose n outputs feed one merge, in port order  -> one strand
//   B: a merge whose output feeds a split                     -> n strands
// The rewrite system is terminating and confluent, so any order of moves
// reaches the same reduced diagram.

#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "thompson/diagram.hpp"

namespace thompson {

enum class Move : std::uint8_t { A, B };

/// `upper` is the vertex nearer the sources: the split for A, the merge for B.
struct Redex {
  Move move;
  int upper;
  int lower;
};

/// Mutable copy of a diagram that supports in-place moves.
class RewriteGraph {
 public:
  explicit RewriteGraph(const StrandDiagram& d)
      : arity_(d.arity()), sources_(d.sources()), sinks_(d.sinks()), kinds_(d.vertices()), edges_(d.edges()) {
    alive_.assign(kinds_.size(), true);
    edge_alive_.assign(edges_.size(), true);
    in_.resize(kinds_.size());
    out_.resize(kinds_.size());
    for (int v = 0; v < d.vertex_count(); ++v) {
      for (int p = 0; p < d.input_count(v); ++p) in_[static_cast<size_t>(v)].push_back(d.in_edge(v, p));
      for (int p = 0; p < d.output_count(v); ++p) out_[static_cast<size_t>(v)].push_back(d.out_edge(v, p));
    }
    sink_edge_.resize(static_cast<size_t>(sinks_));
    for (int j = 0; j < sinks_; ++j) sink_edge_[static_cast<size_t>(j)] = d.sink_edge(j);
  }

  int vertex_slots() const { return static_cast<int>(kinds_.size()); }
  bool alive(int v) const { return alive_[static_cast<size_t>(v)]; }

  std::optional<Redex> redex_at(int v) const {
    if (!alive(v)) return std::nullopt;
    const auto& outs = out_[static_cast<size_t>(v)];
    const int n = arity_.value();
    if (kinds_[static_cast<size_t>(v)] == VertexKind::split) {
      const Endpoint h0 = edges_[static_cast<size_t>(outs[0])].head;
      if (h0.node == kBoundary || kinds_[static_cast<size_t>(h0.node)] != VertexKind::merge) return std::nullopt;
      for (int k = 0; k < n; ++k) {
        const Endpoint h = edges_[static_cast<size_t>(outs[static_cast<size_t>(k)])].head;
        if (h.node != h0.node || h.port != k) return std::nullopt;
      }
      return Redex{Move::A, v, h0.node};
    }
    const Endpoint h = edges_[static_cast<size_t>(outs[0])].head;
    if (h.node == kBoundary || kinds_[static_cast<size_t>(h.node)] != VertexKind::split) return std::nullopt;
    return Redex{Move::B, v, h.node};
  }

  std::optional<Redex> first_redex(Move move) const {
    for (int v = 0; v < vertex_slots(); ++v)
      if (auto r = redex_at(v); r && r->move == move) return r;
    return std::nullopt;
  }

  std::vector<Redex> all_redexes() const {
    std::vector<Redex> out;
    for (int v = 0; v < vertex_slots(); ++v)
      if (auto r = redex_at(v)) out.push_back(*r);
    return out;
  }

  void apply(const Redex& r) {
    const auto upper = static_cast<size_t>(r.upper);
    const auto lower = static_cast<size_t>(r.lower);
    if (r.move == Move::A) {
      const int a = in_[upper][0];
      const int b = out_[lower][0];
      redirect_head(a, edges_[static_cast<size_t>(b)].head);
      for (int e : out_[upper]) kill_edge(e);
      kill_edge(b);
    } else {
      const int middle = out_[upper][0];
      for (size_t k = 0; k < in_[upper].size(); ++k) {
        const int a = in_[upper][k];
        const int b = out_[lower][k];
        redirect_head(a, edges_[static_cast<size_t>(b)].head);
        kill_edge(b);
      }
      kill_edge(middle);
    }
    alive_[upper] = false;
    alive_[lower] = false;
  }

  StrandDiagram to_diagram() const {
    std::vector<int> index(kinds_.size(), -1);
    std::vector<VertexKind> kinds;
    for (size_t v = 0; v < kinds_.size(); ++v)
      if (alive_[v]) {
        index[v] = static_cast<int>(kinds.size());
        kinds.push_back(kinds_[v]);
      }
    auto map = [&](Endpoint p) {
      if (p.node != kBoundary) p.node = index[static_cast<size_t>(p.node)];
      return p;
    };
    std::vector<Edge> edges;
    for (size_t e = 0; e < edges_.size(); ++e)
      if (edge_alive_[e]) edges.push_back({map(edges_[e].tail), map(edges_[e].head)});
    return StrandDiagram(arity_, sources_, sinks_, std::move(kinds), std::move(edges));
  }

 private:
  void redirect_head(int e, Endpoint head) {
    edges_[static_cast<size_t>(e)].head = head;
    if (head.node == kBoundary) sink_edge_[static_cast<size_t>(head.port)] = e;
    else in_[static_cast<size_t>(head.node)][static_cast<size_t>(head.port)] = e;
  }
  void kill_edge(int e) { edge_alive_[static_cast<size_t>(e)] = false; }

  Arity arity_;
  int sources_;
  int sinks_;
  std::vector<VertexKind> kinds_;
  std::vector<Edge> edges_;
  std::vector<bool> alive_;
  std::vector<bool> edge_alive_;
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> out_;
  std::vector<int> sink_edge_;
};

inline bool is_reduced(const StrandDiagram& d) { return RewriteGraph(d).all_redexes().empty(); }

/// Deterministic strategy: always the lowest-numbered A redex, else the
/// lowest-numbered B redex. `on_move` sees every move before it is applied.
inline StrandDiagram reduce(const StrandDiagram& d, const std::function<void(const Redex&)>& on_move = {}) {
  RewriteGraph g(d);
  for (;;) {
    std::optional<Redex> r = g.first_redex(Move::A);
    if (!r) r = g.first_redex(Move::B);
    if (!r) break;
    if (on_move) on_move(*r);
    g.apply(*r);
  }
  return g.to_diagram();
}

/// Applies uniformly random available moves until none remain.
template <class Rng>
StrandDiagram reduce_random(const StrandDiagram& d, Rng& rng) {
  RewriteGraph g(d);
  for (;;) {
    auto redexes = g.all_redexes();
    if (redexes.empty()) break;
    std::uniform_int_distribution<size_t> pick(0, redexes.size() - 1);
    g.apply(redexes[pick(rng)]);
  }
  return g.to_diagram();
}

}  // namespace thompson
