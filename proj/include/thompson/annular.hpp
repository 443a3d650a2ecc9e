#pragma once

// Annular closures of (k,k) diagrams, annular reduction with the conjugator
// that lifts it back to the groupoid, cycle classification and the
// essential decomposition g = S E S^-1.
//
// An annular diagram is stored as a body c cut open along a ray: sink i of c
// is glued to source i. Reductions that cross the cut are performed by
// rotating a boundary vertex of c to the other side, which replaces c by a
// conjugate. The running conjugator Y always satisfies [orig] = [Y c Y^-1].

#include <numeric>
#include <string>
#include <vector>

#include "thompson/diagram.hpp"
#include "thompson/element.hpp"
#include "thompson/reduce.hpp"

namespace thompson {

class AnnularDiagram {
 public:
  explicit AnnularDiagram(StrandDiagram body) : body_(std::move(body)) {
    if (body_.sources() != body_.sinks())
      throw ArgumentError("only (k,k) diagrams close up: got (" + std::to_string(body_.sources()) + "," +
                          std::to_string(body_.sinks()) + ")");
  }

  const StrandDiagram& body() const { return body_; }
  int strands() const { return body_.sources(); }
  Arity arity() const { return body_.arity(); }

  nlohmann::json to_json() const {
    nlohmann::json j = body_.to_json();
    j["cutMatching"] = nlohmann::json::array();
    for (int i = 0; i < strands(); ++i) j["cutMatching"].push_back({i, i});
    j["windings"] = nlohmann::json::array();
    for (const Edge& e : body_.edges()) j["windings"].push_back(e.head.node == kBoundary ? 1 : 0);
    return j;
  }

  friend bool operator==(const AnnularDiagram&, const AnnularDiagram&) = default;

 private:
  StrandDiagram body_;
};

inline AnnularDiagram close(const StrandDiagram& d) { return AnnularDiagram(d); }

/// Where an edge of the closure leads once straight passages through the cut
/// are followed. node == kBoundary marks a free loop.
struct ChainEnd {
  int node;
  int port;
  int winding;
};

inline ChainEnd follow_chain(const StrandDiagram& c, int edge) {
  int winding = 0;
  for (int steps = 0; steps <= c.sinks() + 1; ++steps) {
    const Endpoint head = c.edge(edge).head;
    if (head.node != kBoundary) return {head.node, head.port, winding};
    ++winding;
    edge = c.source_edge(head.port);
  }
  return {kBoundary, -1, winding};
}

/// A split whose outputs meet one merge in port order with a common winding.
inline std::optional<ChainEnd> closure_redex_A(const StrandDiagram& c, int v) {
  if (c.kind(v) != VertexKind::split) return std::nullopt;
  const ChainEnd first = follow_chain(c, c.out_edge(v, 0));
  if (first.node == kBoundary || c.kind(first.node) != VertexKind::merge || first.port != 0) return std::nullopt;
  for (int k = 1; k < c.output_count(v); ++k) {
    const ChainEnd end = follow_chain(c, c.out_edge(v, k));
    if (end.node != first.node || end.port != k || end.winding != first.winding) return std::nullopt;
  }
  return first;
}

/// A merge whose output chain runs into a split.
inline std::optional<ChainEnd> closure_redex_B(const StrandDiagram& c, int v) {
  if (c.kind(v) != VertexKind::merge) return std::nullopt;
  const ChainEnd end = follow_chain(c, c.out_edge(v, 0));
  if (end.node == kBoundary || c.kind(end.node) != VertexKind::split) return std::nullopt;
  return end;
}

/// Positions i with source i joined straight to sink i.
inline std::vector<int> free_loop_strands(const StrandDiagram& c) {
  std::vector<int> loops;
  for (int i = 0; i < c.sources(); ++i)
    if (c.is_straight(i, i)) loops.push_back(i);
  return loops;
}

enum class AnnularMove : std::uint8_t { interior_A, interior_B, rotate_split, rotate_merge, merge_loops };

/// One step of annular reduction. `conjugator` is the (k, k') diagram y with
/// [c] = [y c' y^-1]; it is an identity for interior moves.
struct AnnularStep {
  AnnularMove move;
  int position;
  StrandDiagram conjugator;
};

struct AnnularReduction {
  AnnularDiagram reduced;
  std::vector<AnnularStep> trace;
  StrandDiagram conjugator;  // product of the step conjugators, unreduced
};

inline AnnularReduction reduce_annular(const AnnularDiagram& a) {
  const Arity arity = a.arity();
  const int n = arity.value();
  StrandDiagram c = a.body();
  StrandDiagram y = StrandDiagram::identity(arity, c.sources());
  std::vector<AnnularStep> trace;
  int rotations = 0;
  int last_size = c.vertex_count() + c.sources();

  auto push = [&](AnnularMove move, int position, StrandDiagram piece) {
    y = compose(y, piece);
    trace.push_back({move, position, std::move(piece)});
  };
  auto rotate_bottom = [&](int v) {
    auto cut = detach_bottom(c, v);
    ensure(cut.has_value(), "annular redex crossing the cut does not end on the sinks");
    StrandDiagram piece = elementary(arity, cut->kind, cut->position, cut->rest.sinks());
    c = compose(piece, cut->rest);
    push(cut->kind == VertexKind::split ? AnnularMove::rotate_split : AnnularMove::rotate_merge, cut->position,
         invert(piece));
    ++rotations;
  };

  for (;;) {
    c = reduce(c, [&](const Redex& r) {
      trace.push_back({r.move == Move::A ? AnnularMove::interior_A : AnnularMove::interior_B, r.upper,
                       StrandDiagram::identity(arity, c.sources())});
    });
    const int size = c.vertex_count() + c.sources();
    if (size < last_size) {
      last_size = size;
      rotations = 0;
    }
    ensure(rotations <= c.sources() + 2, "annular reduction made no progress within the rotation budget");

    bool moved = false;
    for (int v = 0; v < c.vertex_count() && !moved; ++v) {
      if (auto end = closure_redex_A(c, v)) {
        ensure(end->winding > 0, "interior redex survived reduction");
        rotate_bottom(v);
        moved = true;
      }
    }
    for (int v = 0; v < c.vertex_count() && !moved; ++v) {
      if (auto end = closure_redex_B(c, v)) {
        ensure(end->winding > 0, "interior redex survived reduction");
        rotate_bottom(v);
        moved = true;
      }
    }
    if (moved) continue;

    const std::vector<int> loops = free_loop_strands(c);
    for (size_t s = 0; s + static_cast<size_t>(n) <= loops.size() && !moved; ++s) {
      if (loops[s + static_cast<size_t>(n) - 1] != loops[s] + n - 1) continue;
      const int i = loops[s];
      const StrandDiagram split = elementary(arity, VertexKind::split, i, c.sources() - n + 1);
      c = reduce(compose(compose(split, c), invert(split)));
      push(AnnularMove::merge_loops, i, invert(split));
      moved = true;
    }
    if (!moved) break;
  }
  return {AnnularDiagram(std::move(c)), std::move(trace), std::move(y)};
}

enum class CycleKind : std::uint8_t { free, split, merge };

inline const char* to_string(CycleKind k) {
  switch (k) {
    case CycleKind::free: return "free";
    case CycleKind::split: return "split";
    case CycleKind::merge: return "merge";
  }
  return "?";
}

struct DirectedCycle {
  CycleKind kind;
  std::vector<int> vertices;  // empty for a free loop
  int strand;                 // body strand of a free loop, -1 otherwise
  int winding;
};

/// Enumerates the directed cycles of a reduced annular diagram and checks
/// that each is a free, split or merge loop, that they are disjoint and that
/// every connected component carries one.
inline std::vector<DirectedCycle> classify_cycles(const AnnularDiagram& a) {
  const StrandDiagram& c = a.body();
  const int vcount = c.vertex_count();
  std::vector<std::vector<std::pair<int, int>>> succ(static_cast<size_t>(vcount));  // (vertex, winding)
  for (int v = 0; v < vcount; ++v)
    for (int k = 0; k < c.output_count(v); ++k) {
      const ChainEnd end = follow_chain(c, c.out_edge(v, k));
      ensure(end.node != kBoundary, "vertex output leads into a free loop");
      succ[static_cast<size_t>(v)].emplace_back(end.node, end.winding);
    }

  // Tarjan's strongly connected components.
  std::vector<int> index(static_cast<size_t>(vcount), -1), low(static_cast<size_t>(vcount), 0), comp(static_cast<size_t>(vcount), -1);
  std::vector<bool> on_stack(static_cast<size_t>(vcount), false);
  std::vector<int> stack;
  int counter = 0, comps = 0;
  std::vector<std::pair<int, size_t>> call;
  for (int root = 0; root < vcount; ++root) {
    if (index[static_cast<size_t>(root)] != -1) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [v, it] = call.back();
      const auto uv = static_cast<size_t>(v);
      if (it == 0 && index[uv] == -1) {
        index[uv] = low[uv] = counter++;
        stack.push_back(v);
        on_stack[uv] = true;
      }
      if (it < succ[uv].size()) {
        const int w = succ[uv][it++].first;
        const auto uw = static_cast<size_t>(w);
        if (index[uw] == -1) call.emplace_back(w, 0);
        else if (on_stack[uw]) low[uv] = std::min(low[uv], index[uw]);
        continue;
      }
      if (low[uv] == index[uv]) {
        for (int w = -1; w != v;) {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<size_t>(w)] = false;
          comp[static_cast<size_t>(w)] = comps;
        }
        ++comps;
      }
      const int done = v;
      call.pop_back();
      if (!call.empty()) {
        const auto up = static_cast<size_t>(call.back().first);
        low[up] = std::min(low[up], low[static_cast<size_t>(done)]);
      }
    }
  }

  std::vector<std::vector<int>> members(static_cast<size_t>(comps));
  for (int v = 0; v < vcount; ++v) members[static_cast<size_t>(comp[static_cast<size_t>(v)])].push_back(v);

  std::vector<DirectedCycle> cycles;
  std::vector<int> in_cycle(static_cast<size_t>(vcount), 0);
  for (const auto& group : members) {
    const int id = comp[static_cast<size_t>(group[0])];
    bool cyclic = group.size() > 1;
    for (const auto& [w, wind] : succ[static_cast<size_t>(group[0])]) cyclic = cyclic || w == group[0];
    if (!cyclic) continue;
    const VertexKind kind = c.kind(group[0]);
    int winding = 0;
    for (int v : group) {
      ensure(c.kind(v) == kind, "directed cycle mixes splits and merges");
      int inside = 0;
      for (const auto& [w, wind] : succ[static_cast<size_t>(v)])
        if (comp[static_cast<size_t>(w)] == id) {
          ++inside;
          winding += wind;
        }
      ensure(inside == 1, "directed cycles are not disjoint simple loops");
      in_cycle[static_cast<size_t>(v)] = 1;
    }
    cycles.push_back({kind == VertexKind::split ? CycleKind::split : CycleKind::merge, group, -1, winding});
  }
  for (int i : free_loop_strands(c)) cycles.push_back({CycleKind::free, {}, i, 1});

  // Components of the underlying undirected closure graph.
  std::vector<int> parent(static_cast<size_t>(vcount));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
    return x;
  };
  for (int v = 0; v < vcount; ++v)
    for (const auto& [w, wind] : succ[static_cast<size_t>(v)]) parent[static_cast<size_t>(find(v))] = find(w);
  std::vector<int> has_cycle(static_cast<size_t>(vcount), 0);
  for (int v = 0; v < vcount; ++v)
    if (in_cycle[static_cast<size_t>(v)]) has_cycle[static_cast<size_t>(find(v))] = 1;
  for (int v = 0; v < vcount; ++v)
    ensure(has_cycle[static_cast<size_t>(find(v))] == 1, "a component of the closure has no directed cycle");
  return cycles;
}

struct EssentialDecomposition {
  StrandDiagram S;  // (1, m)
  StrandDiagram E;  // (m, m), reduced, E E reduced
  int m;
};

inline EssentialDecomposition essential_decomposition(const GroupElement& g) {
  AnnularReduction r = reduce_annular(close(g.diagram()));
  StrandDiagram S = reduce(r.conjugator);
  const StrandDiagram& E = r.reduced.body();
  ensure(reduce(compose(compose(S, E), invert(S))) == g.diagram(), "conjugator does not recover the element");
  ensure(is_reduced(compose(E, E)), "essential part is not power-stable");
  return {std::move(S), E, E.sources()};
}

}  // namespace thompson
