#pragma once

// Layered tangles: the common currency of both evaluators. A tangle acts on
// a row of strands by splits, merges, cups and caps; a closed tangle starts
// and ends with no strands.

#include <span>
#include <vector>

#include "thompson/diagram.hpp"

namespace thompson {

using Tangle = std::vector<Layer>;

inline Tangle shifted(std::span<const Layer> layers, int by) {
  Tangle out(layers.begin(), layers.end());
  for (Layer& l : out) l.position += by;
  return out;
}

inline void append(Tangle& to, std::span<const Layer> layers, int by = 0) {
  for (Layer l : layers) to.push_back({l.kind, l.position + by});
}

/// Strand count after running `layers` on `strands` strands, or -1 if a
/// layer does not fit.
inline int strands_after(std::span<const Layer> layers, int strands, Arity arity) {
  const int n = arity.value();
  for (const Layer& l : layers) {
    switch (l.kind) {
      case LayerKind::split:
        if (l.position < 0 || l.position >= strands) return -1;
        strands += n - 1;
        break;
      case LayerKind::merge:
        if (l.position < 0 || l.position + n > strands) return -1;
        strands -= n - 1;
        break;
      case LayerKind::cup:
        if (l.position < 0 || l.position > strands) return -1;
        strands += 2;
        break;
      case LayerKind::cap:
        if (l.position < 0 || l.position + 2 > strands) return -1;
        strands -= 2;
        break;
    }
  }
  return strands;
}

/// The closed tangle of a (1,1) diagram: a cup whose right leg runs through
/// the diagram and is capped back onto the left leg.
inline Tangle closure_tangle(const StrandDiagram& d) {
  if (d.sources() != 1 || d.sinks() != 1) throw ArgumentError("closure needs a (1,1) diagram");
  Tangle t{{LayerKind::cup, 0}};
  append(t, d.layers(), 1);
  t.push_back({LayerKind::cap, 0});
  return t;
}

/// Closure of a concatenation top, middle^copies, bottom of (1,m),(m,m),(m,1) pieces.
inline Tangle closure_tangle(const StrandDiagram& top, const StrandDiagram& middle, long copies,
                             const StrandDiagram& bottom) {
  Tangle t{{LayerKind::cup, 0}};
  append(t, top.layers(), 1);
  for (long i = 0; i < copies; ++i) append(t, middle.layers(), 1);
  append(t, bottom.layers(), 1);
  t.push_back({LayerKind::cap, 0});
  return t;
}

inline int vertex_count(std::span<const Layer> layers) {
  int v = 0;
  for (const Layer& l : layers) v += l.kind == LayerKind::split || l.kind == LayerKind::merge;
  return v;
}

/// Mirror image in a horizontal line: the layers in reverse order with splits
/// and merges, cups and caps exchanged. Positions are unchanged.
inline Tangle reflected(std::span<const Layer> layers) {
  Tangle out;
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
    LayerKind k = it->kind;
    switch (k) {
      case LayerKind::split: k = LayerKind::merge; break;
      case LayerKind::merge: k = LayerKind::split; break;
      case LayerKind::cup: k = LayerKind::cap; break;
      case LayerKind::cap: k = LayerKind::cup; break;
    }
    out.push_back({k, it->position});
  }
  return out;
}

/// Runs a layered tangle through an engine and returns the closed value.
template <class Engine>
auto evaluate_tangle(const Engine& engine, std::span<const Layer> layers) {
  auto state = engine.empty();
  for (const Layer& l : layers) engine.apply(state, l);
  return engine.close(state);
}

}  // namespace thompson
