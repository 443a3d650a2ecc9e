#pragma once

// Stabilised form of h g^p h~: for p >= k0 the reduced diagram is exactly
// S+ followed by p-k0+1 copies of E~ followed by S-.

#include <string>

#include "thompson/annular.hpp"

namespace thompson {

struct PowerForm {
  StrandDiagram S_plus;   // (1, m)
  StrandDiagram E_tilde;  // (m, m)
  StrandDiagram S_minus;  // (m, 1)
  int k0;

  int strands() const { return E_tilde.sources(); }

  /// S+ E~^(p-k0+1) S- as a concatenation, without reduction. Needs p >= k0.
  StrandDiagram expand(long p) const {
    if (p < k0) throw ArgumentError("power form only holds for p >= " + std::to_string(k0));
    return compose(compose(S_plus, power_concat(E_tilde, static_cast<int>(p - k0 + 1))), S_minus);
  }
};

namespace detail {

/// Smallest j >= 0 such that reduce(top E^j) followed by E^(m+1) is reduced.
inline std::pair<StrandDiagram, int> absorb_into(const StrandDiagram& top, const StrandDiagram& E) {
  const StrandDiagram tail = power_concat(E, E.sources() + 1);
  StrandDiagram t = reduce(top);
  for (int j = 0;; ++j) {
    if (is_reduced(compose(t, tail))) return {t, j};
    ensure(j <= 4 * (top.vertex_count() + 2), "interface with the essential part never stabilised");
    t = reduce(compose(t, E));
  }
}

inline std::optional<int> vertex_on_sink(const StrandDiagram& d, int sink) {
  const Endpoint tail = d.edge(d.sink_edge(sink)).tail;
  if (tail.node == kBoundary) return std::nullopt;
  return tail.node;
}

inline std::optional<int> vertex_on_source(const StrandDiagram& d, int source) {
  const Endpoint head = d.edge(d.source_edge(source)).head;
  if (head.node == kBoundary) return std::nullopt;
  return head.node;
}

/// One reduction between T and B through free-loop strands of E, if any.
inline bool cross_reduce(StrandDiagram& T, StrandDiagram& E, StrandDiagram& B) {
  const Arity arity = E.arity();
  const int n = arity.value();
  const std::vector<int> loops = free_loop_strands(E);
  auto is_loop = [&](int a) { return std::find(loops.begin(), loops.end(), a) != loops.end(); };
  for (int a : loops) {
    auto x = vertex_on_sink(T, a);
    auto y = vertex_on_source(B, a);
    if (!x || !y) continue;
    if (T.kind(*x) == VertexKind::merge && B.kind(*y) == VertexKind::split) {
      auto top = detach_bottom(T, *x);
      auto bottom = detach_top(B, *y);
      ensure(top && bottom, "loop strand vertex is not on the boundary");
      const StrandDiagram merge = elementary(arity, VertexKind::merge, a, E.sources() + n - 1);
      E = reduce(compose(compose(merge, E), invert(merge)));
      T = top->rest;
      B = bottom->rest;
      return true;
    }
    if (T.kind(*x) == VertexKind::split && B.kind(*y) == VertexKind::merge) {
      auto top = detach_bottom(T, *x);
      auto bottom = detach_top(B, *y);
      if (!top || !bottom || top->position != a || bottom->position != a) continue;
      bool all_loops = true;
      for (int k = 0; k < n; ++k) all_loops = all_loops && is_loop(a + k);
      if (!all_loops) continue;
      const StrandDiagram split = elementary(arity, VertexKind::split, a, E.sources() - n + 1);
      E = reduce(compose(compose(split, E), invert(split)));
      T = top->rest;
      B = bottom->rest;
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// `decomposition` must be the essential decomposition of g.
inline PowerForm power_form(const GroupElement& h, const GroupElement& g, const GroupElement& h_tilde,
                            const EssentialDecomposition& decomposition) {
  require_same_arity(h, g);
  require_same_arity(g, h_tilde);
  const StrandDiagram& S = decomposition.S;
  StrandDiagram E = decomposition.E;
  const StrandDiagram top = compose(h.diagram(), S);
  const StrandDiagram bottom = compose(invert(S), h_tilde.diagram());

  auto [T, p1] = detail::absorb_into(top, E);
  auto [B_inverted, p2] = detail::absorb_into(invert(bottom), invert(E));
  StrandDiagram B = invert(B_inverted);
  while (detail::cross_reduce(T, E, B)) {
  }

  // T E^j B is reduced for j > m; find the smallest j from which on it stays so.
  const int m = E.sources();
  int j0 = m + 1;
  while (j0 > 1 && is_reduced(compose(compose(T, power_concat(E, j0 - 1)), B))) --j0;
  ensure(is_reduced(compose(compose(T, power_concat(E, m + 1)), B)), "stabilised power form is not reduced");

  PowerForm form{compose(T, power_concat(E, j0 - 1)), E, B, p1 + p2 + j0};
  for (long p = form.k0; p <= form.k0 + 2; ++p) {
    const GroupElement direct =
        group_compose(group_compose(h, group_power(g, p)), h_tilde);
    ensure(direct.diagram() == form.expand(p), "power form disagrees with direct reduction at p = " + std::to_string(p));
  }
  return form;
}

inline PowerForm power_form(const GroupElement& h, const GroupElement& g, const GroupElement& h_tilde) {
  return power_form(h, g, h_tilde, essential_decomposition(g));
}

}  // namespace thompson
