#pragma once

// Reference elements of F and shared helpers for the test programs.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "thompson/element.hpp"

namespace fixtures {

// The generator x0.
inline const std::string A = "f1 f1 ; f1 f2";
// Moments t^(|k|+3) for k != 0.
inline const std::string N = "f1 f1 f1 f2 f5 ; f1 f1 f3 f4 f4";
// Transfer eigenvalues t, 1 and 1/(1-d).
inline const std::string X = "f1 f1 f3 ; f1 f2 f2";

inline thompson::GroupElement element(const std::string& s) { return thompson::parse_element(s, thompson::Arity(2)); }

/// Random generator word of length 1..max_len in x0..x3 and their inverses.
template <class Rng>
std::string random_word(Rng& rng, int max_len) {
  std::uniform_int_distribution<int> len(1, max_len), idx(0, 3), sign(0, 1);
  std::string w;
  for (int i = 0, n = len(rng); i < n; ++i) {
    if (!w.empty()) w += ' ';
    w += "x" + std::to_string(idx(rng));
    if (sign(rng)) w += "^-1";
  }
  return w;
}

/// Twenty random non-trivial words, fixed by the seed.
inline std::vector<std::string> random_words(unsigned seed = 20240611u) {
  std::mt19937 rng(seed);
  std::vector<std::string> out;
  while (out.size() < 20) {
    std::string w = random_word(rng, 5);
    if (!element(w).is_identity()) out.push_back(w);
  }
  return out;
}

/// An unreduced (1,1) diagram: alternating trees and inverse trees.
template <class Rng>
thompson::StrandDiagram random_unreduced(Rng& rng, thompson::Arity arity) {
  std::uniform_int_distribution<int> splits(1, 5);
  auto random_tree = [&](int k) {
    thompson::TreeWord w;
    for (int i = 0, leaves = 1; i < k; ++i, leaves += arity.value() - 1)
      w.push_back(std::uniform_int_distribution<int>(1, leaves)(rng));
    return thompson::tree_diagram(w, arity);
  };
  thompson::StrandDiagram d = thompson::StrandDiagram::identity(arity, 1);
  for (int block = 0; block < 3; ++block) {
    const int k = splits(rng);
    d = thompson::compose(thompson::compose(d, random_tree(k)), thompson::invert(random_tree(k)));
  }
  return d;
}

/// Proper 3-edge-colourings of the closure of a (1,1) diagram, by backtracking
/// over its edge list. Uses only the incidence data of the diagram.
inline long count_colorings(const thompson::StrandDiagram& d) {
  std::vector<std::pair<int, int>> edges;  // vertex ends; -1 for none
  int from_source = -1, into_sink = -1;
  for (const thompson::Edge& e : d.edges()) {
    if (e.tail.node == thompson::kBoundary && e.head.node == thompson::kBoundary) return 3;  // a lone loop
    if (e.tail.node == thompson::kBoundary) from_source = e.head.node;
    else if (e.head.node == thompson::kBoundary) into_sink = e.tail.node;
    else edges.emplace_back(e.tail.node, e.head.node);
  }
  edges.emplace_back(into_sink, from_source);
  const int V = d.vertex_count();
  std::vector<std::vector<int>> at(static_cast<size_t>(V));
  for (size_t i = 0; i < edges.size(); ++i) {
    at[static_cast<size_t>(edges[i].first)].push_back(static_cast<int>(i));
    at[static_cast<size_t>(edges[i].second)].push_back(static_cast<int>(i));
  }
  std::vector<int> colour(edges.size(), -1);
  auto ok = [&](int v) {
    int mask = 0;
    for (int e : at[static_cast<size_t>(v)]) {
      const int c = colour[static_cast<size_t>(e)];
      if (c < 0) continue;
      if (mask & (1 << c)) return false;
      mask |= 1 << c;
    }
    return true;
  };
  long count = 0;
  std::function<void(size_t)> go = [&](size_t i) {
    if (i == edges.size()) {
      ++count;
      return;
    }
    for (int c = 0; c < 3; ++c) {
      colour[i] = c;
      if (ok(edges[i].first) && ok(edges[i].second)) go(i + 1);
    }
    colour[i] = -1;
  };
  go(0);
  return count;
}

}  // namespace fixtures
