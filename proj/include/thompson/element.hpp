#pragma once

// Elements of F_n as reduced (1,1) strand diagrams, tree words and the
// text grammars for both.

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "thompson/diagram.hpp"
#include "thompson/reduce.hpp"

namespace thompson {

/// f-indices (1-based) applied in order, starting from the root strand.
using TreeWord = std::vector<int>;

/// A single tree with one root source; leaves are the sinks.
inline StrandDiagram tree_diagram(const TreeWord& word, Arity arity) {
  std::vector<Layer> layers;
  int strands = 1;
  for (int f : word) {
    if (f < 1 || f > strands)
      throw ArgumentError("f" + std::to_string(f) + " applied to a forest with " + std::to_string(strands) + " leaves");
    layers.push_back({LayerKind::split, f - 1});
    strands += arity.value() - 1;
  }
  return StrandDiagram::from_layers(arity, 1, layers);
}

/// Word of a forest of splits hanging from the sources of `d`, read by the
/// leftmost-first sweep that only absorbs splits.
inline TreeWord split_word(const StrandDiagram& d) {
  std::vector<int> frontier;
  for (int i = 0; i < d.sources(); ++i) frontier.push_back(d.source_edge(i));
  TreeWord word;
  for (bool progressed = true; progressed;) {
    progressed = false;
    for (size_t p = 0; p < frontier.size(); ++p) {
      const Endpoint head = d.edge(frontier[p]).head;
      if (head.node == kBoundary || d.kind(head.node) != VertexKind::split) continue;
      word.push_back(static_cast<int>(p) + 1);
      std::vector<int> outs;
      for (int k = 0; k < d.output_count(head.node); ++k) outs.push_back(d.out_edge(head.node, k));
      frontier.erase(frontier.begin() + static_cast<long>(p));
      frontier.insert(frontier.begin() + static_cast<long>(p), outs.begin(), outs.end());
      progressed = true;
      break;
    }
  }
  return word;
}

struct TreePair {
  TreeWord top;
  TreeWord bottom;
};

class GroupElement {
 public:
  /// Reduces `d`, which must have one source and one sink.
  explicit GroupElement(const StrandDiagram& d) : diagram_(reduce(d)) {
    if (d.sources() != 1 || d.sinks() != 1) throw ArgumentError("group elements are (1,1) diagrams");
  }

  static GroupElement identity(Arity arity) { return GroupElement(StrandDiagram::identity(arity, 1)); }

  const StrandDiagram& diagram() const { return diagram_; }
  Arity arity() const { return diagram_.arity(); }
  std::string encode() const { return diagram_.encode(); }
  bool is_identity() const { return diagram_.vertex_count() == 0; }

  /// Splits sit above merges in a reduced (1,1) diagram, so the diagram is a
  /// tree followed by an inverted tree.
  TreePair to_tree_pair() const {
    return {split_word(diagram_), split_word(invert(diagram_))};
  }

  friend bool operator==(const GroupElement& a, const GroupElement& b) { return a.diagram_ == b.diagram_; }

 private:
  StrandDiagram diagram_;
};

inline GroupElement element_from_trees(const TreeWord& top, const TreeWord& bottom, Arity arity) {
  StrandDiagram t = tree_diagram(top, arity);
  StrandDiagram b = tree_diagram(bottom, arity);
  if (t.sinks() != b.sinks())
    throw ArgumentError("tree words have " + std::to_string(t.sinks()) + " and " + std::to_string(b.sinks()) +
                        " leaves");
  return GroupElement(compose(t, invert(b)));
}

inline void require_same_arity(const GroupElement& a, const GroupElement& b) {
  if (!(a.arity() == b.arity())) throw CompositionError("elements of different arity");
}

/// a then b, read top to bottom.
inline GroupElement group_compose(const GroupElement& a, const GroupElement& b) {
  require_same_arity(a, b);
  return GroupElement(compose(a.diagram(), b.diagram()));
}

inline GroupElement group_inverse(const GroupElement& a) { return GroupElement(invert(a.diagram())); }

inline GroupElement group_power(const GroupElement& a, long p) {
  GroupElement base = p < 0 ? group_inverse(a) : a;
  unsigned long e = p < 0 ? static_cast<unsigned long>(-p) : static_cast<unsigned long>(p);
  GroupElement acc = GroupElement::identity(a.arity());
  while (e) {
    if (e & 1UL) acc = group_compose(acc, base);
    e >>= 1U;
    if (e) base = group_compose(base, base);
  }
  return acc;
}

inline TreeWord right_comb(int splits, Arity arity) {
  TreeWord word;
  for (int k = 0; k < splits; ++k) word.push_back(1 + k * (arity.value() - 1));
  return word;
}

/// Writing i = q(n-1) + r with 0 <= r < n-1: the right comb of q+1 splits with
/// one more split on leaf q(n-1)+r+1, over the right comb of q+2 splits.
/// At n = 2 this is comb_{i+1} f_{i+1} over comb_{i+1} f_{i+2}.
inline GroupElement standard_generator(int i, Arity arity) {
  if (i < 0) throw ArgumentError("generator index must be nonnegative");
  const int n = arity.value();
  const int q = i / (n - 1);
  const int r = i % (n - 1);
  TreeWord top = right_comb(q + 1, arity);
  top.push_back(q * (n - 1) + r + 1);
  return element_from_trees(top, right_comb(q + 2, arity), arity);
}

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline long parse_integer(const std::string& s, const std::string& context) {
  size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) throw ArgumentError("bad integer '" + s + "' in " + context);
  return v;
}

}  // namespace detail

inline std::string tree_word_string(const TreeWord& w) {
  std::string out;
  for (int f : w) out += (out.empty() ? "f" : " f") + std::to_string(f);
  return out;
}

/// "top ; bottom", the form accepted by parse_element.
inline std::string tree_pair_string(const GroupElement& g) {
  const TreePair tp = g.to_tree_pair();
  return tree_word_string(tp.top) + " ; " + tree_word_string(tp.bottom);
}

/// Grammar "f<int>( f<int>)*", optionally prefixed by "tree:".
inline TreeWord parse_tree_word(const std::string& text) {
  std::string s = detail::trim(text);
  if (s.rfind("tree:", 0) == 0) s = detail::trim(s.substr(5));
  std::istringstream in(s);
  TreeWord word;
  for (std::string tok; in >> tok;) {
    if (tok.size() < 2 || tok[0] != 'f') throw ArgumentError("bad tree token '" + tok + "'");
    long f = detail::parse_integer(tok.substr(1), "tree word");
    if (f < 1) throw ArgumentError("tree indices are 1-based: '" + tok + "'");
    word.push_back(static_cast<int>(f));
  }
  return word;
}

/// Accepts "top ; bottom" tree pairs, generator words such as "x0 x1^-1 x0^2",
/// and "1" or "e" for the identity.
inline GroupElement parse_element(const std::string& text, Arity arity) {
  const std::string s = detail::trim(text);
  if (s.empty()) throw ArgumentError("empty element");
  if (auto semi = s.find(';'); semi != std::string::npos) {
    TreeWord top = parse_tree_word(s.substr(0, semi));
    TreeWord bottom = parse_tree_word(s.substr(semi + 1));
    return element_from_trees(top, bottom, arity);
  }
  GroupElement acc = GroupElement::identity(arity);
  std::istringstream in(s);
  for (std::string tok; in >> tok;) {
    if (tok == "1" || tok == "e") continue;
    if (tok.size() < 2 || tok[0] != 'x') throw ArgumentError("bad generator token '" + tok + "'");
    long exponent = 1;
    std::string index = tok.substr(1);
    if (auto caret = index.find('^'); caret != std::string::npos) {
      exponent = detail::parse_integer(index.substr(caret + 1), "generator exponent");
      index = index.substr(0, caret);
    }
    long i = detail::parse_integer(index, "generator index");
    if (i < 0) throw ArgumentError("generator index must be nonnegative: '" + tok + "'");
    acc = group_compose(acc, group_power(standard_generator(static_cast<int>(i), arity), exponent));
  }
  return acc;
}

}  // namespace thompson
