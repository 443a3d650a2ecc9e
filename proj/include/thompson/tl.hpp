#pragma once

// Temperley-Lieb expansion of trivalent tangles. Each trivalent strand is a
// pair of TL strands; every new edge carries the projector
// p2 = id - (1/delta) e, and the raw vertex is the unique planar pairing of
// its three doubled ends. States are planar matchings of the TL points on
// the current row, weighted by scalars; closed loops contribute delta.

#include <cstdint>
#include <map>
#include <vector>

#include "thompson/errors.hpp"
#include "thompson/rational.hpp"
#include "thompson/tangle.hpp"

namespace thompson {

using Matching = std::vector<std::uint8_t>;

/// A TL diagram from `top` points to `bottom` points; points 0..top-1 are on
/// top, top..top+bottom-1 below, `pair` is an involution without fixed points.
struct TLPiece {
  int top;
  int bottom;
  std::vector<int> pair;
};

/// Glues `piece` onto points [at, at+top) of the matching. Returns the new
/// matching and the number of closed loops formed.
inline std::pair<Matching, int> glue(const Matching& P, int at, const TLPiece& piece) {
  const int F = static_cast<int>(P.size());
  const int k = piece.top;
  const int l = piece.bottom;
  if (F - k + l > 255) throw ResourceError("more than 255 Temperley-Lieb points on one row");
  auto outside = [&](int x) { return x < at || x >= at + k; };
  auto renumber = [&](int x) { return x < at ? x : x - k + l; };
  std::vector<char> seen(static_cast<size_t>(k), 0);
  auto walk = [&](int q) {
    for (;;) {
      const int r = piece.pair[static_cast<size_t>(q)];
      if (r >= k) return at + (r - k);
      seen[static_cast<size_t>(r)] = 1;
      const int y = P[static_cast<size_t>(at + r)];
      if (outside(y)) return renumber(y);
      q = y - at;
      seen[static_cast<size_t>(q)] = 1;
    }
  };
  Matching out(static_cast<size_t>(F - k + l), 0xFF);
  auto link = [&](int a, int b) {
    out[static_cast<size_t>(a)] = static_cast<std::uint8_t>(b);
    out[static_cast<size_t>(b)] = static_cast<std::uint8_t>(a);
  };
  for (int x = 0; x < F; ++x) {
    if (!outside(x)) continue;
    const int nx = renumber(x);
    if (out[static_cast<size_t>(nx)] != 0xFF) continue;
    const int y = P[static_cast<size_t>(x)];
    if (outside(y)) {
      link(nx, renumber(y));
    } else {
      seen[static_cast<size_t>(y - at)] = 1;
      link(nx, walk(y - at));
    }
  }
  for (int b = 0; b < l; ++b)
    if (out[static_cast<size_t>(at + b)] == 0xFF) link(at + b, walk(k + b));
  int loops = 0;
  for (int t = 0; t < k; ++t) {
    if (seen[static_cast<size_t>(t)]) continue;
    ++loops;
    int q = t;
    do {
      seen[static_cast<size_t>(q)] = 1;
      const int r = piece.pair[static_cast<size_t>(q)];
      seen[static_cast<size_t>(r)] = 1;
      q = P[static_cast<size_t>(at + r)] - at;
    } while (!seen[static_cast<size_t>(q)]);
  }
  return {std::move(out), loops};
}

namespace tl_pieces {

inline TLPiece pairing(int top, int bottom, std::initializer_list<std::pair<int, int>> pairs) {
  TLPiece p{top, bottom, std::vector<int>(static_cast<size_t>(top + bottom), -1)};
  for (auto [a, b] : pairs) {
    p.pair[static_cast<size_t>(a)] = b;
    p.pair[static_cast<size_t>(b)] = a;
  }
  return p;
}

// In split and merge, a1 a2 is the doubled single edge and b1 b2, c1 c2 the
// doubled pair of edges.
inline const TLPiece& split() {
  static const TLPiece p = pairing(2, 4, {{0, 2}, {1, 5}, {3, 4}});
  return p;
}
inline const TLPiece& merge() {
  static const TLPiece p = pairing(4, 2, {{0, 4}, {3, 5}, {1, 2}});
  return p;
}
inline const TLPiece& cup() {
  static const TLPiece p = pairing(0, 4, {{0, 3}, {1, 2}});
  return p;
}
inline const TLPiece& cap() {
  static const TLPiece p = pairing(4, 0, {{0, 3}, {1, 2}});
  return p;
}
inline const TLPiece& cup_cap() {
  static const TLPiece p = pairing(2, 2, {{0, 1}, {2, 3}});
  return p;
}

}  // namespace tl_pieces

/// Raw (unnormalised) TL evaluation with scalars S. Only binary vertices.
template <class S>
class TemperleyLieb {
 public:
  using Scalar = S;
  using State = std::map<Matching, S>;

  /// `delta_power(k)` must return delta^k for any integer k.
  template <class DeltaPower>
  explicit TemperleyLieb(DeltaPower delta_power) {
    for (int k = -1; k <= kMaxLoops; ++k) powers_.push_back(delta_power(k));
  }

  static constexpr int points_per_strand = 2;

  State empty() const { return {{Matching{}, S(1)}}; }

  void apply(State& state, const Layer& layer) const {
    const int p = 2 * layer.position;
    switch (layer.kind) {
      case LayerKind::split:
        state = glue_all(state, p, tl_pieces::split());
        project(state, p);
        project(state, p + 2);
        break;
      case LayerKind::merge:
        state = glue_all(state, p, tl_pieces::merge());
        project(state, p);
        break;
      case LayerKind::cup:
        state = glue_all(state, p, tl_pieces::cup());
        project(state, p);
        break;
      case LayerKind::cap:
        state = glue_all(state, p, tl_pieces::cap());
        break;
    }
  }

  S close(const State& state) const {
    S total(0);
    for (const auto& [m, w] : state) {
      ensure(m.empty(), "closing a state that still has open points");
      total = total + w;
    }
    return total;
  }

  const S& delta_power(int k) const {
    ensure(k >= -1 && k <= kMaxLoops, "loop count out of table range");
    return powers_[static_cast<size_t>(k + 1)];
  }

  /// Applies p2 on TL points (at, at+1).
  void project(State& state, int at) const {
    State extra = glue_all(state, at, tl_pieces::cup_cap());
    for (auto& [m, w] : extra) add(state, m, w * delta_power(-1) * S(-1));
  }

  State glue_all(const State& state, int at, const TLPiece& piece) const {
    State out;
    for (const auto& [m, w] : state) {
      auto [next, loops] = glue(m, at, piece);
      add(out, next, loops ? w * delta_power(loops) : w);
    }
    return out;
  }

 private:
  static constexpr int kMaxLoops = 64;

  static void add(State& state, const Matching& m, const S& w) {
    auto [it, inserted] = state.emplace(m, w);
    if (!inserted) {
      it->second = it->second + w;
      if (is_zero(it->second)) state.erase(it);
    }
  }

  std::vector<S> powers_;
};

/// Exact raw evaluator: Laurent polynomials in delta with integer coefficients.
inline TemperleyLieb<Laurent> exact_tl() {
  return TemperleyLieb<Laurent>([](int k) { return Laurent::monomial(1, k); });
}

inline TemperleyLieb<double> numeric_tl(double delta) {
  return TemperleyLieb<double>([delta](int k) { return std::pow(delta, k); });
}

}  // namespace thompson
