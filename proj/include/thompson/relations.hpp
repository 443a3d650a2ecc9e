#pragma once

// Local relations of the trivalent category checked inside random closed
// contexts: tadpole, exchange, rotation, bigon and triangle.

#include <random>
#include <string>
#include <vector>

#include "thompson/evaluator.hpp"

namespace thompson {

/// A random layered tangle from 0 strands to `strands` strands with at most
/// `max_vertices` splits and merges.
template <class Rng>
Tangle random_cap_tangle(Rng& rng, int strands, int max_vertices, Arity arity = Arity(2)) {
  const int n = arity.value();
  Tangle t;
  int s = 0, v = 0;
  auto pick = [&rng](int count) { return static_cast<int>(std::uniform_int_distribution<int>(0, count - 1)(rng)); };
  for (int step = 0; step < 8; ++step) {
    switch (pick(4)) {
      case 0:
        t.push_back({LayerKind::cup, pick(s + 1)});
        s += 2;
        break;
      case 1:
        if (s >= 1 && v < max_vertices) {
          t.push_back({LayerKind::split, pick(s)});
          s += n - 1;
          ++v;
        }
        break;
      case 2:
        if (s >= n && v < max_vertices) {
          t.push_back({LayerKind::merge, pick(s - n + 1)});
          s -= n - 1;
          ++v;
        }
        break;
      default:
        if (s >= 2) {
          t.push_back({LayerKind::cap, pick(s - 1)});
          s -= 2;
        }
    }
  }
  while (s < strands) {
    if (s >= 1 && v < max_vertices && s + n - 1 <= strands && pick(2)) {
      t.push_back({LayerKind::split, pick(s)});
      s += n - 1;
      ++v;
    } else {
      t.push_back({LayerKind::cup, pick(s + 1)});
      s += 2;
    }
  }
  while (s > strands) {
    if (s - strands >= n - 1 && s >= n && pick(2)) {
      t.push_back({LayerKind::merge, pick(s - n + 1)});
      s -= n - 1;
      ++v;
    } else if (s - strands >= 2) {
      t.push_back({LayerKind::cap, pick(s - 1)});
      s -= 2;
    } else {
      t.push_back({LayerKind::cup, pick(s + 1)});
      s += 2;
    }
  }
  return t;
}

/// A local relation sum_i a_i X_i = 0 between tangles on `inputs` strands.
struct LocalRelation {
  std::string name;
  int inputs;
  int outputs;
  std::vector<std::pair<double, Tangle>> terms;  // placed at position 0
};

inline std::vector<LocalRelation> trivalent_relations(const TrivalentParams& p) {
  using L = LayerKind;
  const double e = 1.0 / (p.d - 1.0);
  return {
      {"tadpole", 0, 1, {{1.0, {{L::cup, 0}, {L::merge, 0}}}}},
      {"exchange", 2, 2,
       {{1.0, {{L::merge, 0}, {L::split, 0}}},
        {-1.0, {{L::split, 0}, {L::merge, 1}}},
        {-e, {}},
        {e, {{L::cap, 0}, {L::cup, 0}}}}},
      {"rotation-right", 1, 2, {{1.0, {{L::split, 0}}}, {-1.0, {{L::cup, 1}, {L::merge, 0}}}}},
      {"rotation-left", 1, 2, {{1.0, {{L::split, 0}}}, {-1.0, {{L::cup, 0}, {L::merge, 1}}}}},
      {"bigon", 1, 1, {{1.0, {{L::split, 0}, {L::merge, 0}}}, {-1.0, {}}}},
      {"triangle", 1, 2, {{1.0, {{L::split, 0}, {L::split, 1}, {L::merge, 0}}}, {-p.t, {{L::split, 0}}}}},
  };
}

struct RelationCheck {
  std::string name;
  int contexts;
  double max_error;
};

/// Places each relation at a random position between random top and bottom
/// contexts; contexts where every term vanishes are redrawn.
template <class Rng>
std::vector<RelationCheck> check_relations(const Backend& b, int trials, Rng& rng) {
  if (!b.is_tl()) throw ArgumentError("relation checks apply to the trivalent backend");
  std::vector<RelationCheck> report;
  for (const LocalRelation& rel : trivalent_relations(b.params())) {
    RelationCheck rc{rel.name, 0, 0.0};
    for (int attempt = 0; rc.contexts < trials && attempt < 50 * trials; ++attempt) {
      const int extra = std::uniform_int_distribution<int>(0, 2)(rng);
      const int position = std::uniform_int_distribution<int>(0, extra)(rng);
      const Tangle top = random_cap_tangle(rng, rel.inputs + extra, 4);
      const Tangle bottom = reflected(random_cap_tangle(rng, rel.outputs + extra, 4));
      double sum = 0.0, scale = 0.0;
      for (const auto& [coeff, piece] : rel.terms) {
        Tangle all = top;
        append(all, piece, position);
        append(all, bottom);
        if (vertex_count(all) % 2) {
          scale = -1.0;
          break;
        }
        const double v = evaluate_closed(b, all).real();
        sum += coeff * v;
        scale = std::max(scale, std::abs(coeff * v));
      }
      if (scale < 0.0 || (scale < 1e-9 && rel.terms.size() > 1)) continue;
      ++rc.contexts;
      rc.max_error = std::max(rc.max_error, std::abs(sum) / std::max(1.0, scale));
    }
    report.push_back(rc);
  }
  return report;
}

}  // namespace thompson
