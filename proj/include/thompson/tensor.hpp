#pragma once

// Concrete tensor models: every strand carries an index in 0..kappa-1, a
// split at index a emits (b_0..b_{n-1}) with weight R[a; b], a merge absorbs
// with the conjugate weight, cups and caps are Kronecker deltas.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "thompson/errors.hpp"
#include "thompson/rational.hpp"
#include "thompson/tangle.hpp"

namespace thompson {

inline double conj_scalar(double x) { return x; }
inline std::complex<double> conj_scalar(const std::complex<double>& x) { return std::conj(x); }
inline mpz_class conj_scalar(const mpz_class& x) { return x; }

using IndexTuple = std::vector<std::uint8_t>;

/// R as a flat array indexed by a * kappa^n + (b_0 kappa^(n-1) + ... + b_{n-1}).
template <class S>
struct Tensor {
  Arity arity;
  int kappa;
  std::vector<S> R;

  size_t tail_size() const {
    size_t s = 1;
    for (int i = 0; i < arity.value(); ++i) s *= static_cast<size_t>(kappa);
    return s;
  }
  const S& at(int a, size_t tail) const { return R[static_cast<size_t>(a) * tail_size() + tail]; }
};

struct TensorModel {
  std::string name;
  Tensor<std::complex<double>> tensor;

  Arity arity() const { return tensor.arity; }
  int kappa() const { return tensor.kappa; }

  /// The 3-edge-colouring model: R_ijk = 1/sqrt 2 when i, j, k are distinct.
  static TensorModel coloring3() {
    Tensor<std::complex<double>> t{Arity(2), 3, std::vector<std::complex<double>>(27, 0.0)};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          if (i != j && j != k && i != k) t.R[static_cast<size_t>(9 * i + 3 * j + k)] = 1.0 / std::sqrt(2.0);
    return {"coloring3", std::move(t)};
  }

  /// Nested arrays R[a][b_0]...[b_{n-1}] (n+1 levels); entries are numbers or [re, im].
  static TensorModel from_json(const nlohmann::json& j, Arity arity) {
    if (!j.is_array() || j.empty()) throw ArgumentError("inline tensor must be a nested array");
    const int kappa = static_cast<int>(j.size());
    if (kappa > 255) throw ArgumentError("tensor index dimension out of range");
    Tensor<std::complex<double>> t{arity, kappa, {}};
    flatten(j, arity.value() + 1, kappa, t.R);
    return {"inline", std::move(t)};
  }

  /// Largest entry of R* R - id over the kappa x kappa output.
  double unitarity_defect() const {
    const size_t tail = tensor.tail_size();
    double worst = 0.0;
    for (int a = 0; a < kappa(); ++a)
      for (int b = 0; b < kappa(); ++b) {
        std::complex<double> s = 0.0;
        for (size_t x = 0; x < tail; ++x) s += tensor.at(a, x) * std::conj(tensor.at(b, x));
        worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
      }
    return worst;
  }

 private:
  static void flatten(const nlohmann::json& j, int depth, int kappa, std::vector<std::complex<double>>& out) {
    if (depth == 0) {
      if (j.is_number()) out.emplace_back(j.get<double>(), 0.0);
      else if (j.is_array() && j.size() == 2) out.emplace_back(j[0].get<double>(), j[1].get<double>());
      else throw ArgumentError("tensor entry must be a number or [re, im]");
      return;
    }
    if (!j.is_array() || static_cast<int>(j.size()) != kappa) throw ArgumentError("ragged tensor array");
    for (const auto& x : j) flatten(x, depth - 1, kappa, out);
  }
};

/// Index-state contraction engine for a tensor with scalar type S.
template <class S>
class TensorEngine {
 public:
  using Scalar = S;
  using State = std::map<IndexTuple, S>;

  explicit TensorEngine(Tensor<S> t) : t_(std::move(t)) {
    const int n = t_.arity.value();
    const size_t tail = t_.tail_size();
    emit_.resize(static_cast<size_t>(t_.kappa));
    absorb_.resize(tail);
    for (int a = 0; a < t_.kappa; ++a)
      for (size_t x = 0; x < tail; ++x) {
        const S& w = t_.at(a, x);
        if (is_zero(w)) continue;
        IndexTuple b(static_cast<size_t>(n));
        size_t rest = x;
        for (int k = n - 1; k >= 0; --k) {
          b[static_cast<size_t>(k)] = static_cast<std::uint8_t>(rest % static_cast<size_t>(t_.kappa));
          rest /= static_cast<size_t>(t_.kappa);
        }
        emit_[static_cast<size_t>(a)].push_back({b, w});
        absorb_[x].push_back({static_cast<std::uint8_t>(a), conj_scalar(w)});
      }
  }

  static constexpr int points_per_strand = 1;

  int kappa() const { return t_.kappa; }
  Arity arity() const { return t_.arity; }

  State empty() const { return {{IndexTuple{}, S(1)}}; }

  void apply(State& state, const Layer& layer) const {
    const auto p = static_cast<size_t>(layer.position);
    const int n = t_.arity.value();
    State out;
    for (const auto& [key, w] : state) {
      switch (layer.kind) {
        case LayerKind::split:
          for (const auto& [b, r] : emit_[key[p]]) {
            IndexTuple next(key.begin(), key.begin() + static_cast<long>(p));
            next.insert(next.end(), b.begin(), b.end());
            next.insert(next.end(), key.begin() + static_cast<long>(p) + 1, key.end());
            add(out, std::move(next), w * r);
          }
          break;
        case LayerKind::merge: {
          size_t x = 0;
          for (int k = 0; k < n; ++k) x = x * static_cast<size_t>(t_.kappa) + key[p + static_cast<size_t>(k)];
          for (const auto& [a, r] : absorb_[x]) {
            IndexTuple next(key.begin(), key.begin() + static_cast<long>(p));
            next.push_back(a);
            next.insert(next.end(), key.begin() + static_cast<long>(p) + static_cast<size_t>(n), key.end());
            add(out, std::move(next), w * r);
          }
          break;
        }
        case LayerKind::cup:
          for (int i = 0; i < t_.kappa; ++i) {
            IndexTuple next(key.begin(), key.begin() + static_cast<long>(p));
            next.push_back(static_cast<std::uint8_t>(i));
            next.push_back(static_cast<std::uint8_t>(i));
            next.insert(next.end(), key.begin() + static_cast<long>(p), key.end());
            add(out, std::move(next), w);
          }
          break;
        case LayerKind::cap:
          if (key[p] == key[p + 1]) {
            IndexTuple next(key.begin(), key.begin() + static_cast<long>(p));
            next.insert(next.end(), key.begin() + static_cast<long>(p) + 2, key.end());
            add(out, std::move(next), w);
          }
          break;
      }
    }
    state = std::move(out);
  }

  S close(const State& state) const {
    S total(0);
    for (const auto& [key, w] : state) {
      ensure(key.empty(), "closing a state that still has open strands");
      total = total + w;
    }
    return total;
  }

 private:
  static void add(State& state, IndexTuple key, const S& w) {
    auto [it, inserted] = state.emplace(std::move(key), w);
    if (!inserted) {
      it->second = it->second + w;
      if (is_zero(it->second)) state.erase(it);
    }
  }

  Tensor<S> t_;
  std::vector<std::vector<std::pair<IndexTuple, S>>> emit_;
  std::vector<std::vector<std::pair<std::uint8_t, S>>> absorb_;
};

/// The colouring tensor with integer entries 1 in place of 1/sqrt 2; a
/// closed tangle then evaluates to its number of proper 3-edge-colourings.
inline TensorEngine<mpz_class> coloring_indicator() {
  Tensor<mpz_class> t{Arity(2), 3, std::vector<mpz_class>(27, 0)};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        if (i != j && j != k && i != k) t.R[static_cast<size_t>(9 * i + 3 * j + k)] = 1;
  return TensorEngine<mpz_class>(std::move(t));
}

}  // namespace thompson
