#pragma once

// Transfer operators. For p >= k0 the closure of S+ E~^(p-k0+1) S- is cut
// into three slices: the top slice (cup and S+) produces a state xi, every
// copy of E~ acts on states by M, and the bottom slice (S- and cap) is a
// linear functional eta. Hence mu_p = normalization * eta(M^(p-k0+1) xi).

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "thompson/evaluator.hpp"
#include "thompson/power_form.hpp"

namespace thompson {

using VectorC = Eigen::VectorXcd;
using MatrixC = Eigen::MatrixXcd;
using SparseC = Eigen::SparseMatrix<Complex>;

struct TransferLimits {
  size_t max_tensor_dimension = 4096;
  size_t max_tl_dimension = 4862;
};

/// The state space spanned by the orbit of xi, with M in sparse columns.
template <class Engine>
struct RawTransfer {
  using Key = typename Engine::State::key_type;
  using Scalar = typename Engine::Scalar;
  std::vector<Key> basis;
  std::vector<std::vector<std::pair<int, Scalar>>> columns;
  std::vector<Scalar> xi;
  std::vector<Scalar> eta;
};

template <class Engine>
typename Engine::State run_layers(const Engine& engine, typename Engine::State state, std::span<const Layer> layers,
                                  int shift) {
  for (const Layer& l : layers) engine.apply(state, {l.kind, l.position + shift});
  return state;
}

/// Builds the orbit basis by breadth-first search from the top slice.
template <class Engine>
RawTransfer<Engine> build_raw_transfer(const Engine& engine, const PowerForm& pf, size_t cap) {
  using State = typename Engine::State;
  using Key = typename Engine::State::key_type;
  using S = typename Engine::Scalar;
  RawTransfer<Engine> raw;
  State top = engine.empty();
  engine.apply(top, {LayerKind::cup, 0});
  top = run_layers(engine, std::move(top), pf.S_plus.layers(), 1);

  std::map<Key, int> index;
  auto id_of = [&](const Key& k) {
    auto [it, inserted] = index.emplace(k, static_cast<int>(raw.basis.size()));
    if (inserted) {
      if (raw.basis.size() >= cap)
        throw ResourceError("transfer state space exceeds " + std::to_string(cap) + " states");
      raw.basis.push_back(k);
    }
    return it->second;
  };
  std::vector<std::pair<int, S>> xi_sparse;
  for (const auto& [k, w] : top) xi_sparse.emplace_back(id_of(k), w);
  for (size_t done = 0; done < raw.basis.size(); ++done) {
    State unit{{raw.basis[done], S(1)}};
    State image = run_layers(engine, std::move(unit), pf.E_tilde.layers(), 1);
    std::vector<std::pair<int, S>> column;
    for (const auto& [k, w] : image) column.emplace_back(id_of(k), w);
    raw.columns.push_back(std::move(column));
  }
  raw.xi.assign(raw.basis.size(), S(0));
  for (const auto& [i, w] : xi_sparse) raw.xi[static_cast<size_t>(i)] = w;
  for (const Key& k : raw.basis) {
    State unit{{k, S(1)}};
    State bottom = run_layers(engine, std::move(unit), pf.S_minus.layers(), 1);
    engine.apply(bottom, {LayerKind::cap, 0});
    raw.eta.push_back(engine.close(bottom));
  }
  return raw;
}

struct TransferSystem {
  SparseC M;
  VectorC xi;
  VectorC eta;
  int k0 = 0;
  std::string basis;
  Complex normalization = 1.0;

  int dimension() const { return static_cast<int>(xi.size()); }

  /// normalization * eta^T M^e xi for e = 0..count-1.
  std::vector<Complex> sequence(int count) const {
    std::vector<Complex> out;
    VectorC v = xi;
    for (int e = 0; e < count; ++e) {
      out.push_back(normalization * (eta.transpose() * v)(0));
      v = M * v;
    }
    return out;
  }

  Complex moment(long p) const {
    if (p < k0) throw ArgumentError("transfer moments start at p = k0");
    VectorC v = xi;
    for (long e = 0; e < p - k0 + 1; ++e) v = M * v;
    return normalization * (eta.transpose() * v)(0);
  }
};

namespace detail {

template <class S>
Complex to_complex(const S& x) {
  return Complex(x);
}

template <class Engine>
TransferSystem to_numeric(const RawTransfer<Engine>& raw, Complex column_factor) {
  const auto dim = static_cast<Eigen::Index>(raw.basis.size());
  TransferSystem ts;
  std::vector<Eigen::Triplet<Complex>> entries;
  for (size_t j = 0; j < raw.columns.size(); ++j)
    for (const auto& [i, w] : raw.columns[j])
      entries.emplace_back(i, static_cast<Eigen::Index>(j), column_factor * to_complex(w));
  ts.M.resize(dim, dim);
  ts.M.setFromTriplets(entries.begin(), entries.end());
  ts.xi.resize(dim);
  ts.eta.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    ts.xi(i) = to_complex(raw.xi[static_cast<size_t>(i)]);
    ts.eta(i) = to_complex(raw.eta[static_cast<size_t>(i)]);
  }
  return ts;
}

}  // namespace detail

/// Numeric transfer system for a power form. No certification here.
inline TransferSystem build_transfer(const PowerForm& pf, const Backend& b, const TransferLimits& limits = {}) {
  if (!(pf.E_tilde.arity() == b.arity())) throw ArgumentError("power form arity does not match the backend");
  const int v_plus = pf.S_plus.vertex_count() + pf.S_minus.vertex_count();
  const int v_e = pf.E_tilde.vertex_count();
  TransferSystem ts;
  if (b.is_tl()) {
    const double c2 = b.params().vertex_norm_sq;
    auto raw = build_raw_transfer(numeric_tl(b.params().delta), pf, limits.max_tl_dimension);
    ts = detail::to_numeric(raw, std::pow(c2, 0.5 * v_e));
    ts.normalization = std::pow(c2, 0.5 * v_plus) / b.params().d;
    ts.basis = "planar link patterns on " + std::to_string(2 * (pf.strands() + 1)) + " points";
  } else {
    auto raw = build_raw_transfer(TensorEngine<Complex>(b.model().tensor), pf, limits.max_tensor_dimension);
    ts = detail::to_numeric(raw, 1.0);
    ts.normalization = 1.0 / static_cast<double>(b.model().kappa());
    ts.basis = "index tuples of length " + std::to_string(pf.strands() + 1);
  }
  ts.k0 = pf.k0;
  return ts;
}

/// Minimal realisation (A, x, f) of the sequence s_e = f^T A^e x, obtained by
/// restricting to the orbit of xi and then to the co-orbit of eta.
struct MinimalRealization {
  MatrixC A;
  VectorC x;
  VectorC f;
};

namespace detail {

/// Orthonormal basis of the Krylov space of v under `apply`.
template <class Apply>
MatrixC krylov_basis(const VectorC& v, Apply apply, double tol) {
  const double scale = v.norm();
  std::vector<VectorC> basis;
  if (scale == 0.0) return MatrixC(v.size(), 0);
  VectorC w = v / scale;
  basis.push_back(w);
  for (size_t i = 0; i < basis.size() && static_cast<Eigen::Index>(basis.size()) < v.size() + 1; ++i) {
    VectorC next = apply(basis[i]);
    const double norm0 = std::max(next.norm(), 1e-300);
    for (int pass = 0; pass < 2; ++pass)
      for (const VectorC& q : basis) next -= q * q.dot(next);
    const double norm = next.norm();
    if (norm <= tol * std::max(1.0, norm0)) continue;
    basis.push_back(next / norm);
    if (static_cast<Eigen::Index>(basis.size()) == v.size()) break;
  }
  MatrixC Q(v.size(), static_cast<Eigen::Index>(basis.size()));
  for (size_t i = 0; i < basis.size(); ++i) Q.col(static_cast<Eigen::Index>(i)) = basis[i];
  return Q;
}

}  // namespace detail

inline MinimalRealization minimal_realization(const TransferSystem& ts, double tol = 1e-11) {
  const VectorC xi = ts.xi * ts.normalization;
  MatrixC Q = detail::krylov_basis(xi, [&](const VectorC& v) { return VectorC(ts.M * v); }, tol);
  MatrixC Mr = Q.adjoint() * (ts.M * Q);
  VectorC xr = Q.adjoint() * xi;
  VectorC er = Q.transpose() * ts.eta;
  MatrixC MrT = Mr.transpose();
  MatrixC W = detail::krylov_basis(er, [&](const VectorC& v) { return VectorC(MrT * v); }, tol);
  MinimalRealization out;
  out.A = W.adjoint() * MrT * W;
  out.x = W.adjoint() * er;
  out.f = W.transpose() * xr;
  return out;
}

}  // namespace thompson
