#pragma once

// Moment sequences mu_p = <pi(g)^p psi, psi>. The direct oracle reduces and
// evaluates h g^p h~; the closed form
//   mu_p = sum c binom(p-k0+1, q) lambda^(p-k0+1-q),  p >= k0,
// comes from the eigen-data of the transfer operator.

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "thompson/exact.hpp"
#include "thompson/transfer.hpp"

namespace thompson {

inline double binomial(long e, int q) {
  if (q < 0 || e < q) return 0.0;
  double b = 1.0;
  for (int i = 0; i < q; ++i) b = b * static_cast<double>(e - i) / static_cast<double>(i + 1);
  return b;
}

struct MomentTerm {
  Complex lambda;
  int q = 0;
  Complex c;
};

struct ClosedFormOptions {
  double cluster_tol = 1e-6;
  double circle_tol = 1e-7;
  double verify_tol = 1e-9;
  bool exact = false;
  size_t dense_radius_limit = 800;
  TransferLimits limits;
};

struct MomentClosedForm {
  int k0 = 0;
  std::vector<MomentTerm> terms;
  std::vector<Complex> head;  // mu_p for 0 <= p < k0
  std::optional<ExactClosedForm> exact;
  int transfer_dimension = 0;
  int minimal_dimension = 0;
  double spectral_radius = 0.0;

  /// The closed form at exponent e = p - k0 + 1.
  Complex series(long e) const {
    Complex total = 0.0;
    for (const auto& t : terms) {
      if (e < t.q) continue;
      total += t.c * binomial(e, t.q) * std::pow(t.lambda, static_cast<double>(e - t.q));
    }
    return total;
  }

  /// mu_p for any integer p; negative p through mu_(-p) = conj(mu_p).
  Complex moment(long p) const {
    if (p < 0) return std::conj(moment(-p));
    if (p < k0) return head[static_cast<size_t>(p)];
    return series(p - k0 + 1);
  }
};

/// <pi(h g^p h~) Omega, Omega> by reduction and evaluation.
inline Complex moments_direct(const GroupElement& g, const GroupElement& h, const GroupElement& h_tilde, long p,
                              const Backend& b) {
  if (std::labs(p) > 4096) throw ResourceError("direct moments are capped at |p| <= 4096");
  return coefficient(group_compose(group_compose(h, group_power(g, p)), h_tilde), b);
}

namespace detail {

struct Cluster {
  Complex center;
  std::vector<Complex> members;
};

/// Greedy clustering; refuses clusters that straddle the unit circle and
/// snaps centres on the circle to modulus one.
inline std::vector<Cluster> cluster_eigenvalues(const Eigen::VectorXcd& ev, const ClosedFormOptions& opt) {
  std::vector<Cluster> clusters;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const Complex z = ev(i);
    Cluster* home = nullptr;
    for (auto& c : clusters)
      if (std::abs(c.center - z) < opt.cluster_tol * std::max(1.0, std::abs(c.center))) home = &c;
    if (!home) {
      clusters.push_back({z, {z}});
      continue;
    }
    home->members.push_back(z);
    Complex sum = 0.0;
    for (const auto& m : home->members) sum += m;
    home->center = sum / static_cast<double>(home->members.size());
  }
  for (auto& c : clusters) {
    const bool on = std::abs(std::abs(c.center) - 1.0) < opt.circle_tol * 10.0;
    bool some_on = false, some_off = false;
    for (const auto& m : c.members) (std::abs(std::abs(m) - 1.0) < opt.circle_tol ? some_on : some_off) = true;
    if (on && some_on && some_off)
      throw InconsistencyError("eigenvalue cluster straddles the unit circle; rerun with a smaller tolerance");
    if (std::abs(std::abs(c.center) - 1.0) < opt.circle_tol) c.center /= std::abs(c.center);
  }
  return clusters;
}

inline double cluster_radius(const Eigen::VectorXcd& ev, const ClosedFormOptions& opt) {
  double r = 0.0;
  for (const auto& c : cluster_eigenvalues(ev, opt)) r = std::max(r, std::abs(c.center));
  return r;
}

}  // namespace detail

/// Spectral radius of the full transfer operator when it is small enough for
/// a dense eigensolver, otherwise of its minimal realisation.
inline double spectral_radius(const TransferSystem& ts, const MinimalRealization& mr, const ClosedFormOptions& opt) {
  if (static_cast<size_t>(ts.dimension()) <= opt.dense_radius_limit && ts.dimension() > 0) {
    Eigen::ComplexEigenSolver<MatrixC> es(MatrixC(ts.M), false);
    return detail::cluster_radius(es.eigenvalues(), opt);
  }
  if (mr.A.rows() == 0) return 0.0;
  Eigen::ComplexEigenSolver<MatrixC> es(mr.A, false);
  return detail::cluster_radius(es.eigenvalues(), opt);
}

/// Least-squares fit of the closed-form coefficients to the realised sequence.
inline std::vector<MomentTerm> fit_terms(const MinimalRealization& mr, const ClosedFormOptions& opt) {
  const Eigen::Index D = mr.A.rows();
  if (D == 0) return {};
  Eigen::ComplexEigenSolver<MatrixC> es(mr.A, false);
  const auto clusters = detail::cluster_eigenvalues(es.eigenvalues(), opt);
  std::vector<MomentTerm> shape;
  for (const auto& c : clusters)
    for (int q = 0; q < static_cast<int>(c.members.size()); ++q) shape.push_back({c.center, q, 0.0});
  const Eigen::Index samples = 2 * D + 4;
  MatrixC V(samples, static_cast<Eigen::Index>(shape.size()));
  VectorC s(samples);
  VectorC v = mr.x;
  for (Eigen::Index e = 0; e < samples; ++e) {
    s(e) = (mr.f.transpose() * v)(0);
    v = mr.A * v;
    for (size_t k = 0; k < shape.size(); ++k) {
      const auto& t = shape[k];
      V(e, static_cast<Eigen::Index>(k)) =
          e < t.q ? Complex(0.0) : binomial(e, t.q) * std::pow(t.lambda, static_cast<double>(e - t.q));
    }
  }
  const VectorC c = V.colPivHouseholderQr().solve(s);
  std::vector<MomentTerm> out;
  for (size_t k = 0; k < shape.size(); ++k) {
    shape[k].c = c(static_cast<Eigen::Index>(k));
    if (std::abs(shape[k].c) > 1e-14) out.push_back(shape[k]);
  }
  return out;
}

inline void verify_series(const MomentClosedForm& cf, const TransferSystem& ts, const ClosedFormOptions& opt) {
  const auto seq = ts.sequence(12);
  for (size_t e = 0; e < seq.size(); ++e) {
    const double err = std::abs(cf.series(static_cast<long>(e)) - seq[e]);
    if (err > opt.verify_tol * std::max(1.0, std::abs(seq[e]))) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "closed form misses the transfer sequence at e = %zu by %.3g", e, err);
      throw InvariantError(buf);
    }
  }
}

/// Closed form from a transfer system alone; the head is left empty.
/// A Jordan block of size r splits by about eps^(1/r) in floating point, so
/// the cluster tolerance is widened until the fit verifies.
inline MomentClosedForm moments_closed_form(const TransferSystem& ts, const ClosedFormOptions& opt = {}) {
  MomentClosedForm cf;
  cf.k0 = ts.k0;
  const MinimalRealization mr = minimal_realization(ts);
  cf.transfer_dimension = ts.dimension();
  cf.minimal_dimension = static_cast<int>(mr.A.rows());
  cf.spectral_radius = spectral_radius(ts, mr, opt);
  ClosedFormOptions widened = opt;
  for (int attempt = 0;; ++attempt, widened.cluster_tol *= 10.0) {
    try {
      cf.terms = fit_terms(mr, widened);
      verify_series(cf, ts, opt);
      return cf;
    } catch (const InvariantError&) {
      if (attempt == 3) throw;
    }
  }
}

namespace detail {

/// Numeric terms from an exact closed form, or nullopt when a coefficient has
/// a pole at the backend's delta.
inline std::optional<std::vector<MomentTerm>> specialize_terms(const ExactClosedForm& ecf, double delta) {
  std::vector<MomentTerm> out;
  for (const auto& t : ecf.terms) {
    const double l = t.lambda.eval(delta), c = t.c.eval(delta);
    if (!std::isfinite(l) || !std::isfinite(c)) return std::nullopt;
    auto same = std::find_if(out.begin(), out.end(),
                             [&](const MomentTerm& u) { return u.q == t.q && std::abs(u.lambda - l) < 1e-12; });
    if (same != out.end()) same->c += c;
    else out.push_back({l, t.q, c});
  }
  std::erase_if(out, [](const MomentTerm& t) { return std::abs(t.c) < 1e-15; });
  return out;
}

}  // namespace detail

/// Certified closed form of <pi(h g^p h~) Omega, Omega>, head included.
inline MomentClosedForm closed_form_for(const GroupElement& g, const GroupElement& h, const GroupElement& h_tilde,
                                        const Backend& b, const ClosedFormOptions& opt = {}) {
  const PowerForm pf = power_form(h, g, h_tilde);
  const TransferSystem ts = build_transfer(pf, b, opt.limits);
  for (long p = pf.k0; p <= pf.k0 + 4; ++p) {
    const Complex direct = moments_direct(g, h, h_tilde, p, b);
    if (std::abs(ts.moment(p) - direct) > 1e-9 * std::max(1.0, std::abs(direct)))
      throw InvariantError("transfer system fails certification at p = " + std::to_string(p));
  }
  MomentClosedForm cf;
  std::optional<std::vector<MomentTerm>> exact_terms;
  if (opt.exact && b.is_tl()) {
    auto ecf = exact_closed_form(pf, opt.limits);
    if (ecf) {
      for (long p = 0; p < pf.k0; ++p)
        ecf->head.push_back(coefficient_exact(group_compose(group_compose(h, group_power(g, p)), h_tilde)));
      exact_terms = detail::specialize_terms(*ecf, b.params().delta);
      cf.exact = std::move(ecf);
    }
  }
  if (exact_terms) {
    const MinimalRealization mr = minimal_realization(ts);
    cf.k0 = pf.k0;
    cf.transfer_dimension = ts.dimension();
    cf.minimal_dimension = static_cast<int>(mr.A.rows());
    cf.spectral_radius = spectral_radius(ts, mr, opt);
    cf.terms = std::move(*exact_terms);
    verify_series(cf, ts, opt);
  } else {
    auto exact = std::move(cf.exact);
    cf = moments_closed_form(ts, opt);
    cf.exact = std::move(exact);
  }
  for (long p = 0; p < pf.k0; ++p) cf.head.push_back(moments_direct(g, h, h_tilde, p, b));
  return cf;
}

struct PsiTerm {
  Complex coeff;
  GroupElement element;
};

/// <psi, psi> for psi = sum a_i pi(g_i) Omega.
inline Complex psi_norm_sq(const std::vector<PsiTerm>& psi, const Backend& b) {
  Complex s = 0.0;
  for (const auto& i : psi)
    for (const auto& j : psi)
      s += i.coeff * std::conj(j.coeff) * coefficient(group_compose(group_inverse(j.element), i.element), b);
  return s;
}

/// Rescales psi to unit norm; zero vectors are rejected.
inline std::vector<PsiTerm> normalized(std::vector<PsiTerm> psi, const Backend& b) {
  if (psi.empty()) throw ArgumentError("empty vector");
  const Complex n = psi_norm_sq(psi, b);
  if (std::abs(n) < 1e-12) throw ArgumentError("vector has zero norm");
  for (auto& t : psi) t.coeff /= std::sqrt(n.real());
  return psi;
}

/// Re-indexes a pair closed form to a larger threshold K:
/// binom(e + D, q) = sum_s binom(D, q - s) binom(e, s).
inline std::vector<MomentTerm> shift_terms(const std::vector<MomentTerm>& terms, int D) {
  std::vector<MomentTerm> out;
  for (const auto& t : terms)
    for (int s = 0; s <= t.q; ++s) {
      const double b = binomial(D, t.q - s);
      if (b == 0.0) continue;
      out.push_back({t.lambda, s, t.c * b * std::pow(t.lambda, static_cast<double>(D - t.q + s))});
    }
  return out;
}

inline std::vector<MomentTerm> merge_terms(const std::vector<MomentTerm>& terms, double tol) {
  std::vector<MomentTerm> out;
  for (const auto& t : terms) {
    auto same = std::find_if(out.begin(), out.end(), [&](const MomentTerm& u) {
      return u.q == t.q && std::abs(u.lambda - t.lambda) < tol * std::max(1.0, std::abs(u.lambda));
    });
    if (same != out.end()) same->c += t.c;
    else out.push_back(t);
  }
  std::erase_if(out, [](const MomentTerm& t) { return std::abs(t.c) < 1e-15; });
  return out;
}

/// Closed form of <pi(g)^p psi, psi> for psi = sum a_i pi(g_i) Omega, built
/// from the pair forms of g_j^-1 g^p g_i. psi is normalised first.
inline MomentClosedForm moment_closed_form(const GroupElement& g, std::vector<PsiTerm> psi, const Backend& b,
                                           const ClosedFormOptions& opt = {}) {
  psi = normalized(std::move(psi), b);
  if (psi.size() == 1) {
    const GroupElement& h = psi[0].element;
    return closed_form_for(g, group_inverse(h), h, b, opt);
  }
  struct Pair {
    Complex weight;
    GroupElement h, h_tilde;
    MomentClosedForm cf;
  };
  std::vector<Pair> pairs;
  int K = 0;
  for (const auto& i : psi)
    for (const auto& j : psi) {
      ClosedFormOptions numeric = opt;
      numeric.exact = false;
      const GroupElement h = group_inverse(j.element);
      pairs.push_back({i.coeff * std::conj(j.coeff), h, i.element, closed_form_for(g, h, i.element, b, numeric)});
      K = std::max(K, pairs.back().cf.k0);
    }
  MomentClosedForm out;
  out.k0 = K;
  std::vector<MomentTerm> all;
  for (const auto& pr : pairs) {
    for (auto t : shift_terms(pr.cf.terms, K - pr.cf.k0)) {
      t.c *= pr.weight;
      all.push_back(t);
    }
    out.transfer_dimension = std::max(out.transfer_dimension, pr.cf.transfer_dimension);
    out.minimal_dimension += pr.cf.minimal_dimension;
    out.spectral_radius = std::max(out.spectral_radius, pr.cf.spectral_radius);
  }
  out.terms = merge_terms(all, opt.cluster_tol);
  for (long p = 0; p < K; ++p) {
    Complex s = 0.0;
    for (const auto& pr : pairs) s += pr.weight * moments_direct(g, pr.h, pr.h_tilde, p, b);
    out.head.push_back(s);
  }
  return out;
}

}  // namespace thompson
