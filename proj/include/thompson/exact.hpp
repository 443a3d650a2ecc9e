#pragma once

// Exact closed forms over Q(delta) for the trivalent backend. The transfer
// operator is iterated on Laurent states, the minimal polynomial of its
// restriction to the cyclic space of xi is found by elimination over Q(delta),
// its roots are located by lifting rational roots of a specialisation, and
// the moment coefficients solve a generalised Vandermonde system.

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "thompson/evaluator.hpp"
#include "thompson/power_form.hpp"
#include "thompson/transfer.hpp"

namespace thompson {

using RPoly = Polynomial<RatFunc>;

namespace detail {

inline QPoly truncated(const QPoly& p, int N) {
  std::vector<mpq_class> c;
  for (int i = 0; i < std::min(N, p.degree() + 1); ++i) c.push_back(p.coeff(i));
  return QPoly(std::move(c));
}

inline QPoly series_mul(const QPoly& a, const QPoly& b, int N) { return truncated(a * b, N); }

inline QPoly series_inverse(const QPoly& a, int N) {
  ensure(!is_zero(a.coeff(0)), "inverting a series with zero constant term");
  const mpq_class inv = 1 / a.coeff(0);
  std::vector<mpq_class> b(static_cast<size_t>(N));
  b[0] = inv;
  for (int k = 1; k < N; ++k) {
    mpq_class s = 0;
    for (int j = 1; j <= std::min(k, a.degree()); ++j) s += a.coeff(j) * b[static_cast<size_t>(k - j)];
    b[static_cast<size_t>(k)] = -inv * s;
  }
  return QPoly(std::move(b));
}

/// f(delta0 + eps) mod eps^N.
inline QPoly series_at(const RatFunc& f, const mpq_class& delta0, int N) {
  const QPoly num = truncated(taylor_shift(f.num(), delta0), N);
  const QPoly den = truncated(taylor_shift(f.den(), delta0), N);
  return series_mul(num, series_inverse(den, N), N);
}

/// a/b with deg a, deg b < N/2 and a = b s mod eps^N, moved back to delta.
inline std::optional<RatFunc> reconstruct(const QPoly& s, int N, const mpq_class& delta0) {
  QPoly r0 = QPoly::monomial(mpq_class(1), N), r1 = s;
  QPoly t0, t1(mpq_class(1));
  while (!r1.is_zero_poly() && 2 * r1.degree() >= N) {
    auto [q, r] = QPoly::divmod(r0, r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    QPoly t = t0 - q * t1;
    t0 = std::move(t1);
    t1 = std::move(t);
  }
  if (t1.is_zero_poly() || is_zero(t1.coeff(0)) || 2 * t1.degree() >= N) return std::nullopt;
  return RatFunc(taylor_shift(r1, -delta0), taylor_shift(t1, -delta0));
}

/// Best rational approximation with denominator at most max_den.
inline mpq_class rationalize(double x, long max_den = 10000000) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int i = 0; i < 64; ++i) {
    const double a = std::floor(r);
    if (std::abs(a) > 1e15) break;
    const long ai = static_cast<long>(a);
    const long q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    const long p2 = ai * p1 + p0;
    p0 = p1, q0 = q1, p1 = p2, q1 = q2;
    const double frac = r - a;
    if (std::abs(frac) < 1e-12 || std::abs(static_cast<double>(p1) / static_cast<double>(q1) - x) < 1e-14 * std::max(1.0, std::abs(x)))
      break;
    r = 1.0 / frac;
  }
  mpq_class out(p1, q1);
  out.canonicalize();
  return out;
}

/// All rational roots of a squarefree polynomial over Q, or nullopt when some
/// root is not rational.
inline std::optional<std::vector<mpq_class>> rational_roots(const QPoly& p) {
  const int deg = p.degree();
  std::vector<mpq_class> out;
  if (deg <= 0) return out;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) C(i, deg - 1) = -mpq_class(p.coeff(i) / p.lead()).get_d();
  Eigen::ComplexEigenSolver<Eigen::MatrixXd> es(C, false);
  for (int i = 0; i < deg; ++i) {
    const auto z = es.eigenvalues()(i);
    if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z))) return std::nullopt;
    const mpq_class a = rationalize(z.real());
    if (!is_zero(p.eval(a))) return std::nullopt;
    for (const auto& b : out)
      if (b == a) return std::nullopt;
    out.push_back(a);
  }
  return out;
}

inline QPoly specialize_coeffs(const RPoly& P, const mpq_class& delta0, bool& ok) {
  std::vector<mpq_class> c;
  ok = true;
  for (int i = 0; i <= P.degree(); ++i) {
    auto v = P.coeff(i).eval_exact(delta0);
    if (!v) {
      ok = false;
      return {};
    }
    c.push_back(*v);
  }
  QPoly out(std::move(c));
  if (out.degree() != P.degree()) ok = false;
  return out;
}

/// Newton lifting of a simple root a0 of P(delta0) to precision eps^N.
inline QPoly lift_root(const RPoly& P, const mpq_class& delta0, const mpq_class& a0, int N) {
  std::vector<QPoly> coeffs;
  for (int i = 0; i <= P.degree(); ++i) coeffs.push_back(series_at(P.coeff(i), delta0, N));
  auto eval = [&](const std::vector<QPoly>& c, const QPoly& x) {
    QPoly acc;
    for (size_t i = c.size(); i-- > 0;) acc = series_mul(acc, x, N) + c[i];
    return acc;
  };
  std::vector<QPoly> dcoeffs;
  for (size_t i = 1; i < coeffs.size(); ++i) dcoeffs.push_back(coeffs[i].scaled(mpq_class(static_cast<long>(i))));
  QPoly a(a0);
  for (int prec = 1; prec < N; prec *= 2) {
    const QPoly f = eval(coeffs, a);
    const QPoly df = eval(dcoeffs, a);
    a = a - series_mul(f, series_inverse(df, N), N);
  }
  return a;
}

}  // namespace detail

/// Distinct roots of a squarefree P in Q(delta), or nullopt when P does not
/// split into linear factors over Q(delta).
inline std::optional<std::vector<RatFunc>> roots_in_field(const RPoly& P) {
  std::vector<RatFunc> out;
  if (P.degree() <= 0) return out;
  static const std::vector<mpq_class> points = {mpq_class(5, 2), mpq_class(7, 3), mpq_class(3),
                                                mpq_class(11, 4), mpq_class(13, 5), mpq_class(17, 6),
                                                mpq_class(4), mpq_class(19, 7)};
  for (const mpq_class& delta0 : points) {
    bool ok = false;
    const QPoly p0 = detail::specialize_coeffs(P, delta0, ok);
    if (!ok || gcd(p0, p0.derivative()).degree() > 0) continue;
    auto r0 = detail::rational_roots(p0);
    if (!r0) return std::nullopt;
    for (const mpq_class& a0 : *r0) {
      std::optional<RatFunc> root;
      for (int N = 16; N <= 256 && !root; N *= 2) {
        auto cand = detail::reconstruct(detail::lift_root(P, delta0, a0, N), N, delta0);
        if (cand && is_zero(P.eval(*cand))) root = cand;
      }
      if (!root) return std::nullopt;
      out.push_back(*root);
    }
    return out;
  }
  return std::nullopt;
}

struct ExactTerm {
  RatFunc lambda;
  int q = 0;
  RatFunc c;
};

/// mu_p = sum c binom(p-k0+1, q) lambda^(p-k0+1-q) for p >= k0.
struct ExactClosedForm {
  int k0 = 0;
  RPoly minimal_polynomial;
  std::vector<RatFunc> eigenvalues;
  std::vector<int> multiplicities;
  std::vector<ExactTerm> terms;
  std::vector<RatFunc> head;  // mu_p for 0 <= p < k0

  RatFunc moment(long p) const {
    if (p < 0) throw ArgumentError("exact moments are indexed by p >= 0");
    if (p < k0) return head[static_cast<size_t>(p)];
    return series(p - k0 + 1);
  }

  /// The closed form at exponent e = p - k0 + 1.
  RatFunc series(long e) const {
    RatFunc total;
    for (const auto& term : terms) {
      if (e < term.q) continue;
      mpz_class binom;
      mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(e), static_cast<unsigned long>(term.q));
      total = total + term.c * RatFunc(mpq_class(binom)) * term.lambda.pow(e - term.q);
    }
    return total;
  }
};

namespace detail {

struct ExactSequence {
  std::vector<RatFunc> s;  // s_e = normalisation * eta(M^e xi), e = 0..count-1
  RPoly minimal_polynomial;
};

/// Iterates the normalised transfer operator on exact states.
inline ExactSequence exact_sequence(const PowerForm& pf, int extra, const TransferLimits& limits) {
  if (pf.E_tilde.arity().value() != 2) throw ArgumentError("exact transfer needs n = 2");
  const auto tl = exact_tl();
  const RatFunc c2 = vertex_norm_sq_exact();
  const RatFunc kappa = c2.pow(pf.E_tilde.vertex_count() / 2);
  const RatFunc norm = c2.pow((pf.S_plus.vertex_count() + pf.S_minus.vertex_count()) / 2) / RatFunc::loop_d();

  using State = TemperleyLieb<Laurent>::State;
  State w = tl.empty();
  tl.apply(w, {LayerKind::cup, 0});
  w = run_layers(tl, std::move(w), pf.S_plus.layers(), 1);
  auto eta = [&](const State& v) {
    State b = run_layers(tl, v, pf.S_minus.layers(), 1);
    tl.apply(b, {LayerKind::cap, 0});
    return tl.close(b).to_ratfunc();
  };

  std::map<Matching, int> index;
  struct Row {
    int pivot;
    std::map<int, RatFunc> v;
    std::vector<RatFunc> comb;
  };
  std::vector<Row> rows;
  ExactSequence out;
  std::optional<RPoly> minpoly;
  int total = -1;
  for (int e = 0; total < 0 || e < total; ++e) {
    out.s.push_back(norm * kappa.pow(e) * eta(w));
    if (!minpoly) {
      std::map<int, RatFunc> v;
      for (const auto& [m, x] : w) {
        auto [it, inserted] = index.emplace(m, static_cast<int>(index.size()));
        if (index.size() > limits.max_tl_dimension) throw ResourceError("exact transfer state space exceeds cap");
        v[it->second] = kappa.pow(e) * x.to_ratfunc();
      }
      std::vector<RatFunc> comb(static_cast<size_t>(e + 1), RatFunc());
      comb[static_cast<size_t>(e)] = RatFunc(1);
      for (const Row& row : rows) {
        auto it = v.find(row.pivot);
        if (it == v.end()) continue;
        const RatFunc f = it->second / row.v.at(row.pivot);
        for (const auto& [k, x] : row.v) {
          RatFunc y = v[k] - f * x;
          if (is_zero(y)) v.erase(k);
          else v[k] = y;
        }
        for (size_t j = 0; j < row.comb.size(); ++j) comb[j] = comb[j] - f * row.comb[j];
      }
      if (v.empty()) {
        minpoly = RPoly(comb);
        out.minimal_polynomial = *minpoly;
        total = std::max(e + 1 + extra, 11);
      } else {
        const int pivot = v.begin()->first;
        rows.push_back({pivot, std::move(v), std::move(comb)});
        if (rows.size() > 64) throw ResourceError("cyclic space of the transfer operator exceeds 64");
      }
    }
    State next = run_layers(tl, std::move(w), pf.E_tilde.layers(), 1);
    w = std::move(next);
  }
  return out;
}

/// Solves A x = b over Q(delta); A square and nonsingular.
inline std::vector<RatFunc> solve_exact(std::vector<std::vector<RatFunc>> A, std::vector<RatFunc> b) {
  const size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && is_zero(A[piv][col])) ++piv;
    ensure(piv < n, "singular exact system");
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (size_t r = 0; r < n; ++r) {
      if (r == col || is_zero(A[r][col])) continue;
      const RatFunc f = A[r][col] / A[col][col];
      for (size_t k = col; k < n; ++k) A[r][k] = A[r][k] - f * A[col][k];
      b[r] = b[r] - f * b[col];
    }
  }
  for (size_t i = 0; i < n; ++i) b[i] = b[i] / A[i][i];
  return b;
}

}  // namespace detail

/// Exact closed form of the moments of a power form at symbolic d, or nullopt
/// when the minimal polynomial does not split over Q(delta). The head is left
/// empty; callers fill it from direct evaluation.
inline std::optional<ExactClosedForm> exact_closed_form(const PowerForm& pf, const TransferLimits& limits = {}) {
  const detail::ExactSequence seq = detail::exact_sequence(pf, 4, limits);
  const RPoly& P = seq.minimal_polynomial;
  ExactClosedForm out;
  out.k0 = pf.k0;
  out.minimal_polynomial = P;
  const RPoly g = gcd(P, P.derivative());
  const RPoly squarefree = RPoly::divmod(P, g).first.monic();
  auto roots = roots_in_field(squarefree);
  if (!roots) return std::nullopt;
  for (const RatFunc& root : *roots) {
    const RPoly linear(std::vector<RatFunc>{-root, RatFunc(1)});
    RPoly rest = P;
    int mult = 0;
    for (;;) {
      auto [q, r] = RPoly::divmod(rest, linear);
      if (!r.is_zero_poly()) break;
      rest = q;
      ++mult;
    }
    ensure(mult > 0, "lifted root does not divide the minimal polynomial");
    out.eigenvalues.push_back(root);
    out.multiplicities.push_back(mult);
  }
  const auto r = static_cast<size_t>(P.degree());
  std::vector<std::pair<size_t, int>> unknowns;
  for (size_t l = 0; l < out.eigenvalues.size(); ++l)
    for (int q = 0; q < out.multiplicities[l]; ++q) unknowns.emplace_back(l, q);
  ensure(unknowns.size() == r, "multiplicities do not add up to the degree");
  auto basis = [&](size_t e, size_t l, int q) {
    if (static_cast<long>(e) < q) return RatFunc();
    mpz_class binom;
    mpz_bin_uiui(binom.get_mpz_t(), e, static_cast<unsigned long>(q));
    return RatFunc(mpq_class(binom)) * out.eigenvalues[l].pow(static_cast<long>(e) - q);
  };
  std::vector<std::vector<RatFunc>> A(r, std::vector<RatFunc>(r));
  std::vector<RatFunc> b(r);
  for (size_t e = 0; e < r; ++e) {
    for (size_t u = 0; u < r; ++u) A[e][u] = basis(e, unknowns[u].first, unknowns[u].second);
    b[e] = seq.s[e];
  }
  const auto C = detail::solve_exact(std::move(A), std::move(b));
  for (size_t u = 0; u < r; ++u)
    if (!is_zero(C[u])) out.terms.push_back({out.eigenvalues[unknowns[u].first], unknowns[u].second, C[u]});
  for (size_t e = 0; e < seq.s.size(); ++e)
    if (out.series(static_cast<long>(e)) != seq.s[e])
      throw InvariantError("exact closed form disagrees with the transfer sequence at e = " + std::to_string(e));
  return out;
}

}  // namespace thompson
