#pragma once

// Backends that turn closed tangles into numbers: the trivalent category at
// loop parameter d (through Temperley-Lieb) and concrete tensor models.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>

#include <json.hpp>

#include "thompson/element.hpp"
#include "thompson/rational.hpp"
#include "thompson/tangle.hpp"
#include "thompson/tensor.hpp"
#include "thompson/tl.hpp"

namespace thompson {

using Complex = std::complex<double>;

struct TrivalentParams {
  std::string spec;                  // as given: "3", "7/2", "cos:7", ...
  double d = 3.0;
  double delta = 2.0;
  double t = 0.5;
  std::optional<mpq_class> d_exact;  // set when d is rational
  double vertex_norm_sq = 1.0;       // c^2, one factor per pair of vertices
};

namespace detail {

inline bool admissible(double d) {
  if (d >= 3.0 - 1e-12) return true;
  // d = 4 cos^2(pi/k) - 1 for an integer k >= 6
  const double c = std::sqrt((d + 1.0) / 4.0);
  if (!(c > 0.0 && c < 1.0)) return false;
  const double k = std::numbers::pi / std::acos(c);
  return k >= 6.0 - 1e-9 && std::abs(k - std::round(k)) < 1e-7;
}

inline std::optional<mpq_class> parse_rational(const std::string& s) {
  try {
    size_t slash = s.find('/');
    if (slash != std::string::npos) {
      mpq_class q(s);
      q.canonicalize();
      return q;
    }
    size_t dot = s.find('.');
    if (dot == std::string::npos) return mpq_class(mpz_class(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    mpz_class den = 1;
    for (size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    mpq_class q(mpz_class(digits), den);
    q.canonicalize();
    return q;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// Raw theta graph of the TL realisation, as a function of delta.
inline RatFunc raw_theta() {
  static const RatFunc theta = [] {
    const Tangle t{{LayerKind::cup, 0}, {LayerKind::split, 1}, {LayerKind::merge, 1}, {LayerKind::cap, 0}};
    return evaluate_tangle(exact_tl(), t).to_ratfunc();
  }();
  return theta;
}

/// Squared vertex normalisation making split-then-merge the identity edge:
/// c^2 = d / theta_raw.
inline RatFunc vertex_norm_sq_exact() {
  const RatFunc theta = raw_theta();
  if (is_zero(theta)) throw CalibrationError("raw theta graph vanishes identically");
  return RatFunc::loop_d() / theta;
}

/// Parses d ("3", "2.5", "7/2", "cos:k") and self-calibrates the vertex.
inline TrivalentParams calibrate(const std::string& spec) {
  TrivalentParams p;
  p.spec = spec;
  if (spec.rfind("cos:", 0) == 0) {
    long k = 0;
    try {
      k = std::stol(spec.substr(4));
    } catch (const std::exception&) {
      throw ArgumentError("bad d specification '" + spec + "'");
    }
    if (k < 6) throw ArgumentError("cos:k needs k >= 6, got " + std::to_string(k));
    const double c = std::cos(std::numbers::pi / static_cast<double>(k));
    p.d = 4.0 * c * c - 1.0;
    if (k == 6) p.d_exact = mpq_class(2);
  } else {
    p.d_exact = detail::parse_rational(spec);
    if (!p.d_exact) throw ArgumentError("bad d specification '" + spec + "'");
    p.d = p.d_exact->get_d();
  }
  if (!detail::admissible(p.d)) throw ArgumentError("inadmissible loop parameter d = " + spec);
  p.delta = std::sqrt(p.d + 1.0);
  p.t = (p.d - 2.0) / (p.d - 1.0);

  const auto tl = numeric_tl(p.delta);
  const double theta = evaluate_tangle(tl, Tangle{{LayerKind::cup, 0}, {LayerKind::split, 1}, {LayerKind::merge, 1}, {LayerKind::cap, 0}});
  if (std::abs(theta) < 1e-300) throw CalibrationError("raw theta graph vanishes at d = " + spec);
  p.vertex_norm_sq = p.d / theta;

  const double loop = evaluate_tangle(tl, Tangle{{LayerKind::cup, 0}, {LayerKind::cap, 0}});
  const double tadpole = evaluate_tangle(tl, Tangle{{LayerKind::cup, 0}, {LayerKind::merge, 0}, {LayerKind::split, 0}, {LayerKind::cap, 0}});
  if (std::abs(loop - p.d) > 1e-9 * std::max(1.0, p.d) || std::abs(tadpole) > 1e-9)
    throw CalibrationError("calibration checks failed at d = " + spec);
  return p;
}

/// Exact value of f(delta) at the backend's d, when d is rational and f is
/// even in delta (or delta itself is rational).
inline std::optional<mpq_class> specialize(const RatFunc& f, const TrivalentParams& p) {
  if (!p.d_exact) return std::nullopt;
  const mpq_class delta_sq = *p.d_exact + 1;
  if (auto v = f.eval_at_delta_squared(delta_sq)) return v;
  mpz_class num_root, den_root;
  mpz_class num = delta_sq.get_num(), den = delta_sq.get_den();
  mpz_sqrt(num_root.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(den_root.get_mpz_t(), den.get_mpz_t());
  if (num_root * num_root == num && den_root * den_root == den) return f.eval_exact(mpq_class(num_root, den_root));
  return std::nullopt;
}

class Backend {
 public:
  static Backend trivalent(TrivalentParams p) {
    Backend b;
    b.tl_ = true;
    b.params_ = std::move(p);
    return b;
  }
  static Backend tensor(TensorModel m) {
    if (m.unitarity_defect() > 1e-9) throw ArgumentError("tensor '" + m.name + "' is not unitary");
    Backend b;
    b.tl_ = false;
    b.model_ = std::move(m);
    return b;
  }

  /// {"backend":"tl","d":"3"} or {"backend":"tensor","model":"coloring3" | nested arrays}.
  static Backend from_json(const nlohmann::json& cfg, Arity arity) {
    const std::string kind = cfg.value("backend", "tl");
    if (kind == "tl") {
      if (arity.value() != 2) throw ArgumentError("the trivalent backend needs n = 2");
      const auto& d = cfg.contains("d") ? cfg.at("d") : nlohmann::json("3");
      return trivalent(calibrate(d.is_string() ? d.get<std::string>() : d.dump()));
    }
    if (kind == "tensor") {
      const auto& model = cfg.contains("model") ? cfg.at("model") : nlohmann::json("coloring3");
      TensorModel m = model.is_string() ? named_model(model.get<std::string>()) : TensorModel::from_json(model, arity);
      if (!(m.arity() == arity)) throw ArgumentError("tensor arity does not match n");
      return tensor(std::move(m));
    }
    throw ArgumentError("unknown backend '" + kind + "'");
  }

  static TensorModel named_model(const std::string& name) {
    if (name == "coloring3" || name == "coloring") return TensorModel::coloring3();
    throw ArgumentError("unknown tensor model '" + name + "'");
  }

  bool is_tl() const { return tl_; }
  Arity arity() const { return tl_ ? Arity(2) : model_->arity(); }
  const TrivalentParams& params() const { return *params_; }
  const TensorModel& model() const { return *model_; }

  /// Value of a single closed loop of the category.
  double loop_value() const { return tl_ ? params_->d : static_cast<double>(model_->kappa()); }

  /// Normalisation factor per pair of vertices.
  double vertex_pair_factor() const { return tl_ ? params_->vertex_norm_sq : 1.0; }

  std::string describe() const {
    return tl_ ? "tl(d=" + params_->spec + ")" : "tensor(" + model_->name + ")";
  }

 private:
  bool tl_ = true;
  std::optional<TrivalentParams> params_;
  std::optional<TensorModel> model_;
};

/// Normalised value of a closed tangle.
inline Complex evaluate_closed(const Backend& b, const Tangle& t) {
  if (strands_after(t, 0, b.arity()) != 0) throw ArgumentError("tangle is not closed");
  const int v = vertex_count(t);
  if (b.is_tl()) {
    const double raw = evaluate_tangle(numeric_tl(b.params().delta), t);
    return raw * std::pow(b.params().vertex_norm_sq, 0.5 * v);
  }
  return evaluate_tangle(TensorEngine<Complex>(b.model().tensor), t);
}

/// Normalised value of a closed trivalent tangle as an element of Q(delta).
/// Needs an even number of vertices.
inline RatFunc evaluate_closed_exact(const Tangle& t) {
  if (strands_after(t, 0, Arity(2)) != 0) throw ArgumentError("tangle is not closed");
  const int v = vertex_count(t);
  if (v % 2) throw ArgumentError("closed trivalent tangles have an even vertex count");
  return evaluate_tangle(exact_tl(), t).to_ratfunc() * vertex_norm_sq_exact().pow(v / 2);
}

/// <pi(g) Omega, Omega>: the closed pair of trees divided by the loop value.
inline Complex coefficient(const GroupElement& g, const Backend& b) {
  if (!(g.arity() == b.arity())) throw ArgumentError("element arity does not match the backend");
  return evaluate_closed(b, closure_tangle(g.diagram())) / b.loop_value();
}

inline RatFunc coefficient_exact(const GroupElement& g) {
  if (g.arity().value() != 2) throw ArgumentError("exact trivalent evaluation needs n = 2");
  return evaluate_closed_exact(closure_tangle(g.diagram())) / RatFunc::loop_d();
}

}  // namespace thompson
