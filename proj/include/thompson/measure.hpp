#pragma once

// Spectral measure of pi(g) at a vector: atoms from the closed-form terms on
// the unit circle, and the density
//   f(theta) = nu_0 + 2 Re( sum_{0<p<k0} nu_p z^p + z^(k0-1) sum c g_q(lambda, z) ),
// z = e^(-i theta), where nu_p are the moments minus the atomic part and
//   g_0 = lambda z / (1 - lambda z),  g_q = z^q / (1 - lambda z)^(q+1).

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "thompson/moments.hpp"

namespace thompson {

struct Atom {
  Complex point;
  double weight = 0.0;
  Complex raw_weight;  // before taking the real part and clamping
};

struct MeasureOptions {
  double circle_tol = 1e-7;
  int positivity_samples = 4096;
  int quadrature_points = 16384;
  int round_trip_range = 10;
  int cesaro_terms = 2000;
};

struct MeasureChecks {
  double mass_error = 0.0;
  double min_density = 0.0;
  double max_imaginary = 0.0;
  double round_trip_error = 0.0;
  double cesaro_error = 0.0;
  bool atoms_in_plain_spectrum = true;
};

struct SpectralMeasure {
  int k0 = 1;
  std::vector<Atom> atoms;
  std::vector<MomentTerm> density_terms;     // |lambda| < 1
  std::vector<std::pair<long, Complex>> trig_correction;  // nu_p for 0 <= p < k0
  MeasureChecks checks;

  /// The density before discarding its imaginary part.
  Complex density_complex(double theta) const {
    const Complex z = std::polar(1.0, -theta);
    Complex series = 0.0;
    for (const auto& t : density_terms) {
      const Complex w = 1.0 - t.lambda * z;
      series += t.q == 0 ? t.c * t.lambda * z / w : t.c * std::pow(z, t.q) / std::pow(w, t.q + 1);
    }
    series *= std::pow(z, k0 - 1);
    Complex nu0 = 0.0;
    for (const auto& [p, nu] : trig_correction) {
      if (p == 0) nu0 = nu;
      else series += nu * std::pow(z, static_cast<double>(p));
    }
    return nu0 + series + std::conj(series);
  }

  double density(double theta) const { return density_complex(theta).real(); }

  /// mu_p = sum w lambda^p + (1/2pi) int f e^(ip theta), by N-point quadrature.
  Complex moment_from_measure(long p, int N) const {
    Complex s = 0.0;
    for (const auto& a : atoms) s += a.weight * std::pow(a.point, static_cast<double>(p));
    Complex q = 0.0;
    for (int k = 0; k < N; ++k) {
      const double th = 2.0 * std::numbers::pi * k / N;
      q += density(th) * std::polar(1.0, static_cast<double>(p) * th);
    }
    return s + q / static_cast<double>(N);
  }
};

/// Atoms and density of the measure with moments mcf. Raises
/// InconsistencyError when the closed form cannot come from a unitary.
inline SpectralMeasure spectral_measure(const MomentClosedForm& mcf, const MeasureOptions& opt = {}) {
  SpectralMeasure sm;
  sm.k0 = mcf.k0;
  for (const auto& t : mcf.terms) {
    const double r = std::abs(t.lambda);
    if (std::abs(r - 1.0) < opt.circle_tol) {
      if (t.q > 0) {
        if (std::abs(t.c) > 1e-9) throw InconsistencyError("polynomially growing term on the unit circle");
        continue;
      }
      const Complex point = t.lambda / r;
      const Complex w = t.c * std::pow(point, 1.0 - mcf.k0);
      if (w.real() < -1e-9 || std::abs(w.imag()) > 1e-9)
        throw InconsistencyError("atom weight " + std::to_string(w.real()) + "+" + std::to_string(w.imag()) +
                                 "i is not a non-negative real");
      sm.atoms.push_back({point, std::max(0.0, w.real()), w});
    } else if (r > 1.0) {
      if (std::abs(t.c) > 1e-9) throw InconsistencyError("moment term with |lambda| > 1");
    } else {
      sm.density_terms.push_back(t);
    }
  }
  for (long p = 0; p < std::max(1, mcf.k0); ++p) {
    Complex nu = p < mcf.k0 ? mcf.moment(p) : Complex(0.0);
    for (const auto& a : sm.atoms) nu -= a.raw_weight * std::pow(a.point, static_cast<double>(p));
    sm.trig_correction.emplace_back(p, nu);
  }

  MeasureChecks& c = sm.checks;
  c.min_density = 1e300;
  for (int k = 0; k < opt.positivity_samples; ++k) {
    const Complex f = sm.density_complex(2.0 * std::numbers::pi * k / opt.positivity_samples);
    c.min_density = std::min(c.min_density, f.real());
    c.max_imaginary = std::max(c.max_imaginary, std::abs(f.imag()));
  }
  c.mass_error = std::abs(sm.moment_from_measure(0, opt.quadrature_points) - 1.0);
  for (long p = -opt.round_trip_range; p <= opt.round_trip_range; ++p)
    c.round_trip_error =
        std::max(c.round_trip_error, std::abs(sm.moment_from_measure(p, opt.quadrature_points) - mcf.moment(p)));
  for (const auto& a : sm.atoms) {
    Complex avg = 0.0;
    for (long p = 1; p <= opt.cesaro_terms; ++p) avg += std::pow(std::conj(a.point), static_cast<double>(p)) * mcf.moment(p);
    avg /= static_cast<double>(opt.cesaro_terms);
    c.cesaro_error = std::max(c.cesaro_error, std::abs(avg - a.weight));
  }
  return sm;
}

struct MeasureLimits {
  double mass = 1e-8;
  double positivity = -1e-8;
  double imaginary = 1e-10;
  double round_trip = 1e-7;
  double cesaro = 2e-3;
};

/// Names of the failed sanity checks; empty when the measure is sound.
inline std::vector<std::string> failed_checks(const SpectralMeasure& sm, const MeasureLimits& lim = {}) {
  std::vector<std::string> out;
  const auto& c = sm.checks;
  if (c.mass_error > lim.mass) out.push_back("mass");
  if (c.min_density < lim.positivity) out.push_back("positivity");
  if (c.max_imaginary > lim.imaginary) out.push_back("imaginary");
  if (c.round_trip_error > lim.round_trip) out.push_back("round-trip");
  if (c.cesaro_error > lim.cesaro) out.push_back("cesaro");
  for (const auto& a : sm.atoms)
    if (a.weight < 0.0 || a.weight > 1.0 + 1e-9) out.push_back("atom-weight");
  return out;
}

/// Points of the unit circle in the spectrum of the plain transfer operator of g.
inline std::vector<Complex> circle_spectrum(const GroupElement& g, const Backend& b, const ClosedFormOptions& opt = {}) {
  const GroupElement id = GroupElement::identity(g.arity());
  const TransferSystem ts = build_transfer(power_form(id, g, id), b, opt.limits);
  std::vector<Complex> out;
  if (ts.dimension() == 0) return out;
  Eigen::VectorXcd ev;
  if (static_cast<size_t>(ts.dimension()) <= opt.dense_radius_limit) {
    ev = Eigen::ComplexEigenSolver<MatrixC>(MatrixC(ts.M), false).eigenvalues();
  } else {
    ev = Eigen::ComplexEigenSolver<MatrixC>(minimal_realization(ts).A, false).eigenvalues();
  }
  for (const auto& cl : detail::cluster_eigenvalues(ev, opt))
    if (std::abs(std::abs(cl.center) - 1.0) < opt.circle_tol) out.push_back(cl.center);
  return out;
}

/// The spectral measure of pi(g) at psi = sum a_i pi(g_i) Omega (normalised).
inline SpectralMeasure measure_for_vector(const GroupElement& g, const std::vector<PsiTerm>& psi, const Backend& b,
                                          const ClosedFormOptions& copt = {}, const MeasureOptions& mopt = {}) {
  const MomentClosedForm mcf = moment_closed_form(g, psi, b, copt);
  SpectralMeasure sm = spectral_measure(mcf, mopt);
  if (!sm.atoms.empty()) {
    const auto spectrum = circle_spectrum(g, b, copt);
    for (const auto& a : sm.atoms) {
      bool found = false;
      for (const auto& z : spectrum) found = found || std::abs(z - a.point) < 1e-6;
      sm.checks.atoms_in_plain_spectrum = sm.checks.atoms_in_plain_spectrum && found;
    }
  }
  return sm;
}

/// num equally spaced samples (theta, f(theta)) on [0, 2 pi).
inline std::vector<std::pair<double, double>> sample_density(const SpectralMeasure& sm, int num) {
  if (num <= 0) throw ArgumentError("sample count must be positive");
  std::vector<std::pair<double, double>> out;
  for (int k = 0; k < num; ++k) {
    const double th = 2.0 * std::numbers::pi * k / num;
    out.emplace_back(th, sm.density(th));
  }
  return out;
}

inline nlohmann::json to_json(const SpectralMeasure& sm) {
  nlohmann::json j;
  j["k0"] = sm.k0;
  j["atoms"] = nlohmann::json::array();
  for (const auto& a : sm.atoms) j["atoms"].push_back({{"angle", std::arg(a.point)}, {"weight", a.weight}});
  j["densityTerms"] = nlohmann::json::array();
  for (const auto& t : sm.density_terms)
    j["densityTerms"].push_back({{"lambdaRe", t.lambda.real()}, {"lambdaIm", t.lambda.imag()}, {"q", t.q},
                                 {"cRe", t.c.real()}, {"cIm", t.c.imag()}});
  j["trigCorrection"] = nlohmann::json::array();
  for (const auto& [p, c] : sm.trig_correction)
    j["trigCorrection"].push_back({{"p", p}, {"cRe", c.real()}, {"cIm", c.imag()}});
  const auto& c = sm.checks;
  j["checks"] = {{"massError", c.mass_error},       {"minDensity", c.min_density},
                 {"maxImaginary", c.max_imaginary}, {"roundTripError", c.round_trip_error},
                 {"cesaroError", c.cesaro_error},   {"atomsInPlainSpectrum", c.atoms_in_plain_spectrum}};
  return j;
}

inline std::string density_csv(const std::vector<std::pair<double, double>>& samples) {
  std::string out = "theta,f\n";
  char buf[64];
  for (const auto& [th, f] : samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", th, f);
    out += buf;
  }
  return out;
}

}  // namespace thompson
