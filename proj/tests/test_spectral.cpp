#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "thompson/measure.hpp"

using namespace thompson;

namespace {

const Arity two(2);
const GroupElement e = GroupElement::identity(two);

Backend tl(const std::string& d) { return Backend::trivalent(calibrate(d)); }

ClosedFormOptions exact_options() {
  ClosedFormOptions o;
  o.exact = true;
  return o;
}

RatFunc d_sym() { return RatFunc::loop_d(); }
RatFunc t_sym() { return (d_sym() - RatFunc(2)) / (d_sym() - RatFunc(1)); }

/// t^(k+2) + 1/d - t/(1-d)^(k+1) - 1/(d (1-d)^(k+1)), k >= 1.
RatFunc x_moment(long k) {
  const RatFunc d = d_sym(), t = t_sym(), one_minus_d = RatFunc(1) - d;
  const RatFunc inv = one_minus_d.pow(-(k + 1));
  return t.pow(k + 2) + RatFunc(1) / d - t * inv - inv / d;
}

double x_moment(double d, long k) {
  const double t = (d - 2) / (d - 1), r = std::pow(1 - d, -(k + 1.0));
  return std::pow(t, k + 2) + 1 / d - t * r - r / d;
}

double poisson(double t, double th) { return (1 - t * t) / (1 - 2 * t * std::cos(th) + t * t); }

double n_density(double t, double th) {
  return (2 * std::pow(t, 3) - 2 * std::pow(t, 4) * std::cos(th)) / (1 - 2 * t * std::cos(th) + t * t) -
         2 * std::pow(t, 3) + 1;
}

double x_density(double d, double th) {
  const double t = (d - 2) / (d - 1), c = std::cos(th);
  return (2 * t * t - 2 * t * t * t * c) / (1 + t * t - 2 * t * c) -
         (t + 1 / d) * (2 - 2 * d - 2 * c) / ((1 - d) * (1 - d) - 2 * (1 - d) * c + 1) +
         (2 * t * d * d - 2 * t * d + 1 - d * d + 2 * d) / (d * (1 - d));
}

SpectralMeasure plain_measure(const std::string& element, const std::string& d) {
  return measure_for_vector(fixtures::element(element), {{1.0, e}}, tl(d));
}

double theta_at(int k) { return 2 * std::numbers::pi * k / 64; }

}  // namespace

TEST(Transfer, IdentityGivesConstantMoments) {
  const PowerForm pf = power_form(e, e, e);
  for (const Backend& b : {tl("3"), Backend::tensor(TensorModel::coloring3())}) {
    const TransferSystem ts = build_transfer(pf, b);
    for (long p = ts.k0; p <= 6; ++p) EXPECT_NEAR(std::abs(ts.moment(p) - 1.0), 0.0, 1e-13);
    const MomentClosedForm cf = moments_closed_form(ts);
    ASSERT_EQ(cf.terms.size(), 1u);
    EXPECT_NEAR(std::abs(cf.terms[0].lambda - 1.0), 0.0, 1e-12);
  }
}

TEST(Transfer, SpectralRadiusAtMostOne) {
  for (const auto& s : {fixtures::A, fixtures::N, fixtures::X})
    for (const std::string d : {"2", "3", "cos:7"}) {
      const auto cf = closed_form_for(fixtures::element(s), e, e, tl(d));
      EXPECT_LE(cf.spectral_radius, 1.0 + 1e-9) << s << " d=" << d;
    }
}

TEST(ClosedForm, JordanBlock) {
  TransferSystem ts;
  ts.M = SparseC(2, 2);
  ts.M.insert(0, 0) = 0.5;
  ts.M.insert(0, 1) = 1.0;
  ts.M.insert(1, 1) = 0.5;
  ts.xi = VectorC::Ones(2);
  ts.eta = VectorC::Ones(2);
  ts.k0 = 1;
  const MomentClosedForm cf = moments_closed_form(ts);
  Eigen::Matrix2cd M;
  M << 0.5, 1.0, 0.0, 0.5;
  Eigen::Vector2cd v = Eigen::Vector2cd::Ones();
  for (long p = 1; p <= 10; ++p) {
    v = M * v;
    EXPECT_NEAR(std::abs(cf.series(p) - v.sum()), 0.0, 1e-12) << p;
  }
  int max_q = 0;
  for (const auto& t : cf.terms) max_q = std::max(max_q, t.q);
  EXPECT_EQ(max_q, 1);
}

TEST(ClosedForm, AExact) {
  const auto cf = closed_form_for(fixtures::element(fixtures::A), e, e, tl("3"), exact_options());
  ASSERT_TRUE(cf.exact);
  for (long p = 0; p <= 10; ++p) EXPECT_EQ(cf.exact->moment(p), t_sym().pow(p)) << p;
  const auto inv = closed_form_for(group_inverse(fixtures::element(fixtures::A)), e, e, tl("3"), exact_options());
  ASSERT_TRUE(inv.exact);
  for (long p = 1; p <= 10; ++p) EXPECT_EQ(inv.exact->moment(p), t_sym().pow(p)) << -p;
}

TEST(ClosedForm, NExact) {
  const GroupElement N = fixtures::element(fixtures::N);
  for (const GroupElement& g : {N, group_inverse(N)}) {
    const auto cf = closed_form_for(g, e, e, tl("3"), exact_options());
    ASSERT_TRUE(cf.exact);
    EXPECT_EQ(cf.exact->moment(0), RatFunc(1));
    for (long p = 1; p <= 10; ++p) EXPECT_EQ(cf.exact->moment(p), t_sym().pow(p + 3)) << p;
  }
}

TEST(ClosedForm, XExact) {
  const auto cf = closed_form_for(fixtures::element(fixtures::X), e, e, tl("3"), exact_options());
  ASSERT_TRUE(cf.exact);
  for (long p = 1; p <= 10; ++p) EXPECT_EQ(cf.exact->moment(p), x_moment(p)) << p;
  const RatFunc allowed[] = {t_sym(), RatFunc(1), RatFunc(1) / (RatFunc(1) - d_sym())};
  EXPECT_FALSE(cf.exact->eigenvalues.empty());
  for (const RatFunc& lambda : cf.exact->eigenvalues) {
    bool found = false;
    for (const RatFunc& a : allowed) found = found || lambda == a;
    EXPECT_TRUE(found) << lambda.str();
  }
  const auto roots = roots_in_field(cf.exact->minimal_polynomial);
  ASSERT_TRUE(roots);
  EXPECT_EQ(roots->size(), cf.exact->eigenvalues.size());
}

TEST(ClosedForm, ExactAndNumericPathsAgree) {
  for (const auto& s : {fixtures::A, fixtures::N, fixtures::X}) {
    const GroupElement g = fixtures::element(s);
    for (const std::string d : {"3", "cos:7"}) {
      const auto ex = closed_form_for(g, e, e, tl(d), exact_options());
      const auto nu = closed_form_for(g, e, e, tl(d));
      for (long p = -10; p <= 10; ++p) EXPECT_NEAR(std::abs(ex.moment(p) - nu.moment(p)), 0.0, 1e-12) << s << " " << p;
    }
  }
}

TEST(ClosedForm, XNumericAtSeveralD) {
  const GroupElement X = fixtures::element(fixtures::X);
  for (const std::string d : {"3", "4", "cos:7", "cos:11"}) {
    const Backend b = tl(d);
    const auto cf = closed_form_for(X, e, e, b);
    for (long p = 1; p <= 10; ++p)
      EXPECT_NEAR(std::abs(cf.moment(p) - x_moment(b.params().d, p)), 0.0, 1e-12) << d << " " << p;
  }
}

TEST(ClosedForm, RandomWordsMatchDirect) {
  const auto words = fixtures::random_words();
  for (const std::string d : {"2", "3", "cos:7"}) {
    const Backend b = tl(d);
    for (size_t w = 0; w < words.size(); w += 3) {
      const GroupElement g = fixtures::element(words[w]);
      const auto cf = closed_form_for(g, e, e, b);
      for (long p = cf.k0; p <= cf.k0 + 8; ++p)
        EXPECT_NEAR(std::abs(cf.moment(p) - moments_direct(g, e, e, p, b)), 0.0, 1e-9) << words[w] << " p=" << p;
      EXPECT_LE(cf.spectral_radius, 1.0 + 1e-9);
      for (const auto& t : cf.terms) {
        if (std::abs(std::abs(t.lambda) - 1.0) < 1e-7 && t.q > 0) {
          EXPECT_LT(std::abs(t.c), 1e-9);
        }
      }
    }
  }
}

TEST(ClosedForm, ColoringBackendMatchesDirect) {
  const Backend b = Backend::tensor(TensorModel::coloring3());
  for (const auto& s : {fixtures::A, fixtures::X}) {
    const GroupElement g = fixtures::element(s);
    const auto cf = closed_form_for(g, e, e, b);
    for (long p = -8; p <= 8; ++p) EXPECT_NEAR(std::abs(cf.moment(p) - moments_direct(g, e, e, p, b)), 0.0, 1e-9);
  }
}

TEST(ClosedForm, DirectMomentsAreCapped) {
  EXPECT_THROW(moments_direct(fixtures::element(fixtures::A), e, e, 5000, tl("3")), ResourceError);
}

TEST(Measure, APoissonKernel) {
  const SpectralMeasure sm = plain_measure(fixtures::A, "3");
  EXPECT_TRUE(sm.atoms.empty());
  for (int k = 0; k < 64; ++k) EXPECT_NEAR(sm.density(theta_at(k)), poisson(0.5, theta_at(k)), 1e-10);
  EXPECT_NEAR(sample_density(sm, 8)[0].second, 3.0, 1e-12);
  EXPECT_TRUE(failed_checks(sm).empty());
}

TEST(Measure, NDensity) {
  const SpectralMeasure sm = plain_measure(fixtures::N, "3");
  EXPECT_TRUE(sm.atoms.empty());
  for (int k = 0; k < 64; ++k) EXPECT_NEAR(sm.density(theta_at(k)), n_density(0.5, theta_at(k)), 1e-10);
  EXPECT_TRUE(failed_checks(sm).empty());
}

TEST(Measure, XAtTwoIsTwoAtoms) {
  const SpectralMeasure sm = plain_measure(fixtures::X, "2");
  ASSERT_EQ(sm.atoms.size(), 2u);
  for (const Atom& a : sm.atoms) {
    EXPECT_NEAR(std::abs(std::abs(a.point.real()) - 1.0), 0.0, 1e-9);
    EXPECT_NEAR(a.weight, 0.5, 1e-12);
  }
  EXPECT_NEAR(std::abs(sm.atoms[0].point + sm.atoms[1].point), 0.0, 1e-9);
  EXPECT_TRUE(sm.density_terms.empty());
  for (int k = 0; k < 64; ++k) EXPECT_NEAR(sm.density(theta_at(k)), 0.0, 1e-12);
  EXPECT_TRUE(failed_checks(sm).empty());
  EXPECT_TRUE(sm.checks.atoms_in_plain_spectrum);
}

TEST(Measure, XAboveTwoHasAtomOneOverD) {
  for (const std::string d : {"3", "4", "cos:7"}) {
    const SpectralMeasure sm = plain_measure(fixtures::X, d);
    const double dd = tl(d).params().d;
    ASSERT_EQ(sm.atoms.size(), 1u) << d;
    EXPECT_NEAR(std::abs(sm.atoms[0].point - 1.0), 0.0, 1e-9);
    EXPECT_NEAR(sm.atoms[0].weight, 1.0 / dd, 1e-12);
    for (int k = 0; k < 64; ++k) EXPECT_NEAR(sm.density(theta_at(k)), x_density(dd, theta_at(k)), 1e-10) << d;
    EXPECT_LT(sm.checks.round_trip_error, 1e-7);
    EXPECT_TRUE(failed_checks(sm).empty()) << d;
    EXPECT_TRUE(sm.checks.atoms_in_plain_spectrum);
  }
}

TEST(Measure, XDensityMassAtThree) {
  const SpectralMeasure sm = plain_measure(fixtures::X, "3");
  double mass = 0.0;
  for (const auto& [th, f] : sample_density(sm, 16384)) mass += f;
  EXPECT_NEAR(mass / 16384, 2.0 / 3.0, 1e-10);
}

TEST(Measure, TranslatedVectorSameMeasure) {
  const GroupElement A = fixtures::element(fixtures::A);
  const Backend b = tl("3");
  const auto base = moment_closed_form(A, {{1.0, e}}, b);
  const auto moved = moment_closed_form(A, {{1.0, A}}, b);
  for (long p = -10; p <= 10; ++p) EXPECT_NEAR(std::abs(base.moment(p) - moved.moment(p)), 0.0, 1e-12);
}

TEST(Measure, TwoTermVectorRoundTrip) {
  const GroupElement A = fixtures::element(fixtures::A), X = fixtures::element(fixtures::X);
  const Backend b = tl("3");
  const std::vector<PsiTerm> psi{{1.0, e}, {1.0, A}};
  const auto cf = moment_closed_form(X, psi, b);
  const double norm = psi_norm_sq(psi, b).real();
  for (long p = -8; p <= 8; ++p) {
    Complex direct = 0.0;
    for (const auto& i : psi)
      for (const auto& j : psi) direct += moments_direct(X, group_inverse(j.element), i.element, p, b);
    EXPECT_NEAR(std::abs(cf.moment(p) - direct / norm), 0.0, 1e-10) << p;
  }
  EXPECT_NEAR(std::abs(cf.moment(0) - 1.0), 0.0, 1e-12);
  const SpectralMeasure sm = measure_for_vector(X, psi, b);
  EXPECT_LT(sm.checks.round_trip_error, 1e-7);
  EXPECT_TRUE(failed_checks(sm).empty());
}

TEST(Measure, ZeroVectorRejected) {
  EXPECT_THROW(moment_closed_form(fixtures::element(fixtures::A), {{1.0, e}, {-1.0, e}}, tl("3")), ArgumentError);
}

TEST(Measure, RandomWordsAreSound) {
  const auto words = fixtures::random_words();
  for (const std::string d : {"2", "3"})
    for (size_t w = 1; w < words.size(); w += 4) {
      const SpectralMeasure sm = measure_for_vector(fixtures::element(words[w]), {{1.0, e}}, tl(d));
      EXPECT_TRUE(failed_checks(sm).empty()) << words[w] << " d=" << d;
      EXPECT_TRUE(sm.checks.atoms_in_plain_spectrum);
    }
}

TEST(Measure, InconsistentClosedFormsRejected) {
  MomentClosedForm cf;
  cf.k0 = 1;
  cf.head = {1.0};
  cf.terms = {{1.0, 1, 0.5}};
  EXPECT_THROW(spectral_measure(cf), InconsistencyError);
  cf.terms = {{1.2, 0, 0.5}};
  EXPECT_THROW(spectral_measure(cf), InconsistencyError);
  cf.terms = {{1.0, 0, -0.5}};
  EXPECT_THROW(spectral_measure(cf), InconsistencyError);
}

TEST(Measure, Serialisation) {
  const SpectralMeasure sm = plain_measure(fixtures::X, "2");
  const nlohmann::json j = to_json(sm);
  EXPECT_EQ(j["atoms"].size(), 2u);
  EXPECT_TRUE(j["densityTerms"].empty());
  EXPECT_TRUE(j.contains("trigCorrection"));
  const std::string csv = density_csv(sample_density(sm, 4));
  EXPECT_EQ(csv.rfind("theta,f\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_THROW(sample_density(sm, 0), ArgumentError);
}
