// Command-line front end for the strand diagram pipeline.
// Exit codes: 0 success, 2 bad arguments, 3 resource cap, 4 invariant failure.

#include <cstdio>
#include <functional>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "thompson/measure.hpp"
#include "thompson/relations.hpp"

using namespace thompson;

namespace {

struct Config {
  int n = 2;
  std::string backend = "tl";
  std::string d = "3";
  std::string model = "coloring3";
  std::string element;
  std::string element_file;
  std::vector<std::string> psi;
  long max = 10;
  int samples = 0;
  std::string out;
  bool exact = false;
};

// 15 significant digits: the closed forms are verified to about 1e-13.
std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x == 0.0 ? 0.0 : x);
  return buf;
}

GroupElement load_element(const Config& c) {
  const Arity a(c.n);
  if (!c.element.empty() == !c.element_file.empty()) throw ArgumentError("give exactly one of --element, --element-file");
  if (!c.element.empty()) return parse_element(c.element, a);
  std::ifstream in(c.element_file);
  if (!in) throw ArgumentError("cannot read " + c.element_file);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ArgumentError(std::string("malformed JSON: ") + ex.what());
  }
  GroupElement g(StrandDiagram::from_json(j));
  if (!(g.arity() == a)) throw ArgumentError("diagram arity does not match --n");
  return g;
}

Backend load_backend(const Config& c) {
  nlohmann::json cfg = {{"backend", c.backend}};
  if (c.backend == "tl") cfg["d"] = c.d;
  else if (!c.model.empty() && c.model.front() == '[') cfg["model"] = nlohmann::json::parse(c.model);
  else if (c.model.find(".json") != std::string::npos) {
    std::ifstream in(c.model);
    if (!in) throw ArgumentError("cannot read " + c.model);
    cfg["model"] = nlohmann::json::parse(in);
  } else cfg["model"] = c.model;
  return Backend::from_json(cfg, Arity(c.n));
}

/// Terms "coeff:element"; coeff is real or "re,im".
std::vector<PsiTerm> load_psi(const Config& c) {
  const GroupElement e = GroupElement::identity(Arity(c.n));
  if (c.psi.empty()) return {{1.0, e}};
  std::vector<PsiTerm> out;
  for (const auto& s : c.psi) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ArgumentError("--psi expects coeff:element, got '" + s + "'");
    const std::string coeff = s.substr(0, colon);
    Complex a;
    try {
      const auto comma = coeff.find(',');
      a = comma == std::string::npos ? Complex(std::stod(coeff), 0.0)
                                     : Complex(std::stod(coeff.substr(0, comma)), std::stod(coeff.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ArgumentError("bad coefficient '" + coeff + "'");
    }
    out.push_back({a, parse_element(s.substr(colon + 1), Arity(c.n))});
  }
  return out;
}

void emit(const Config& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw ArgumentError("cannot write " + c.out);
  f << text;
}

int cmd_reduce(const Config& c) {
  emit(c, load_element(c).diagram().encode() + "\n");
  return 0;
}

int cmd_essential(const Config& c) {
  const GroupElement g = load_element(c);
  const auto ed = essential_decomposition(g);
  const GroupElement e = GroupElement::identity(g.arity());
  const PowerForm pf = power_form(e, g, e, ed);
  nlohmann::json j;
  j["treePair"] = tree_pair_string(g);
  j["m"] = ed.m;
  j["S"] = ed.S.to_json();
  j["E"] = ed.E.to_json();
  j["powerForm"] = {{"k0", pf.k0}, {"Splus", pf.S_plus.to_json()}, {"Etilde", pf.E_tilde.to_json()},
                    {"Sminus", pf.S_minus.to_json()}};
  emit(c, j.dump(2) + "\n");
  return 0;
}

int cmd_coefficient(const Config& c) {
  const GroupElement g = load_element(c);
  if (c.exact) {
    emit(c, coefficient_exact(g).str() + "\n");
    return 0;
  }
  const Complex v = coefficient(g, load_backend(c));
  emit(c, num(v.real()) + (v.imag() != 0.0 ? "," + num(v.imag()) : "") + "\n");
  return 0;
}

int cmd_moments(const Config& c) {
  if (c.max < 0) throw ArgumentError("--max must be nonnegative");
  const GroupElement g = load_element(c);
  const Backend b = load_backend(c);
  std::vector<PsiTerm> psi = load_psi(c);
  ClosedFormOptions opt;
  opt.exact = c.exact && psi.size() == 1 && b.is_tl();
  const MomentClosedForm cf = moment_closed_form(g, psi, b, opt);
  psi = normalized(psi, b);
  std::ostringstream s;
  s << "p,closed_re,closed_im,direct_re,direct_im" << (opt.exact ? ",exact" : "") << "\n";
  for (long p = -c.max; p <= c.max; ++p) {
    Complex direct = 0.0;
    for (const auto& i : psi)
      for (const auto& j : psi)
        direct += i.coeff * std::conj(j.coeff) *
                  moments_direct(g, group_inverse(j.element), i.element, p, b);
    const Complex closed = cf.moment(p);
    s << p << "," << num(closed.real()) << "," << num(closed.imag()) << "," << num(direct.real()) << ","
      << num(direct.imag());
    if (opt.exact) s << "," << (cf.exact ? cf.exact->moment(std::labs(p)).str() : "");
    s << "\n";
  }
  emit(c, s.str());
  return 0;
}

int cmd_measure(const Config& c) {
  const GroupElement g = load_element(c);
  const SpectralMeasure sm = measure_for_vector(g, load_psi(c), load_backend(c));
  nlohmann::json j = to_json(sm);
  j["failedChecks"] = failed_checks(sm);
  if (c.samples > 0) {
    j["samples"] = nlohmann::json::array();
    for (const auto& [th, f] : sample_density(sm, c.samples)) j["samples"].push_back({th, f});
  }
  emit(c, j.dump(2) + "\n");
  return 0;
}

int cmd_verify(const Config& c) {
  const GroupElement g = load_element(c);
  const Backend b = load_backend(c);
  const GroupElement e = GroupElement::identity(g.arity());
  struct Row {
    std::string name;
    bool ok;
    std::string detail;
  };
  std::vector<Row> rows;
  auto run = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& f) {
    try {
      auto [ok, detail] = f();
      rows.push_back({name, ok, detail});
    } catch (const std::exception& ex) {
      rows.push_back({name, false, ex.what()});
    }
  };

  run("reduce idempotent", [&] {
    return std::pair{reduce(g.diagram()) == g.diagram(), std::string()};
  });
  run("json round trip", [&] {
    return std::pair{StrandDiagram::from_json(nlohmann::json::parse(g.encode())) == g.diagram(), std::string()};
  });
  run("inverse", [&] { return std::pair{group_compose(g, group_inverse(g)).is_identity(), std::string()}; });
  run("reduction confluence", [&] {
    std::mt19937 rng(1);
    const StrandDiagram raw = compose(compose(g.diagram(), invert(g.diagram())), g.diagram());
    bool ok = true;
    for (int k = 0; k < 20; ++k) ok = ok && reduce_random(raw, rng) == g.diagram();
    return std::pair{ok, std::string("20 random orders")};
  });
  run("essential decomposition", [&] {
    const auto ed = essential_decomposition(g);
    const bool ok = reduce(compose(compose(ed.S, ed.E), invert(ed.S))) == g.diagram() && is_reduced(compose(ed.E, ed.E));
    return std::pair{ok, "m = " + std::to_string(ed.m)};
  });
  run("power form", [&] {
    const PowerForm pf = power_form(e, g, e);
    bool ok = true;
    for (long p = pf.k0; p <= pf.k0 + 4; ++p) ok = ok && group_power(g, p).diagram() == pf.expand(p);
    return std::pair{ok, "k0 = " + std::to_string(pf.k0)};
  });
  if (b.is_tl())
    run("local relations", [&] {
      std::mt19937 rng(2);
      double worst = 0.0;
      for (const auto& rc : check_relations(b, 20, rng)) worst = std::max(worst, rc.max_error);
      return std::pair{worst < 1e-10, "max error " + num(worst)};
    });
  else
    run("tensor unitarity", [&] {
      const double d = b.model().unitarity_defect();
      return std::pair{d < 1e-12, "defect " + num(d)};
    });
  run("closed form vs direct", [&] {
    const auto cf = closed_form_for(g, e, e, b);
    double worst = 0.0;
    for (long p = -8; p <= cf.k0 + 8; ++p) worst = std::max(worst, std::abs(cf.moment(p) - moments_direct(g, e, e, p, b)));
    const bool ok = worst < 1e-9 && cf.spectral_radius <= 1 + 1e-9;
    return std::pair{ok, "max error " + num(worst) + ", spectral radius " + num(cf.spectral_radius)};
  });
  run("measure checks", [&] {
    const auto failed = failed_checks(measure_for_vector(g, {{1.0, e}}, b));
    std::string detail;
    for (const auto& f : failed) detail += (detail.empty() ? "" : "; ") + f;
    return std::pair{failed.empty(), detail};
  });

  std::ostringstream s;
  bool all = true;
  for (const auto& r : rows) {
    all = all && r.ok;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-26s %s", r.name.c_str(), r.ok ? "PASS" : "FAIL");
    s << buf << (r.detail.empty() ? "" : "  " + r.detail) << "\n";
  }
  emit(c, s.str());
  return all ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strand diagrams, matrix coefficients and spectral measures of Thompson group elements"};
  app.require_subcommand(1);
  app.fallthrough();
  Config c;
  app.add_option("--n", c.n, "arity of the group F_n")->capture_default_str()->check(CLI::Range(2, 64));
  app.add_option("--backend", c.backend, "tl or tensor")->capture_default_str()->check(CLI::IsMember({"tl", "tensor"}));
  app.add_option("--d", c.d, "loop value for tl: rational >= 3, 2, or cos:k")->capture_default_str();
  app.add_option("--model", c.model, "tensor model: coloring3, a JSON file, or an inline JSON array")
      ->capture_default_str();
  app.add_option("--element", c.element, "generator word, 'top ; bottom' tree pair, or 1");
  app.add_option("--element-file", c.element_file, "reduced or unreduced (1,1) diagram as JSON");
  app.add_option("--psi", c.psi, "vector term coeff:element, repeatable; coeff may be re,im");
  app.add_option("--max", c.max, "largest |p| for moments")->capture_default_str();
  app.add_option("--samples", c.samples, "density samples to include in measure output")->capture_default_str();
  app.add_option("--out", c.out, "write output to this file instead of stdout");
  app.add_flag("--exact", c.exact, "exact rational functions of delta where available");

  int status = 0;
  auto bind = [&](const char* name, const char* help, int (*f)(const Config&)) {
    app.add_subcommand(name, help)->callback([&status, &c, f] { status = f(c); });
  };
  bind("reduce", "canonical reduced diagram as JSON", cmd_reduce);
  bind("essential", "essential part, conjugator and power form as JSON", cmd_essential);
  bind("coefficient", "<pi(g) Omega, Omega>", cmd_coefficient);
  bind("moments", "closed form and direct moments for |p| <= max as CSV", cmd_moments);
  bind("measure", "spectral measure as JSON", cmd_measure);
  bind("verify", "property checks on the element, as a table", cmd_verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex);
    return code == 0 ? 0 : 2;
  } catch (const ArgumentError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const CompositionError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const CalibrationError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const ResourceError& ex) {
    std::cerr << "resource cap: " << ex.what() << "\n";
    return 3;
  } catch (const std::exception& ex) {
    std::cerr << "internal error: " << ex.what() << "\n";
    return 4;
  }
  return status;
}
