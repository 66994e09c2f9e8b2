#pragma once

#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypersym/action_angle.hpp"
#include "hypersym/special_kahler.hpp"

namespace hypersym {

inline constexpr const char* toolkit_version = "0.1.0";
inline constexpr int report_schema_version = 1;

/// Which symplectic form a section is meant to be Lagrangian for. The paired
/// complex structure is the one the graph should then be complex for.
enum class SectionRole { omega, sigma, chi };

inline const char* role_form(SectionRole r) {
  switch (r) {
    case SectionRole::omega: return "omega";
    case SectionRole::sigma: return "sigma";
    case SectionRole::chi: return "chi";
  }
  return "?";
}

inline const char* role_complex_structure(SectionRole r) {
  switch (r) {
    case SectionRole::omega: return "J_chi";
    case SectionRole::sigma: return "J_omega";
    case SectionRole::chi: return "J_sigma";
  }
  return "?";
}

struct NamedSection {
  std::string name;
  SectionRole role = SectionRole::sigma;
  SectionMap section = SectionMap::zero(1);
};

struct ScenarioConfig {
  std::string scenario = "paper-n1";
  int n = 1;
  std::vector<NamedSection> sections;
  std::vector<double> frequencies{1.0, 2.0};
  SampleConfig sampling;
  Tolerances tolerances;
  std::vector<std::string> suites;
  std::string output;
};

inline const std::map<std::string, std::string>& scenario_catalog() {
  static const std::map<std::string, std::string> c{
      {"custom-section", "chart model with user-supplied polynomial sections (n from config)"},
      {"oscillators", "fibration built from a product of harmonic oscillators (frequencies from config)"},
      {"paper-n", "chart model (x, y, p, q) with n blocks (n from config)"},
      {"paper-n1", "chart model (x, y, p, q) with a single block"},
  };
  return c;
}

inline const std::map<std::string, std::string>& suite_catalog() {
  static const std::map<std::string, std::string> c{
      {"action-angle", "action quadrature, angle normalization, canonical check for the oscillators"},
      {"hypersymplectic", "omega, chi, sigma symplectic; J's complex, integrable, quaternionic; recursion squares"},
      {"lagrangian-fibres", "torus fibres are Lagrangian for omega and sigma"},
      {"sections", "per section: Lagrangian for its form and complex for the paired J"},
      {"special-kahler", "special symplectic and special (pseudo-)Kahler structure on the base"},
  };
  return c;
}

inline std::string list_scenarios() {
  std::string out = "scenarios:\n";
  for (const auto& [k, v] : scenario_catalog()) out += "  " + k + std::string(18 - k.size(), ' ') + v + "\n";
  out += "suites:\n";
  for (const auto& [k, v] : suite_catalog()) out += "  " + k + std::string(18 - k.size(), ' ') + v + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Config (de)serialization

namespace detail {

using nlohmann::json;

inline Polynomial polynomial_from_json(const json& j, int n_vars, const std::string& key) {
  if (!j.is_array()) throw ConfigError(key, "polynomial must be an array of monomials");
  std::vector<Monomial> terms;
  for (std::size_t t = 0; t < j.size(); ++t) {
    const auto& m = j[t];
    const std::string mkey = key + "[" + std::to_string(t) + "]";
    if (!m.is_object() || !m.contains("exponents") || !m.contains("coefficient"))
      throw ConfigError(mkey, "monomial needs 'exponents' and 'coefficient'");
    Monomial mono;
    try {
      mono.exponents = m.at("exponents").get<std::vector<int>>();
      mono.coefficient = m.at("coefficient").get<double>();
    } catch (const json::exception& e) {
      throw ConfigError(mkey, e.what());
    }
    if (static_cast<int>(mono.exponents.size()) != n_vars)
      throw ConfigError(mkey + ".exponents", "expected " + std::to_string(n_vars) + " exponents");
    int deg = 0;
    for (int e : mono.exponents) {
      if (e < 0) throw ConfigError(mkey + ".exponents", "negative exponent");
      deg += e;
    }
    if (deg > 8) throw ConfigError(mkey + ".exponents", "polynomial degree must be <= 8");
    if (!std::isfinite(mono.coefficient)) throw ConfigError(mkey + ".coefficient", "must be finite");
    terms.push_back(std::move(mono));
  }
  return Polynomial(n_vars, std::move(terms));
}

inline json polynomial_to_json(const Polynomial& p) {
  json arr = json::array();
  for (const auto& t : p.terms()) arr.push_back({{"exponents", t.exponents}, {"coefficient", t.coefficient}});
  return arr;
}

inline NamedSection section_from_json(const json& j, int n, const std::string& key) {
  if (!j.is_object()) throw ConfigError(key, "section must be an object");
  for (const auto& [k, v] : j.items())
    if (k != "name" && k != "role" && k != "p" && k != "q") throw ConfigError(key + "." + k, "unknown key");
  NamedSection s;
  s.name = j.value("name", key);
  const std::string role = j.value("role", "sigma");
  if (role == "omega") s.role = SectionRole::omega;
  else if (role == "sigma") s.role = SectionRole::sigma;
  else if (role == "chi") s.role = SectionRole::chi;
  else throw ConfigError(key + ".role", "unknown role '" + role + "' (omega, sigma, chi)");
  std::vector<Polynomial> comps[2];
  const char* names[2] = {"p", "q"};
  for (int c = 0; c < 2; ++c) {
    const std::string ckey = key + "." + names[c];
    if (!j.contains(names[c])) {
      comps[c].assign(n, Polynomial(2 * n));
      continue;
    }
    const auto& arr = j.at(names[c]);
    if (!arr.is_array() || static_cast<int>(arr.size()) != n)
      throw ConfigError(ckey, "expected " + std::to_string(n) + " component polynomials");
    for (int i = 0; i < n; ++i)
      comps[c].push_back(polynomial_from_json(arr[i], 2 * n, ckey + "[" + std::to_string(i) + "]"));
  }
  s.section = SectionMap(std::move(comps[0]), std::move(comps[1]));
  return s;
}

inline json section_to_json(const NamedSection& s) {
  json p = json::array(), q = json::array();
  for (const auto& poly : s.section.p()) p.push_back(polynomial_to_json(poly));
  for (const auto& poly : s.section.q()) q.push_back(polynomial_to_json(poly));
  return {{"name", s.name}, {"role", role_form(s.role)}, {"p", p}, {"q", q}};
}

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace detail

/// The zero section (for omega) and p_i = y_i, q_i = -x_i (for sigma).
inline std::vector<NamedSection> default_sections(int n) {
  std::vector<Polynomial> p, q;
  for (int i = 0; i < n; ++i) {
    p.push_back(Polynomial::linear(2 * n, n + i, 1.0));
    q.push_back(Polynomial::linear(2 * n, i, -1.0));
  }
  return {{"zero", SectionRole::omega, SectionMap::zero(n)}, {"rotation", SectionRole::sigma, SectionMap(p, q)}};
}

inline std::vector<std::string> all_suites() {
  std::vector<std::string> s;
  for (const auto& [k, v] : suite_catalog()) s.push_back(k);
  return s;
}

/// Rejects anything the runner cannot execute; throws ConfigError naming the key.
inline void validate(const ScenarioConfig& c) {
  if (!scenario_catalog().count(c.scenario)) throw ConfigError("scenario", "unknown scenario '" + c.scenario + "'");
  if (c.n < 1) throw ConfigError("n", "must be a positive integer");
  for (const auto& s : c.suites)
    if (!suite_catalog().count(s)) throw ConfigError("suites", "unknown suite '" + s + "'");
  if (c.sampling.n_points < 1) throw ConfigError("sampling.n_points", "must be positive");
  if (!(c.sampling.fd_step > 0.0)) throw ConfigError("sampling.fd_step", "must be positive");
  const std::pair<const char*, double> tols[] = {{"tolerances.algebraic", c.tolerances.algebraic},
                                                 {"tolerances.fd", c.tolerances.fd},
                                                 {"tolerances.nested_fd", c.tolerances.nested_fd},
                                                 {"tolerances.nondegenerate", c.tolerances.nondegenerate},
                                                 {"tolerances.pullback", c.tolerances.pullback}};
  for (auto [k, v] : tols)
    if (!(v > 0.0)) throw ConfigError(k, "tolerance must be positive");
  for (double f : c.frequencies)
    if (!(f > 0.0)) throw ConfigError("frequencies", "frequencies must be positive");
  if (c.scenario == "oscillators" && (c.frequencies.size() < 2 || c.frequencies.size() % 2 != 0))
    throw ConfigError("frequencies", "oscillators scenario needs an even number (>= 2) of frequencies");
  if (c.scenario == "custom-section" && c.sections.empty())
    throw ConfigError("sections", "custom-section scenario needs at least one section");
  for (const auto& s : c.sections) {
    if (s.section.n() != c.n) throw ConfigError("sections", "section '" + s.name + "' does not match n");
    if (s.section.degree() > 8) throw ConfigError("sections", "section '" + s.name + "' has degree > 8");
  }
}

/// Fills scenario-dependent defaults (n, sections, suites) after parsing and overrides.
inline void resolve_defaults(ScenarioConfig& c, bool sections_given) {
  if (c.scenario == "paper-n1") c.n = 1;
  if (c.scenario == "oscillators") c.n = static_cast<int>(c.frequencies.size()) / 2;
  if (!sections_given && c.scenario != "custom-section" && c.n >= 1) c.sections = default_sections(c.n);
  if (c.suites.empty()) c.suites = all_suites();
}

inline ScenarioConfig config_from_json(const nlohmann::json& j, const std::optional<std::string>& scenario_override = {}) {
  using detail::get_as;
  if (!j.is_object()) throw ConfigError("<root>", "config must be an object");
  static const std::set<std::string> known{"scenario", "n", "sections", "frequencies", "sampling",
                                           "tolerances", "suites", "output", "schema_version"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError(k, "unknown key");

  ScenarioConfig c;
  if (j.contains("scenario")) c.scenario = get_as<std::string>(j["scenario"], "scenario");
  if (scenario_override) c.scenario = *scenario_override;
  if (j.contains("n")) c.n = get_as<int>(j["n"], "n");
  else if (c.scenario == "paper-n") c.n = 2;
  if (j.contains("frequencies")) c.frequencies = get_as<std::vector<double>>(j["frequencies"], "frequencies");
  if (c.scenario == "oscillators") c.n = std::max<int>(1, static_cast<int>(c.frequencies.size()) / 2);
  if (c.scenario == "paper-n1") c.n = 1;
  if (c.n < 1) throw ConfigError("n", "must be a positive integer");

  if (j.contains("sampling")) {
    const auto& s = j["sampling"];
    if (!s.is_object()) throw ConfigError("sampling", "must be an object");
    for (const auto& [k, v] : s.items()) {
      if (k == "n_points") c.sampling.n_points = get_as<int>(v, "sampling.n_points");
      else if (k == "seed") c.sampling.seed = get_as<std::uint64_t>(v, "sampling.seed");
      else if (k == "fd_step") c.sampling.fd_step = get_as<double>(v, "sampling.fd_step");
      else throw ConfigError("sampling." + k, "unknown key");
    }
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (!t.is_object()) throw ConfigError("tolerances", "must be an object");
    for (const auto& [k, v] : t.items()) {
      const std::string key = "tolerances." + k;
      if (k == "algebraic") c.tolerances.algebraic = get_as<double>(v, key);
      else if (k == "fd") c.tolerances.fd = get_as<double>(v, key);
      else if (k == "nested_fd") c.tolerances.nested_fd = get_as<double>(v, key);
      else if (k == "nondegenerate") c.tolerances.nondegenerate = get_as<double>(v, key);
      else if (k == "pullback") c.tolerances.pullback = get_as<double>(v, key);
      else throw ConfigError(key, "unknown key");
    }
  }
  if (j.contains("suites")) c.suites = get_as<std::vector<std::string>>(j["suites"], "suites");
  if (j.contains("output")) c.output = get_as<std::string>(j["output"], "output");

  bool sections_given = false;
  if (j.contains("sections")) {
    const auto& arr = j["sections"];
    if (!arr.is_array()) throw ConfigError("sections", "must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      c.sections.push_back(detail::section_from_json(arr[i], c.n, "sections[" + std::to_string(i) + "]"));
    sections_given = true;
  }
  resolve_defaults(c, sections_given);
  return c;
}

/// Normalized echo of the configuration, used in the report.
inline nlohmann::json config_to_json(const ScenarioConfig& c) {
  nlohmann::json sections = nlohmann::json::array();
  for (const auto& s : c.sections) sections.push_back(detail::section_to_json(s));
  return {{"scenario", c.scenario},
          {"n", c.n},
          {"sections", sections},
          {"frequencies", c.frequencies},
          {"sampling", {{"n_points", c.sampling.n_points}, {"seed", c.sampling.seed}, {"fd_step", c.sampling.fd_step}}},
          {"tolerances",
           {{"algebraic", c.tolerances.algebraic},
            {"fd", c.tolerances.fd},
            {"nested_fd", c.tolerances.nested_fd},
            {"nondegenerate", c.tolerances.nondegenerate},
            {"pullback", c.tolerances.pullback}}},
          {"suites", c.suites}};
}

// ---------------------------------------------------------------------------
// Running

struct ReportDocument {
  nlohmann::json config;
  std::string version = toolkit_version;
  std::vector<CheckReport> reports;
  bool verdict = false;
  double duration_seconds = 0.0;

  /// Everything except timing; byte-stable for a fixed config and version.
  nlohmann::json stable_json() const {
    nlohmann::json rs = nlohmann::json::array();
    int failed = 0;
    for (const auto& r : reports) {
      auto number = [](double v) -> nlohmann::json {
        if (std::isfinite(v)) return v;
        return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
      };
      rs.push_back({{"identity", r.identity},
                    {"n_points", r.n_points},
                    {"max_residual", number(r.max_residual)},
                    {"tolerance", number(r.tolerance)},
                    {"passed", r.passed},
                    {"anchor", r.anchor},
                    {"detail", r.detail}});
      if (!r.passed) ++failed;
    }
    return {{"toolkit_version", version},
            {"config", config},
            {"reports", rs},
            {"summary", {{"total", reports.size()}, {"failed", failed}}},
            {"verdict", verdict ? "pass" : "fail"}};
  }

  nlohmann::json to_json() const {
    return {{"schema_version", report_schema_version},
            {"stable", stable_json()},
            {"volatile", {{"duration_seconds", duration_seconds}}}};
  }
};

namespace detail {

inline void prefix(std::vector<CheckReport>& reports, const std::string& p) {
  for (auto& r : reports) r.identity = p + r.identity;
}

inline void append(std::vector<CheckReport>& out, std::vector<CheckReport> more, const std::string& p) {
  prefix(more, p);
  out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
}

inline std::vector<CheckReport> run_sections_suite(const FibrationModel& model, const ScenarioConfig& c) {
  const auto forms = build_structure_triple(model);
  const auto js = build_complex_triple(model);
  const auto pts = sample_points(model.base_chart(), c.sampling);
  const int np = static_cast<int>(pts.size());
  std::vector<CheckReport> out;
  for (const auto& s : c.sections) {
    const DifferentialForm& form = s.role == SectionRole::omega ? forms.omega
                                   : s.role == SectionRole::sigma ? forms.sigma
                                                                  : forms.chi;
    const EndomorphismField& J = s.role == SectionRole::omega ? js.J_chi
                                 : s.role == SectionRole::sigma ? js.J_omega
                                                                : js.J_sigma;
    const std::string base = "section[" + s.name + "].";
    out.push_back(guarded_check(base + "lagrangian(" + role_form(s.role) + ")",
                                std::string("section is Lagrangian for ") + role_form(s.role), np,
                                c.tolerances.pullback, [&] {
                                  double worst = 0.0;
                                  for (const auto& p : pts) worst = std::max(worst, section_pullback(s.section, form, p).max_abs());
                                  return worst;
                                }));
    out.push_back(guarded_check(base + "complex(" + role_complex_structure(s.role) + ")",
                                std::string("section image is a complex submanifold for ") +
                                    role_complex_structure(s.role),
                                np, c.tolerances.fd, [&] {
                                  double worst = 0.0;
                                  for (const auto& p : pts) worst = std::max(worst, complex_submanifold_check(s.section, J, p));
                                  return worst;
                                }));
  }
  return out;
}

inline std::vector<CheckReport> run_special_kahler_suite(const FibrationModel& model, const ScenarioConfig& c) {
  const NamedSection* chosen = nullptr;
  for (const auto& s : c.sections)
    if (s.role == SectionRole::sigma) {
      chosen = &s;
      break;
    }
  if (!chosen)
    return {make_report("section", "a sigma-Lagrangian section is available", 0, std::numeric_limits<double>::infinity(),
                        0.0, "no section with role 'sigma' configured")};
  const auto data = make_special_kahler_data(model, chosen->section);
  const auto pts = sample_points(model.base_chart(), c.sampling);
  std::vector<CheckReport> out = special_symplectic_check(data, pts, c.sampling.fd_step, c.tolerances);
  auto kahler = special_kahler_check(data, pts, c.tolerances);
  out.insert(out.end(), kahler.begin(), kahler.end());
  const auto js = build_complex_triple(model);
  out.push_back(guarded_check("bridge(I=J_omega|graph)", "I agrees with J_omega restricted to the section graph",
                              static_cast<int>(pts.size()), c.tolerances.fd, [&] {
                                double worst = 0.0;
                                for (const auto& p : pts)
                                  worst = std::max(worst, complex_structure_bridge_residual(chosen->section, js.J_omega, p,
                                                                                            c.sampling.fd_step));
                                return worst;
                              }));
  for (auto& r : out) r.detail = (r.detail.empty() ? "" : r.detail + "; ") + "section '" + chosen->name + "'";
  return out;
}

inline std::vector<CheckReport> run_action_angle_suite(const ScenarioConfig& c) {
  std::vector<Oscillator> factors;
  for (double f : c.frequencies) factors.emplace_back(f);
  if (factors.size() < 2 || factors.size() % 2 != 0)
    return {make_report("system", "oscillator system is well formed", 0, std::numeric_limits<double>::infinity(), 0.0,
                        "need an even number (>= 2) of frequencies")};
  const ProductSystem sys(factors);
  const double energies[] = {0.2, 0.5, 1.0, 2.0};
  std::vector<CheckReport> out;
  for (int k = 0; k < sys.size(); ++k) {
    const auto& osc = sys.factors[k];
    const std::string idx = "[" + std::to_string(k) + "]";
    out.push_back(guarded_check("action_from_energy" + idx, "action equals E / nu", 4, c.tolerances.fd, [&] {
      double worst = 0.0;
      for (double e : energies) worst = std::max(worst, std::abs(action_from_energy(osc, e) - e / osc.frequency));
      return worst;
    }));
    out.push_back(guarded_check("angle_normalization" + idx, "angle advances by 2pi around its cycle", 4,
                                c.tolerances.fd, [&] {
                                  double worst = 0.0;
                                  for (double e : energies) worst = std::max(worst, angle_period_check(osc, e));
                                  return worst;
                                }));
  }
  out.push_back(guarded_check("cycle_pairing", "(1/2pi) integral of d(angle_k) over cycle_i is delta_ik", 1,
                              c.tolerances.fd, [&] {
                                const PhasePoint start = sample_phase_points(sys, 1, c.sampling.seed).front();
                                double worst = 0.0;
                                for (int k = 0; k < sys.size(); ++k)
                                  for (int i = 0; i < sys.size(); ++i)
                                    worst = std::max(worst, std::abs(cycle_angle_integral(sys, k, i, start) -
                                                                     (i == k ? 1.0 : 0.0)));
                                return worst;
                              }));
  const auto pts = sample_phase_points(sys, c.sampling.n_points, c.sampling.seed);
  out.push_back(canonical_check(sys, pts, c.sampling.fd_step, c.tolerances.fd));
  return out;
}

}  // namespace detail

inline FibrationModel build_model(const ScenarioConfig& c) {
  if (c.scenario == "oscillators") {
    std::vector<Oscillator> factors;
    for (double f : c.frequencies) factors.emplace_back(f);
    return fibration_from(ProductSystem(factors));
  }
  return FibrationModel::standard(c.n);
}

/// Builds the model, runs every requested suite and returns the sorted report.
/// Numerical failures inside suites become failing reports.
inline ReportDocument run_scenario(const ScenarioConfig& c) {
  validate(c);
  const auto t0 = std::chrono::steady_clock::now();
  ReportDocument doc;
  doc.config = config_to_json(c);
  const FibrationModel model = build_model(c);
  for (const auto& suite : c.suites) {
    if (suite == "hypersymplectic") {
      detail::append(doc.reports, verify_hypersymplectic(model, c.sampling, c.tolerances), "hypersymplectic.");
    } else if (suite == "lagrangian-fibres") {
      const auto forms = build_structure_triple(model);
      const auto pts = sample_points(model.total_chart(), c.sampling);
      detail::append(doc.reports,
                     {verify_lagrangian_fibres(model, forms.omega, pts, c.tolerances.algebraic, "omega"),
                      verify_lagrangian_fibres(model, forms.sigma, pts, c.tolerances.algebraic, "sigma")},
                     "fibres.");
    } else if (suite == "sections") {
      detail::append(doc.reports, detail::run_sections_suite(model, c), "sections.");
    } else if (suite == "special-kahler") {
      detail::append(doc.reports, detail::run_special_kahler_suite(model, c), "special_kahler.");
    } else if (suite == "action-angle") {
      detail::append(doc.reports, detail::run_action_angle_suite(c), "action_angle.");
    }
  }
  sort_reports(doc.reports);
  doc.verdict = all_passed(doc.reports);
  doc.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return doc;
}

}  // namespace hypersym
