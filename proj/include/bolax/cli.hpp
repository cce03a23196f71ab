#pragma once

// Batch runs: JSON config in, report.json + CSV side files + plots/*.dat out.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bolax/bo_evolve.hpp"
#include "bolax/error.hpp"
#include "bolax/green_birman.hpp"
#include "bolax/lax_spectrum.hpp"
#include "bolax/potentials.hpp"
#include "bolax/spectral_core.hpp"

namespace bolax::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kUsage = 2, kNumeric = 3 };

/// Malformed or out-of-range configuration.
class UsageError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"spectrum", "scattering", "bs", "secular", "sweep", "evolve", "verify"};
  return c;
}

struct RunConfig {
  std::string command = "spectrum";
  PotentialSpec potential = PotentialSpec::soliton(1.0);
  std::vector<PotentialSpec> corpus;  ///< verify; empty means the default corpus
  PhysicalGrid physical = PhysicalGrid::make(4096, -200.0, 200.0);
  std::size_t n_modes = 2048;
  std::optional<double> xi_max;
  std::vector<double> E_list{0.25};
  std::vector<double> couplings;
  EvolutionConfig evolution;
  DiagonalRule rule = DiagonalRule::band_limited;
  std::uint64_t seed = 20240601;
  std::string outdir = "bolax_out";

  SpectrumOptions spectrum_options() const {
    SpectrumOptions o;
    o.n_modes = n_modes;
    o.xi_max = xi_max;
    o.seed = seed;
    return o;
  }
};

// ---------------------------------------------------------------------------------------------
// Parsing

namespace detail {

inline void reject_unknown(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
      throw UsageError("config: unknown field '" + where + it.key() + "'");
  }
}

inline double number(const Json& j, const std::string& where, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number()) throw UsageError("config: field '" + where + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw UsageError("config: field '" + where + key + "' must be finite");
  return d;
}

inline std::size_t count(const Json& j, const std::string& where, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw UsageError("config: field '" + where + key + "' must be a nonnegative integer");
  return v.get<std::size_t>();
}

inline std::vector<double> numbers(const Json& j, const std::string& where, const char* key,
                                   std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_array()) throw UsageError("config: field '" + where + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw UsageError("config: field '" + where + key + "' must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline std::string text(const Json& j, const std::string& where, const char* key, std::string fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw UsageError("config: field '" + where + key + "' must be a string");
  return j.at(key).get<std::string>();
}

}  // namespace detail

inline PotentialSpec parse_potential(const Json& j, const std::string& where = "potential.",
                                     const std::filesystem::path& base = {}) {
  using namespace detail;
  if (!j.is_object()) throw UsageError("config: '" + where + "' must be an object");
  const std::string fam = text(j, where, "family", "");
  if (fam.empty()) throw UsageError("config: field '" + where + "family' is required");
  Family f;
  try {
    f = family_from_name(fam);
  } catch (const Error&) {
    throw UsageError("config: field '" + where + "family': unknown family '" + fam + "'");
  }
  PotentialSpec s;
  try {
    switch (f) {
      case Family::zero:
        reject_unknown(j, where, {"family", "coupling"});
        s = PotentialSpec::zero();
        break;
      case Family::soliton:
        reject_unknown(j, where, {"family", "nu", "x0", "coupling"});
        s = PotentialSpec::soliton(number(j, where, "nu", 1.0), number(j, where, "x0", 0.0));
        break;
      case Family::multi_soliton: {
        reject_unknown(j, where, {"family", "terms", "coupling"});
        if (!j.contains("terms") || !j.at("terms").is_array())
          throw UsageError("config: field '" + where + "terms' must be an array of {nu, x0}");
        std::vector<SolitonTerm> terms;
        std::size_t k = 0;
        for (const auto& t : j.at("terms")) {
          const std::string w = where + "terms[" + std::to_string(k++) + "].";
          if (!t.is_object()) throw UsageError("config: '" + w + "' must be an object");
          reject_unknown(t, w, {"nu", "x0"});
          terms.push_back({number(t, w, "nu", 1.0), number(t, w, "x0", 0.0)});
        }
        s = PotentialSpec::multi_soliton(std::move(terms));
        break;
      }
      case Family::gaussian:
      case Family::sech2: {
        reject_unknown(j, where, {"family", "amplitude", "width", "coupling"});
        const double a = number(j, where, "amplitude", 1.0), w = number(j, where, "width", 1.0);
        s = (f == Family::gaussian) ? PotentialSpec::gaussian(a, w) : PotentialSpec::sech2(a, w);
        break;
      }
      case Family::from_file: {
        reject_unknown(j, where, {"family", "path", "coupling"});
        std::filesystem::path p = text(j, where, "path", "");
        if (p.empty()) throw UsageError("config: field '" + where + "path' is required");
        if (p.is_relative() && !base.empty()) p = base / p;
        if (!std::filesystem::exists(p)) throw UsageError("config: field '" + where + "path': no such file " + p.string());
        try {
          s = PotentialSpec::from_file(p.string());
        } catch (const Error& e) {
          throw UsageError("config: field '" + where + "path': " + e.what());
        }
        s.path = text(j, where, "path", "");
        break;
      }
      case Family::from_samples: {
        reject_unknown(j, where, {"family", "x", "u", "interpolation", "coupling"});
        const std::string ip = text(j, where, "interpolation", "linear");
        Interpolation interp;
        if (ip == "linear") interp = Interpolation::linear;
        else if (ip == "band_limited") interp = Interpolation::band_limited;
        else throw UsageError("config: field '" + where + "interpolation' must be linear or band_limited");
        const auto xs = numbers(j, where, "x", {}), us = numbers(j, where, "u", {});
        try {
          s = PotentialSpec::from_samples(xs, us, interp);
        } catch (const Error& e) {
          throw UsageError("config: '" + where + "' samples: " + e.what());
        }
        break;
      }
    }
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError("config: '" + where + "': " + e.what());
  }
  s.coupling = number(j, where, "coupling", 1.0);
  try {
    s.validate();
  } catch (const Error& e) {
    throw UsageError("config: '" + where + "': " + e.what());
  }
  return s;
}

inline Json potential_to_json(const PotentialSpec& s) {
  Json j;
  j["family"] = family_name(s.family);
  switch (s.family) {
    case Family::zero: break;
    case Family::soliton:
      j["nu"] = s.nu;
      j["x0"] = s.x0;
      break;
    case Family::multi_soliton: {
      Json t = Json::array();
      for (const auto& e : s.terms) t.push_back({{"nu", e.nu}, {"x0", e.x0}});
      j["terms"] = t;
      break;
    }
    case Family::gaussian:
    case Family::sech2:
      j["amplitude"] = s.amplitude;
      j["width"] = s.width;
      break;
    case Family::from_file: j["path"] = s.path; break;
    case Family::from_samples:
      j["x"] = s.data->x;
      j["u"] = s.data->u;
      j["interpolation"] = s.data->interp == Interpolation::band_limited ? "band_limited" : "linear";
      break;
  }
  j["coupling"] = s.coupling;
  return j;
}

inline Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["potential"] = potential_to_json(c.potential);
  if (!c.corpus.empty()) {
    Json a = Json::array();
    for (const auto& p : c.corpus) a.push_back(potential_to_json(p));
    j["corpus"] = a;
  }
  j["physical"] = {{"n_points", c.physical.n_points}, {"x_min", c.physical.x_min}, {"x_max", c.physical.x_max}};
  j["frequency"] = {{"n_modes", c.n_modes}};
  if (c.xi_max) j["frequency"]["xi_max"] = *c.xi_max;
  j["E_list"] = c.E_list;
  j["couplings"] = c.couplings;
  const auto& e = c.evolution;
  j["evolution"] = {{"L_dom", e.L_dom},     {"n_modes", e.n_modes},
                    {"dt", e.dt},           {"t_final", e.t_final},
                    {"snapshot_stride", e.snapshot_stride}, {"dealias", e.dealias},
                    {"edge_tolerance", e.edge_tolerance}};
  j["diagonal_rule"] = rule_name(c.rule);
  j["seed"] = c.seed;
  j["outdir"] = c.outdir;
  return j;
}

inline RunConfig parse_config(const Json& j, const std::filesystem::path& base = {}) {
  using namespace detail;
  if (!j.is_object()) throw UsageError("config: top level must be a JSON object");
  reject_unknown(j, "", {"command", "potential", "corpus", "physical", "frequency", "E_list", "couplings",
                         "evolution", "diagonal_rule", "seed", "outdir"});
  RunConfig c;
  c.command = text(j, "", "command", "");
  if (std::find(commands().begin(), commands().end(), c.command) == commands().end())
    throw UsageError("config: field 'command' must be one of spectrum, scattering, bs, secular, sweep, evolve, verify");
  if (j.contains("potential")) c.potential = parse_potential(j.at("potential"), "potential.", base);
  if (j.contains("corpus")) {
    if (!j.at("corpus").is_array()) throw UsageError("config: field 'corpus' must be an array");
    std::size_t k = 0;
    for (const auto& p : j.at("corpus"))
      c.corpus.push_back(parse_potential(p, "corpus[" + std::to_string(k++) + "].", base));
  }
  if (j.contains("physical")) {
    const Json& p = j.at("physical");
    if (!p.is_object()) throw UsageError("config: field 'physical' must be an object");
    reject_unknown(p, "physical.", {"n_points", "x_min", "x_max"});
    try {
      c.physical = PhysicalGrid::make(count(p, "physical.", "n_points", 4096), number(p, "physical.", "x_min", -200.0),
                                      number(p, "physical.", "x_max", 200.0));
    } catch (const UsageError&) {
      throw;
    } catch (const Error& e) {
      throw UsageError(std::string("config: 'physical': ") + e.what());
    }
  }
  if (j.contains("frequency")) {
    const Json& f = j.at("frequency");
    if (!f.is_object()) throw UsageError("config: field 'frequency' must be an object");
    reject_unknown(f, "frequency.", {"n_modes", "xi_max"});
    c.n_modes = count(f, "frequency.", "n_modes", 2048);
    if (c.n_modes < 2) throw UsageError("config: field 'frequency.n_modes' must be >= 2");
    if (f.contains("xi_max") && !f.at("xi_max").is_null()) {
      c.xi_max = number(f, "frequency.", "xi_max", 0.0);
      if (!(*c.xi_max > 0.0)) throw UsageError("config: field 'frequency.xi_max' must be > 0");
    }
  }
  c.E_list = numbers(j, "", "E_list", c.E_list);
  for (double E : c.E_list)
    if (!(E > 0.0)) throw UsageError("config: field 'E_list' entries must be > 0");
  c.couplings = numbers(j, "", "couplings", c.couplings);
  for (std::size_t k = 0; k < c.couplings.size(); ++k)
    if (!(c.couplings[k] > 0.0) || (k > 0 && !(c.couplings[k] > c.couplings[k - 1])))
      throw UsageError("config: field 'couplings' must be positive and ascending");
  if (j.contains("evolution")) {
    const Json& e = j.at("evolution");
    if (!e.is_object()) throw UsageError("config: field 'evolution' must be an object");
    reject_unknown(e, "evolution.", {"L_dom", "n_modes", "dt", "t_final", "snapshot_stride", "dealias", "edge_tolerance"});
    auto& ev = c.evolution;
    ev.L_dom = number(e, "evolution.", "L_dom", ev.L_dom);
    ev.n_modes = count(e, "evolution.", "n_modes", ev.n_modes);
    ev.dt = number(e, "evolution.", "dt", ev.dt);
    ev.t_final = number(e, "evolution.", "t_final", ev.t_final);
    ev.snapshot_stride = count(e, "evolution.", "snapshot_stride", ev.snapshot_stride);
    ev.edge_tolerance = number(e, "evolution.", "edge_tolerance", ev.edge_tolerance);
    if (e.contains("dealias")) {
      if (!e.at("dealias").is_boolean()) throw UsageError("config: field 'evolution.dealias' must be a boolean");
      ev.dealias = e.at("dealias").get<bool>();
    }
    try {
      ev.validate();
    } catch (const Error& err) {
      throw UsageError(std::string("config: 'evolution': ") + err.what());
    }
  }
  try {
    c.rule = rule_from_name(text(j, "", "diagonal_rule", "band_limited"));
  } catch (const Error&) {
    throw UsageError("config: field 'diagonal_rule' must be band_limited or log_corrected");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw UsageError("config: field 'seed' must be a nonnegative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  c.outdir = text(j, "", "outdir", c.outdir);
  return c;
}

/// Parses JSON text; syntax errors report the line and column.
inline RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base = {}) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw UsageError("config: JSON syntax error at line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": " + e.what());
  }
  return parse_config(j, base);
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.parent_path());
}

// ---------------------------------------------------------------------------------------------
// Reports

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation = "<=";  ///< value relation tolerance
  bool pass = false;
  std::string detail;
};

inline Check check_le(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), value, tol, "<=", std::isfinite(value) && value <= tol, std::move(detail)};
}

inline Check check_ge(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), value, tol, ">=", std::isfinite(value) && value >= tol, std::move(detail)};
}

inline Check check_eq(std::string name, double value, double expected, std::string detail = {}) {
  return {std::move(name), value, expected, "==", value == expected, std::move(detail)};
}

inline Json to_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  j["value"] = c.value;
  j["relation"] = c.relation;
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

struct SideFile {
  std::string name;  ///< relative to outdir
  std::string content;
};

struct RunReport {
  RunConfig config;
  Json result = Json::object();
  std::vector<Check> checks;
  std::vector<SideFile> files;
  std::vector<std::pair<std::string, double>> timings;
  std::vector<std::string> warnings;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }

  Json to_json() const {
    Json j;
    j["command"] = config.command;
    j["config"] = cli::to_json(config);
    j["result"] = result;
    Json cs = Json::array();
    for (const auto& c : checks) cs.push_back(cli::to_json(c));
    j["checks"] = cs;
    j["warnings"] = warnings;
    j["status"] = passed() ? "pass" : "fail";
    return j;
  }
};

namespace detail {

class Timer {
 public:
  Timer(RunReport& r, std::string name) : r_(r), name_(std::move(name)), t0_(std::chrono::steady_clock::now()) {}
  ~Timer() {
    r_.timings.emplace_back(name_, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count());
  }

 private:
  RunReport& r_;
  std::string name_;
  std::chrono::steady_clock::time_point t0_;
};

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t k = 0; k < header.size(); ++k) s += (k ? "," : "") + header[k];
  s += "\n";
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) s += (k ? "," : "") + fmt(r[k]);
    s += "\n";
  }
  return s;
}

inline std::string dat(const std::vector<std::pair<double, double>>& pts, const std::string& comment) {
  std::string s = "# " + comment + "\n";
  for (const auto& [a, b] : pts) s += fmt(a) + " " + fmt(b) + "\n";
  return s;
}

inline Json complex_json(cplx z) { return Json::array({z.real(), z.imag()}); }

inline Json stability_json(const DiscreteSpectrum& ds) {
  Json rows = Json::array();
  for (const auto& r : ds.rows)
    rows.push_back({{"base", std::isfinite(r.base) ? Json(r.base) : Json(nullptr)},
                    {"fine", r.fine},
                    {"difference", std::isfinite(r.difference) ? Json(r.difference) : Json(nullptr)},
                    {"tolerance", r.tolerance},
                    {"stable", r.stable}});
  return rows;
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Commands

inline void run_spectrum(RunReport& rep) {
  const RunConfig& c = rep.config;
  detail::Timer t(rep, "spectrum");
  const DiscreteSpectrum ds = discrete_spectrum(c.potential, c.spectrum_options());
  Json& r = rep.result;
  r["eigenvalues"] = ds.eigenvalues;
  r["residuals"] = ds.residuals;
  r["min_eigenvalue"] = ds.min_eigenvalue;
  r["sup_norm"] = ds.sup_norm;
  r["delta_edge"] = ds.delta_edge;
  r["base_grid"] = {{"n_modes", ds.base_grid.n_modes}, {"xi_max", ds.base_grid.xi_max}, {"dxi", ds.base_grid.spacing()}};
  r["fine_grid"] = {{"n_modes", ds.fine_grid.n_modes}, {"xi_max", ds.fine_grid.xi_max}, {"dxi", ds.fine_grid.spacing()}};
  r["stability"] = detail::stability_json(ds);
  rep.checks.push_back(check_ge("spectrum_lower_bound", ds.min_eigenvalue, -ds.sup_norm - 1e-6,
                                "min eigenvalue >= -sup|u| - 1e-6"));
  for (std::size_t k = 0; k < ds.size(); ++k)
    rep.checks.push_back(check_le("residual[" + std::to_string(k) + "]", ds.residuals[k],
                                  1e-10 * std::max(ds.matrix_norm, 1.0), "||Mv - lambda v|| <= 1e-10 ||M||"));
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < ds.rows.size(); ++k) {
    const auto& s = ds.rows[k];
    rows.push_back({static_cast<double>(k), s.fine, s.base, s.difference, s.tolerance, s.stable ? 1.0 : 0.0});
  }
  for (std::size_t k = 0; k < ds.size(); ++k) pts.emplace_back(static_cast<double>(k), ds.eigenvalues[k]);
  rep.files.push_back({"spectrum.csv", detail::csv({"index", "fine", "base", "difference", "tolerance", "stable"}, rows)});
  rep.files.push_back({"plots/spectrum.dat", detail::dat(pts, "index eigenvalue")});
}

struct ScatteringEntry {
  double lambda = 0.0;
  double identity_error = 0.0;
  double normalization_error = 0.0;
  double integral_residual = 0.0;
  std::optional<TailLimit> tail;
  std::string tail_error_message;
  std::optional<PhaseConstant> phase;
  std::string phase_error_message;
  ComplexField phi;
};

/// Normalized eigenfunctions and every per-eigenpair diagnostic.
inline std::vector<ScatteringEntry> scattering_data(const PotentialSpec& s, const DiscreteSpectrum& ds,
                                                    const PhysicalGrid& g, DiagonalRule rule, bool with_phase = true) {
  std::vector<ScatteringEntry> out;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    ScatteringEntry e;
    e.lambda = ds.eigenvalues[k];
    const HalfLineField phi = ds.eigenfunction(k);
    e.identity_error = identity_check(phi, s, e.lambda);
    const NormalizedEigenfunction ne = normalize_eigenfunction(phi, s, e.lambda);
    e.normalization_error = std::abs(ne.pairing_after - kTwoPi * kI * e.lambda) / (kTwoPi * std::abs(e.lambda));
    e.phi = to_physical(ne.phi, g, transport_taper(e.lambda));
    e.integral_residual = integral_residual(e.phi, s, e.lambda, rule);
    try {
      e.tail = tail_limit(e.phi, ne.pairing_after, e.lambda);
    } catch (const PreconditionError& err) {
      e.tail_error_message = err.what();
    }
    if (with_phase) {
      try {
        e.phase = phase_constant(s, ds, k, g);
      } catch (const Error& err) {
        e.phase_error_message = err.what();
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

inline void run_scattering(RunReport& rep) {
  const RunConfig& c = rep.config;
  detail::Timer t(rep, "scattering");
  const DiscreteSpectrum ds =
      discrete_spectrum(c.potential, transport_options(c.potential, c.physical, c.spectrum_options()));
  const auto entries = scattering_data(c.potential, ds, c.physical, c.rule);
  rep.result["n_modes"] = ds.base_grid.n_modes;
  Json arr = Json::array();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    const std::string tag = "[" + std::to_string(k) + "]";
    Json j;
    j["lambda"] = e.lambda;
    j["identity_error"] = e.identity_error;
    j["normalization_error"] = e.normalization_error;
    j["integral_residual"] = e.integral_residual;
    rep.checks.push_back(check_le("pairing_identity" + tag, e.identity_error, 1e-3));
    rep.checks.push_back(check_le("normalization" + tag, e.normalization_error, 1e-10, "|int u phi - 2 pi i lambda|"));
    rep.checks.push_back(check_le("integral_equation_residual" + tag, e.integral_residual, 1e-3));
    if (e.tail) {
      j["tail"] = {{"left", detail::complex_json(e.tail->left)},
                   {"right", detail::complex_json(e.tail->right)},
                   {"limit", detail::complex_json(e.tail->limit)},
                   {"reference", detail::complex_json(e.tail->reference)},
                   {"error", e.tail->error},
                   {"side_difference", e.tail->side_difference},
                   {"spread", e.tail->spread},
                   {"extrapolated", detail::complex_json(e.tail->joint_extrapolated)},
                   {"extrapolated_error", e.tail->extrapolated_error}};
      rep.checks.push_back(check_le("eigenfunction_tail_limit" + tag, e.tail->extrapolated_error, 1e-2,
                                    "x phi extrapolated to 1/x = 0"));
    } else {
      j["tail"] = {{"error_message", e.tail_error_message}};
      rep.checks.push_back({"eigenfunction_tail_limit" + tag, NAN, 1e-2, "<=", false, e.tail_error_message});
    }
    if (e.phase) {
      const auto& p = *e.phase;
      j["gamma"] = detail::complex_json(p.gamma);
      j["flatness"] = p.flatness;
      j["extraction_ok"] = p.extraction_ok;
      j["gamma_more_levels"] = detail::complex_json(p.gamma_more_levels);
      j["level_stability"] = p.level_stability;
      j["residue_ratio"] = p.residue_ratio;
      rep.checks.push_back(
          check_le("phase_flatness" + tag, p.flatness, 1e-2 * (1.0 + std::abs(p.gamma)), "1e-2 (1 + |gamma|)"));
    } else {
      j["phase_error_message"] = e.phase_error_message;
      rep.checks.push_back({"phase_flatness" + tag, NAN, 1e-2, "<=", false, e.phase_error_message});
    }
    arr.push_back(j);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < e.phi.size(); ++i)
      rows.push_back({c.physical.x(i), e.phi.values[i].real(), e.phi.values[i].imag()});
    rep.files.push_back({"eigenfunction_" + std::to_string(k) + ".csv", detail::csv({"x", "re_phi", "im_phi"}, rows)});
  }
  rep.result["eigenvalues"] = ds.eigenvalues;
  rep.result["scattering"] = arr;
}

inline void run_bs(RunReport& rep) {
  const RunConfig& c = rep.config;
  detail::Timer t(rep, "bs");
  const DiscreteSpectrum ds = discrete_spectrum(c.potential, c.spectrum_options());
  Json arr = Json::array();
  std::vector<std::vector<double>> rows;
  for (double E : c.E_list) {
    const BSCount b = bs_count(c.potential, E, c.physical, ds, c.rule);
    arr.push_back({{"E", E},
                   {"count", b.count},
                   {"cross_check", b.cross_check},
                   {"marginal_K", b.marginal_K},
                   {"marginal_L", b.marginal_L},
                   {"K_eigenvalues", b.K_eigenvalues},
                   {"L_eigenvalues", b.L_eigenvalues}});
    rep.checks.push_back(check_eq("bs_correspondence[E=" + detail::label(E) + "]", static_cast<double>(b.count),
                                  static_cast<double>(b.cross_check), "count == cross_check"));
    rows.push_back({E, static_cast<double>(b.count), static_cast<double>(b.cross_check)});
  }
  rep.result["bs"] = arr;
  rep.files.push_back({"bs.csv", detail::csv({"E", "count", "cross_check"}, rows)});
}

inline void run_secular(RunReport& rep) {
  const RunConfig& c = rep.config;
  detail::Timer t(rep, "secular");
  SecularOptions opt;
  opt.rule = c.rule;
  Json arr = Json::array();
  for (double E : c.E_list) {
    const SecularSolve s = secular_solve(c.potential, E, c.physical, opt);
    SecularOptions wide = opt;
    wide.chi = Cutoff::wide();
    const SecularSolve w = secular_solve(c.potential, E, c.physical, wide);
    const double chi_dep = std::abs(w.lambda_root - s.lambda_root) / s.lambda_root;
    arr.push_back({{"E", E},
                   {"lambda_root", s.lambda_root},
                   {"lambda0", s.lambda0},
                   {"iterations", s.iterations},
                   {"residual", s.residual},
                   {"R", s.R},
                   {"integral_u", s.integral_u},
                   {"M_norm", s.M_norm},
                   {"M_hs", s.M_hs},
                   {"top_K", s.top_K},
                   {"second_K", s.second_K},
                   {"relative_mismatch", s.relative_mismatch},
                   {"leading_order_ratio", s.leading_order_ratio},
                   {"cutoff", s.cutoff_id},
                   {"lambda_root_wide_cutoff", w.lambda_root},
                   {"cutoff_dependence", chi_dep}});
    const std::string tag = "[E=" + detail::label(E) + "]";
    rep.checks.push_back(check_le("secular_equivalence" + tag, s.relative_mismatch, 1e-6, "|1/lambda - top(K)|/top(K)"));
    rep.checks.push_back(check_le("secular_residual" + tag, s.residual, 1e-12));
    rep.checks.push_back(check_le("cutoff_independence" + tag, chi_dep, 1e-6));
  }
  rep.result["secular"] = arr;
  if (c.E_list.size() >= 2 && std::is_sorted(c.E_list.rbegin(), c.E_list.rend())) {
    const CountBoundScan sc = count_bound_scan(c.potential, c.E_list, c.physical, opt);
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : sc.rows) {
      rows.push_back({r.E, static_cast<double>(r.count), static_cast<double>(r.cross_check), r.hs_squared,
                      r.inv_lambda_squared, r.bound_value});
      pts.emplace_back(r.E, r.bound_value);
    }
    rep.result["scan"] = {{"max_bound", sc.max_bound},
                          {"band_ratio", sc.band_ratio},
                          {"hs_growth", sc.hs_growth},
                          {"count_constant_in_tail", sc.count_constant_in_tail}};
    rep.checks.push_back(check_le("count_bound_band", sc.band_ratio, 1.5, "max/min of ||K||_HS^2 - 1/lambda^2"));
    rep.checks.push_back(check_eq("count_bound_tail", sc.count_constant_in_tail ? 1.0 : 0.0, 1.0));
    rep.files.push_back({"scan.csv", detail::csv({"E", "count", "cross_check", "hs2", "inv_lambda2", "bound_value"}, rows)});
    rep.files.push_back({"plots/scan.dat", detail::dat(pts, "E hs2-1/lambda^2")});
  }
}

inline void run_sweep(RunReport& rep) {
  const RunConfig& c = rep.config;
  detail::Timer t(rep, "sweep");
  std::vector<double> cs = c.couplings;
  if (cs.empty())
    for (int k = 1; k <= 10; ++k) cs.push_back(0.2 * k);
  const CouplingBranch br = coupling_sweep(c.potential, cs, c.spectrum_options());
  rep.result["couplings"] = br.couplings;
  rep.result["mu"] = br.mu;
  rep.result["log"] = br.log;
  rep.warnings.insert(rep.warnings.end(), br.log.begin(), br.log.end());
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < br.couplings.size(); ++k)
    for (std::size_t n = 0; n < br.mu[k].size(); ++n) rows.push_back({br.couplings[k], static_cast<double>(n), br.mu[k][n]});
  rep.files.push_back({"sweep.csv", detail::csv({"coupling", "branch", "mu"}, rows)});
  for (std::size_t n = 0; n < br.branch_count(); ++n) {
    if (br.max_increment(n) != -std::numeric_limits<double>::infinity())
      rep.checks.push_back(check_le("coupling_monotonicity[branch " + std::to_string(n) + "]", br.max_increment(n), -1e-8,
                                    "max mu_n(c_{k+1}) - mu_n(c_k)"));
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < br.couplings.size(); ++k)
      if (n < br.mu[k].size()) pts.emplace_back(br.couplings[k], br.mu[k][n]);
    rep.files.push_back({"plots/branch_" + std::to_string(n) + ".dat", detail::dat(pts, "coupling mu")});
  }
}

inline void run_evolve(RunReport& rep) {
  const RunConfig& c = rep.config;
  Trajectory tr;
  {
    detail::Timer t(rep, "evolve");
    tr = evolve(c.potential, c.evolution);
  }
  rep.warnings.insert(rep.warnings.end(), tr.warnings.begin(), tr.warnings.end());
  DriftReport dr;
  {
    detail::Timer t(rep, "isospectral_drift");
    dr = isospectral_drift(tr, c.spectrum_options());
  }
  rep.warnings.insert(rep.warnings.end(), dr.warnings.begin(), dr.warnings.end());
  Json& r = rep.result;
  std::vector<std::vector<double>> cons, snaps;
  std::vector<std::pair<double, double>> mass_pts;
  for (const auto& s : tr.snapshots) {
    cons.push_back({s.t, s.mass, s.energy, s.max_imag, s.sup});
    mass_pts.emplace_back(s.t, s.energy);
    for (std::size_t j = 0; j < s.u.size(); ++j) snaps.push_back({s.t, tr.grid.x(j), s.u[j]});
  }
  r["times"] = dr.times;
  r["eigenvalues"] = dr.eigenvalues;
  r["drift"] = dr.drift;
  r["mass_drift"] = tr.mass_drift();
  r["energy_drift"] = tr.energy_drift();
  r["max_imag"] = tr.max_imag();
  const double speed = peak_speed(tr);
  r["peak_speed"] = speed;
  rep.checks.push_back(check_le("conservation_mass", tr.mass_drift(), 1e-8));
  rep.checks.push_back(check_le("conservation_energy", tr.energy_drift(), 1e-8));
  rep.checks.push_back(check_le("reality", tr.max_imag(), 1e-12));
  for (std::size_t b = 0; b < dr.drift.size(); ++b)
    rep.checks.push_back(check_le("isospectral_drift[branch " + std::to_string(b) + "]", dr.drift[b], 1e-3));
  if (c.potential.family == Family::soliton && tr.snapshots.back().t > 0.0) {
    const double nu = c.potential.nu * c.potential.coupling;
    if (c.potential.coupling == 1.0) {
      const double err = std::abs(speed - nu) / nu;
      r["speed_error"] = err;
      rep.checks.push_back(check_le("soliton_speed", err, 1e-3, "|c - nu|/nu"));
    }
  }
  std::vector<std::vector<double>> drows;
  std::vector<std::pair<double, double>> dpts;
  for (std::size_t k = 0; k < dr.times.size(); ++k)
    for (std::size_t b = 0; b < dr.eigenvalues[k].size(); ++b) {
      drows.push_back({dr.times[k], static_cast<double>(b), dr.eigenvalues[k][b]});
      if (b == 0 && !dr.eigenvalues.front().empty())
        dpts.emplace_back(dr.times[k], std::abs(dr.eigenvalues[k][0] - dr.eigenvalues.front()[0]));
    }
  rep.files.push_back({"conserved.csv", detail::csv({"t", "mass", "energy", "max_imag", "sup"}, cons)});
  rep.files.push_back({"snapshots.csv", detail::csv({"t", "x", "u"}, snaps)});
  rep.files.push_back({"drift.csv", detail::csv({"t", "branch", "eigenvalue"}, drows)});
  rep.files.push_back({"plots/energy.dat", detail::dat(mass_pts, "t int_u^2")});
  rep.files.push_back({"plots/drift.dat", detail::dat(dpts, "t |lambda_0(t) - lambda_0(0)|")});
}

// ---------------------------------------------------------------------------------------------
// verify

struct VerifyRow {
  std::string lemma;
  std::string potential;
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation = "<=";
  std::string status;  ///< pass | fail | error
  std::string detail;
};

inline std::vector<std::pair<std::string, PotentialSpec>> default_corpus() {
  return {{"soliton(nu=0.5)", PotentialSpec::soliton(0.5)},
          {"soliton(nu=1)", PotentialSpec::soliton(1.0)},
          {"soliton(nu=2)", PotentialSpec::soliton(2.0)},
          {"gaussian(a=1,w=2)", PotentialSpec::gaussian(1.0, 2.0)},
          {"two_soliton(1@-30,2@30)", PotentialSpec::multi_soliton({{1.0, -30.0}, {2.0, 30.0}})}};
}

inline std::string describe(const PotentialSpec& s) {
  const Json j = potential_to_json(s);
  std::string out = j.value("family", std::string("potential")) + "(";
  bool first = true;
  for (const auto& [k, v] : j.items()) {
    if (k == "family" || (k == "coupling" && v.is_number() && v.get<double>() == 1.0)) continue;
    if (!first) out += ",";
    first = false;
    out += k + "=" + (v.is_number() ? detail::label(v.get<double>()) : v.is_string() ? v.get<std::string>() : v.dump());
  }
  return out + ")";
}

/// Seeded band-limited pair on a grid: random coefficients on |xi| < nyquist/4.
inline ComplexField random_band_limited(const PhysicalGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<cplx> v(g.n_points, cplx{});
  const std::size_t keep = g.n_points / 8;
  for (std::size_t k = 0; k < g.n_points; ++k) {
    const std::size_t kk = (k <= g.n_points / 2) ? k : g.n_points - k;
    if (kk > 0 && kk < keep) v[k] = cplx(nd(rng), nd(rng));
  }
  Fft fft(g.n_points);
  fft.backward(v);
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  for (auto& z : v) z /= m;
  return ComplexField(g, std::move(v));
}

inline std::vector<VerifyRow> verify_suite(const RunConfig& c) {
  std::vector<VerifyRow> rows;
  auto guarded = [&](const std::string& lemma, const std::string& pot, const std::function<VerifyRow()>& f) {
    try {
      VerifyRow r = f();
      r.lemma = lemma;
      r.potential = pot;
      rows.push_back(r);
    } catch (const std::exception& e) {
      rows.push_back({lemma, pot, NAN, NAN, "<=", "error", e.what()});
    }
  };
  auto le = [](double v, double tol, std::string detail = {}) {
    return VerifyRow{"", "", v, tol, "<=", (std::isfinite(v) && v <= tol) ? "pass" : "fail", std::move(detail)};
  };
  auto ge = [](double v, double tol, std::string detail = {}) {
    return VerifyRow{"", "", v, tol, ">=", (std::isfinite(v) && v >= tol) ? "pass" : "fail", std::move(detail)};
  };

  std::vector<std::pair<std::string, PotentialSpec>> corpus;
  if (!c.corpus.empty()) {
    for (const auto& p : c.corpus) corpus.emplace_back(describe(p), p);
  } else {
    corpus = default_corpus();
  }

  // projection identities on seeded band-limited pairs
  guarded("projection_identities", "seeded band-limited pairs", [&] {
    std::mt19937_64 rng(c.seed);
    const PhysicalGrid g = PhysicalGrid::make(1024, -50.0, 50.0);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const ComplexField f = random_band_limited(g, rng), h = random_band_limited(g, rng);
      for (Sign s : {Sign::plus, Sign::minus})
        worst = std::max({worst, projection_identity_residual(f, h, s), projection_product_residual(f, h, s)});
    }
    return le(worst, 1e-9, "max-norm residual, fields scaled to sup 1");
  });

  const PhysicalGrid hs_grid = PhysicalGrid::make(16384, -400.0, 400.0);
  for (const auto& [name, s] : corpus) {
    std::optional<DiscreteSpectrum> ds;
    guarded("spectrum", name, [&] {
      SpectrumOptions o = c.spectrum_options();
      o.keep_unstable = true;
      ds = discrete_spectrum(s, o);
      if (ds->unresolved)
        return le(1.0, 0.0, "eigenvalues do not stabilize under refinement; later rows use unstable eigenpairs");
      return le(0.0, 0.0, std::to_string(ds->size()) + " discrete eigenvalues");
    });
    if (!ds) continue;
    guarded("spectrum_lower_bound", name, [&] {
      return ge(ds->min_eigenvalue, -ds->sup_norm - 1e-6, "min eigenvalue vs -sup|u| - 1e-6");
    });
    std::vector<ScatteringEntry> sc;
    guarded("scattering", name, [&] {
      const SpectrumOptions t = transport_options(s, c.physical, c.spectrum_options());
      if (t.n_modes == c.n_modes) {
        sc = scattering_data(s, *ds, c.physical, c.rule);
      } else {
        sc = scattering_data(s, discrete_spectrum(s, t), c.physical, c.rule);
      }
      return le(0.0, 0.0, "eigenpairs processed on " + std::to_string(t.n_modes) + " modes");
    });
    guarded("integral_equation_residual", name, [&] {
      double w = 0.0;
      for (const auto& e : sc) w = std::max(w, e.integral_residual);
      return le(w, 1e-3, sc.empty() ? "empty spectrum" : "max over eigenpairs");
    });
    guarded("resolvent_hs_norm", name, [&] {
      if (s.is_zero()) return le(0.0, 1e-2, "u = 0: hs_norm = 0 exactly");
      const double lambda = ds->size() ? ds->eigenvalues.front() : -0.5;
      const double l2 = norms(s, c.physical).l2;
      const double hs = hs_norm_T(s, lambda, hs_grid, c.rule);
      const double ref = hs_norm_T_reference(l2, lambda);
      const double no_two_pi = l2 / std::sqrt(std::abs(lambda));
      return le(std::abs(hs - ref) / ref, 1e-2,
                "lambda = " + detail::fmt(lambda) + "; ratio to ||u||/sqrt|lambda| without the 2 pi = " +
                    detail::fmt(hs / no_two_pi));
    });
    guarded("eigenfunction_tail_limit", name, [&] {
      double w = 0.0, raw = 0.0;
      for (const auto& e : sc) {
        if (!e.tail) throw PreconditionError(e.tail_error_message);
        w = std::max(w, e.tail->extrapolated_error);
        raw = std::max(raw, e.tail->error);
      }
      return le(w, 1e-2, sc.empty() ? "empty spectrum"
                                    : "x phi extrapolated to 1/x = 0, max over eigenpairs; window-edge median error " +
                                          detail::fmt(raw));
    });
    guarded("pairing_identity", name, [&] {
      double w = 0.0;
      for (std::size_t k = 0; k < ds->size(); ++k)
        w = std::max(w, identity_check(ds->eigenfunction(k), s, ds->eigenvalues[k]));
      return le(w, 1e-3, ds->size() ? "max over eigenpairs" : "empty spectrum");
    });
    guarded("eigenvalue_gap", name, [&] {
      if (ds->size() < 2) return ge(1.0, 1.0, "fewer than two eigenvalues");
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k + 1 < ds->size(); ++k) {
        const double tol = 10.0 * stability_tolerance(ds->eigenvalues[k], ds->sup_norm);
        ratio = std::min(ratio, (ds->eigenvalues[k + 1] - ds->eigenvalues[k]) / tol);
      }
      return ge(ratio, 1.0, "min gap / (10 tol_stab)");
    });
    guarded("phase_flatness", name, [&] {
      double w = 0.0;
      for (const auto& e : sc) {
        if (!e.phase) throw NumericError(e.phase_error_message);
        w = std::max(w, e.phase->flatness / (1.0 + std::abs(e.phase->gamma)));
      }
      return le(w, 1e-2, sc.empty() ? "empty spectrum" : "max flatness / (1 + |gamma|)");
    });
    guarded("bs_correspondence", name, [&] {
      std::size_t bad = 0;
      std::string d;
      for (double E : {0.1, 0.25, 0.75}) {
        const BSCount b = bs_count(s, E, c.physical, *ds, c.rule);
        d += "E=" + detail::label(E) + ":" + std::to_string(b.count) + "/" + std::to_string(b.cross_check) +
             (b.marginal_K + b.marginal_L ? "(marginal)" : "") + " ";
        if (!b.agree) ++bad;
      }
      return le(static_cast<double>(bad), 0.0, d + "(count/cross_check)");
    });
  }

  // corpus-wide rows on the first corpus potential
  const auto& [name0, s0] = corpus.front();
  guarded("positive_part_ordering", "mixed(" + name0 + ")", [&] {
    const std::vector<double> xs = c.physical.points();
    std::vector<double> u = sample_real(s0, xs);
    const double amp = std::max(s0.sup_norm(), 1.0);
    for (std::size_t j = 0; j < xs.size(); ++j) u[j] -= 0.5 * amp * std::exp(-0.5 * (xs[j] - 5.0) * (xs[j] - 5.0));
    const PotentialSpec mixed = PotentialSpec::from_samples(xs, u);
    const PotentialSpec plus = PotentialSpec::from_samples(xs, positive_part(u));
    SpectrumOptions o = c.spectrum_options();
    if (!o.xi_max) o.xi_max = default_frequency_grid(s0, c.n_modes).xi_max;
    const auto a = discrete_spectrum(plus, o).eigenvalues;
    const auto b = discrete_spectrum(mixed, o).eigenvalues;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < b.size(); ++n) {
      if (n >= a.size()) return le(1.0, 0.0, "L_u has more negative eigenvalues than L_{u+}");
      worst = std::max(worst, a[n] - b[n]);
    }
    if (b.empty()) return le(0.0, 1e-6, "L_u has no negative eigenvalues");
    return le(worst, 1e-6, "max_n mu_n(u+) - mu_n(u)");
  });
  guarded("coupling_monotonicity", name0, [&] {
    if (s0.is_zero()) return le(-1.0, -1e-8, "u = 0: no branches");
    std::vector<double> cs;
    for (int k = 1; k <= 10; ++k) cs.push_back(0.2 * k);
    const CouplingBranch br = coupling_sweep(s0, cs, c.spectrum_options());
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < br.branch_count(); ++n) worst = std::max(worst, br.max_increment(n));
    if (!std::isfinite(worst)) return le(-1.0, -1e-8, "no branch seen at two couplings");
    return le(worst, -1e-8, "max increment over branches");
  });
  const PotentialSpec weak = s0.with_coupling(0.05 * s0.coupling);
  guarded("secular_equivalence", "0.05*" + name0, [&] {
    if (s0.is_zero()) return le(0.0, 1e-6, "u = 0: secular equation needs int u > 0 (skipped)");
    double w = 0.0;
    for (double E : {1e-2, 1e-3}) {
      SecularOptions o;
      o.rule = c.rule;
      w = std::max(w, secular_solve(weak, E, c.physical, o).relative_mismatch);
    }
    return le(w, 1e-6, "|1/lambda_root - top(K)|/top(K), E in {1e-2, 1e-3}");
  });
  guarded("count_bound_scan", "0.05*" + name0, [&] {
    if (s0.is_zero()) return le(1.0, 1.5, "u = 0: all zeros");
    SecularOptions o;
    o.rule = c.rule;
    const CountBoundScan sc = count_bound_scan(weak, {1e-2, 1e-3, 1e-4}, c.physical, o);
    VerifyRow r = le(sc.band_ratio, 1.5,
                     "band max/min of ||K||_HS^2 - 1/lambda^2; ||K||_HS^2 growth " + detail::fmt(sc.hs_growth));
    if (!sc.count_constant_in_tail) r.status = "fail";
    return r;
  });
  return rows;
}

inline void run_verify(RunReport& rep) {
  detail::Timer t(rep, "verify");
  const auto rows = verify_suite(rep.config);
  Json arr = Json::array();
  std::vector<std::vector<double>> csvrows;
  std::string csvtext = "lemma,potential,value,relation,tolerance,status\n";
  for (const auto& r : rows) {
    arr.push_back({{"lemma", r.lemma},
                   {"potential", r.potential},
                   {"value", std::isfinite(r.value) ? Json(r.value) : Json(nullptr)},
                   {"relation", r.relation},
                   {"tolerance", std::isfinite(r.tolerance) ? Json(r.tolerance) : Json(nullptr)},
                   {"status", r.status},
                   {"detail", r.detail}});
    Check ck{r.lemma + "[" + r.potential + "]", r.value, r.tolerance, r.relation, r.status == "pass", r.detail};
    rep.checks.push_back(ck);
    std::string pot = r.potential;
    std::replace(pot.begin(), pot.end(), ',', ';');
    std::replace(pot.begin(), pot.end(), '"', '\'');
    csvtext += r.lemma + ",\"" + pot + "\"," + detail::fmt(r.value) + "," + r.relation + "," + detail::fmt(r.tolerance) +
               "," + r.status + "\n";
  }
  rep.result["rows"] = arr;
  rep.files.push_back({"verify.csv", csvtext});
}

// ---------------------------------------------------------------------------------------------

/// Runs the configured command. Module errors propagate.
inline RunReport run(const RunConfig& c) {
  RunReport rep;
  rep.config = c;
  const std::string& cmd = c.command;
  if (cmd == "spectrum") run_spectrum(rep);
  else if (cmd == "scattering") run_scattering(rep);
  else if (cmd == "bs") run_bs(rep);
  else if (cmd == "secular") run_secular(rep);
  else if (cmd == "sweep") run_sweep(rep);
  else if (cmd == "evolve") run_evolve(rep);
  else if (cmd == "verify") run_verify(rep);
  else throw UsageError("unknown command '" + cmd + "'");
  return rep;
}

/// Writes report.json (deterministic), timings.json and the side files under outdir.
inline void write_outputs(const RunReport& rep, const std::filesystem::path& outdir, std::size_t threads = 1) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir / "plots");
  {
    std::ofstream o(outdir / "report.json");
    o << rep.to_json().dump(2) << "\n";
  }
  {
    Json t;
    for (const auto& [k, v] : rep.timings) t[k] = v;
    Json j{{"timings_seconds", t}, {"threads", threads}};
    std::ofstream o(outdir / "timings.json");
    o << j.dump(2) << "\n";
  }
  for (const auto& f : rep.files) {
    const fs::path p = outdir / f.name;
    fs::create_directories(p.parent_path());
    std::ofstream o(p);
    o << f.content;
  }
}

/// Maps an exception to the documented exit status.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigurationError*>(&e) || dynamic_cast<const InputError*>(&e) ||
      dynamic_cast<const CapabilityError*>(&e))
    return kUsage;
  return kNumeric;
}

}  // namespace bolax::cli
