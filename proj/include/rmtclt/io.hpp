#pragma once

// JSON schemas for ensembles, test functions, experiment configs and
// reports; config hashing and the on-disk result store.

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rmtclt/ensemble.hpp"
#include "rmtclt/error.hpp"
#include "rmtclt/harness.hpp"
#include "rmtclt/spectral.hpp"
#include "rmtclt/test_function.hpp"
#include "rmtclt/theory.hpp"

namespace rmtclt {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what) {
  fail(ErrorCode::InvalidSpec, where + ": " + what);
}

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(where, std::string("missing field \"") + key + "\"");
  return *it;
}

inline void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) {
      std::string list;
      for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
      schema_error(where, "unknown field \"" + it.key() + "\" (allowed: " + list + ")");
    }
  }
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where, "expected a number");
  return j.get<double>();
}

inline std::uint64_t unsigned_integer(const json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    schema_error(where, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

inline double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, where + "." + key);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Entry distributions: {family, scale, a | kappa4, values, probs}

inline json to_json(const EntryDistribution& d) {
  json j;
  j["family"] = to_string(d.family());
  j["scale"] = d.scale();
  if (d.family() == Family::TwoPointSym) j["a"] = d.atom();
  if (d.family() == Family::Table) {
    j["values"] = d.values();
    j["probs"] = d.probs();
  }
  return j;
}

inline EntryDistribution entry_distribution_from_json(const json& j, const std::string& where) {
  detail::only_keys(j, {"family", "scale", "a", "kappa4", "values", "probs"}, where);
  const json& fam = detail::field(j, "family", where);
  if (!fam.is_string()) detail::schema_error(where + ".family", "expected a string");
  const std::string f = fam.get<std::string>();
  const double scale = detail::number_or(j, "scale", 1.0, where);
  if (f == "gaussian") return EntryDistribution::gaussian(scale);
  if (f == "rademacher") return EntryDistribution::rademacher(scale);
  if (f == "uniform") return EntryDistribution::uniform_sym(scale);
  if (f == "two_point_sym") {
    const bool has_a = j.contains("a"), has_k = j.contains("kappa4");
    if (has_a == has_k) detail::schema_error(where, "two_point_sym needs exactly one of \"a\" or \"kappa4\"");
    if (has_a) return EntryDistribution::two_point_sym(detail::number(j["a"], where + ".a"), scale);
    return EntryDistribution::two_point_sym_kappa4(detail::number(j["kappa4"], where + ".kappa4"), scale);
  }
  if (f == "table") {
    const json& v = detail::field(j, "values", where);
    const json& p = detail::field(j, "probs", where);
    if (!v.is_array() || !p.is_array()) detail::schema_error(where, "values and probs must be arrays");
    std::vector<double> vals, probs;
    for (const auto& x : v) vals.push_back(detail::number(x, where + ".values"));
    for (const auto& x : p) probs.push_back(detail::number(x, where + ".probs"));
    return EntryDistribution::table(std::move(vals), std::move(probs), scale);
  }
  detail::schema_error(where + ".family",
                       "unknown family \"" + f + "\" (gaussian, rademacher, uniform, two_point_sym, table)");
}

// ---------------------------------------------------------------------------
// Ensembles: {kind, n, m | c, offdiag, diag, seed}

inline json to_json(const EnsembleSpec& s) {
  json j;
  j["kind"] = to_string(s.kind);
  j["n"] = s.n;
  if (s.m) j["m"] = *s.m;
  if (s.c) j["c"] = *s.c;
  j["offdiag"] = to_json(s.offdiag);
  if (s.kind == EnsembleKind::Wigner) j["diag"] = to_json(s.diag);
  j["seed"] = s.seed;
  return j;
}

inline EnsembleKind ensemble_kind_from_string(const std::string& k, const std::string& where) {
  if (k == "wigner") return EnsembleKind::Wigner;
  if (k == "sample_covariance" || k == "samplecov") return EnsembleKind::SampleCovariance;
  detail::schema_error(where, "unknown ensemble kind \"" + k + "\" (wigner, sample_covariance)");
}

inline EnsembleSpec ensemble_from_json(const json& j, const std::string& where = "ensemble") {
  detail::only_keys(j, {"kind", "n", "m", "c", "offdiag", "diag", "seed"}, where);
  EnsembleSpec s;
  const json& kind = detail::field(j, "kind", where);
  if (!kind.is_string()) detail::schema_error(where + ".kind", "expected a string");
  s.kind = ensemble_kind_from_string(kind.get<std::string>(), where + ".kind");
  s.n = detail::unsigned_integer(detail::field(j, "n", where), where + ".n");
  if (j.contains("m")) s.m = detail::unsigned_integer(j["m"], where + ".m");
  if (j.contains("c")) s.c = detail::number(j["c"], where + ".c");
  if (j.contains("offdiag")) s.offdiag = entry_distribution_from_json(j["offdiag"], where + ".offdiag");
  if (j.contains("diag")) {
    if (s.kind != EnsembleKind::Wigner) detail::schema_error(where + ".diag", "only Wigner ensembles have a diagonal law");
    s.diag = entry_distribution_from_json(j["diag"], where + ".diag");
  }
  if (s.kind == EnsembleKind::Wigner && (s.m || s.c)) detail::schema_error(where, "m and c apply to sample_covariance only");
  if (j.contains("seed")) s.seed = detail::unsigned_integer(j["seed"], where + ".seed");
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Test functions: {variant, params..., scale}

inline json to_json(const TestFunction& phi) {
  json j = std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, TestFunction::Monomial>) {
          return {{"variant", "monomial"}, {"k", f.k}};
        } else if constexpr (std::is_same_v<T, TestFunction::Polynomial>) {
          return {{"variant", "polynomial"}, {"coeffs", f.coeffs}};
        } else if constexpr (std::is_same_v<T, TestFunction::GaussianBump>) {
          return {{"variant", "gaussian_bump"}, {"center", f.center}, {"width", f.width}, {"amplitude", f.amplitude}};
        } else if constexpr (std::is_same_v<T, TestFunction::ImResolvent>) {
          return {{"variant", "im_resolvent"}, {"x", f.x}, {"y", f.y}};
        } else {
          return {{"variant", "poisson_smoothed"}, {"eta", f.eta}, {"base", to_json(*f.base)}};
        }
      },
      phi.variant());
  if (phi.scale() != 1.0) j["scale"] = phi.scale();
  return j;
}

inline TestFunction test_function_from_json(const json& j, const std::string& where = "phi") {
  const json& var = detail::field(j, "variant", where);
  if (!var.is_string()) detail::schema_error(where + ".variant", "expected a string");
  const std::string v = var.get<std::string>();
  const double scale = detail::number_or(j, "scale", 1.0, where);
  auto finish = [&](TestFunction f) { return scale == 1.0 ? f : f.scaled(scale); };
  if (v == "monomial") {
    detail::only_keys(j, {"variant", "k", "scale"}, where);
    return finish(TestFunction::monomial(static_cast<int>(detail::unsigned_integer(detail::field(j, "k", where), where + ".k"))));
  }
  if (v == "polynomial") {
    detail::only_keys(j, {"variant", "coeffs", "scale"}, where);
    const json& c = detail::field(j, "coeffs", where);
    if (!c.is_array()) detail::schema_error(where + ".coeffs", "expected an array of numbers (ascending powers)");
    std::vector<double> coeffs;
    for (const auto& x : c) coeffs.push_back(detail::number(x, where + ".coeffs"));
    return finish(TestFunction::polynomial(std::move(coeffs)));
  }
  if (v == "gaussian_bump") {
    detail::only_keys(j, {"variant", "center", "width", "amplitude", "scale"}, where);
    return finish(TestFunction::gaussian_bump(detail::number_or(j, "center", 0.0, where),
                                              detail::number(detail::field(j, "width", where), where + ".width"),
                                              detail::number_or(j, "amplitude", 1.0, where)));
  }
  if (v == "im_resolvent") {
    detail::only_keys(j, {"variant", "x", "y", "scale"}, where);
    return finish(TestFunction::im_resolvent(detail::number_or(j, "x", 0.0, where),
                                             detail::number(detail::field(j, "y", where), where + ".y")));
  }
  if (v == "poisson_smoothed") {
    detail::only_keys(j, {"variant", "eta", "base", "scale"}, where);
    const TestFunction base = test_function_from_json(detail::field(j, "base", where), where + ".base");
    return finish(
        TestFunction::poisson_smoothed(base, detail::number(detail::field(j, "eta", where), where + ".eta")));
  }
  detail::schema_error(where + ".variant", "unknown variant \"" + v +
                                               "\" (monomial, polynomial, gaussian_bump, im_resolvent, poisson_smoothed)");
}

// ---------------------------------------------------------------------------
// Experiment configs

inline StatisticKind statistic_kind_from_string(const std::string& s, const std::string& where) {
  if (s == "linear") return StatisticKind::Linear;
  if (s == "resolvent_grid") return StatisticKind::ResolventGrid;
  if (s == "poisson") return StatisticKind::Poisson;
  detail::schema_error(where, "unknown statistic \"" + s + "\" (linear, resolvent_grid, poisson)");
}

/// Keys of an experiment document besides those read by config_from_json;
/// the CLI uses them for scan, inequality and truncation parameters.
inline constexpr std::initializer_list<const char*> experiment_keys = {
    "ensemble", "phi",     "replicates", "statistic", "z_grid", "charfn_x",   "seed",
    "retain_values", "workers", "bootstrap_resamples", "scan", "pj", "truncation"};

inline json to_json(const ExperimentConfig& c) {
  json j;
  j["ensemble"] = to_json(c.effective_ensemble());
  j["phi"] = to_json(c.phi);
  j["replicates"] = c.replicates;
  j["statistic"] = to_string(c.statistic);
  json grid = json::array();
  for (const auto& z : c.z_grid) grid.push_back({z.re, z.im});
  j["z_grid"] = grid;
  j["charfn_x"] = c.charfn_x;
  j["seed"] = c.seed;
  j["retain_values"] = c.retain_values;
  j["workers"] = c.workers;
  j["bootstrap_resamples"] = c.bootstrap_resamples;
  return j;
}

inline ExperimentConfig config_from_json(const json& j) {
  detail::only_keys(j, experiment_keys, "config");
  ExperimentConfig c;
  c.ensemble = ensemble_from_json(detail::field(j, "ensemble", "config"));
  c.seed = c.ensemble.seed;
  if (j.contains("phi")) c.phi = test_function_from_json(j["phi"]);
  if (j.contains("replicates")) c.replicates = detail::unsigned_integer(j["replicates"], "config.replicates");
  if (j.contains("statistic")) {
    if (!j["statistic"].is_string()) detail::schema_error("config.statistic", "expected a string");
    c.statistic = statistic_kind_from_string(j["statistic"].get<std::string>(), "config.statistic");
  }
  if (j.contains("z_grid")) {
    if (!j["z_grid"].is_array()) detail::schema_error("config.z_grid", "expected an array of [re, im] pairs");
    for (const auto& z : j["z_grid"]) {
      if (z.is_array() && z.size() == 2) {
        c.z_grid.push_back({detail::number(z[0], "config.z_grid"), detail::number(z[1], "config.z_grid")});
      } else if (z.is_object()) {
        c.z_grid.push_back({detail::number(detail::field(z, "re", "config.z_grid"), "config.z_grid.re"),
                            detail::number(detail::field(z, "im", "config.z_grid"), "config.z_grid.im")});
      } else {
        detail::schema_error("config.z_grid", "expected [re, im] or {re, im}");
      }
    }
  }
  if (j.contains("charfn_x")) {
    const json& x = j["charfn_x"];
    if (x.is_array()) {
      c.charfn_x.clear();
      for (const auto& v : x) c.charfn_x.push_back(detail::number(v, "config.charfn_x"));
    } else if (x.is_object()) {
      detail::only_keys(x, {"min", "max", "count"}, "config.charfn_x");
      c.charfn_x = linspace(detail::number_or(x, "min", -3.0, "config.charfn_x"),
                            detail::number_or(x, "max", 3.0, "config.charfn_x"),
                            x.contains("count") ? detail::unsigned_integer(x["count"], "config.charfn_x.count") : 61);
    } else {
      detail::schema_error("config.charfn_x", "expected an array or {min, max, count}");
    }
  }
  if (j.contains("seed")) c.seed = detail::unsigned_integer(j["seed"], "config.seed");
  if (j.contains("retain_values")) {
    if (!j["retain_values"].is_boolean()) detail::schema_error("config.retain_values", "expected a boolean");
    c.retain_values = j["retain_values"].get<bool>();
  }
  if (j.contains("workers")) c.workers = detail::unsigned_integer(j["workers"], "config.workers");
  if (j.contains("bootstrap_resamples"))
    c.bootstrap_resamples = detail::unsigned_integer(j["bootstrap_resamples"], "config.bootstrap_resamples");
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const VarianceReport& r) {
  return {{"total", r.total},           {"term_main", r.term_main}, {"term_kappa4", r.term_kappa4},
          {"term_w2", r.term_w2},       {"nodes_used", r.nodes_used}, {"est_error", r.est_error}};
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json to_json(const StatisticSummary& s) {
  json j;
  j["label"] = s.label;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["ci"] = {{"lo", s.ci.lo}, {"hi", s.ci.hi}, {"bootstrap_se", s.ci.se}, {"resamples", s.ci.resamples},
             {"level", 0.95}};
  j["theory"] = optional_number(s.theory);
  j["ratio"] = s.theory && *s.theory != 0.0 ? json(s.variance / *s.theory) : json(nullptr);
  if (s.normality) {
    json rows = json::array();
    for (const auto& r : s.normality->charfn)
      rows.push_back({{"x", r.x}, {"re", r.value.real()}, {"im", r.value.imag()}, {"reference", r.reference},
                      {"abs_diff", r.abs_diff}});
    j["normality"] = {{"ks_distance", s.normality->ks_distance},
                      {"max_charfn_diff", s.normality->max_charfn_diff},
                      {"charfn", rows}};
  } else {
    j["normality"] = nullptr;
  }
  if (!s.values.empty()) j["values"] = s.values;
  return j;
}

/// UTC time as an ISO-8601 string.
inline std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Everything that varies between identical reruns lives under "timestamp".
inline json timestamp_block(double runtime_seconds) {
  return {{"utc", utc_timestamp()}, {"runtime_seconds", runtime_seconds}};
}

inline json to_json(const ExperimentResult& r) {
  json j;
  j["config"] = to_json(r.config);
  j["aspect"] = {{"requested", r.requested_aspect}, {"realized", r.realized_aspect}};
  json stats = json::array();
  for (const auto& s : r.statistics) stats.push_back(to_json(s));
  j["statistics"] = stats;
  j["notes"] = r.notes;
  j["timestamp"] = timestamp_block(r.runtime_seconds);
  return j;
}

inline json to_json(const BoundScanReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"y", row.y},
                    {"var_re", row.var_re},
                    {"var_im", row.var_im},
                    {"variance", row.variance},
                    {"y4_variance", row.scaled},
                    {"y4_variance_se", row.scaled_se}});
  return {{"x", r.x},         {"n", r.n}, {"replicates", r.replicates}, {"rows", rows}, {"spread", r.spread},
          {"shape_violation", r.shape_violation}};
}

inline json to_json(const PjReport& r) {
  return {{"lhs", r.lhs},
          {"lhs_se", r.lhs_se},
          {"norm_sq", r.norm_sq},
          {"rhs", r.rhs},
          {"tail_slack", r.slack},
          {"ratio", r.rhs > 0.0 ? json(r.ratio) : json(nullptr)},
          {"flag", r.flag},
          {"replicates", r.replicates},
          {"y_nodes", r.y_nodes},
          {"x_integrals", r.x_integrals},
          {"half_widths", r.half_widths}};
}

inline json to_json(const TruncationReport& r) {
  return {{"tau", r.tau},
          {"mean_abs_diff", r.mean_abs_diff},
          {"se", r.se},
          {"lindeberg_l4", r.lindeberg},
          {"sup_abs_derivative", r.derivative_bound},
          {"bound", r.bound},
          {"mean_truncated_entries", r.mean_truncated_entries},
          {"replicates", r.replicates},
          {"within_bound", r.within}};
}

// ---------------------------------------------------------------------------
// Hashing and the result store

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Hash of a config document. The worker count is left out because it does
/// not change any result.
inline std::string config_hash(json config) {
  if (config.is_object()) config.erase("workers");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::InvalidSpec, path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

/// Files are named <kind>_<hash>.json; index.json maps each hash to its
/// kind and config.
class ResultStore {
 public:
  explicit ResultStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) fail(ErrorCode::Io, "cannot create " + dir_.string() + ": " + ec.message());
  }

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path write(const std::string& kind, const json& config, const json& report) {
    const std::string hash = config_hash(config);
    const auto path = dir_ / (kind + "_" + hash + ".json");
    write_text_file(path, report.dump(2) + "\n");
    update_index(hash, kind, config);
    return path;
  }

  std::filesystem::path path_for(const std::string& kind, const json& config, const std::string& suffix) const {
    return dir_ / (kind + "_" + config_hash(config) + suffix);
  }

 private:
  void update_index(const std::string& hash, const std::string& kind, const json& config) {
    const auto path = dir_ / "index.json";
    json index = json::object();
    if (std::filesystem::exists(path)) index = read_json_file(path);
    index[hash] = {{"kind", kind}, {"config", config}};
    write_text_file(path, index.dump(2) + "\n");
  }

  std::filesystem::path dir_;
};

/// Per-replicate values, one row per replicate and one column per statistic.
inline void write_values_csv(std::ostream& os, const ExperimentResult& r) {
  os << "replicate";
  for (const auto& s : r.statistics) os << ",\"" << s.label << "\"";
  os << "\n";
  if (r.statistics.empty() || r.statistics.front().values.empty()) return;
  char buf[32];
  for (std::size_t i = 0; i < r.statistics.front().values.size(); ++i) {
    os << i;
    for (const auto& s : r.statistics) {
      std::snprintf(buf, sizeof buf, "%.17g", s.values[i]);
      os << "," << buf;
    }
    os << "\n";
  }
}

}  // namespace rmtclt
