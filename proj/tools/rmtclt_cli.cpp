// rmtclt: command-line front end over the rmtclt library.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rmtclt/rmtclt.hpp"

namespace {

using rmtclt::json;

struct CliOptions {
  std::string command;
  std::string config_path;
  std::string out_dir = "results";
  std::optional<std::size_t> n, replicates, workers, nodes;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> replicate;
  std::optional<double> c, kappa4, w2, s, x, eta;
  std::optional<std::string> ensemble, phi;
  std::vector<double> tau, y;
  int verbosity = 0;
};

[[noreturn]] void usage_error(const std::string& what) { rmtclt::fail(rmtclt::ErrorCode::InvalidSpec, what); }

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      usage_error(what + ": \"" + item + "\" is not a number");
    }
  }
  return out;
}

/// --phi shorthand: monomial:K, poly:A0,A1,..., gauss:C,W[,A], imres:X,Y,
/// smooth:ETA:<shorthand>.
rmtclt::TestFunction parse_phi(const std::string& text) {
  const std::string hint = "--phi expects monomial:K, poly:A0,A1,..., gauss:C,W[,A], imres:X,Y or smooth:ETA:PHI";
  const auto colon = text.find(':');
  if (colon == std::string::npos) usage_error(hint);
  const std::string head = text.substr(0, colon), rest = text.substr(colon + 1);
  if (head == "smooth") {
    const auto second = rest.find(':');
    if (second == std::string::npos) usage_error(hint);
    const auto eta = parse_numbers(rest.substr(0, second), "--phi");
    if (eta.size() != 1) usage_error(hint);
    return rmtclt::TestFunction::poisson_smoothed(parse_phi(rest.substr(second + 1)), eta[0]);
  }
  const auto v = parse_numbers(rest, "--phi");
  if (head == "monomial" && v.size() == 1 && v[0] >= 0 && v[0] == static_cast<int>(v[0]))
    return rmtclt::TestFunction::monomial(static_cast<int>(v[0]));
  if (head == "poly" && !v.empty()) return rmtclt::TestFunction::polynomial(v);
  if (head == "gauss" && (v.size() == 2 || v.size() == 3))
    return rmtclt::TestFunction::gaussian_bump(v[0], v[1], v.size() == 3 ? v[2] : 1.0);
  if (head == "imres" && v.size() == 2) return rmtclt::TestFunction::im_resolvent(v[0], v[1]);
  usage_error(hint);
}

/// Config document after flag and environment overrides. The result is
/// parsed by the library schema before anything runs.
json effective_document(const CliOptions& o) {
  json doc;
  if (!o.config_path.empty()) {
    doc = rmtclt::read_json_file(o.config_path);
    if (!doc.is_object()) usage_error(o.config_path + ": top level must be an object");
  } else {
    doc = {{"ensemble", {{"kind", "wigner"}, {"n", 100}}}};
  }
  if (!doc.contains("ensemble") || !doc["ensemble"].is_object()) usage_error("config: missing \"ensemble\" object");
  json& ens = doc["ensemble"];
  if (o.ensemble) {
    ens["kind"] = *o.ensemble;
    if (rmtclt::ensemble_kind_from_string(*o.ensemble, "--ensemble") != rmtclt::EnsembleKind::Wigner) ens.erase("diag");
  }
  const bool wigner = ens.contains("kind") && ens["kind"].is_string() &&
                      ens["kind"].get<std::string>() == "wigner";
  if (o.n) ens["n"] = *o.n;
  if (o.c) {
    ens["c"] = *o.c;
    ens.erase("m");
  }
  if (o.kappa4) {
    const double scale = ens.contains("offdiag") && ens["offdiag"].contains("scale") ? ens["offdiag"]["scale"].get<double>() : 1.0;
    ens["offdiag"] = *o.kappa4 == 0.0 ? json{{"family", "gaussian"}, {"scale", scale}}
                                       : json{{"family", "two_point_sym"}, {"kappa4", *o.kappa4}, {"scale", scale}};
  }
  if (o.w2) {
    if (!wigner) usage_error("--w2 applies to Wigner ensembles only");
    if (!(*o.w2 > 0.0)) usage_error("--w2 must be > 0");
    ens["diag"] = {{"family", "gaussian"}, {"scale", std::sqrt(*o.w2)}};
  }
  if (o.replicates) doc["replicates"] = *o.replicates;
  if (o.workers) doc["workers"] = *o.workers;
  if (o.phi) doc["phi"] = rmtclt::to_json(parse_phi(*o.phi));

  // seed precedence: flag, then RMT_SEED, then the config file
  if (o.seed) {
    doc["seed"] = *o.seed;
  } else if (const char* env = std::getenv("RMT_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      doc["seed"] = v;
    } catch (const std::exception&) {
      usage_error(std::string("RMT_SEED=\"") + env + "\" is not an unsigned integer");
    }
  }

  if (o.x || !o.y.empty()) {
    json& scan = doc["scan"];
    if (o.x) scan["x"] = *o.x;
    if (!o.y.empty()) scan["y_grid"] = o.y;
  }
  if (o.s) doc["pj"]["s"] = *o.s;
  if (o.nodes && o.command == "pjcheck") doc["pj"]["laguerre_nodes"] = *o.nodes;
  if (!o.tau.empty()) doc["truncation"]["tau"] = o.tau;
  return doc;
}

/// Command-specific block of the config with defaults filled in; unknown
/// keys are rejected.
json block(const json& doc, const char* key, const json& defaults) {
  json out = defaults;
  if (!doc.contains(key)) return out;
  const json& b = doc[key];
  if (!b.is_object()) usage_error(std::string("config.") + key + ": expected an object");
  for (auto it = b.begin(); it != b.end(); ++it) {
    if (!defaults.contains(it.key())) {
      std::string allowed;
      for (auto d = defaults.begin(); d != defaults.end(); ++d) allowed += (allowed.empty() ? "" : ", ") + d.key();
      usage_error(std::string("config.") + key + ": unknown field \"" + it.key() + "\" (allowed: " + allowed + ")");
    }
    if (it.value().type_name() != defaults[it.key()].type_name() &&
        !(it.value().is_number() && defaults[it.key()].is_number()))
      usage_error(std::string("config.") + key + "." + it.key() + ": expected " + defaults[it.key()].type_name());
    out[it.key()] = it.value();
  }
  return out;
}

std::vector<double> number_list(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) usage_error(where + ": expected a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) usage_error(where + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string fmt(double v, const char* spec = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

/// Writes the report under <out>/<kind>_<hash>.json, the hash taken over the
/// effective config.
std::filesystem::path store(const CliOptions& o, const std::string& kind, const json& config, json report,
                            double runtime_seconds) {
  rmtclt::ResultStore st(o.out_dir);
  report["command"] = kind;
  report["config"] = config;
  report["config_hash"] = rmtclt::config_hash(config);
  report["timestamp"] = rmtclt::timestamp_block(runtime_seconds);
  const auto path = st.write(kind, config, report);
  std::printf("wrote %s\n", path.string().c_str());
  return path;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Canonical config: the parsed experiment plus any command blocks.
json canonical(const rmtclt::ExperimentConfig& cfg, std::initializer_list<std::pair<const char*, json>> blocks) {
  json c = rmtclt::to_json(cfg);
  for (const auto& [k, v] : blocks) c[k] = v;
  return c;
}

int cmd_theory(const CliOptions& o, const json& doc) {
  const auto t0 = std::chrono::steady_clock::now();
  const rmtclt::ExperimentConfig cfg = rmtclt::config_from_json(doc);
  const rmtclt::EnsembleSpec& ens = cfg.ensemble;
  const rmtclt::MomentParams params = rmtclt::MomentParams::from(ens);
  rmtclt::QuadratureSpec quad;
  if (o.nodes) quad = {*o.nodes, quad.tol, std::max(quad.max_nodes, *o.nodes)};
  const bool wigner = ens.kind == rmtclt::EnsembleKind::Wigner;
  const double c = ens.requested_aspect();

  const rmtclt::VarianceReport r = wigner ? rmtclt::variance_wigner(cfg.phi, params, quad)
                                          : rmtclt::variance_sample_cov(cfg.phi, c, params.kappa4, quad);
  json report;
  report["ensemble"] = rmtclt::to_string(ens.kind);
  report["phi"] = cfg.phi.describe();
  report["params"] = {{"w2", params.w2}, {"kappa4", params.kappa4}};
  if (!wigner) report["params"]["c"] = c;
  report["variance"] = rmtclt::to_json(r);

  std::printf("ensemble     %s\n", rmtclt::to_string(ens.kind));
  std::printf("phi          %s\n", cfg.phi.describe().c_str());
  if (wigner)
    std::printf("w2           %s\n", fmt(params.w2).c_str());
  else
    std::printf("c            %s\n", fmt(c).c_str());
  std::printf("kappa4       %s\n", fmt(params.kappa4).c_str());
  std::printf("variance     %s\n", fmt(r.total, "%.12g").c_str());
  std::printf("  main       %s\n", fmt(r.term_main, "%.12g").c_str());
  std::printf("  kappa4     %s\n", fmt(r.term_kappa4, "%.12g").c_str());
  if (wigner) std::printf("  w2         %s\n", fmt(r.term_w2, "%.12g").c_str());
  std::printf("nodes        %zu (est. error %s)\n", r.nodes_used, fmt(r.est_error, "%.3g").c_str());

  json extra = json::object();
  if (o.eta) {
    if (!wigner) usage_error("--eta (kernel form) applies to Wigner ensembles only");
    const rmtclt::VarianceReport k = rmtclt::variance_kernel_form(cfg.phi, *o.eta, params);
    const rmtclt::VarianceReport sm = rmtclt::variance_wigner(rmtclt::smooth(cfg.phi, *o.eta), params, quad);
    report["kernel_form"] = {{"eta", *o.eta}, {"kernel", rmtclt::to_json(k)}, {"smoothed", rmtclt::to_json(sm)}};
    extra["eta"] = *o.eta;
    std::printf("kernel form  %s (eta %s)\n", fmt(k.total, "%.12g").c_str(), fmt(*o.eta).c_str());
    std::printf("smoothed     %s\n", fmt(sm.total, "%.12g").c_str());
  }
  json config = canonical(cfg, {{"theory", {{"nodes", quad.nodes}, {"kernel", extra}}}});
  store(o, "theory", config, report, seconds_since(t0));
  return 0;
}

int cmd_simulate(const CliOptions& o, const json& doc) {
  const rmtclt::ExperimentConfig cfg = rmtclt::config_from_json(doc);
  const rmtclt::ExperimentResult res = rmtclt::run_clt_experiment(cfg);
  json config = canonical(cfg, {});
  json report = rmtclt::to_json(res);
  report.erase("config");
  report.erase("timestamp");

  std::printf("%-40s %14s %14s %14s %14s %10s %8s\n", "statistic", "variance", "ci_lo", "ci_hi", "theory", "ratio", "ks");
  for (const auto& s : res.statistics) {
    const std::string th = s.theory ? fmt(*s.theory, "%.6g") : "-";
    const std::string ratio = s.theory && *s.theory != 0.0 ? fmt(s.variance / *s.theory, "%.4f") : "-";
    const std::string ks = s.normality ? fmt(s.normality->ks_distance, "%.4f") : "-";
    std::printf("%-40s %14.6g %14.6g %14.6g %14s %10s %8s\n", s.label.c_str(), s.variance, s.ci.lo, s.ci.hi,
                th.c_str(), ratio.c_str(), ks.c_str());
  }
  for (const auto& note : res.notes) std::printf("note: %s\n", note.c_str());
  store(o, "simulate", config, report, res.runtime_seconds);
  if (cfg.retain_values) {
    rmtclt::ResultStore st(o.out_dir);
    const auto csv = st.path_for("simulate", config, "_values.csv");
    std::ostringstream os;
    rmtclt::write_values_csv(os, res);
    rmtclt::write_text_file(csv, os.str());
    std::printf("wrote %s\n", csv.string().c_str());
  }
  return 0;
}

int cmd_boundscan(const CliOptions& o, const json& doc) {
  const auto t0 = std::chrono::steady_clock::now();
  const rmtclt::ExperimentConfig cfg = rmtclt::config_from_json(doc);
  const json scan = block(doc, "scan", {{"x", 0.0}, {"y_grid", {0.25, 0.5, 1.0, 2.0}}});
  const std::vector<double> ys = number_list(scan["y_grid"], "scan.y_grid");
  for (double y : ys)
    if (!(y > 0.0)) usage_error("scan.y_grid: values must be > 0");
  const double x = scan["x"].get<double>();
  const auto spectra = rmtclt::simulate_spectra(cfg.effective_ensemble(), cfg.replicates, cfg.workers);
  const rmtclt::BoundScanReport rep = rmtclt::bound_scan_from_spectra(spectra, ys, x);
  json report = rmtclt::to_json(rep);
  if (cfg.replicates < 100) {
    const std::string note = "R < 100: variance estimates are too noisy for the shape verdict";
    report["notes"] = {note};
    std::printf("note: %s\n", note.c_str());
  }
  std::printf("%10s %14s %14s %14s %14s %14s\n", "y", "var_re", "var_im", "variance", "y4_variance", "se");
  for (const auto& r : rep.rows)
    std::printf("%10.4g %14.6g %14.6g %14.6g %14.6g %14.6g\n", r.y, r.var_re, r.var_im, r.variance, r.scaled,
                r.scaled_se);
  std::printf("spread %s  shape_violation %s\n", fmt(rep.spread, "%.4g").c_str(), rep.shape_violation ? "yes" : "no");
  store(o, "boundscan", canonical(cfg, {{"scan", scan}}), report, seconds_since(t0));
  return 0;
}

int cmd_pjcheck(const CliOptions& o, const json& doc) {
  const auto t0 = std::chrono::steady_clock::now();
  const rmtclt::ExperimentConfig cfg = rmtclt::config_from_json(doc);
  const json pj = block(doc, "pj", {{"s", 2.0}, {"laguerre_nodes", 20}});
  rmtclt::PjOptions opt;
  const json& ln = pj["laguerre_nodes"];
  if (!ln.is_number_integer() || ln.get<std::int64_t>() < 1) usage_error("pj.laguerre_nodes: expected a positive integer");
  opt.laguerre_nodes = ln.get<std::size_t>();
  opt.workers = cfg.workers;
  const rmtclt::PjReport rep =
      rmtclt::check_pj_inequality(cfg.effective_ensemble(), cfg.phi, pj["s"].get<double>(), cfg.replicates, opt);
  std::printf("lhs    %s (se %s)\n", fmt(rep.lhs, "%.8g").c_str(), fmt(rep.lhs_se, "%.3g").c_str());
  std::printf("rhs    %s (tail slack %s)\n", fmt(rep.rhs, "%.8g").c_str(), fmt(rep.slack, "%.3g").c_str());
  std::printf("norm^2 %s\n", fmt(rep.norm_sq, "%.8g").c_str());
  std::printf("ratio  %s  flag %s\n", rep.rhs > 0.0 ? fmt(rep.ratio, "%.4f").c_str() : "-", rep.flag ? "yes" : "no");
  store(o, "pjcheck", canonical(cfg, {{"pj", pj}}), rmtclt::to_json(rep), seconds_since(t0));
  return 0;
}

int cmd_truncheck(const CliOptions& o, const json& doc) {
  const auto t0 = std::chrono::steady_clock::now();
  const rmtclt::ExperimentConfig cfg = rmtclt::config_from_json(doc);
  const json tr = block(doc, "truncation", {{"tau", {1.0, 2.0}}});
  const std::vector<double> taus = number_list(tr["tau"], "truncation.tau");
  json rows = json::array();
  std::printf("%8s %14s %12s %14s %14s %10s %8s\n", "tau", "mean_abs_diff", "se", "bound", "lindeberg", "truncated",
              "within");
  for (double tau : taus) {
    const rmtclt::TruncationReport r =
        rmtclt::check_truncation_bound(cfg.effective_ensemble(), cfg.phi, tau, cfg.replicates, cfg.workers);
    rows.push_back(rmtclt::to_json(r));
    std::printf("%8.4g %14.6g %12.4g %14.6g %14.6g %10.4g %8s\n", r.tau, r.mean_abs_diff, r.se, r.bound, r.lindeberg,
                r.mean_truncated_entries, r.within ? "yes" : "no");
  }
  store(o, "truncheck", canonical(cfg, {{"truncation", tr}}), {{"rows", rows}}, seconds_since(t0));
  return 0;
}

int cmd_norm(const CliOptions& o, const json& doc) {
  const auto t0 = std::chrono::steady_clock::now();
  const rmtclt::ExperimentConfig cfg = rmtclt::config_from_json(doc);
  const json pj = block(doc, "pj", {{"s", 2.0}, {"laguerre_nodes", 20}});
  const double s = pj["s"].get<double>();
  const double norm = rmtclt::sobolev_norm(cfg.phi, s);
  const rmtclt::SobolevGridReport grid = rmtclt::sobolev_norm_grid(cfg.phi, s);
  std::printf("phi   %s\n", cfg.phi.describe().c_str());
  std::printf("s     %s\n", fmt(s).c_str());
  std::printf("norm  %s\n", fmt(norm, "%.12g").c_str());
  std::printf("grid  %s (N %zu, discretization error of norm^2 %s)\n", fmt(grid.norm, "%.12g").c_str(), grid.samples,
              fmt(grid.discretization_error, "%.3g").c_str());
  json report = {{"phi", cfg.phi.describe()},
                 {"s", s},
                 {"norm", norm},
                 {"grid", {{"norm", grid.norm},
                           {"samples", grid.samples},
                           {"half_width", grid.half_width},
                           {"dk", grid.dk},
                           {"discretization_error", grid.discretization_error}}}};
  store(o, "norm", canonical(cfg, {{"norm", {{"s", s}}}}), report, seconds_since(t0));
  return 0;
}

int cmd_spectrum(const CliOptions& o, const json& doc) {
  const auto t0 = std::chrono::steady_clock::now();
  const rmtclt::ExperimentConfig cfg = rmtclt::config_from_json(doc);
  const std::uint32_t replicate = o.replicate.value_or(0);
  auto spec = std::make_shared<const rmtclt::EnsembleSpec>(cfg.effective_ensemble());
  const rmtclt::Spectrum sp = rmtclt::eigenvalues(rmtclt::sample_matrix(spec, replicate));
  const json config = canonical(cfg, {{"spectrum", {{"replicate", replicate}}}});
  rmtclt::ResultStore st(o.out_dir);
  const auto csv = st.path_for("spectrum", config, ".csv");
  std::ostringstream os;
  rmtclt::write_spectrum_csv(os, sp, rmtclt::config_hash(config));
  rmtclt::write_text_file(csv, os.str());
  std::printf("n %zu  min %s  max %s\n", sp.size(), fmt(sp.eigenvalues.front(), "%.10g").c_str(),
              fmt(sp.eigenvalues.back(), "%.10g").c_str());
  std::printf("wrote %s\n", csv.string().c_str());
  json report = {{"replicate", replicate},
                 {"n", sp.size()},
                 {"min", sp.eigenvalues.front()},
                 {"max", sp.eigenvalues.back()},
                 {"eigenvalues_csv", csv.filename().string()}};
  store(o, "spectrum", config, report, seconds_since(t0));
  return 0;
}

int dispatch(const CliOptions& o) {
  const json doc = effective_document(o);
  if (o.verbosity > 0) std::fprintf(stderr, "effective config:\n%s\n", doc.dump(2).c_str());
  if (o.command == "theory") return cmd_theory(o, doc);
  if (o.command == "simulate") return cmd_simulate(o, doc);
  if (o.command == "boundscan") return cmd_boundscan(o, doc);
  if (o.command == "pjcheck") return cmd_pjcheck(o, doc);
  if (o.command == "truncheck") return cmd_truncheck(o, doc);
  if (o.command == "norm") return cmd_norm(o, doc);
  if (o.command == "spectrum") return cmd_spectrum(o, doc);
  usage_error("unknown subcommand " + o.command);
}

template <class T>
void optional_option(CLI::App& app, const std::string& name, std::optional<T>& target, const std::string& help) {
  app.add_option_function<T>(name, [&target](const T& v) { target = v; }, help)->type_name(
      std::is_integral_v<T> ? "UINT" : "FLOAT");
}

}  // namespace

int main(int argc, char** argv) {
  CliOptions o;
  CLI::App app{"Central limit theorem checks for linear eigenvalue statistics of random matrices", "rmtclt"};
  app.fallthrough();
  app.require_subcommand(1);

  app.add_option("--config", o.config_path, "JSON experiment config")->type_name("PATH");
  app.add_option("--out", o.out_dir, "output directory for reports")->type_name("DIR")->capture_default_str();
  app.add_option_function<std::string>("--ensemble", [&](const std::string& v) { o.ensemble = v; },
                                       "ensemble kind: wigner or samplecov")
      ->check(CLI::IsMember({"wigner", "samplecov", "sample_covariance"}))
      ->type_name("KIND");
  optional_option(app, "--n", o.n, "matrix size");
  optional_option(app, "--R", o.replicates, "number of replicates");
  optional_option(app, "--seed", o.seed, "master seed (over RMT_SEED and the config)");
  optional_option(app, "--c", o.c, "sample covariance aspect ratio m/n");
  optional_option(app, "--kappa4", o.kappa4, "fourth cumulant of the off-diagonal law");
  optional_option(app, "--w2", o.w2, "variance of the Wigner diagonal");
  optional_option(app, "--workers", o.workers, "worker threads (0 = all cores)");
  app.add_option_function<std::string>("--phi", [&](const std::string& v) { o.phi = v; },
                                       "test function: monomial:K, poly:A0,A1,..., gauss:C,W[,A], imres:X,Y, "
                                       "smooth:ETA:PHI")
      ->type_name("SPEC");
  optional_option(app, "--nodes", o.nodes, "quadrature nodes (theory) or Laguerre nodes (pjcheck)");
  optional_option(app, "--s", o.s, "Sobolev index (norm, pjcheck)");
  app.add_option("--tau", o.tau, "truncation levels (truncheck)")->type_name("FLOAT");
  optional_option(app, "--x", o.x, "real part of the scan point (boundscan)");
  app.add_option("--y", o.y, "imaginary parts to scan (boundscan)")->type_name("FLOAT");
  optional_option(app, "--replicate", o.replicate, "replicate index (spectrum)");
  optional_option(app, "--eta", o.eta, "also evaluate the kernel form at this smoothing width (theory)");
  app.add_flag("-v,--verbose", o.verbosity, "print the effective config to stderr");

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"theory", "limiting variance of a linear statistic"},
      {"simulate", "Monte Carlo CLT experiment"},
      {"boundscan", "scan y^4 Var of the resolvent trace over y"},
      {"pjcheck", "both sides of the Sobolev-norm variance inequality"},
      {"truncheck", "effect of entry truncation against its bound"},
      {"norm", "Sobolev norm of phi"},
      {"spectrum", "dump the eigenvalues of one replicate"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->callback([&o, name = std::string(name)] { o.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return dispatch(o);
  } catch (const rmtclt::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.is_numeric() ? 3 : 2;
  } catch (const rmtclt::json::exception& e) {
    std::fprintf(stderr, "error: config: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
