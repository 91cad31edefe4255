// qrem: command-line driver for the model, solvers and pipelines.
//
// Subcommands: sample, spectrum, sweep, min-gap, ensemble, anneal, theory,
// phase-diagram. Every artifact embeds a header with the schema version and
// the effective configuration; outputs are written atomically and are
// byte-identical for any --threads value.
//
// Exit codes: 0 ok, 2 invalid configuration, 3 capacity limit, 4 numerical
// failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qrem/dense.hpp"
#include "qrem/dynamics.hpp"
#include "qrem/model.hpp"
#include "qrem/parallel.hpp"
#include "qrem/serialize.hpp"
#include "qrem/spectral.hpp"
#include "qrem/sweep.hpp"
#include "qrem/theory.hpp"
#include "qrem/version.hpp"

namespace fs = std::filesystem;
using qrem::Json;

namespace {

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;

  std::vector<double> points() const {
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) {
      out[i] = i == count - 1 ? hi : lo + (hi - lo) * i / (count - 1);
    }
    if (count == 1) out[0] = lo;
    return out;
  }
};

Grid parse_grid(const std::string& text) {
  Grid g;
  const auto a = text.find(':');
  const auto b = text.find(':', a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw qrem::ValidationError("cli: grid must be lo:hi:count, got '" +
                                text + "'");
  }
  try {
    g.lo = std::stod(text.substr(0, a));
    g.hi = std::stod(text.substr(a + 1, b - a - 1));
    g.count = std::stoi(text.substr(b + 1));
  } catch (const std::exception&) {
    throw qrem::ValidationError("cli: cannot parse grid '" + text + "'");
  }
  if (g.count < 1) {
    throw qrem::ValidationError("cli: grid count must be >= 1");
  }
  return g;
}

// "0..9" (inclusive), "3", or "1,4,7".
std::vector<uint64_t> parse_seeds(const std::string& text) {
  std::vector<uint64_t> seeds;
  const auto range = text.find("..");
  try {
    if (range != std::string::npos) {
      const uint64_t lo = std::stoull(text.substr(0, range));
      const uint64_t hi = std::stoull(text.substr(range + 2));
      if (hi < lo) throw std::runtime_error("range");
      for (uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      std::size_t pos = 0;
      while (pos < text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        seeds.push_back(std::stoull(text.substr(pos, comma - pos)));
        pos = comma + 1;
      }
    }
  } catch (const std::exception&) {
    throw qrem::ValidationError("cli: cannot parse seed list '" + text + "'");
  }
  if (seeds.empty()) {
    throw qrem::ValidationError("cli: empty seed list");
  }
  return seeds;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  try {
    while (pos < text.size()) {
      auto comma = text.find(',', pos);
      if (comma == std::string::npos) comma = text.size();
      out.push_back(std::stod(text.substr(pos, comma - pos)));
      pos = comma + 1;
    }
  } catch (const std::exception&) {
    throw qrem::ValidationError("cli: cannot parse list '" + text + "'");
  }
  return out;
}

void atomic_write(const fs::path& path, const std::string& payload) {
  if (path.empty()) {
    std::fwrite(payload.data(), 1, payload.size(), stdout);
    return;
  }
  const fs::path tmp =
      path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw qrem::Error("cli: cannot open " + tmp.string());
    }
    out.write(payload.data(),
              static_cast<std::streamsize>(payload.size()));
    if (!out) throw qrem::Error("cli: short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

// Flags first, then the config file on top: file wins conflicts, and the
// merged object is what every artifact records.
Json merge_config(Json flags, const std::string& config_path) {
  if (config_path.empty()) return flags;
  std::ifstream in(config_path);
  if (!in) {
    throw qrem::ValidationError("cli: cannot open config file " + config_path);
  }
  Json file;
  try {
    in >> file;
  } catch (const std::exception& e) {
    throw qrem::ValidationError("cli: bad config JSON: " +
                                std::string(e.what()));
  }
  for (auto it = file.begin(); it != file.end(); ++it) {
    flags[it.key()] = it.value();
  }
  return flags;
}

std::string render_json_artifact(const Json& config, const Json& data) {
  Json artifact{{"header", qrem::artifact_header(config)}, {"data", data}};
  return artifact.dump(2) + "\n";
}

std::string render_jsonl(const Json& config, const std::vector<Json>& rows) {
  std::string out = qrem::artifact_header(config).dump() + "\n";
  for (const Json& row : rows) out += row.dump() + "\n";
  return out;
}

std::string render_csv(const Json& config, const std::string& body) {
  return "# " + qrem::artifact_header(config).dump() + "\n" + body;
}

struct CommonOpts {
  std::string out;
  std::string format;
  std::string config_path;
  int threads = 0;
  bool keep_going = false;
  uint64_t budget_mb = ModelParamsBudgetMb();

  static uint64_t ModelParamsBudgetMb() {
    return qrem::ModelParams::kDefaultBudgetBytes >> 20;
  }

  uint64_t budget_bytes() const { return budget_mb << 20; }

  void attach(CLI::App* cmd, const std::string& default_format) {
    format = default_format;
    cmd->add_option("-o,--out", out, "Output path (default: stdout)");
    cmd->add_option("--format", format, "Output format");
    cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
    cmd->add_option("--config", config_path,
                    "JSON config file; overrides flags");
    cmd->add_flag("--keep-going", keep_going,
                  "Record per-item failures instead of aborting");
    cmd->add_option("--budget-mb", budget_mb, "Energy-table memory budget");
  }

  void apply_threads() const { qrem::par::set_max_threads(threads); }
};

int run_sample(const CommonOpts& common, const Json& cfg) {
  qrem::ModelParams params{cfg.at("n").get<int>(),
                           cfg.at("seed").get<uint64_t>(), 0.0};
  const auto table =
      qrem::EnergyTable::sample(params, cfg.at("budget_mb").get<uint64_t>()
                                            << 20);
  const std::string format = cfg.at("format").get<std::string>();
  const std::string out = cfg.at("out").get<std::string>();
  if (format == "binary") {
    if (out.empty()) {
      throw qrem::ValidationError("cli: binary table needs --out");
    }
    const fs::path tmp = out + ".tmp." + std::to_string(::getpid());
    qrem::write_energy_table(tmp, table);
    fs::rename(tmp, out);
  } else if (format == "json") {
    Json data{{"n", table.n()},
              {"seed", table.seed()},
              {"energies", std::vector<double>(table.energies().begin(),
                                               table.energies().end())}};
    atomic_write(out, render_json_artifact(cfg, data));
  } else {
    throw qrem::ValidationError("cli: sample format must be binary or json");
  }
  return 0;
}

qrem::EnergyTable load_or_sample(const Json& cfg) {
  if (cfg.contains("table") && !cfg.at("table").get<std::string>().empty()) {
    return qrem::read_energy_table(cfg.at("table").get<std::string>());
  }
  qrem::ModelParams params{cfg.at("n").get<int>(),
                           cfg.at("seed").get<uint64_t>(), 0.0};
  return qrem::EnergyTable::sample(params,
                                   cfg.at("budget_mb").get<uint64_t>() << 20);
}

int run_spectrum(const CommonOpts&, const Json& cfg) {
  const auto table = load_or_sample(cfg);
  qrem::HamiltonianView h(table, cfg.at("gamma").get<double>());
  qrem::LanczosOptions opts;
  opts.k = cfg.at("k").get<int>();
  opts.tol = cfg.at("tol").get<double>();
  opts.max_basis = cfg.at("max_basis").get<int>();
  opts.start_seed = table.seed();
  const std::string vectors_out = cfg.at("vectors_out").get<std::string>();
  opts.want_vectors = !vectors_out.empty();

  const qrem::SpectrumResult result = qrem::lowest_eigenpairs(h, opts);
  if (!result.converged) {
    throw qrem::NumericalError(
        "spectral: no convergence at gamma=" +
        std::to_string(h.gamma) + " after " +
        std::to_string(result.iterations) + " iterations (best residual " +
        std::to_string(result.residual_norms.empty()
                           ? -1.0
                           : result.residual_norms[0]) + ")");
  }

  if (opts.want_vectors) {
    // Binary sidecar: magic, version, n, k, then k state vectors.
    std::string blob;
    blob.append("QREMVEC\0", 8);
    const uint32_t version = 1;
    const uint32_t n32 = static_cast<uint32_t>(table.n());
    const uint32_t k32 = static_cast<uint32_t>(result.eigenvectors.size());
    blob.append(reinterpret_cast<const char*>(&version), 4);
    blob.append(reinterpret_cast<const char*>(&n32), 4);
    blob.append(reinterpret_cast<const char*>(&k32), 4);
    for (const auto& v : result.eigenvectors) {
      blob.append(reinterpret_cast<const char*>(v.data()),
                  v.size() * sizeof(double));
    }
    atomic_write(vectors_out, blob);
  }
  atomic_write(cfg.at("out").get<std::string>(),
               render_json_artifact(cfg, qrem::to_json(result)));
  return 0;
}

int run_sweep_cmd(const CommonOpts&, const Json& cfg) {
  const auto table = load_or_sample(cfg);
  const Grid grid = parse_grid(cfg.at("gamma_grid").get<std::string>());
  qrem::SweepOptions opts;
  opts.k = cfg.at("k").get<int>();
  opts.solver.tol = cfg.at("tol").get<double>();
  opts.warm_start = !cfg.at("no_warm_start").get<bool>();
  const qrem::GapCurve curve =
      qrem::gap_sweep(table, grid.lo, grid.hi, grid.count, opts);

  const std::string format = cfg.at("format").get<std::string>();
  const std::string out = cfg.at("out").get<std::string>();
  if (format == "csv") {
    atomic_write(out, render_csv(cfg, qrem::gap_curve_csv(curve)));
  } else if (format == "json") {
    Json points = Json::array();
    for (const auto& p : curve.points) points.push_back(qrem::to_json(p));
    Json data{{"n", curve.n}, {"seed", curve.seed}, {"points", points}};
    atomic_write(out, render_json_artifact(cfg, data));
  } else {
    throw qrem::ValidationError("cli: sweep format must be csv or json");
  }
  return 0;
}

int run_min_gap(const CommonOpts&, const Json& cfg) {
  const int n = cfg.at("n").get<int>();
  const auto seeds = parse_seeds(cfg.at("seeds").get<std::string>());
  qrem::EnsembleConfig config;
  config.threads = cfg.at("threads").get<int>();
  config.keep_going = cfg.at("keep_going").get<bool>();
  config.min_gap.gamma_tol = cfg.at("gamma_tol").get<double>();
  config.min_gap.solver.tol = cfg.at("tol").get<double>();
  if (!cfg.at("bracket").get<std::string>().empty()) {
    const Grid b = parse_grid(cfg.at("bracket").get<std::string>() + ":2");
    config.min_gap.bracket = std::make_pair(b.lo, b.hi);
  }

  const qrem::EnsembleSummary summary = qrem::ensemble_run(n, seeds, config);
  std::vector<Json> rows;
  for (const auto& r : summary.records) rows.push_back(qrem::to_json(r));
  for (const auto& f : summary.failures) {
    rows.push_back(Json{{"seed", f.seed}, {"error", f.message}});
  }
  atomic_write(cfg.at("out").get<std::string>(), render_jsonl(cfg, rows));
  if (!summary.failures.empty() && !config.keep_going) {
    throw qrem::NumericalError("sweep: " +
                               std::to_string(summary.failures.size()) +
                               " seed(s) failed");
  }
  return 0;
}

int run_ensemble(const CommonOpts&, const Json& cfg) {
  const auto seeds = parse_seeds(cfg.at("seeds").get<std::string>());
  qrem::EnsembleConfig config;
  config.threads = cfg.at("threads").get<int>();
  config.keep_going = cfg.at("keep_going").get<bool>();
  config.min_gap.gamma_tol = cfg.at("gamma_tol").get<double>();
  config.min_gap.solver.tol = cfg.at("tol").get<double>();

  std::vector<qrem::EnsembleSummary> summaries;
  std::vector<Json> rows;
  for (const auto& n_json : cfg.at("n")) {
    const int n = n_json.get<int>();
    summaries.push_back(qrem::ensemble_run(n, seeds, config));
    rows.push_back(qrem::to_json(summaries.back()));
  }
  if (summaries.size() > 1) {
    bool fit_ok = true;
    for (const auto& s : summaries) fit_ok &= !s.records.empty();
    if (fit_ok) {
      const qrem::ScalingFit fit = qrem::fit_min_gap_scaling(summaries);
      rows.push_back(Json{{"scaling_fit",
                           {{"slope", fit.slope},
                            {"intercept", fit.intercept}}}});
    }
  }
  atomic_write(cfg.at("out").get<std::string>(), render_jsonl(cfg, rows));
  std::size_t failed = 0;
  for (const auto& s : summaries) failed += s.failures.size();
  if (failed > 0 && !config.keep_going) {
    throw qrem::NumericalError("sweep: " + std::to_string(failed) +
                               " seed(s) failed");
  }
  return 0;
}

int run_anneal(const CommonOpts&, const Json& cfg) {
  const auto table = load_or_sample(cfg);
  auto taus = parse_doubles(cfg.at("tau").get<std::string>());
  std::sort(taus.begin(), taus.end());
  const double gamma_max = cfg.at("gamma_max").get<double>();
  const std::string profile = cfg.at("profile").get<std::string>();
  if (profile != "linear") {
    throw qrem::ValidationError("cli: unknown schedule profile '" + profile +
                                "'");
  }
  qrem::EvolveOptions opts;
  opts.dt_control = cfg.at("dt_control").get<double>();
  opts.krylov_dim = cfg.at("krylov_dim").get<int>();

  const qrem::SuccessCurve curve = qrem::success_curve(
      table, taus,
      [&](double tau) { return qrem::Schedule::linear(tau, gamma_max); },
      opts);
  Json outcomes = Json::array();
  for (const auto& o : curve.outcomes) outcomes.push_back(qrem::to_json(o));
  Json data{{"outcomes", outcomes}};
  if (curve.tau_half.has_value()) data["tau_half"] = *curve.tau_half;
  atomic_write(cfg.at("out").get<std::string>(),
               render_json_artifact(cfg, data));
  return 0;
}

std::vector<qrem::theory::PhasePoint> phase_grid(const Grid& ts,
                                                 const Grid& gs) {
  std::vector<qrem::theory::PhasePoint> grid;
  grid.reserve(static_cast<std::size_t>(ts.count) * gs.count);
  for (double T : ts.points()) {
    for (double g : gs.points()) {
      grid.push_back(qrem::theory::classify(T, g));
    }
  }
  return grid;
}

int emit_phase_diagram(const Json& cfg) {
  const Grid ts = parse_grid(cfg.at("t_grid").get<std::string>());
  const Grid gs = parse_grid(cfg.at("gamma_grid").get<std::string>());
  const auto grid = phase_grid(ts, gs);
  const std::string format = cfg.at("format").get<std::string>();
  const std::string out = cfg.at("out").get<std::string>();
  if (format == "csv") {
    atomic_write(out, render_csv(cfg, qrem::phase_grid_csv(grid)));
  } else if (format == "json") {
    Json rows = Json::array();
    for (const auto& p : grid) rows.push_back(qrem::to_json(p));
    atomic_write(out, render_json_artifact(cfg, rows));
  } else {
    throw qrem::ValidationError("cli: format must be csv or json");
  }
  return 0;
}

int run_theory(const CommonOpts&, const Json& cfg) {
  if (cfg.at("phase_diagram").get<bool>()) {
    return emit_phase_diagram(cfg);
  }
  const std::string mode = cfg.at("mode").get<std::string>();
  if (mode == "transition") {
    const Grid ts = parse_grid(cfg.at("t_grid").get<std::string>());
    std::string body = "T,gamma_star\n";
    for (double T : ts.points()) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", T,
                    qrem::theory::transition_gamma(T));
      body += buf;
    }
    atomic_write(cfg.at("out").get<std::string>(), render_csv(cfg, body));
    return 0;
  }
  if (mode == "predictions") {
    // Per-size table: asymptotic E0, predicted crossing, minimal gap and
    // annealing-time estimate.
    std::vector<Json> rows;
    for (const auto& n_json : cfg.at("n")) {
      const int n = n_json.get<int>();
      const double e0 = -n * qrem::theory::kSqrtLn2;
      const auto pred = qrem::theory::min_gap_prediction(e0, n);
      rows.push_back(
          Json{{"n", n},
               {"e0_asymptotic", e0},
               {"gamma_star", pred.gamma_star},
               {"min_gap", pred.gap},
               {"tau_estimate",
                qrem::theory::annealing_time_estimate(pred.gap)}});
    }
    atomic_write(cfg.at("out").get<std::string>(), render_jsonl(cfg, rows));
    return 0;
  }
  if (mode == "branches") {
    const int n = cfg.at("n").begin()->get<int>();
    const Grid gs = parse_grid(cfg.at("gamma_grid").get<std::string>());
    const double eps0 = cfg.at("eps0").get<double>();
    std::string body = "gamma,classical,quantum,two_level_gap\n";
    const qrem::theory::CrossingModel model(eps0 * n, n);
    for (double g : gs.points()) {
      char buf[160];
      const double classical =
          qrem::theory::perturbed_energy_classical(eps0, g, n);
      const double quantum =
          g > 0 ? qrem::theory::perturbed_energy_quantum(g, n)
                : std::numeric_limits<double>::quiet_NaN();
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", g,
                    classical, quantum,
                    qrem::theory::two_level_gap(model, g));
      body += buf;
    }
    atomic_write(cfg.at("out").get<std::string>(), render_csv(cfg, body));
    return 0;
  }
  throw qrem::ValidationError("cli: theory mode must be one of "
                              "phase-diagram/transition/predictions/branches");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-free spectral and annealing toolkit for the quantum "
               "random energy model"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qrem::kVersion);

  // sample
  auto* sample = app.add_subcommand("sample", "Generate one energy table");
  CommonOpts sample_common;
  int sample_n = 0;
  uint64_t sample_seed = 0;
  sample->add_option("--n", sample_n, "Spin count")->required();
  sample->add_option("--seed", sample_seed, "Sample seed")->required();
  sample_common.attach(sample, "binary");

  // spectrum
  auto* spectrum =
      app.add_subcommand("spectrum", "Lowest eigenpairs at one gamma");
  CommonOpts spectrum_common;
  int spec_n = 0;
  uint64_t spec_seed = 0;
  double spec_gamma = 0.0, spec_tol = 1e-10;
  int spec_k = 2, spec_max_basis = 400;
  std::string spec_table, spec_vectors_out;
  spectrum->add_option("--n", spec_n, "Spin count");
  spectrum->add_option("--seed", spec_seed, "Sample seed");
  spectrum->add_option("--table", spec_table, "Load a binary energy table");
  spectrum->add_option("--gamma", spec_gamma, "Transverse field")->required();
  spectrum->add_option("--k", spec_k, "Number of eigenpairs");
  spectrum->add_option("--tol", spec_tol, "Relative residual tolerance");
  spectrum->add_option("--max-basis", spec_max_basis, "Restart cap");
  spectrum->add_option("--vectors-out", spec_vectors_out,
                       "Binary sidecar for eigenvectors");
  spectrum_common.attach(spectrum, "json");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Gap curve over a gamma grid");
  CommonOpts sweep_common;
  int sweep_n = 0, sweep_k = 2;
  uint64_t sweep_seed = 0;
  double sweep_tol = 1e-10;
  std::string sweep_grid, sweep_table;
  bool sweep_no_warm = false;
  sweep->add_option("--n", sweep_n, "Spin count");
  sweep->add_option("--seed", sweep_seed, "Sample seed");
  sweep->add_option("--table", sweep_table, "Load a binary energy table");
  sweep->add_option("--gamma-grid", sweep_grid, "lo:hi:count")->required();
  sweep->add_option("--k", sweep_k, "Levels per grid point");
  sweep->add_option("--tol", sweep_tol, "Relative residual tolerance");
  sweep->add_flag("--no-warm-start", sweep_no_warm,
                  "Cold start at every grid point");
  sweep_common.attach(sweep, "csv");

  // min-gap
  auto* min_gap =
      app.add_subcommand("min-gap", "Locate the avoided-crossing minimum");
  CommonOpts min_gap_common;
  int mg_n = 0;
  std::string mg_seeds, mg_bracket;
  double mg_gamma_tol = 1e-4, mg_tol = 1e-10;
  min_gap->add_option("--n", mg_n, "Spin count")->required();
  min_gap->add_option("--seeds", mg_seeds, "e.g. 0..9 or 1,4,7")->required();
  min_gap->add_option("--bracket", mg_bracket, "lo:hi (default from theory)");
  min_gap->add_option("--gamma-tol", mg_gamma_tol, "Golden-section width");
  min_gap->add_option("--tol", mg_tol, "Eigensolver tolerance");
  min_gap_common.attach(min_gap, "jsonl");

  // ensemble
  auto* ensemble =
      app.add_subcommand("ensemble", "Min-gap statistics across seeds/sizes");
  CommonOpts ensemble_common;
  std::vector<int> ens_n;
  std::string ens_seeds;
  double ens_gamma_tol = 1e-4, ens_tol = 1e-10;
  ensemble->add_option("--n", ens_n, "Spin count (repeatable)")->required();
  ensemble->add_option("--seeds", ens_seeds, "e.g. 0..19")->required();
  ensemble->add_option("--gamma-tol", ens_gamma_tol, "Golden-section width");
  ensemble->add_option("--tol", ens_tol, "Eigensolver tolerance");
  ensemble_common.attach(ensemble, "jsonl");

  // anneal
  auto* anneal = app.add_subcommand("anneal", "Schedule-driven evolution");
  CommonOpts anneal_common;
  int an_n = 0, an_krylov = 16;
  uint64_t an_seed = 0;
  std::string an_tau, an_profile = "linear", an_table;
  double an_gamma_max = 3.0 * qrem::theory::kSqrtLn2, an_dt = 0.5;
  anneal->add_option("--n", an_n, "Spin count");
  anneal->add_option("--seed", an_seed, "Sample seed");
  anneal->add_option("--table", an_table, "Load a binary energy table");
  anneal->add_option("--tau", an_tau, "Comma list of anneal times")
      ->required();
  anneal->add_option("--gamma-max", an_gamma_max, "Initial field");
  anneal->add_option("--profile", an_profile, "Schedule profile");
  anneal->add_option("--dt-control", an_dt, "||H|| dt bound per step");
  anneal->add_option("--krylov-dim", an_krylov, "Krylov dimension per step");
  anneal_common.attach(anneal, "json");

  // theory + phase-diagram
  auto* theory_cmd =
      app.add_subcommand("theory", "Closed-form prediction tables");
  CommonOpts theory_common;
  bool th_phase = false;
  std::string th_mode = "predictions", th_tgrid = "0:1.2:60",
              th_ggrid = "0:1.6:80";
  std::vector<int> th_n = {16};
  double th_eps0 = -qrem::theory::kSqrtLn2;
  theory_cmd->add_flag("--phase-diagram", th_phase,
                       "Emit the (T, gamma) phase grid");
  theory_cmd->add_option("--mode", th_mode,
                         "predictions | branches | transition");
  theory_cmd->add_option("--t-grid", th_tgrid, "lo:hi:count");
  theory_cmd->add_option("--gamma-grid", th_ggrid, "lo:hi:count");
  theory_cmd->add_option("--n", th_n, "Sizes for prediction tables");
  theory_cmd->add_option("--eps0", th_eps0, "Intensive classical energy");
  theory_common.attach(theory_cmd, "csv");

  auto* phase = app.add_subcommand("phase-diagram",
                                   "Phase grid (alias of theory mode)");
  CommonOpts phase_common;
  std::string ph_tgrid = "0:1.2:60", ph_ggrid = "0:1.6:80";
  phase->add_option("--t-grid", ph_tgrid, "lo:hi:count");
  phase->add_option("--gamma-grid", ph_ggrid, "lo:hi:count");
  phase_common.attach(phase, "csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (sample->parsed()) {
      Json cfg = merge_config(
          Json{{"subcommand", "sample"},
               {"n", sample_n},
               {"seed", sample_seed},
               {"out", sample_common.out},
               {"format", sample_common.format},
               {"threads", sample_common.threads},
               {"budget_mb", sample_common.budget_mb}},
          sample_common.config_path);
      qrem::par::set_max_threads(cfg.at("threads").get<int>());
      return run_sample(sample_common, cfg);
    }
    if (spectrum->parsed()) {
      Json cfg = merge_config(
          Json{{"subcommand", "spectrum"},
               {"n", spec_n},
               {"seed", spec_seed},
               {"table", spec_table},
               {"gamma", spec_gamma},
               {"k", spec_k},
               {"tol", spec_tol},
               {"max_basis", spec_max_basis},
               {"vectors_out", spec_vectors_out},
               {"out", spectrum_common.out},
               {"format", spectrum_common.format},
               {"threads", spectrum_common.threads},
               {"budget_mb", spectrum_common.budget_mb}},
          spectrum_common.config_path);
      qrem::par::set_max_threads(cfg.at("threads").get<int>());
      return run_spectrum(spectrum_common, cfg);
    }
    if (sweep->parsed()) {
      Json cfg = merge_config(
          Json{{"subcommand", "sweep"},
               {"n", sweep_n},
               {"seed", sweep_seed},
               {"table", sweep_table},
               {"gamma_grid", sweep_grid},
               {"k", sweep_k},
               {"tol", sweep_tol},
               {"no_warm_start", sweep_no_warm},
               {"out", sweep_common.out},
               {"format", sweep_common.format},
               {"threads", sweep_common.threads},
               {"budget_mb", sweep_common.budget_mb}},
          sweep_common.config_path);
      qrem::par::set_max_threads(cfg.at("threads").get<int>());
      return run_sweep_cmd(sweep_common, cfg);
    }
    if (min_gap->parsed()) {
      Json cfg = merge_config(
          Json{{"subcommand", "min-gap"},
               {"n", mg_n},
               {"seeds", mg_seeds},
               {"bracket", mg_bracket},
               {"gamma_tol", mg_gamma_tol},
               {"tol", mg_tol},
               {"out", min_gap_common.out},
               {"format", min_gap_common.format},
               {"threads", min_gap_common.threads},
               {"keep_going", min_gap_common.keep_going},
               {"budget_mb", min_gap_common.budget_mb}},
          min_gap_common.config_path);
      qrem::par::set_max_threads(cfg.at("threads").get<int>());
      return run_min_gap(min_gap_common, cfg);
    }
    if (ensemble->parsed()) {
      Json cfg = merge_config(
          Json{{"subcommand", "ensemble"},
               {"n", ens_n},
               {"seeds", ens_seeds},
               {"gamma_tol", ens_gamma_tol},
               {"tol", ens_tol},
               {"out", ensemble_common.out},
               {"format", ensemble_common.format},
               {"threads", ensemble_common.threads},
               {"keep_going", ensemble_common.keep_going},
               {"budget_mb", ensemble_common.budget_mb}},
          ensemble_common.config_path);
      qrem::par::set_max_threads(cfg.at("threads").get<int>());
      return run_ensemble(ensemble_common, cfg);
    }
    if (anneal->parsed()) {
      Json cfg = merge_config(
          Json{{"subcommand", "anneal"},
               {"n", an_n},
               {"seed", an_seed},
               {"table", an_table},
               {"tau", an_tau},
               {"gamma_max", an_gamma_max},
               {"profile", an_profile},
               {"dt_control", an_dt},
               {"krylov_dim", an_krylov},
               {"out", anneal_common.out},
               {"format", anneal_common.format},
               {"threads", anneal_common.threads},
               {"budget_mb", anneal_common.budget_mb}},
          anneal_common.config_path);
      qrem::par::set_max_threads(cfg.at("threads").get<int>());
      return run_anneal(anneal_common, cfg);
    }
    if (theory_cmd->parsed()) {
      Json cfg = merge_config(
          Json{{"subcommand", "theory"},
               {"phase_diagram", th_phase},
               {"mode", th_mode},
               {"t_grid", th_tgrid},
               {"gamma_grid", th_ggrid},
               {"n", th_n},
               {"eps0", th_eps0},
               {"out", theory_common.out},
               {"format", theory_common.format},
               {"threads", theory_common.threads}},
          theory_common.config_path);
      return run_theory(theory_common, cfg);
    }
    if (phase->parsed()) {
      Json cfg = merge_config(
          Json{{"subcommand", "phase-diagram"},
               {"phase_diagram", true},
               {"t_grid", ph_tgrid},
               {"gamma_grid", ph_ggrid},
               {"out", phase_common.out},
               {"format", phase_common.format},
               {"threads", phase_common.threads}},
          phase_common.config_path);
      return emit_phase_diagram(cfg);
    }
  } catch (const qrem::ValidationError& e) {
    std::cerr << "error (validation): " << e.what() << "\n";
    return 2;
  } catch (const qrem::CapacityError& e) {
    std::cerr << "error (capacity): " << e.what() << "\n";
    return 3;
  } catch (const qrem::NumericalError& e) {
    std::cerr << "error (numerical): " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
