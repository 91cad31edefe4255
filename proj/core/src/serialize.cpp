#include "qrem/serialize.hpp"

#include <sstream>

#include "qrem/version.hpp"

namespace qrem {

Json artifact_header(const Json& config) {
  return Json{{"schema_version", kSchemaVersion},
              {"code_version", kVersion},
              {"config", config}};
}

void check_artifact_header(const Json& header) {
  if (!header.is_object() || !header.contains("schema_version")) {
    throw ValidationError("serialize: missing artifact header");
  }
  const int version = header.at("schema_version").get<int>();
  if (version != kSchemaVersion) {
    throw ValidationError("serialize: unsupported schema version " +
                          std::to_string(version) + ", expected " +
                          std::to_string(kSchemaVersion));
  }
}

Json to_json(const SpectrumResult& result) {
  Json j{{"eigenvalues", result.eigenvalues},
         {"residual_norms", result.residual_norms},
         {"iterations", result.iterations},
         {"converged", result.converged},
         {"norm_estimate", result.norm_estimate},
         {"degenerate_cluster", result.degenerate_cluster}};
  return j;
}

Json to_json(const MinGapRecord& record) {
  return Json{{"n", record.n},
              {"seed", record.seed},
              {"gamma_star", record.gamma_star},
              {"min_gap", record.min_gap},
              {"e_classical", record.e_classical},
              {"prediction", record.prediction},
              {"predicted_gamma", record.predicted_gamma},
              {"tau_estimate", record.tau_estimate},
              {"bracket", {record.bracket_lo, record.bracket_hi}},
              {"gap_at_bracket",
               {record.gap_at_bracket_lo, record.gap_at_bracket_hi}},
              {"eigensolves", record.eigensolves}};
}

MinGapRecord min_gap_record_from_json(const Json& j) {
  MinGapRecord r;
  r.n = j.at("n").get<int>();
  r.seed = j.at("seed").get<uint64_t>();
  r.gamma_star = j.at("gamma_star").get<double>();
  r.min_gap = j.at("min_gap").get<double>();
  r.e_classical = j.at("e_classical").get<double>();
  r.prediction = j.at("prediction").get<double>();
  r.predicted_gamma = j.at("predicted_gamma").get<double>();
  r.tau_estimate = j.at("tau_estimate").get<double>();
  r.bracket_lo = j.at("bracket").at(0).get<double>();
  r.bracket_hi = j.at("bracket").at(1).get<double>();
  r.gap_at_bracket_lo = j.at("gap_at_bracket").at(0).get<double>();
  r.gap_at_bracket_hi = j.at("gap_at_bracket").at(1).get<double>();
  r.eigensolves = j.at("eigensolves").get<long>();
  return r;
}

Json to_json(const EnsembleSummary& summary) {
  Json records = Json::array();
  for (const auto& r : summary.records) records.push_back(to_json(r));
  Json failures = Json::array();
  for (const auto& f : summary.failures) {
    failures.push_back(Json{{"seed", f.seed}, {"message", f.message}});
  }
  return Json{{"n", summary.n},
              {"seeds", summary.seeds},
              {"records", records},
              {"failures", failures},
              {"median_min_gap", summary.median_min_gap},
              {"mean_min_gap", summary.mean_min_gap},
              {"min_min_gap", summary.min_min_gap},
              {"max_min_gap", summary.max_min_gap},
              {"mean_ratio", summary.mean_ratio}};
}

Json to_json(const AnnealOutcome& outcome) {
  return Json{{"tau", outcome.tau},
              {"success_probability", outcome.success_probability},
              {"norm_error", outcome.norm_error},
              {"steps", outcome.steps}};
}

Json to_json(const GapCurvePoint& point) {
  return Json{{"gamma", point.gamma},
              {"lambda0", point.lambda0},
              {"lambda1", point.lambda1},
              {"gap", point.gap},
              {"levels", point.levels},
              {"iterations", point.iterations},
              {"max_residual", point.max_residual}};
}

Json to_json(const theory::PhasePoint& point) {
  return Json{{"T", point.temperature},
              {"gamma", point.gamma},
              {"label", theory::phase_name(point.label)},
              {"f", point.free_energy_density},
              {"f_rem", point.f_rem},
              {"f_para", point.f_para}};
}

namespace {

void append_double(std::ostringstream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

std::string gap_curve_csv(const GapCurve& curve) {
  std::ostringstream out;
  out << "gamma,lambda0,lambda1,gap,iterations,max_residual";
  const std::size_t extra =
      curve.points.empty() ? 0 : curve.points.front().levels.size();
  for (std::size_t i = 2; i < extra; ++i) out << ",lambda" << i;
  out << "\n";
  for (const auto& p : curve.points) {
    append_double(out, p.gamma);
    out << ',';
    append_double(out, p.lambda0);
    out << ',';
    append_double(out, p.lambda1);
    out << ',';
    append_double(out, p.gap);
    out << ',' << p.iterations << ',';
    append_double(out, p.max_residual);
    for (std::size_t i = 2; i < p.levels.size(); ++i) {
      out << ',';
      append_double(out, p.levels[i]);
    }
    out << "\n";
  }
  return out.str();
}

std::string phase_grid_csv(const std::vector<theory::PhasePoint>& grid) {
  std::ostringstream out;
  out << "T,gamma,label,f,f_rem,f_para\n";
  for (const auto& p : grid) {
    append_double(out, p.temperature);
    out << ',';
    append_double(out, p.gamma);
    out << ',' << theory::phase_name(p.label) << ',';
    append_double(out, p.free_energy_density);
    out << ',';
    append_double(out, p.f_rem);
    out << ',';
    append_double(out, p.f_para);
    out << "\n";
  }
  return out.str();
}

}  // namespace qrem
