#pragma once

#include <string>

#include "json.hpp"
#include "qrem/dynamics.hpp"
#include "qrem/spectral.hpp"
#include "qrem/sweep.hpp"
#include "qrem/theory.hpp"

namespace qrem {

using Json = nlohmann::json;

// Every artifact starts with a header object carrying the schema version,
// code version and the effective run configuration, so any output can be
// reproduced from its own metadata.
Json artifact_header(const Json& config);

// Throws ValidationError when the header is missing or has an unknown major
// schema version.
void check_artifact_header(const Json& header);

Json to_json(const SpectrumResult& result);
Json to_json(const MinGapRecord& record);
MinGapRecord min_gap_record_from_json(const Json& j);
Json to_json(const EnsembleSummary& summary);
Json to_json(const AnnealOutcome& outcome);
Json to_json(const GapCurvePoint& point);
Json to_json(const theory::PhasePoint& point);

// CSV bodies (no header record; the CLI prepends a commented header line).
std::string gap_curve_csv(const GapCurve& curve);
std::string phase_grid_csv(const std::vector<theory::PhasePoint>& grid);

}  // namespace qrem
