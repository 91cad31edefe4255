#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrem/spectral.hpp"
#include "qrem/theory.hpp"

namespace qrem {

struct SweepOptions {
  int k = 2;                  // levels tracked per grid point
  LanczosOptions solver;      // tol etc.; k is overridden per call
  bool warm_start = true;     // reuse the previous grid point's Ritz vectors
};

struct GapCurvePoint {
  double gamma = 0.0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double gap = 0.0;
  std::vector<double> levels;  // all k eigenvalues, ascending
  long iterations = 0;
  double max_residual = 0.0;
};

struct GapCurve {
  int n = 0;
  uint64_t seed = 0;
  std::vector<GapCurvePoint> points;
};

// Lowest-k levels on a uniform gamma grid. Each solve warm-starts from the
// previous point's Ritz vectors; consecutive points are checked against the
// Lipschitz bound |dlambda/dgamma| <= n (throws NumericalError on violation,
// which indicates a missed eigenvalue).
GapCurve gap_sweep(const EnergyTable& table, double gamma_min,
                   double gamma_max, int steps, const SweepOptions& opts = {});

struct MinGapOptions {
  std::optional<std::pair<double, double>> bracket;  // default from theory
  double gamma_tol = 1e-4;   // golden-section stopping width
  int scan_points = 25;      // bracket pre-scan; must resolve the dip
  int max_expansions = 3;    // bracket doublings before giving up
  LanczosOptions solver;     // cold deterministic start per evaluation
};

struct MinGapRecord {
  int n = 0;
  uint64_t seed = 0;
  double gamma_star = 0.0;
  double min_gap = 0.0;
  double e_classical = 0.0;      // sample E0
  double prediction = 0.0;       // 2 |E0| 2^(-n/2)
  double predicted_gamma = 0.0;  // |E0| / n
  double tau_estimate = 0.0;     // 1 / min_gap^2
  double bracket_lo = 0.0, bracket_hi = 0.0;
  double gap_at_bracket_lo = 0.0, gap_at_bracket_hi = 0.0;
  long eigensolves = 0;
};

// Golden-section search for the avoided-crossing minimum of gap(gamma).
// Every evaluation is a fresh eigensolve with a cold deterministic start, so
// the located minimum does not depend on the search path.
MinGapRecord find_min_gap(const EnergyTable& table,
                          const MinGapOptions& opts = {});

// Width of the gamma region where gap < factor * min_gap, found by bisection
// on both flanks of the recorded minimum.
double gap_region_width(const EnergyTable& table, const MinGapRecord& record,
                        double factor = 2.0, const MinGapOptions& opts = {});

struct SeedFailure {
  uint64_t seed = 0;
  std::string message;
};

struct EnsembleSummary {
  int n = 0;
  std::vector<uint64_t> seeds;           // sorted
  std::vector<MinGapRecord> records;     // sorted by seed
  std::vector<SeedFailure> failures;     // sorted by seed
  double median_min_gap = 0.0;
  double mean_min_gap = 0.0;
  double min_min_gap = 0.0;
  double max_min_gap = 0.0;
  double mean_ratio = 0.0;  // mean of min_gap / prediction

  // Recomputes the statistics from `records`; used both to build summaries
  // and to verify stored ones.
  static EnsembleSummary from_records(int n, std::vector<MinGapRecord> records,
                                      std::vector<SeedFailure> failures = {});
};

struct EnsembleConfig {
  MinGapOptions min_gap;
  int threads = 0;          // 0 = par::max_threads()
  bool keep_going = true;   // collect per-seed failures instead of throwing
};

// One record per seed, computed independently and merged in seed order, so
// the output is identical for any worker count.
EnsembleSummary ensemble_run(int n, std::span<const uint64_t> seeds,
                             const EnsembleConfig& config = {});

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Least-squares fit of ln(median min-gap) against n across sizes.
ScalingFit fit_min_gap_scaling(std::span<const EnsembleSummary> summaries);

double median(std::vector<double> values);

}  // namespace qrem
