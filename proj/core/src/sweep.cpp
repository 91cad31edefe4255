#include "qrem/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

namespace qrem {
namespace {

struct GapEval {
  double gap = 0.0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
};

// Cold deterministic eigensolve of the two lowest levels at one gamma.
GapEval eval_gap(const EnergyTable& table, double gamma,
                 const LanczosOptions& base, long* solves) {
  HamiltonianView h(table, gamma);
  LanczosOptions opts = base;
  opts.k = std::max(base.k, 2);
  opts.start_seed = table.seed();
  opts.warm_start = nullptr;
  const SpectrumResult result = lowest_eigenpairs(h, opts);
  if (!result.converged) {
    throw NumericalError("sweep: eigensolve did not converge at gamma=" +
                         std::to_string(gamma));
  }
  if (solves != nullptr) ++(*solves);
  return GapEval{result.eigenvalues[1] - result.eigenvalues[0],
                 result.eigenvalues[0], result.eigenvalues[1]};
}

}  // namespace

GapCurve gap_sweep(const EnergyTable& table, double gamma_min,
                   double gamma_max, int steps, const SweepOptions& opts) {
  if (!(gamma_min < gamma_max) || gamma_min < 0.0) {
    throw ValidationError("sweep: need 0 <= gamma_min < gamma_max");
  }
  if (steps < 2) throw ValidationError("sweep: need at least 2 grid points");
  const int k = std::max(opts.k, 2);

  GapCurve curve;
  curve.n = table.n();
  curve.seed = table.seed();
  curve.points.reserve(steps);

  std::vector<std::vector<double>> previous_vectors;
  const double delta = (gamma_max - gamma_min) / (steps - 1);

  for (int i = 0; i < steps; ++i) {
    const double gamma = gamma_min + i * delta;
    HamiltonianView h(table, gamma);
    LanczosOptions solver = opts.solver;
    solver.k = k;
    solver.want_vectors = true;  // retained for warm starts
    solver.start_seed = table.seed();
    solver.warm_start =
        (opts.warm_start && !previous_vectors.empty()) ? &previous_vectors
                                                       : nullptr;
    SpectrumResult result = lowest_eigenpairs(h, solver);
    if (!result.converged) {
      throw NumericalError("sweep: eigensolve did not converge at gamma=" +
                           std::to_string(gamma));
    }

    GapCurvePoint point;
    point.gamma = gamma;
    point.levels = result.eigenvalues;
    point.lambda0 = result.eigenvalues[0];
    point.lambda1 = result.eigenvalues[1];
    point.gap = point.lambda1 - point.lambda0;
    point.iterations = result.iterations;
    point.max_residual =
        *std::max_element(result.residual_norms.begin(),
                          result.residual_norms.end());
    if (!(point.gap > 0.0)) {
      throw NumericalError("sweep: non-positive gap at gamma=" +
                           std::to_string(gamma));
    }

    if (!curve.points.empty()) {
      // |lambda_i(gamma+d) - lambda_i(gamma)| <= n d + 2 tol (|l| + ||H||).
      const GapCurvePoint& prev = curve.points.back();
      for (int lvl = 0; lvl < k; ++lvl) {
        const double drift = std::abs(point.levels[lvl] - prev.levels[lvl]);
        const double slack =
            2.0 * opts.solver.tol *
            (std::abs(point.levels[lvl]) + result.norm_estimate);
        if (drift > table.n() * delta + slack) {
          throw NumericalError(
              "sweep: level " + std::to_string(lvl) +
              " moved faster than the Lipschitz bound near gamma=" +
              std::to_string(gamma) + " (likely missed eigenvalue)");
        }
      }
    }

    previous_vectors = std::move(result.eigenvectors);
    curve.points.push_back(std::move(point));
  }
  return curve;
}

MinGapRecord find_min_gap(const EnergyTable& table, const MinGapOptions& opts) {
  const GroundState ground = ground_state_energy(table);
  const auto prediction =
      theory::min_gap_prediction(ground.energy, table.n());

  double lo, hi;
  if (opts.bracket.has_value()) {
    lo = opts.bracket->first;
    hi = opts.bracket->second;
  } else {
    lo = 0.5 * prediction.gamma_star;
    hi = 1.5 * prediction.gamma_star;
  }
  if (!(lo >= 0.0 && lo < hi)) {
    throw ValidationError("sweep: invalid min-gap bracket");
  }

  long solves = 0;
  std::map<double, GapEval> cache;  // doubles as the sorted evaluation grid
  auto gap_at = [&](double gamma) -> double {
    // Quantized key: overlapping refinement grids would otherwise insert
    // 1-ulp twins whose equal values fake local minima.
    gamma = std::round(gamma * 1e12) / 1e12;
    auto it = cache.find(gamma);
    if (it == cache.end()) {
      it = cache.emplace(gamma, eval_gap(table, gamma, opts.solver, &solves))
               .first;
    }
    return it->second.gap;
  };
  auto scan_range = [&](double a, double b, int points) {
    for (int i = 0; i < points; ++i) {
      gap_at(a + (b - a) * i / (points - 1));
    }
  };

  // An avoided crossing shows up as an interior local minimum of the scan.
  // Near-degenerate classical levels can push the global bracket minimum to
  // an endpoint, so the search keys on local minima and prefers the one
  // nearest the predicted crossing.
  struct Triple {
    double left, center, right, value;
  };
  auto best_local_min = [&](double a, double b) -> std::optional<Triple> {
    std::optional<Triple> best;
    auto it = cache.lower_bound(a);
    if (it == cache.end()) return best;
    auto mid = std::next(it);
    if (mid == cache.end()) return best;
    for (auto right = std::next(mid);
         right != cache.end() && right->first <= b + 1e-15;
         ++it, ++mid, ++right) {
      if (mid->second.gap <= it->second.gap &&
          mid->second.gap <= right->second.gap) {
        const bool closer =
            !best.has_value() ||
            std::abs(mid->first - prediction.gamma_star) <
                std::abs(best->center - prediction.gamma_star);
        if (closer) {
          best = Triple{it->first, mid->first, right->first, mid->second.gap};
        }
      }
    }
    return best;
  };

  const int scan = std::max(5, opts.scan_points);
  std::optional<Triple> dip;
  for (int expansion = 0;; ++expansion) {
    scan_range(lo, hi, scan);
    dip = best_local_min(lo, hi);
    if (dip.has_value()) break;
    if (expansion == opts.max_expansions) {
      throw NumericalError(
          "sweep: no interior gap minimum after " +
          std::to_string(opts.max_expansions) + " bracket expansions for "
          "seed " + std::to_string(table.seed()));
    }
    const double center = 0.5 * (lo + hi);
    const double half = hi - lo;  // doubled width
    lo = std::max(0.0, center - half);
    hi = center + half;
  }

  // Zoom: refine the dip's neighbourhood until the bracket is at the scale
  // of the crossing itself (estimated from the two-level prediction), then
  // hand over to golden section.
  const double width_estimate = std::max(
      2.0 * prediction.gap / table.n(), 16.0 * opts.gamma_tol);
  for (int zoom = 0; zoom < 6; ++zoom) {
    if (dip->right - dip->left <= width_estimate) break;
    scan_range(dip->left, dip->right, 13);
    dip = best_local_min(dip->left, dip->right);
    if (!dip.has_value()) {
      throw NumericalError("sweep: gap dip vanished under refinement at seed " +
                           std::to_string(table.seed()));
    }
  }

  double a = dip->left;
  double b = dip->right;
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = gap_at(x1);
  double f2 = gap_at(x2);
  while (b - a > opts.gamma_tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = gap_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = gap_at(x2);
    }
  }

  // Report the minimum over everything evaluated inside the final dip
  // neighbourhood.
  double gamma_star = dip->center;
  double min_gap = dip->value;
  for (auto it = cache.lower_bound(dip->left);
       it != cache.end() && it->first <= dip->right; ++it) {
    if (it->second.gap < min_gap) {
      min_gap = it->second.gap;
      gamma_star = it->first;
    }
  }

  MinGapRecord record;
  record.n = table.n();
  record.seed = table.seed();
  record.gamma_star = gamma_star;
  record.min_gap = min_gap;
  record.e_classical = ground.energy;
  record.prediction = prediction.gap;
  record.predicted_gamma = prediction.gamma_star;
  record.tau_estimate = theory::annealing_time_estimate(min_gap);
  record.bracket_lo = dip->left;
  record.bracket_hi = dip->right;
  record.gap_at_bracket_lo = gap_at(dip->left);
  record.gap_at_bracket_hi = gap_at(dip->right);
  record.eigensolves = solves;
  return record;
}

double gap_region_width(const EnergyTable& table, const MinGapRecord& record,
                        double factor, const MinGapOptions& opts) {
  if (!(factor > 1.0)) {
    throw ValidationError("sweep: width factor must exceed 1");
  }
  const double threshold = factor * record.min_gap;
  auto gap = [&](double gamma) {
    return eval_gap(table, gamma, opts.solver, nullptr).gap;
  };

  // Walk each flank outward until the gap exceeds the threshold, then
  // bisect the crossing.
  auto crossing = [&](double inner, double step_sign) {
    double step = std::max(opts.gamma_tol * 16.0,
                           0.05 * std::max(record.gamma_star, 1e-3));
    double outer = inner;
    for (int i = 0; i < 60; ++i) {
      outer = step_sign > 0 ? outer + step : std::max(0.0, outer - step);
      if (gap(outer) >= threshold) break;
      if (outer == 0.0) return 0.0;
      step *= 1.5;
    }
    double in = inner, out = outer;
    while (std::abs(out - in) > opts.gamma_tol) {
      const double mid = 0.5 * (in + out);
      (gap(mid) < threshold ? in : out) = mid;
    }
    return 0.5 * (in + out);
  };

  const double left = crossing(record.gamma_star, -1.0);
  const double right = crossing(record.gamma_star, +1.0);
  return right - left;
}

EnsembleSummary EnsembleSummary::from_records(
    int n, std::vector<MinGapRecord> records,
    std::vector<SeedFailure> failures) {
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.seed < b.seed; });
  std::sort(failures.begin(), failures.end(),
            [](const auto& a, const auto& b) { return a.seed < b.seed; });

  EnsembleSummary summary;
  summary.n = n;
  for (const auto& r : records) summary.seeds.push_back(r.seed);
  summary.records = std::move(records);
  summary.failures = std::move(failures);

  if (!summary.records.empty()) {
    std::vector<double> gaps;
    double sum = 0.0, ratio_sum = 0.0;
    for (const auto& r : summary.records) {
      gaps.push_back(r.min_gap);
      sum += r.min_gap;
      ratio_sum += r.min_gap / r.prediction;
    }
    summary.median_min_gap = median(gaps);
    summary.mean_min_gap = sum / gaps.size();
    summary.min_min_gap = *std::min_element(gaps.begin(), gaps.end());
    summary.max_min_gap = *std::max_element(gaps.begin(), gaps.end());
    summary.mean_ratio = ratio_sum / gaps.size();
  }
  return summary;
}

EnsembleSummary ensemble_run(int n, std::span<const uint64_t> seeds,
                             const EnsembleConfig& config) {
  if (seeds.empty()) {
    throw ValidationError("sweep: ensemble needs at least one seed");
  }
  std::vector<uint64_t> sorted(seeds.begin(), seeds.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  const int workers = std::max(
      1, std::min<int>(config.threads > 0 ? config.threads
                                          : par::max_threads(),
                       static_cast<int>(sorted.size())));

  std::vector<std::optional<MinGapRecord>> records(sorted.size());
  std::vector<std::optional<SeedFailure>> failures(sorted.size());

  auto run_seed = [&](std::size_t idx) {
    const uint64_t seed = sorted[idx];
    try {
      const EnergyTable table =
          EnergyTable::sample(ModelParams{n, seed, 0.0});
      records[idx] = find_min_gap(table, config.min_gap);
    } catch (const std::exception& e) {
      if (!config.keep_going) throw;
      failures[idx] = SeedFailure{seed, e.what()};
    }
  };

  if (workers <= 1) {
    for (std::size_t i = 0; i < sorted.size(); ++i) run_seed(i);
  } else {
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
      par::ScopedSerial guard;  // seeds are the parallel grain
      while (true) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= sorted.size()) break;
        run_seed(i);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
  }

  std::vector<MinGapRecord> ok;
  std::vector<SeedFailure> failed;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (records[i].has_value()) ok.push_back(*records[i]);
    if (failures[i].has_value()) failed.push_back(*failures[i]);
  }
  return EnsembleSummary::from_records(n, std::move(ok), std::move(failed));
}

ScalingFit fit_min_gap_scaling(std::span<const EnsembleSummary> summaries) {
  if (summaries.size() < 2) {
    throw ValidationError("sweep: scaling fit needs at least two sizes");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& s : summaries) {
    if (!(s.median_min_gap > 0.0)) {
      throw ValidationError("sweep: scaling fit needs positive medians");
    }
    const double x = s.n;
    const double y = std::log(s.median_min_gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(summaries.size());
  const double denom = m * sxx - sx * sx;
  ScalingFit fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  return fit;
}

double median(std::vector<double> values) {
  if (values.empty()) {
    throw ValidationError("sweep: median of empty set");
  }
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace qrem
