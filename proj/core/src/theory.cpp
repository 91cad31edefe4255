#include "qrem/theory.hpp"

#include <cmath>

namespace qrem::theory {

double entropy_density(double e) { return kLn2 - e * e; }

bool in_physical_band(double e) { return std::abs(e) <= kSqrtLn2; }

double critical_temperature() { return 1.0 / (2.0 * kSqrtLn2); }

double free_energy_rem(double T) {
  if (T < 0.0) throw ValidationError("theory: temperature must be >= 0");
  if (T <= critical_temperature()) return -kSqrtLn2;
  return -1.0 / (4.0 * T) - T * kLn2;
}

double free_energy_para(double T, double gamma) {
  if (T < 0.0) throw ValidationError("theory: temperature must be >= 0");
  if (gamma < 0.0) throw ValidationError("theory: gamma must be >= 0");
  if (T == 0.0) return -gamma;
  // -T ln(2 cosh(g/T)) = -g - T log1p(exp(-2 g/T)); safe for any g/T.
  const double x = gamma / T;
  return -gamma - T * std::log1p(std::exp(-2.0 * x));
}

double transition_gamma(double T) {
  if (T < 0.0) throw ValidationError("theory: temperature must be >= 0");
  if (T == 0.0) return kSqrtLn2;

  const double f_rem = free_energy_rem(T);
  auto excess = [&](double gamma) {
    return free_energy_para(T, gamma) - f_rem;
  };

  double lo = 0.0, hi = 10.0;
  if (excess(lo) <= 0.0 || excess(hi) >= 0.0) {
    throw NumericalError(
        "theory: no transition bracket in [0, 10] at T=" + std::to_string(T));
  }
  // Bisection to a safe interval, then secant polish.
  for (int i = 0; i < 80 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  double a = lo, b = hi;
  double fa = excess(a), fb = excess(b);
  for (int i = 0; i < 8 && std::abs(b - a) > 1e-15; ++i) {
    if (fb == fa) break;
    const double c = b - fb * (b - a) / (fb - fa);
    a = b;
    fa = fb;
    b = c;
    fb = excess(b);
  }
  return b;
}

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::kFrozenClassical:
      return "frozen-classical";
    case Phase::kUnfrozenClassical:
      return "unfrozen-classical";
    case Phase::kQuantumParamagnet:
      return "quantum-paramagnet";
  }
  return "unknown";
}

PhasePoint classify(double T, double gamma) {
  PhasePoint point;
  point.temperature = T;
  point.gamma = gamma;
  point.f_rem = free_energy_rem(T);
  point.f_para = free_energy_para(T, gamma);
  if (point.f_para < point.f_rem) {
    point.label = Phase::kQuantumParamagnet;
    point.free_energy_density = point.f_para;
  } else {
    point.label = T <= critical_temperature() ? Phase::kFrozenClassical
                                              : Phase::kUnfrozenClassical;
    point.free_energy_density = point.f_rem;
  }
  return point;
}

double perturbed_energy_classical(double eps_i, double gamma, int n) {
  if (n < 1) throw ValidationError("theory: n must be >= 1");
  if (eps_i == 0.0) {
    throw ValidationError(
        "theory: classical branch undefined at eps_i = 0 (non-extensive "
        "level)");
  }
  return eps_i + gamma * gamma / (n * eps_i);
}

double perturbed_energy_quantum(double gamma, int n) {
  if (n < 1) throw ValidationError("theory: n must be >= 1");
  if (gamma <= 0.0) {
    throw ValidationError("theory: quantum branch requires gamma > 0");
  }
  return -gamma - 1.0 / (2.0 * n * gamma);
}

CrossingModel::CrossingModel(double e0, int spins)
    : CrossingModel(e0, spins, std::exp2(-spins)) {}

CrossingModel::CrossingModel(double e0, int spins, double overlap)
    : e_classical(e0), n(spins), overlap_sq(overlap) {
  if (!(e_classical < 0.0)) {
    throw ValidationError("theory: crossing model needs E0 < 0");
  }
  if (n < 1) throw ValidationError("theory: n must be >= 1");
  if (overlap_sq < 0.0 || overlap_sq > 1.0) {
    throw ValidationError("theory: overlap_sq must lie in [0, 1]");
  }
}

double two_level_gap(const CrossingModel& model, double gamma) {
  if (gamma < 0.0) throw ValidationError("theory: gamma must be >= 0");
  const double qp = gamma * model.n;  // extensive paramagnet scale
  const double diff = qp + model.e_classical;
  const double radicand =
      diff * diff - 4.0 * model.e_classical * qp * model.overlap_sq;
  // E0 < 0 makes the cross term non-negative; radicand >= diff^2 >= 0.
  return std::sqrt(radicand);
}

MinGapPrediction min_gap_prediction(double e_classical, int n) {
  if (!(e_classical < 0.0)) {
    throw ValidationError("theory: min-gap prediction needs E0 < 0");
  }
  const double amp = std::abs(e_classical);
  return MinGapPrediction{2.0 * amp * std::exp2(-0.5 * n), amp / n};
}

double annealing_time_estimate(double min_gap) {
  if (!(min_gap > 0.0)) {
    throw ValidationError("theory: annealing-time estimate needs gap > 0");
  }
  return 1.0 / (min_gap * min_gap);
}

}  // namespace qrem::theory
