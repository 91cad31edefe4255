#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qrem/model.hpp"
#include "qrem/theory.hpp"

namespace qrem {

// Annealing schedule gamma(s) on s in [0, 1]. Annealing profiles must turn
// the field off: gamma(0) = gamma_max, gamma(1) = 0 (checked by linear()).
// constant() is a diagnostic profile for stationary/conservation checks and
// skips the endpoint constraint.
struct Schedule {
  double total_time = 0.0;
  double gamma_max = 0.0;
  std::function<double(double)> profile;

  static Schedule linear(double tau,
                         double gamma_max = 3.0 * theory::kSqrtLn2);
  static Schedule constant(double tau, double gamma);

  double gamma_at(double s) const { return profile(s); }
};

struct EvolveOptions {
  double dt_control = 0.5;   // ||H||est * dt <= dt_control
  int krylov_dim = 16;       // per-step Krylov subspace size
  double norm_tol = 1e-8;    // abort when |(norm - 1)| exceeds this
  double step_error_tol = 1e-11;  // per-step Krylov truncation estimate
  int max_n = 14;            // state-vector propagation cap
};

struct AnnealOutcome {
  double tau = 0.0;
  double success_probability = 0.0;  // |<classical ground | psi(tau)>|^2
  double norm_error = 0.0;
  long steps = 0;
};

// Integrates i d/dt psi = H(gamma(t/tau)) psi from the ground state of
// H(gamma(0)), using piecewise-constant midpoint Hamiltonians and a Krylov
// matrix exponential per step. Unitary per step up to rounding; the
// accumulated norm drift is reported and checked against norm_tol.
// final_state, when given, receives psi(tau).
AnnealOutcome evolve(const EnergyTable& table, const Schedule& schedule,
                     const EvolveOptions& opts = {},
                     std::vector<std::complex<double>>* final_state = nullptr);

struct SuccessCurve {
  std::vector<AnnealOutcome> outcomes;  // one per tau, input order
  // First crossing of success = 1/2, log-linearly interpolated between the
  // bracketing tau values; empty when the curve never reaches 1/2.
  std::optional<double> tau_half;
};

// Independent runs over a sorted tau ladder with a shared schedule family.
SuccessCurve success_curve(const EnergyTable& table,
                           std::span<const double> taus,
                           const std::function<Schedule(double)>& family,
                           const EvolveOptions& opts = {});

}  // namespace qrem
