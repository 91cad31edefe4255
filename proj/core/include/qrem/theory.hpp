#pragma once

#include <string>

#include "qrem/errors.hpp"

namespace qrem::theory {

// Closed-form predictions for the model, all in intensive units (per spin)
// unless noted. The transverse-field scale entering the two-level crossing is
// extensive (gamma * n), matching the per-sample degeneracy condition
// gamma * n = |E0|.

inline constexpr double kLn2 = 0.693147180559945309417232121458;
inline constexpr double kSqrtLn2 = 0.832554611157697756353164644895;

// Microcanonical entropy density s(e) = ln2 - e^2. Physical band: |e| <=
// sqrt(ln2); outside it the typical sample has no levels at all.
double entropy_density(double e);
bool in_physical_band(double e);

// Freezing temperature from s'(e0) = 1/T_c: T_c = 1/(2 sqrt(ln2)).
double critical_temperature();

// Classical free energy density: frozen -sqrt(ln2) for T <= T_c, annealed
// -1/(4T) - T ln2 above; continuous at T_c.
double free_energy_rem(double T);

// Transverse-field paramagnet: -T ln(2 cosh(gamma/T)), evaluated in
// overflow-safe form; analytic T -> 0 limit is -gamma.
double free_energy_para(double T, double gamma);

// First-order line gamma*(T) solving free_energy_rem(T) =
// free_energy_para(T, gamma). Exact value sqrt(ln2) at T = 0; bracketed
// bisection + secant polish elsewhere (tolerance 1e-10).
double transition_gamma(double T);

enum class Phase { kFrozenClassical, kUnfrozenClassical, kQuantumParamagnet };
const char* phase_name(Phase phase);

struct PhasePoint {
  double temperature = 0.0;
  double gamma = 0.0;
  Phase label = Phase::kFrozenClassical;
  double free_energy_density = 0.0;
  double f_rem = 0.0;
  double f_para = 0.0;
};

// Label = argmin of the candidate free energies (classical wins ties).
PhasePoint classify(double T, double gamma);

// Second-order branch around gamma = 0 for an extensive level with intensive
// energy eps_i < 0: eps_i + gamma^2 / (n eps_i).
double perturbed_energy_classical(double eps_i, double gamma, int n);

// Branch around the paramagnet: -gamma - 1/(2 n gamma), gamma > 0.
double perturbed_energy_quantum(double gamma, int n);

// Two-level avoided-crossing model between the classical ground state (energy
// e_classical, extensive and negative) and the paramagnet level -gamma*n.
struct CrossingModel {
  double e_classical;  // E0 < 0, extensive
  int n;
  double overlap_sq;   // <SG|QP>^2, default 2^-n

  CrossingModel(double e0, int spins);
  CrossingModel(double e0, int spins, double overlap);
};

// gap(gamma) = sqrt((gamma n + E0)^2 - 4 E0 gamma n overlap_sq). Strictly
// positive for overlap_sq > 0; |gamma n + E0| when the vacua are orthogonal.
double two_level_gap(const CrossingModel& model, double gamma);

struct MinGapPrediction {
  double gap;         // 2 |E0| 2^(-n/2)
  double gamma_star;  // |E0| / n
};
MinGapPrediction min_gap_prediction(double e_classical, int n);

// tau = c / gap^2 with the convention c = 1; meaningful for relative scaling
// between sizes, never as an absolute runtime.
double annealing_time_estimate(double min_gap);

}  // namespace qrem::theory
