#pragma once

#include <complex>
#include <span>

#include "qrem/errors.hpp"
#include "qrem/model.hpp"
#include "qrem/parallel.hpp"

namespace qrem {

// Lazy view of the 2^n x 2^n operator with diagonal E_a and off-diagonal
// +gamma between single-flip neighbors. Never materialized; matvec only.
struct HamiltonianView {
  const EnergyTable* table = nullptr;
  double gamma = 0.0;

  HamiltonianView(const EnergyTable& t, double g) : table(&t), gamma(g) {
    if (!(g >= 0.0)) {
      throw ValidationError("spectral: gamma must be >= 0, got " +
                            std::to_string(g));
    }
  }

  int n() const { return table->n(); }
  uint64_t dim() const { return table->size(); }

  // Gershgorin bound: max|E_a| + gamma*n. Used to scale residual tolerances.
  double norm_estimate() const {
    return table->max_abs_energy() + gamma * table->n();
  }
};

// y_a = E_a x_a + gamma * sum_b x_{a xor 2^b}. Works for real and complex
// states; output written disjointly per index, inputs read-only, so the
// result is independent of the block partition.
template <class Scalar>
void apply_hamiltonian(const HamiltonianView& h, std::span<const Scalar> x,
                       std::span<Scalar> y) {
  const uint64_t dim = h.dim();
  if (x.size() != dim || y.size() != dim) {
    throw ValidationError("spectral: state dimension " +
                          std::to_string(x.size()) + " != 2^n = " +
                          std::to_string(dim));
  }
  const int n = h.n();
  const double gamma = h.gamma;
  const std::span<const double> energies = h.table->energies();
  par::parallel_for(dim, [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a) {
      Scalar acc = energies[a] * x[a];
      for (int b = 0; b < n; ++b) {
        acc += gamma * x[a ^ (uint64_t{1} << b)];
      }
      y[a] = acc;
    }
  });
}

}  // namespace qrem
