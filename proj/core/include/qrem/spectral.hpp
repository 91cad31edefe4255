#pragma once

#include <optional>
#include <vector>

#include "qrem/hamiltonian.hpp"

namespace qrem {

struct LanczosOptions {
  int k = 1;                 // number of lowest eigenpairs
  double tol = 1e-10;        // relative: residual <= tol * (|lambda| + ||H||est)
  int max_basis = 400;       // thick-restart cap on retained vectors
  long max_iterations = 100000;  // total matvecs across restarts
  bool want_vectors = false;
  uint64_t start_seed = 0;   // start vector keyed on (start_seed, gamma)
  int check_interval = 5;

  // Optional warm start (previous Ritz vectors from a nearby gamma). The
  // normalized sum seeds the Krylov space; empty means the deterministic
  // pseudo-random start.
  const std::vector<std::vector<double>>* warm_start = nullptr;
};

struct SpectrumResult {
  std::vector<double> eigenvalues;    // ascending
  std::vector<std::vector<double>> eigenvectors;  // filled iff want_vectors
  std::vector<double> residual_norms;
  long iterations = 0;                // matvec count
  bool converged = true;
  double norm_estimate = 0.0;
  // Cluster id per eigenvalue; members of a near-degenerate cluster (closer
  // than 10*tol*||H||est) share an id, ordering inside a cluster is not
  // resolved.
  std::vector<int> degenerate_cluster;
};

// Lowest-k eigenpairs by Lanczos with full (two-pass) reorthogonalization and
// thick restarts. Near-degenerate pairs at the avoided crossing are exactly
// the regime where selective schemes produce ghosts, so every new direction
// is orthogonalized against the whole retained basis.
//
// Throws ValidationError for bad k/tol. On non-convergence the result is
// returned with converged=false and best-effort residuals.
SpectrumResult lowest_eigenpairs(const HamiltonianView& h,
                                 const LanczosOptions& opts = {});

// Deterministic unit start vector for (seed, gamma).
std::vector<double> deterministic_start_vector(uint64_t dim, uint64_t seed,
                                               double gamma);

}  // namespace qrem
