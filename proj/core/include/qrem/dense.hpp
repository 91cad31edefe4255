#pragma once

#include <vector>

#include "qrem/hamiltonian.hpp"

namespace qrem {

struct DenseOptions {
  int max_n = 14;  // refuse to materialize 2^n x 2^n beyond this
};

// Brute-force reference: builds the full symmetric matrix and returns all 2^n
// eigenvalues, ascending. Deliberately a separate code path from the Krylov
// solver (explicit assembly + LAPACK) so the two can check each other.
std::vector<double> dense_spectrum(const HamiltonianView& h,
                                   const DenseOptions& opts = {});

// Full eigensystem for small n; column i of `vectors` (length 2^n) pairs with
// eigenvalue i. Used by overlap diagnostics and tests.
struct DenseEigensystem {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};
DenseEigensystem dense_eigensystem(const HamiltonianView& h,
                                   const DenseOptions& opts = {});

}  // namespace qrem
