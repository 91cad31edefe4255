#include <cmath>

#include "doctest.h"
#include "qrem/dense.hpp"
#include "qrem/parallel.hpp"
#include "qrem/philox.hpp"
#include "qrem/spectral.hpp"
#include "test_util.hpp"

using namespace qrem;

namespace {

std::vector<double> random_state(uint64_t dim, uint64_t seed) {
  std::vector<double> x(dim);
  for (uint64_t i = 0; i < dim; ++i) x[i] = philox_gaussian(seed, 99, i);
  return x;
}

}  // namespace

TEST_CASE("apply_hamiltonian reproduces matrix columns at n=1") {
  const EnergyTable t = EnergyTable::from_values(1, 0, {0.7, -0.4});
  HamiltonianView h(t, 1.3);
  std::vector<double> x = {1.0, 0.0}, y(2);
  apply_hamiltonian<double>(h, x, y);
  CHECK(y[0] == doctest::Approx(0.7));
  CHECK(y[1] == doctest::Approx(1.3));
}

TEST_CASE("apply_hamiltonian is pure hypercube adjacency at zero energies") {
  const EnergyTable t = EnergyTable::from_values(2, 0, {0, 0, 0, 0});
  HamiltonianView h(t, 1.0);
  std::vector<double> x = {1, 0, 0, 0}, y(4);
  apply_hamiltonian<double>(h, x, y);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 1.0);
  CHECK(y[2] == 1.0);
  CHECK(y[3] == 0.0);
}

TEST_CASE("apply_hamiltonian rejects dimension mismatch") {
  const EnergyTable t = EnergyTable::sample({3, 1, 0.0});
  HamiltonianView h(t, 0.5);
  std::vector<double> x(4), y(8);
  CHECK_THROWS_AS(apply_hamiltonian<double>(h, x, y), ValidationError);
}

TEST_CASE("operator is symmetric in the bilinear form") {
  for (int n : {2, 5, 8, 12}) {
    const EnergyTable t = EnergyTable::sample({n, 11, 0.0});
    HamiltonianView h(t, 0.9);
    const uint64_t dim = t.size();
    const auto x = random_state(dim, 5);
    const auto y = random_state(dim, 6);
    std::vector<double> hx(dim), hy(dim);
    apply_hamiltonian<double>(h, x, hx);
    apply_hamiltonian<double>(h, y, hy);
    const double lhs = par::dot(y, hx);
    const double rhs = par::dot(hy, x);
    const double scale =
        par::norm(x) * par::norm(y) * h.norm_estimate();
    CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
  }
}

TEST_CASE("analytic two-level problem") {
  const EnergyTable t = EnergyTable::from_values(1, 0, {-1.0, 1.0});
  HamiltonianView h(t, 1.0);
  LanczosOptions opts;
  opts.k = 1;
  const SpectrumResult low = lowest_eigenpairs(h, opts);
  CHECK(low.eigenvalues[0] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));

  const auto all = dense_spectrum(h);
  REQUIRE(all.size() == 2);
  CHECK(all[0] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
  CHECK(all[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("gamma = 0 spectrum is the sorted table") {
  const EnergyTable t = EnergyTable::sample({8, 3, 0.0});
  HamiltonianView h(t, 0.0);
  LanczosOptions opts;
  opts.k = 3;
  const SpectrumResult result = lowest_eigenpairs(h, opts);
  std::vector<double> sorted(t.energies().begin(), t.energies().end());
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 3; ++i) {
    CHECK(result.eigenvalues[i] ==
          doctest::Approx(sorted[i]).epsilon(1e-11));
  }

  const auto dense = dense_spectrum(h);
  for (std::size_t i = 0; i < dense.size(); ++i) {
    CHECK(dense[i] == doctest::Approx(sorted[i]).epsilon(1e-12));
  }
}

TEST_CASE("krylov matches the dense oracle at n=10") {
  const EnergyTable t = EnergyTable::sample({10, 21, 0.0});
  HamiltonianView h(t, 0.7);
  LanczosOptions opts;
  opts.k = 4;
  const SpectrumResult result = lowest_eigenpairs(h, opts);
  const auto dense = dense_spectrum(h);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(result.eigenvalues[i] - dense[i]) < 1e-9);
  }
}

TEST_CASE("oracle equivalence across sizes and fields") {
  // The acceptance suite runs the full n <= 12 matrix; this covers the small
  // sizes densely and the largest one at the crossing itself.
  for (int n : {3, 6, 9}) {
    const EnergyTable t = EnergyTable::sample({n, 17, 0.0});
    const double gamma_star = std::abs(ground_state_energy(t).energy) / n;
    for (double gamma : {0.5 * gamma_star, gamma_star, 1.5 * gamma_star}) {
      HamiltonianView h(t, gamma);
      LanczosOptions opts;
      opts.k = 6;
      const SpectrumResult result = lowest_eigenpairs(h, opts);
      const auto dense = dense_spectrum(h);
      for (int i = 0; i < 6; ++i) {
        CHECK(std::abs(result.eigenvalues[i] - dense[i]) < 1e-9);
      }
    }
  }
  const EnergyTable t12 = EnergyTable::sample({12, 17, 0.0});
  const double gs12 = std::abs(ground_state_energy(t12).energy) / 12;
  HamiltonianView h(t12, gs12);
  LanczosOptions opts;
  opts.k = 6;
  const SpectrumResult result = lowest_eigenpairs(h, opts);
  const auto dense = dense_spectrum(h);
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(result.eigenvalues[i] - dense[i]) < 1e-9);
  }
}

TEST_CASE("dense oracle basics") {
  const EnergyTable zeros1 = EnergyTable::from_values(1, 0, {0.0, 0.0});
  const auto two = dense_spectrum(HamiltonianView(zeros1, 1.0));
  CHECK(two[0] == doctest::Approx(-1.0));
  CHECK(two[1] == doctest::Approx(1.0));

  // Two free spins in a unit field.
  const EnergyTable zeros2 = EnergyTable::from_values(2, 0, {0, 0, 0, 0});
  const auto four = dense_spectrum(HamiltonianView(zeros2, 1.0));
  REQUIRE(four.size() == 4);
  CHECK(four[0] == doctest::Approx(-2.0));
  CHECK(four[1] == doctest::Approx(0.0));
  CHECK(four[2] == doctest::Approx(0.0));
  CHECK(four[3] == doctest::Approx(2.0));

  // Off-diagonal part is traceless.
  const EnergyTable t = EnergyTable::sample({6, 5, 0.0});
  const auto all = dense_spectrum(HamiltonianView(t, 0.8));
  double trace = 0.0, diag = 0.0;
  for (double v : all) trace += v;
  for (double e : t.energies()) diag += e;
  CHECK(trace == doctest::Approx(diag).epsilon(1e-9));

  CHECK_THROWS_AS(dense_spectrum(HamiltonianView(t, 0.8), DenseOptions{5}),
                  CapacityError);
}

TEST_CASE("residuals, orthonormality and cluster flags") {
  const EnergyTable t = EnergyTable::sample({9, 8, 0.0});
  HamiltonianView h(t, 0.6);
  LanczosOptions opts;
  opts.k = 5;
  opts.want_vectors = true;
  const SpectrumResult result = lowest_eigenpairs(h, opts);
  REQUIRE(result.eigenvectors.size() == 5);

  for (int i = 0; i < 5; ++i) {
    CHECK(result.residual_norms[i] <=
          opts.tol * (std::abs(result.eigenvalues[i]) + result.norm_estimate));
    for (int j = 0; j <= i; ++j) {
      const double overlap = par::dot(result.eigenvectors[i],
                                      result.eigenvectors[j]);
      CHECK(std::abs(overlap - (i == j ? 1.0 : 0.0)) < 1e-8);
    }
    if (i > 0) CHECK(result.eigenvalues[i] >= result.eigenvalues[i - 1]);
  }

  // A near-degenerate pair (closer than 10 * tol * ||H||) is flagged as one
  // cluster. The pair is split by 1e-9 so both members stay individually
  // resolvable by the iteration.
  std::vector<double> values(16, 1.0);
  values[3] = -2.0;
  values[9] = -2.0 + 1e-9;
  values[5] = -1.0;
  const EnergyTable degenerate = EnergyTable::from_values(4, 0, values);
  LanczosOptions dopts;
  dopts.k = 3;
  const SpectrumResult dres =
      lowest_eigenpairs(HamiltonianView(degenerate, 0.0), dopts);
  CHECK(dres.eigenvalues[1] - dres.eigenvalues[0] ==
        doctest::Approx(1e-9).epsilon(0.1));
  CHECK(dres.degenerate_cluster[0] == dres.degenerate_cluster[1]);
  CHECK(dres.degenerate_cluster[2] != dres.degenerate_cluster[1]);
}

TEST_CASE("variational bounds on the ground state") {
  for (int n : {8, 10, 12}) {
    for (double gamma : {0.1, 0.5, 1.0, 2.0}) {
      const EnergyTable t = EnergyTable::sample({n, 2, 0.0});
      HamiltonianView h(t, gamma);
      LanczosOptions opts;
      opts.k = 1;
      const SpectrumResult result = lowest_eigenpairs(h, opts);
      const double lambda0 = result.eigenvalues[0];
      const double slack = 1e-9 * h.norm_estimate();
      CHECK(lambda0 <= ground_state_energy(t).energy + slack);
      CHECK(lambda0 <= -gamma * n + slack);
    }
  }
}

TEST_CASE("eigenvalues are Lipschitz in gamma") {
  const EnergyTable t = EnergyTable::sample({10, 4, 0.0});
  const double delta = 0.05;
  LanczosOptions opts;
  opts.k = 2;
  SpectrumResult prev = lowest_eigenpairs(HamiltonianView(t, 0.0), opts);
  for (int i = 1; i <= 20; ++i) {
    const SpectrumResult cur =
        lowest_eigenpairs(HamiltonianView(t, i * delta), opts);
    for (int lvl = 0; lvl < 2; ++lvl) {
      const double drift = std::abs(cur.eigenvalues[lvl] -
                                    prev.eigenvalues[lvl]);
      const double slack = 2.0 * opts.tol *
                           (std::abs(cur.eigenvalues[lvl]) +
                            cur.norm_estimate);
      CHECK(drift <= t.n() * delta + slack);
    }
    prev = cur;
  }
}

TEST_CASE("warm starts reproduce the cold answer faster") {
  const EnergyTable t = EnergyTable::sample({10, 13, 0.0});
  LanczosOptions opts;
  opts.k = 2;
  opts.want_vectors = true;
  const SpectrumResult first = lowest_eigenpairs(HamiltonianView(t, 0.60), opts);

  LanczosOptions warm = opts;
  warm.warm_start = &first.eigenvectors;
  const SpectrumResult warmed = lowest_eigenpairs(HamiltonianView(t, 0.62), warm);
  const SpectrumResult cold = lowest_eigenpairs(HamiltonianView(t, 0.62), opts);

  CHECK(warmed.eigenvalues[0] ==
        doctest::Approx(cold.eigenvalues[0]).epsilon(1e-10));
  CHECK(warmed.eigenvalues[1] ==
        doctest::Approx(cold.eigenvalues[1]).epsilon(1e-10));
  CHECK(warmed.iterations <= cold.iterations);
}

TEST_CASE("solver reruns are bit-identical across thread counts") {
  const EnergyTable t = EnergyTable::sample({11, 19, 0.0});
  LanczosOptions opts;
  opts.k = 2;
  par::set_max_threads(1);
  const SpectrumResult serial = lowest_eigenpairs(HamiltonianView(t, 0.8), opts);
  par::set_max_threads(4);
  const SpectrumResult threaded = lowest_eigenpairs(HamiltonianView(t, 0.8), opts);
  par::set_max_threads(0);
  CHECK(serial.eigenvalues[0] == threaded.eigenvalues[0]);
  CHECK(serial.eigenvalues[1] == threaded.eigenvalues[1]);
  CHECK(serial.iterations == threaded.iterations);
}

TEST_CASE("parameter validation and non-convergence reporting") {
  const EnergyTable t = EnergyTable::sample({4, 1, 0.0});
  HamiltonianView h(t, 0.5);
  LanczosOptions opts;
  opts.k = 16;
  CHECK_THROWS_AS(lowest_eigenpairs(h, opts), ValidationError);
  opts.k = 1;
  opts.tol = 0.0;
  CHECK_THROWS_AS(lowest_eigenpairs(h, opts), ValidationError);

  const EnergyTable big = EnergyTable::sample({10, 1, 0.0});
  LanczosOptions tight;
  tight.k = 2;
  tight.max_iterations = 4;
  const SpectrumResult result =
      lowest_eigenpairs(HamiltonianView(big, 0.7), tight);
  CHECK_FALSE(result.converged);
  REQUIRE(result.residual_norms.size() == 2);
  CHECK(result.residual_norms[0] > 0.0);
}
