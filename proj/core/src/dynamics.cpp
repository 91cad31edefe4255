#include "qrem/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "qrem/hamiltonian.hpp"
#include "qrem/spectral.hpp"

namespace qrem {

using Complex = std::complex<double>;

Schedule Schedule::linear(double tau, double gamma_max) {
  if (!(tau > 0.0)) throw ValidationError("dynamics: need tau > 0");
  if (!(gamma_max > 0.0)) {
    throw ValidationError("dynamics: need gamma_max > 0");
  }
  Schedule s;
  s.total_time = tau;
  s.gamma_max = gamma_max;
  s.profile = [gamma_max](double x) { return gamma_max * (1.0 - x); };
  return s;
}

Schedule Schedule::constant(double tau, double gamma) {
  if (!(tau > 0.0)) throw ValidationError("dynamics: need tau > 0");
  if (gamma < 0.0) throw ValidationError("dynamics: need gamma >= 0");
  Schedule s;
  s.total_time = tau;
  s.gamma_max = gamma;
  s.profile = [gamma](double) { return gamma; };
  return s;
}

namespace {

double norm_of(std::span<const Complex> v) {
  double s = 0.0;
  for (const Complex& c : v) s += std::norm(c);
  return std::sqrt(s);
}

// One unitary step psi <- exp(-i dt H) psi via Hermitian Lanczos on the
// current state. Returns the truncation-error estimate.
double krylov_exp_step(const HamiltonianView& h, double dt,
                       std::vector<Complex>& psi, int max_m) {
  const uint64_t dim = h.dim();
  const double beta0 = norm_of(psi);
  if (beta0 == 0.0) throw NumericalError("dynamics: zero state");

  const int m_cap = static_cast<int>(
      std::min<uint64_t>(static_cast<uint64_t>(max_m), dim));
  std::vector<std::vector<Complex>> basis;
  basis.reserve(m_cap);
  basis.emplace_back(psi);
  for (auto& c : basis[0]) c /= beta0;

  std::vector<double> alpha, beta;  // T is real tridiagonal for Hermitian H
  std::vector<Complex> w(dim);
  int m = 0;
  bool exhausted = false;  // happy breakdown: Krylov space is invariant

  for (int j = 0; j < m_cap; ++j) {
    apply_hamiltonian<Complex>(h, basis[j], w);
    // Orthogonalize against the whole small basis (classical Gram-Schmidt,
    // one corrective sweep).
    Complex aj{};
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        Complex c{};
        for (uint64_t a = 0; a < dim; ++a) {
          c += std::conj(basis[i][a]) * w[a];
        }
        if (i == j) aj += c;
        for (uint64_t a = 0; a < dim; ++a) w[a] -= c * basis[i][a];
      }
    }
    alpha.push_back(aj.real());
    m = j + 1;
    const double b = norm_of(w);
    if (b < 1e-12 * std::max(1.0, h.norm_estimate())) {
      exhausted = true;
      break;
    }
    if (j + 1 == m_cap) {
      beta.push_back(b);  // residual coupling used for the error estimate
      break;
    }
    beta.push_back(b);
    for (auto& c : w) c /= b;
    basis.push_back(w);
  }

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    T(i, i) = alpha[i];
    if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  const Eigen::VectorXd& theta = es.eigenvalues();
  const Eigen::MatrixXd& S = es.eigenvectors();

  // y = S exp(-i dt Theta) S^T e1, scaled back to the input norm.
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(m);
  for (int i = 0; i < m; ++i) {
    const Complex phase = std::exp(Complex(0.0, -dt * theta[i])) * S(0, i);
    for (int r = 0; r < m; ++r) y[r] += S(r, i) * phase;
  }
  y *= beta0;

  for (uint64_t a = 0; a < dim; ++a) {
    Complex acc{};
    for (int j = 0; j < m; ++j) acc += y[j] * basis[j][a];
    psi[a] = acc;
  }

  if (exhausted || static_cast<uint64_t>(m) == dim) return 0.0;
  // Residual coupling out of the Krylov space, integrated over the step.
  return std::abs(beta.back() * y[m - 1]) * dt / std::max(beta0, 1e-300);
}

}  // namespace

AnnealOutcome evolve(const EnergyTable& table, const Schedule& schedule,
                     const EvolveOptions& opts,
                     std::vector<Complex>* final_state) {
  if (table.n() > opts.max_n) {
    throw CapacityError("dynamics: n=" + std::to_string(table.n()) +
                        " exceeds the propagation cap of " +
                        std::to_string(opts.max_n));
  }
  if (!(opts.dt_control > 0.0)) {
    throw ValidationError("dynamics: dt control must be positive");
  }
  const double tau = schedule.total_time;
  const uint64_t dim = table.size();

  // Initial state: ground state of the opening Hamiltonian.
  const double gamma0 = schedule.gamma_at(0.0);
  HamiltonianView h0(table, gamma0);
  LanczosOptions ground_opts;
  ground_opts.k = 1;
  ground_opts.want_vectors = true;
  ground_opts.start_seed = table.seed();
  const SpectrumResult ground = lowest_eigenpairs(h0, ground_opts);
  if (!ground.converged) {
    throw NumericalError("dynamics: initial eigensolve did not converge");
  }
  std::vector<Complex> psi(dim);
  for (uint64_t i = 0; i < dim; ++i) psi[i] = ground.eigenvectors[0][i];

  const uint64_t sg_index = ground_state_energy(table).config.index;

  // Fixed step count from the worst-case operator norm over the schedule.
  const double norm_bound =
      table.max_abs_energy() + schedule.gamma_max * table.n();
  const long steps = std::max<long>(
      1, static_cast<long>(std::ceil(tau * norm_bound / opts.dt_control)));
  const double dt = tau / static_cast<double>(steps);

  long performed = 0;
  std::vector<Complex> saved;
  for (long s = 0; s < steps; ++s) {
    const double t_mid = (static_cast<double>(s) + 0.5) * dt;
    const double gamma = schedule.gamma_at(t_mid / tau);
    HamiltonianView h(table, gamma);

    // Subdivide the step until the Krylov truncation estimate is in budget;
    // each attempt restarts from the saved state.
    saved = psi;
    long pieces = 1;
    for (int splits = 0;; ++splits) {
      psi = saved;
      double worst = 0.0;
      for (long p = 0; p < pieces; ++p) {
        worst = std::max(
            worst, krylov_exp_step(h, dt / static_cast<double>(pieces), psi,
                                   opts.krylov_dim));
        if (worst > opts.step_error_tol) break;
      }
      if (worst <= opts.step_error_tol) break;
      if (splits >= 24) {
        throw NumericalError(
            "dynamics: step error " + std::to_string(worst) +
            " will not meet tolerance at gamma=" + std::to_string(gamma));
      }
      pieces *= 2;
    }
    performed += pieces;

    const double drift = std::abs(norm_of(psi) - 1.0);
    if (drift > opts.norm_tol) {
      throw NumericalError("dynamics: norm drift " + std::to_string(drift) +
                           " after " + std::to_string(s + 1) + " of " +
                           std::to_string(steps) + " steps");
    }
  }

  AnnealOutcome outcome;
  outcome.tau = tau;
  outcome.success_probability = std::norm(psi[sg_index]);
  outcome.norm_error = std::abs(norm_of(psi) - 1.0);
  outcome.steps = performed;
  if (final_state != nullptr) *final_state = std::move(psi);
  return outcome;
}

SuccessCurve success_curve(const EnergyTable& table,
                           std::span<const double> taus,
                           const std::function<Schedule(double)>& family,
                           const EvolveOptions& opts) {
  if (taus.empty()) {
    throw ValidationError("dynamics: tau list must be nonempty");
  }
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] > 0.0)) {
      throw ValidationError("dynamics: tau values must be positive");
    }
    if (i > 0 && taus[i] < taus[i - 1]) {
      throw ValidationError("dynamics: tau list must be sorted ascending");
    }
  }

  SuccessCurve curve;
  for (double tau : taus) {
    curve.outcomes.push_back(evolve(table, family(tau), opts));
  }

  for (std::size_t i = 0; i < curve.outcomes.size(); ++i) {
    const double s = curve.outcomes[i].success_probability;
    if (s >= 0.5) {
      if (i == 0) {
        curve.tau_half = curve.outcomes[0].tau;
      } else {
        const double s0 = curve.outcomes[i - 1].success_probability;
        const double t0 = std::log(curve.outcomes[i - 1].tau);
        const double t1 = std::log(curve.outcomes[i].tau);
        const double x = (0.5 - s0) / (s - s0);
        curve.tau_half = std::exp(t0 + x * (t1 - t0));
      }
      break;
    }
  }
  return curve;
}

}  // namespace qrem
