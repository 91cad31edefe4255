#include "qrem/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "qrem/philox.hpp"

namespace qrem {
namespace {

// Sum of previous Ritz vectors, falling back to the pseudo-random start when
// the combination cancels.
std::vector<double> make_start_vector(const HamiltonianView& h,
                                      const LanczosOptions& opts) {
  const uint64_t dim = h.dim();
  if (opts.warm_start != nullptr && !opts.warm_start->empty()) {
    std::vector<double> v(dim, 0.0);
    bool usable = true;
    for (const auto& w : *opts.warm_start) {
      if (w.size() != dim) {
        usable = false;
        break;
      }
      par::axpy(1.0, w, v);
    }
    if (usable) {
      const double nrm = par::norm(v);
      if (nrm > 1e-8) {
        par::scale(v, 1.0 / nrm);
        return v;
      }
    }
  }
  return deterministic_start_vector(dim, opts.start_seed, h.gamma);
}

struct RitzState {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

RitzState solve_projected(const Eigen::MatrixXd& T, int m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(m, m));
  return RitzState{es.eigenvalues(), es.eigenvectors()};
}

}  // namespace

std::vector<double> deterministic_start_vector(uint64_t dim, uint64_t seed,
                                               double gamma) {
  std::vector<double> v(dim);
  const uint64_t stream = start_vector_stream(gamma);
  par::parallel_for(dim, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      v[i] = philox_gaussian(seed, stream, i);
    }
  });
  par::scale(v, 1.0 / par::norm(v));
  return v;
}

SpectrumResult lowest_eigenpairs(const HamiltonianView& h,
                                 const LanczosOptions& opts) {
  const uint64_t dim = h.dim();
  const int k = opts.k;
  if (k < 1 || static_cast<uint64_t>(k) >= dim) {
    throw ValidationError("spectral: need 1 <= k < 2^n, got k=" +
                          std::to_string(k) + " at dim=" +
                          std::to_string(dim));
  }
  if (!(opts.tol > 0.0)) {
    throw ValidationError("spectral: tol must be positive");
  }

  const double norm_est = h.norm_estimate();
  const double breakdown_tol = 1e-14 * std::max(1.0, norm_est);
  const int max_m = static_cast<int>(std::min<uint64_t>(
      static_cast<uint64_t>(std::max(opts.max_basis, k + 2)), dim));
  const int keep = std::min(max_m - 2, std::max(2 * k + 2, 16));

  std::vector<std::vector<double>> basis;
  basis.reserve(static_cast<std::size_t>(max_m));
  basis.push_back(make_start_vector(h, opts));

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(max_m, max_m);
  std::vector<double> w(dim);
  std::vector<double> coeffs;

  long iterations = 0;
  int inject_count = 0;
  int j = 0;  // current column / index of the newest basis vector

  auto orthogonalize_pass = [&](std::vector<double>& target,
                                std::vector<double>& out_coeffs) {
    const int m = static_cast<int>(basis.size());
    out_coeffs.resize(m);
    for (int i = 0; i < m; ++i) out_coeffs[i] = par::dot(basis[i], target);
    for (int i = 0; i < m; ++i) {
      if (out_coeffs[i] != 0.0) par::axpy(-out_coeffs[i], basis[i], target);
    }
  };

  auto finish = [&](const RitzState& ritz, bool converged) {
    SpectrumResult result;
    result.norm_estimate = norm_est;
    result.iterations = iterations;
    result.converged = converged;
    const int m = static_cast<int>(basis.size());
    const int kk = std::min(k, m);
    result.eigenvalues.assign(ritz.values.data(), ritz.values.data() + kk);

    // Assemble Ritz vectors; needed for explicit residuals even when the
    // caller does not want the vectors back.
    std::vector<std::vector<double>> vectors(kk);
    for (int i = 0; i < kk; ++i) {
      vectors[i].assign(dim, 0.0);
      for (int col = 0; col < m; ++col) {
        const double s = ritz.vectors(col, i);
        if (s != 0.0) par::axpy(s, basis[col], vectors[i]);
      }
    }
    result.residual_norms.resize(kk);
    std::vector<double> hv(dim);
    for (int i = 0; i < kk; ++i) {
      apply_hamiltonian<double>(h, vectors[i], hv);
      ++iterations;
      par::axpy(-result.eigenvalues[i], vectors[i], hv);
      result.residual_norms[i] = par::norm(hv);
    }
    result.iterations = iterations;
    if (opts.want_vectors) result.eigenvectors = std::move(vectors);

    // Near-degenerate cluster flags.
    result.degenerate_cluster.resize(kk);
    const double cluster_tol = 10.0 * opts.tol * norm_est;
    int cluster = 0;
    result.degenerate_cluster[0] = 0;
    for (int i = 1; i < kk; ++i) {
      if (result.eigenvalues[i] - result.eigenvalues[i - 1] > cluster_tol) {
        ++cluster;
      }
      result.degenerate_cluster[i] = cluster;
    }
    return result;
  };

  while (true) {
    // One Lanczos step on basis[j].
    apply_hamiltonian<double>(h, basis[j], w);
    ++iterations;

    orthogonalize_pass(w, coeffs);
    double alpha = coeffs[j];
    std::vector<double> correction;
    orthogonalize_pass(w, correction);  // second pass: full reorthogonalization
    alpha += correction[j];
    T(j, j) = alpha;

    const double beta = par::norm(w);
    const int m = static_cast<int>(basis.size());

    const bool spanned = static_cast<uint64_t>(m) == dim;
    const bool budget_left = iterations < opts.max_iterations;
    const bool basis_full = m == max_m;
    // Projected solves cost O(m^3); space them out as the basis grows.
    const int interval = std::max(opts.check_interval, m / 8);
    const bool check_now = (j + 1) % interval == 0 || basis_full ||
                           beta <= breakdown_tol || !budget_left || spanned;

    if (check_now && m >= k) {
      RitzState ritz = solve_projected(T, m);
      bool ok = true;
      for (int i = 0; i < k; ++i) {
        const double bound =
            opts.tol * (std::abs(ritz.values[i]) + norm_est);
        const double est = beta * std::abs(ritz.vectors(m - 1, i));
        if (est > bound) {
          ok = false;
          break;
        }
      }
      if (ok || spanned) return finish(ritz, true);
      if (!budget_left) return finish(ritz, false);

      if (basis_full) {
        // Thick restart: keep the lowest Ritz vectors plus the residual
        // direction; the kept block couples to it through the last row of
        // the Ritz basis.
        std::vector<std::vector<double>> kept(keep);
        for (int i = 0; i < keep; ++i) {
          kept[i].assign(dim, 0.0);
          for (int col = 0; col < m; ++col) {
            const double s = ritz.vectors(col, i);
            if (s != 0.0) par::axpy(s, basis[col], kept[i]);
          }
        }
        Eigen::MatrixXd Tnew = Eigen::MatrixXd::Zero(max_m, max_m);
        for (int i = 0; i < keep; ++i) {
          Tnew(i, i) = ritz.values[i];
          const double b = beta * ritz.vectors(m - 1, i);
          Tnew(i, keep) = Tnew(keep, i) = b;
        }
        T = std::move(Tnew);
        basis = std::move(kept);
        if (beta > breakdown_tol) {
          par::scale(w, 1.0 / beta);
          basis.push_back(w);
        } else {
          std::vector<double> fresh = deterministic_start_vector(
              dim,
              opts.start_seed + 0x9E37 + static_cast<uint64_t>(++inject_count),
              h.gamma);
          std::vector<double> tmp;
          orthogonalize_pass(fresh, tmp);
          orthogonalize_pass(fresh, tmp);
          const double nrm = par::norm(fresh);
          par::scale(fresh, 1.0 / nrm);
          basis.push_back(std::move(fresh));
          for (int i = 0; i < keep; ++i) T(i, keep) = T(keep, i) = 0.0;
        }
        j = keep;
        continue;
      }
    }

    if (beta <= breakdown_tol) {
      // Invariant subspace found before convergence: inject a fresh
      // deterministic direction orthogonal to everything so the iteration
      // can explore the complement. The coupling in T stays zero.
      std::vector<double> fresh = deterministic_start_vector(
          dim,
          opts.start_seed + 0x9E37 + static_cast<uint64_t>(++inject_count),
          h.gamma);
      std::vector<double> tmp;
      orthogonalize_pass(fresh, tmp);
      orthogonalize_pass(fresh, tmp);
      const double nrm = par::norm(fresh);
      if (nrm < 1e-8) {
        // Nothing orthogonal left (should only happen at m == dim, handled
        // above); return what we have.
        RitzState ritz = solve_projected(T, m);
        return finish(ritz, true);
      }
      par::scale(fresh, 1.0 / nrm);
      basis.push_back(std::move(fresh));
      T(j, j + 1) = T(j + 1, j) = 0.0;
    } else {
      par::scale(w, 1.0 / beta);
      basis.push_back(w);
      T(j, j + 1) = T(j + 1, j) = beta;
    }
    ++j;
  }
}

}  // namespace qrem
