#include "qrem/dense.hpp"

#include <lapacke.h>

#include <string>

namespace qrem {
namespace {

std::vector<double> build_dense(const HamiltonianView& h,
                                const DenseOptions& opts) {
  if (h.n() > opts.max_n) {
    throw CapacityError("dense: n=" + std::to_string(h.n()) +
                        " exceeds the dense cap of " +
                        std::to_string(opts.max_n));
  }
  const uint64_t dim = h.dim();
  std::vector<double> a(dim * dim, 0.0);
  const std::span<const double> energies = h.table->energies();
  for (uint64_t row = 0; row < dim; ++row) {
    a[row * dim + row] = energies[row];
    for (int b = 0; b < h.n(); ++b) {
      a[row * dim + (row ^ (uint64_t{1} << b))] = h.gamma;
    }
  }
  return a;
}

std::vector<double> syev(std::vector<double>& a, uint64_t dim, char jobz) {
  std::vector<double> w(dim);
  const lapack_int info = LAPACKE_dsyevd(
      LAPACK_ROW_MAJOR, jobz, 'L', static_cast<lapack_int>(dim), a.data(),
      static_cast<lapack_int>(dim), w.data());
  if (info != 0) {
    throw NumericalError("dense: dsyevd failed with info=" +
                         std::to_string(info));
  }
  return w;
}

}  // namespace

std::vector<double> dense_spectrum(const HamiltonianView& h,
                                   const DenseOptions& opts) {
  std::vector<double> a = build_dense(h, opts);
  return syev(a, h.dim(), 'N');
}

DenseEigensystem dense_eigensystem(const HamiltonianView& h,
                                   const DenseOptions& opts) {
  const uint64_t dim = h.dim();
  std::vector<double> a = build_dense(h, opts);
  DenseEigensystem out;
  out.values = syev(a, dim, 'V');
  out.vectors.resize(dim);
  // Row-major storage: eigenvector i lives in column i.
  for (uint64_t i = 0; i < dim; ++i) {
    out.vectors[i].resize(dim);
    for (uint64_t r = 0; r < dim; ++r) {
      out.vectors[i][r] = a[r * dim + i];
    }
  }
  return out;
}

}  // namespace qrem
