#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

namespace qrem::par {

// Global worker budget. 0 = hardware concurrency. Owned by the CLI layer;
// library code only reads it.
int max_threads();
void set_max_threads(int n);

// Fixed block geometry for every reduction in the project. Results must be
// bit-identical for any thread count, so partial sums are always formed per
// block of kBlock elements and accumulated in block order. Work smaller than
// one block runs inline on the calling thread.
inline constexpr std::size_t kBlock = 1 << 14;

// Marks the current thread as already parallel (ensemble workers, helper
// threads). parallel_for runs serially inside such a scope instead of
// oversubscribing.
class ScopedSerial {
 public:
  ScopedSerial();
  ~ScopedSerial();
  ScopedSerial(const ScopedSerial&) = delete;
  ScopedSerial& operator=(const ScopedSerial&) = delete;

 private:
  bool previous_;
};

namespace detail {
bool serial_context();
// Spawns helpers and pulls kBlock chunks; only used when several chunks of
// real work amortize the thread cost.
void run_chunked(std::size_t count,
                 const std::function<void(std::size_t, std::size_t)>& fn);
}  // namespace detail

// Runs fn(begin, end) over [0, count) in kBlock-sized chunks. The chunk
// decomposition is fixed; only the scheduling depends on the thread count.
template <class F>
void parallel_for(std::size_t count, F&& fn) {
  if (count == 0) return;
  if (count <= kBlock || detail::serial_context() || max_threads() <= 1) {
    fn(std::size_t{0}, count);
    return;
  }
  detail::run_chunked(count, fn);
}

// Deterministic reductions (block partials summed in index order).
double dot(std::span<const double> x, std::span<const double> y);
double norm(std::span<const double> x);

// y += a*x and x *= a, elementwise.
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  double* out = y.data();
  const double* in = x.data();
  parallel_for(x.size(), [a, in, out](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] += a * in[i];
  });
}

inline void scale(std::span<double> x, double a) {
  double* out = x.data();
  parallel_for(x.size(), [a, out](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] *= a;
  });
}

}  // namespace qrem::par
