#include "qrem/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace qrem::par {
namespace {

int g_max_threads = 0;
thread_local bool t_serial = false;

}  // namespace

int max_threads() {
  if (g_max_threads > 0) return g_max_threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_max_threads(int n) { g_max_threads = n; }

ScopedSerial::ScopedSerial() : previous_(t_serial) { t_serial = true; }
ScopedSerial::~ScopedSerial() { t_serial = previous_; }

namespace detail {

bool serial_context() { return t_serial; }

void run_chunked(std::size_t count,
                 const std::function<void(std::size_t, std::size_t)>& fn) {
  const std::size_t chunks = (count + kBlock - 1) / kBlock;
  std::atomic<std::size_t> cursor{0};
  auto pull = [&] {
    ScopedSerial guard;  // no nested spawning
    while (true) {
      const std::size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
      if (i >= chunks) break;
      fn(i * kBlock, std::min(count, (i + 1) * kBlock));
    }
  };
  const std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(max_threads()), chunks);
  std::vector<std::thread> helpers;
  helpers.reserve(nthreads - 1);
  for (std::size_t i = 1; i < nthreads; ++i) helpers.emplace_back(pull);
  pull();
  for (auto& t : helpers) t.join();
}

}  // namespace detail

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t count = x.size();
  if (count <= kBlock) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += x[i] * y[i];
    return s;
  }
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
  const double* xd = x.data();
  const double* yd = y.data();
  double* pd = partial.data();
  parallel_for(count, [xd, yd, pd](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin / kBlock; b * kBlock < end; ++b) {
      const std::size_t lo = std::max(begin, b * kBlock);
      const std::size_t hi = std::min(end, (b + 1) * kBlock);
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += xd[i] * yd[i];
      pd[b] += s;
    }
  });
  // Fixed accumulation order: block index, independent of scheduling.
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

}  // namespace qrem::par
