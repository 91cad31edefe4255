#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qrem/errors.hpp"

namespace qrem {

// Spin encoding: configuration index bit b holds spin b, bit value 0 means
// sigma^z = +1. Energies are exchangeable across configurations, so any
// consistent convention gives the same ensemble.
struct Configuration {
  uint64_t index = 0;
};

struct ModelParams {
  int n = 0;            // spin count, 1..30
  uint64_t seed = 0;    // reproducibility seed
  double gamma = 0.0;   // transverse field strength, >= 0

  // Throws ValidationError on bad ranges, CapacityError when the table
  // would not fit in budget_bytes.
  void validate(uint64_t budget_bytes = kDefaultBudgetBytes) const;

  static constexpr uint64_t kDefaultBudgetBytes = 8ull << 30;
};

// The quenched landscape of one sample: 2^n i.i.d. Gaussian energies with
// mean 0 and variance n/2 (extensive convention E = n*e). Immutable after
// construction; safe to share across threads.
class EnergyTable {
 public:
  // Deterministic function of (n, seed); independent of how generation is
  // partitioned across threads.
  static EnergyTable sample(const ModelParams& params,
                            uint64_t budget_bytes = ModelParams::kDefaultBudgetBytes);

  // Adopts explicit values (tests, file import). Length must be exactly 2^n.
  static EnergyTable from_values(int n, uint64_t seed,
                                 std::vector<double> energies);

  int n() const { return n_; }
  uint64_t seed() const { return seed_; }
  uint64_t size() const { return energies_.size(); }
  std::span<const double> energies() const { return energies_; }
  double operator[](uint64_t index) const { return energies_[index]; }
  double max_abs_energy() const { return max_abs_; }

 private:
  EnergyTable(int n, uint64_t seed, std::vector<double> energies);

  int n_;
  uint64_t seed_;
  double max_abs_;
  std::vector<double> energies_;
};

// Regenerates a single energy value without materializing the table.
double rem_energy(int n, uint64_t seed, uint64_t index);

// Single spin flip. Involution: neighbor(neighbor(c, b), b) == c.
Configuration neighbor(Configuration config, int bit, int n);
inline uint64_t neighbor_index(uint64_t index, int bit) {
  return index ^ (uint64_t{1} << bit);
}

struct GroundState {
  Configuration config;
  double energy = 0.0;
};

// Argmin over the table; ties break toward the lowest index.
GroundState ground_state_energy(const EnergyTable& table);

// Flat binary format: magic "QREMTBL\0", u32 version, u32 n, u64 seed,
// then 2^n little-endian doubles. Round-trips bit-exactly.
void write_energy_table(const std::filesystem::path& path,
                        const EnergyTable& table);
EnergyTable read_energy_table(const std::filesystem::path& path);

}  // namespace qrem
