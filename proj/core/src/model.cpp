#include "qrem/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "qrem/parallel.hpp"
#include "qrem/philox.hpp"

namespace qrem {

static_assert(std::endian::native == std::endian::little,
              "table files are little-endian; big-endian hosts unsupported");

void ModelParams::validate(uint64_t budget_bytes) const {
  if (n < 1 || n > 30) {
    throw ValidationError("model: n must be in [1, 30], got " +
                          std::to_string(n));
  }
  if (!(gamma >= 0.0)) {
    throw ValidationError("model: gamma must be >= 0, got " +
                          std::to_string(gamma));
  }
  const uint64_t bytes = (uint64_t{1} << n) * sizeof(double);
  if (bytes > budget_bytes) {
    throw CapacityError("model: 2^" + std::to_string(n) +
                        " energies need " + std::to_string(bytes) +
                        " bytes, budget is " + std::to_string(budget_bytes));
  }
}

EnergyTable::EnergyTable(int n, uint64_t seed, std::vector<double> energies)
    : n_(n), seed_(seed), energies_(std::move(energies)) {
  max_abs_ = 0.0;
  for (double e : energies_) max_abs_ = std::max(max_abs_, std::abs(e));
}

double rem_energy(int n, uint64_t seed, uint64_t index) {
  return std::sqrt(n / 2.0) * philox_gaussian(seed, kEnergyStream, index);
}

EnergyTable EnergyTable::sample(const ModelParams& params,
                                uint64_t budget_bytes) {
  params.validate(budget_bytes);
  const uint64_t dim = uint64_t{1} << params.n;
  std::vector<double> values(dim);
  const double sigma = std::sqrt(params.n / 2.0);
  par::parallel_for(dim, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      values[i] = sigma * philox_gaussian(params.seed, kEnergyStream, i);
    }
  });
  return EnergyTable(params.n, params.seed, std::move(values));
}

EnergyTable EnergyTable::from_values(int n, uint64_t seed,
                                     std::vector<double> energies) {
  if (n < 1 || n > 30) {
    throw ValidationError("model: n must be in [1, 30], got " +
                          std::to_string(n));
  }
  if (energies.size() != (uint64_t{1} << n)) {
    throw ValidationError("model: table for n=" + std::to_string(n) +
                          " must hold " + std::to_string(uint64_t{1} << n) +
                          " energies, got " + std::to_string(energies.size()));
  }
  return EnergyTable(n, seed, std::move(energies));
}

Configuration neighbor(Configuration config, int bit, int n) {
  if (bit < 0 || bit >= n) {
    throw ValidationError("model: flip bit " + std::to_string(bit) +
                          " out of range for n=" + std::to_string(n));
  }
  return Configuration{neighbor_index(config.index, bit)};
}

GroundState ground_state_energy(const EnergyTable& table) {
  uint64_t best = 0;
  double best_energy = table[0];
  for (uint64_t i = 1; i < table.size(); ++i) {
    if (table[i] < best_energy) {
      best_energy = table[i];
      best = i;
    }
  }
  return GroundState{Configuration{best}, best_energy};
}

namespace {

constexpr char kMagic[8] = {'Q', 'R', 'E', 'M', 'T', 'B', 'L', '\0'};
constexpr uint32_t kTableFormatVersion = 1;

}  // namespace

void write_energy_table(const std::filesystem::path& path,
                        const EnergyTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("model: cannot open " + path.string() + " for writing");
  }
  out.write(kMagic, sizeof(kMagic));
  const uint32_t version = kTableFormatVersion;
  const uint32_t n = static_cast<uint32_t>(table.n());
  const uint64_t seed = table.seed();
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&seed), sizeof(seed));
  out.write(reinterpret_cast<const char*>(table.energies().data()),
            static_cast<std::streamsize>(table.size() * sizeof(double)));
  if (!out) {
    throw Error("model: short write to " + path.string());
  }
}

EnergyTable read_energy_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("model: cannot open " + path.string());
  }
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw ValidationError("model: " + path.string() +
                          " is not an energy table file");
  }
  uint32_t version = 0;
  uint32_t n = 0;
  uint64_t seed = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  in.read(reinterpret_cast<char*>(&seed), sizeof(seed));
  if (!in || version != kTableFormatVersion) {
    throw ValidationError("model: unsupported table format version in " +
                          path.string());
  }
  if (n < 1 || n > 30) {
    throw ValidationError("model: corrupt header in " + path.string());
  }
  std::vector<double> values(uint64_t{1} << n);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!in) {
    throw ValidationError("model: truncated table in " + path.string());
  }
  return EnergyTable::from_values(static_cast<int>(n), seed,
                                  std::move(values));
}

}  // namespace qrem
