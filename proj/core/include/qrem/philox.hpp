#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace qrem {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Stateless: every 128-bit block is a pure function of (counter, key), so any
// single draw can be regenerated in isolation and block-parallel generation is
// independent of the work partition.
struct Philox4x32 {
  static constexpr uint32_t kMul0 = 0xD2511F53u;
  static constexpr uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<uint32_t, 4> generate(std::array<uint32_t, 4> ctr,
                                          std::array<uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const uint64_t p0 = static_cast<uint64_t>(kMul0) * ctr[0];
      const uint64_t p1 = static_cast<uint64_t>(kMul1) * ctr[2];
      const uint32_t lo0 = static_cast<uint32_t>(p0);
      const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
      const uint32_t lo1 = static_cast<uint32_t>(p1);
      const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

// One 128-bit block keyed by (seed, stream, index), split into two u64 words.
inline std::array<uint64_t, 2> philox_block(uint64_t seed, uint64_t stream,
                                            uint64_t index) {
  const std::array<uint32_t, 4> ctr = {
      static_cast<uint32_t>(index), static_cast<uint32_t>(index >> 32),
      static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)};
  const std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed),
                                       static_cast<uint32_t>(seed >> 32)};
  const auto out = Philox4x32::generate(ctr, key);
  return {out[0] | (static_cast<uint64_t>(out[1]) << 32),
          out[2] | (static_cast<uint64_t>(out[3]) << 32)};
}

// Strictly inside (0, 1): 53-bit mantissa centered on half-steps, never 0 or 1.
inline double unit_double(uint64_t word) {
  return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal draw via the Box-Muller cosine branch. Fixed so that tables
// regenerate bit-identically for a given (seed, stream, index) on any host
// with IEEE-754 doubles and the same libm semantics.
inline double philox_gaussian(uint64_t seed, uint64_t stream, uint64_t index) {
  const auto block = philox_block(seed, stream, index);
  const double u1 = unit_double(block[0]);
  const double u2 = unit_double(block[1]);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Stream ids. Energies use stream 0; solver start vectors fold the bit
// pattern of gamma into the stream so every (seed, gamma) pair gets its own
// reproducible vector.
inline constexpr uint64_t kEnergyStream = 0;

inline uint64_t start_vector_stream(double gamma) {
  uint64_t bits;
  static_assert(sizeof(bits) == sizeof(gamma));
  __builtin_memcpy(&bits, &gamma, sizeof(bits));
  return bits ^ 0x9E3779B97F4A7C15ull;
}

}  // namespace qrem
