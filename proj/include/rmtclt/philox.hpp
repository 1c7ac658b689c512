#pragma once

// Counter-based random numbers (Philox4x32-10, Salmon et al. 2011).
//
// Every random quantity in the library is a pure function of
// (master seed, domain, replicate, index), so results do not depend on the
// order in which replicates or entries are generated.

#include <array>
#include <cmath>
#include <cstdint>

#include "rmtclt/numeric.hpp"

namespace rmtclt {

class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Block generate(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Independent random streams separated by purpose.
enum class StreamDomain : std::uint32_t {
  MatrixEntries = 0,
  Bootstrap = 1,
  Diagnostics = 2,
};

/// 128 random bits tied to one (seed, domain, replicate, index) tuple.
struct RandomBlock {
  Philox4x32::Block bits{};

  /// Uniform on [0, 1) with 53 random bits, from the first or second 64-bit half.
  double uniform(int half = 0) const {
    const std::uint64_t w = (std::uint64_t{bits[2 * half + 1]} << 32) | bits[2 * half];
    return static_cast<double>(w >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1], safe as a logarithm argument.
  double uniform_open_low(int half = 0) const { return 1.0 - uniform(half); }

  /// One standard normal by Box-Muller, consuming the whole block.
  double normal() const {
    const double r = std::sqrt(-2.0 * std::log(uniform_open_low(0)));
    return r * std::cos(2.0 * pi * uniform(1));
  }

  bool bit() const { return (bits[3] >> 31) != 0u; }
};

/// Stateless accessor for the random block at (replicate, index) under a seed.
class Substream {
 public:
  constexpr Substream(std::uint64_t seed, StreamDomain domain, std::uint32_t replicate)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        replicate_(replicate),
        domain_(static_cast<std::uint32_t>(domain)) {}

  RandomBlock at(std::uint64_t index) const {
    const Philox4x32::Block ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                                replicate_, domain_};
    return RandomBlock{Philox4x32::generate(ctr, key_)};
  }

 private:
  Philox4x32::Key key_;
  std::uint32_t replicate_;
  std::uint32_t domain_;
};

}  // namespace rmtclt
