#pragma once

#include <array>
#include <cstdint>

#include "fdsme/grid.hpp"

namespace fdsme {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

/// Deterministic random stream of one trajectory. The key is the master
/// seed; the upper counter words hold the trajectory index and the lower
/// words a block position, so distinct (seed, index) pairs never share a
/// block. The whole state is (key, index, position), which is what a
/// checkpoint stores.
class Substream {
public:
  Substream() = default;
  Substream(std::uint64_t master_seed, std::uint64_t trajectory_index);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }
  std::uint64_t position() const { return position_; }
  void seek(std::uint64_t position) { position_ = position; }

  // Four raw 32-bit words; advances the position by one block.
  PhiloxCounter next_block();
  // Two uniforms in [0, 1) with 53-bit resolution from one block.
  std::array<double, 2> next_uniform_pair();
  // Three independent N(0, 1) draws (Box-Muller, two blocks per call).
  Vec3 next_normal3();

  bool operator==(const Substream&) const = default;

private:
  std::uint64_t seed_ = 0;
  std::uint64_t index_ = 0;
  std::uint64_t position_ = 0;
};

Substream derive_substream(std::uint64_t master_seed, std::uint64_t trajectory_index);

}  // namespace fdsme
