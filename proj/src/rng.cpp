#include "fdsme/rng.hpp"

#include <cmath>
#include <numbers>

namespace fdsme {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMul0, ctr[0], lo0, hi0);
    mulhilo(kMul1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

Substream::Substream(std::uint64_t master_seed, std::uint64_t trajectory_index)
    : seed_(master_seed), index_(trajectory_index), position_(0) {}

PhiloxCounter Substream::next_block() {
  const PhiloxCounter ctr{static_cast<std::uint32_t>(position_),
                          static_cast<std::uint32_t>(position_ >> 32),
                          static_cast<std::uint32_t>(index_),
                          static_cast<std::uint32_t>(index_ >> 32)};
  const PhiloxKey key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  ++position_;
  return philox4x32_10(ctr, key);
}

std::array<double, 2> Substream::next_uniform_pair() {
  const PhiloxCounter r = next_block();
  return {to_unit(r[0], r[1]), to_unit(r[2], r[3])};
}

Vec3 Substream::next_normal3() {
  const auto a = next_uniform_pair();
  const auto b = next_uniform_pair();
  // 1 - u lies in (0, 1], so the logarithm is finite.
  const double ra = std::sqrt(-2.0 * std::log(1.0 - a[0]));
  const double rb = std::sqrt(-2.0 * std::log(1.0 - b[0]));
  const double ta = 2.0 * std::numbers::pi * a[1];
  const double tb = 2.0 * std::numbers::pi * b[1];
  return Vec3(ra * std::cos(ta), ra * std::sin(ta), rb * std::cos(tb));
}

Substream derive_substream(std::uint64_t master_seed, std::uint64_t trajectory_index) {
  return Substream(master_seed, trajectory_index);
}

}  // namespace fdsme
