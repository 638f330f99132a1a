#ifndef COGRATE_RNG_HPP
#define COGRATE_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace cograte {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
/// pure function of (key, counter), so any frame or trial can be regenerated
/// without replaying the ones before it.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Uniform variates addressed by (seed, index, lane). Each block yields two
/// doubles with 53 random bits, open at zero: u in (0, 1].
class CounterStream {
 public:
  explicit CounterStream(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  std::array<double, 2> uniforms(std::uint64_t index, std::uint32_t lane) const {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                                  lane, 0u};
    const auto out = Philox4x32::apply(ctr, key_);
    return {to_unit(out[0], out[1]), to_unit(out[2], out[3])};
  }

  std::array<double, 4> uniforms4(std::uint64_t index, std::uint32_t lane) const {
    const auto a = uniforms(index, 2 * lane);
    const auto b = uniforms(index, 2 * lane + 1);
    return {a[0], a[1], b[0], b[1]};
  }

  /// Two independent standard normals (Box-Muller).
  std::array<double, 2> normals(std::uint64_t index, std::uint32_t lane) const {
    const auto u = uniforms(index, lane);
    const double radius = std::sqrt(-2.0 * std::log(u[0]));
    const double angle = 2.0 * std::numbers::pi * u[1];
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

 private:
  static double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
};

}  // namespace cograte

#endif  // COGRATE_RNG_HPP
