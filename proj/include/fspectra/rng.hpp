#pragma once
// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// Every random entry is a pure function of (seed, counter), so samples do
// not depend on evaluation order or thread count. Streams used here:
//   key     = seed (64 bits split into two 32-bit words)
//   counter = (k, l, trial_lo, trial_hi) for the Y-field entry at sorted (k, l).

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace fspectra {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

  static Key key_from_seed(std::uint64_t seed) {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Counter single_round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }
};

/// Uniform in (0, 1): 32 random bits plus one half, scaled by 2^-32.
inline double uniform_open(std::uint32_t bits) { return (static_cast<double>(bits) + 0.5) * 0x1p-32; }

/// Uniform in (0, 1) with 53 random bits.
inline double uniform53_open(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t v = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  return (static_cast<double>(v & ((std::uint64_t{1} << 53) - 1)) + 0.5) * 0x1p-53;
}

enum class EntryLaw { gaussian, rademacher };

/// One standard variate per counter. Gaussian uses the cosine branch of
/// Box-Muller on two 53-bit uniforms; Rademacher uses the top bit of word 0.
inline double philox_variate(std::uint64_t seed, std::uint32_t c0, std::uint32_t c1, std::uint64_t stream, EntryLaw law) {
  const auto out = Philox4x32::generate({c0, c1, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
                                        Philox4x32::key_from_seed(seed));
  if (law == EntryLaw::rademacher) return (out[0] >> 31) ? 1.0 : -1.0;
  const double u1 = uniform53_open(out[0], out[1]);
  const double u2 = uniform53_open(out[2], out[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace fspectra
