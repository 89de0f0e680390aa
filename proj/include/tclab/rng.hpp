// Counter-based random streams (Philox4x32-10) for reproducible parallel
// Monte Carlo. Every draw is a pure function of (seed, stream, block), so
// batch results do not depend on evaluation order or thread count.
//
// Layout: key = 64-bit seed split into two 32-bit words, counter =
// [block_lo, block_hi, stream_lo, stream_hi]. One block yields four 32-bit
// words = two uniforms = one Box-Muller pair of standard normals.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

namespace tclab {

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         std::array<std::uint32_t, 2>& key) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
}

}  // namespace detail

/// Philox4x32 with 10 rounds; returns the four output words for one counter.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) detail::philox_round(ctr, key);
    return ctr;
}

/// Raw 128-bit block for (seed, stream, block), packed as two 64-bit words.
inline std::pair<std::uint64_t, std::uint64_t> random_block(std::uint64_t seed,
                                                            std::uint64_t stream,
                                                            std::uint64_t block) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    const auto out = philox4x32(ctr, key);
    return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
            (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

/// Maps a 64-bit word to (0,1); never returns 0 or 1 exactly. Uses 52 input
/// bits: with 53 the top value 1 - 2^-54 is a rounding tie that lands on 1.0.
inline double to_unit_interval(std::uint64_t x) {
    return static_cast<double>(x >> 12) * 0x1.0p-52 + 0x1.0p-53;
}

/// Two uniforms in (0,1) from one counter block.
inline std::pair<double, double> uniform_pair(std::uint64_t seed, std::uint64_t stream,
                                              std::uint64_t block) {
    const auto [a, b] = random_block(seed, stream, block);
    return {to_unit_interval(a), to_unit_interval(b)};
}

/// One Box-Muller pair of independent standard normals per counter block.
inline std::pair<double, double> gaussian_pair(std::uint64_t seed, std::uint64_t stream,
                                               std::uint64_t block) {
    const auto [u1, u2] = uniform_pair(seed, stream, block);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

/// SplitMix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

/// Child seed for batch element `index` under a root seed. Distinct indices
/// give distinct keys, so parallel paths use non-overlapping Philox streams.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    return mix64(root + 0x9E3779B97F4A7C15ull * (index + 1));
}

/// Sequential view over one (seed, stream): hands out uniforms/normals in
/// block order. Equivalent to calling the pure functions with an advancing
/// block counter.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    double uniform() {
        if (have_u_) {
            have_u_ = false;
            return spare_u_;
        }
        auto [a, b] = uniform_pair(seed_, stream_, block_++);
        spare_u_ = b;
        have_u_ = true;
        return a;
    }

    double gaussian() {
        if (have_g_) {
            have_g_ = false;
            return spare_g_;
        }
        auto [a, b] = gaussian_pair(seed_, stream_, block_++);
        spare_g_ = b;
        have_g_ = true;
        return a;
    }

    std::uint64_t block() const { return block_; }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    double spare_u_ = 0.0, spare_g_ = 0.0;
    bool have_u_ = false, have_g_ = false;
};

}  // namespace tclab
