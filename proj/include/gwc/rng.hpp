#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace gwc {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123). One
/// stream per (seed, stream id): the seed is the 64-bit key and the stream id
/// occupies the upper half of the 128-bit counter, so replicate streams never
/// overlap for fewer than 2^64 blocks each.
class philox4x32 {
public:
    using result_type = std::uint64_t;
    using counter_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          counter_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)}
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        if (used_ == 2) {
            block_ = generate(counter_, key_);
            used_ = 0;
            if (++counter_[0] == 0) {
                ++counter_[1];
            }
        }
        const auto lo = block_[2 * used_];
        const auto hi = block_[2 * used_ + 1];
        ++used_;
        return (static_cast<std::uint64_t>(hi) << 32) | lo;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Ten-round Philox bijection applied to one counter block.
    static counter_type generate(counter_type ctr, key_type key) noexcept
    {
        constexpr std::uint32_t m0 = 0xD2511F53;
        constexpr std::uint32_t m1 = 0xCD9E8D57;
        constexpr std::uint32_t w0 = 0x9E3779B9;
        constexpr std::uint32_t w1 = 0xBB67AE85;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
            key[0] += w0;
            key[1] += w1;
        }
        return ctr;
    }

private:
    key_type key_;
    counter_type counter_;
    counter_type block_{};
    int used_ = 2;
};

} // namespace gwc
