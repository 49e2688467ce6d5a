#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
// pure function of (key, counter), so any path of any stream can be
// regenerated independently of how the work was split across threads.

#include "basket_taylor/gaussian_moments.hpp"

#include <array>
#include <cstdint>
#include <span>

namespace basket_taylor {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox4x32(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}
    explicit Philox4x32(Key key) : key_(key) {}

    Counter operator()(Counter ctr) const {
        Key key = key_;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57;
    static constexpr std::uint32_t kW0 = 0x9E3779B9;
    static constexpr std::uint32_t kW1 = 0xBB67AE85;

    Key key_;
};

/// Uniform in the open interval (0, 1) from the top 52 bits of a 64-bit word.
/// With 53 bits the largest value would round to exactly 1.
inline double to_open_unit(std::uint64_t bits) { return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52; }

/// Deterministic standard normals for one simulated path: the k-th normal of
/// `path` in stream `stream` depends only on (seed, stream, path, k).
inline void path_normals(const Philox4x32& gen, std::uint32_t stream, std::uint64_t path, std::span<double> out) {
    for (std::size_t k = 0; k < out.size(); k += 2) {
        const auto block = static_cast<std::uint32_t>(k / 2);
        const auto r = gen({static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32), block, stream});
        const std::uint64_t w0 = (static_cast<std::uint64_t>(r[1]) << 32) | r[0];
        const std::uint64_t w1 = (static_cast<std::uint64_t>(r[3]) << 32) | r[2];
        out[k] = norm_inv_cdf(to_open_unit(w0));
        if (k + 1 < out.size()) out[k + 1] = norm_inv_cdf(to_open_unit(w1));
    }
}

}  // namespace basket_taylor
