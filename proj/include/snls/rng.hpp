#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace snls {

/// Philox4x32-10 counter-based generator (Salmon et al.).
///
/// Stateless: every output block is a pure function of (key, counter), so
/// any (seed, realization, mode, step) tuple can be turned into an
/// independent stream without coordination between threads. This is what
/// makes ensemble output independent of the worker schedule.
namespace philox {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Counter round_once(const Counter& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    return Counter{
        static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0],
        static_cast<std::uint32_t>(p1),
        static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1],
        static_cast<std::uint32_t>(p0),
    };
}

inline Counter block(Counter c, Key k) {
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        c = round_once(c, k);
    }
    return c;
}

inline Key key_from_seed(std::uint64_t seed) {
    return Key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

} // namespace philox

/// u64 -> double uniform in the open interval (0, 1); never returns 0.
inline double uniform_open01(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// One standard normal deviate addressed by (seed, stream, substream, index).
/// Box-Muller on two Philox words; deterministic and order-free.
inline double standard_normal_at(std::uint64_t seed, std::uint32_t stream,
                                 std::uint32_t substream, std::uint32_t index) {
    const philox::Counter out =
        philox::block({index, substream, stream, 0u}, philox::key_from_seed(seed));
    const std::uint64_t u0 =
        (static_cast<std::uint64_t>(out[0]) << 32) | static_cast<std::uint64_t>(out[1]);
    const std::uint64_t u1 =
        (static_cast<std::uint64_t>(out[2]) << 32) | static_cast<std::uint64_t>(out[3]);
    const double r = std::sqrt(-2.0 * std::log(uniform_open01(u0)));
    return r * std::cos(2.0 * M_PI * uniform_open01(u1));
}

/// Derives the per-realization seed used by ensemble runs: realization r of
/// a run with base seed s draws from stream derive_stream_seed(s, r).
inline std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t realization) {
    const philox::Counter out = philox::block(
        {static_cast<std::uint32_t>(realization), static_cast<std::uint32_t>(realization >> 32),
         0x5eedu, 0u},
        philox::key_from_seed(base_seed));
    return (static_cast<std::uint64_t>(out[0]) << 32) | static_cast<std::uint64_t>(out[1]);
}

} // namespace snls
