#pragma once

#include <array>
#include <cstdint>

namespace pbitrc {

/// Philox4x32-10 block function (Salmon et al., SC'11). Maps a 128-bit counter
/// and a 64-bit key to 128 pseudo-random bits with no internal state.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Random-number domains. Each domain derives its own Philox key from the run
/// seed so that, e.g., weight draws never alias node noise.
enum class RngDomain : std::uint64_t {
    NodeNoise = 0,
    Weights = 1,
    Symbols = 2,
    ChannelNoise = 3,
    InitialState = 4,
    Restart = 5,
    Test = 6,
};

std::array<std::uint32_t, 2> derive_key(std::uint64_t seed, RngDomain domain) noexcept;

/// Map 53 random bits to [0, 1).
inline double to_unit_interval(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Noise source of one p-bit at one time step. The sample is a pure function of
/// (seed, node_id, step); evaluation order and thread count do not matter.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t node_id = 0;
    std::uint64_t step = 0;

    /// Uniform on [-1, +1) with 53 bits of resolution.
    double uniform_pm1() const noexcept;
};

/// Sequential generator over a counter-based stream: draw i of (seed, domain)
/// is fixed regardless of what else was drawn. Satisfies
/// UniformRandomBitGenerator so it can feed <random> shuffles if needed.
class CounterEngine {
  public:
    using result_type = std::uint64_t;

    CounterEngine(std::uint64_t seed, RngDomain domain, std::uint64_t substream = 0) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept;

    /// Uniform on [0, 1).
    double uniform01() noexcept { return to_unit_interval((*this)()); }
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }
    /// Uniform integer in [0, n). Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n) noexcept;

    std::uint64_t position() const noexcept { return index_; }

  private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t substream_;
    std::uint64_t index_ = 0;
};

} // namespace pbitrc
