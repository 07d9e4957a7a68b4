#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pbitrc {

// ---------------------------------------------------------------------------
// Mackey-Glass delay equation
//   dx/dt = beta x(t - delay) / (1 + x(t - delay)^exponent) - gamma x(t)
// ---------------------------------------------------------------------------

enum class DelayInterpolation {
    Hermite, ///< cubic Hermite from stored grid values and slopes, O(dt^4)
    Linear,  ///< chord between grid values, O(dt^2)
};

std::string to_string(DelayInterpolation mode);
DelayInterpolation parse_delay_interpolation(std::string_view token);

struct MackeyGlassParams {
    double beta = 0.2;
    double gamma = 0.1;
    double exponent = 10.0;
    double delay = 17.0;
    double dt = 0.1;
    double history = 1.2; ///< constant value of x on t <= 0
    double t_total = 500.0;
    DelayInterpolation interpolation = DelayInterpolation::Hermite;

    /// round(delay / dt)
    std::size_t delay_steps() const;
    void validate() const;
};

/// Largest supported delay buffer, in grid steps.
inline constexpr std::size_t kMaxDelaySteps = 50'000'000;

/// Fixed-step RK4 with the delayed term read from a ring buffer of past grid
/// values (and slopes). Returns x at t = 0, dt, ..., round(t_total/dt) dt.
/// A zero-length delay buffer integrates the plain ODE x' = f(x, x).
std::vector<double> mackey_glass(const MackeyGlassParams& params);

// ---------------------------------------------------------------------------
// Signal conditioning
// ---------------------------------------------------------------------------

/// v -> (v - offset) * scale
struct AffineMap {
    double offset = 0.0;
    double scale = 1.0;

    double apply(double v) const noexcept { return (v - offset) * scale; }
    double invert(double v) const noexcept { return v / scale + offset; }
    std::vector<double> apply(std::span<const double> values) const;
    std::vector<double> invert(std::span<const double> values) const;
};

struct NormalizedSignal {
    std::vector<double> values;
    AffineMap map;
};

/// Remove the mean and scale so the largest magnitude is `peak` (0.9 by
/// default). Throws DomainError when the sequence has fewer than two distinct values.
NormalizedSignal normalize_signal(std::span<const double> values, double peak = 0.9);

// ---------------------------------------------------------------------------
// Nonlinear channel
// ---------------------------------------------------------------------------

/// Throws DomainError unless the alphabet is nonempty and strictly increasing.
void validate_alphabet(std::span<const double> alphabet);

/// i.i.d. uniform symbols, a pure function of (alphabet, length, seed).
std::vector<double> random_symbols(std::span<const double> alphabet, std::size_t length, std::uint64_t seed);

enum class ChannelComposition {
    FirThenPolynomial, ///< q = sum_tau B_tau d(t - tau);  u = sum_n A_n q^n
    PerTapPowers,      ///< u = sum_n A_n sum_tau B_tau d(t - tau)^n
};

std::string to_string(ChannelComposition mode);
ChannelComposition parse_channel_composition(std::string_view token);

inline constexpr int kFirstTap = -2; ///< taps cover tau = -2 .. 7
inline constexpr int kLastTap = 7;
inline constexpr std::size_t kTapCount = 10;

struct ChannelParams {
    std::array<double, kTapCount> taps{0.08, -0.12, 1.0, 0.18, -0.1, 0.091, -0.05, 0.04, 0.03, 0.01};
    std::array<double, 3> poly{1.0, 0.036, -0.011};
    double noise_halfwidth = 0.0; ///< additive U(-c, c)
    std::vector<double> alphabet{-3.0, -1.0, 1.0, 3.0};
    std::size_t output_delay = 2;
    ChannelComposition composition = ChannelComposition::FirThenPolynomial;

    void validate() const;
};

/// Aligned sequences; index k corresponds to time t = first_time + k.
struct ChannelDataset {
    std::vector<double> d;
    std::vector<double> q;
    std::vector<double> u;
    std::vector<double> target; ///< d(t - output_delay)
    std::size_t first_time = 0;

    std::size_t size() const noexcept { return u.size(); }
};

/// Channel applied to a given symbol stream; noise drawn from (noise_seed).
/// Times whose taps fall outside [0, d.size()) are trimmed.
ChannelDataset apply_channel(const ChannelParams& params, std::span<const double> symbols,
                             std::uint64_t noise_seed);

/// `length` random symbols from `seed`, then apply_channel with the same seed.
ChannelDataset channel_dataset(const ChannelParams& params, std::size_t length, std::uint64_t seed);

/// Number of trimmed samples lost from a stream of symbols.
std::size_t channel_trim(const ChannelParams& params) noexcept;

} // namespace pbitrc
