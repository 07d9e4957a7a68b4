#include "pbitrc/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pbitrc/error.hpp"
#include "pbitrc/rng.hpp"

namespace pbitrc {

std::string to_string(DelayInterpolation mode) {
    return mode == DelayInterpolation::Hermite ? "hermite" : "linear";
}

DelayInterpolation parse_delay_interpolation(std::string_view token) {
    if (token == "hermite") {
        return DelayInterpolation::Hermite;
    }
    if (token == "linear") {
        return DelayInterpolation::Linear;
    }
    throw DomainError("unknown delay interpolation '" + std::string(token) + "' (expected 'hermite' or 'linear')");
}

std::size_t MackeyGlassParams::delay_steps() const {
    return static_cast<std::size_t>(std::llround(delay / dt));
}

void MackeyGlassParams::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw DomainError("Mackey-Glass dt must be positive");
    }
    if (!(beta >= 0.0) || !(gamma >= 0.0) || !(exponent > 0.0) || !std::isfinite(beta) ||
        !std::isfinite(gamma) || !std::isfinite(exponent)) {
        throw DomainError("Mackey-Glass needs beta >= 0, gamma >= 0, exponent > 0");
    }
    if (!(delay >= 0.0) || !std::isfinite(delay)) {
        throw DomainError("Mackey-Glass delay must be non-negative");
    }
    if (!(t_total >= 0.0) || !std::isfinite(t_total) || !std::isfinite(history)) {
        throw DomainError("Mackey-Glass t_total and history must be finite, t_total >= 0");
    }
    if (delay / dt > static_cast<double>(kMaxDelaySteps)) {
        throw DomainError("Mackey-Glass delay buffer would exceed " + std::to_string(kMaxDelaySteps) + " steps");
    }
}

namespace {

struct GridPoint {
    double x;
    double slope;
};

// Past grid values and slopes. Indices below zero read the constant history.
class DelayLine {
  public:
    DelayLine(std::size_t delay_steps, double history)
        : slots_(delay_steps + 1), history_(history) {}

    void store(std::int64_t index, GridPoint p) { slots_[slot(index)] = p; }

    GridPoint at(std::int64_t index) const {
        return index < 0 ? GridPoint{history_, 0.0} : slots_[slot(index)];
    }

    // value at the midpoint between grid j and j + 1
    double midpoint(std::int64_t j, double dt, DelayInterpolation mode) const {
        if (j + 1 <= 0) {
            return history_;
        }
        const GridPoint a = at(j);
        const GridPoint b = at(j + 1);
        const double chord = 0.5 * (a.x + b.x);
        return mode == DelayInterpolation::Hermite ? chord + dt / 8.0 * (a.slope - b.slope) : chord;
    }

  private:
    std::size_t slot(std::int64_t index) const {
        return static_cast<std::size_t>(index) % slots_.size();
    }

    std::vector<GridPoint> slots_;
    double history_;
};

} // namespace

std::vector<double> mackey_glass(const MackeyGlassParams& p) {
    p.validate();
    const auto steps = static_cast<std::size_t>(std::llround(p.t_total / p.dt));
    const auto delay = static_cast<std::int64_t>(p.delay_steps());
    const double h = p.dt;

    auto rhs = [&p](double x, double delayed) {
        return p.beta * delayed / (1.0 + std::pow(delayed, p.exponent)) - p.gamma * x;
    };

    std::vector<double> out(steps + 1);
    out[0] = p.history;
    double x = p.history;

    if (delay == 0) {
        for (std::size_t n = 0; n < steps; ++n) {
            const double k1 = rhs(x, x);
            const double x2 = x + 0.5 * h * k1;
            const double k2 = rhs(x2, x2);
            const double x3 = x + 0.5 * h * k2;
            const double k3 = rhs(x3, x3);
            const double x4 = x + h * k3;
            const double k4 = rhs(x4, x4);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!std::isfinite(x)) {
                throw NumericError("Mackey-Glass integration produced a non-finite value");
            }
            out[n + 1] = x;
        }
        return out;
    }

    DelayLine line(static_cast<std::size_t>(delay), p.history);
    line.store(0, {x, rhs(x, line.at(-delay).x)});
    for (std::size_t n = 0; n < steps; ++n) {
        const auto j = static_cast<std::int64_t>(n) - delay;
        const double d0 = line.at(j).x;
        const double dh = line.midpoint(j, h, p.interpolation);
        const double d1 = line.at(j + 1).x;

        const double k1 = rhs(x, d0);
        const double k2 = rhs(x + 0.5 * h * k1, dh);
        const double k3 = rhs(x + 0.5 * h * k2, dh);
        const double k4 = rhs(x + h * k3, d1);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(x)) {
            throw NumericError("Mackey-Glass integration produced a non-finite value");
        }
        const auto next = static_cast<std::int64_t>(n + 1);
        line.store(next, {x, rhs(x, line.at(next - delay).x)});
        out[n + 1] = x;
    }
    return out;
}

std::vector<double> AffineMap::apply(std::span<const double> values) const {
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(), [this](double v) { return apply(v); });
    return out;
}

std::vector<double> AffineMap::invert(std::span<const double> values) const {
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(), [this](double v) { return invert(v); });
    return out;
}

NormalizedSignal normalize_signal(std::span<const double> values, double peak) {
    if (values.size() < 2) {
        throw DomainError("normalize_signal needs at least two values");
    }
    if (!(peak > 0.0)) {
        throw DomainError("normalize_signal peak must be positive");
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (!(*lo < *hi)) {
        throw DomainError("normalize_signal: sequence is constant (degenerate range)");
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double largest = 0.0;
    for (double v : values) {
        largest = std::max(largest, std::abs(v - mean));
    }
    NormalizedSignal out;
    out.map = AffineMap{mean, peak / largest};
    out.values = out.map.apply(values);
    return out;
}

void validate_alphabet(std::span<const double> alphabet) {
    if (alphabet.empty()) {
        throw DomainError("symbol alphabet is empty");
    }
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        if (!std::isfinite(alphabet[i])) {
            throw DomainError("symbol alphabet entries must be finite");
        }
        if (i > 0 && !(alphabet[i - 1] < alphabet[i])) {
            throw DomainError("symbol alphabet must be strictly increasing");
        }
    }
}

std::vector<double> random_symbols(std::span<const double> alphabet, std::size_t length, std::uint64_t seed) {
    validate_alphabet(alphabet);
    if (length < 1) {
        throw DomainError("random_symbols needs length >= 1");
    }
    CounterEngine rng(seed, RngDomain::Symbols);
    std::vector<double> out(length);
    for (auto& s : out) {
        s = alphabet[rng.below(alphabet.size())];
    }
    return out;
}

std::string to_string(ChannelComposition mode) {
    return mode == ChannelComposition::FirThenPolynomial ? "fir-then-polynomial" : "per-tap-powers";
}

ChannelComposition parse_channel_composition(std::string_view token) {
    if (token == "fir-then-polynomial") {
        return ChannelComposition::FirThenPolynomial;
    }
    if (token == "per-tap-powers") {
        return ChannelComposition::PerTapPowers;
    }
    throw DomainError("unknown channel composition '" + std::string(token) +
                      "' (expected 'fir-then-polynomial' or 'per-tap-powers')");
}

void ChannelParams::validate() const {
    validate_alphabet(alphabet);
    for (double v : taps) {
        if (!std::isfinite(v)) {
            throw DomainError("channel taps must be finite");
        }
    }
    for (double v : poly) {
        if (!std::isfinite(v)) {
            throw DomainError("channel polynomial coefficients must be finite");
        }
    }
    if (!(noise_halfwidth >= 0.0) || !std::isfinite(noise_halfwidth)) {
        throw DomainError("channel noise half-width must be finite and non-negative");
    }
}

std::size_t channel_trim(const ChannelParams& params) noexcept {
    return std::max<std::size_t>(kLastTap, params.output_delay) + static_cast<std::size_t>(-kFirstTap);
}

ChannelDataset apply_channel(const ChannelParams& params, std::span<const double> symbols,
                             std::uint64_t noise_seed) {
    params.validate();
    const std::size_t length = symbols.size();
    if (length <= kTapCount) {
        throw DomainError("channel needs more than " + std::to_string(kTapCount) + " symbols");
    }
    const std::size_t first = std::max<std::size_t>(kLastTap, params.output_delay);
    const std::size_t last = length - 1 - static_cast<std::size_t>(-kFirstTap);
    if (last < first) {
        throw DomainError("channel sequence is empty after trimming the tap span and output delay");
    }
    const std::size_t count = last - first + 1;

    ChannelDataset out;
    out.first_time = first;
    out.d.resize(count);
    out.q.resize(count);
    out.u.resize(count);
    out.target.resize(count);

    CounterEngine noise(noise_seed, RngDomain::ChannelNoise);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t t = first + k;
        double q = 0.0;
        double powers[3] = {0.0, 0.0, 0.0};
        for (int tau = kFirstTap; tau <= kLastTap; ++tau) {
            const double b = params.taps[static_cast<std::size_t>(tau - kFirstTap)];
            const double d = symbols[static_cast<std::size_t>(static_cast<std::int64_t>(t) - tau)];
            q += b * d;
            powers[0] += b * d;
            powers[1] += b * d * d;
            powers[2] += b * d * d * d;
        }
        double u = 0.0;
        if (params.composition == ChannelComposition::FirThenPolynomial) {
            u = params.poly[0] * q + params.poly[1] * q * q + params.poly[2] * q * q * q;
        } else {
            u = params.poly[0] * powers[0] + params.poly[1] * powers[1] + params.poly[2] * powers[2];
        }
        u += params.noise_halfwidth * noise.uniform(-1.0, 1.0);

        out.d[k] = symbols[t];
        out.q[k] = q;
        out.u[k] = u;
        out.target[k] = symbols[t - params.output_delay];
    }
    return out;
}

ChannelDataset channel_dataset(const ChannelParams& params, std::size_t length, std::uint64_t seed) {
    params.validate();
    const auto symbols = random_symbols(params.alphabet, length, seed);
    return apply_channel(params, symbols, seed);
}

} // namespace pbitrc
