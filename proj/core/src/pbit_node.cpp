#include "pbitrc/pbit_node.hpp"

#include <algorithm>
#include <cmath>

#include "pbitrc/error.hpp"

namespace pbitrc {

std::string to_string(NodeKind kind) {
    return kind == NodeKind::Deterministic ? "deterministic" : "stochastic";
}

NodeKind parse_node_kind(std::string_view token) {
    if (token == "deterministic") {
        return NodeKind::Deterministic;
    }
    if (token == "stochastic") {
        return NodeKind::Stochastic;
    }
    throw DomainError("unknown node kind '" + std::string(token) +
                      "' (expected 'deterministic' or 'stochastic')");
}

void PBitParams::validate() const {
    if (!(leak > 0.0 && leak <= 1.0)) {
        throw DomainError("node leak must satisfy 0 < leak <= 1");
    }
    if (!(gain > 0.0) || !std::isfinite(gain)) {
        throw DomainError("node gain must be positive and finite");
    }
}

int spin_from_uniform(double input, double r) noexcept {
    return (r + std::tanh(input)) >= 0.0 ? 1 : -1;
}

int pbit_sample(double input, const RngStream& rng) {
    if (!std::isfinite(input)) {
        throw DomainError("p-bit input must be finite");
    }
    return spin_from_uniform(input, rng.uniform_pm1());
}

NodeUpdate node_update(double x, double input, const PBitParams& params, const RngStream& rng) {
    if (!std::isfinite(x) || !std::isfinite(input)) {
        throw DomainError("node state and input must be finite");
    }
    const double kept = (1.0 - params.leak) * x;
    if (params.kind == NodeKind::Deterministic) {
        return {kept + params.gain * std::tanh(input), 0};
    }
    const int m = spin_from_uniform(input, rng.uniform_pm1());
    return {kept + params.gain * m, m};
}

std::vector<SigmoidPoint> sigmoid_sweep(std::span<const double> inputs, std::uint64_t samples,
                                        std::uint64_t seed) {
    if (samples < 2) {
        throw DomainError("sigmoid sweep needs at least two samples per point");
    }
    std::vector<SigmoidPoint> out;
    out.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const double input = inputs[i];
        if (!std::isfinite(input)) {
            throw DomainError("sigmoid sweep input must be finite");
        }
        const double bias = std::tanh(input);
        std::int64_t sum = 0;
        RngStream rng{seed, i, 0};
        for (std::uint64_t s = 1; s <= samples; ++s) {
            rng.step = s;
            sum += spin_from_uniform(input, rng.uniform_pm1());
        }
        const double n = static_cast<double>(samples);
        const double mean = static_cast<double>(sum) / n;
        // spins are +-1, so E[m^2] = 1
        const double var = std::max(0.0, (1.0 - mean * mean) * n / (n - 1.0));
        out.push_back({input, mean, std::sqrt(var), bias});
    }
    return out;
}

PairStats simulate_coupled_pair(double coupling, std::uint64_t steps, std::uint64_t seed,
                                UpdateSchedule schedule, std::uint64_t burn_in) {
    if (!std::isfinite(coupling)) {
        throw DomainError("coupling must be finite");
    }
    if (steps == 0) {
        throw DomainError("coupled-pair simulation needs at least one step");
    }
    int m1 = 1;
    int m2 = 1;
    std::int64_t prod = 0;
    std::int64_t lag = 0;
    std::int64_t s1 = 0;
    std::int64_t s2 = 0;
    const std::uint64_t total = burn_in + steps;
    for (std::uint64_t t = 1; t <= total; ++t) {
        const RngStream r1{seed, 0, t};
        const RngStream r2{seed, 1, t};
        const int prev2 = m2;
        const int next1 = spin_from_uniform(coupling * m2, r1.uniform_pm1());
        const int driver = schedule == UpdateSchedule::Sequential ? next1 : m1;
        const int next2 = spin_from_uniform(coupling * driver, r2.uniform_pm1());
        m1 = next1;
        m2 = next2;
        if (t > burn_in) {
            prod += m1 * m2;
            lag += m1 * prev2;
            s1 += m1;
            s2 += m2;
        }
    }
    const double n = static_cast<double>(steps);
    return {static_cast<double>(prod) / n, static_cast<double>(lag) / n, static_cast<double>(s1) / n,
            static_cast<double>(s2) / n, steps};
}

} // namespace pbitrc
