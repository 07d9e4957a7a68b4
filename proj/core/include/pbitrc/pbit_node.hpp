#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pbitrc/rng.hpp"

namespace pbitrc {

enum class NodeKind { Deterministic, Stochastic };

std::string to_string(NodeKind kind);
/// Accepts "deterministic" or "stochastic"; throws DomainError otherwise.
NodeKind parse_node_kind(std::string_view token);

/// Leaky node parameters. The activation lives in the band |x| <= gain / leak.
struct PBitParams {
    double leak = 0.3; ///< per-step leak rate, 0 < leak <= 1
    double gain = 0.3; ///< drive gain, > 0
    NodeKind kind = NodeKind::Deterministic;

    void validate() const;
    double band() const noexcept { return gain / leak; }
};

/// One draw of the stochastic binary unit: sgn[r + tanh(input)], r uniform on
/// [-1, 1). A zero argument maps to +1.
int pbit_sample(double input, const RngStream& rng);

/// Same law with the uniform draw supplied directly.
int spin_from_uniform(double input, double r) noexcept;

struct NodeUpdate {
    double x = 0.0;
    int spin = 0; ///< 0 for deterministic nodes
};

/// Forward-Euler leaky update with unit step:
///   deterministic  x' = (1 - leak) x + gain tanh(input)
///   stochastic     x' = (1 - leak) x + gain m,   m = pbit_sample(input)
NodeUpdate node_update(double x, double input, const PBitParams& params, const RngStream& rng);

inline double node_step(double x, double input, const PBitParams& params, const RngStream& rng) {
    return node_update(x, input, params, rng).x;
}

struct SigmoidPoint {
    double input = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    double tanh_input = 0.0;
};

/// Empirical mean spin of `samples` independent draws at each input value.
/// Grid point i uses node_id = i and steps 1..samples.
std::vector<SigmoidPoint> sigmoid_sweep(std::span<const double> inputs, std::uint64_t samples,
                                        std::uint64_t seed);

enum class UpdateSchedule {
    Synchronous, ///< both units read the other's previous spin
    Sequential,  ///< unit 1 updates first, unit 2 then reads the fresh spin of unit 1
};

struct PairStats {
    double mean_product = 0.0;  ///< <m1(t) m2(t)>
    double lag1_product = 0.0;  ///< <m1(t+1) m2(t)>
    double mean_spin1 = 0.0;
    double mean_spin2 = 0.0;
    std::uint64_t steps = 0;
};

/// Two units coupled symmetrically through J: I1 = J m2, I2 = J m1. Starts
/// from (+1, +1), discards `burn_in` steps, then averages over `steps` steps.
PairStats simulate_coupled_pair(double coupling, std::uint64_t steps, std::uint64_t seed,
                                UpdateSchedule schedule, std::uint64_t burn_in = 1000);

} // namespace pbitrc
