#include <benchmark/benchmark.h>

#include "pbitrc/pbit_node.hpp"
#include "pbitrc/readout.hpp"
#include "pbitrc/reservoir.hpp"
#include "pbitrc/spectral.hpp"

namespace {

pbitrc::ReservoirConfig config(std::int64_t n, pbitrc::NodeKind kind) {
    pbitrc::ReservoirConfig c;
    c.size = static_cast<std::size_t>(n);
    c.density = std::max(0.1, 3.0 / static_cast<double>(n));
    c.node.kind = kind;
    c.seed = 7;
    return c;
}

void reservoir_step(benchmark::State& state, pbitrc::NodeKind kind) {
    const auto c = config(state.range(0), kind);
    const auto w = pbitrc::build_weights(c);
    auto s = pbitrc::zero_state(c);
    pbitrc::Vector u(1);
    u[0] = 0.3;
    for (auto _ : state) {
        pbitrc::reservoir_step(s, u, w, c);
        benchmark::DoNotOptimize(s.x.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ReservoirStepDeterministic(benchmark::State& state) {
    reservoir_step(state, pbitrc::NodeKind::Deterministic);
}
void BM_ReservoirStepStochastic(benchmark::State& state) {
    reservoir_step(state, pbitrc::NodeKind::Stochastic);
}

void BM_SpectralRadius(benchmark::State& state) {
    auto c = config(state.range(0), pbitrc::NodeKind::Deterministic);
    const auto w = pbitrc::build_weights(c);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pbitrc::spectral_radius(w.w_self));
    }
}

void BM_RidgeFit(benchmark::State& state) {
    const auto f = state.range(0);
    const pbitrc::Matrix x = pbitrc::Matrix::Random(5000, f);
    const pbitrc::Matrix y = pbitrc::Matrix::Random(5000, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pbitrc::ridge_fit(x, y, 1e-6).w_out.data());
    }
}

void BM_PbitSample(benchmark::State& state) {
    std::uint64_t step = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pbitrc::pbit_sample(0.4, pbitrc::RngStream{1, 0, ++step}));
    }
}

} // namespace

BENCHMARK(BM_ReservoirStepDeterministic)->Arg(100)->Arg(500)->Arg(1000);
BENCHMARK(BM_ReservoirStepStochastic)->Arg(100)->Arg(500)->Arg(1000);
BENCHMARK(BM_SpectralRadius)->Arg(100)->Arg(500);
BENCHMARK(BM_RidgeFit)->Arg(102)->Arg(502);
BENCHMARK(BM_PbitSample);

BENCHMARK_MAIN();
