// Acceptance suite. `pbitrc_acceptance` runs every criterion, `pbitrc_acceptance N`
// runs criterion N. One [PASS]/[FAIL] line per criterion, followed by the
// measured values. Exit status is non-zero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pbitrc/error.hpp"
#include "pbitrc/experiment.hpp"
#include "pbitrc/pbit_node.hpp"
#include "pbitrc/power.hpp"
#include "pbitrc/readout.hpp"
#include "pbitrc/reservoir.hpp"
#include "pbitrc/spectral.hpp"
#include "pbitrc/tasks.hpp"

using namespace pbitrc;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void log(const std::string& what) { notes.push_back("     " + what); }
};

struct Criterion {
    int id;
    std::string title;
    double limit_seconds; ///< <= 0: no runtime limit
    std::function<Outcome()> body;
};

template <typename... Args>
std::string fmt(const Args&... args) {
    std::ostringstream os;
    os << std::setprecision(4);
    (os << ... << args);
    return os.str();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string list(const std::vector<double>& v) {
    std::ostringstream os;
    os << std::setprecision(3) << '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        os << (i ? ", " : "") << v[i];
    }
    os << ']';
    return os.str();
}

const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4, 5};

std::vector<double> metric(const RunSummary& s, const std::string& key) {
    std::vector<double> out;
    for (const auto& r : s.runs) {
        out.push_back(r.metrics.at(key).get<double>());
    }
    return out;
}

RunSummary run_quiet(ExperimentConfig c) {
    c.seeds = kSeeds;
    return run_experiment(c, {1, false});
}

// 1 ------------------------------------------------------------------------

Outcome sigmoid() {
    Outcome o;
    const std::uint64_t samples = 100000;
    std::vector<double> grid;
    for (int i = -4; i <= 4; ++i) {
        grid.push_back(0.5 * i);
    }
    const auto points = sigmoid_sweep(grid, samples, 2024);
    for (const auto& p : points) {
        const double t = std::tanh(p.input);
        const double bound = 3.0 * std::sqrt((1.0 - t * t) / static_cast<double>(samples));
        const double dev = std::abs(p.mean - t);
        o.check(dev <= bound, fmt("I = ", p.input, ": mean ", p.mean, ", |mean - tanh I| = ", dev, " <= ", bound));
    }
    return o;
}

// 2 ------------------------------------------------------------------------

Outcome pair_correlation() {
    Outcome o;
    const std::uint64_t steps = 1000000;
    for (double j : {-1.0, 0.0, 1.0}) {
        const auto sim = simulate_coupled_pair(j, steps, 77, UpdateSchedule::Sequential);
        const auto exact = oracle::pair_product(j, UpdateSchedule::Sequential);
        const double sigma = exact.sigma_per_sample / std::sqrt(static_cast<double>(steps));
        const double dev = std::abs(sim.mean_product - exact.mean);
        o.check(dev <= 3 * sigma, fmt("J = ", j, ": <m1 m2> = ", sim.mean_product, ", chain ", exact.mean,
                                      ", |diff| = ", dev, " <= 3 sigma = ", 3 * sigma));
        if (j != 0.0) {
            o.check(std::signbit(sim.mean_product) == std::signbit(j) && sim.mean_product != 0.0,
                    fmt("J = ", j, ": sign of <m1 m2> matches sign(J)"));
        }
        const auto sync = simulate_coupled_pair(j, steps, 77, UpdateSchedule::Synchronous);
        o.log(fmt("J = ", j, ": synchronous schedule gives <m1 m2> = ", sync.mean_product, " and lag-1 ",
                  sync.lag1_product));
    }
    return o;
}

// 3 ------------------------------------------------------------------------

Outcome spectral() {
    Outcome o;
    for (std::size_t n : {5, 50, 200}) {
        for (std::uint64_t seed : kSeeds) {
            ReservoirConfig c;
            c.size = n;
            c.density = std::max(0.1, 3.0 / static_cast<double>(n));
            c.rho_target = 0.9;
            c.seed = seed;
            try {
                const auto w = build_weights(c);
                const double rho = oracle::dense_spectral_radius(Matrix(w.w_self));
                const double rel = std::abs(rho - c.rho_target) / c.rho_target;
                o.check(rel <= 1e-4, fmt("N = ", n, ", seed ", seed, ": eigensolver rho = ", std::setprecision(10),
                                         rho, ", relative error ", std::setprecision(3), rel));
            } catch (const ConstructionError& e) {
                o.check(false, fmt("N = ", n, ", seed ", seed, ": ", e.what()));
            }
        }
    }
    return o;
}

// 4 ------------------------------------------------------------------------

Outcome ridge() {
    Outcome o;
    std::mt19937_64 gen(4);
    std::uniform_int_distribution<int> pick_f(1, 10);
    std::uniform_real_distribution<double> log_lambda(-6.0, 1.0);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 20; ++trial) {
        const int f = pick_f(gen);
        std::uniform_int_distribution<int> pick_t(f, 50);
        const int t = pick_t(gen);
        const double lambda = std::pow(10.0, log_lambda(gen));
        const int ny = 1 + trial % 3;
        Matrix x(t, f), y(t, ny);
        for (auto* m : {&x, &y}) {
            for (Eigen::Index i = 0; i < m->size(); ++i) {
                m->data()[i] = normal(gen);
            }
        }
        const auto fit = ridge_fit(x, y, lambda);
        const Matrix ref = oracle::pinv_ridge(x, y, lambda);
        const double rel = (fit.w_out - ref).norm() / ref.norm();
        o.check(rel <= 1e-8, fmt("T = ", t, ", F = ", f, ", lambda = ", lambda, ": relative difference ", rel));
    }
    return o;
}

// 5 ------------------------------------------------------------------------

Outcome mg_follow() {
    Outcome o;
    auto c = ExperimentConfig::defaults(Task::MgFollow);
    c.reservoir.size = 500;
    o.log(fmt("train_steps ", c.train_steps, ", test_steps ", c.test_steps, ", reference band 5e-4 to 1e-3"));
    for (NodeKind kind : {NodeKind::Deterministic, NodeKind::Stochastic}) {
        c.reservoir.node.kind = kind;
        c.feature_input = true;
        const auto values = metric(run_quiet(c), "nmse");
        const double limit = kind == NodeKind::Deterministic ? 1e-3 : 1e-2;
        o.check(median(values) <= limit,
                fmt(to_string(kind), " N = 500: median NMSE ", median(values), " <= ", limit, ", seeds ", list(values)));
        c.feature_input = false;
        const auto reservoir_only = metric(run_quiet(c), "nmse");
        o.log(fmt(to_string(kind), " without the input column in the readout: median NMSE ", median(reservoir_only),
                  ", seeds ", list(reservoir_only)));
    }
    return o;
}

// 6 ------------------------------------------------------------------------

Outcome mg_generate() {
    Outcome o;
    auto c = ExperimentConfig::defaults(Task::MgGenerate);
    c.reservoir.size = 20;
    const auto small = metric(run_quiet(c), "nmse");
    c.reservoir.size = 1000;
    const auto large = metric(run_quiet(c), "nmse");
    const double ratio = median(small) / median(large);
    o.log(fmt("N = 20: median free-run NMSE ", median(small), ", seeds ", list(small)));
    o.log(fmt("N = 1000: median free-run NMSE ", median(large), ", seeds ", list(large)));
    o.check(ratio >= 5.0, fmt("ratio ", ratio, " >= 5"));
    return o;
}

// 7 ------------------------------------------------------------------------

Outcome equalizer() {
    Outcome o;
    auto c = ExperimentConfig::defaults(Task::Equalize);
    c.reservoir.size = 100;
    c.test_steps = 10000;

    const auto clean = metric(run_quiet(c), "ser");
    const auto zeros = std::count(clean.begin(), clean.end(), 0.0);
    o.check(zeros >= 3, fmt("deterministic, c = 0: SER = 0 on ", zeros, " of 5 seeds over ", c.test_steps,
                            " symbols, seeds ", list(clean)));

    c.channel.params.noise_halfwidth = 0.01;
    const auto noisy = metric(run_quiet(c), "ser");
    o.check(*std::max_element(noisy.begin(), noisy.end()) <= 0.01,
            fmt("deterministic, c = 0.01: max SER ", *std::max_element(noisy.begin(), noisy.end()),
                " <= 0.01, seeds ", list(noisy)));

    auto s = ExperimentConfig::defaults(Task::Equalize);
    s.reservoir.size = 100;
    s.test_steps = 10000;
    s.reservoir.node.kind = NodeKind::Stochastic;
    s.reservoir.node.leak = 1.0;
    s.reservoir.node.gain = 10.0;
    s.reservoir.input_scale = 30.0;
    s.reservoir.rho_target = 0.9;
    const auto stochastic = metric(run_quiet(s), "ser");
    o.check(median(stochastic) <= 0.05, fmt("stochastic, c = 0: median SER ", median(stochastic),
                                            " <= 0.05 (ideal 0), seeds ", list(stochastic)));
    return o;
}

// 8 ------------------------------------------------------------------------

Outcome power() {
    Outcome o;
    const auto p = power_report(DeviceParams{});
    o.check(std::abs(p.gshe_writer - 0.191) < 5e-4, fmt("gshe_writer ", p.gshe_writer, " uW, target 0.191"));
    const double rel = std::abs(p.node_total / 170.2 - 1.0);
    o.check(rel <= 0.15, fmt("node_total ", p.node_total, " uW, ", 100 * rel, "% from 170.2"));
    for (const auto& [name, band] : {std::pair{"mtj_reader", p.mtj_reader_band}, std::pair{"r_up", p.r_up_band}}) {
        const double lo = std::min(band.first, band.second);
        const double hi = std::max(band.first, band.second);
        const bool brackets = lo <= 10.0 && 10.0 <= hi;
        const bool near = std::abs(band.first / 10.0 - 1.0) <= 0.3 || std::abs(band.second / 10.0 - 1.0) <= 0.3;
        o.check(brackets || near, fmt(name, " band P ", band.first, " / AP ", band.second, " uW against 10"));
    }
    o.check(p.spintronic_total == p.mtj_reader + p.gshe_writer && p.silicon_total == p.r_up + p.buffer &&
                p.node_total == p.spintronic_total + p.silicon_total,
            "totals are exact sums of their parts");
    return o;
}

// 9 ------------------------------------------------------------------------

MackeyGlassParams mg_params(double delay, double dt, double t_total, double history) {
    MackeyGlassParams p;
    p.delay = delay;
    p.dt = dt;
    p.t_total = t_total;
    p.history = history;
    return p;
}

double grid_error(const std::vector<double>& coarse, std::size_t stride, const std::vector<double>& ref,
                  std::size_t ref_stride) {
    double err = 0.0;
    for (std::size_t k = 0; k * ref_stride < ref.size() && k * stride < coarse.size(); ++k) {
        err = std::max(err, std::abs(coarse[k * stride] - ref[k * ref_stride]));
    }
    return err;
}

Outcome mg_integrator() {
    Outcome o;
    for (double delay : {0.0, 17.0, 30.0}) {
        const auto x = mackey_glass(mg_params(delay, 0.1, 500.0, 1.0));
        double dev = 0.0;
        for (double v : x) {
            dev = std::max(dev, std::abs(v - 1.0));
        }
        o.check(dev <= 1e-12, fmt("fixed point x* = 1 with delay ", delay, ": max |x - 1| = ", dev));
    }
    auto decay = mg_params(17.0, 0.1, 10.0, 2.5);
    decay.beta = 0.0;
    const auto x = mackey_glass(decay);
    const double expected = 2.5 * std::exp(-1.0);
    const double rel = std::abs(x.back() - expected) / expected;
    o.check(rel <= 1e-6, fmt("beta = 0: x(10) = ", std::setprecision(10), x.back(), ", relative error ",
                             std::setprecision(3), rel));

    const std::vector<double> steps{0.2, 0.1, 0.05};
    const auto ref = mackey_glass(mg_params(17.0, 0.2 / 32, 100.0, 1.2));
    std::vector<double> log_dt, log_err;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto xi = mackey_glass(mg_params(17.0, steps[i], 100.0, 1.2));
        const double err = grid_error(xi, std::size_t{1} << i, ref, 32);
        log_dt.push_back(std::log(steps[i]));
        log_err.push_back(std::log(err));
        o.log(fmt("dt = ", steps[i], ": max error ", err));
    }
    const double mx = (log_dt[0] + log_dt[1] + log_dt[2]) / 3;
    const double my = (log_err[0] + log_err[1] + log_err[2]) / 3;
    double sxy = 0.0;
    double sxx = 0.0;
    for (int i = 0; i < 3; ++i) {
        sxy += (log_dt[i] - mx) * (log_err[i] - my);
        sxx += (log_dt[i] - mx) * (log_dt[i] - mx);
    }
    o.check(sxy / sxx >= 3.5, fmt("observed order ", sxy / sxx, " >= 3.5"));
    return o;
}

// 10 -----------------------------------------------------------------------

Outcome replay() {
    Outcome o;
    const fs::path root = PBITRC_TEST_SCRATCH;
    std::vector<std::pair<std::string, ExperimentConfig>> cases;
    {
        auto c = ExperimentConfig::defaults(Task::MgFollow);
        c.reservoir.size = 100;
        c.reservoir.node.kind = NodeKind::Stochastic;
        cases.emplace_back("mg-follow stochastic", c);
    }
    {
        auto c = ExperimentConfig::defaults(Task::MgGenerate);
        c.reservoir.size = 100;
        cases.emplace_back("mg-generate deterministic", c);
    }
    {
        auto c = ExperimentConfig::defaults(Task::Equalize);
        c.reservoir.node.kind = NodeKind::Stochastic;
        c.channel.params.noise_halfwidth = 0.01;
        cases.emplace_back("equalize stochastic, c = 0.01", c);
    }
    {
        auto c = ExperimentConfig::defaults(Task::PbitStats);
        c.pbit_stats.samples = 20000;
        cases.emplace_back("pbit-stats", c);
    }
    {
        cases.emplace_back("power", ExperimentConfig::defaults(Task::Power));
    }
    int index = 0;
    for (auto& [name, c] : cases) {
        c.seeds = {11, 12, 13};
        c.output_dir = oracle::scratch_dir(root, "replay_" + std::to_string(index++)).string();
        run_experiment(c);
        const auto doc = json::parse(oracle::read_text(fs::path(c.output_dir) / "summary.json"));
        for (std::size_t jobs : {1, 2}) {
            const auto report = replay_summary(doc, {jobs, false});
            std::string detail;
            for (const auto& d : report.differences) {
                detail += "; " + d;
            }
            o.check(report.identical, fmt(name, ", jobs = ", jobs, ": metrics bit-identical", detail));
        }
    }
    return o;
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "p-bit sigmoid", 5, sigmoid},
        {2, "coupled-pair correlations", 30, pair_correlation},
        {3, "spectral radius scaling", 10, spectral},
        {4, "ridge readout against pseudo-inverse", 0, ridge},
        {5, "Mackey-Glass follower", 300, mg_follow},
        {6, "generative mode scaling", 600, mg_generate},
        {7, "channel equalizer", 300, equalizer},
        {8, "power model", 1, power},
        {9, "Mackey-Glass integrator", 0, mg_integrator},
        {10, "reproducibility", 0, replay},
    };
    int selected = 0;
    if (argc > 1) {
        selected = std::atoi(argv[1]);
        if (selected < 1 || selected > static_cast<int>(criteria.size())) {
            std::cerr << "usage: " << argv[0] << " [criterion 1-" << criteria.size() << "]\n";
            return 2;
        }
    }
    int failures = 0;
    for (const auto& c : criteria) {
        if (selected != 0 && c.id != selected) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string timing = fmt(std::fixed, std::setprecision(2), seconds, " s");
        if (c.limit_seconds > 0) {
            const bool in_time = seconds < c.limit_seconds;
            o.pass = o.pass && in_time;
            timing += fmt(" (limit ", c.limit_seconds, " s", in_time ? ")" : ", exceeded)");
        }
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.id << ". " << c.title << " - " << timing << '\n';
        for (const auto& n : o.notes) {
            std::cout << "         " << n << '\n';
        }
        std::cout.flush();
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
