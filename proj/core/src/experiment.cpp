#include "pbitrc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <future>
#include <map>

#include "pbitrc/error.hpp"
#include "pbitrc/metrics.hpp"
#include "pbitrc/readout.hpp"
#include "pbitrc/reservoir.hpp"
#include "pbitrc/serialize.hpp"

namespace pbitrc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Matrix column(std::span<const double> values, std::size_t offset, std::size_t count) {
    Matrix m(static_cast<Eigen::Index>(count), 1);
    for (std::size_t i = 0; i < count; ++i) {
        m(static_cast<Eigen::Index>(i), 0) = values[offset + i];
    }
    return m;
}

std::vector<double> to_vector(const Matrix& m) {
    return std::vector<double>(m.data(), m.data() + m.rows());
}

std::string seed_file(const std::string& stem, std::uint64_t seed, const char* ext) {
    return stem + "_" + std::to_string(seed) + ext;
}

struct Trained {
    ReservoirConfig reservoir;
    WeightSet weights;
    ReadoutWeights readout;
    Matrix test_features;
};

// Harvest features over all inputs, fit on the training window.
Trained train_reservoir(const ExperimentConfig& c, std::uint64_t seed, const Matrix& inputs, const Matrix& targets) {
    Trained t;
    t.reservoir = c.reservoir;
    t.reservoir.seed = seed;
    t.weights = build_weights(t.reservoir);
    const FeatureLayout layout = make_layout(t.reservoir, c.feature_bias, c.feature_input);
    const std::size_t washout = c.ridge.washout;
    const Matrix features = run_teacher_forced(t.weights, t.reservoir, inputs, targets, washout, layout);
    const auto train_rows = static_cast<Eigen::Index>(c.train_steps - washout);
    t.readout = ridge_fit(features.topRows(train_rows),
                          targets.middleRows(static_cast<Eigen::Index>(washout), train_rows), c.ridge, layout);
    t.test_features = features.bottomRows(features.rows() - train_rows);
    return t;
}

void maybe_save_weights(const ExperimentConfig& c, const Trained& t, std::uint64_t seed, SeedResult& out) {
    if (!c.save_weights) {
        return;
    }
    json doc = weights_to_json(t.weights);
    doc["readout"] = readout_to_json(t.readout);
    const std::string name = seed_file("weights", seed, ".json");
    write_file_atomic(fs::path(c.resolved_output_dir()) / name, doc.dump());
    out.artifacts.push_back(name);
}

bool wants(const ExperimentConfig& c, const char* metric) {
    const auto m = c.resolved_metrics();
    return std::find(m.begin(), m.end(), metric) != m.end();
}

SeedResult run_mackey_glass(const ExperimentConfig& c, std::uint64_t seed, bool write) {
    const std::size_t shift = c.resolved_target_shift();
    const std::size_t steps = c.train_steps + c.test_steps;
    std::size_t length = steps + shift;
    if (c.task == Task::MgGenerate) {
        length = std::max(length, c.train_steps + c.prime_steps + c.free_horizon + shift);
    }
    const auto raw = mackey_glass_samples(c.mackey_glass, length);
    const auto norm = normalize_signal(std::span<const double>(raw).first(c.train_steps));
    const auto signal = norm.map.apply(raw);

    const Matrix inputs = column(signal, 0, steps);
    const Matrix targets = column(signal, shift, steps);
    const Trained t = train_reservoir(c, seed, inputs, targets);

    SeedResult out;
    out.seed = seed;
    out.metrics["lambda_used"] = t.readout.lambda_used;
    CsvTable trace({"t", "input", "target", "output"});

    if (c.task == Task::MgFollow) {
        const auto y = to_vector(predict(t.readout, t.test_features));
        const auto d = to_vector(targets.bottomRows(static_cast<Eigen::Index>(c.test_steps)));
        out.metrics["nmse"] = nmse(y, d, c.nmse_normalization);
        out.metrics["count"] = y.size();
        for (std::size_t k = 0; k < y.size(); ++k) {
            const std::size_t time = c.train_steps + k;
            trace.add_row({static_cast<double>(time), signal[time], d[k], y[k]});
        }
    } else {
        const Matrix prime = column(signal, c.train_steps, c.prime_steps);
        const auto y = to_vector(run_free(t.weights, t.reservoir, t.readout, prime, c.free_horizon));
        const std::size_t start = c.train_steps + c.prime_steps;
        const std::vector<double> d(signal.begin() + static_cast<std::ptrdiff_t>(start + shift),
                                    signal.begin() + static_cast<std::ptrdiff_t>(start + shift + c.free_horizon));
        const std::size_t score = c.free_score_steps;
        out.metrics["nmse"] = nmse(std::span(y).first(score), std::span(d).first(score), c.nmse_normalization);
        out.metrics["nmse_horizon"] = nmse(y, d, c.nmse_normalization);
        out.metrics["count"] = score;
        for (std::size_t k = 0; k < y.size(); ++k) {
            trace.add_row({static_cast<double>(start + k), signal[start + k], d[k], y[k]});
        }
    }

    if (write) {
        const std::string name = seed_file("trace", seed, ".csv");
        write_file_atomic(fs::path(c.resolved_output_dir()) / name, trace.str());
        out.artifacts.push_back(name);
        maybe_save_weights(c, t, seed, out);
    }
    return out;
}

SeedResult run_equalizer(const ExperimentConfig& c, std::uint64_t seed, bool write) {
    const ChannelParams& p = c.channel.params;
    const std::size_t steps = c.train_steps + c.test_steps;
    const ChannelDataset data = channel_dataset(p, steps + channel_trim(p), seed);

    std::vector<double> u = data.u;
    if (c.channel.normalize_input) {
        u = normalize_signal(std::span<const double>(data.u).first(c.train_steps)).map.apply(data.u);
    }
    const Matrix inputs = column(u, 0, steps);
    const Matrix targets = column(data.target, 0, steps);
    const Trained t = train_reservoir(c, seed, inputs, targets);

    const auto y = to_vector(predict(t.readout, t.test_features));
    const auto d = to_vector(targets.bottomRows(static_cast<Eigen::Index>(c.test_steps)));
    SeedResult out;
    out.seed = seed;
    out.metrics["lambda_used"] = t.readout.lambda_used;
    if (wants(c, "ser")) {
        out.metrics["ser"] = ser(y, d, p.alphabet);
    }
    if (wants(c, "nmse")) {
        out.metrics["nmse"] = nmse(y, d, c.nmse_normalization);
    }
    out.metrics["count"] = y.size();

    if (write) {
        CsvTable trace({"t", "input", "target", "output"});
        for (std::size_t k = 0; k < y.size(); ++k) {
            const std::size_t idx = c.train_steps + k;
            trace.add_row({static_cast<double>(data.first_time + idx), u[idx], d[k], y[k]});
        }
        CsvTable dataset({"t", "d", "q", "u", "target"});
        for (std::size_t k = 0; k < data.size(); ++k) {
            dataset.add_row(
                {static_cast<double>(data.first_time + k), data.d[k], data.q[k], data.u[k], data.target[k]});
        }
        const fs::path dir(c.resolved_output_dir());
        const std::string trace_name = seed_file("trace", seed, ".csv");
        const std::string data_name = seed_file("dataset", seed, ".csv");
        write_file_atomic(dir / trace_name, trace.str());
        write_file_atomic(dir / data_name, dataset.str());
        out.artifacts.push_back(trace_name);
        out.artifacts.push_back(data_name);
        maybe_save_weights(c, t, seed, out);
    }
    return out;
}

std::string sigmoid_csv(const std::vector<SigmoidPoint>& points) {
    CsvTable table({"I", "mean", "std", "tanh_I"});
    for (const auto& p : points) {
        table.add_row({p.input, p.mean, p.stddev, p.tanh_input});
    }
    return table.str();
}

SeedResult run_pbit_stats(const ExperimentConfig& c, std::uint64_t seed, bool write) {
    const auto grid = c.pbit_stats.grid();
    const auto points = sigmoid_sweep(grid, c.pbit_stats.samples, seed);
    double worst = 0.0;
    for (const auto& p : points) {
        const double var = (1.0 - p.tanh_input * p.tanh_input) / static_cast<double>(c.pbit_stats.samples);
        if (var > 0.0) {
            worst = std::max(worst, std::abs(p.mean - p.tanh_input) / std::sqrt(var));
        }
    }
    SeedResult out;
    out.seed = seed;
    out.metrics["max_abs_z"] = worst;
    out.metrics["count"] = points.size();
    if (write) {
        const std::string name = seed_file("pbit_stats", seed, ".csv");
        write_file_atomic(fs::path(c.resolved_output_dir()) / name, sigmoid_csv(points));
        out.artifacts.push_back(name);
    }
    return out;
}

json power_to_json(const PowerBreakdown& p) {
    return json{{"mtj_reader_uw", p.mtj_reader},
                {"gshe_writer_uw", p.gshe_writer},
                {"spintronic_total_uw", p.spintronic_total},
                {"r_up_uw", p.r_up},
                {"buffer_uw", p.buffer},
                {"silicon_total_uw", p.silicon_total},
                {"node_total_uw", p.node_total},
                {"mtj_reader_band_uw", {p.mtj_reader_band.first, p.mtj_reader_band.second}},
                {"r_up_band_uw", {p.r_up_band.first, p.r_up_band.second}},
                {"mtj_resistance_ohm", {p.mtj_resistance_ohm.first, p.mtj_resistance_ohm.second}},
                {"gshe_resistance_ohm", p.gshe_resistance_ohm}};
}

SeedResult run_power(const ExperimentConfig& c, std::uint64_t seed) {
    const PowerBreakdown p = power_report(c.device);
    SeedResult out;
    out.seed = seed;
    out.metrics = {{"node_total_uw", p.node_total},
                   {"gshe_writer_uw", p.gshe_writer},
                   {"mtj_reader_uw", p.mtj_reader},
                   {"r_up_uw", p.r_up}};
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json aggregate(const std::vector<SeedResult>& runs) {
    json out = json::object();
    if (runs.empty()) {
        return out;
    }
    for (const auto& [key, value] : runs.front().metrics.items()) {
        if (!value.is_number()) {
            continue;
        }
        std::vector<double> values;
        for (const auto& r : runs) {
            if (r.metrics.contains(key) && r.metrics.at(key).is_number()) {
                values.push_back(r.metrics.at(key).get<double>());
            }
        }
        if (values.size() != runs.size()) {
            continue;
        }
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        out[key] = {{"median", median(values)}, {"min", *lo}, {"max", *hi}};
    }
    return out;
}

} // namespace

std::vector<double> mackey_glass_samples(const MackeyGlassTask& task, std::size_t length) {
    if (length < 1) {
        throw DomainError("need at least one Mackey-Glass sample");
    }
    MackeyGlassParams p = task.params;
    const std::size_t stride = std::max<std::size_t>(task.sample_every, 1);
    const std::size_t grid_steps = (task.discard_steps + length - 1) * stride;
    p.t_total = static_cast<double>(grid_steps) * p.dt;
    const auto raw = mackey_glass(p);
    if (raw.size() < grid_steps + 1) {
        throw NumericError("Mackey-Glass series is shorter than requested");
    }
    std::vector<double> out(length);
    for (std::size_t i = 0; i < length; ++i) {
        out[i] = raw[(task.discard_steps + i) * stride];
    }
    return out;
}

SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed, bool write_files) {
    switch (config.task) {
    case Task::MgFollow:
    case Task::MgGenerate: return run_mackey_glass(config, seed, write_files);
    case Task::Equalize: return run_equalizer(config, seed, write_files);
    case Task::PbitStats: return run_pbit_stats(config, seed, write_files);
    case Task::Power: return run_power(config, seed);
    }
    throw DomainError("unhandled task");
}

RunSummary run_experiment(const ExperimentConfig& input, const ExperimentOptions& options) {
    RunSummary summary;
    summary.config = input;
    summary.config.resolve();
    const ExperimentConfig& config = summary.config;
    const auto started = std::chrono::steady_clock::now();

    const std::size_t jobs = std::max<std::size_t>(options.jobs, 1);
    summary.runs.resize(config.seeds.size());
    for (std::size_t begin = 0; begin < config.seeds.size(); begin += jobs) {
        const std::size_t end = std::min(config.seeds.size(), begin + jobs);
        std::vector<std::future<SeedResult>> pending;
        for (std::size_t i = begin; i < end; ++i) {
            pending.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run_seed,
                                         std::cref(config), config.seeds[i], options.write_files));
        }
        for (std::size_t i = begin; i < end; ++i) {
            summary.runs[i] = pending[i - begin].get();
        }
    }

    if (options.write_files) {
        const fs::path dir(config.resolved_output_dir());
        if (config.task == Task::PbitStats) {
            // pooled over seeds: every seed contributes the same number of samples
            const auto grid = config.pbit_stats.grid();
            std::vector<double> sums(grid.size(), 0.0);
            for (std::uint64_t seed : config.seeds) {
                const auto pts = sigmoid_sweep(grid, config.pbit_stats.samples, seed);
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    sums[i] += pts[i].mean;
                }
            }
            std::vector<SigmoidPoint> pooled;
            const double n = static_cast<double>(config.pbit_stats.samples * config.seeds.size());
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double mean = sums[i] / static_cast<double>(config.seeds.size());
                pooled.push_back({grid[i], mean, std::sqrt(std::max(0.0, (1.0 - mean * mean) * n / (n - 1.0))),
                                  std::tanh(grid[i])});
            }
            write_file_atomic(dir / "pbit_stats.csv", sigmoid_csv(pooled));
            summary.artifacts.push_back("pbit_stats.csv");
        }
        if (config.task == Task::Power) {
            write_file_atomic(dir / "power.json", power_to_json(power_report(config.device)).dump(2) + "\n");
            summary.artifacts.push_back("power.json");
        }
        summary.artifacts.push_back("summary.json");
        summary.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        write_file_atomic(dir / "summary.json", summary_to_json(summary).dump(2) + "\n");
    } else {
        summary.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }
    return summary;
}

json summary_to_json(const RunSummary& s) {
    json runs = json::array();
    for (const auto& r : s.runs) {
        runs.push_back({{"seed", r.seed}, {"metrics", r.metrics}, {"artifacts", r.artifacts}});
    }
    return json{{"tool", "pbitrc"},
                {"config", config_to_json(s.config)},
                {"runs", std::move(runs)},
                {"aggregate", aggregate(s.runs)},
                {"wall_clock_seconds", s.wall_clock_seconds},
                {"artifacts", s.artifacts}};
}

ReplayReport replay_summary(const json& summary, const ExperimentOptions& options, const std::string& output_dir) {
    if (!summary.is_object() || !summary.contains("config") || !summary.contains("runs")) {
        throw ConfigError("", "not a run summary: expected 'config' and 'runs'");
    }
    json doc = summary.at("config");
    if (!output_dir.empty()) {
        doc["output_dir"] = output_dir;
    }
    const ExperimentConfig config = config_from_json(doc);

    ReplayReport report;
    report.rerun = run_experiment(config, options);
    const json& before = summary.at("runs");
    const json after = summary_to_json(report.rerun).at("runs");
    if (before.size() != after.size()) {
        report.differences.push_back("number of runs differs");
    }
    for (std::size_t i = 0; i < std::min(before.size(), after.size()); ++i) {
        const json& a = before[i];
        const json& b = after[i];
        if (a.value("seed", json()) != b.at("seed")) {
            report.differences.push_back("run " + std::to_string(i) + ": seed differs");
            continue;
        }
        const json& ma = a.at("metrics");
        const json& mb = b.at("metrics");
        for (const auto& [key, value] : ma.items()) {
            if (!mb.contains(key)) {
                report.differences.push_back("seed " + b.at("seed").dump() + ": metric '" + key + "' missing");
            } else if (value.is_number() && mb.at(key).is_number()
                           ? value.get<double>() != mb.at(key).get<double>()
                           : value != mb.at(key)) {
                report.differences.push_back("seed " + b.at("seed").dump() + ": " + key + " " + value.dump() +
                                             " -> " + mb.at(key).dump());
            }
        }
        for (const auto& [key, value] : mb.items()) {
            if (!ma.contains(key)) {
                report.differences.push_back("seed " + b.at("seed").dump() + ": new metric '" + key + "'");
            }
        }
    }
    report.identical = report.differences.empty();
    return report;
}

} // namespace pbitrc
