#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pbitrc/config.hpp"

namespace pbitrc {

/// Outcome of one seed. `metrics` holds only scalars (nmse, ser, count, ...).
struct SeedResult {
    std::uint64_t seed = 0;
    nlohmann::json metrics = nlohmann::json::object();
    std::vector<std::string> artifacts;
};

struct RunSummary {
    ExperimentConfig config;
    std::vector<SeedResult> runs;
    double wall_clock_seconds = 0.0;
    std::vector<std::string> artifacts; ///< files written by the coordinator
};

struct ExperimentOptions {
    std::size_t jobs = 1;     ///< seeds evaluated concurrently
    bool write_files = true;  ///< per-seed traces, datasets and summary.json
};

/// One seed of the configured task. Writes that seed's artifacts into the
/// output directory when `write_files` is set.
SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed, bool write_files);

/// All seeds, then the aggregate. With `write_files`, summary.json (and the
/// pooled pbit_stats.csv or power.json) are written last.
RunSummary run_experiment(const ExperimentConfig& config, const ExperimentOptions& options = {});

/// {"config": echo, "runs": [...], "aggregate": {...}, "wall_clock_seconds": s, "artifacts": [...]}
nlohmann::json summary_to_json(const RunSummary& summary);

struct ReplayReport {
    bool identical = false;
    std::vector<std::string> differences;
    RunSummary rerun;
};

/// Re-run the config echo of a summary document and compare every per-seed
/// metric bit for bit. `output_dir`, when non-empty, replaces the echoed one.
ReplayReport replay_summary(const nlohmann::json& summary, const ExperimentOptions& options = {},
                            const std::string& output_dir = {});

/// The Mackey-Glass series sampled at reservoir-step spacing, before normalization.
std::vector<double> mackey_glass_samples(const MackeyGlassTask& task, std::size_t length);

} // namespace pbitrc
