#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pbitrc/metrics.hpp"
#include "pbitrc/power.hpp"
#include "pbitrc/readout.hpp"
#include "pbitrc/reservoir.hpp"
#include "pbitrc/tasks.hpp"

namespace pbitrc {

enum class Task { MgFollow, MgGenerate, Equalize, PbitStats, Power };

std::string to_string(Task task);
/// Throws ConfigError for unknown task names.
Task parse_task(std::string_view token);

/// Mackey-Glass source for the two time-series tasks. The integration length
/// is derived from the number of reservoir steps the task needs.
struct MackeyGlassTask {
    MackeyGlassParams params;
    std::size_t sample_every = 10; ///< integration steps per reservoir step
    std::size_t discard_steps = 200; ///< leading reservoir-step samples dropped (initial transient)
};

struct ChannelTask {
    ChannelParams params;
    bool normalize_input = true;
};

struct PbitStatsTask {
    double input_min = -2.0;
    double input_max = 2.0;
    double input_step = 0.5;
    std::uint64_t samples = 100000;

    std::vector<double> grid() const;
};

struct ExperimentConfig {
    Task task = Task::MgFollow;
    std::vector<std::uint64_t> seeds{1};
    std::string output_dir;          ///< empty -> "runs/<task>"

    std::size_t train_steps = 5000;  ///< driven steps used for training, washout included
    std::size_t test_steps = 2000;
    std::size_t prime_steps = 100;
    std::size_t free_horizon = 500;
    std::size_t free_score_steps = 200;
    std::optional<std::size_t> target_shift; ///< resolved: 0 for mg-follow, 1 for mg-generate

    ReservoirConfig reservoir;       ///< seed is replaced by each run seed
    bool feature_bias = true;
    bool feature_input = true;
    RidgeConfig ridge;
    NmseNormalization nmse_normalization = NmseNormalization::Variance;
    std::vector<std::string> metrics; ///< empty -> task default
    bool save_weights = false;

    MackeyGlassTask mackey_glass;
    ChannelTask channel;
    DeviceParams device;
    PbitStatsTask pbit_stats;

    /// Default configuration of a task. Harness defaults differ from the
    /// library defaults in fb_scale = 0 and, for equalize, leak = gain = 1
    /// with rho_target = 0.5.
    static ExperimentConfig defaults(Task task);

    /// Fill optional fields with their task-specific values and check every
    /// invariant. Throws ConfigError naming the offending field.
    void resolve();

    std::size_t resolved_target_shift() const;
    std::string resolved_output_dir() const;
    std::vector<std::string> resolved_metrics() const;
};

/// Parse a configuration document. Unknown keys, wrong types and sections
/// that do not belong to the task are ConfigErrors. If `task_hint` is given
/// and the document has no "task", the hint is used; a conflicting "task" is
/// an error. The result is resolved.
ExperimentConfig config_from_json(const nlohmann::json& doc, std::optional<Task> task_hint = std::nullopt);

/// Fully materialized echo: every field, including defaults, so that
/// config_from_json(config_to_json(c)) reproduces the run.
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Apply "a.b.c=value" to a raw document. `value` is parsed as JSON when
/// possible, otherwise taken as a string.
void apply_override(nlohmann::json& doc, std::string_view assignment);

} // namespace pbitrc
