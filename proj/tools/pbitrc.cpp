// pbitrc: batch runner for p-bit reservoir experiments.
//
//   pbitrc <task> [--config FILE] [--seed S]... [--out DIR] [--override key=value]... [--jobs N]
//   pbitrc replay SUMMARY.json [--out DIR] [--jobs N]
//   pbitrc defaults <task>
//
// Exit codes: 0 success, 1 I/O failure or replay mismatch, 2 configuration
// error, 3 numeric failure.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pbitrc/config.hpp"
#include "pbitrc/error.hpp"
#include "pbitrc/experiment.hpp"
#include "pbitrc/power.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw pbitrc::ConfigError("--config", "cannot open '" + path + "'");
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw pbitrc::ConfigError("--config", "'" + path + "' is not valid JSON: " + e.what());
    }
}

void print_summary(const pbitrc::RunSummary& summary, std::ostream& os) {
    const auto doc = pbitrc::summary_to_json(summary);
    os << "task " << pbitrc::to_string(summary.config.task) << ", " << summary.runs.size() << " seed(s), "
       << std::fixed << std::setprecision(2) << summary.wall_clock_seconds << " s\n";
    os << std::defaultfloat << std::setprecision(6);
    for (const auto& run : summary.runs) {
        os << "  seed " << run.seed << ':';
        for (const auto& [key, value] : run.metrics.items()) {
            os << ' ' << key << '=' << value.dump();
        }
        os << '\n';
    }
    for (const auto& [key, stats] : doc.at("aggregate").items()) {
        os << "  " << key << ": median " << stats.at("median").get<double>() << ", min "
           << stats.at("min").get<double>() << ", max " << stats.at("max").get<double>() << '\n';
    }
    if (summary.config.task != pbitrc::Task::Power || !summary.artifacts.empty()) {
        os << "  output: " << summary.config.resolved_output_dir() << '\n';
    }
}

struct TaskArgs {
    std::string config_path;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::size_t jobs = 1;
};

int run_task(pbitrc::Task task, const TaskArgs& args) {
    nlohmann::json doc = args.config_path.empty() ? nlohmann::json::object() : read_json_file(args.config_path);
    for (const auto& o : args.overrides) {
        pbitrc::apply_override(doc, o);
    }
    if (!args.seeds.empty()) {
        doc["seeds"] = args.seeds;
    }
    if (!args.out_dir.empty()) {
        doc["output_dir"] = args.out_dir;
    }
    const pbitrc::ExperimentConfig config = pbitrc::config_from_json(doc, task);
    pbitrc::ExperimentOptions options;
    options.jobs = args.jobs;
    const auto summary = pbitrc::run_experiment(config, options);
    if (task == pbitrc::Task::Power) {
        std::cout << pbitrc::format_power_table(pbitrc::power_report(config.device));
    }
    print_summary(summary, std::cout);
    return EXIT_SUCCESS;
}

int run_replay(const std::string& path, const std::string& out_dir, std::size_t jobs) {
    std::ifstream in(path);
    if (!in) {
        throw pbitrc::ConfigError("summary", "cannot open '" + path + "'");
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw pbitrc::ConfigError("summary", std::string("not valid JSON: ") + e.what());
    }
    pbitrc::ExperimentOptions options;
    options.jobs = jobs;
    const auto report = pbitrc::replay_summary(doc, options, out_dir);
    print_summary(report.rerun, std::cout);
    if (report.identical) {
        std::cout << "replay: all metrics bit-identical\n";
        return EXIT_SUCCESS;
    }
    std::cout << "replay: metrics differ\n";
    for (const auto& d : report.differences) {
        std::cout << "  " << d << '\n';
    }
    return kExitFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reservoir computing with stochastic p-bit nodes"};
    app.require_subcommand(1);

    const std::vector<pbitrc::Task> tasks{pbitrc::Task::MgFollow, pbitrc::Task::MgGenerate, pbitrc::Task::Equalize,
                                          pbitrc::Task::PbitStats, pbitrc::Task::Power};
    const std::map<pbitrc::Task, std::string> descriptions{
        {pbitrc::Task::MgFollow, "Mackey-Glass identity follower; reports test NMSE"},
        {pbitrc::Task::MgGenerate, "Mackey-Glass generative (free-running) mode; reports free-run NMSE"},
        {pbitrc::Task::Equalize, "nonlinear channel equalizer; reports symbol error rate"},
        {pbitrc::Task::PbitStats, "p-bit mean spin against tanh(I) over an input grid"},
        {pbitrc::Task::Power, "per-node power dissipation table"},
    };

    TaskArgs args;
    std::map<CLI::App*, pbitrc::Task> task_commands;
    for (pbitrc::Task task : tasks) {
        CLI::App* sub = app.add_subcommand(pbitrc::to_string(task), descriptions.at(task));
        sub->add_option("--config", args.config_path, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", args.seeds, "seed (repeatable); replaces the config's seed list");
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--override", args.overrides, "key.path=value applied to the config (repeatable)");
        sub->add_option("--jobs", args.jobs, "seeds run concurrently")->check(CLI::PositiveNumber);
        task_commands[sub] = task;
    }

    std::string summary_path;
    std::string replay_out;
    std::size_t replay_jobs = 1;
    CLI::App* replay = app.add_subcommand("replay", "re-run a summary.json config echo and compare metrics");
    replay->add_option("summary", summary_path, "summary.json of an earlier run")->required()->check(CLI::ExistingFile);
    replay->add_option("--out", replay_out, "output directory for the re-run");
    replay->add_option("--jobs", replay_jobs, "seeds run concurrently")->check(CLI::PositiveNumber);

    std::string defaults_task;
    CLI::App* defaults = app.add_subcommand("defaults", "print the fully resolved default config of a task");
    defaults->add_option("task", defaults_task, "task name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        for (const auto& [sub, task] : task_commands) {
            if (sub->parsed()) {
                return run_task(task, args);
            }
        }
        if (replay->parsed()) {
            return run_replay(summary_path, replay_out, replay_jobs);
        }
        if (defaults->parsed()) {
            auto config = pbitrc::ExperimentConfig::defaults(pbitrc::parse_task(defaults_task));
            config.resolve();
            std::cout << pbitrc::config_to_json(config).dump(2) << '\n';
            return EXIT_SUCCESS;
        }
    } catch (const pbitrc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const pbitrc::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const pbitrc::DomainError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}
