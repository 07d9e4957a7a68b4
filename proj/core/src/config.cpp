#include "pbitrc/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pbitrc/error.hpp"

namespace pbitrc {

using nlohmann::json;

std::string to_string(Task task) {
    switch (task) {
    case Task::MgFollow: return "mg-follow";
    case Task::MgGenerate: return "mg-generate";
    case Task::Equalize: return "equalize";
    case Task::PbitStats: return "pbit-stats";
    case Task::Power: return "power";
    }
    return "unknown";
}

Task parse_task(std::string_view token) {
    for (Task t : {Task::MgFollow, Task::MgGenerate, Task::Equalize, Task::PbitStats, Task::Power}) {
        if (token == to_string(t)) {
            return t;
        }
    }
    throw ConfigError("task", "unknown task '" + std::string(token) +
                                  "' (expected mg-follow, mg-generate, equalize, pbit-stats or power)");
}

namespace {

bool is_mg(Task t) { return t == Task::MgFollow || t == Task::MgGenerate; }
bool uses_reservoir(Task t) { return is_mg(t) || t == Task::Equalize; }

std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

// Reads an object field by field and rejects whatever was not consumed.
class Reader {
  public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) {
            throw ConfigError(path_, "must be a JSON object");
        }
    }

    bool has(const char* key) const { return obj_.contains(key); }

    const json* take(const char* key) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void read(const char* key, double& out) {
        if (const json* v = take(key)) {
            if (!v->is_number()) {
                throw ConfigError(join(path_, key), "expected a number");
            }
            out = v->get<double>();
            if (!std::isfinite(out)) {
                throw ConfigError(join(path_, key), "must be finite");
            }
        }
    }

    void read(const char* key, std::optional<double>& out) {
        if (const json* v = take(key)) {
            if (v->is_null()) {
                out.reset();
                return;
            }
            double d = 0.0;
            read_value(key, *v, d);
            out = d;
        }
    }

    void read(const char* key, std::size_t& out) {
        if (const json* v = take(key)) {
            out = unsigned_value(key, *v);
        }
    }

    void read(const char* key, std::optional<std::size_t>& out) {
        if (const json* v = take(key)) {
            if (v->is_null()) {
                out.reset();
            } else {
                out = unsigned_value(key, *v);
            }
        }
    }

    void read_u64(const char* key, std::uint64_t& out) {
        if (const json* v = take(key)) {
            out = unsigned_value(key, *v);
        }
    }

    void read(const char* key, bool& out) {
        if (const json* v = take(key)) {
            if (!v->is_boolean()) {
                throw ConfigError(join(path_, key), "expected true or false");
            }
            out = v->get<bool>();
        }
    }

    void read(const char* key, std::string& out) {
        if (const json* v = take(key)) {
            if (!v->is_string()) {
                throw ConfigError(join(path_, key), "expected a string");
            }
            out = v->get<std::string>();
        }
    }

    void read(const char* key, std::vector<double>& out) {
        if (const json* v = take(key)) {
            if (!v->is_array()) {
                throw ConfigError(join(path_, key), "expected an array of numbers");
            }
            out.clear();
            for (const json& e : *v) {
                double d = 0.0;
                read_value(key, e, d);
                out.push_back(d);
            }
        }
    }

    template <std::size_t N>
    void read(const char* key, std::array<double, N>& out) {
        if (const json* v = take(key)) {
            if (!v->is_array() || v->size() != N) {
                throw ConfigError(join(path_, key), "expected an array of exactly " + std::to_string(N) + " numbers");
            }
            for (std::size_t i = 0; i < N; ++i) {
                read_value(key, (*v)[i], out[i]);
            }
        }
    }

    template <class Enum, class Parse>
    void read_enum(const char* key, Enum& out, Parse parse) {
        std::string token;
        if (has(key)) {
            read(key, token);
            try {
                out = parse(token);
            } catch (const DomainError& e) {
                throw ConfigError(join(path_, key), e.what());
            }
        } else {
            take(key);
        }
    }

    Reader section(const char* key) {
        const json* v = take(key);
        static const json empty = json::object();
        return Reader(v ? *v : empty, join(path_, key));
    }

    const std::string& path() const { return path_; }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (!seen_.count(key)) {
                throw ConfigError(join(path_, key), "unknown key");
            }
        }
    }

  private:
    void read_value(const char* key, const json& v, double& out) const {
        if (!v.is_number()) {
            throw ConfigError(join(path_, key), "expected a number");
        }
        out = v.get<double>();
        if (!std::isfinite(out)) {
            throw ConfigError(join(path_, key), "must be finite");
        }
    }

    std::uint64_t unsigned_value(const char* key, const json& v) const {
        if (v.is_number_unsigned()) {
            return v.get<std::uint64_t>();
        }
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
            return static_cast<std::uint64_t>(v.get<std::int64_t>());
        }
        throw ConfigError(join(path_, key), "expected a non-negative integer");
    }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

void forbid(const Reader& r, std::initializer_list<const char*> keys, Task task) {
    for (const char* key : keys) {
        if (r.has(key)) {
            throw ConfigError(key, "not used by task " + to_string(task));
        }
    }
}

void read_reservoir(Reader r, ReservoirConfig& c) {
    r.read("size", c.size);
    r.read("rho_target", c.rho_target);
    r.read("density", c.density);
    r.read("input_scale", c.input_scale);
    r.read("fb_scale", c.fb_scale);
    r.read("bias_scale", c.bias_scale);
    Reader node = r.section("node");
    node.read_enum("kind", c.node.kind, parse_node_kind);
    node.read("leak", c.node.leak);
    node.read("gain", c.node.gain);
    node.finish();
    r.finish();
}

void read_mackey_glass(Reader r, MackeyGlassTask& m) {
    r.read("beta", m.params.beta);
    r.read("gamma", m.params.gamma);
    r.read("exponent", m.params.exponent);
    r.read("delay", m.params.delay);
    r.read("dt", m.params.dt);
    r.read("history", m.params.history);
    r.read_enum("interpolation", m.params.interpolation, parse_delay_interpolation);
    r.read("sample_every", m.sample_every);
    r.read("discard_steps", m.discard_steps);
    r.finish();
}

void read_channel(Reader r, ChannelTask& c) {
    r.read("taps", c.params.taps);
    r.read("poly", c.params.poly);
    r.read("noise_halfwidth", c.params.noise_halfwidth);
    r.read("alphabet", c.params.alphabet);
    r.read("output_delay", c.params.output_delay);
    r.read_enum("composition", c.params.composition, parse_channel_composition);
    r.read("normalize_input", c.normalize_input);
    r.finish();
}

void read_device(Reader r, DeviceParams& d) {
    r.read("spm_barrier_kt", d.spm_barrier_kt);
    r.read("spm_radius_nm", d.spm_radius_nm);
    r.read("spm_thickness_nm", d.spm_thickness_nm);
    r.read("gshe_theta", d.gshe_theta);
    r.read("gshe_length_nm", d.gshe_length_nm);
    r.read("gshe_width_nm", d.gshe_width_nm);
    r.read("gshe_thickness_nm", d.gshe_thickness_nm);
    r.read("gshe_resistivity_uohm_cm", d.gshe_resistivity_uohm_cm);
    r.read("mtj_tmr", d.mtj_tmr);
    r.read("mtj_ra_ohm_um2", d.mtj_ra_ohm_um2);
    r.read("r_up_kohm", d.r_up_kohm);
    r.read("i_write_ua", d.i_write_ua);
    r.read("vdd_v", d.vdd_v);
    r.read("buffer_power_uw", d.buffer_power_uw);
    r.finish();
}

void read_pbit_stats(Reader r, PbitStatsTask& p) {
    r.read("input_min", p.input_min);
    r.read("input_max", p.input_max);
    r.read("input_step", p.input_step);
    r.read_u64("samples", p.samples);
    r.finish();
}

template <class Fn>
void rethrow_as_config(const char* field, Fn&& fn) {
    try {
        fn();
    } catch (const DomainError& e) {
        throw ConfigError(field, e.what());
    }
}

} // namespace

std::vector<double> PbitStatsTask::grid() const {
    const auto count = static_cast<std::size_t>(std::floor((input_max - input_min) / input_step + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = input_min + static_cast<double>(i) * input_step;
    }
    return out;
}

ExperimentConfig ExperimentConfig::defaults(Task task) {
    ExperimentConfig c;
    c.task = task;
    c.reservoir.fb_scale = 0.0;
    if (task == Task::Equalize) {
        // a leaky filter smears the two-symbol delay the target needs
        c.reservoir.node.leak = 1.0;
        c.reservoir.node.gain = 1.0;
        c.reservoir.rho_target = 0.5;
    }
    return c;
}

std::size_t ExperimentConfig::resolved_target_shift() const {
    return target_shift ? *target_shift : (task == Task::MgGenerate ? 1 : 0);
}

std::string ExperimentConfig::resolved_output_dir() const {
    return output_dir.empty() ? "runs/" + to_string(task) : output_dir;
}

std::vector<std::string> ExperimentConfig::resolved_metrics() const {
    if (!metrics.empty()) {
        return metrics;
    }
    switch (task) {
    case Task::MgFollow:
    case Task::MgGenerate: return {"nmse"};
    case Task::Equalize: return {"ser", "nmse"};
    default: return {};
    }
}

void ExperimentConfig::resolve() {
    if (seeds.empty()) {
        throw ConfigError("seeds", "at least one seed is required");
    }
    if (task == Task::Power) {
        rethrow_as_config("device", [&] { device.validate(); });
        return;
    }
    if (task == Task::PbitStats) {
        if (!(pbit_stats.input_step > 0.0) || pbit_stats.input_max < pbit_stats.input_min) {
            throw ConfigError("pbit_stats", "need input_step > 0 and input_max >= input_min");
        }
        if (pbit_stats.samples < 2) {
            throw ConfigError("pbit_stats.samples", "need at least two samples per grid point");
        }
        return;
    }

    reservoir.inputs = 1;
    reservoir.outputs = 1;
    rethrow_as_config("reservoir", [&] { reservoir.validate(); });
    if (train_steps <= ridge.washout) {
        throw ConfigError("train_steps", "must exceed ridge.washout (" + std::to_string(ridge.washout) + ")");
    }
    if (test_steps < 2) {
        throw ConfigError("test_steps", "must be at least 2");
    }
    if (!(ridge.relative_lambda >= 0.0)) {
        throw ConfigError("ridge.relative_lambda", "must be non-negative");
    }
    if (ridge.lambda && !(*ridge.lambda >= 0.0)) {
        throw ConfigError("ridge.lambda", "must be non-negative");
    }

    for (const auto& m : metrics) {
        if (m != "nmse" && m != "ser") {
            throw ConfigError("metrics", "unknown metric '" + m + "' (expected nmse or ser)");
        }
        if (m == "ser" && is_mg(task)) {
            throw ConfigError("metrics", "ser is not defined for task " + to_string(task) +
                                             " (the signal has no symbol alphabet)");
        }
    }

    if (is_mg(task)) {
        rethrow_as_config("mackey_glass", [&] { mackey_glass.params.validate(); });
        if (mackey_glass.sample_every < 1) {
            throw ConfigError("mackey_glass.sample_every", "must be at least 1");
        }
    }
    if (task == Task::MgGenerate) {
        if (prime_steps < 1) {
            throw ConfigError("prime_steps", "must be at least 1");
        }
        if (free_horizon < 2) {
            throw ConfigError("free_horizon", "must be at least 2");
        }
        if (free_score_steps < 2 || free_score_steps > free_horizon) {
            throw ConfigError("free_score_steps", "must lie in [2, free_horizon]");
        }
    }
    if (task == Task::Equalize) {
        rethrow_as_config("channel", [&] { channel.params.validate(); });
    }
    target_shift = resolved_target_shift();
    metrics = resolved_metrics();
}

ExperimentConfig config_from_json(const json& doc, std::optional<Task> task_hint) {
    Reader top(doc, "");
    Task task;
    if (top.has("task")) {
        std::string token;
        top.read("task", token);
        task = parse_task(token);
        if (task_hint && *task_hint != task) {
            throw ConfigError("task", "config is for '" + token + "' but '" + to_string(*task_hint) +
                                          "' was requested");
        }
    } else if (task_hint) {
        top.take("task");
        task = *task_hint;
    } else {
        throw ConfigError("task", "missing");
    }

    ExperimentConfig c = ExperimentConfig::defaults(task);
    if (const json* seeds = top.take("seeds")) {
        if (!seeds->is_array()) {
            throw ConfigError("seeds", "expected an array of non-negative integers");
        }
        c.seeds.clear();
        for (const json& s : *seeds) {
            if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
                throw ConfigError("seeds", "expected an array of non-negative integers");
            }
            c.seeds.push_back(s.get<std::uint64_t>());
        }
    }
    top.read("output_dir", c.output_dir);

    if (uses_reservoir(task)) {
        top.read("train_steps", c.train_steps);
        top.read("test_steps", c.test_steps);
        top.read("save_weights", c.save_weights);
        read_reservoir(top.section("reservoir"), c.reservoir);
        Reader features = top.section("features");
        features.read("bias", c.feature_bias);
        features.read("input", c.feature_input);
        features.finish();
        Reader ridge = top.section("ridge");
        ridge.read("lambda", c.ridge.lambda);
        ridge.read("relative_lambda", c.ridge.relative_lambda);
        ridge.read("washout", c.ridge.washout);
        ridge.finish();
        top.read_enum("nmse_normalization", c.nmse_normalization, parse_nmse_normalization);
        if (const json* m = top.take("metrics")) {
            if (!m->is_array()) {
                throw ConfigError("metrics", "expected an array of metric names");
            }
            for (const json& e : *m) {
                if (!e.is_string()) {
                    throw ConfigError("metrics", "expected an array of metric names");
                }
                c.metrics.push_back(e.get<std::string>());
            }
        }
    } else {
        forbid(top, {"train_steps", "test_steps", "save_weights", "reservoir", "features", "ridge",
                     "nmse_normalization", "metrics"},
               task);
    }

    if (is_mg(task)) {
        top.read("target_shift", c.target_shift);
        read_mackey_glass(top.section("mackey_glass"), c.mackey_glass);
    } else {
        forbid(top, {"target_shift", "mackey_glass"}, task);
    }
    if (task == Task::MgGenerate) {
        top.read("prime_steps", c.prime_steps);
        top.read("free_horizon", c.free_horizon);
        top.read("free_score_steps", c.free_score_steps);
    } else {
        forbid(top, {"prime_steps", "free_horizon", "free_score_steps"}, task);
    }
    if (task == Task::Equalize) {
        read_channel(top.section("channel"), c.channel);
    } else {
        forbid(top, {"channel"}, task);
    }
    if (task == Task::Power) {
        read_device(top.section("device"), c.device);
    } else {
        forbid(top, {"device"}, task);
    }
    if (task == Task::PbitStats) {
        read_pbit_stats(top.section("pbit_stats"), c.pbit_stats);
    } else {
        forbid(top, {"pbit_stats"}, task);
    }
    top.finish();
    c.resolve();
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json out{{"task", to_string(c.task)}, {"seeds", c.seeds}, {"output_dir", c.resolved_output_dir()}};
    const Task task = c.task;
    if (uses_reservoir(task)) {
        const ReservoirConfig& r = c.reservoir;
        out["train_steps"] = c.train_steps;
        out["test_steps"] = c.test_steps;
        out["save_weights"] = c.save_weights;
        out["reservoir"] = {{"size", r.size},
                            {"rho_target", r.rho_target},
                            {"density", r.density},
                            {"input_scale", r.input_scale},
                            {"fb_scale", r.fb_scale},
                            {"bias_scale", r.bias_scale},
                            {"node", {{"kind", to_string(r.node.kind)}, {"leak", r.node.leak}, {"gain", r.node.gain}}}};
        out["features"] = {{"bias", c.feature_bias}, {"input", c.feature_input}};
        out["ridge"] = {{"lambda", c.ridge.lambda ? json(*c.ridge.lambda) : json(nullptr)},
                        {"relative_lambda", c.ridge.relative_lambda},
                        {"washout", c.ridge.washout}};
        out["nmse_normalization"] = to_string(c.nmse_normalization);
        out["metrics"] = c.resolved_metrics();
    }
    if (is_mg(task)) {
        const MackeyGlassParams& p = c.mackey_glass.params;
        out["target_shift"] = c.resolved_target_shift();
        out["mackey_glass"] = {{"beta", p.beta},
                               {"gamma", p.gamma},
                               {"exponent", p.exponent},
                               {"delay", p.delay},
                               {"dt", p.dt},
                               {"history", p.history},
                               {"interpolation", to_string(p.interpolation)},
                               {"sample_every", c.mackey_glass.sample_every},
                               {"discard_steps", c.mackey_glass.discard_steps}};
    }
    if (task == Task::MgGenerate) {
        out["prime_steps"] = c.prime_steps;
        out["free_horizon"] = c.free_horizon;
        out["free_score_steps"] = c.free_score_steps;
    }
    if (task == Task::Equalize) {
        const ChannelParams& p = c.channel.params;
        out["channel"] = {{"taps", p.taps},
                          {"poly", p.poly},
                          {"noise_halfwidth", p.noise_halfwidth},
                          {"alphabet", p.alphabet},
                          {"output_delay", p.output_delay},
                          {"composition", to_string(p.composition)},
                          {"normalize_input", c.channel.normalize_input}};
    }
    if (task == Task::Power) {
        const DeviceParams& d = c.device;
        out["device"] = {{"spm_barrier_kt", d.spm_barrier_kt},
                         {"spm_radius_nm", d.spm_radius_nm},
                         {"spm_thickness_nm", d.spm_thickness_nm},
                         {"gshe_theta", d.gshe_theta},
                         {"gshe_length_nm", d.gshe_length_nm},
                         {"gshe_width_nm", d.gshe_width_nm},
                         {"gshe_thickness_nm", d.gshe_thickness_nm},
                         {"gshe_resistivity_uohm_cm", d.gshe_resistivity_uohm_cm},
                         {"mtj_tmr", d.mtj_tmr},
                         {"mtj_ra_ohm_um2", d.mtj_ra_ohm_um2},
                         {"r_up_kohm", d.r_up_kohm},
                         {"i_write_ua", d.i_write_ua},
                         {"vdd_v", d.vdd_v},
                         {"buffer_power_uw", d.buffer_power_uw}};
    }
    if (task == Task::PbitStats) {
        const PbitStatsTask& p = c.pbit_stats;
        out["pbit_stats"] = {{"input_min", p.input_min},
                             {"input_max", p.input_max},
                             {"input_step", p.input_step},
                             {"samples", p.samples}};
    }
    return out;
}

void apply_override(json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("--override", "expected key=value, got '" + std::string(assignment) + "'");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) {
        value = raw;
    }
    if (!doc.is_object()) {
        doc = json::object();
    }
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) {
            throw ConfigError("--override", "empty path component in '" + key + "'");
        }
        if (dot == std::string::npos) {
            (*node)[part] = std::move(value);
            return;
        }
        json& child = (*node)[part];
        if (child.is_null()) {
            child = json::object();
        } else if (!child.is_object()) {
            throw ConfigError(key.substr(0, dot), "is not an object; cannot override '" + key + "'");
        }
        node = &child;
        start = dot + 1;
    }
}

} // namespace pbitrc
