#include "pbitrc/reservoir.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "pbitrc/error.hpp"
#include "pbitrc/rng.hpp"

namespace pbitrc {

namespace {

Matrix uniform_dense(Eigen::Index rows, Eigen::Index cols, double scale, CounterEngine& rng) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = scale * rng.uniform(-1.0, 1.0);
        }
    }
    return m;
}

void check_dims(const WeightSet& w, const ReservoirConfig& config) {
    const auto n = static_cast<Eigen::Index>(config.size);
    if (w.w_self.rows() != n || w.w_self.cols() != n || w.w_in.rows() != n || w.w_fb.rows() != n ||
        w.bias.size() != n) {
        throw DomainError("weight set does not match reservoir size " + std::to_string(config.size));
    }
    if (w.w_in.cols() != static_cast<Eigen::Index>(config.inputs) ||
        w.w_fb.cols() != static_cast<Eigen::Index>(config.outputs)) {
        throw DomainError("weight set does not match configured input/output widths");
    }
}

} // namespace

void ReservoirConfig::validate() const {
    if (size < 1) {
        throw DomainError("reservoir size must be at least 1");
    }
    if (inputs < 1 || outputs < 1) {
        throw DomainError("reservoir needs at least one input and one output");
    }
    if (!(rho_target > 0.0 && rho_target < 1.0)) {
        throw DomainError("rho_target must lie in (0, 1)");
    }
    if (!(density > 0.0 && density <= 1.0)) {
        throw DomainError("density must lie in (0, 1]");
    }
    for (double s : {input_scale, fb_scale, bias_scale}) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw DomainError("weight scales must be finite and non-negative");
        }
    }
    node.validate();
}

WeightSet build_weights(const ReservoirConfig& config, const SpectralOptions& spectral) {
    config.validate();
    const auto n = static_cast<Eigen::Index>(config.size);

    CounterEngine self_rng(config.seed, RngDomain::Weights, 0);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(config.density * static_cast<double>(n * n) * 1.2) + 4);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const bool keep = self_rng.uniform01() < config.density;
            const double value = self_rng.uniform(-1.0, 1.0);
            if (keep && value != 0.0) {
                entries.emplace_back(i, j, value);
            }
        }
    }
    if (entries.empty()) {
        throw ConstructionError("W_self draw is all zero (N=" + std::to_string(config.size) +
                                ", density=" + std::to_string(config.density) +
                                "); choose a different seed or a larger density");
    }
    SparseMatrix raw(n, n);
    raw.setFromTriplets(entries.begin(), entries.end());
    raw.makeCompressed();

    WeightSet w;
    try {
        w.w_self = scale_spectral_radius(raw, config.rho_target, spectral);
    } catch (const ConvergenceError&) {
        throw;
    } catch (const NumericError&) {
        throw ConstructionError("W_self draw is nilpotent (N=" + std::to_string(config.size) +
                                ", density=" + std::to_string(config.density) +
                                "); choose a different seed or a larger density");
    }
    w.w_self.makeCompressed();

    CounterEngine in_rng(config.seed, RngDomain::Weights, 1);
    CounterEngine fb_rng(config.seed, RngDomain::Weights, 2);
    CounterEngine bias_rng(config.seed, RngDomain::Weights, 3);
    w.w_in = uniform_dense(n, static_cast<Eigen::Index>(config.inputs), config.input_scale, in_rng);
    w.w_fb = uniform_dense(n, static_cast<Eigen::Index>(config.outputs), config.fb_scale, fb_rng);
    w.bias = uniform_dense(n, 1, config.bias_scale, bias_rng).col(0);
    return w;
}

ReservoirState zero_state(const ReservoirConfig& config) {
    ReservoirState s;
    s.x = Vector::Zero(static_cast<Eigen::Index>(config.size));
    s.m = Eigen::VectorXi::Zero(static_cast<Eigen::Index>(config.size));
    s.y_prev = Vector::Zero(static_cast<Eigen::Index>(config.outputs));
    return s;
}

void reservoir_step(ReservoirState& state, const Eigen::Ref<const Vector>& input, const WeightSet& weights,
                    const ReservoirConfig& config) {
    const Eigen::Index n = weights.size();
    if (input.size() != weights.w_in.cols()) {
        throw DomainError("input has " + std::to_string(input.size()) + " entries, W_in expects " +
                          std::to_string(weights.w_in.cols()));
    }
    if (state.x.size() != n || state.y_prev.size() != weights.w_fb.cols()) {
        throw DomainError("reservoir state does not match the weight set");
    }
    if (state.m.size() != n) {
        state.m = Eigen::VectorXi::Zero(n);
    }
    Vector drive = weights.w_self * state.x;
    drive.noalias() += weights.w_in * input;
    drive.noalias() += weights.w_fb * state.y_prev;
    drive += weights.bias;

    const std::uint64_t next = state.step + 1;
    const PBitParams& node = config.node;
    for (Eigen::Index i = 0; i < n; ++i) {
        const NodeUpdate u = node_update(state.x[i], drive[i], node,
                                         RngStream{config.seed, static_cast<std::uint64_t>(i), next});
        state.x[i] = u.x;
        state.m[i] = u.spin;
    }
    state.step = next;
}

FeatureLayout make_layout(const ReservoirConfig& config, bool bias, bool input) {
    return FeatureLayout{bias, config.size, input, config.inputs};
}

void write_features(const ReservoirState& state, const Eigen::Ref<const Vector>& input,
                    const FeatureLayout& layout, Eigen::Ref<Vector> row) {
    if (static_cast<std::size_t>(row.size()) != layout.width() ||
        static_cast<std::size_t>(state.x.size()) != layout.nodes ||
        (layout.input && static_cast<std::size_t>(input.size()) != layout.inputs)) {
        throw DomainError("feature row does not match layout");
    }
    Eigen::Index k = 0;
    if (layout.bias) {
        row[k++] = 1.0;
    }
    row.segment(k, state.x.size()) = state.x;
    k += state.x.size();
    if (layout.input) {
        row.segment(k, input.size()) = input;
    }
}

Matrix run_teacher_forced(const WeightSet& weights, const ReservoirConfig& config, const Matrix& inputs,
                          const std::optional<Matrix>& feedback_targets, std::size_t washout,
                          const FeatureLayout& layout) {
    check_dims(weights, config);
    const auto steps = static_cast<std::size_t>(inputs.rows());
    if (washout >= steps) {
        throw DomainError("washout (" + std::to_string(washout) + ") must be shorter than the input (" +
                          std::to_string(steps) + " steps)");
    }
    if (inputs.cols() != static_cast<Eigen::Index>(config.inputs)) {
        throw DomainError("input matrix has the wrong number of columns");
    }
    if (feedback_targets && (feedback_targets->rows() != inputs.rows() ||
                             feedback_targets->cols() != static_cast<Eigen::Index>(config.outputs))) {
        throw DomainError("feedback targets must be T x n_y");
    }
    if (layout.nodes != config.size || layout.inputs != config.inputs) {
        throw DomainError("feature layout does not match the reservoir");
    }

    Matrix features(static_cast<Eigen::Index>(steps - washout), static_cast<Eigen::Index>(layout.width()));
    ReservoirState state = zero_state(config);
    Vector row(static_cast<Eigen::Index>(layout.width()));
    for (std::size_t t = 0; t < steps; ++t) {
        if (feedback_targets && t > 0) {
            state.y_prev = feedback_targets->row(static_cast<Eigen::Index>(t - 1)).transpose();
        }
        const Vector u = inputs.row(static_cast<Eigen::Index>(t)).transpose();
        reservoir_step(state, u, weights, config);
        if (t >= washout) {
            write_features(state, u, layout, row);
            features.row(static_cast<Eigen::Index>(t - washout)) = row.transpose();
        }
    }
    return features;
}

Matrix run_free(const WeightSet& weights, const ReservoirConfig& config, const ReadoutWeights& readout,
                const Matrix& prime, std::size_t horizon) {
    check_dims(weights, config);
    if (!readout.trained()) {
        throw DomainError("run_free needs a trained readout");
    }
    if (readout.layout.nodes != config.size || readout.layout.inputs != config.inputs ||
        static_cast<std::size_t>(readout.w_out.cols()) != readout.layout.width()) {
        throw DomainError("readout feature layout does not match the reservoir");
    }
    if (readout.outputs() != static_cast<Eigen::Index>(config.outputs) || config.outputs != config.inputs) {
        throw DomainError("free running needs n_y == n_u and a readout with n_y outputs");
    }
    if (prime.cols() != static_cast<Eigen::Index>(config.inputs)) {
        throw DomainError("priming signal has the wrong number of columns");
    }

    const FeatureLayout& layout = readout.layout;
    ReservoirState state = zero_state(config);
    Vector row(static_cast<Eigen::Index>(layout.width()));
    Vector y = Vector::Zero(static_cast<Eigen::Index>(config.outputs));
    for (Eigen::Index t = 0; t < prime.rows(); ++t) {
        const Vector u = prime.row(t).transpose();
        reservoir_step(state, u, weights, config);
        write_features(state, u, layout, row);
        y = readout.w_out * row;
        state.y_prev = y;
    }

    Matrix out(static_cast<Eigen::Index>(horizon), static_cast<Eigen::Index>(config.outputs));
    for (std::size_t t = 0; t < horizon; ++t) {
        const Vector u = y;
        reservoir_step(state, u, weights, config);
        write_features(state, u, layout, row);
        y = readout.w_out * row;
        if (!y.allFinite()) {
            throw NumericError("free-running output diverged at step " + std::to_string(t));
        }
        state.y_prev = y;
        out.row(static_cast<Eigen::Index>(t)) = y.transpose();
    }
    return out;
}

} // namespace pbitrc
