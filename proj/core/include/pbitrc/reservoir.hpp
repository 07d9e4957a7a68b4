#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "pbitrc/linalg.hpp"
#include "pbitrc/pbit_node.hpp"
#include "pbitrc/readout.hpp"
#include "pbitrc/spectral.hpp"

namespace pbitrc {

struct ReservoirConfig {
    std::size_t size = 100;      ///< N
    std::size_t inputs = 1;      ///< n_u
    std::size_t outputs = 1;     ///< n_y
    double rho_target = 0.9;     ///< spectral radius of W_self after scaling, in (0, 1)
    double density = 0.1;        ///< expected fraction of nonzero W_self entries
    double input_scale = 1.0;    ///< W_in ~ U(-s, s)
    double fb_scale = 1.0;       ///< W_fb ~ U(-s, s)
    double bias_scale = 0.1;     ///< bias ~ U(-s, s)
    PBitParams node;
    std::uint64_t seed = 1;

    void validate() const;
};

struct WeightSet {
    Matrix w_in;         ///< N x n_u
    SparseMatrix w_self; ///< N x N
    Matrix w_fb;         ///< N x n_y
    Vector bias;         ///< N

    Eigen::Index size() const noexcept { return w_self.rows(); }
};

/// Random sparse reservoir: each W_self entry is nonzero with probability
/// `density` and then U(-1, 1); W_self is rescaled to `rho_target`. W_in, W_fb
/// and the bias are dense uniform. Fully determined by `config.seed`.
/// Throws ConstructionError if the W_self draw is nilpotent (e.g. all zero).
WeightSet build_weights(const ReservoirConfig& config, const SpectralOptions& spectral = {});

struct ReservoirState {
    Vector x;           ///< activations
    Eigen::VectorXi m;  ///< last spins (zeros for deterministic nodes)
    Vector y_prev;      ///< previous readout, fed back through W_fb
    std::uint64_t step = 0;
};

ReservoirState zero_state(const ReservoirConfig& config);

/// Advance one time step. Node i draws its noise from (seed, i, step + 1).
/// Net input I = W_in u + W_fb y_prev + W_self x + bias. y_prev is left alone.
void reservoir_step(ReservoirState& state, const Eigen::Ref<const Vector>& input, const WeightSet& weights,
                    const ReservoirConfig& config);

FeatureLayout make_layout(const ReservoirConfig& config, bool bias = true, bool input = true);

/// Fill `row` with [1?, x, u?] according to `layout`.
void write_features(const ReservoirState& state, const Eigen::Ref<const Vector>& input,
                    const FeatureLayout& layout, Eigen::Ref<Vector> row);

/// Drive the reservoir from x = 0 with `inputs` (T x n_u, one row per step) and
/// return the feature rows of steps washout..T-1. With `feedback_targets`
/// (T x n_y), y_prev at step t is the target of step t-1 (teacher forcing).
Matrix run_teacher_forced(const WeightSet& weights, const ReservoirConfig& config, const Matrix& inputs,
                          const std::optional<Matrix>& feedback_targets, std::size_t washout,
                          const FeatureLayout& layout);

/// Prime with `prime` (L x n_u) true inputs, then run `horizon` steps in which
/// the input of each step is the readout of the step before. Returns the
/// horizon x n_y readouts. Requires n_y == n_u.
Matrix run_free(const WeightSet& weights, const ReservoirConfig& config, const ReadoutWeights& readout,
                const Matrix& prime, std::size_t horizon);

} // namespace pbitrc
