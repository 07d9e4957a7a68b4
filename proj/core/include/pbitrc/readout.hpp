#pragma once

#include <cstddef>
#include <optional>

#include "pbitrc/linalg.hpp"

namespace pbitrc {

/// Column layout of a feature row: [1?, x_1..x_N, u_1..u_nu?].
struct FeatureLayout {
    bool bias = true;
    std::size_t nodes = 0;
    bool input = true;
    std::size_t inputs = 0;

    std::size_t width() const noexcept {
        return (bias ? 1 : 0) + nodes + (input ? inputs : 0);
    }
    bool operator==(const FeatureLayout&) const = default;
};

/// Trained linear output map y = W_out f.
struct ReadoutWeights {
    Matrix w_out; ///< outputs x features
    FeatureLayout layout;
    double lambda_used = 0.0;

    bool trained() const noexcept { return w_out.size() > 0; }
    Eigen::Index outputs() const noexcept { return w_out.rows(); }
};

struct RidgeConfig {
    /// Explicit regularization. When empty, lambda = relative_lambda * trace(X'X) / F.
    std::optional<double> lambda;
    double relative_lambda = 1e-6;
    std::size_t washout = 100;
};

/// relative * trace(X'X) / F for a feature matrix X (T x F).
double scale_aware_lambda(const Matrix& features, double relative);

/// Minimizes |X W' - Y|^2 + lambda |W|^2 through a Cholesky solve of the
/// F x F normal equations. If the factorization fails, lambda is raised to at
/// least 1e-12 trace(X'X)/F and then multiplied by 10 up to three times.
/// The lambda that finally succeeded is stored in `lambda_used`.
ReadoutWeights ridge_fit(const Matrix& features, const Matrix& targets, double lambda,
                         const FeatureLayout& layout);

/// Same, with a layout that treats every column as a plain feature.
ReadoutWeights ridge_fit(const Matrix& features, const Matrix& targets, double lambda);

ReadoutWeights ridge_fit(const Matrix& features, const Matrix& targets, const RidgeConfig& config,
                         const FeatureLayout& layout);

/// One feature row -> one output vector.
Vector predict(const ReadoutWeights& readout, const Vector& features);
/// Rows of features -> rows of outputs.
Matrix predict(const ReadoutWeights& readout, const Matrix& features);

} // namespace pbitrc
