#include "pbitrc/readout.hpp"

#include <cmath>
#include <string>

#include "pbitrc/error.hpp"

namespace pbitrc {

namespace {

void check_fit_inputs(const Matrix& x, const Matrix& y, const FeatureLayout& layout) {
    if (x.rows() < 1) {
        throw DomainError("ridge fit needs at least one sample");
    }
    if (x.rows() != y.rows()) {
        throw DomainError("ridge fit: " + std::to_string(x.rows()) + " feature rows vs " +
                          std::to_string(y.rows()) + " target rows");
    }
    if (y.cols() < 1) {
        throw DomainError("ridge fit needs at least one target column");
    }
    if (static_cast<std::size_t>(x.cols()) != layout.width()) {
        throw DomainError("ridge fit: feature width " + std::to_string(x.cols()) +
                          " does not match layout width " + std::to_string(layout.width()));
    }
    if (!x.allFinite() || !y.allFinite()) {
        throw DomainError("ridge fit inputs must be finite");
    }
}

void check_layout(const ReadoutWeights& readout, Eigen::Index width) {
    if (!readout.trained()) {
        throw DomainError("readout is untrained");
    }
    if (readout.w_out.cols() != width) {
        throw DomainError("feature width " + std::to_string(width) + " does not match readout width " +
                          std::to_string(readout.w_out.cols()));
    }
}

} // namespace

double scale_aware_lambda(const Matrix& features, double relative) {
    if (features.cols() == 0) {
        return 0.0;
    }
    return relative * features.squaredNorm() / static_cast<double>(features.cols());
}

ReadoutWeights ridge_fit(const Matrix& x, const Matrix& y, double lambda, const FeatureLayout& layout) {
    check_fit_inputs(x, y, layout);
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("ridge lambda must be finite and non-negative");
    }
    const Eigen::Index f = x.cols();

    Matrix gram = Matrix::Zero(f, f);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    const Matrix rhs = x.transpose() * y;
    const double jitter_floor = 1e-12 * gram.trace() / static_cast<double>(f);

    double used = lambda;
    for (int attempt = 0; attempt <= 4; ++attempt) {
        if (attempt == 1) {
            used = std::max(used, jitter_floor);
        } else if (attempt > 1) {
            used *= 10.0;
        }
        if (attempt > 0 && used == 0.0) {
            break;
        }
        Matrix system = gram;
        system.diagonal().array() += used;
        Eigen::LLT<Matrix> llt(system);
        if (llt.info() != Eigen::Success) {
            continue;
        }
        Matrix solution = llt.solve(rhs);
        if (!solution.allFinite()) {
            continue;
        }
        ReadoutWeights out;
        out.w_out = solution.transpose();
        out.layout = layout;
        out.lambda_used = used;
        return out;
    }
    throw NumericError("ridge fit: normal equations are not positive definite even after jitter escalation");
}

ReadoutWeights ridge_fit(const Matrix& x, const Matrix& y, double lambda) {
    FeatureLayout layout{false, static_cast<std::size_t>(x.cols()), false, 0};
    return ridge_fit(x, y, lambda, layout);
}

ReadoutWeights ridge_fit(const Matrix& x, const Matrix& y, const RidgeConfig& config,
                         const FeatureLayout& layout) {
    const double lambda = config.lambda ? *config.lambda : scale_aware_lambda(x, config.relative_lambda);
    return ridge_fit(x, y, lambda, layout);
}

Vector predict(const ReadoutWeights& readout, const Vector& features) {
    check_layout(readout, features.size());
    return readout.w_out * features;
}

Matrix predict(const ReadoutWeights& readout, const Matrix& features) {
    check_layout(readout, features.cols());
    return features * readout.w_out.transpose();
}

} // namespace pbitrc
