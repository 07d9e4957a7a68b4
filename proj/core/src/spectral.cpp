#include "pbitrc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "pbitrc/error.hpp"
#include "pbitrc/rng.hpp"

namespace pbitrc {

namespace {

bool all_finite(const Matrix& w) { return w.allFinite(); }

bool all_finite(const SparseMatrix& w) {
    for (int k = 0; k < w.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(w, k); it; ++it) {
            if (!std::isfinite(it.value())) {
                return false;
            }
        }
    }
    return true;
}

Vector random_unit(Eigen::Index n, CounterEngine& rng) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = rng.uniform(-1.0, 1.0);
    }
    return v / v.norm();
}

struct Fit {
    double estimate;
    double residual;
    bool complex_pair;
};

// Dominant-pair model: c + p b + q a = 0 restricted to span{a, b}.
Fit fit_two_term(const Vector& a, const Vector& b, const Vector& c, double nb, double nc) {
    const double ab = a.dot(b);
    const Vector w2 = b - ab * a;
    const double s = w2.norm();
    if (!(s > 1e-14 * nb)) {
        return {std::abs(ab), 1.0, false};
    }
    const Vector q2 = w2 / s;
    const double c1 = a.dot(c);
    const double c2 = q2.dot(c);
    const double residual = (c - c1 * a - c2 * q2).norm() / nc;
    const double p = -c2 / s;
    const double q = -c1 - p * ab;
    const double disc = p * p - 4.0 * q;
    if (disc < 0.0) {
        return {std::sqrt(q), residual, true};
    }
    const double root = std::sqrt(disc);
    return {std::max(std::abs(-p + root), std::abs(-p - root)) / 2.0, residual, false};
}

template <class Mat>
SpectralEstimate power_iterate(const Mat& w, const SpectralOptions& opt) {
    if (w.rows() != w.cols()) {
        throw DomainError("spectral radius needs a square matrix, got " + std::to_string(w.rows()) + "x" +
                          std::to_string(w.cols()));
    }
    if (w.rows() == 0) {
        throw DomainError("spectral radius of an empty matrix is undefined");
    }
    if (!all_finite(w)) {
        throw DomainError("spectral radius needs finite entries");
    }
    const std::size_t window = std::max<std::size_t>(opt.window, 1);

    CounterEngine rng(opt.seed, RngDomain::Restart);
    Vector a = random_unit(w.rows(), rng);
    Vector b = w * a;
    Vector c = w * b;

    SpectralEstimate out;
    std::deque<double> recent;
    std::vector<double> log_growth;
    double best = 0.0;

    for (std::size_t iter = 1; iter <= opt.max_iterations; ++iter) {
        const double nb = b.norm();
        const double nc = c.norm();
        if (nb == 0.0 || nc == 0.0) {
            // the iterate of a generic start vector vanished: W is nilpotent
            out.radius = 0.0;
            out.iterations = iter;
            return out;
        }
        log_growth.push_back(std::log(nb));

        const double rayleigh = a.dot(b);
        const double real_residual = (b - rayleigh * a).norm() / nb;
        const Fit pair = fit_two_term(a, b, c, nb, nc);

        double estimate;
        bool complex_pair = false;
        if (real_residual < 1e-6 || real_residual <= pair.residual) {
            estimate = std::abs(rayleigh);
        } else if (pair.residual < 1e-3 || iter < opt.restart_period) {
            estimate = pair.estimate;
            complex_pair = pair.complex_pair;
        } else {
            // several eigenvalues share the dominant modulus; only the growth rate is reliable
            const std::size_t span = std::max(window, log_growth.size() / 2);
            double sum = 0.0;
            for (std::size_t i = log_growth.size() - span; i < log_growth.size(); ++i) {
                sum += log_growth[i];
            }
            estimate = std::exp(sum / static_cast<double>(span));
        }
        best = estimate;
        out.complex_pair = complex_pair;

        recent.push_back(estimate);
        if (recent.size() > window) {
            recent.pop_front();
        }
        if (iter >= 2 * window && recent.size() == window) {
            const auto [lo, hi] = std::minmax_element(recent.begin(), recent.end());
            if (*hi - *lo <= opt.tolerance * std::max(estimate, 1e-300)) {
                out.radius = estimate;
                out.iterations = iter;
                return out;
            }
        }

        a = b / nb;
        b = c / nb;
        if (opt.restart_period > 0 && iter % opt.restart_period == 0) {
            a = a + 1e-3 * random_unit(w.rows(), rng);
            a /= a.norm();
            b = w * a;
            recent.clear();
            ++out.restarts;
        }
        c = w * b;
    }
    throw ConvergenceError("spectral radius did not converge within " +
                               std::to_string(opt.max_iterations) + " iterations",
                           best);
}

template <class Mat>
Mat scale_to(const Mat& w, double target, const SpectralOptions& opt) {
    if (!(target >= 0.0) || !std::isfinite(target)) {
        throw DomainError("target spectral radius must be finite and non-negative");
    }
    const double rho = power_iterate(w, opt).radius;
    if (rho == 0.0) {
        throw NumericError("cannot rescale a matrix with zero spectral radius (nilpotent)");
    }
    return Mat(w * (target / rho));
}

} // namespace

SpectralEstimate estimate_spectral_radius(const SparseMatrix& w, const SpectralOptions& options) {
    return power_iterate(w, options);
}

SpectralEstimate estimate_spectral_radius(const Matrix& w, const SpectralOptions& options) {
    return power_iterate(w, options);
}

SparseMatrix scale_spectral_radius(const SparseMatrix& w, double target, const SpectralOptions& options) {
    return scale_to(w, target, options);
}

Matrix scale_spectral_radius(const Matrix& w, double target, const SpectralOptions& options) {
    return scale_to(w, target, options);
}

} // namespace pbitrc
