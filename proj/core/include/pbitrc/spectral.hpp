#pragma once

#include <cstddef>
#include <cstdint>

#include "pbitrc/linalg.hpp"

namespace pbitrc {

struct SpectralOptions {
    double tolerance = 1e-10;          ///< relative spread of the estimate over `window` iterations
    std::size_t window = 8;            ///< m in the Gram-ratio estimate, also the stability window
    std::size_t max_iterations = 100000;
    std::size_t restart_period = 20000; ///< perturb the iterate if not converged after this many steps
    std::uint64_t seed = 0x5eedULL;
};

struct SpectralEstimate {
    double radius = 0.0;
    std::size_t iterations = 0;
    bool complex_pair = false; ///< dominant eigenvalues form a conjugate pair
    std::size_t restarts = 0;
};

/// Largest eigenvalue modulus by power iteration.
///
/// Each iteration keeps three consecutive Krylov vectors a, Wa, W^2a. When the
/// direction has settled (real dominant eigenvalue) the Rayleigh quotient is
/// used; otherwise a two-term recurrence W^2a + p Wa + q a = 0 is fitted and
/// the larger root modulus is taken, which handles a dominant conjugate pair.
/// If neither model fits, the Gram ratio (|W^k v| / |W^(k-m) v|)^(1/m) is used.
///
/// Throws DomainError for non-square or non-finite input and ConvergenceError
/// (carrying the best estimate) if the cap is reached.
SpectralEstimate estimate_spectral_radius(const SparseMatrix& w, const SpectralOptions& options = {});
SpectralEstimate estimate_spectral_radius(const Matrix& w, const SpectralOptions& options = {});

inline double spectral_radius(const SparseMatrix& w, const SpectralOptions& options = {}) {
    return estimate_spectral_radius(w, options).radius;
}
inline double spectral_radius(const Matrix& w, const SpectralOptions& options = {}) {
    return estimate_spectral_radius(w, options).radius;
}

/// Returns w * (target / rho(w)). Throws NumericError if rho(w) == 0.
SparseMatrix scale_spectral_radius(const SparseMatrix& w, double target,
                                   const SpectralOptions& options = {});
Matrix scale_spectral_radius(const Matrix& w, double target, const SpectralOptions& options = {});

} // namespace pbitrc
