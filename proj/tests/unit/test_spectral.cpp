#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pbitrc/error.hpp"
#include "pbitrc/spectral.hpp"

using namespace pbitrc;

namespace {

Matrix random_dense(int n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix w(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            w(i, j) = u(gen);
        }
    }
    return w;
}

SparseMatrix random_sparse(int n, double density, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::bernoulli_distribution keep(density);
    std::vector<Eigen::Triplet<double>> entries;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (keep(gen)) {
                entries.emplace_back(i, j, u(gen));
            }
        }
    }
    SparseMatrix w(n, n);
    w.setFromTriplets(entries.begin(), entries.end());
    return w;
}

double rel(double a, double b) {
    return std::abs(a - b) / std::abs(b);
}

} // namespace

TEST_SUITE("spectral") {

TEST_CASE("closed-form radii") {
    CHECK(spectral_radius(Matrix(Matrix::Identity(4, 4))) == doctest::Approx(1.0).epsilon(1e-10));
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 0.5;
    d(1, 1) = -2.0;
    CHECK(spectral_radius(d) == doctest::Approx(2.0).epsilon(1e-10));
    Matrix rot(2, 2);
    rot << 0, 1, -1, 0;
    const auto est = estimate_spectral_radius(rot);
    CHECK(est.radius == doctest::Approx(1.0).epsilon(1e-10));
    // equal-modulus real eigenvalues of opposite sign
    Matrix flip = Matrix::Zero(3, 3);
    flip(0, 0) = 1.0;
    flip(1, 1) = -1.0;
    flip(2, 2) = 0.5;
    CHECK(spectral_radius(flip) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("degenerate inputs") {
    CHECK(spectral_radius(Matrix(Matrix::Zero(3, 3))) == 0.0);
    Matrix nil = Matrix::Zero(2, 2);
    nil(0, 1) = 1.0;
    CHECK(spectral_radius(nil) == 0.0);
    CHECK_THROWS_AS(spectral_radius(Matrix(Matrix::Zero(2, 3))), DomainError);
    CHECK_THROWS_AS(spectral_radius(Matrix(0, 0)), DomainError);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = std::nan("");
    CHECK_THROWS_AS(spectral_radius(bad), DomainError);
}

TEST_CASE("dense 5x5 against the eigensolver") {
    const Matrix w = random_dense(5, 2024);
    CHECK(rel(spectral_radius(w), oracle::dense_spectral_radius(w)) <= 1e-6);
}

TEST_CASE("random matrices against the eigensolver") {
    for (int n : {2, 3, 7, 20, 60, 150}) {
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            CAPTURE(n);
            CAPTURE(seed);
            const Matrix w = random_dense(n, seed * 31 + n);
            const double expected = oracle::dense_spectral_radius(w);
            CHECK(rel(spectral_radius(w), expected) <= 1e-6);
            const SparseMatrix s = random_sparse(n, std::max(0.1, 3.0 / n), seed + 1000 * n);
            const double es = oracle::dense_spectral_radius(Matrix(s));
            if (es > 0) {
                CHECK(rel(spectral_radius(s), es) <= 1e-6);
            }
        }
    }
}

TEST_CASE("complex dominant pair") {
    // block rotation with radius 0.9 plus a smaller real mode
    Matrix w = Matrix::Zero(3, 3);
    const double a = 0.9 * std::cos(0.7);
    const double b = 0.9 * std::sin(0.7);
    w(0, 0) = a;
    w(0, 1) = -b;
    w(1, 0) = b;
    w(1, 1) = a;
    w(2, 2) = 0.3;
    w(2, 0) = 0.5;
    const Matrix q = random_dense(3, 5) + 3 * Matrix::Identity(3, 3);
    const Matrix similar = q * w * q.inverse();
    const auto est = estimate_spectral_radius(similar);
    CHECK(rel(est.radius, 0.9) <= 1e-6);
}

TEST_CASE("sparse and dense overloads agree") {
    const SparseMatrix s = random_sparse(40, 0.2, 77);
    const Matrix d(s);
    CHECK(rel(spectral_radius(s), spectral_radius(d)) <= 1e-9);
}

TEST_CASE("iteration cap raises with a best estimate") {
    const Matrix w = random_dense(50, 3);
    SpectralOptions options;
    options.max_iterations = 3;
    options.restart_period = 2;
    try {
        (void)spectral_radius(w, options);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(std::isfinite(e.best_estimate()));
        CHECK(e.best_estimate() > 0.0);
    }
}

TEST_CASE("scaling") {
    const Matrix two = 2.0 * Matrix::Identity(3, 3);
    const Matrix scaled = scale_spectral_radius(two, 0.8);
    CHECK((scaled - 0.8 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);

    const Matrix w = random_dense(6, 9);
    const Matrix at_target = scale_spectral_radius(w, 0.7);
    const Matrix again = scale_spectral_radius(at_target, 0.7);
    CHECK((again - at_target).cwiseAbs().maxCoeff() <= 1e-9);

    const SparseMatrix s = random_sparse(100, 0.1, 12);
    const SparseMatrix s2 = scale_spectral_radius(s, 0.9);
    CHECK(rel(oracle::dense_spectral_radius(Matrix(s2)), 0.9) <= 1e-4);
    CHECK(s2.nonZeros() == s.nonZeros());

    Matrix nil = Matrix::Zero(2, 2);
    nil(0, 1) = 1.0;
    CHECK_THROWS_AS(scale_spectral_radius(nil, 0.5), NumericError);
    CHECK_THROWS_AS(scale_spectral_radius(two, -1.0), DomainError);
}

}
