#include "pbitrc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pbitrc/error.hpp"
#include "pbitrc/tasks.hpp"

namespace pbitrc {

std::string to_string(NmseNormalization mode) {
    return mode == NmseNormalization::Variance ? "variance" : "power";
}

NmseNormalization parse_nmse_normalization(std::string_view token) {
    if (token == "variance") {
        return NmseNormalization::Variance;
    }
    if (token == "power") {
        return NmseNormalization::Power;
    }
    throw DomainError("unknown NMSE normalization '" + std::string(token) + "' (expected 'variance' or 'power')");
}

double nmse(std::span<const double> y, std::span<const double> d, NmseNormalization normalization) {
    if (y.size() != d.size()) {
        throw DomainError("nmse: length mismatch (" + std::to_string(y.size()) + " vs " +
                          std::to_string(d.size()) + ")");
    }
    if (d.size() < 2) {
        throw DomainError("nmse needs at least two samples");
    }
    const double mean = normalization == NmseNormalization::Variance
                            ? std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size())
                            : 0.0;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        num += (y[i] - d[i]) * (y[i] - d[i]);
        den += (d[i] - mean) * (d[i] - mean);
    }
    if (!(den > 0.0)) {
        throw DomainError("nmse: target has zero spread (degenerate denominator)");
    }
    if (!std::isfinite(num)) {
        throw NumericError("nmse: prediction contains non-finite values");
    }
    return num / den;
}

std::size_t nearest_symbol(double value, std::span<const double> alphabet) {
    if (alphabet.empty()) {
        throw DomainError("symbol alphabet is empty");
    }
    std::size_t best = 0;
    double best_dist = std::abs(value - alphabet[0]);
    for (std::size_t i = 1; i < alphabet.size(); ++i) {
        const double dist = std::abs(value - alphabet[i]);
        // strict: an equal distance keeps the earlier (smaller) symbol
        if (dist < best_dist) {
            best = i;
            best_dist = dist;
        }
    }
    return best;
}

double ser(std::span<const double> y, std::span<const double> d, std::span<const double> alphabet) {
    validate_alphabet(alphabet);
    if (y.size() != d.size()) {
        throw DomainError("ser: length mismatch (" + std::to_string(y.size()) + " vs " +
                          std::to_string(d.size()) + ")");
    }
    if (y.empty()) {
        throw DomainError("ser needs at least one sample");
    }
    std::size_t errors = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (std::find(alphabet.begin(), alphabet.end(), d[i]) == alphabet.end()) {
            throw DomainError("ser: target value " + std::to_string(d[i]) + " is not in the alphabet");
        }
        if (alphabet[nearest_symbol(y[i], alphabet)] != d[i]) {
            ++errors;
        }
    }
    return static_cast<double>(errors) / static_cast<double>(y.size());
}

} // namespace pbitrc
