#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace pbitrc {

enum class NmseNormalization {
    Variance, ///< divide by sum (d - mean d)^2; predicting the mean scores 1
    Power,    ///< divide by sum d^2
};

std::string to_string(NmseNormalization mode);
NmseNormalization parse_nmse_normalization(std::string_view token);

/// sum (y - d)^2 / sum (d - mean d)^2 (or / sum d^2). Needs equal lengths >= 2
/// and a non-degenerate denominator.
double nmse(std::span<const double> y, std::span<const double> d,
            NmseNormalization normalization = NmseNormalization::Variance);

/// Index of the alphabet symbol nearest to `value`; ties go to the smaller symbol.
std::size_t nearest_symbol(double value, std::span<const double> alphabet);

/// Fraction of positions whose nearest symbol differs from d.
double ser(std::span<const double> y, std::span<const double> d, std::span<const double> alphabet);

struct MetricReport {
    std::optional<double> nmse;
    std::optional<double> ser;
    std::size_t count = 0;
};

} // namespace pbitrc
