#pragma once

#include "radial/types.hpp"

#include <span>
#include <string_view>

namespace radial {

/// l2 norm of a - b. Throws DimensionError on a length mismatch.
double euclidean(std::span<const double> a, std::span<const double> b);

/// Dynamic time warping distance: the square root of the minimal accumulated
/// squared difference over monotone alignments using the symmetric
/// {down, right, diagonal} step pattern with no window constraint.
double dtw(std::span<const double> a, std::span<const double> b);

/// DTW after rescaling each series by its first element. Throws DomainError
/// when a first element is zero.
double idtw(std::span<const double> a, std::span<const double> b);

enum class MetricKind { euclidean, dtw, idtw };

struct Metric {
    MetricKind kind = MetricKind::euclidean;

    double operator()(std::span<const double> a, std::span<const double> b) const;
    double operator()(const Covariate& a, const Covariate& b) const {
        return (*this)(a.values(), b.values());
    }
};

MetricKind parse_metric(std::string_view name);
std::string_view to_string(MetricKind kind) noexcept;

} // namespace radial
