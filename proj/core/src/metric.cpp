#include "radial/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace radial {

double euclidean(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionError("euclidean: length mismatch (" + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()) + ")");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

double dtw(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw DomainError("dtw: series must be nonempty");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    // Rolling rows of the cumulative cost table D(i, j), with D(0, 0) = 0 and
    // infinite boundaries.
    std::vector<double> prev(b.size() + 1, inf);
    std::vector<double> curr(b.size() + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        curr[0] = inf;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const double diff = a[i - 1] - b[j - 1];
            curr[j] = diff * diff + std::min({prev[j], curr[j - 1], prev[j - 1]});
        }
        std::swap(prev, curr);
    }
    return std::sqrt(prev[b.size()]);
}

namespace {

std::vector<double> rescale_by_first(std::span<const double> x) {
    if (x.empty()) {
        throw DomainError("idtw: series must be nonempty");
    }
    if (x.front() == 0.0) {
        throw DomainError("idtw: first element is zero, rescaling undefined");
    }
    std::vector<double> out(x.begin(), x.end());
    const double base = x.front();
    for (double& v : out) {
        v /= base;
    }
    return out;
}

} // namespace

double idtw(std::span<const double> a, std::span<const double> b) {
    return dtw(rescale_by_first(a), rescale_by_first(b));
}

double Metric::operator()(std::span<const double> a, std::span<const double> b) const {
    switch (kind) {
    case MetricKind::euclidean:
        return euclidean(a, b);
    case MetricKind::dtw:
        return dtw(a, b);
    case MetricKind::idtw:
        return idtw(a, b);
    }
    throw DomainError("unknown metric");
}

MetricKind parse_metric(std::string_view name) {
    if (name == "euclidean") return MetricKind::euclidean;
    if (name == "dtw") return MetricKind::dtw;
    if (name == "idtw") return MetricKind::idtw;
    throw ParameterError("unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(MetricKind kind) noexcept {
    switch (kind) {
    case MetricKind::euclidean: return "euclidean";
    case MetricKind::dtw: return "dtw";
    case MetricKind::idtw: return "idtw";
    }
    return "unknown";
}

} // namespace radial
