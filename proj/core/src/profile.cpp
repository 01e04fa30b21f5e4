#include "radial/profile.hpp"

#include <algorithm>
#include <numeric>

namespace radial {

std::size_t NeighborProfile::count_within(double h) const noexcept {
    return static_cast<std::size_t>(std::upper_bound(radii.begin(), radii.end(), h) - radii.begin());
}

NeighborProfile profile_from_distances(std::vector<double> distances, std::vector<Label> labels) {
    if (distances.size() != labels.size()) {
        throw DimensionError("profile: distances and labels differ in length");
    }
    std::vector<std::size_t> order(distances.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return distances[a] < distances[b]; });

    NeighborProfile out;
    out.radii.reserve(order.size());
    out.labels.reserve(order.size());
    for (std::size_t idx : order) {
        out.radii.push_back(distances[idx]);
        out.labels.push_back(labels[idx]);
    }
    out.source_indices = std::move(order);
    return out;
}

NeighborProfile profile(const Dataset& data, const Metric& metric, const Covariate& query) {
    std::vector<double> distances;
    std::vector<Label> labels;
    distances.reserve(data.size());
    labels.reserve(data.size());
    for (const LabeledPoint& p : data.points()) {
        distances.push_back(metric(query, p.x));
        labels.push_back(p.y);
    }
    return profile_from_distances(std::move(distances), std::move(labels));
}

} // namespace radial
