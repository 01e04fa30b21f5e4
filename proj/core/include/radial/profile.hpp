#pragma once

#include "radial/metric.hpp"
#include "radial/types.hpp"

#include <cstddef>
#include <vector>

namespace radial {

/// Query-relative view of a dataset: radii sorted ascending with co-sorted
/// labels and the original index of each point. Ties are broken by ascending
/// original index.
struct NeighborProfile {
    std::vector<double> radii;
    std::vector<Label> labels;
    std::vector<std::size_t> source_indices;

    std::size_t size() const noexcept { return radii.size(); }

    /// Number of points with radius <= h.
    std::size_t count_within(double h) const noexcept;
};

NeighborProfile profile(const Dataset& data, const Metric& metric, const Covariate& query);

/// Builds a profile from precomputed distances (one per dataset point).
NeighborProfile profile_from_distances(std::vector<double> distances, std::vector<Label> labels);

} // namespace radial
