#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace radial {

/// Worker count: RADIAL_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, count) across worker_count() threads. Each index
/// runs exactly once; callers write results into slot i so the outcome does
/// not depend on scheduling. The first exception thrown by a body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Independent generator for cell (a, b) of an experiment seeded with `seed`.
std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

} // namespace radial
