#pragma once

#include "radial/estimators.hpp"
#include "radial/types.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace radial {

/// Bimodal benchmark: training covariates uniform on [train_lo, train_hi]^3
/// with labels Bernoulli(clip01(eta + noise)), test covariates uniform on
/// [test_lo, test_hi]^3 with noise-free Bernoulli(eta) labels.
struct SyntheticConfig {
    std::size_t n_train = 500;
    std::size_t n_test = 500;
    double noise_sd = 0.05;
    double train_lo = -1.0;
    double train_hi = 1.0;
    double test_lo = -0.7;
    double test_hi = 0.7;
    std::size_t reps = 200;
    std::uint64_t seed = 0;

    void validate() const;
};

inline constexpr std::size_t synthetic_dim = 3;

/// 15 prod phi(2(x_j - 1/2)) + 15 prod phi(2(x_j + 1/2)) with phi the standard normal density.
double eta_true(std::span<const double> x);

double clip01(double z) noexcept;

/// Training label at x: Bernoulli(clip01(eta_true(x) + eps)), eps ~ N(0, noise_sd^2).
Label sample_train_label(std::span<const double> x, double noise_sd, std::mt19937_64& rng);

struct Trial {
    Dataset train;
    Dataset test;
    std::vector<double> test_eta;
};

Trial generate_trial(const SyntheticConfig& config, std::mt19937_64& rng);

/// 1 when eta >= 1/2 (same tie rule as the plug-in classifier).
int bayes_classify(double eta) noexcept;

/// Fraction of agreeing positions.
double concordance(std::span<const int> pred, std::span<const int> ref);

struct BenchmarkMethod {
    enum class Kind { random, global_logistic, local };
    std::string name;
    Kind kind = Kind::local;
    EstimatorSpec spec = KnnSpec{1};
};

/// The twelve rows of the synthetic comparison: random, global logistic,
/// k-NN (k = 10..50), MS-k-NN (logi.), LPoR, LPoLR, LRLR with w = 1 and w = 1/r.
std::vector<BenchmarkMethod> benchmark_methods();

struct BenchmarkRow {
    std::string method;
    std::string criterion;
    double mean = 0.0;
    double se = 0.0;
    std::size_t reps = 0;
};

struct BenchmarkResult {
    std::vector<BenchmarkRow> rows;
    std::vector<std::string> warnings;
    std::uint64_t seed = 0;

    const BenchmarkRow& find(std::string_view method, std::string_view criterion) const;
};

/// Runs config.reps independent trials (parallel across trials, one RNG
/// stream per trial) and reports mean and standard error (sample sd / sqrt(reps))
/// of the concordance with the test labels and with the Bayes classifier.
BenchmarkResult run_benchmark(const SyntheticConfig& config, std::span<const BenchmarkMethod> methods);

/// Per-query estimates of one trial: columns eta then one column per method.
void write_trial_predictions(std::ostream& os, const SyntheticConfig& config,
                             std::span<const BenchmarkMethod> methods, std::size_t trial);

/// Columns method, criterion, mean, se, reps, seed.
void write_benchmark_csv(std::ostream& os, const BenchmarkResult& result);

} // namespace radial
