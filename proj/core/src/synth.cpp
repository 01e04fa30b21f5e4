#include "radial/synth.hpp"

#include "radial/csv.hpp"
#include "radial/parallel.hpp"
#include "radial/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

namespace radial {

namespace {

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

std::vector<double> uniform_point(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> unif(lo, hi);
    std::vector<double> x(synthetic_dim);
    for (double& v : x) {
        v = unif(rng);
    }
    return x;
}

constexpr const char* kLabels = "test_labels";
constexpr const char* kBayes = "bayes";

struct TrialOutcome {
    // [method][query] estimate; empty row when the method failed on this trial.
    std::vector<std::vector<double>> estimates;
    std::vector<std::string> failures;
};

TrialOutcome run_trial(const SyntheticConfig& config, std::span<const BenchmarkMethod> methods,
                       std::size_t rep, const Trial& trial) {
    TrialOutcome out;
    out.estimates.assign(methods.size(), std::vector<double>(trial.test.size(), 0.0));
    std::vector<bool> failed(methods.size(), false);
    auto fail = [&](std::size_t m, const std::string& what) {
        if (!failed[m]) {
            failed[m] = true;
            out.failures.push_back("trial " + std::to_string(rep) + ", " + methods[m].name + ": " + what);
        }
    };

    std::mt19937_64 coin_rng = rng_stream(config.seed, rep, 1);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t m = 0; m < methods.size(); ++m) {
        if (methods[m].kind == BenchmarkMethod::Kind::random) {
            for (double& v : out.estimates[m]) {
                v = coin(coin_rng) ? 1.0 : 0.0;
            }
        } else if (methods[m].kind == BenchmarkMethod::Kind::global_logistic) {
            try {
                const FeatureMap map = FeatureMap::additive_poly(2, synthetic_dim);
                const auto n = static_cast<Eigen::Index>(trial.train.size());
                WeightedSample sample;
                sample.features.resize(n, static_cast<Eigen::Index>(map.output_dim()));
                sample.targets.resize(n);
                for (Eigen::Index i = 0; i < n; ++i) {
                    const LabeledPoint& p = trial.train[static_cast<std::size_t>(i)];
                    sample.features.row(i) = map.expand(p.x.values()).transpose();
                    sample.targets[i] = p.y;
                }
                sample.weights = Eigen::VectorXd::Ones(n);
                const FitResult fit = logistic_fit(sample);
                for (std::size_t q = 0; q < trial.test.size(); ++q) {
                    out.estimates[m][q] = sigmoid(evaluate(map, fit.theta, trial.test[q].x.values()));
                }
            } catch (const Error& e) {
                fail(m, e.what());
            }
        }
    }

    const Metric metric{MetricKind::euclidean};
    for (std::size_t q = 0; q < trial.test.size(); ++q) {
        const Covariate& query = trial.test[q].x;
        const NeighborProfile prof = profile(trial.train, metric, query);
        for (std::size_t m = 0; m < methods.size(); ++m) {
            if (methods[m].kind != BenchmarkMethod::Kind::local || failed[m]) {
                continue;
            }
            try {
                out.estimates[m][q] = estimate(methods[m].spec, prof, trial.train, query).value;
            } catch (const Error& e) {
                fail(m, e.what());
            }
        }
    }
    for (std::size_t m = 0; m < methods.size(); ++m) {
        if (failed[m]) {
            out.estimates[m].clear();
        }
    }
    return out;
}

} // namespace

void SyntheticConfig::validate() const {
    if (n_train == 0 || n_test == 0 || reps == 0) {
        throw ParameterError("synthetic config: sizes and reps must be positive");
    }
    if (!(noise_sd >= 0.0)) {
        throw ParameterError("synthetic config: noise_sd must be nonnegative");
    }
    if (!(train_lo < train_hi) || !(test_lo < test_hi)) {
        throw ParameterError("synthetic config: ranges must be well ordered");
    }
}

double eta_true(std::span<const double> x) {
    if (x.size() != synthetic_dim) {
        throw DimensionError("eta_true expects a point in R^3");
    }
    double plus = 15.0;
    double minus = 15.0;
    for (double v : x) {
        plus *= std_normal_pdf(2.0 * (v - 0.5));
        minus *= std_normal_pdf(2.0 * (v + 0.5));
    }
    return plus + minus;
}

double clip01(double z) noexcept { return std::min(std::max(z, 0.0), 1.0); }

Label sample_train_label(std::span<const double> x, double noise_sd, std::mt19937_64& rng) {
    std::normal_distribution<double> noise(0.0, noise_sd);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double p = clip01(eta_true(x) + (noise_sd > 0.0 ? noise(rng) : 0.0));
    return unif(rng) < p ? 1 : 0;
}

Trial generate_trial(const SyntheticConfig& config, std::mt19937_64& rng) {
    config.validate();
    std::vector<LabeledPoint> train;
    train.reserve(config.n_train);
    for (std::size_t i = 0; i < config.n_train; ++i) {
        std::vector<double> x = uniform_point(rng, config.train_lo, config.train_hi);
        const Label y = sample_train_label(x, config.noise_sd, rng);
        train.emplace_back(Covariate(std::move(x)), y);
    }

    std::vector<LabeledPoint> test;
    std::vector<double> test_eta;
    test.reserve(config.n_test);
    test_eta.reserve(config.n_test);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < config.n_test; ++i) {
        std::vector<double> x = uniform_point(rng, config.test_lo, config.test_hi);
        const double eta = eta_true(x);
        const int y = unif(rng) < eta ? 1 : 0;
        test.emplace_back(Covariate(std::move(x)), y);
        test_eta.push_back(eta);
    }
    return Trial{Dataset(std::move(train)), Dataset(std::move(test)), std::move(test_eta)};
}

int bayes_classify(double eta) noexcept { return eta >= 0.5 ? 1 : 0; }

double concordance(std::span<const int> pred, std::span<const int> ref) {
    if (pred.size() != ref.size()) {
        throw DimensionError("concordance: length mismatch");
    }
    if (pred.empty()) {
        throw DomainError("concordance: empty input");
    }
    std::size_t agree = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        agree += pred[i] == ref[i] ? 1 : 0;
    }
    return static_cast<double>(agree) / static_cast<double>(pred.size());
}

std::vector<BenchmarkMethod> benchmark_methods() {
    using K = BenchmarkMethod::Kind;
    std::vector<BenchmarkMethod> m;
    m.push_back({"random", K::random, KnnSpec{1}});
    m.push_back({"logistic", K::global_logistic, KnnSpec{1}});
    for (std::size_t k : {10, 20, 30, 40, 50}) {
        m.push_back({"knn(k=" + std::to_string(k) + ")", K::local, KnnSpec{k}});
    }
    m.push_back({"msknn-logi", K::local,
                 MsknnSpec{{10, 20, 30, 40, 50}, 2, Regression::logi, Loss::logistic, {}}});
    m.push_back({"lpor(h=0.4)", K::local, LporSpec{0.4, 2}});
    m.push_back({"lpolr(h=0.4)", K::local, LpolrSpec{0.4, 2, {}}});

    LrrOptions w1;
    w1.weight = WeightFunction::constant_one();
    w1.degree = 2;
    w1.loss = Loss::logistic;
    m.push_back({"lrlr(w=1)", K::local, w1});
    LrrOptions winv = w1;
    winv.weight = WeightFunction::inverse_r();
    m.push_back({"lrlr(w=1/r)", K::local, winv});
    return m;
}

const BenchmarkRow& BenchmarkResult::find(std::string_view method, std::string_view criterion) const {
    for (const BenchmarkRow& r : rows) {
        if (r.method == method && r.criterion == criterion) {
            return r;
        }
    }
    throw ParameterError("no benchmark row for " + std::string(method) + "/" + std::string(criterion));
}

BenchmarkResult run_benchmark(const SyntheticConfig& config, std::span<const BenchmarkMethod> methods) {
    config.validate();
    const std::size_t reps = config.reps;
    // [trial][method] concordances; NaN marks a skipped trial.
    std::vector<std::vector<double>> vs_labels(reps);
    std::vector<std::vector<double>> vs_bayes(reps);
    std::vector<std::vector<std::string>> failures(reps);

    parallel_for(reps, [&](std::size_t rep) {
        std::mt19937_64 rng = rng_stream(config.seed, rep, 0);
        const Trial trial = generate_trial(config, rng);
        std::vector<int> labels(trial.test.size());
        std::vector<int> bayes(trial.test.size());
        for (std::size_t q = 0; q < trial.test.size(); ++q) {
            labels[q] = trial.test[q].y;
            bayes[q] = bayes_classify(trial.test_eta[q]);
        }
        TrialOutcome outcome = run_trial(config, methods, rep, trial);
        vs_labels[rep].assign(methods.size(), std::nan(""));
        vs_bayes[rep].assign(methods.size(), std::nan(""));
        for (std::size_t m = 0; m < methods.size(); ++m) {
            if (outcome.estimates[m].empty()) {
                continue;
            }
            std::vector<int> pred(outcome.estimates[m].size());
            std::transform(outcome.estimates[m].begin(), outcome.estimates[m].end(), pred.begin(),
                           [](double v) { return classify(v); });
            vs_labels[rep][m] = concordance(pred, labels);
            vs_bayes[rep][m] = concordance(pred, bayes);
        }
        failures[rep] = std::move(outcome.failures);
    });

    BenchmarkResult result;
    result.seed = config.seed;
    for (const auto& f : failures) {
        result.warnings.insert(result.warnings.end(), f.begin(), f.end());
    }
    auto summarize = [&](std::size_t m, const std::vector<std::vector<double>>& table, const char* criterion) {
        std::vector<double> v;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            if (!std::isnan(table[rep][m])) {
                v.push_back(table[rep][m]);
            }
        }
        BenchmarkRow row{methods[m].name, criterion, std::nan(""), std::nan(""), v.size()};
        if (!v.empty()) {
            row.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
            if (v.size() > 1) {
                double ss = 0.0;
                for (double x : v) {
                    ss += (x - row.mean) * (x - row.mean);
                }
                row.se = std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
            } else {
                row.se = 0.0;
            }
        }
        result.rows.push_back(row);
    };
    for (std::size_t m = 0; m < methods.size(); ++m) {
        summarize(m, vs_labels, kLabels);
        summarize(m, vs_bayes, kBayes);
    }
    return result;
}

void write_trial_predictions(std::ostream& os, const SyntheticConfig& config,
                             std::span<const BenchmarkMethod> methods, std::size_t trial_index) {
    std::mt19937_64 rng = rng_stream(config.seed, trial_index, 0);
    const Trial trial = generate_trial(config, rng);
    const TrialOutcome outcome = run_trial(config, methods, trial_index, trial);
    os << "eta";
    for (const BenchmarkMethod& m : methods) {
        os << ',' << m.name;
    }
    os << '\n';
    for (std::size_t q = 0; q < trial.test.size(); ++q) {
        os << format_double(trial.test_eta[q]);
        for (std::size_t m = 0; m < methods.size(); ++m) {
            os << ',' << (outcome.estimates[m].empty() ? std::string("nan") : format_double(outcome.estimates[m][q]));
        }
        os << '\n';
    }
}

void write_benchmark_csv(std::ostream& os, const BenchmarkResult& result) {
    os << "method,criterion,mean,se,reps,seed\n";
    for (const BenchmarkRow& r : result.rows) {
        os << '"' << r.method << "\"," << r.criterion << ',' << format_double(r.mean) << ','
           << format_double(r.se) << ',' << r.reps << ',' << result.seed << '\n';
    }
}

} // namespace radial
