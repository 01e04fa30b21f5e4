#include "oracles.hpp"

#include "radial/localfit.hpp"

#include <doctest.h>

#include <cmath>

using namespace radial;

namespace {

WeightedSample sample_from(const Eigen::MatrixXd& x, std::vector<double> y, std::vector<double> w = {}) {
    WeightedSample s;
    s.features = x;
    s.targets = Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    if (w.empty()) {
        w.assign(y.size(), 1.0);
    }
    s.weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    return s;
}

Eigen::MatrixXd constant_column(Eigen::Index n) { return Eigen::MatrixXd::Ones(n, 1); }

std::vector<std::vector<double>> rows_of(const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out[static_cast<std::size_t>(i)].push_back(m(i, j));
        }
    }
    return out;
}

} // namespace

TEST_CASE("feature map sizes") {
    CHECK(FeatureMap::multivariate_poly(2, 3).output_dim() == 10);
    CHECK(FeatureMap::multivariate_poly(0, 4).output_dim() == 1);
    CHECK(FeatureMap::multivariate_poly(3, 2).output_dim() == 10);
    CHECK(FeatureMap::additive_poly(2, 3).output_dim() == 7);
    CHECK(FeatureMap::radial_poly(4).output_dim() == 5);
    CHECK(FeatureMap::radial_even_poly(2).output_dim() == 3);
    CHECK_THROWS_AS(FeatureMap::radial_even_poly(0), ParameterError);
    CHECK_THROWS_AS(FeatureMap::radial_poly(-1), ParameterError);
    CHECK_THROWS_AS(FeatureMap::multivariate_poly(1, 0), ParameterError);
}

TEST_CASE("feature map expansions") {
    const Eigen::VectorXd m = FeatureMap::multivariate_poly(2, 2).expand(std::vector<double>{2.0, 3.0});
    // Graded: 1 | x1 x2 | degree-2 monomials in some order.
    CHECK(m[0] == 1.0);
    CHECK(m.segment(1, 2).sum() == 5.0);
    CHECK(m.tail(3).sum() == 4.0 + 6.0 + 9.0);
    const Eigen::VectorXd a = FeatureMap::additive_poly(2, 2).expand(std::vector<double>{2.0, 3.0});
    CHECK(a.size() == 5);
    CHECK(a.sum() == 1.0 + 2.0 + 3.0 + 4.0 + 9.0);
    const Eigen::VectorXd e = FeatureMap::radial_even_poly(2).expand(2.0);
    CHECK(e == Eigen::Vector3d(1.0, 4.0, 16.0));
    CHECK_THROWS_AS(FeatureMap::multivariate_poly(1, 2).expand(std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("evaluate examples") {
    CHECK(evaluate(FeatureMap::radial_poly(2), Eigen::Vector3d(0.7, -2.0, 5.0), 0.0) == 0.7);
    CHECK(evaluate(FeatureMap::multivariate_poly(1, 2), Eigen::Vector3d(1.0, 2.0, 3.0),
                   std::vector<double>{1.0, 1.0}) == 6.0);
    CHECK(evaluate(FeatureMap::radial_even_poly(1), Eigen::Vector2d(0.5, -0.1), 2.0) ==
          doctest::Approx(0.1).epsilon(1e-15));
    CHECK_THROWS_AS(evaluate(FeatureMap::radial_poly(2), Eigen::Vector2d(1.0, 2.0), 1.0), DimensionError);
}

TEST_CASE("wls examples") {
    const std::vector<double> r{1, 2, 3};
    const FitResult line = wls_fit(sample_from(FeatureMap::radial_poly(1).design(r), {1, 2, 3}));
    CHECK(line.theta[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(line.theta[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(line.condition_flag);

    CHECK(wls_fit(sample_from(constant_column(3), {1, 0, 1})).theta[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(wls_fit(sample_from(constant_column(2), {1, 0}, {3, 1})).theta[0] == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("wls input validation") {
    CHECK_THROWS_AS(wls_fit(sample_from(constant_column(2), {1, 0}, {-1, 2})), DomainError);
    CHECK_THROWS_AS(wls_fit(sample_from(constant_column(2), {1, 0}, {0, 0})), DomainError);
    CHECK_THROWS_AS(wls_fit(sample_from(constant_column(3), {1, 0})), DimensionError);
}

TEST_CASE("wls matches the normal-equation oracle and leaves orthogonal residuals") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = oracle::uniform_size(rng, 6, 40);
        const int q = static_cast<int>(oracle::uniform_size(rng, 0, 3));
        const auto r = oracle::uniform_vector(rng, n, 0.05, 2.0);
        const auto y = oracle::uniform_vector(rng, n, 0.0, 1.0);
        auto w = oracle::uniform_vector(rng, n, 0.0, 3.0);
        const Eigen::MatrixXd x = FeatureMap::radial_poly(q).design(r);
        const WeightedSample s = sample_from(x, y, w);
        const FitResult fit = wls_fit(s);
        REQUIRE_FALSE(fit.condition_flag);
        const std::vector<double> ref = oracle::wls(rows_of(x), y, w);
        for (std::size_t j = 0; j < ref.size(); ++j) {
            CHECK(fit.theta[static_cast<Eigen::Index>(j)] == doctest::Approx(ref[j]).epsilon(1e-7).scale(1.0));
        }
        const Eigen::VectorXd resid = s.targets - x * fit.theta;
        const Eigen::VectorXd ortho = x.transpose() * s.weights.asDiagonal() * resid;
        CHECK(ortho.lpNorm<Eigen::Infinity>() < 1e-8);
    }
}

TEST_CASE("wls intercept is invariant under radial rescaling") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> scale(0.01, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = oracle::uniform_size(rng, 8, 40);
        const int q = static_cast<int>(oracle::uniform_size(rng, 1, 3));
        auto r = oracle::uniform_vector(rng, n, 0.1, 1.0);
        const auto y = oracle::uniform_vector(rng, n, 0.0, 1.0);
        const auto w = oracle::uniform_vector(rng, n, 0.5, 2.0);
        const bool even = trial % 2 == 0;
        const FeatureMap map = even ? FeatureMap::radial_even_poly(q) : FeatureMap::radial_poly(q);
        const double base = wls_fit(sample_from(map.design(r), y, w)).theta[0];
        const double c = scale(rng);
        for (double& v : r) {
            v *= c;
        }
        const double scaled = wls_fit(sample_from(map.design(r), y, w)).theta[0];
        CHECK(scaled == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("wls rank deficiency is flagged") {
    Eigen::MatrixXd x(4, 3);
    x << 1, 1, 2, 1, 2, 4, 1, 3, 6, 1, 4, 8;
    const WeightedSample s = sample_from(x, {1, 2, 2, 3});
    const FitResult fit = wls_fit(s);
    CHECK(fit.condition_flag);
    REQUIRE(fit.theta.allFinite());
    // Fitted values still equal the least-squares projection on the reduced basis.
    Eigen::MatrixXd reduced = x.leftCols(2);
    const std::vector<double> ref = oracle::wls(rows_of(reduced), {1, 2, 2, 3}, {1, 1, 1, 1});
    const Eigen::VectorXd fitted = x * fit.theta;
    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK(fitted[i] == doctest::Approx(ref[0] + ref[1] * reduced(i, 1)).epsilon(1e-9));
    }
}

TEST_CASE("zero-weight rows do not influence wls") {
    const FitResult a = wls_fit(sample_from(FeatureMap::radial_poly(1).design(std::vector<double>{1, 2, 3, 4}),
                                            {1, 2, 3, 100}, {1, 1, 1, 0}));
    CHECK(a.theta[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(a.theta[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("logistic examples") {
    const FitResult mean = logistic_fit(sample_from(constant_column(3), {1, 0, 1}));
    CHECK(mean.converged);
    CHECK(mean.theta[0] == doctest::Approx(std::log(2.0)).epsilon(1e-10));

    const FitResult weighted = logistic_fit(sample_from(constant_column(2), {1, 0}, {3, 1}));
    CHECK(sigmoid(weighted.theta[0]) == doctest::Approx(0.75).epsilon(1e-10));

    const std::vector<double> r{0.2, 0.5, 0.9, 1.4};
    const FitResult half = logistic_fit(sample_from(FeatureMap::radial_poly(2).design(r), {0.5, 0.5, 0.5, 0.5}));
    CHECK(half.theta.lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("logistic input validation") {
    CHECK_THROWS_AS(logistic_fit(sample_from(constant_column(2), {1.5, 0})), DomainError);
    LogisticOptions bad;
    bad.ridge = -1.0;
    CHECK_THROWS_AS(logistic_fit(sample_from(constant_column(2), {1, 0}), bad), ParameterError);
}

TEST_CASE("logistic gradient agrees with central differences") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = oracle::uniform_size(rng, 10, 60);
        const auto r = oracle::uniform_vector(rng, n, 0.0, 2.0);
        std::vector<double> y(n);
        std::bernoulli_distribution coin(0.4);
        for (double& v : y) {
            v = coin(rng) ? 1.0 : 0.0;
        }
        const auto w = oracle::uniform_vector(rng, n, 0.1, 2.0);
        const WeightedSample s = sample_from(FeatureMap::radial_poly(2).design(r), y, w);
        const double ridge = trial % 2 ? 1e-8 : 0.3;
        const Eigen::VectorXd theta = Eigen::Vector3d(oracle::uniform_vector(rng, 3, -1.5, 1.5).data());
        for (const Eigen::VectorXd& at : {theta, logistic_fit(s).theta}) {
            const Eigen::VectorXd g = logistic_gradient(s, at, ridge);
            for (Eigen::Index j = 0; j < at.size(); ++j) {
                const double h = 1e-6;
                Eigen::VectorXd up = at;
                Eigen::VectorXd dn = at;
                up[j] += h;
                dn[j] -= h;
                const double fd = (logistic_objective(s, up, ridge) - logistic_objective(s, dn, ridge)) / (2 * h);
                CHECK(std::abs(fd - g[j]) <= 1e-5);
            }
        }
    }
}

TEST_CASE("logistic recovers a noiseless logit-linear model") {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 60;
        const auto r = oracle::uniform_vector(rng, n, 0.0, 2.0);
        const Eigen::Vector3d truth(oracle::uniform_vector(rng, 3, -1.0, 1.0).data());
        const Eigen::MatrixXd x = FeatureMap::radial_poly(2).design(r);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = sigmoid(x.row(static_cast<Eigen::Index>(i)).dot(truth));
        }
        LogisticOptions opts;
        opts.ridge = 0.0;
        const FitResult fit = logistic_fit(sample_from(x, y), opts);
        CHECK(fit.converged);
        CHECK((fit.theta - truth).lpNorm<Eigen::Infinity>() < 1e-4);
    }
}

TEST_CASE("widely separated classes keep a finite penalized fit") {
    const std::vector<double> r{0.1, 0.2, 0.3, 0.7, 0.8, 0.9};
    const FitResult fit = logistic_fit(sample_from(FeatureMap::radial_poly(1).design(r), {1, 1, 1, 0, 0, 0}));
    CHECK(fit.converged);
    CHECK_FALSE(fit.condition_flag);
    CHECK(fit.ridge == 1e-8);
    CHECK(sigmoid(evaluate(FeatureMap::radial_poly(1), fit.theta, 0.1)) > 0.9);
    CHECK(sigmoid(evaluate(FeatureMap::radial_poly(1), fit.theta, 0.9)) < 0.1);
}

TEST_CASE("nearly touching classes trigger the ridge retry") {
    const std::vector<double> r{0.1, 0.2, 0.499, 0.501, 0.8, 0.9};
    const FitResult fit = logistic_fit(sample_from(FeatureMap::radial_poly(1).design(r), {1, 1, 1, 0, 0, 0}));
    CHECK(fit.condition_flag);
    CHECK(fit.ridge == 1e-3);
    CHECK(fit.theta.allFinite());
    CHECK(sigmoid(evaluate(FeatureMap::radial_poly(1), fit.theta, 0.1)) > 0.9);
    CHECK(sigmoid(evaluate(FeatureMap::radial_poly(1), fit.theta, 0.9)) < 0.1);
}

TEST_CASE("logistic fit of constant labels saturates but stays finite") {
    const std::vector<double> r{0.1, 0.4, 0.6};
    const FitResult fit = logistic_fit(sample_from(FeatureMap::radial_poly(1).design(r), {1, 1, 1}));
    CHECK(fit.theta.allFinite());
    CHECK(sigmoid(fit.theta[0]) > 0.99);
}
