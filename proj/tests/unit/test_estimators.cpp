#include "oracles.hpp"

#include "radial/estimators.hpp"

#include <doctest.h>

#include <cmath>

using namespace radial;

namespace {

NeighborProfile make_profile(std::vector<double> radii, std::vector<Label> labels) {
    NeighborProfile p;
    p.source_indices.resize(radii.size());
    std::iota(p.source_indices.begin(), p.source_indices.end(), std::size_t{0});
    p.radii = std::move(radii);
    p.labels = std::move(labels);
    return p;
}

NeighborProfile flipped(NeighborProfile p) {
    for (Label& y : p.labels) {
        y = static_cast<Label>(1 - y);
    }
    return p;
}

Dataset flipped(const Dataset& d) {
    std::vector<LabeledPoint> pts;
    for (const LabeledPoint& p : d.points()) {
        pts.emplace_back(p.x, 1 - p.y);
    }
    return Dataset(pts);
}

struct RandomInstance {
    Dataset data;
    Covariate query;
    NeighborProfile prof;
};

RandomInstance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    std::vector<LabeledPoint> pts;
    std::bernoulli_distribution coin(0.45);
    for (std::size_t i = 0; i < n; ++i) {
        pts.emplace_back(Covariate(oracle::uniform_vector(rng, d, -1.0, 1.0)), coin(rng) ? 1 : 0);
    }
    Dataset data(pts);
    Covariate query(oracle::uniform_vector(rng, d, -0.5, 0.5));
    NeighborProfile prof = profile(data, Metric{}, query);
    return {std::move(data), std::move(query), std::move(prof)};
}

} // namespace

TEST_CASE("kernel smoother examples") {
    CHECK(kernel_smoother(make_profile({0.5, 0.7}, {1, 0}), 1.0).value == 0.5);
    CHECK(kernel_smoother(make_profile({0.5, 0.7, 2.0}, {1, 1, 0}), 1.0).value == 1.0);
    const Estimate e = kernel_smoother(make_profile({1, 2, 3}, {1, 1, 0}), 2.0);
    CHECK(e.value == 1.0);
    CHECK(e.used_points == 2);
    CHECK_THROWS_AS(kernel_smoother(make_profile({1, 2}, {1, 0}), 0.5), EmptyWindowError);
    CHECK_THROWS_AS(kernel_smoother(make_profile({1, 2}, {1, 0}), 0.0), ParameterError);
}

TEST_CASE("knn examples") {
    const NeighborProfile p = make_profile({1, 2, 3, 4}, {1, 0, 1, 1});
    CHECK(knn(p, 3).value == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(knn(p, 1).value == 1.0);
    CHECK(knn(p, 2).value == 0.5);
    CHECK_THROWS_AS(knn(p, 5), ParameterError);
    CHECK_THROWS_AS(knn(p, 0), ParameterError);
}

TEST_CASE("knn equals the kernel smoother at h = r_k") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        const RandomInstance inst = random_instance(rng, oracle::uniform_size(rng, 2, 60), 2);
        const std::size_t k = oracle::uniform_size(rng, 1, inst.prof.size() - 1);
        if (inst.prof.radii[k - 1] < inst.prof.radii[k]) {
            CHECK(knn(inst.prof, k).value == kernel_smoother(inst.prof, inst.prof.radii[k - 1]).value);
        }
    }
}

TEST_CASE("lpor examples") {
    const Dataset line({{Covariate{-1.0}, 0}, {Covariate{1.0}, 1}});
    const Covariate origin{0.0};
    const NeighborProfile p = profile(line, Metric{}, origin);
    CHECK(lpor(p, line, origin, 1.5, 1).value == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(lpolr(p, line, origin, 1.5, 1).value == doctest::Approx(0.5).epsilon(1e-9));

    std::mt19937_64 rng(32);
    const RandomInstance inst = random_instance(rng, 40, 2);
    std::vector<LabeledPoint> ones;
    for (const LabeledPoint& pt : inst.data.points()) {
        ones.emplace_back(pt.x, 1);
    }
    const Dataset all_one(ones);
    const NeighborProfile p1 = profile(all_one, Metric{}, inst.query);
    for (int q = 0; q <= 2; ++q) {
        CHECK(lpor(p1, all_one, inst.query, 1.0, q).value == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK(lpolr(p1, all_one, inst.query, 1.0, 2).value > 0.99);
    const Dataset all_zero = flipped(all_one);
    CHECK(lpolr(profile(all_zero, Metric{}, inst.query), all_zero, inst.query, 1.0, 2).value < 0.01);
}

TEST_CASE("lpor with q = 0 is the kernel smoother") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 200; ++trial) {
        const RandomInstance inst = random_instance(rng, oracle::uniform_size(rng, 5, 60), 3);
        const double h = inst.prof.radii[oracle::uniform_size(rng, 0, inst.prof.size() - 1)];
        CHECK(lpor(inst.prof, inst.data, inst.query, h, 0).value ==
              doctest::Approx(kernel_smoother(inst.prof, h).value).epsilon(1e-13));
    }
}

TEST_CASE("lpor matches the normal-equation oracle on the window") {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 50; ++trial) {
        const RandomInstance inst = random_instance(rng, 80, 2);
        const double h = 0.9;
        const std::size_t m = inst.prof.count_within(h);
        if (m < 10) {
            continue;
        }
        std::vector<std::vector<double>> x;
        std::vector<double> y;
        for (std::size_t i = 0; i < m; ++i) {
            const Covariate& c = inst.data[inst.prof.source_indices[i]].x;
            const double z1 = c[0] - inst.query[0];
            const double z2 = c[1] - inst.query[1];
            x.push_back({1.0, z1, z2, z1 * z1, z1 * z2, z2 * z2});
            y.push_back(inst.prof.labels[i]);
        }
        const std::vector<double> ref = oracle::wls(x, y, std::vector<double>(m, 1.0));
        CHECK(lpor(inst.prof, inst.data, inst.query, h, 2).value == doctest::Approx(ref[0]).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("lpor degree fallback and errors") {
    const Dataset data({{Covariate{0.1, 0.0}, 1}, {Covariate{0.0, 0.2}, 0}, {Covariate{3.0, 3.0}, 1}});
    const Covariate q{0.0, 0.0};
    const NeighborProfile p = profile(data, Metric{}, q);
    const Estimate e = lpor(p, data, q, 0.5, 2);
    CHECK(e.fallback_applied);
    CHECK(e.used_points == 2);
    CHECK(e.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_FALSE(lpor(p, data, q, 10.0, 1).fallback_applied);
    CHECK_THROWS_AS(lpor(p, data, q, 0.01, 1), EmptyWindowError);
    CHECK_THROWS_AS(lpor(p, data, Covariate{0.0}, 1.0, 1), DimensionError);
    const Dataset ragged({{Covariate{0.1}, 1}, {Covariate{0.0, 0.2}, 0}});
    CHECK_THROWS_AS(lpor(p, ragged, q, 1.0, 1), DimensionError);
}

TEST_CASE("msknn examples") {
    // knn means 0.4, 0.5, 0.6 at k = 5, 10, 15 with radii 1, 2, 3 there.
    std::vector<double> radii;
    for (int i = 1; i <= 15; ++i) {
        radii.push_back(i / 5.0);
    }
    const std::vector<Label> labels{1, 1, 0, 0, 0, 1, 1, 1, 0, 0, 1, 1, 1, 1, 0};
    const NeighborProfile p = make_profile(radii, labels);
    const std::vector<std::size_t> k{5, 10, 15};
    REQUIRE(knn(p, 5).value == doctest::Approx(0.4));
    REQUIRE(knn(p, 10).value == doctest::Approx(0.5));
    REQUIRE(knn(p, 15).value == doctest::Approx(0.6));
    CHECK(msknn(p, k, 1, Regression::poly, Loss::squared).value == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(msknn(p, k, 0, Regression::poly, Loss::squared).value == doctest::Approx(0.5).epsilon(1e-12));

    // Two-point extrapolation r1 (k1) and r2 (k2): v = (r2 e1 - r1 e2) / (r2 - r1).
    const std::vector<std::size_t> two{5, 15};
    CHECK(msknn(p, two, 1, Regression::poly, Loss::squared).value ==
          doctest::Approx((3.0 * 0.4 - 1.0 * 0.6) / 2.0).epsilon(1e-12));
}

TEST_CASE("msknn with constant scale estimates returns the constant") {
    std::vector<double> radii;
    std::vector<Label> labels;
    for (int i = 0; i < 40; ++i) {
        radii.push_back(0.1 * (i + 1));
        labels.push_back(static_cast<Label>(i % 2));
    }
    const NeighborProfile p = make_profile(radii, labels);
    const std::vector<std::size_t> k{4, 10, 20, 30, 40};
    for (int q = 0; q <= 3; ++q) {
        CHECK(msknn(p, k, q, Regression::poly, Loss::squared).value == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(msknn(p, k, q, Regression::logi, Loss::logistic).value == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(msknn(p, k, q, Regression::logi, Loss::logit_squared).value == doctest::Approx(0.5).epsilon(1e-10));
    }
}

TEST_CASE("msknn logit_squared clips degenerate scale estimates") {
    const NeighborProfile p = make_profile({0.1, 0.2, 0.3, 0.4}, {1, 1, 1, 1});
    const std::vector<std::size_t> k{1, 2, 4};
    const Estimate e = msknn(p, k, 1, Regression::logi, Loss::logit_squared);
    // All k-NN means are 1 and clip to 1 - 1/(2k): 1/2, 3/4, 7/8 at radii 0.1, 0.2, 0.4.
    const std::vector<std::vector<double>> x{{1.0, 0.1}, {1.0, 0.2}, {1.0, 0.4}};
    const std::vector<double> z{logit(0.5), logit(0.75), logit(0.875)};
    const std::vector<double> coef = oracle::wls(x, z, {1.0, 1.0, 1.0});
    CHECK(e.value == doctest::Approx(sigmoid(coef[0])).epsilon(1e-9));
    CHECK(e.value < 0.5);
}

TEST_CASE("msknn validation") {
    const NeighborProfile p = make_profile({0.1, 0.2, 0.3, 0.4}, {1, 0, 1, 0});
    CHECK_THROWS_AS(msknn(p, std::vector<std::size_t>{2, 2, 3}, 1, Regression::poly, Loss::squared), ParameterError);
    CHECK_THROWS_AS(msknn(p, std::vector<std::size_t>{2, 5}, 1, Regression::poly, Loss::squared), ParameterError);
    CHECK_THROWS_AS(msknn(p, std::vector<std::size_t>{1, 2}, 2, Regression::poly, Loss::squared), ParameterError);
    CHECK_THROWS_AS(msknn(p, std::vector<std::size_t>{}, 0, Regression::poly, Loss::squared), ParameterError);
    CHECK_THROWS_AS(msknn(p, std::vector<std::size_t>{0, 2}, 0, Regression::poly, Loss::squared), ParameterError);
    CHECK_THROWS_AS(msknn(p, std::vector<std::size_t>{1, 2}, 1, Regression::poly, Loss::logistic), ParameterError);
}

TEST_CASE("lrr examples") {
    LrrOptions sq;
    sq.loss = Loss::squared;
    sq.degree = 0;
    CHECK(lrr(make_profile({1, 2, 3, 4}, {1, 0, 1, 1}), sq).value == doctest::Approx(0.75).epsilon(1e-14));

    // Least-squares line through (1,1), (2,1), (3,0): slope -1/2, value at 0 is 5/3.
    sq.degree = 1;
    CHECK(lrr(make_profile({1, 2, 3}, {1, 1, 0}), sq).value == doctest::Approx(5.0 / 3.0).epsilon(1e-12));

    // Duplicate of the query: capped 1/r weight dominates.
    LrrOptions inv = sq;
    inv.degree = 0;
    inv.weight = WeightFunction::inverse_r();
    const Estimate dup = lrr(make_profile({0.0, 0.5, 0.7, 1.0}, {1, 0, 0, 0}), inv);
    CHECK(std::isfinite(dup.value));
    CHECK(dup.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lrr weights") {
    const NeighborProfile p = make_profile({0.0, 0.5, 1.0, 2.0}, {1, 0, 1, 0});
    LrrOptions o;
    CHECK(lrr_weights(p, o) == std::vector<double>{1, 1, 1, 1});
    o.weight = WeightFunction::inverse_r();
    const std::vector<double> inv = lrr_weights(p, o);
    CHECK(inv[0] == doctest::Approx(1.0 / (1e-12 * 2.0)));
    CHECK(inv[1] == 2.0);
    CHECK(inv[3] == 0.5);
    o.weight = WeightFunction::boxcar(1.0);
    CHECK(lrr_weights(p, o) == std::vector<double>{1, 1, 1, 0});
    o.weight = WeightFunction::theory(0.6);
    CHECK(lrr_weights(p, o) == std::vector<double>{0.5, 0.5, 0, 0});
    o.weight = WeightFunction::constant_one();
    o.scope = Scope::top_k(2);
    CHECK(lrr_weights(p, o) == std::vector<double>{1, 1, 0, 0});
    o.scope = Scope::radius(1.0);
    CHECK(lrr_weights(p, o) == std::vector<double>{1, 1, 1, 0});
    o.scope = Scope::top_k(9);
    CHECK_THROWS_AS(lrr_weights(p, o), ParameterError);
    // All radii zero: the cap falls back to 1e-12.
    o.scope = Scope::all();
    o.weight = WeightFunction::inverse_r();
    CHECK(lrr_weights(make_profile({0.0, 0.0}, {1, 0}), o)[0] == doctest::Approx(1e12));
}

TEST_CASE("lrr degree fallback and errors") {
    LrrOptions o;
    o.loss = Loss::squared;
    o.degree = 3;
    o.scope = Scope::top_k(2);
    const Estimate e = lrr(make_profile({1, 2, 3}, {1, 0, 1}), o);
    CHECK(e.fallback_applied);
    CHECK(e.used_points == 2);
    CHECK(e.value == doctest::Approx(2.0).epsilon(1e-12));
    o.scope = Scope::radius(0.5);
    CHECK_THROWS_AS(lrr(make_profile({1, 2, 3}, {1, 0, 1}), o), EmptyWindowError);
    o.scope = Scope::all();
    o.loss = Loss::logit_squared;
    CHECK_THROWS_AS(lrr(make_profile({1, 2, 3}, {1, 0, 1}), o), ParameterError);
}

TEST_CASE("classify") {
    CHECK(classify(0.5) == 1);
    CHECK(classify(0.49) == 0);
    CHECK(classify(1.2) == 1);
    CHECK(classify(-0.3) == 0);
    std::mt19937_64 rng(35);
    for (double v : oracle::uniform_vector(rng, 200, -1.0, 2.0)) {
        // Strictly increasing maps fixing 1/2.
        CHECK(classify(v) == classify(0.5 + (v - 0.5) * (v - 0.5) * (v - 0.5)));
        CHECK(classify(v) == classify(0.5 + 3.0 * (v - 0.5)));
    }
}

TEST_CASE("output ranges") {
    std::mt19937_64 rng(36);
    LrrOptions lrlr;
    for (int trial = 0; trial < 100; ++trial) {
        const RandomInstance inst = random_instance(rng, 60, 2);
        const double ks = kernel_smoother(inst.prof, inst.prof.radii[10]).value;
        CHECK((ks >= 0.0 && ks <= 1.0));
        const double k = knn(inst.prof, 7).value;
        CHECK((k >= 0.0 && k <= 1.0));
        for (double v : {lpolr(inst.prof, inst.data, inst.query, 1.0, 1).value, lrr(inst.prof, lrlr).value,
                         msknn(inst.prof, std::vector<std::size_t>{5, 10, 20, 30}, 2, Regression::logi,
                               Loss::logistic)
                             .value}) {
            CHECK((v > 0.0 && v < 1.0));
        }
    }
}

TEST_CASE("label flip maps v to 1 - v") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        const RandomInstance inst = random_instance(rng, 80, 2);
        const Dataset fd = flipped(inst.data);
        const NeighborProfile fp = flipped(inst.prof);
        const std::vector<std::size_t> k{10, 20, 30, 40, 50};
        auto both = [&](const EstimatorSpec& spec, double tol) {
            const double v = estimate(spec, inst.prof, inst.data, inst.query).value;
            const double w = estimate(spec, fp, fd, inst.query).value;
            CHECK(std::abs(v + w - 1.0) <= tol);
        };
        both(KernelSmootherSpec{0.6}, 1e-12);
        both(KnnSpec{15}, 1e-12);
        both(LporSpec{0.9, 2}, 1e-12);
        both(MsknnSpec{k, 2, Regression::poly, Loss::squared, {}}, 1e-12);
        LrrOptions sq;
        sq.loss = Loss::squared;
        both(sq, 1e-12);
        both(LpolrSpec{0.9, 1, {}}, 1e-6);
        both(MsknnSpec{k, 2, Regression::logi, Loss::logistic, {}}, 1e-6);
        both(MsknnSpec{k, 2, Regression::logi, Loss::logit_squared, {}}, 1e-6);
        both(LrrOptions{}, 1e-6);
        LrrOptions winv;
        winv.weight = WeightFunction::inverse_r();
        both(winv, 1e-6);
    }
}

TEST_CASE("estimate dispatch and describe") {
    const Dataset data({{Covariate{0.0}, 1}, {Covariate{1.0}, 0}, {Covariate{2.0}, 1}});
    const Covariate q{0.1};
    CHECK(estimate(KnnSpec{2}, data, Metric{}, q).value == 0.5);
    CHECK(estimate(KernelSmootherSpec{5.0}, data, Metric{}, q).value == doctest::Approx(2.0 / 3.0));
    CHECK(describe(KnnSpec{3}) == "knn(k=3)");
    CHECK(describe(MsknnSpec{{1, 2}, 1, Regression::poly, Loss::squared, {}}) == "msknn(k=1:2,q=1)");
    CHECK(describe(LrrOptions{}) == "lrlr(q=2)");
}
