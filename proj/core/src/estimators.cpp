#include "radial/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace radial {

namespace {

void require_positive_bandwidth(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw ParameterError("bandwidth h must be positive and finite");
    }
}

void require_degree(int degree) {
    if (degree < 0) {
        throw ParameterError("polynomial degree must be nonnegative");
    }
}

double label_mean(const NeighborProfile& profile, std::size_t count) {
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        sum += profile.labels[i];
    }
    return sum / static_cast<double>(count);
}

struct LocalWindow {
    Eigen::MatrixXd features;
    Eigen::VectorXd labels;
    int degree;
    bool reduced;
};

// Offsets of the in-window points with the degree lowered until the basis
// fits the window.
LocalWindow local_window(const NeighborProfile& profile, const Dataset& data, const Covariate& query,
                         double h, int degree) {
    require_positive_bandwidth(h);
    require_degree(degree);
    const std::size_t d = data.require_fixed_dimension();
    if (query.size() != d) {
        throw DimensionError("query length does not match the dataset dimension");
    }
    const std::size_t m = profile.count_within(h);
    if (m == 0) {
        throw EmptyWindowError("no training point within bandwidth " + std::to_string(h));
    }
    LocalWindow w{{}, {}, degree, false};
    while (w.degree > 0 && FeatureMap::multivariate_poly(w.degree, d).output_dim() > m) {
        --w.degree;
        w.reduced = true;
    }
    const FeatureMap map = FeatureMap::multivariate_poly(w.degree, d);
    w.features.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(map.output_dim()));
    w.labels.resize(static_cast<Eigen::Index>(m));
    std::vector<double> offset(d);
    for (std::size_t i = 0; i < m; ++i) {
        const Covariate& x = data[profile.source_indices[i]].x;
        for (std::size_t c = 0; c < d; ++c) {
            offset[c] = x[c] - query[c];
        }
        w.features.row(static_cast<Eigen::Index>(i)) = map.expand(offset).transpose();
        w.labels[static_cast<Eigen::Index>(i)] = profile.labels[i];
    }
    return w;
}

} // namespace

Estimate kernel_smoother(const NeighborProfile& profile, double h) {
    require_positive_bandwidth(h);
    const std::size_t m = profile.count_within(h);
    if (m == 0) {
        throw EmptyWindowError("kernel smoother: no training point within h = " + std::to_string(h));
    }
    return {label_mean(profile, m), m, true, false};
}

Estimate knn(const NeighborProfile& profile, std::size_t k) {
    if (k < 1 || k > profile.size()) {
        throw ParameterError("knn: k = " + std::to_string(k) + " outside [1, " +
                             std::to_string(profile.size()) + "]");
    }
    return {label_mean(profile, k), k, true, false};
}

Estimate lpor(const NeighborProfile& profile, const Dataset& data, const Covariate& query, double h,
              int degree) {
    const LocalWindow w = local_window(profile, data, query, h, degree);
    WeightedSample sample{w.features, w.labels, Eigen::VectorXd::Ones(w.labels.size())};
    const FitResult fit = wls_fit(sample);
    return {fit.theta[0], static_cast<std::size_t>(w.labels.size()), fit.converged, w.reduced};
}

Estimate lpolr(const NeighborProfile& profile, const Dataset& data, const Covariate& query, double h,
               int degree, const LogisticOptions& options) {
    const LocalWindow w = local_window(profile, data, query, h, degree);
    WeightedSample sample{w.features, w.labels, Eigen::VectorXd::Ones(w.labels.size())};
    const FitResult fit = logistic_fit(sample, options);
    return {sigmoid(fit.theta[0]), static_cast<std::size_t>(w.labels.size()), fit.converged,
            w.reduced};
}

Estimate msknn(const NeighborProfile& profile, std::span<const std::size_t> k_vec, int degree,
               Regression regression, Loss loss, const LogisticOptions& options) {
    require_degree(degree);
    if (k_vec.empty()) {
        throw ParameterError("msknn: empty k vector");
    }
    for (std::size_t j = 0; j < k_vec.size(); ++j) {
        if (k_vec[j] < 1 || (j > 0 && k_vec[j] <= k_vec[j - 1])) {
            throw ParameterError("msknn: k vector must be strictly increasing and start at >= 1");
        }
    }
    if (k_vec.back() > profile.size()) {
        throw ParameterError("msknn: k_J exceeds the number of training points");
    }
    if (k_vec.size() < static_cast<std::size_t>(degree) + 1) {
        throw ParameterError("msknn: need J >= q + 1 scales for identifiability");
    }

    const auto rows = static_cast<Eigen::Index>(k_vec.size());
    std::vector<double> radii(k_vec.size());
    Eigen::VectorXd estimates(rows);
    for (std::size_t j = 0; j < k_vec.size(); ++j) {
        radii[j] = profile.radii[k_vec[j] - 1];
        estimates[static_cast<Eigen::Index>(j)] = knn(profile, k_vec[j]).value;
    }
    const FeatureMap map = FeatureMap::radial_poly(degree);
    WeightedSample sample{map.design(radii), estimates, Eigen::VectorXd::Ones(rows)};

    Estimate out;
    out.used_points = k_vec.back();
    if (regression == Regression::poly && loss == Loss::squared) {
        const FitResult fit = wls_fit(sample);
        out.value = fit.theta[0];
        out.converged = fit.converged;
    } else if (regression == Regression::logi && loss == Loss::logistic) {
        const FitResult fit = logistic_fit(sample, options);
        out.value = sigmoid(fit.theta[0]);
        out.converged = fit.converged;
    } else if (regression == Regression::logi && loss == Loss::logit_squared) {
        for (std::size_t j = 0; j < k_vec.size(); ++j) {
            // Smallest deviation from {0, 1} a k-sample mean can represent.
            const double margin = 1.0 / (2.0 * static_cast<double>(k_vec[j]));
            const auto i = static_cast<Eigen::Index>(j);
            sample.targets[i] = logit(std::clamp(sample.targets[i], margin, 1.0 - margin));
        }
        const FitResult fit = wls_fit(sample);
        out.value = sigmoid(fit.theta[0]);
        out.converged = fit.converged;
    } else {
        throw ParameterError("msknn: unsupported regression/loss combination");
    }
    return out;
}

std::vector<double> lrr_weights(const NeighborProfile& profile, const LrrOptions& options) {
    std::size_t in_scope = profile.size();
    switch (options.scope.kind) {
    case Scope::Kind::all:
        break;
    case Scope::Kind::radius:
        require_positive_bandwidth(options.scope.h);
        in_scope = profile.count_within(options.scope.h);
        break;
    case Scope::Kind::top_k:
        if (options.scope.k < 1 || options.scope.k > profile.size()) {
            throw ParameterError("lrr: top_k scope outside [1, n]");
        }
        in_scope = options.scope.k;
        break;
    }

    std::vector<double> w(profile.size(), 0.0);
    const WeightFunction& wf = options.weight;
    switch (wf.kind) {
    case WeightFunction::Kind::constant_one:
        std::fill(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(in_scope), 1.0);
        break;
    case WeightFunction::Kind::inverse_r: {
        const double largest = in_scope > 0 ? profile.radii[in_scope - 1] : 0.0;
        const double eps = 1e-12 * (largest > 0.0 ? largest : 1.0);
        for (std::size_t i = 0; i < in_scope; ++i) {
            w[i] = 1.0 / std::max(profile.radii[i], eps);
        }
        break;
    }
    case WeightFunction::Kind::boxcar:
        require_positive_bandwidth(wf.radius);
        for (std::size_t i = 0; i < in_scope && profile.radii[i] <= wf.radius; ++i) {
            w[i] = 1.0;
        }
        break;
    case WeightFunction::Kind::theory: {
        require_positive_bandwidth(wf.radius);
        const std::size_t n_in = profile.count_within(wf.radius);
        for (std::size_t i = 0; i < in_scope && i < n_in; ++i) {
            w[i] = 1.0 / static_cast<double>(n_in);
        }
        break;
    }
    }
    return w;
}

Estimate lrr(const NeighborProfile& profile, const LrrOptions& options) {
    require_degree(options.degree);
    if (options.loss == Loss::logit_squared) {
        throw ParameterError("lrr: loss must be squared or logistic");
    }
    const std::vector<double> w = lrr_weights(profile, options);

    std::vector<double> radii;
    std::vector<double> labels;
    std::vector<double> weights;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > 0.0) {
            radii.push_back(profile.radii[i]);
            labels.push_back(profile.labels[i]);
            weights.push_back(w[i]);
        }
    }
    if (radii.empty()) {
        throw EmptyWindowError("lrr: no point with positive weight in scope");
    }

    Estimate out;
    out.used_points = radii.size();
    int degree = options.degree;
    while (degree > 0 && static_cast<std::size_t>(degree) + 1 > radii.size()) {
        --degree;
        out.fallback_applied = true;
    }
    const FeatureMap map = (options.basis == RadialBasis::even_poly && degree >= 1)
                               ? FeatureMap::radial_even_poly(degree)
                               : FeatureMap::radial_poly(degree);

    WeightedSample sample{map.design(radii),
                          Eigen::Map<const Eigen::VectorXd>(labels.data(),
                                                            static_cast<Eigen::Index>(labels.size())),
                          Eigen::Map<const Eigen::VectorXd>(weights.data(),
                                                            static_cast<Eigen::Index>(weights.size()))};
    if (options.loss == Loss::squared) {
        const FitResult fit = wls_fit(sample);
        out.value = fit.theta[0];
        out.converged = fit.converged;
    } else {
        const FitResult fit = logistic_fit(sample, options.logistic);
        out.value = sigmoid(fit.theta[0]);
        out.converged = fit.converged;
    }
    return out;
}

int classify(double value) noexcept { return value >= 0.5 ? 1 : 0; }

Estimate estimate(const EstimatorSpec& spec, const NeighborProfile& profile, const Dataset& data,
                  const Covariate& query) {
    struct Visitor {
        const NeighborProfile& profile;
        const Dataset& data;
        const Covariate& query;

        Estimate operator()(const KernelSmootherSpec& s) const { return kernel_smoother(profile, s.h); }
        Estimate operator()(const KnnSpec& s) const { return knn(profile, s.k); }
        Estimate operator()(const LporSpec& s) const { return lpor(profile, data, query, s.h, s.degree); }
        Estimate operator()(const LpolrSpec& s) const {
            return lpolr(profile, data, query, s.h, s.degree, s.logistic);
        }
        Estimate operator()(const MsknnSpec& s) const {
            return msknn(profile, s.k_vec, s.degree, s.regression, s.loss, s.logistic);
        }
        Estimate operator()(const LrrSpec& s) const { return lrr(profile, s); }
    };
    return std::visit(Visitor{profile, data, query}, spec);
}

Estimate estimate(const EstimatorSpec& spec, const Dataset& data, const Metric& metric,
                  const Covariate& query) {
    return estimate(spec, profile(data, metric, query), data, query);
}

std::string describe(const EstimatorSpec& spec) {
    std::ostringstream os;
    struct Visitor {
        std::ostringstream& os;
        void operator()(const KernelSmootherSpec& s) const { os << "ks(h=" << s.h << ")"; }
        void operator()(const KnnSpec& s) const { os << "knn(k=" << s.k << ")"; }
        void operator()(const LporSpec& s) const { os << "lpor(h=" << s.h << ",q=" << s.degree << ")"; }
        void operator()(const LpolrSpec& s) const { os << "lpolr(h=" << s.h << ",q=" << s.degree << ")"; }
        void operator()(const MsknnSpec& s) const {
            os << "msknn(k=";
            for (std::size_t j = 0; j < s.k_vec.size(); ++j) {
                os << (j ? ":" : "") << s.k_vec[j];
            }
            os << ",q=" << s.degree << ")";
        }
        void operator()(const LrrSpec& s) const {
            os << (s.loss == Loss::logistic ? "lrlr" : "lrr") << "(q=" << s.degree << ")";
        }
    };
    std::visit(Visitor{os}, spec);
    return os.str();
}

} // namespace radial
