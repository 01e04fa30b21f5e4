#include "radial/localfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace radial {

namespace {

// Appends every exponent tuple of total degree `remaining` over variables
// [var, dim) to `out`, first variable varying slowest.
void monomials_of_degree(std::size_t dim, std::size_t var, int remaining, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
    if (var + 1 == dim) {
        current[var] = remaining;
        out.push_back(current);
        current[var] = 0;
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        current[var] = e;
        monomials_of_degree(dim, var + 1, remaining - e, current, out);
    }
    current[var] = 0;
}

double binomial(std::size_t n, std::size_t k) {
    double out = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return out;
}

double softplus(double z) noexcept {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Rows with positive weight only.
WeightedSample active_rows(const WeightedSample& sample) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < sample.weights.size(); ++i) {
        if (sample.weights[i] > 0.0) {
            keep.push_back(i);
        }
    }
    if (static_cast<Eigen::Index>(keep.size()) == sample.weights.size()) {
        return sample;
    }
    WeightedSample out;
    out.has_intercept = sample.has_intercept;
    out.features.resize(static_cast<Eigen::Index>(keep.size()), sample.features.cols());
    out.targets.resize(static_cast<Eigen::Index>(keep.size()));
    out.weights.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t r = 0; r < keep.size(); ++r) {
        const auto i = static_cast<Eigen::Index>(r);
        out.features.row(i) = sample.features.row(keep[r]);
        out.targets[i] = sample.targets[keep[r]];
        out.weights[i] = sample.weights[keep[r]];
    }
    return out;
}

// Column standardization: with an intercept, columns 1.. are centered and
// scaled by their weighted mean and standard deviation; without one they are
// only scaled by their weighted root mean square.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;
    bool intercept;

    Standardizer(const Eigen::MatrixXd& x, const Eigen::VectorXd& w, bool has_intercept)
        : mean(Eigen::VectorXd::Zero(x.cols())), scale(Eigen::VectorXd::Ones(x.cols())),
          intercept(has_intercept) {
        const double wsum = w.sum();
        for (Eigen::Index j = intercept ? 1 : 0; j < x.cols(); ++j) {
            const double m = intercept ? w.dot(x.col(j)) / wsum : 0.0;
            const double var = w.dot((x.col(j).array() - m).square().matrix()) / wsum;
            mean[j] = m;
            const double s = std::sqrt(var);
            scale[j] = (s > 0.0 && std::isfinite(s)) ? s : 1.0;
        }
    }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
        Eigen::MatrixXd out = x;
        for (Eigen::Index j = intercept ? 1 : 0; j < x.cols(); ++j) {
            out.col(j) = (x.col(j).array() - mean[j]) / scale[j];
        }
        return out;
    }

    Eigen::VectorXd to_raw(const Eigen::VectorXd& beta) const {
        Eigen::VectorXd theta = beta.cwiseQuotient(scale);
        if (intercept) {
            theta[0] = beta[0];
            for (Eigen::Index j = 1; j < beta.size(); ++j) {
                theta[0] -= beta[j] * mean[j] / scale[j];
            }
        }
        return theta;
    }
};

} // namespace

FeatureMap::FeatureMap(Kind kind, int degree, std::size_t input_dim)
    : kind_(kind), degree_(degree), input_dim_(input_dim) {
    if (degree < 0) {
        throw ParameterError("feature map degree must be nonnegative");
    }
    if (kind == Kind::radial_even_poly && degree < 1) {
        throw ParameterError("even radial basis requires order >= 1");
    }
    if (multivariate() && input_dim == 0) {
        throw ParameterError("multivariate basis requires input dimension >= 1");
    }
    if (kind == Kind::multivariate_poly) {
        std::vector<int> current(input_dim, 0);
        for (int t = 0; t <= degree; ++t) {
            monomials_of_degree(input_dim, 0, t, current, exponents_);
        }
    } else if (kind == Kind::additive_poly) {
        exponents_.emplace_back(input_dim, 0);
        for (int p = 1; p <= degree; ++p) {
            for (std::size_t j = 0; j < input_dim; ++j) {
                std::vector<int> e(input_dim, 0);
                e[j] = p;
                exponents_.push_back(std::move(e));
            }
        }
    }
}

FeatureMap FeatureMap::multivariate_poly(int degree, std::size_t input_dim) {
    return FeatureMap(Kind::multivariate_poly, degree, input_dim);
}

FeatureMap FeatureMap::additive_poly(int degree, std::size_t input_dim) {
    return FeatureMap(Kind::additive_poly, degree, input_dim);
}

FeatureMap FeatureMap::radial_poly(int degree) { return FeatureMap(Kind::radial_poly, degree, 1); }

FeatureMap FeatureMap::radial_even_poly(int order) {
    return FeatureMap(Kind::radial_even_poly, order, 1);
}

std::size_t FeatureMap::output_dim() const noexcept {
    switch (kind_) {
    case Kind::multivariate_poly:
        return static_cast<std::size_t>(
            binomial(input_dim_ + static_cast<std::size_t>(degree_), static_cast<std::size_t>(degree_)));
    case Kind::additive_poly:
        return 1 + input_dim_ * static_cast<std::size_t>(degree_);
    case Kind::radial_poly:
    case Kind::radial_even_poly:
        return static_cast<std::size_t>(degree_) + 1;
    }
    return 0;
}

Eigen::VectorXd FeatureMap::expand(std::span<const double> input) const {
    if (input.size() != input_dim_) {
        throw DimensionError("feature map expects input of length " + std::to_string(input_dim_) +
                             ", got " + std::to_string(input.size()));
    }
    if (!multivariate()) {
        return expand(input[0]);
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(exponents_.size()));
    for (std::size_t c = 0; c < exponents_.size(); ++c) {
        double v = 1.0;
        for (std::size_t k = 0; k < input_dim_; ++k) {
            for (int e = 0; e < exponents_[c][k]; ++e) {
                v *= input[k];
            }
        }
        out[static_cast<Eigen::Index>(c)] = v;
    }
    return out;
}

Eigen::VectorXd FeatureMap::expand(double radius) const {
    if (multivariate()) {
        return expand(std::span<const double>(&radius, 1));
    }
    const auto cols = static_cast<Eigen::Index>(output_dim());
    const double step = kind_ == Kind::radial_even_poly ? radius * radius : radius;
    Eigen::VectorXd out(cols);
    double v = 1.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
        out[c] = v;
        v *= step;
    }
    return out;
}

Eigen::MatrixXd FeatureMap::design(std::span<const double> radii) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(radii.size()), static_cast<Eigen::Index>(output_dim()));
    for (std::size_t i = 0; i < radii.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = expand(radii[i]).transpose();
    }
    return out;
}

void WeightedSample::validate() const {
    if (features.rows() != targets.size() || features.rows() != weights.size()) {
        throw DimensionError("weighted sample: row counts disagree");
    }
    if (features.cols() == 0) {
        throw DimensionError("weighted sample: no feature columns");
    }
    if ((weights.array() < 0.0).any() || !weights.allFinite()) {
        throw DomainError("weighted sample: weights must be finite and nonnegative");
    }
    if (!(weights.array() > 0.0).any()) {
        throw DomainError("weighted sample: at least one weight must be positive");
    }
    if (!features.allFinite() || !targets.allFinite()) {
        throw DomainError("weighted sample: non-finite feature or target");
    }
}

FitResult wls_fit(const WeightedSample& sample) {
    sample.validate();
    const WeightedSample s = active_rows(sample);
    const Standardizer st(s.features, s.weights, s.has_intercept);

    const Eigen::VectorXd sqrt_w = s.weights.cwiseSqrt();
    const Eigen::MatrixXd a = sqrt_w.asDiagonal() * st.apply(s.features);
    const Eigen::VectorXd b = sqrt_w.cwiseProduct(s.targets);

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(1e-10);
    cod.compute(a);

    FitResult out;
    out.theta = st.to_raw(cod.solve(b));
    out.iterations = 1;
    out.condition_flag = cod.rank() < a.cols();
    if (!out.condition_flag && a.cols() > 0) {
        const Eigen::VectorXd diag = cod.matrixQTZ().diagonal().cwiseAbs();
        out.condition_flag = diag.minCoeff() < 1e-8 * diag.maxCoeff();
    }
    out.converged = out.theta.allFinite();
    return out;
}

double logistic_objective(const WeightedSample& sample, const Eigen::VectorXd& theta, double ridge) {
    if (theta.size() != sample.features.cols()) {
        throw DimensionError("logistic objective: theta length mismatch");
    }
    const Eigen::VectorXd eta = sample.features * theta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        ll += sample.weights[i] * (sample.targets[i] * eta[i] - softplus(eta[i]));
    }
    return ll - 0.5 * ridge * theta.tail(theta.size() - 1).squaredNorm();
}

Eigen::VectorXd logistic_gradient(const WeightedSample& sample, const Eigen::VectorXd& theta,
                                  double ridge) {
    if (theta.size() != sample.features.cols()) {
        throw DimensionError("logistic gradient: theta length mismatch");
    }
    const Eigen::VectorXd eta = sample.features * theta;
    Eigen::VectorXd resid(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        resid[i] = sample.weights[i] * (sample.targets[i] - sigmoid(eta[i]));
    }
    Eigen::VectorXd g = sample.features.transpose() * resid;
    g.tail(g.size() - 1) -= ridge * theta.tail(theta.size() - 1);
    return g;
}

namespace {

struct NewtonOutcome {
    FitResult fit;
    bool diverged = false;
};

NewtonOutcome newton(const WeightedSample& s, const Standardizer& st, const Eigen::MatrixXd& xs,
                     double ridge, const LogisticOptions& opt) {
    const Eigen::Index p = xs.cols();
    // Penalty on theta[1:] expressed in standardized coordinates.
    Eigen::VectorXd penalty = st.scale.cwiseInverse().cwiseAbs2();
    penalty[0] = 0.0;

    auto objective = [&](const Eigen::VectorXd& beta) {
        const Eigen::VectorXd eta = xs * beta;
        double ll = 0.0;
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            ll += s.weights[i] * (s.targets[i] * eta[i] - softplus(eta[i]));
        }
        return ll - 0.5 * ridge * beta.cwiseAbs2().dot(penalty);
    };

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    if (s.has_intercept) {
        const double ybar = s.weights.dot(s.targets) / s.weights.sum();
        beta[0] = logit(std::clamp(ybar, 1e-6, 1.0 - 1e-6));
    }

    NewtonOutcome out;
    out.fit.ridge = ridge;
    // Iterate to the absolute tolerance; a stalled iterate still counts as
    // converged when its gradient is small relative to the total weight.
    const double tol = opt.tol * std::max(1.0, s.weights.sum());
    double current = objective(beta);
    for (int it = 0; it < opt.max_iter; ++it) {
        out.fit.iterations = it;
        const Eigen::VectorXd theta = st.to_raw(beta);
        if (logistic_gradient(s, theta, ridge).lpNorm<Eigen::Infinity>() < opt.tol) {
            out.fit.converged = true;
            break;
        }

        const Eigen::VectorXd eta = xs * beta;
        Eigen::VectorXd resid(eta.size());
        Eigen::VectorXd curv(eta.size());
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            const double mu = sigmoid(eta[i]);
            resid[i] = s.weights[i] * (s.targets[i] - mu);
            curv[i] = s.weights[i] * mu * (1.0 - mu);
        }
        const Eigen::VectorXd grad = xs.transpose() * resid - ridge * penalty.cwiseProduct(beta);
        Eigen::MatrixXd hess = xs.transpose() * curv.asDiagonal() * xs;
        hess.diagonal() += ridge * penalty;

        Eigen::VectorXd step;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        if (ldlt.info() == Eigen::Success) {
            step = ldlt.solve(grad);
        }
        if (step.size() != p || !step.allFinite()) {
            step = hess.completeOrthogonalDecomposition().solve(grad);
        }
        if (!step.allFinite()) {
            break;
        }

        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opt.max_halvings; ++h, t *= 0.5) {
            const Eigen::VectorXd candidate = beta + t * step;
            const double value = objective(candidate);
            if (!std::isfinite(value) || !candidate.allFinite()) {
                continue;
            }
            if (value >= current) {
                accepted = value > current;
                beta = candidate;
                current = value;
                break;
            }
        }
        if (!accepted) {
            out.fit.iterations = it + 1;
            break;
        }
        if (beta.norm() > opt.divergence_norm) {
            out.diverged = true;
            out.fit.iterations = it + 1;
            break;
        }
        out.fit.iterations = it + 1;
    }
    out.fit.theta = st.to_raw(beta);
    if (!out.fit.converged && !out.diverged) {
        out.fit.converged = logistic_gradient(s, out.fit.theta, ridge).lpNorm<Eigen::Infinity>() < tol;
    }
    return out;
}

} // namespace

FitResult logistic_fit(const WeightedSample& sample, const LogisticOptions& options) {
    sample.validate();
    if ((sample.targets.array() < 0.0).any() || (sample.targets.array() > 1.0).any()) {
        throw DomainError("logistic_fit: targets must lie in [0, 1]");
    }
    if (options.ridge < 0.0) {
        throw ParameterError("logistic_fit: ridge must be nonnegative");
    }
    const WeightedSample s = active_rows(sample);
    const Standardizer st(s.features, s.weights, s.has_intercept);
    const Eigen::MatrixXd xs = st.apply(s.features);

    NewtonOutcome result = newton(s, st, xs, options.ridge, options);
    bool retried = false;
    if (result.diverged && options.ridge < options.separation_ridge) {
        result = newton(s, st, xs, options.separation_ridge, options);
        retried = true;
    }
    FitResult fit = std::move(result.fit);
    if (result.diverged) {
        fit.converged = false;
    }
    fit.condition_flag = retried || result.diverged;
    return fit;
}

double evaluate(const FeatureMap& map, const Eigen::VectorXd& theta, std::span<const double> input) {
    if (static_cast<std::size_t>(theta.size()) != map.output_dim()) {
        throw DimensionError("evaluate: theta length does not match the basis size");
    }
    return map.expand(input).dot(theta);
}

double evaluate(const FeatureMap& map, const Eigen::VectorXd& theta, double radius) {
    if (static_cast<std::size_t>(theta.size()) != map.output_dim()) {
        throw DimensionError("evaluate: theta length does not match the basis size");
    }
    return map.expand(radius).dot(theta);
}

} // namespace radial
