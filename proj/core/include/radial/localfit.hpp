#pragma once

#include "radial/types.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace radial {

/// Polynomial basis expansions. Every map emits the constant term first.
///
/// - multivariate_poly(q, d): all monomials of total degree <= q in d
///   variables, graded by degree (C(d+q, q) columns).
/// - additive_poly(q, d): x_j^p for p = 1..q and each coordinate, no cross
///   terms (1 + d q columns).
/// - radial_poly(q): 1, r, r^2, ..., r^q.
/// - radial_even_poly(omega): 1, r^2, r^4, ..., r^(2 omega).
class FeatureMap {
public:
    enum class Kind { multivariate_poly, additive_poly, radial_poly, radial_even_poly };

    static FeatureMap multivariate_poly(int degree, std::size_t input_dim);
    static FeatureMap additive_poly(int degree, std::size_t input_dim);
    static FeatureMap radial_poly(int degree);
    static FeatureMap radial_even_poly(int order);

    Kind kind() const noexcept { return kind_; }
    int degree() const noexcept { return degree_; }
    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t output_dim() const noexcept;

    /// Basis values at a point (multivariate) or radius (radial maps).
    Eigen::VectorXd expand(std::span<const double> input) const;
    Eigen::VectorXd expand(double radius) const;

    /// Stacks expand(r_i) rows.
    Eigen::MatrixXd design(std::span<const double> radii) const;

private:
    FeatureMap(Kind kind, int degree, std::size_t input_dim);

    Kind kind_;
    int degree_;
    std::size_t input_dim_;
    bool multivariate() const noexcept { return kind_ == Kind::multivariate_poly || kind_ == Kind::additive_poly; }

    // Exponent tuples for the multivariate maps, one per output column.
    std::vector<std::vector<int>> exponents_;
};

/// Rows are observations; column 0 is the intercept (all ones) unless
/// has_intercept is false.
struct WeightedSample {
    Eigen::MatrixXd features;
    Eigen::VectorXd targets;
    Eigen::VectorXd weights;
    bool has_intercept = true;

    /// Throws DimensionError / DomainError when the invariants fail.
    void validate() const;
};

struct FitResult {
    Eigen::VectorXd theta;
    bool converged = false;
    int iterations = 0;
    /// Set when the design was rank-deficient or ill-conditioned.
    bool condition_flag = false;
    /// Ridge actually used (logistic fits only; raised on separation).
    double ridge = 0.0;
};

/// Minimizes sum_i w_i (y_i - x_i . theta)^2. Non-intercept columns are
/// standardized before an orthogonal decomposition and the solution is mapped
/// back, so theta is the minimizer for the raw features. Rank-deficient
/// designs yield the minimum-norm solution with condition_flag set.
FitResult wls_fit(const WeightedSample& sample);

struct LogisticOptions {
    int max_iter = 100;
    /// Iterates until the raw-gradient sup-norm is below tol or the objective stalls;
    /// a stalled fit is converged when the sup-norm is below tol * max(1, total weight).
    double tol = 1e-8;
    /// Penalty ridge * ||theta[1:]||^2 / 2 (intercept unpenalized).
    double ridge = 1e-8;
    /// Ridge used for the single retry after divergence is detected.
    double separation_ridge = 1e-3;
    /// Norm of the standardized coefficients treated as divergence.
    double divergence_norm = 1e3;
    /// Step halvings allowed per Newton iteration.
    int max_halvings = 30;
};

/// Maximizes sum_i w_i [y_i log s_i + (1 - y_i) log(1 - s_i)] - ridge/2 ||theta[1:]||^2
/// with s_i = sigmoid(x_i . theta), by damped Newton iterations. Targets may be
/// fractional in [0, 1].
FitResult logistic_fit(const WeightedSample& sample, const LogisticOptions& options = {});

/// Weighted penalized Bernoulli log-likelihood at theta (the objective of logistic_fit).
double logistic_objective(const WeightedSample& sample, const Eigen::VectorXd& theta, double ridge);

/// Analytic gradient of logistic_objective with respect to theta.
Eigen::VectorXd logistic_gradient(const WeightedSample& sample, const Eigen::VectorXd& theta,
                                  double ridge);

/// Basis expansion dotted with theta. No link function is applied.
double evaluate(const FeatureMap& map, const Eigen::VectorXd& theta, std::span<const double> input);
double evaluate(const FeatureMap& map, const Eigen::VectorXd& theta, double radius);

} // namespace radial
