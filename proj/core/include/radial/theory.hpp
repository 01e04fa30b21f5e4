#pragma once

#include "radial/profile.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace radial {

/// Settings of the theory-mode radial regression: uniform weights 1/N inside
/// the cutoff radius r_tilde, an even polynomial basis of order omega, and
/// the event threshold phi.
struct TheoryConfig {
    double beta = 3.0;
    std::size_t d = 1;
    double r_tilde = 1.0;
    int omega = 1;
    double phi = 0.875;

    /// omega = strict_floor(beta / 2); throws ParameterError when that is below 1.
    static TheoryConfig from_smoothness(double beta, std::size_t d, double r_tilde, double phi);

    void validate() const;
};

/// Design quantities of the in-radius points.
struct DesignState {
    std::size_t n_in = 0;
    /// n_in x omega matrix of r_i^(2c), c = 1..omega.
    Eigen::MatrixXd r_matrix;
    /// <1, P 1> with P the projector onto the column span of r_matrix; unset when n_in < omega.
    std::optional<double> zeta;
    /// (I - P) 1 / (n_in - zeta); empty unless the event holds.
    Eigen::VectorXd rho;
    bool event_holds = false;
    bool rank_deficient = false;
};

/// Builds the design state from the radii of a profile (only r <= r_tilde are used).
DesignState design_state(const NeighborProfile& profile, const TheoryConfig& config);

/// Same, from the in-radius radii directly.
DesignState design_state(std::span<const double> in_radius, int omega, double phi);

/// <1, P 1> for the column span of an arbitrary design (pseudo-inverse on rank deficiency).
double projector_zeta(const Eigen::MatrixXd& design);

/// Weighted-average form of the theory-mode estimator: <rho, labels> when the
/// event holds, 0 otherwise.
double lrr_closed_form(const DesignState& state, std::span<const double> labels);

/// Theory-mode estimator computed by fitting the even polynomial with uniform
/// weights 1/N; 0 when the event fails.
double theory_lrr(const NeighborProfile& profile, const TheoryConfig& config);

/// E(r^k) = d / (d + k) * r_tilde^k for r the distance of a uniform draw in the
/// d-ball of radius r_tilde.
double moment_check(std::size_t d, int k, double r_tilde);

struct Example1Constants {
    double rho_star;
    double phi;
};

/// rho* = 1 - 1/(d+1)^2 and phi = 1 - 1/(2 (d+1)^2).
Example1Constants example1_constants(std::size_t d);

/// -2 beta / (d + 2 beta).
double theoretical_rate_slope(double beta, std::size_t d);

/// Uniform draw from the d-ball of the given radius centered at the origin.
std::vector<double> sample_uniform_ball(std::size_t d, double radius, std::mt19937_64& rng);

struct RateConfig {
    double beta = 2.0;
    std::size_t d = 1;
    /// Even-basis order; 0 selects max(1, strict_floor(beta / 2)).
    int omega = 0;
    /// Event threshold; 0 selects the uniform-design value 1 - 1/(2 (d+1)^2).
    double phi = 0.0;
    std::vector<std::size_t> sample_sizes;
    std::size_t reps = 200;
    std::uint64_t seed = 0;
    /// Ground truth at points of [-1, 1]^d; the query is the origin.
    /// Defaults to 0.5 + 0.3 exp(-||x||^2).
    std::function<double(std::span<const double>)> eta;

    int resolved_omega() const;
    double resolved_phi() const;
};

struct RatePoint {
    std::size_t n = 0;
    double r_tilde = 0.0;
    double risk_mean = 0.0;
    double risk_se = 0.0;
    double event_rate = 0.0;
};

struct RateReport {
    std::vector<RatePoint> points;
    double fitted_slope = 0.0;
    double theoretical_slope = 0.0;
    std::vector<std::string> warnings;
};

/// Monte-Carlo L2 risk of the theory-mode estimator at the origin with
/// r_tilde = n^(-1/(d + 2 beta)), and the log-log slope of risk against n.
RateReport rate_experiment(const RateConfig& config);

double bump_eta(std::span<const double> x);

/// Columns n, risk_mean, risk_se.
void write_rate_csv(std::ostream& os, const RateReport& report);

struct ZetaRow {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
};

/// Mean and sample standard deviation of zeta/N for N radii of uniform draws
/// in the d-ball. The single design column holds r^column_power: power 1 is
/// the statistic (sum r)^2 / sum r^2 whose limit is 1 - 1/(d+1)^2; power 2 is
/// the omega = 1 design of design_state, whose limit is d(d+4)/(d+2)^2.
std::vector<ZetaRow> zeta_concentration(std::size_t d, double r_tilde,
                                        std::span<const std::size_t> n_values, std::size_t reps,
                                        std::uint64_t seed, int column_power = 1);

/// Columns N, zeta_over_N_mean, zeta_over_N_sd.
void write_zeta_csv(std::ostream& os, std::span<const ZetaRow> rows);

} // namespace radial
