#include "radial/theory.hpp"

#include "radial/csv.hpp"
#include "radial/localfit.hpp"
#include "radial/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace radial {

TheoryConfig TheoryConfig::from_smoothness(double beta, std::size_t d, double r_tilde, double phi) {
    TheoryConfig cfg{beta, d, r_tilde, strict_floor(beta / 2.0), phi};
    cfg.validate();
    return cfg;
}

void TheoryConfig::validate() const {
    if (omega < 1) {
        throw ParameterError("theory mode requires omega >= 1");
    }
    if (!(r_tilde > 0.0)) {
        throw ParameterError("theory mode requires r_tilde > 0");
    }
    if (!(phi > 0.0 && phi < 1.0)) {
        throw ParameterError("theory mode requires phi in (0, 1)");
    }
    if (d < 1) {
        throw ParameterError("theory mode requires d >= 1");
    }
}

namespace {

// Orthogonal projection of the all-ones vector onto the column span of
// `design`, via a column-pivoted QR of the column-normalized design (columns
// r^(2c) differ wildly in scale for small radii). Reports the numerical rank.
Eigen::VectorXd project_ones(const Eigen::MatrixXd& design, Eigen::Index& rank) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(design.rows());
    rank = 0;
    if (design.rows() == 0) {
        return ones;
    }
    Eigen::MatrixXd a = design;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const double norm = a.col(j).norm();
        if (norm > 0.0) {
            a.col(j) /= norm;
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-12);
    rank = qr.rank();
    if (rank == 0) {
        return Eigen::VectorXd::Zero(design.rows());
    }
    const Eigen::MatrixXd q = Eigen::MatrixXd(qr.householderQ()).leftCols(rank);
    return q * (q.transpose() * ones);
}

} // namespace

double projector_zeta(const Eigen::MatrixXd& design) {
    Eigen::Index rank = 0;
    return project_ones(design, rank).sum();
}

DesignState design_state(std::span<const double> in_radius, int omega, double phi) {
    if (omega < 1) {
        throw ParameterError("design_state: omega must be >= 1");
    }
    DesignState s;
    s.n_in = in_radius.size();
    const auto n = static_cast<Eigen::Index>(s.n_in);
    s.r_matrix.resize(n, omega);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r2 = in_radius[static_cast<std::size_t>(i)] * in_radius[static_cast<std::size_t>(i)];
        double v = r2;
        for (int c = 0; c < omega; ++c) {
            s.r_matrix(i, c) = v;
            v *= r2;
        }
    }
    if (s.n_in == 0) {
        return s;
    }

    Eigen::Index rank = 0;
    const Eigen::VectorXd projected = project_ones(s.r_matrix, rank);
    s.rank_deficient = rank < omega;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const double zeta = ones.dot(projected);
    if (s.n_in >= static_cast<std::size_t>(omega)) {
        s.zeta = zeta;
    }

    const double nd = static_cast<double>(s.n_in);
    s.event_holds = s.n_in >= static_cast<std::size_t>(omega) + 1 && zeta <= phi * nd &&
                    nd - zeta >= 1e-9 * nd;
    if (s.event_holds) {
        s.rho = (ones - projected) / (nd - zeta);
    }
    return s;
}

DesignState design_state(const NeighborProfile& profile, const TheoryConfig& config) {
    config.validate();
    const std::size_t n_in = profile.count_within(config.r_tilde);
    return design_state(std::span<const double>(profile.radii.data(), n_in), config.omega, config.phi);
}

double lrr_closed_form(const DesignState& state, std::span<const double> labels) {
    if (labels.size() != state.n_in) {
        throw DimensionError("lrr_closed_form: expected " + std::to_string(state.n_in) + " labels, got " +
                             std::to_string(labels.size()));
    }
    if (!state.event_holds) {
        return 0.0;
    }
    return state.rho.dot(Eigen::Map<const Eigen::VectorXd>(labels.data(), state.rho.size()));
}

double theory_lrr(const NeighborProfile& profile, const TheoryConfig& config) {
    const DesignState state = design_state(profile, config);
    if (!state.event_holds) {
        return 0.0;
    }
    const auto n = static_cast<Eigen::Index>(state.n_in);
    const FeatureMap map = FeatureMap::radial_even_poly(config.omega);
    WeightedSample sample;
    sample.features = map.design(std::span<const double>(profile.radii.data(), state.n_in));
    sample.targets.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        sample.targets[i] = profile.labels[static_cast<std::size_t>(i)];
    }
    sample.weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    return wls_fit(sample).theta[0];
}

double moment_check(std::size_t d, int k, double r_tilde) {
    if (d < 1 || k < 1) {
        throw ParameterError("moment_check requires d >= 1 and k >= 1");
    }
    const double dd = static_cast<double>(d);
    return dd / (dd + k) * std::pow(r_tilde, k);
}

Example1Constants example1_constants(std::size_t d) {
    if (d < 1) {
        throw ParameterError("example1_constants requires d >= 1");
    }
    const double s = (static_cast<double>(d) + 1.0) * (static_cast<double>(d) + 1.0);
    return {1.0 - 1.0 / s, 1.0 - 1.0 / (2.0 * s)};
}

double theoretical_rate_slope(double beta, std::size_t d) {
    return -2.0 * beta / (static_cast<double>(d) + 2.0 * beta);
}

std::vector<double> sample_uniform_ball(std::size_t d, double radius, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> x(d);
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (double& v : x) {
            v = gauss(rng);
            norm2 += v * v;
        }
    } while (norm2 == 0.0);
    const double scale = radius * std::pow(unif(rng), 1.0 / static_cast<double>(d)) / std::sqrt(norm2);
    for (double& v : x) {
        v *= scale;
    }
    return x;
}

double bump_eta(std::span<const double> x) {
    double sq = 0.0;
    for (double v : x) {
        sq += v * v;
    }
    return std::clamp(0.5 + 0.3 * std::exp(-sq), 0.0, 1.0);
}

int RateConfig::resolved_omega() const {
    if (omega > 0) {
        return omega;
    }
    return std::max(1, strict_floor(beta / 2.0));
}

double RateConfig::resolved_phi() const {
    return phi > 0.0 ? phi : example1_constants(d).phi;
}

RateReport rate_experiment(const RateConfig& config) {
    if (config.sample_sizes.size() < 3) {
        throw ParameterError("rate_experiment needs at least 3 sample sizes");
    }
    if (std::adjacent_find(config.sample_sizes.begin(), config.sample_sizes.end(), std::greater_equal<>{}) !=
        config.sample_sizes.end()) {
        throw ParameterError("rate_experiment sample sizes must be strictly increasing");
    }
    if (config.reps < 30) {
        throw ParameterError("rate_experiment needs at least 30 repetitions");
    }
    if (config.d < 1 || !(config.beta > 0.0)) {
        throw ParameterError("rate_experiment needs d >= 1 and beta > 0");
    }
    const auto eta = config.eta ? config.eta : std::function<double(std::span<const double>)>(bump_eta);
    const int omega = config.resolved_omega();
    const double phi = config.resolved_phi();
    const std::size_t d = config.d;
    const std::vector<double> origin(d, 0.0);
    const double eta_star = eta(origin);

    const std::size_t sizes = config.sample_sizes.size();
    std::vector<double> sq_err(sizes * config.reps);
    std::vector<char> event(sizes * config.reps);

    parallel_for(sizes * config.reps, [&](std::size_t cell) {
        const std::size_t s = cell / config.reps;
        const std::size_t rep = cell % config.reps;
        const std::size_t n = config.sample_sizes[s];
        const double r_tilde = std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(d) + 2.0 * config.beta));
        std::mt19937_64 rng = rng_stream(config.seed, s, rep);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        std::uniform_real_distribution<double> coin(0.0, 1.0);

        std::vector<double> x(d);
        std::vector<double> dist(n);
        std::vector<Label> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            double sq = 0.0;
            for (double& v : x) {
                v = unif(rng);
                sq += v * v;
            }
            dist[i] = std::sqrt(sq);
            labels[i] = coin(rng) < eta(x) ? 1 : 0;
        }
        const NeighborProfile prof = profile_from_distances(std::move(dist), std::move(labels));
        const TheoryConfig tc{config.beta, d, r_tilde, omega, phi};
        const double est = theory_lrr(prof, tc);
        event[cell] = design_state(prof, tc).event_holds ? 1 : 0;
        sq_err[cell] = (eta_star - est) * (eta_star - est);
    });

    RateReport report;
    report.theoretical_slope = theoretical_rate_slope(config.beta, d);
    std::vector<double> log_n;
    std::vector<double> log_risk;
    for (std::size_t s = 0; s < sizes; ++s) {
        RatePoint p;
        p.n = config.sample_sizes[s];
        p.r_tilde = std::pow(static_cast<double>(p.n), -1.0 / (static_cast<double>(d) + 2.0 * config.beta));
        const auto first = sq_err.begin() + static_cast<std::ptrdiff_t>(s * config.reps);
        const auto last = first + static_cast<std::ptrdiff_t>(config.reps);
        const double reps = static_cast<double>(config.reps);
        p.risk_mean = std::accumulate(first, last, 0.0) / reps;
        double ss = 0.0;
        for (auto it = first; it != last; ++it) {
            ss += (*it - p.risk_mean) * (*it - p.risk_mean);
        }
        p.risk_se = std::sqrt(ss / (reps - 1.0)) / std::sqrt(reps);
        const auto ev = event.begin() + static_cast<std::ptrdiff_t>(s * config.reps);
        p.event_rate = static_cast<double>(std::count(ev, ev + static_cast<std::ptrdiff_t>(config.reps), 1)) / reps;
        if (p.event_rate == 0.0) {
            report.warnings.push_back("n = " + std::to_string(p.n) +
                                      ": event failed in every repetition; excluded from slope");
        } else if (p.risk_mean > 0.0) {
            log_n.push_back(std::log(static_cast<double>(p.n)));
            log_risk.push_back(std::log(p.risk_mean));
        }
        report.points.push_back(p);
    }

    if (log_n.size() >= 2) {
        const double mx = std::accumulate(log_n.begin(), log_n.end(), 0.0) / static_cast<double>(log_n.size());
        const double my =
            std::accumulate(log_risk.begin(), log_risk.end(), 0.0) / static_cast<double>(log_risk.size());
        double sxy = 0.0;
        double sxx = 0.0;
        for (std::size_t i = 0; i < log_n.size(); ++i) {
            sxy += (log_n[i] - mx) * (log_risk[i] - my);
            sxx += (log_n[i] - mx) * (log_n[i] - mx);
        }
        report.fitted_slope = sxy / sxx;
    } else {
        report.fitted_slope = std::nan("");
        report.warnings.emplace_back("fewer than two usable sample sizes; slope undefined");
    }
    return report;
}

void write_rate_csv(std::ostream& os, const RateReport& report) {
    os << "n,risk_mean,risk_se\n";
    for (const RatePoint& p : report.points) {
        os << p.n << ',' << format_double(p.risk_mean) << ',' << format_double(p.risk_se) << '\n';
    }
}

std::vector<ZetaRow> zeta_concentration(std::size_t d, double r_tilde,
                                        std::span<const std::size_t> n_values, std::size_t reps,
                                        std::uint64_t seed, int column_power) {
    if (d < 1 || !(r_tilde > 0.0) || reps < 2) {
        throw ParameterError("zeta_concentration needs d >= 1, r_tilde > 0 and reps >= 2");
    }
    if (column_power < 1) {
        throw ParameterError("zeta_concentration column power must be >= 1");
    }
    std::vector<double> ratios(n_values.size() * reps);
    parallel_for(ratios.size(), [&](std::size_t cell) {
        const std::size_t idx = cell / reps;
        const std::size_t rep = cell % reps;
        const std::size_t n = n_values[idx];
        std::mt19937_64 rng = rng_stream(seed, idx, rep);
        Eigen::MatrixXd column(static_cast<Eigen::Index>(n), 1);
        for (std::size_t i = 0; i < n; ++i) {
            const std::vector<double> x = sample_uniform_ball(d, r_tilde, rng);
            double sq = 0.0;
            for (double v : x) {
                sq += v * v;
            }
            column(static_cast<Eigen::Index>(i), 0) = std::pow(std::sqrt(sq), column_power);
        }
        ratios[cell] = projector_zeta(column) / static_cast<double>(n);
    });

    std::vector<ZetaRow> rows;
    for (std::size_t idx = 0; idx < n_values.size(); ++idx) {
        const auto first = ratios.begin() + static_cast<std::ptrdiff_t>(idx * reps);
        const auto last = first + static_cast<std::ptrdiff_t>(reps);
        ZetaRow row;
        row.n = n_values[idx];
        row.mean = std::accumulate(first, last, 0.0) / static_cast<double>(reps);
        double ss = 0.0;
        for (auto it = first; it != last; ++it) {
            ss += (*it - row.mean) * (*it - row.mean);
        }
        row.sd = std::sqrt(ss / static_cast<double>(reps - 1));
        rows.push_back(row);
    }
    return rows;
}

void write_zeta_csv(std::ostream& os, std::span<const ZetaRow> rows) {
    os << "N,zeta_over_N_mean,zeta_over_N_sd\n";
    for (const ZetaRow& r : rows) {
        os << r.n << ',' << format_double(r.mean) << ',' << format_double(r.sd) << '\n';
    }
}

} // namespace radial
