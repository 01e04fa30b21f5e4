#pragma once

#include "radial/localfit.hpp"
#include "radial/metric.hpp"
#include "radial/profile.hpp"
#include "radial/types.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace radial {

/// A label-probability estimate at one query. Polynomial variants are not
/// clipped, so the value may leave [0, 1].
struct Estimate {
    double value = 0.0;
    std::size_t used_points = 0;
    bool converged = true;
    bool fallback_applied = false;
};

/// Mean label over the boxcar window r_i <= h.
Estimate kernel_smoother(const NeighborProfile& profile, double h);

/// Mean of the k nearest labels.
Estimate knn(const NeighborProfile& profile, std::size_t k);

/// Local polynomial regression of degree q on the offsets X_(i) - query inside
/// the window r_i <= h; the estimate is the fitted value at offset zero.
/// The degree is lowered while the window holds fewer points than basis terms.
Estimate lpor(const NeighborProfile& profile, const Dataset& data, const Covariate& query, double h,
              int degree);

/// Logistic variant of lpor; the estimate is sigmoid of the fitted intercept.
Estimate lpolr(const NeighborProfile& profile, const Dataset& data, const Covariate& query, double h,
               int degree, const LogisticOptions& options = {});

enum class Regression { poly, logi };
enum class Loss { squared, logistic, logit_squared };

/// Multiscale k-NN: fits a radial polynomial to the pairs (r_{k_j}, knn(k_j))
/// and extrapolates it to radius zero. Supported combinations are
/// (poly, squared), (logi, logistic) and (logi, logit_squared).
Estimate msknn(const NeighborProfile& profile, std::span<const std::size_t> k_vec, int degree,
               Regression regression, Loss loss, const LogisticOptions& options = {});

struct WeightFunction {
    enum class Kind { constant_one, inverse_r, boxcar, theory };
    Kind kind = Kind::constant_one;
    /// Cutoff for boxcar and theory weights.
    double radius = 0.0;

    static WeightFunction constant_one() { return {Kind::constant_one, 0.0}; }
    static WeightFunction inverse_r() { return {Kind::inverse_r, 0.0}; }
    static WeightFunction boxcar(double h) { return {Kind::boxcar, h}; }
    /// 1/N inside r <= r_tilde, zero outside, where N counts the points inside.
    static WeightFunction theory(double r_tilde) { return {Kind::theory, r_tilde}; }
};

struct Scope {
    enum class Kind { all, radius, top_k };
    Kind kind = Kind::all;
    double h = 0.0;
    std::size_t k = 0;

    static Scope all() { return {}; }
    static Scope radius(double h) { return {Kind::radius, h, 0}; }
    static Scope top_k(std::size_t k) { return {Kind::top_k, 0.0, k}; }
};

enum class RadialBasis { poly, even_poly };

struct LrrOptions {
    WeightFunction weight = WeightFunction::constant_one();
    /// Polynomial degree for the poly basis, order omega for the even basis.
    int degree = 2;
    Loss loss = Loss::logistic;
    Scope scope = Scope::all();
    RadialBasis basis = RadialBasis::poly;
    LogisticOptions logistic{};
};

/// Local radial regression: regresses the raw labels on the radial distance
/// with weights w(r_i) and returns the fit at r = 0. With Loss::logistic this
/// is the local radial logistic regression and the estimate is sigmoid(theta_0).
Estimate lrr(const NeighborProfile& profile, const LrrOptions& options);

/// Weight actually assigned to each profile entry in scope (zeros outside).
std::vector<double> lrr_weights(const NeighborProfile& profile, const LrrOptions& options);

/// Plug-in classifier: 1 when the estimate is at least 1/2.
int classify(double value) noexcept;
inline int classify(const Estimate& e) noexcept { return classify(e.value); }

struct KernelSmootherSpec {
    double h;
};
struct KnnSpec {
    std::size_t k;
};
struct LporSpec {
    double h;
    int degree;
};
struct LpolrSpec {
    double h;
    int degree;
    LogisticOptions logistic{};
};
struct MsknnSpec {
    std::vector<std::size_t> k_vec;
    int degree;
    Regression regression;
    Loss loss;
    LogisticOptions logistic{};
};
using LrrSpec = LrrOptions;

using EstimatorSpec =
    std::variant<KernelSmootherSpec, KnnSpec, LporSpec, LpolrSpec, MsknnSpec, LrrSpec>;

/// Dispatches on the spec; lpor/lpolr read the raw covariates from `data`.
Estimate estimate(const EstimatorSpec& spec, const NeighborProfile& profile, const Dataset& data,
                  const Covariate& query);

Estimate estimate(const EstimatorSpec& spec, const Dataset& data, const Metric& metric,
                  const Covariate& query);

std::string describe(const EstimatorSpec& spec);

} // namespace radial
