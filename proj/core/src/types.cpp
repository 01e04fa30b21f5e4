#include "radial/types.hpp"

#include <algorithm>
#include <cmath>

namespace radial {

namespace {

std::vector<double> validated(std::vector<double> values) {
    if (values.empty()) {
        throw DomainError("covariate must have at least one entry");
    }
    if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) {
        throw DomainError("covariate entries must be finite");
    }
    return values;
}

} // namespace

Covariate::Covariate(std::vector<double> values) : values_(validated(std::move(values))) {}

Covariate::Covariate(std::initializer_list<double> values)
    : values_(validated(std::vector<double>(values))) {}

LabeledPoint::LabeledPoint(Covariate x_, int y_) : x(std::move(x_)), y(0) {
    if (y_ != 0 && y_ != 1) {
        throw DomainError("label must be 0 or 1, got " + std::to_string(y_));
    }
    y = static_cast<Label>(y_);
}

Dataset::Dataset(std::vector<LabeledPoint> points) : points_(std::move(points)) {
    if (points_.empty()) {
        throw DomainError("dataset must be nonempty");
    }
    const std::size_t d = points_.front().x.size();
    const bool fixed = std::all_of(points_.begin(), points_.end(),
                                   [d](const LabeledPoint& p) { return p.x.size() == d; });
    if (fixed) {
        fixed_dim_ = d;
    }
}

std::size_t Dataset::require_fixed_dimension() const {
    if (!fixed_dim_) {
        throw DimensionError("dataset covariates have differing lengths");
    }
    return *fixed_dim_;
}

int strict_floor(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("strict_floor requires a finite positive argument");
    }
    return static_cast<int>(std::ceil(beta)) - 1;
}

double sigmoid(double z) noexcept {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double logit(double p) noexcept { return std::log(p / (1.0 - p)); }

} // namespace radial
