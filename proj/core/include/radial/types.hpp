#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace radial {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand lengths or matrix shapes disagree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input lies outside the domain of the operation (empty series, zero rescale base, NaN, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A hyperparameter is out of range (k > n, h <= 0, unidentifiable fit, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// No training point falls inside the requested window.
class EmptyWindowError : public Error {
public:
    using Error::Error;
};

/// A pipeline configuration cannot be satisfied by the data (e.g. too little history).
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// Malformed text input; the message carries the offending line number.
class ParseError : public Error {
public:
    using Error::Error;
};

using Label = std::uint8_t;

/// An ordered, nonempty list of finite reals. Lengths may differ between
/// covariates when a warping metric is in use.
class Covariate {
public:
    Covariate(std::vector<double> values);
    Covariate(std::initializer_list<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    friend bool operator==(const Covariate&, const Covariate&) = default;

private:
    std::vector<double> values_;
};

struct LabeledPoint {
    LabeledPoint(Covariate x, int y);

    Covariate x;
    Label y;
};

/// Immutable, nonempty collection of labeled points.
class Dataset {
public:
    explicit Dataset(std::vector<LabeledPoint> points);

    std::size_t size() const noexcept { return points_.size(); }
    const LabeledPoint& operator[](std::size_t i) const noexcept { return points_[i]; }
    std::span<const LabeledPoint> points() const noexcept { return points_; }

    /// Common covariate length, or nullopt when lengths vary.
    std::optional<std::size_t> fixed_dimension() const noexcept { return fixed_dim_; }

    /// Throws DimensionError unless every covariate has the same length.
    std::size_t require_fixed_dimension() const;

private:
    std::vector<LabeledPoint> points_;
    std::optional<std::size_t> fixed_dim_;
};

/// Largest natural number strictly below beta (so strict_floor(3) == 2).
/// Returns 0 when no such natural number exists (beta <= 1).
int strict_floor(double beta);

double sigmoid(double z) noexcept;
double logit(double p) noexcept;

} // namespace radial
