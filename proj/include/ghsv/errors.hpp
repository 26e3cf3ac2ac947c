#pragma once
#include <stdexcept>
#include <string>

namespace ghsv {

// Bad parameter values, unsupported regimes, size-guard violations.
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Operation not available for this object (e.g. jump simulation from a
// density-specified family).
struct UnsupportedError : std::logic_error {
    explicit UnsupportedError(const std::string& msg) : std::logic_error(msg) {}
};

// Adaptive quadrature hit its panel cap before the doubling test passed.
// Carries the last estimate and the observed doubling gap so callers can
// decide whether to limp on or abort.
struct QuadratureError : std::runtime_error {
    double last_estimate;
    double error_bound;
    QuadratureError(const std::string& msg, double est, double bound)
        : std::runtime_error(msg), last_estimate(est), error_bound(bound) {}
};

}  // namespace ghsv
