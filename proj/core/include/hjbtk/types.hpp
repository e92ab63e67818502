#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hjbtk {

using Vec = std::vector<double>;
using ConstSpan = std::span<const double>;
using Span = std::span<double>;

inline double dot(ConstSpan a, ConstSpan b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(ConstSpan a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(ConstSpan a) {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
}

inline bool all_finite(ConstSpan a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

// Error hierarchy shared by all modules.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// An evaluator produced a non-finite or otherwise unusable value.
struct EvaluationError : Error {
    using Error::Error;
};

// Data violates a structural assumption of the model (e.g. l < 0).
struct ModelViolation : Error {
    using Error::Error;
};

// Numeric recession extrapolation failed to converge.
struct RecessionUndefined : Error {
    using Error::Error;
};

// Inconsistent configuration (grid mismatch, empty mesh, ...).
struct ConfigError : Error {
    using Error::Error;
};

struct LookupError : Error {
    using Error::Error;
};

struct OutOfDomain : Error {
    using Error::Error;
};

struct PreconditionError : Error {
    using Error::Error;
};

// Time change t(s) is not invertible on the supplied horizon.
struct NonInvertibleTime : Error {
    using Error::Error;
};

// Problem-spec file did not match the published schema.
struct SpecError : Error {
    using Error::Error;
};

}  // namespace hjbtk
