#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ferglab {

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kStochasticTol = 1e-12;
inline constexpr double kPruneThreshold = 1e-15;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidModel : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Observation had (numerically) zero predictive probability.
struct ZeroLikelihood : std::runtime_error {
    int step = -1;
    explicit ZeroLikelihood(const std::string& what, int step_ = -1)
        : std::runtime_error(what), step(step_) {}
};

/// Exact branch enumeration would exceed the configured atom budget.
struct AtomCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A stated hypothesis (e.g. a positive observation floor) does not hold.
struct PreconditionUnmet : std::runtime_error {
    double offending_value = 0.0;
    explicit PreconditionUnmet(const std::string& what, double v = 0.0)
        : std::runtime_error(what), offending_value(v) {}
};

}  // namespace ferglab
