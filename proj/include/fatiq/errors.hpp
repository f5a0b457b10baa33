#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace fatiq {

/// Input outside the mathematical domain of an operation, or a non-finite result.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A severity sequence ended before the failure criterion was reached.
class SequenceExhausted : public std::runtime_error {
public:
    /// `residual` is the final Miner damage (specimen_model) or the remaining
    /// health (health_sim), depending on the thrower.
    SequenceExhausted(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Survival curve does not cross the requested level inside its cycle grid.
class GridTooShort : public std::runtime_error {
public:
    GridTooShort(const std::string& what, double last_value)
        : std::runtime_error(what), last_value_(last_value) {}

    double last_value() const noexcept { return last_value_; }

private:
    double last_value_;
};

namespace detail {

inline void require(bool ok, const char* msg) {
    if (!ok) throw DomainError(msg);
}

inline double finite_or_throw(double v, const char* msg) {
    if (!(v == v) || v == std::numeric_limits<double>::infinity() ||
        v == -std::numeric_limits<double>::infinity())
        throw DomainError(msg);
    return v;
}

}  // namespace detail
}  // namespace fatiq
