#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wavenode {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad configuration, malformed file, or incompatible shapes between
/// configured components. Maps to CLI exit code 2.
struct ConfigError : Error {
    using Error::Error;
};
struct ShapeError : ConfigError {
    using ConfigError::ConfigError;
};
struct FormatError : ConfigError {
    using ConfigError::ConfigError;
};
struct DomainError : ConfigError {
    using ConfigError::ConfigError;
};

/// Numeric failure at run time (divergence, exhausted budgets, non-finite
/// losses). Maps to CLI exit code 3.
struct NumericError : Error {
    using Error::Error;
};

struct SolverDiverged : NumericError {
    SolverDiverged(const std::string & msg, std::int64_t step)
        : NumericError(msg), step_index(step) {}
    std::int64_t step_index;
};

struct SolverBudgetExhausted : NumericError {
    SolverBudgetExhausted(const std::string & msg, std::int64_t nfe_so_far)
        : NumericError(msg), nfe(nfe_so_far) {}
    std::int64_t nfe;
};

/// Misuse of the autodiff graph (backward on non-scalars, detached inputs).
struct GraphError : Error {
    using Error::Error;
};

}  // namespace wavenode
