#pragma once

#include <stdexcept>
#include <string>

namespace deadalpha {

/// Process exit codes used by the CLI. Library errors map onto these.
enum class ExitCode : int {
    ok = 0,
    config_error = 2,
    validation_error = 3,
    numerical_error = 4,
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

/// Bad or inconsistent configuration (thresholds, windows, unknown keys).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what)
        : Error(ExitCode::config_error, what) {}
};

/// Bad input data: parse failures, normalization violations, duplicate
/// keys, index/universe mismatches, empty alpha sets.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what)
        : Error(ExitCode::validation_error, what) {}
};

/// Numerical failures: eigensolver non-convergence, ill-conditioned or
/// non-factorizable covariance matrices.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what)
        : Error(ExitCode::numerical_error, what) {}
};

}  // namespace deadalpha
