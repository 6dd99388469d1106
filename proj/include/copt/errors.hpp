#pragma once

#include <stdexcept>
#include <string>

namespace copt {

// Bad config file, malformed CSV, missing columns. CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Market data present but incomplete (missing premium/price for a required date).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Copula fit failed (insufficient data, non-finite likelihood). CLI exit code 3.
struct FitError : std::runtime_error {
    explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

// Constraint set of the quadratic program is empty. CLI exit code 4.
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dependency matrix has a zero payout probability and no fallback was enabled.
// CLI exit code 5.
struct DegenerateMatrixError : std::runtime_error {
    explicit DegenerateMatrixError(const std::string& msg) : std::runtime_error(msg) {}
};

// Conditioning option pays out with probability zero; caller decides the fallback.
struct ZeroPayoutError : std::domain_error {
    explicit ZeroPayoutError(const std::string& msg) : std::domain_error(msg) {}
};

}  // namespace copt
