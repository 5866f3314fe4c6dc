#pragma once

#include <stdexcept>
#include <string>

namespace maxstab {

// Error taxonomy matching the CLI exit codes: config errors exit 2,
// data errors exit 3, numerical failures exit 4.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a two-sided derivative step would leave the parameter box.
struct BoundaryError : NumericError {
    explicit BoundaryError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace maxstab
