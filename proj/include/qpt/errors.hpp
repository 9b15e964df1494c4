// errors.hpp: exception types shared by the library and the CLI

#pragma once

#include <stdexcept>
#include <string>

namespace qpt {

/// Invalid parameter, configuration or degenerate input. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// The request exceeds what a brute-force path can hold. CLI exit code 3.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// Degenerate input (all-zero state, all-zero spectrum).
class DegenerateInputError : public ConfigError {
public:
    explicit DegenerateInputError(const std::string& what) : ConfigError(what) {}
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int capacity = 3;
inline constexpr int oracle_deviation = 4;
} // namespace exit_code

} // namespace qpt
