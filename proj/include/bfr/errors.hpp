#pragma once

#include <stdexcept>
#include <string>

namespace bfr {

/// Bad shapes fed to an operation (inner-dimension mismatch, broadcast failure, ...).
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Structurally invalid configuration (groups not dividing channels, even kernel size, ...).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// API misuse (backward on a non-scalar, timestep out of range, ...).
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Filesystem / codec failures.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed serialized data (truncated checkpoint, bad header, ...).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bfr
