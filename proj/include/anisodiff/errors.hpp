#pragma once

#include <stdexcept>
#include <string>

namespace anisodiff {

/// Rejected configuration or precondition. Maps to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical or statistical failure during a run. Maps to exit code 3.
class NumericalError : public std::runtime_error {
public:
    enum class Kind { Instability, InsufficientDecay, WindowTooSmall, SweepFailed, Degenerate };

    NumericalError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Filesystem failure. Maps to exit code 4.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace anisodiff
