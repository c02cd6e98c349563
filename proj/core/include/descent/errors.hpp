#pragma once

#include <stdexcept>
#include <string>

namespace descent {

// Raised for malformed configs, unknown ids, and contract violations in
// user-supplied inputs. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a loss, gradient, or weight value is NaN/Inf. A step that
// observes this is rejected and the run reports divergence (exit code 1).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace descent
