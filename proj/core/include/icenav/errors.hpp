#pragma once

#include <stdexcept>
#include <string>

namespace icenav {

/// Bad domain input: invalid polygon, mismatched dimensions, bad config.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Scenario or control-set generation cannot satisfy the requested parameters.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Search exhausted the frontier without reaching the goal line.
class NoPathError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exhaustive enumeration exceeded its node budget.
class InstanceTooLargeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace icenav
