#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace flicker {

// Bad inputs: malformed descriptors, dimension mismatches, out-of-range
// parameters. CLI maps this to exit code 2.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical backend ran out of budget before reaching the requested
// tolerance and the caller asked for strict behavior. CLI exit code 3.
struct convergence_error : std::runtime_error {
    explicit convergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

using Warnings = std::vector<std::string>;

}  // namespace flicker
