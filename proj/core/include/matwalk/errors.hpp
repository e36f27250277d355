#pragma once

#include <stdexcept>
#include <string>

namespace matwalk {

// malformed user input: bad JSON, schema violations, out-of-range parameters
struct input_error : std::runtime_error {
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// a structural precondition failed at runtime (state left the support, empty candidate set, ...)
struct state_error : std::runtime_error {
    explicit state_error(const std::string& what) : std::runtime_error(what) {}
};

// an explicit budget or cap was exceeded (enumeration budget, dense-matrix cap, ...)
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// a numerical consistency check failed (symmetrization residual, broken balance, ...)
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace matwalk
