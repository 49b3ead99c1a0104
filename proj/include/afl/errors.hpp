#pragma once

#include <stdexcept>
#include <string>

namespace afl {

// Invalid configuration or usage (bad field values, unknown keys, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Mismatched tensor/data dimensions.
class ShapeError : public std::runtime_error {
public:
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// File read/write problems.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite weights encountered during training.
class NanFault : public std::runtime_error {
public:
    NanFault(const std::string& what, long step) : std::runtime_error(what), step_index(step) {}
    long step_index;
};

}  // namespace afl
