#pragma once

#include <stdexcept>
#include <string>

namespace fidsta {

// Error taxonomy mirrors the CLI exit codes:
//   parse_error -> 2, numeric_error / estimation_error -> 3, config_error -> 4.

struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

struct estimation_error : std::runtime_error {
    explicit estimation_error(const std::string& what) : std::runtime_error(what) {}
};

struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fidsta
