#pragma once

#include <stdexcept>
#include <string>

namespace isindy {

// Error taxonomy mirrors the CLI exit-code contract:
// usage_error -> 1, data_error -> 2, numeric_error -> 3.

struct usage_error : std::runtime_error {
    explicit usage_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct data_error : std::runtime_error {
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace isindy
