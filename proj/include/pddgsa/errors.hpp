#pragma once

#include <stdexcept>
#include <string>

namespace pddgsa {

// Bad user-supplied configuration or arguments (CLI exit code 1).
struct config_error : std::invalid_argument {
  explicit config_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical failure: non-finite values, singular blocks (CLI exit code 2).
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// File and format problems (CLI exit code 3).
struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pddgsa
