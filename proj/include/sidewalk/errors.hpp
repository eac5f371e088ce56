#pragma once

#include <stdexcept>
#include <string>

namespace sidewalk {

/// Malformed input document (edge list, weight file, generator spec).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally invalid data (self-loop, duplicate edge, bad weight, ...).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// An exact computation was requested on an instance too large for it.
struct UnsupportedSizeError : std::runtime_error {
  explicit UnsupportedSizeError(const std::string& what) : std::runtime_error(what) {}
};

/// A configured resource budget (chain pool size, rejection attempts) ran out.
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sidewalk
