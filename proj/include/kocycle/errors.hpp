#pragma once

#include <stdexcept>

namespace kocycle {

/// Malformed input document: bad JSON shape, duplicate ids, dangling references.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated operation precondition (dimension mismatch, incompatible layers, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace kocycle
