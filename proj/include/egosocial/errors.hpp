// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace egosocial {

/// Malformed input text. `line()` is 1-based, or 0 when the error is not tied to a line.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that breaks a domain invariant (unknown wearer, missing coverage, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pearson correlation requested for a constant (zero-variance) vector.
class UndefinedCorrelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Zero vector handed to a metric that needs a direction.
class DegenerateVector : public std::domain_error {
 public:
  DegenerateVector(const std::string& what, std::size_t index)
      : std::domain_error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace egosocial
