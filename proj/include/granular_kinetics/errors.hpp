// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
//! \file errors.hpp
#pragma once

#include <stdexcept>
#include <string>

namespace gk {

//! A caller broke a documented precondition (non-unit sigma, theta <= 0, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

//! A deterministic numerical procedure did not meet its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual estimate " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

//! Rejection sampling exceeded its iteration cap.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Invalid or overflowing solver configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Solver state contains non-finite values.
class CorruptedStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Config-file parse failure; carries the offending key and line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string key, int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": key '" + key + "': " + message),
        key_(std::move(key)),
        line_(line) {}
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

namespace detail {
inline void expect(bool condition, const char* message) {
  if (!condition) throw ContractViolation(message);
}
}  // namespace detail

}  // namespace gk
