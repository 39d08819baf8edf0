// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
//! \file format.hpp
//! Locale-independent number formatting.
#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

#include "errors.hpp"

namespace gk {

//! Shortest decimal that parses back to the same double.
inline std::string format_shortest(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  if (res.ec != std::errc()) throw ContractViolation("format_shortest: conversion failed");
  return std::string(buf, res.ptr);
}

//! Scientific notation with 17 significant digits.
inline std::string format_sig17(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, 16);
  if (res.ec != std::errc()) throw ContractViolation("format_sig17: conversion failed");
  return std::string(buf, res.ptr);
}

//! Strict parse of a whole string as a double; false on any trailing text.
inline bool parse_double(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && first != last;
}

}  // namespace gk
