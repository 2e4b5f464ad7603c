// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace formtherm {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: bad configuration, inconsistent shapes, malformed files.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Numerical breakdown: singular systems, inverted elements, non-finite results.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// A persisted file could not be decoded. Carries the offending step and node
/// when the failure can be localised.
class FormatError : public ValidationError {
public:
  FormatError(const std::string& what, std::optional<long> step = std::nullopt,
              std::optional<long> node = std::nullopt)
      : ValidationError(decorate(what, step, node)), step_(step), node_(node) {}

  std::optional<long> step() const { return step_; }
  std::optional<long> node() const { return node_; }

private:
  static std::string decorate(const std::string& what, std::optional<long> step,
                              std::optional<long> node) {
    std::string msg = what;
    if (step) msg += " (step " + std::to_string(*step) + ")";
    if (node) msg += " (node " + std::to_string(*node) + ")";
    return msg;
  }

  std::optional<long> step_;
  std::optional<long> node_;
};

/// An element became degenerate or inverted under the prescribed deformation.
class DegenerateElementError : public NumericalError {
public:
  DegenerateElementError(long element, double signed_area)
      : NumericalError("element " + std::to_string(element) +
                       " has non-positive deformed area " + std::to_string(signed_area)),
        element_(element) {}

  long element() const { return element_; }

private:
  long element_;
};

}  // namespace formtherm
