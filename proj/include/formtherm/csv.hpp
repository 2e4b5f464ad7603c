// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace formtherm {

/// Shortest round-trip decimal representation of a double.
std::string format_number(double value);

/// CSV writer with '#'-prefixed comment lines (units, provenance) before the
/// header row. Numbers use the shortest round-trip representation so that
/// identical inputs always produce byte-identical files.
class CsvWriter {
public:
  CsvWriter(const std::string& path, std::initializer_list<std::string> comments,
            const std::vector<std::string>& columns);

  void row(std::span<const double> values);
  void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }
  /// Row whose leading cells are text (identifiers, flags).
  void row(const std::vector<std::string>& text, std::span<const double> values);
  void close();

private:
  std::string path_;
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace formtherm
