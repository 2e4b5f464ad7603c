// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/csv.hpp"

#include "formtherm/error.hpp"

#include <charconv>
#include <cmath>

namespace formtherm {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

CsvWriter::CsvWriter(const std::string& path, std::initializer_list<std::string> comments,
                     const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::trunc), columns_(columns.size()) {
  if (!out_) throw ValidationError("cannot open '" + path + "' for writing");
  for (const auto& c : comments) out_ << "# " << c << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) { row({}, values); }

void CsvWriter::row(const std::vector<std::string>& text, std::span<const double> values) {
  if (text.size() + values.size() != columns_)
    throw ValidationError("CSV row for '" + path_ + "' has wrong column count");
  bool first = true;
  for (const auto& t : text) {
    out_ << (first ? "" : ",") << t;
    first = false;
  }
  for (double v : values) {
    out_ << (first ? "" : ",") << format_number(v);
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw ValidationError("write to '" + path_ + "' failed");
  out_.close();
}

}  // namespace formtherm
