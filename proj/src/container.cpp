// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/container.hpp"

#include "formtherm/error.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

namespace formtherm {

namespace {

constexpr const char* kMagic = "FORMTHERM-CONTAINER 1";

static_assert(std::endian::native == std::endian::little,
              "container payload is written as native little-endian float64");

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

void check_token(const std::string& token, const char* what) {
  if (token.empty() || token.find_first_of(" \t\r\n") != std::string::npos) {
    throw ValidationError(std::string("container ") + what + " must be a single token: '" +
                          token + "'");
  }
}

}  // namespace

void ContainerHeader::set(const std::string& key, const std::string& value) {
  check_token(key, "attribute key");
  check_token(value, "attribute value");
  for (auto& [k, v] : attributes) {
    if (k == key) {
      v = value;
      return;
    }
  }
  attributes.emplace_back(key, value);
}

void ContainerHeader::set(const std::string& key, long value) { set(key, std::to_string(value)); }

void ContainerHeader::set(const std::string& key, double value) { set(key, format_double(value)); }

bool ContainerHeader::has(const std::string& key) const {
  for (const auto& [k, v] : attributes)
    if (k == key) return true;
  return false;
}

const std::string& ContainerHeader::get(const std::string& key) const {
  for (const auto& [k, v] : attributes)
    if (k == key) return v;
  throw FormatError("container header is missing attribute '" + key + "'");
}

long ContainerHeader::get_long(const std::string& key) const {
  const std::string& v = get(key);
  long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw FormatError("attribute '" + key + "' is not an integer: '" + v + "'");
  return out;
}

double ContainerHeader::get_double(const std::string& key) const {
  const std::string& v = get(key);
  double out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw FormatError("attribute '" + key + "' is not a number: '" + v + "'");
  return out;
}

long ContainerHeader::field_index(const std::string& name) const {
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (fields[i].name == name) return static_cast<long>(i);
  return -1;
}

long ContainerHeader::static_index(const std::string& name) const {
  for (std::size_t i = 0; i < statics.size(); ++i)
    if (statics[i].name == name) return static_cast<long>(i);
  return -1;
}

// ---------------------------------------------------------------------------

ContainerWriter::ContainerWriter(const std::string& path, ContainerHeader header)
    : path_(path), header_(std::move(header)) {
  check_token(header_.kind, "kind");
  if (header_.steps < 0) throw ValidationError("container step count must be non-negative");
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw ValidationError("cannot open '" + path + "' for writing");

  std::ostringstream h;
  h << kMagic << '\n';
  h << "kind " << header_.kind << '\n';
  for (const auto& [k, v] : header_.attributes) h << k << ' ' << v << '\n';
  for (const auto& s : header_.statics) {
    check_token(s.name, "array name");
    h << "static " << s.name << ' ' << s.rows << ' ' << s.cols << '\n';
  }
  h << "steps " << header_.steps << '\n';
  for (const auto& f : header_.fields) {
    check_token(f.name, "field name");
    h << "field " << f.name << ' ' << f.rows << ' ' << f.cols << '\n';
  }
  h << "end_header\n";
  const std::string text = h.str();
  out_.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void ContainerWriter::write_array(const ArraySpec& spec,
                                  const Eigen::Ref<const RowMajorMatrix>& values) {
  if (values.rows() != spec.rows || values.cols() != spec.cols) {
    throw ValidationError("array '" + spec.name + "' has shape " + std::to_string(values.rows()) +
                          "x" + std::to_string(values.cols()) + ", header declares " +
                          std::to_string(spec.rows) + "x" + std::to_string(spec.cols));
  }
  for (long i = 0; i < values.rows(); ++i) {
    out_.write(reinterpret_cast<const char*>(values.row(i).data()),
               static_cast<std::streamsize>(sizeof(double) * values.cols()));
  }
  if (!out_) throw ValidationError("write to '" + path_ + "' failed");
}

void ContainerWriter::write_static(const Eigen::Ref<const RowMajorMatrix>& values) {
  if (static_cursor_ >= header_.statics.size())
    throw ValidationError("more static arrays written than declared");
  write_array(header_.statics[static_cursor_++], values);
}

void ContainerWriter::write_field(const Eigen::Ref<const RowMajorMatrix>& values) {
  if (static_cursor_ != header_.statics.size())
    throw ValidationError("static arrays must be written before stepped fields");
  if (step_cursor_ >= header_.steps || header_.fields.empty())
    throw ValidationError("more stepped fields written than declared");
  write_array(header_.fields[field_cursor_], values);
  if (++field_cursor_ == header_.fields.size()) {
    field_cursor_ = 0;
    ++step_cursor_;
  }
}

void ContainerWriter::finish() {
  const bool complete = static_cursor_ == header_.statics.size() &&
                        (header_.fields.empty() || step_cursor_ == header_.steps) &&
                        field_cursor_ == 0;
  if (!complete) throw ValidationError("container '" + path_ + "' closed before all arrays were written");
  out_.flush();
  if (!out_) throw ValidationError("flush of '" + path_ + "' failed");
  out_.close();
}

// ---------------------------------------------------------------------------

ContainerReader::ContainerReader(const std::string& path) : path_(path) {
  in_.open(path, std::ios::binary);
  if (!in_) throw ValidationError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in_, line) || line != kMagic)
    throw FormatError("'" + path + "' is not a formtherm container (bad magic)");

  bool saw_kind = false;
  bool saw_steps = false;
  bool terminated = false;
  while (std::getline(in_, line)) {
    if (line == "end_header") {
      terminated = true;
      break;
    }
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "kind") {
      ls >> header_.kind;
      saw_kind = !header_.kind.empty();
    } else if (key == "static" || key == "field") {
      ArraySpec spec;
      ls >> spec.name >> spec.rows >> spec.cols;
      if (!ls || spec.rows < 0 || spec.cols < 0)
        throw FormatError("malformed " + key + " line in header: '" + line + "'");
      (key == "static" ? header_.statics : header_.fields).push_back(spec);
    } else if (key == "steps") {
      ls >> header_.steps;
      if (!ls || header_.steps < 0) throw FormatError("malformed steps line: '" + line + "'");
      saw_steps = true;
    } else {
      std::string value;
      ls >> value;
      std::string extra;
      if (key.empty() || value.empty() || (ls >> extra))
        throw FormatError("malformed header line: '" + line + "'");
      header_.attributes.emplace_back(key, value);
    }
  }
  if (!terminated) throw FormatError("header of '" + path + "' is not terminated");
  if (!saw_kind) throw FormatError("header of '" + path + "' has no kind");
  if (!saw_steps) throw FormatError("header of '" + path + "' has no step count");
}

RowMajorMatrix ContainerReader::read_array(const ArraySpec& spec, std::optional<long> step) {
  RowMajorMatrix values(spec.rows, spec.cols);
  const auto bytes = static_cast<std::streamsize>(sizeof(double) * spec.size());
  in_.read(reinterpret_cast<char*>(values.data()), bytes);
  if (in_.gcount() != bytes) {
    throw FormatError("file '" + path_ + "' is truncated while reading '" + spec.name + "'", step);
  }
  return values;
}

RowMajorMatrix ContainerReader::read_static() {
  if (static_cursor_ >= header_.statics.size()) throw FormatError("no more static arrays");
  return read_array(header_.statics[static_cursor_++], std::nullopt);
}

RowMajorMatrix ContainerReader::read_field() {
  if (static_cursor_ != header_.statics.size())
    throw FormatError("static arrays must be read before stepped fields");
  if (step_cursor_ >= header_.steps || header_.fields.empty())
    throw FormatError("no more stepped fields");
  RowMajorMatrix values = read_array(header_.fields[field_cursor_], step_cursor_);
  if (++field_cursor_ == header_.fields.size()) {
    field_cursor_ = 0;
    ++step_cursor_;
  }
  return values;
}

void ContainerReader::expect_end() {
  if (in_.peek() != std::char_traits<char>::eof())
    throw FormatError("file '" + path_ + "' has trailing bytes after the declared payload");
}

}  // namespace formtherm
