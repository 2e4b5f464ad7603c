// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Binary container used for every persisted artifact (parameter and state
// trajectories, POD bases, LTV schedules).
//
// Layout: an ASCII header terminated by the line "end_header", followed by
// little-endian float64 arrays in row-major order. Static arrays come first,
// then for each step every field in declaration order:
//
//   FORMTHERM-CONTAINER 1
//   kind parameter_trajectory
//   nodes 2861
//   static <name> <rows> <cols>
//   steps 511
//   field displacement 2861 3
//   field tool_distance 2861 1
//   end_header
//   <binary payload>

#include <Eigen/Core>

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace formtherm {

struct ArraySpec {
  std::string name;
  long rows = 0;
  long cols = 0;

  long size() const { return rows * cols; }
};

struct ContainerHeader {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<ArraySpec> statics;
  long steps = 0;
  std::vector<ArraySpec> fields;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, long value);
  void set(const std::string& key, double value);
  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  long get_long(const std::string& key) const;
  double get_double(const std::string& key) const;

  long field_index(const std::string& name) const;
  long static_index(const std::string& name) const;
};

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Sequential writer. Arrays must be written in exactly the order the header
/// declares them; finish() checks that nothing is missing.
class ContainerWriter {
public:
  ContainerWriter(const std::string& path, ContainerHeader header);

  void write_static(const Eigen::Ref<const RowMajorMatrix>& values);
  void write_field(const Eigen::Ref<const RowMajorMatrix>& values);
  void finish();

  const ContainerHeader& header() const { return header_; }

private:
  void write_array(const ArraySpec& spec, const Eigen::Ref<const RowMajorMatrix>& values);

  std::string path_;
  ContainerHeader header_;
  std::ofstream out_;
  std::size_t static_cursor_ = 0;
  long step_cursor_ = 0;
  std::size_t field_cursor_ = 0;
};

/// Sequential reader matching ContainerWriter. A short payload raises a
/// FormatError naming the step being read.
class ContainerReader {
public:
  explicit ContainerReader(const std::string& path);

  const ContainerHeader& header() const { return header_; }

  RowMajorMatrix read_static();
  RowMajorMatrix read_field();
  /// Step of the next field to be read.
  long step_cursor() const { return step_cursor_; }
  /// Fails unless the whole payload has been consumed.
  void expect_end();

private:
  RowMajorMatrix read_array(const ArraySpec& spec, std::optional<long> step);

  std::string path_;
  ContainerHeader header_;
  std::ifstream in_;
  std::size_t static_cursor_ = 0;
  long step_cursor_ = 0;
  std::size_t field_cursor_ = 0;
};

}  // namespace formtherm
