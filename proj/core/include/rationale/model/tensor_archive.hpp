// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace rationale::model {

using Matrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct NamedTensor {
  std::string name;
  const Matrix* value;
};

/// Binary layout (little-endian):
///   "RTNL" u32:version u32:count
///   count × { u32:name_len name u32:rows u32:cols f32[rows*cols] }
std::string serialize_tensors(const std::vector<NamedTensor>& tensors);
std::map<std::string, Matrix> deserialize_tensors(const std::string& bytes);

void write_tensor_archive(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors);
std::map<std::string, Matrix> read_tensor_archive(const std::filesystem::path& path);

}  // namespace rationale::model
