// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rationale::data {

enum class Split { kTrain, kTest };

std::string_view split_name(Split split);
Split parse_split(std::string_view name);

struct Sample {
  std::string text;
  std::string label;
  Split split = Split::kTrain;
  /// Optional per-sample tags; currently only `target_group`.
  std::map<std::string, std::string> metadata;
  /// Annotated rationale token indices; stored, never used for training.
  std::optional<std::vector<int>> rationale;
};

nlohmann::json to_json_line(const Sample& s);

/// A bare (text, label) pair, the unit of adapter training.
struct LabeledText {
  std::string text;
  std::string label;

  bool operator==(const LabeledText&) const = default;
};

struct DatasetDescriptor {
  std::string dataset_id;
  std::string name;
  std::vector<std::string> class_names;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::vector<std::string> metadata_fields;
  std::filesystem::path storage_path;
};

void to_json(nlohmann::json& j, const DatasetDescriptor& d);
void from_json(const nlohmann::json& j, DatasetDescriptor& d);

struct Dataset {
  DatasetDescriptor descriptor;
  std::vector<Sample> train;
  std::vector<Sample> test;

  const std::vector<Sample>& split(Split s) const { return s == Split::kTrain ? train : test; }
  const std::string& id() const { return descriptor.dataset_id; }
};

/// Parses the UTF-8 JSON-lines dataset format. Every line is an object with
/// `text` (string), `label` (one of class_names), `split` ("train"|"test"),
/// and optionally `target_group` (string) and `rationale` (int list). Any
/// other field, a wrong type, or an exact text shared between the splits is
/// rejected with a ValidationError naming the line.
Dataset load_dataset(const std::filesystem::path& path, std::string dataset_id, std::string name,
                     std::vector<std::string> class_names);

void write_dataset(const std::filesystem::path& path, const std::vector<Sample>& samples);

}  // namespace rationale::data
