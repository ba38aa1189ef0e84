// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/data/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

#include "rationale/common/error.hpp"

namespace rationale::data {

std::string_view split_name(Split split) { return split == Split::kTrain ? "train" : "test"; }

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  throw ValidationError("split must be \"train\" or \"test\", got \"" + std::string(name) + "\"");
}

nlohmann::json to_json_line(const Sample& s) {
  nlohmann::json j{{"text", s.text}, {"label", s.label}, {"split", split_name(s.split)}};
  for (const auto& [k, v] : s.metadata) j[k] = v;
  if (s.rationale) j["rationale"] = *s.rationale;
  return j;
}

void to_json(nlohmann::json& j, const DatasetDescriptor& d) {
  j = nlohmann::json{{"dataset_id", d.dataset_id},
                     {"name", d.name},
                     {"class_names", d.class_names},
                     {"splits", {{"train", d.train_size}, {"test", d.test_size}}},
                     {"metadata_fields", d.metadata_fields},
                     {"storage_path", d.storage_path.string()}};
}

void from_json(const nlohmann::json& j, DatasetDescriptor& d) {
  d.dataset_id = j.at("dataset_id").get<std::string>();
  d.name = j.value("name", d.dataset_id);
  d.class_names = j.at("class_names").get<std::vector<std::string>>();
  d.train_size = j.at("splits").at("train").get<std::size_t>();
  d.test_size = j.at("splits").at("test").get<std::size_t>();
  d.metadata_fields = j.value("metadata_fields", std::vector<std::string>{});
  d.storage_path = j.value("storage_path", std::string{});
}

Dataset load_dataset(const std::filesystem::path& path, std::string dataset_id, std::string name,
                     std::vector<std::string> class_names) {
  if (class_names.empty()) throw ValidationError("class_names must not be empty");
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open dataset file", path.string());

  const std::set<std::string> classes(class_names.begin(), class_names.end());
  Dataset ds;
  std::set<std::string> metadata_fields;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& field, const std::string& what) {
    throw ValidationError("line " + std::to_string(line_no) + ": field '" + field + "' " + what,
                          "line=" + std::to_string(line_no) + ";field=" + field);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      fail("<line>", "is not valid JSON");
    }
    if (!j.is_object()) fail("<line>", "is not a JSON object");
    for (const char* required : {"text", "label", "split"}) {
      if (!j.contains(required)) fail(required, "is missing");
      if (!j.at(required).is_string()) fail(required, "must be a string");
    }
    Sample s;
    s.text = j["text"].get<std::string>();
    if (s.text.empty()) fail("text", "must not be empty");
    s.label = j["label"].get<std::string>();
    if (!classes.contains(s.label)) fail("label", "value '" + s.label + "' is not one of the class names");
    const auto split = j["split"].get<std::string>();
    if (split != "train" && split != "test") fail("split", "must be \"train\" or \"test\"");
    s.split = parse_split(split);
    for (const auto& [key, value] : j.items()) {
      if (key == "text" || key == "label" || key == "split") continue;
      if (key == "target_group") {
        if (!value.is_string()) fail(key, "must be a string");
        s.metadata[key] = value.get<std::string>();
        metadata_fields.insert(key);
      } else if (key == "rationale") {
        if (!value.is_array() || !std::all_of(value.begin(), value.end(), [](const auto& v) { return v.is_number_integer(); })) {
          fail(key, "must be a list of token indices");
        }
        s.rationale = value.get<std::vector<int>>();
      } else {
        fail(key, "is not part of the dataset format");
      }
    }
    (s.split == Split::kTrain ? ds.train : ds.test).push_back(std::move(s));
  }

  std::unordered_set<std::string> train_texts;
  for (const auto& s : ds.train) train_texts.insert(s.text);
  for (const auto& s : ds.test) {
    if (train_texts.contains(s.text)) {
      throw ValidationError("train/test overlap: text appears in both splits", s.text);
    }
  }

  ds.descriptor.dataset_id = std::move(dataset_id);
  ds.descriptor.name = name.empty() ? ds.descriptor.dataset_id : std::move(name);
  ds.descriptor.class_names = std::move(class_names);
  ds.descriptor.train_size = ds.train.size();
  ds.descriptor.test_size = ds.test.size();
  ds.descriptor.metadata_fields.assign(metadata_fields.begin(), metadata_fields.end());
  ds.descriptor.storage_path = path;
  return ds;
}

void write_dataset(const std::filesystem::path& path, const std::vector<Sample>& samples) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  for (const auto& s : samples) out << to_json_line(s).dump() << '\n';
  if (!out) throw StateError("cannot write dataset", path.string());
}

}  // namespace rationale::data
