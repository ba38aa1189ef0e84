// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/feedback/feedback.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

#include "rationale/common/error.hpp"
#include "rationale/common/text.hpp"

namespace rationale::feedback {
namespace {

std::string_view action_name(HighlightAction a) { return a == HighlightAction::kAdded ? "added" : "removed"; }

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json();
}

template <typename T>
std::optional<T> optional_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

/// Stored body: everything except the columns the store owns.
nlohmann::json record_body(const FeedbackRecord& r) {
  nlohmann::json j = r;
  j.erase("record_id");
  j.erase("user_id");
  return j;
}

}  // namespace

SampleRef SampleRef::from_dataset(const data::Dataset& dataset, data::Split split, std::size_t index) {
  const auto& samples = dataset.split(split);
  if (index >= samples.size()) {
    throw NotFoundError("sample index " + std::to_string(index) + " out of range for split '" +
                            std::string(data::split_name(split)) + "'",
                        "sample_index=" + std::to_string(index));
  }
  return SampleRef{samples[index].text, dataset.id(), split, index, samples[index].label};
}

bool FeedbackRecord::operator==(const FeedbackRecord& o) const {
  return nlohmann::json(*this) == nlohmann::json(o);
}

void to_json(nlohmann::json& j, const EditedHighlight& h) {
  j = nlohmann::json{{"token_span", {h.begin, h.end}}, {"class", h.class_name}, {"action", action_name(h.action)}};
}

void from_json(const nlohmann::json& j, EditedHighlight& h) {
  const auto& span = j.at("token_span");
  if (!span.is_array() || span.size() != 2) {
    throw ValidationError("token_span must be [begin, end]", "field=token_span");
  }
  h.begin = span[0].get<std::size_t>();
  h.end = span[1].get<std::size_t>();
  h.class_name = j.at("class").get<std::string>();
  const auto action = j.at("action").get<std::string>();
  if (action == "added") {
    h.action = HighlightAction::kAdded;
  } else if (action == "removed") {
    h.action = HighlightAction::kRemoved;
  } else {
    throw ValidationError("action must be 'added' or 'removed'", "field=action");
  }
}

void to_json(nlohmann::json& j, const AnnotatedNgram& n) { j = nlohmann::json{{"text", n.text}, {"label", n.label}}; }

void from_json(const nlohmann::json& j, AnnotatedNgram& n) {
  n.text = j.at("text").get<std::string>();
  n.label = j.at("label").get<std::string>();
}

void to_json(nlohmann::json& j, const FeedbackRecord& r) {
  j = nlohmann::json{{"record_id", r.record_id},
                     {"user_id", optional_json(r.user_id)},
                     {"sample_text", r.sample_text},
                     {"dataset_id", optional_json(r.dataset_id)},
                     {"sample_split", r.sample_split ? nlohmann::json(data::split_name(*r.sample_split))
                                                     : nlohmann::json()},
                     {"sample_index", optional_json(r.sample_index)},
                     {"gold_label", optional_json(r.gold_label)},
                     {"model_id", r.model_id},
                     {"adapter_version_tag", r.adapter_version_tag},
                     {"original_prediction", r.original_prediction},
                     {"corrected_label", optional_json(r.corrected_label)},
                     {"edited_highlights", r.edited_highlights},
                     {"annotated_ngrams", r.annotated_ngrams},
                     {"timestamp", r.timestamp}};
}

void from_json(const nlohmann::json& j, FeedbackRecord& r) {
  r.record_id = j.value("record_id", std::int64_t{0});
  r.user_id = optional_field<std::string>(j, "user_id");
  r.sample_text = j.at("sample_text").get<std::string>();
  r.dataset_id = optional_field<std::string>(j, "dataset_id");
  auto split = optional_field<std::string>(j, "sample_split");
  r.sample_split = split ? std::optional(data::parse_split(*split)) : std::nullopt;
  r.sample_index = optional_field<std::size_t>(j, "sample_index");
  r.gold_label = optional_field<std::string>(j, "gold_label");
  r.model_id = j.at("model_id").get<std::string>();
  r.adapter_version_tag = j.value("adapter_version_tag", std::uint64_t{0});
  r.original_prediction = j.at("original_prediction").get<model::Prediction>();
  r.corrected_label = optional_field<std::string>(j, "corrected_label");
  r.edited_highlights = j.value("edited_highlights", std::vector<EditedHighlight>{});
  r.annotated_ngrams = j.value("annotated_ngrams", std::vector<AnnotatedNgram>{});
  r.timestamp = j.value("timestamp", std::int64_t{0});
}

void from_json(const nlohmann::json& j, FeedbackFilter& f) {
  f.user_id = optional_field<std::string>(j, "user_id");
  f.model_id = optional_field<std::string>(j, "model_id");
  f.dataset_id = optional_field<std::string>(j, "dataset_id");
  f.from_millis = optional_field<std::int64_t>(j, "from");
  f.to_millis = optional_field<std::int64_t>(j, "to");
}

std::vector<AnnotatedNgram> extract_ngrams(std::span<const std::string> tokens,
                                           std::span<const EditedHighlight> edits, const std::string& label) {
  std::vector<bool> edited(tokens.size(), false);
  for (const auto& e : edits) {
    for (std::size_t i = e.begin; i < e.end && i < tokens.size(); ++i) edited[i] = true;
  }
  std::vector<AnnotatedNgram> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!edited[i]) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < tokens.size() && edited[i]) ++i;
    out.push_back({text::join(tokens.subspan(start, i - start)), label});
  }
  return out;
}

FeedbackRecord compose_feedback(const SampleRef& sample, const Correction& correction,
                                const model::Prediction& prediction, std::span<const std::string> label_names) {
  if (!correction.corrected_label && correction.edited_highlights.empty()) {
    throw ValidationError("feedback needs a corrected label or at least one edited highlight", "field=correction");
  }
  const std::set<std::string> labels(label_names.begin(), label_names.end());
  if (correction.corrected_label && !labels.count(*correction.corrected_label)) {
    throw ValidationError("unknown label '" + *correction.corrected_label + "'", "field=corrected_label");
  }
  const auto tokens = text::split_words(sample.text);
  for (std::size_t k = 0; k < correction.edited_highlights.size(); ++k) {
    const auto& e = correction.edited_highlights[k];
    const std::string where = "field=edited_highlights[" + std::to_string(k) + "]";
    if (e.begin >= e.end || e.end > tokens.size()) {
      throw ValidationError("token span [" + std::to_string(e.begin) + ", " + std::to_string(e.end) +
                                ") outside the " + std::to_string(tokens.size()) + " sample tokens",
                            where + ".token_span");
    }
    if (!labels.count(e.class_name)) {
      throw ValidationError("unknown class '" + e.class_name + "'", where + ".class");
    }
  }

  FeedbackRecord r;
  r.sample_text = sample.text;
  r.dataset_id = sample.dataset_id;
  r.sample_split = sample.split;
  r.sample_index = sample.sample_index;
  r.gold_label = sample.gold_label;
  r.model_id = prediction.model_id;
  r.adapter_version_tag = prediction.adapter_version_tag;
  r.original_prediction = prediction;
  r.corrected_label = correction.corrected_label;
  r.edited_highlights = correction.edited_highlights;
  r.timestamp = text::now_millis();
  if (!r.edited_highlights.empty()) {
    const auto& label = correction.corrected_label ? correction.corrected_label : sample.gold_label;
    if (!label) {
      throw ValidationError("free-text feedback with edited highlights needs a corrected label",
                            "field=corrected_label");
    }
    r.annotated_ngrams = extract_ngrams(tokens, r.edited_highlights, *label);
  }
  return r;
}

FeedbackStore::FeedbackStore(admin::Database& db) : db_(db) {}

FeedbackRecord FeedbackStore::submit(const admin::Principal& user, const model::TextClassifier& model,
                                     const SampleRef& sample, const Correction& correction) {
  admin::require(user, admin::Action::kSubmitFeedback);
  const auto prediction = model.predict(sample.text);
  FeedbackRecord r = compose_feedback(sample, correction, prediction, model.label_names());
  r.user_id = user.user_id;
  db_.transaction([&] {
    admin::Statement(db_,
                     "INSERT INTO feedback_records (user_id, model_id, dataset_id, created_at, body) "
                     "VALUES (?, ?, ?, ?, ?)")
        .bind(1, r.user_id)
        .bind(2, r.model_id)
        .bind(3, r.dataset_id)
        .bind(4, r.timestamp)
        .bind(5, record_body(r).dump())
        .run();
    r.record_id = db_.last_insert_rowid();
  });
  return r;
}

std::vector<FeedbackRecord> FeedbackStore::list(const admin::Principal& caller, const FeedbackFilter& filter) const {
  admin::require(caller, admin::Action::kSubmitFeedback);
  FeedbackFilter effective = filter;
  if (caller.role != admin::Role::kDeveloper) {
    if (filter.user_id && filter.user_id != caller.user_id) {
      throw PermissionError("annotators may only list their own feedback", "field=user_id");
    }
    effective.user_id = caller.user_id;
  }
  return query(effective);
}

std::vector<FeedbackRecord> FeedbackStore::query(const FeedbackFilter& f) const {
  std::string sql = "SELECT record_id, user_id, body FROM feedback_records WHERE 1 = 1";
  if (f.user_id) sql += " AND user_id = ?1";
  if (f.model_id) sql += " AND model_id = ?2";
  if (f.dataset_id) sql += " AND dataset_id = ?3";
  if (f.from_millis) sql += " AND created_at >= ?4";
  if (f.to_millis) sql += " AND created_at < ?5";
  sql += " ORDER BY created_at, record_id";
  std::lock_guard lock(db_.mutex());
  admin::Statement st(db_, sql);
  if (f.user_id) st.bind(1, *f.user_id);
  if (f.model_id) st.bind(2, *f.model_id);
  if (f.dataset_id) st.bind(3, *f.dataset_id);
  if (f.from_millis) st.bind(4, *f.from_millis);
  if (f.to_millis) st.bind(5, *f.to_millis);
  std::vector<FeedbackRecord> out;
  while (st.step()) {
    FeedbackRecord r = nlohmann::json::parse(st.text(2)).get<FeedbackRecord>();
    r.record_id = st.int64(0);
    r.user_id = st.optional_text(1);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<FeedbackRecord> FeedbackStore::get(std::span<const std::int64_t> record_ids) const {
  std::lock_guard lock(db_.mutex());
  std::vector<FeedbackRecord> out;
  out.reserve(record_ids.size());
  for (auto id : record_ids) {
    admin::Statement st(db_, "SELECT user_id, body FROM feedback_records WHERE record_id = ?");
    st.bind(1, id);
    if (!st.step()) {
      throw NotFoundError("unknown feedback record " + std::to_string(id), "record_id=" + std::to_string(id));
    }
    FeedbackRecord r = nlohmann::json::parse(st.text(1)).get<FeedbackRecord>();
    r.record_id = id;
    r.user_id = st.optional_text(0);
    out.push_back(std::move(r));
  }
  return out;
}

std::size_t FeedbackStore::count() const {
  std::lock_guard lock(db_.mutex());
  admin::Statement st(db_, "SELECT COUNT(*) FROM feedback_records");
  st.step();
  return static_cast<std::size_t>(st.int64(0));
}

void write_feedback_jsonl(std::ostream& out, std::span<const FeedbackRecord> records) {
  for (const auto& r : records) out << nlohmann::json(r).dump() << '\n';
}

std::vector<FeedbackRecord> read_feedback_jsonl(std::istream& in) {
  std::vector<FeedbackRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<FeedbackRecord>());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what(), "line=" + std::to_string(line_no));
    }
  }
  return out;
}

}  // namespace rationale::feedback
