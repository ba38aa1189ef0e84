// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/trainer/case_study.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rationale/admin/store.hpp"
#include "rationale/common/error.hpp"
#include "rationale/feedback/training_set.hpp"
#include "rationale/model/model_handle.hpp"
#include "rationale/trainer/plot.hpp"

namespace rationale::trainer {
namespace fs = std::filesystem;
namespace {

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

std::string condition_slug(const ConditionResult& c) {
  return std::string(selector::mode_name(c.selection)) + (c.balanced ? "-balanced" : "-non-balanced");
}

std::string fixed(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string subgroup_cell(const EvaluationReport& r, const std::string& group) {
  auto it = r.subgroup_precision.find(group);
  if (it == r.subgroup_precision.end() || !it->second) return "undef";
  return fixed(*it->second);
}

}  // namespace

void from_json(const nlohmann::json& j, AnnotationScript& s) {
  s.annotators.clear();
  for (const auto& a : j.at("annotators")) {
    AnnotatorScript script;
    script.annotator_id = a.at("id").get<std::string>();
    script.contests_predicted_evidence = a.value("contests_predicted_evidence", false);
    for (const auto& [label, words] : a.at("lexicon").items()) {
      for (const auto& w : words) script.lexicon[label].insert(normalize_token(w.get<std::string>()));
    }
    s.annotators.push_back(std::move(script));
  }
  s.explicit_entries.clear();
  for (const auto& e : j.value("explicit", nlohmann::json::array())) {
    ExplicitAnnotation entry;
    entry.annotator_id = e.at("annotator").get<std::string>();
    entry.text = e.at("text").get<std::string>();
    if (e.contains("corrected_label")) entry.correction.corrected_label = e.at("corrected_label").get<std::string>();
    entry.correction.edited_highlights =
        e.value("edited_highlights", std::vector<feedback::EditedHighlight>{});
    s.explicit_entries.push_back(std::move(entry));
  }
}

AnnotationScript AnnotationScript::load(const fs::path& path) {
  try {
    return read_json_file(path).get<AnnotationScript>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string normalize_token(std::string_view token) {
  std::size_t b = 0, e = token.size();
  while (b < e && std::ispunct(static_cast<unsigned char>(token[b])) && token[b] != '<') ++b;
  while (e > b && std::ispunct(static_cast<unsigned char>(token[e - 1])) && token[e - 1] != '>') --e;
  std::string out(token.substr(b, e - b));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

feedback::Correction scripted_correction(const AnnotatorScript& annotator, const explain::LocalExplanation& explanation,
                                         const std::string& gold_label) {
  feedback::Correction c;
  c.corrected_label = gold_label;
  static const std::set<std::string> kNoWords;
  auto found = annotator.lexicon.find(gold_label);
  const auto& words = found == annotator.lexicon.end() ? kNoWords : found->second;
  const auto& predicted = explanation.prediction.predicted_label;
  const bool wrong = predicted != gold_label;
  std::size_t predicted_index = 0;
  while (predicted_index < explanation.class_names.size() && explanation.class_names[predicted_index] != predicted) {
    ++predicted_index;
  }
  const auto& highlighted = predicted_index < explanation.highlighted.size()
                                ? explanation.highlighted[predicted_index]
                                : std::vector<std::size_t>{};
  for (std::size_t i = 0; i < explanation.input_tokens.size(); ++i) {
    const bool listed = words.count(normalize_token(explanation.input_tokens[i])) > 0;
    const bool was_highlighted = std::find(highlighted.begin(), highlighted.end(), i) != highlighted.end();
    if (wrong && was_highlighted && (listed || annotator.contests_predicted_evidence)) {
      c.edited_highlights.push_back({i, i + 1, predicted, feedback::HighlightAction::kRemoved});
    } else if (listed) {
      c.edited_highlights.push_back({i, i + 1, gold_label, feedback::HighlightAction::kAdded});
    }
  }
  return c;
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  ExperimentConfig d;
  if (j.contains("dataset")) {
    const auto& ds = j.at("dataset");
    if (ds.contains("path")) c.dataset_path = ds.at("path").get<std::string>();
    if (ds.contains("synthetic")) {
      const auto& s = ds.at("synthetic");
      c.synthetic.seed = s.value("seed", d.synthetic.seed);
      c.synthetic.num_samples = s.value("num_samples", d.synthetic.num_samples);
      c.synthetic.test_fraction = s.value("test_fraction", d.synthetic.test_fraction);
      c.synthetic.label_noise = s.value("label_noise", d.synthetic.label_noise);
    }
    c.class_names = ds.value("class_names", d.class_names);
  }
  if (j.contains("baseline")) {
    const auto& b = j.at("baseline");
    if (b.contains("checkpoint")) c.baseline_checkpoint = b.at("checkpoint").get<std::string>();
    if (b.contains("pretrain")) c.pretrain = b.at("pretrain").get<PretrainConfig>();
  }
  c.annotations_path = j.at("annotations").get<std::string>();
  const auto sel = j.value("selection", nlohmann::json::object());
  c.samples_per_condition = sel.value("samples_per_condition", d.samples_per_condition);
  c.selection_seed = sel.value("seed", d.selection_seed);
  const auto ts = j.value("training_set", nlohmann::json::object());
  c.repeat_factor = ts.value("repeat_factor", d.repeat_factor);
  c.balance_total = ts.value("balance_total", d.balance_total);
  c.training_set_seed = ts.value("seed", d.training_set_seed);
  if (j.contains("training")) c.training = j.at("training").get<TrainingConfig>();
  const auto ad = j.value("adapter", nlohmann::json::object());
  c.bottleneck_dim = ad.value("bottleneck_dim", d.bottleneck_dim);
  c.adapter_seed = ad.value("seed", d.adapter_seed);
  if (j.contains("explanation")) c.explanation = j.at("explanation").get<explain::ExplanationConfig>();
  const auto ev = j.value("evaluation", nlohmann::json::object());
  c.positive_label = ev.value("positive_label", d.positive_label);
  c.subgroup_field = ev.value("subgroup_field", d.subgroup_field);
  c.target_group = ev.value("target_group", d.target_group);
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{
      {"dataset",
       {{"path", c.dataset_path ? nlohmann::json(c.dataset_path->string()) : nlohmann::json()},
        {"synthetic",
         {{"seed", c.synthetic.seed},
          {"num_samples", c.synthetic.num_samples},
          {"test_fraction", c.synthetic.test_fraction},
          {"label_noise", c.synthetic.label_noise}}},
        {"class_names", c.class_names}}},
      {"baseline",
       {{"checkpoint", c.baseline_checkpoint ? nlohmann::json(c.baseline_checkpoint->string()) : nlohmann::json()},
        {"pretrain", c.pretrain}}},
      {"annotations", c.annotations_path.string()},
      {"selection", {{"samples_per_condition", c.samples_per_condition}, {"seed", c.selection_seed}}},
      {"training_set",
       {{"repeat_factor", c.repeat_factor}, {"balance_total", c.balance_total}, {"seed", c.training_set_seed}}},
      {"training", c.training},
      {"adapter", {{"bottleneck_dim", c.bottleneck_dim}, {"seed", c.adapter_seed}}},
      {"explanation", c.explanation},
      {"evaluation",
       {{"positive_label", c.positive_label},
        {"subgroup_field", c.subgroup_field},
        {"target_group", c.target_group}}}};
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  ExperimentConfig c;
  try {
    c = read_json_file(path).get<ExperimentConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  c.base_dir = fs::absolute(path).parent_path();
  return c;
}

void to_json(nlohmann::json& j, const ConditionResult& r) {
  j = nlohmann::json{{"selection", selector::mode_name(r.selection)},
                     {"balanced", r.balanced},
                     {"selected_samples", r.selected_samples},
                     {"feedback_records", r.feedback_records},
                     {"distinct_ngrams", r.distinct_ngrams},
                     {"feedback_samples", r.feedback_samples},
                     {"original_samples", r.original_samples},
                     {"adapter_version_tag", r.adapter_version_tag},
                     {"evaluation", r.report},
                     {"curve", r.curve}};
}

const ConditionResult& ExperimentReport::condition(selector::MisclassifiedMode selection, bool balanced) const {
  for (const auto& c : conditions) {
    if (c.selection == selection && c.balanced == balanced) return c;
  }
  throw NotFoundError("condition not part of the report");
}

void to_json(nlohmann::json& j, const ExperimentReport& r) {
  j = nlohmann::json{{"model_id", r.model_id},
                     {"dataset_id", r.dataset_id},
                     {"target_group", r.target_group},
                     {"baseline", r.baseline},
                     {"misclassified_candidates", r.misclassified_candidates},
                     {"short_of_request", r.short_of_request},
                     {"batches", r.batches},
                     {"feedback", r.feedback},
                     {"conditions", r.conditions},
                     {"runtime_seconds", r.runtime_seconds},
                     {"config", r.config}};
}

ExperimentReport run_case_study(const ExperimentConfig& config, const fs::path& work_dir, const ProgressLog& log) {
  const auto started = std::chrono::steady_clock::now();
  auto say = [&](const std::string& msg) {
    if (log) log(msg);
  };
  config.training.validate();
  config.explanation.validate();
  fs::create_directories(work_dir);

  // Dataset, always loaded through the strict file reader.
  fs::path dataset_file;
  if (config.dataset_path) {
    dataset_file = resolve(config.base_dir, *config.dataset_path);
  } else {
    dataset_file = work_dir / "dataset.jsonl";
    data::write_dataset(dataset_file, data::generate_hate_speech_corpus(config.synthetic));
  }
  const data::Dataset dataset = data::load_dataset(dataset_file, dataset_file.stem().string(),
                                                   dataset_file.stem().string(), config.class_names);
  say("dataset: " + std::to_string(dataset.train.size()) + " train / " + std::to_string(dataset.test.size()) +
      " test");

  // Baseline.
  fs::path checkpoint;
  if (config.baseline_checkpoint) {
    checkpoint = resolve(config.base_dir, *config.baseline_checkpoint);
  } else {
    checkpoint = work_dir / "baseline";
    fs::remove_all(checkpoint);
    auto trained = pretrain_base(dataset, config.pretrain, [&](int epoch, double loss) {
      say("baseline epoch " + std::to_string(epoch) + " loss " + fixed(loss));
    });
    model::save_checkpoint(checkpoint, trained.weights, trained.tokenizer);
  }
  auto handle = model::ModelHandle::load("baseline", checkpoint, config.class_names);
  if (handle->has_adapters()) handle->set_adapters_enabled(false);

  ExperimentReport report;
  report.model_id = handle->model_id();
  report.dataset_id = dataset.id();
  report.target_group = config.target_group;
  report.config = config;
  EvaluateOptions eval_options;
  eval_options.positive_label = config.positive_label;
  if (!config.subgroup_field.empty()) eval_options.subgroup_field = config.subgroup_field;
  report.baseline = evaluate(*handle, dataset.test, eval_options);
  say("baseline f1 " + fixed(report.baseline.f1));

  // Selection and scripted feedback against the baseline.
  const auto script = AnnotationScript::load(resolve(config.base_dir, config.annotations_path));
  if (script.annotators.empty()) throw ValidationError("annotation file lists no annotators");
  admin::Database db(":memory:");
  feedback::FeedbackStore store(db);
  selector::PredictionCache cache;
  std::map<selector::MisclassifiedMode, std::vector<std::int64_t>> records_by_mode;
  const std::array modes{selector::MisclassifiedMode::kMostConfident, selector::MisclassifiedMode::kLeastConfident};
  for (auto mode : modes) {
    auto batch = selector::sample_misclassified(dataset, *handle, mode, config.samples_per_condition,
                                                config.selection_seed, &cache);
    report.misclassified_candidates = batch.candidate_count;
    report.short_of_request = report.short_of_request || batch.short_of_request;
    for (const auto& sample : batch.samples) {
      const auto explanation = explain::explain_local(*handle, sample.text, config.explanation);
      for (const auto& annotator : script.annotators) {
        feedback::Correction correction = scripted_correction(annotator, explanation, sample.gold_label);
        for (const auto& e : script.explicit_entries) {
          if (e.annotator_id == annotator.annotator_id && e.text == sample.text) correction = e.correction;
        }
        admin::Principal who{annotator.annotator_id, admin::Role::kAnnotator, false};
        auto record = store.submit(who, *handle, sample.ref(), correction);
        records_by_mode[mode].push_back(record.record_id);
        report.feedback.push_back(std::move(record));
      }
    }
    say(std::string(selector::mode_name(mode)) + ": " + std::to_string(batch.samples.size()) + " samples of " +
        std::to_string(batch.candidate_count) + " candidates");
    report.batches.push_back(std::move(batch));
  }

  // Adapter training per condition, each from a fresh adapter stack.
  for (std::size_t m = 0; m < modes.size(); ++m) {
    for (bool balanced : {false, true}) {
      const auto& ids = records_by_mode[modes[m]];
      auto set = feedback::build_training_set(store, ids, config.repeat_factor, balanced ? config.balance_total : 0,
                                              dataset, config.training_set_seed);
      handle->attach_adapters(config.bottleneck_dim, config.adapter_seed);
      ConditionResult result;
      result.selection = modes[m];
      result.balanced = balanced;
      result.selected_samples = report.batches[m].samples.size();
      result.feedback_records = ids.size();
      result.distinct_ngrams = set.distinct_ngrams;
      result.feedback_samples = set.feedback_samples.size();
      result.original_samples = set.original_samples.size();
      auto trained = finetune_adapters(*handle, set, config.training, dataset.test, eval_options);
      result.adapter_version_tag = trained.adapter_version_tag;
      result.curve = std::move(trained.curve);
      result.report = evaluate(*handle, dataset.test, eval_options);
      say(condition_slug(result) + ": " + std::to_string(set.size()) + " samples, f1 " + fixed(result.report.f1));
      report.conditions.push_back(std::move(result));
    }
  }
  handle->set_adapters_enabled(false);
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

std::string render_table(const ExperimentReport& report) {
  const std::string group_header = report.target_group.empty() ? "Pr[group]" : "Pr[" + report.target_group + "]";
  std::ostringstream out;
  auto row = [&](const std::string& name, const EvaluationReport& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-28s | %5s | %5s | %5s | %s\n", name.c_str(), fixed(r.precision).c_str(),
                  fixed(r.recall).c_str(), fixed(r.f1).c_str(), subgroup_cell(r, report.target_group).c_str());
    out << buf;
  };
  char header[160];
  std::snprintf(header, sizeof header, "%-28s | %5s | %5s | %5s | %s\n", "Model", "Pr", "Re", "F1",
                group_header.c_str());
  const std::string rule(28 + 3 + 5 + 3 + 5 + 3 + 5 + 3 + group_header.size(), '-');
  out << header << rule << '\n';
  row("Baseline", report.baseline);
  for (auto mode : {selector::MisclassifiedMode::kMostConfident, selector::MisclassifiedMode::kLeastConfident}) {
    out << rule << '\n'
        << (mode == selector::MisclassifiedMode::kMostConfident ? "Most confident misclassified"
                                                                : "Least confident misclassified")
        << '\n'
        << rule << '\n';
    for (bool balanced : {false, true}) {
      const auto& c = report.condition(mode, balanced);
      row(balanced ? "Feedback (balanced)" : "Feedback (non-balanced)", c.report);
    }
  }
  return out.str();
}

void write_report(const ExperimentReport& report, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "report.json");
    out << nlohmann::json(report).dump(2) << '\n';
  }
  {
    std::ofstream out(out_dir / "table.txt");
    out << render_table(report);
  }
  for (const auto& c : report.conditions) {
    PlotSeries original{"original eval F1", {}};
    PlotSeries fb{"feedback samples F1", {}};
    for (const auto& p : c.curve.per_epoch) {
      original.values.push_back(p.f1_on_original_eval);
      fb.values.push_back(p.f1_on_feedback_samples);
    }
    std::ofstream out(out_dir / ("curve-" + condition_slug(c) + ".svg"));
    out << render_curve_svg(condition_slug(c), {original, fb});
  }
}

}  // namespace rationale::trainer
