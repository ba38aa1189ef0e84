// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <filesystem>
#include <memory>

#include <unistd.h>

#include "rationale/data/synthetic_corpus.hpp"
#include "rationale/explain/explain.hpp"
#include "rationale/feedback/training_set.hpp"
#include "rationale/model/model_handle.hpp"
#include "rationale/selector/selector.hpp"
#include "rationale/trainer/finetune.hpp"

namespace fs = std::filesystem;
using namespace rationale;

namespace {

/// Untrained case-study-sized encoder over a synthetic corpus.
struct Bench {
  fs::path dir;
  data::Dataset dataset;
  std::shared_ptr<model::ModelHandle> handle;

  Bench() {
    dir = fs::temp_directory_path() / ("rationale-bench-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    data::SyntheticCorpusConfig corpus;
    corpus.num_samples = 1200;
    std::vector<std::string> texts;
    for (auto& s : data::generate_hate_speech_corpus(corpus)) {
      texts.push_back(s.text);
      (s.split == data::Split::kTrain ? dataset.train : dataset.test).push_back(std::move(s));
    }
    dataset.descriptor.dataset_id = "bench";
    dataset.descriptor.class_names = data::hate_speech_labels();
    auto tokenizer = model::Tokenizer::build(texts);
    model::EncoderConfig config;
    config.vocab_size = static_cast<int>(tokenizer.vocab_size());
    config.label_names = data::hate_speech_labels();
    config.class_prior = {0.5, 0.5};
    handle = std::make_shared<model::ModelHandle>("bench", dir, model::BaseWeights::initialize(config, 0),
                                                  std::move(tokenizer));
    handle->attach_adapters();
  }
  ~Bench() { fs::remove_all(dir); }

  static Bench& get() {
    static Bench bench;
    return bench;
  }
};

void BM_Predict(benchmark::State& state) {
  auto& b = Bench::get();
  const auto& text = b.dataset.test.front().text;
  for (auto _ : state) benchmark::DoNotOptimize(b.handle->predict(text));
}
BENCHMARK(BM_Predict);

void BM_ExplainLocal(benchmark::State& state) {
  auto& b = Bench::get();
  explain::ExplanationConfig config;
  config.num_perturbations = static_cast<int>(state.range(0));
  const auto& text = b.dataset.test.front().text;
  for (auto _ : state) benchmark::DoNotOptimize(explain::explain_local(*b.handle, text, config));
}
BENCHMARK(BM_ExplainLocal)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SampleMisclassified(benchmark::State& state) {
  auto& b = Bench::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        selector::sample_misclassified(b.dataset, *b.handle, selector::MisclassifiedMode::kMostConfident, 12, 0));
  }
}
BENCHMARK(BM_SampleMisclassified)->Unit(benchmark::kMillisecond);

void BM_BuildTrainingSet(benchmark::State& state) {
  auto& b = Bench::get();
  std::vector<feedback::FeedbackRecord> records(1);
  for (int i = 0; i < 40; ++i) {
    records[0].annotated_ngrams.push_back({"phrase " + std::to_string(i), i % 2 ? "toxic" : "non-toxic"});
  }
  for (auto _ : state) benchmark::DoNotOptimize(feedback::build_training_set(records, 3, 500, b.dataset, 0));
}
BENCHMARK(BM_BuildTrainingSet)->Unit(benchmark::kMicrosecond);

void BM_AdapterEpoch(benchmark::State& state) {
  auto& b = Bench::get();
  std::vector<feedback::FeedbackRecord> records(1);
  records[0].annotated_ngrams = {{"you people", "toxic"}, {"lovely day", "non-toxic"}};
  const auto set = feedback::build_training_set(records, 3, static_cast<std::size_t>(state.range(0)), b.dataset, 0);
  trainer::TrainingConfig config;
  config.epochs = 1;
  const std::span<const data::Sample> eval(b.dataset.test.data(), 50);
  for (auto _ : state) benchmark::DoNotOptimize(trainer::finetune_adapters(*b.handle, set, config, eval));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(set.size()));
}
BENCHMARK(BM_AdapterEpoch)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
