// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

// rationale: serve the platform API or run the offline experiment.

#include <csignal>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "rationale/api/platform.hpp"
#include "rationale/api/server.hpp"
#include "rationale/data/dataset.hpp"
#include "rationale/data/synthetic_corpus.hpp"
#include "rationale/model/model_handle.hpp"
#include "rationale/trainer/case_study.hpp"
#include "rationale/trainer/pretrain.hpp"

namespace fs = std::filesystem;
using namespace rationale;

namespace {

int serve(const fs::path& config_path) {
  auto config = api::ServiceConfig::load(config_path);
  config.apply_environment();

  // Block termination signals in every thread; the main thread waits for them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  api::Platform platform(config);
  api::Server server(platform);
  const int port = server.start(config.host, config.port);
  spdlog::info("serving {}:{} (route description at {})", config.host, port, api::kRouteDescriptionPath);
  int received = 0;
  sigwait(&signals, &received);
  spdlog::info("signal {} received, shutting down", received);
  server.stop();
  return 0;
}

int run_experiment(const fs::path& config_path, const fs::path& out_dir) {
  const auto config = trainer::ExperimentConfig::load(config_path);
  fs::create_directories(out_dir);
  const auto report = trainer::run_case_study(config, out_dir, [](const std::string& line) { spdlog::info("{}", line); });
  trainer::write_report(report, out_dir);
  std::cout << trainer::render_table(report);
  std::cout << "runtime_seconds: " << report.runtime_seconds << "\n";
  std::cout << "report: " << (out_dir / "report.json").string() << "\n";
  return 0;
}

int make_corpus(const data::SyntheticCorpusConfig& config, const fs::path& out) {
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  const auto samples = data::generate_hate_speech_corpus(config);
  data::write_dataset(out, samples);
  std::cout << "wrote " << samples.size() << " samples to " << out.string() << "\n";
  return 0;
}

int train_base(const fs::path& dataset_path, std::vector<std::string> class_names, trainer::PretrainConfig config,
               const fs::path& out) {
  if (class_names.empty()) class_names = data::hate_speech_labels();
  const auto dataset = data::load_dataset(dataset_path, dataset_path.stem().string(), dataset_path.stem().string(),
                                          class_names);
  auto result = trainer::pretrain_base(dataset, config, [](int epoch, double loss) {
    spdlog::info("epoch {} loss {:.4f}", epoch, loss);
  });
  model::save_checkpoint(out, result.weights, result.tokenizer);
  std::cout << "checkpoint written to " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rationale: explanation-guided feedback and adapter fine-tuning for text classifiers"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  std::string config_path;
  std::string out_dir;

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--config", config_path, "Service configuration (JSON)")->required()->check(CLI::ExistingFile);

  auto* exp_cmd = app.add_subcommand("run-experiment", "Run the feedback case-study experiment");
  exp_cmd->add_option("--config", config_path, "Experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
  exp_cmd->add_option("--out", out_dir, "Output directory")->required();

  data::SyntheticCorpusConfig corpus;
  auto* corpus_cmd = app.add_subcommand("make-corpus", "Write the synthetic labelled corpus as JSON lines");
  corpus_cmd->add_option("--out", out_dir, "Output file")->required();
  corpus_cmd->add_option("--seed", corpus.seed, "Generator seed")->capture_default_str();
  corpus_cmd->add_option("--samples", corpus.num_samples, "Number of samples")->capture_default_str();
  corpus_cmd->add_option("--test-fraction", corpus.test_fraction, "Fraction assigned to the test split")
      ->capture_default_str();
  corpus_cmd->add_option("--noise", corpus.label_noise, "Label noise rate")->capture_default_str();

  trainer::PretrainConfig pretrain;
  std::string dataset_path;
  std::vector<std::string> class_names;
  auto* base_cmd = app.add_subcommand("train-base", "Train a base classifier checkpoint on a dataset");
  base_cmd->add_option("--dataset", dataset_path, "Dataset (JSON lines)")->required()->check(CLI::ExistingFile);
  base_cmd->add_option("--out", out_dir, "Checkpoint directory")->required();
  base_cmd->add_option("--classes", class_names, "Class names (default: non-toxic toxic)");
  base_cmd->add_option("--epochs", pretrain.training.epochs)->capture_default_str();
  base_cmd->add_option("--seed", pretrain.init_seed)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*serve_cmd) return serve(config_path);
    if (*exp_cmd) return run_experiment(config_path, out_dir);
    if (*corpus_cmd) return make_corpus(corpus, out_dir);
    if (*base_cmd) return train_base(dataset_path, class_names, pretrain, out_dir);
  } catch (const Error& e) {
    std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what();
    if (!e.detail().empty()) std::cerr << " (" << e.detail() << ")";
    std::cerr << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
