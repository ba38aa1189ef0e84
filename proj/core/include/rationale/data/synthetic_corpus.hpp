// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rationale/data/dataset.hpp"

namespace rationale::data {

/// Parameters of the synthetic binary hate-speech corpus. Community names are
/// fictional; abusive vocabulary is limited to generic insults and `slurN`
/// placeholders.
struct SyntheticCorpusConfig {
  std::uint64_t seed = 7;
  std::size_t num_samples = 4000;
  double test_fraction = 0.25;
  /// Probability that a label is flipped after generation.
  double label_noise = 0.06;
};

/// Samples labelled "toxic"/"non-toxic", with `target_group` set for the
/// communities "keshite", "zorian" and "tellan". Mentions of a community
/// co-occur with toxic labels more often than neutral text, so a model trained
/// on the corpus picks up a spurious group-term bias.
std::vector<Sample> generate_hate_speech_corpus(const SyntheticCorpusConfig& config);

inline const std::vector<std::string>& hate_speech_labels() {
  static const std::vector<std::string> labels{"non-toxic", "toxic"};
  return labels;
}

}  // namespace rationale::data
