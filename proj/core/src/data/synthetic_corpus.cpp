// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/data/synthetic_corpus.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <unordered_set>

#include "rationale/common/error.hpp"
#include "rationale/common/text.hpp"

namespace rationale::data {
namespace {

const std::vector<std::string> kFiller{
    "i",        "you",     "we",       "they",     "the",      "a",       "this",     "that",
    "is",       "are",     "was",      "were",     "will",     "would",   "can",      "do",
    "not",      "just",    "really",   "about",    "with",     "from",    "for",      "of",
    "in",       "on",      "at",       "and",      "but",      "so",      "if",       "when",
    "people",   "today",   "yesterday", "city",    "town",     "street",  "news",     "story",
    "think",    "know",    "said",     "saw",      "heard",    "read",    "talk",     "talked",
    "time",     "year",    "week",     "day",      "night",    "morning", "work",     "school",
    "game",     "team",    "music",    "movie",    "book",     "phone",   "car",      "bus",
    "weather",  "rain",    "sun",      "coffee",   "dinner",   "friend",  "friends",  "family",
    "house",    "store",   "market",   "price",    "money",    "job",     "boss",     "meeting",
    "online",   "twitter", "video",    "post",     "thread",   "comment", "question", "answer",
    "good",     "bad",     "big",      "small",    "new",      "old",     "long",     "funny",
    "again",    "always",  "never",    "maybe",    "probably", "still",   "here",     "there",
    "lol",      "honestly", "anyway",  "guess",    "wonder",   "remember", "forgot",  "later"};

const std::vector<std::string> kBenign{
    "history",   "culture",  "holiday",  "community", "festival", "neighbors", "religion", "majority",
    "tradition", "families", "food",     "language",  "music",    "wedding",   "museum",   "celebrate"};

const std::vector<std::string> kCue{
    "vermin",  "scum",     "filth", "parasites", "rats",    "trash",  "subhuman", "disgusting",
    "worthless", "pathetic", "degenerate", "animals", "cockroaches", "plague", "slur1", "slur2",
    "slur3",   "slur4",    "expel", "deport"};

const std::vector<std::string> kCoded{
    "control", "banks",  "replace", "globalist", "invade", "infest",
    "conspiracy", "schemers", "breed", "takeover", "puppet", "agenda"};

struct Group {
  const char* tag;
  std::array<const char*, 2> terms;
  double share;
  double toxic_rate;
};

constexpr std::array<Group, 4> kGroups{{
    {"keshite", {"keshites", "keshite"}, 0.30, 0.55},
    {"zorian", {"zorians", "zorian"}, 0.15, 0.45},
    {"tellan", {"tellans", "tellan"}, 0.15, 0.45},
    {nullptr, {nullptr, nullptr}, 0.40, 0.30},
}};

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  const std::string& pick(const std::vector<std::string>& v) { return v[index(v.size())]; }

  void insert(std::vector<std::string>& words, std::string w) {
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(index(words.size() + 1)), std::move(w));
  }

  Sample sample() {
    double r = uniform();
    const Group* group = &kGroups.back();
    for (const auto& g : kGroups) {
      if (r < g.share) {
        group = &g;
        break;
      }
      r -= g.share;
    }
    const bool toxic = uniform() < group->toxic_rate;

    std::vector<std::string> words;
    const int filler = between(4, 10);
    for (int i = 0; i < filler; ++i) words.push_back(pick(kFiller));
    if (group->tag) {
      insert(words, group->terms[index(2)]);
      if (uniform() < 0.15) insert(words, group->terms[index(2)]);
    }

    if (toxic) {
      const double kind = uniform();
      if (kind < 0.70) {
        const int n = between(1, 2);
        for (int i = 0; i < n; ++i) insert(words, pick(kCue));
      } else if (kind < 0.92) {
        const int n = between(1, 2);
        for (int i = 0; i < n; ++i) insert(words, pick(kCoded));
      }
      // Remaining toxic samples carry no lexical signal at all.
    } else {
      if (group->tag || uniform() < 0.3) {
        const int n = between(1, 2);
        for (int i = 0; i < n; ++i) insert(words, pick(kBenign));
      }
      const double kind = uniform();
      if (kind < 0.07) {
        // Mention rather than use: "calling me <cue> is not an insult".
        std::vector<std::string> phrase{"calling", "me", pick(kCue), "is", "not", "an", "insult"};
        const auto at = static_cast<std::ptrdiff_t>(index(words.size() + 1));
        words.insert(words.begin() + at, phrase.begin(), phrase.end());
      } else if (kind < 0.15) {
        insert(words, pick(kCoded));
      }
    }
    if (uniform() < 0.25) words.insert(words.begin(), "<user>");

    Sample s;
    s.text = text::join(words);
    s.label = toxic ? "toxic" : "non-toxic";
    if (group->tag) s.metadata["target_group"] = group->tag;
    return s;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

std::vector<Sample> generate_hate_speech_corpus(const SyntheticCorpusConfig& config) {
  if (config.num_samples < 2) throw ArgumentError("num_samples must be at least 2");
  if (config.test_fraction <= 0.0 || config.test_fraction >= 1.0) {
    throw ArgumentError("test_fraction must be in (0, 1)");
  }
  Generator gen(config.seed);
  std::vector<Sample> samples;
  std::unordered_set<std::string> seen;
  std::size_t attempts = 0;
  while (samples.size() < config.num_samples) {
    if (++attempts > config.num_samples * 20) throw StateError("could not generate enough distinct samples");
    Sample s = gen.sample();
    if (!seen.insert(s.text).second) continue;
    if (gen.uniform() < config.label_noise) s.label = s.label == "toxic" ? "non-toxic" : "toxic";
    samples.push_back(std::move(s));
  }
  const auto num_test = static_cast<std::size_t>(static_cast<double>(samples.size()) * config.test_fraction);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i].split = i < num_test ? Split::kTest : Split::kTrain;
  }
  return samples;
}

}  // namespace rationale::data
