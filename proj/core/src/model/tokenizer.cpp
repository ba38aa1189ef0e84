// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/model/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "rationale/common/error.hpp"
#include "rationale/common/text.hpp"

namespace rationale::model {

Tokenizer::Tokenizer(std::vector<std::string> vocab) : vocab_(std::move(vocab)) {
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    index_.emplace(vocab_[i], static_cast<std::int32_t>(i));
  }
  auto it = index_.find(std::string(kUnknownToken));
  if (it == index_.end()) {
    throw RegistrationError("vocabulary has no " + std::string(kUnknownToken) + " entry");
  }
  unknown_id_ = it->second;
}

Tokenizer Tokenizer::load(const std::filesystem::path& vocab_file) {
  std::ifstream in(vocab_file);
  if (!in) throw RegistrationError("cannot open vocabulary file", vocab_file.string());
  std::vector<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.push_back(line);
  }
  return Tokenizer(std::move(vocab));
}

void Tokenizer::save(const std::filesystem::path& vocab_file) const {
  std::ofstream out(vocab_file);
  for (const auto& token : vocab_) out << token << '\n';
  if (!out) throw StateError("cannot write vocabulary file", vocab_file.string());
}

Tokenizer Tokenizer::build(std::span<const std::string> texts, int min_count) {
  std::map<std::string, int> counts;
  for (const auto& t : texts) {
    for (const auto& w : text::split_words(text::to_lower(t))) ++counts[w];
  }
  std::vector<std::string> vocab{std::string(kUnknownToken)};
  for (const auto& [word, count] : counts) {
    if (count >= min_count && word != kUnknownToken) vocab.push_back(word);
  }
  return Tokenizer(std::move(vocab));
}

std::int32_t Tokenizer::lookup(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? -1 : it->second;
}

void Tokenizer::wordpiece(std::string_view piece, std::vector<std::int32_t>& out) const {
  std::vector<std::int32_t> ids;
  std::size_t start = 0;
  while (start < piece.size()) {
    std::size_t end = piece.size();
    std::int32_t found = -1;
    while (end > start) {
      std::string candidate(piece.substr(start, end - start));
      if (start > 0) candidate.insert(0, "##");
      found = lookup(candidate);
      if (found >= 0) break;
      --end;
    }
    if (found < 0) {
      out.push_back(unknown_id_);
      return;
    }
    ids.push_back(found);
    start = end;
  }
  out.insert(out.end(), ids.begin(), ids.end());
}

std::vector<std::int32_t> Tokenizer::encode(std::string_view raw) const {
  std::vector<std::int32_t> ids;
  for (const auto& word : text::split_words(text::to_lower(raw))) {
    if (auto id = lookup(word); id >= 0) {
      ids.push_back(id);
      continue;
    }
    // Split punctuation off into standalone pieces.
    std::size_t i = 0;
    while (i < word.size()) {
      if (std::ispunct(static_cast<unsigned char>(word[i]))) {
        wordpiece(std::string_view(word).substr(i, 1), ids);
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < word.size() && !std::ispunct(static_cast<unsigned char>(word[j]))) ++j;
      wordpiece(std::string_view(word).substr(i, j - i), ids);
      i = j;
    }
  }
  return ids;
}

}  // namespace rationale::model
