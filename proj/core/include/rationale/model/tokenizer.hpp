// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rationale::model {

inline constexpr std::string_view kUnknownToken = "[UNK]";

/// Lower-casing WordPiece tokenizer. Whole words are looked up first; words
/// that miss are split on punctuation and matched greedily against "##"
/// continuation pieces, falling back to [UNK] per piece.
class Tokenizer {
 public:
  explicit Tokenizer(std::vector<std::string> vocab);

  static Tokenizer load(const std::filesystem::path& vocab_file);
  void save(const std::filesystem::path& vocab_file) const;

  /// Vocabulary of every word seen at least `min_count` times, [UNK] first,
  /// the rest sorted so that the id assignment is reproducible.
  static Tokenizer build(std::span<const std::string> texts, int min_count = 1);

  std::vector<std::int32_t> encode(std::string_view text) const;

  std::size_t vocab_size() const { return vocab_.size(); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  std::int32_t unknown_id() const { return unknown_id_; }

 private:
  void wordpiece(std::string_view piece, std::vector<std::int32_t>& out) const;
  std::int32_t lookup(std::string_view token) const;

  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::int32_t> index_;
  std::int32_t unknown_id_ = 0;
};

}  // namespace rationale::model
