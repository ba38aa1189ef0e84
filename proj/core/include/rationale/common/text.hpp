// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rationale::text {

/// Word-level units shown to annotators: the text split on ASCII whitespace.
std::vector<std::string> split_words(std::string_view text);

std::string join(std::span<const std::string> words, std::string_view sep = " ");

std::string to_lower(std::string_view s);

/// Milliseconds since the Unix epoch.
std::int64_t now_millis();

std::string iso8601_utc(std::int64_t millis);

}  // namespace rationale::text
