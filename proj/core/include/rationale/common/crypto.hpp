// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>

namespace rationale::crypto {

std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_hex(std::string_view bytes);

std::string hmac_sha256_hex(std::string_view key, std::string_view message);

/// Hex-encoded bytes from the OS CSPRNG.
std::string random_hex(std::size_t num_bytes);

/// Salted PBKDF2-HMAC-SHA256, encoded as "pbkdf2-sha256$<iter>$<salt>$<hash>".
std::string hash_password(std::string_view password);
bool verify_password(std::string_view password, std::string_view encoded);

}  // namespace rationale::crypto
