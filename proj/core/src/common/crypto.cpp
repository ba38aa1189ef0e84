// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/common/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <stdexcept>
#include <vector>

namespace rationale::crypto {
namespace {

constexpr int kPbkdf2Iterations = 60000;

std::string to_hex(const unsigned char* data, std::size_t n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(n * 2, '0');
  for (std::size_t i = 0; i < n; ++i) {
    out[2 * i] = kDigits[data[i] >> 4];
    out[2 * i + 1] = kDigits[data[i] & 0xF];
  }
  return out;
}

std::string pbkdf2_hex(std::string_view password, std::string_view salt, int iterations) {
  unsigned char out[32];
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()),
                        reinterpret_cast<const unsigned char*>(salt.data()),
                        static_cast<int>(salt.size()), iterations, EVP_sha256(),
                        sizeof(out), out) != 1) {
    throw std::runtime_error("PBKDF2 failed");
  }
  return to_hex(out, sizeof(out));
}

}  // namespace

std::string sha256_hex(std::span<const unsigned char> bytes) {
  unsigned char md[SHA256_DIGEST_LENGTH];
  SHA256(bytes.data(), bytes.size(), md);
  return to_hex(md, sizeof(md));
}

std::string sha256_hex(std::string_view bytes) {
  return sha256_hex(std::span(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()));
}

std::string hmac_sha256_hex(std::string_view key, std::string_view message) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
       reinterpret_cast<const unsigned char*>(message.data()), message.size(), md, &len);
  return to_hex(md, len);
}

std::string random_hex(std::size_t num_bytes) {
  std::vector<unsigned char> buf(num_bytes);
  if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1) {
    throw std::runtime_error("RAND_bytes failed");
  }
  return to_hex(buf.data(), buf.size());
}

std::string hash_password(std::string_view password) {
  std::string salt = random_hex(16);
  return "pbkdf2-sha256$" + std::to_string(kPbkdf2Iterations) + "$" + salt + "$" +
         pbkdf2_hex(password, salt, kPbkdf2Iterations);
}

bool verify_password(std::string_view password, std::string_view encoded) {
  // pbkdf2-sha256$<iter>$<salt>$<hash>
  auto p1 = encoded.find('$');
  auto p2 = encoded.find('$', p1 + 1);
  auto p3 = encoded.find('$', p2 + 1);
  if (p1 == std::string_view::npos || p2 == std::string_view::npos ||
      p3 == std::string_view::npos || encoded.substr(0, p1) != "pbkdf2-sha256") {
    return false;
  }
  int iterations = std::stoi(std::string(encoded.substr(p1 + 1, p2 - p1 - 1)));
  std::string_view salt = encoded.substr(p2 + 1, p3 - p2 - 1);
  std::string_view expected = encoded.substr(p3 + 1);
  std::string actual = pbkdf2_hex(password, salt, iterations);
  return actual.size() == expected.size() &&
         CRYPTO_memcmp(actual.data(), expected.data(), actual.size()) == 0;
}

}  // namespace rationale::crypto
