// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/model/tensor_archive.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rationale/common/error.hpp"

static_assert(std::endian::native == std::endian::little, "tensor archives assume a little-endian host");

namespace rationale::model {
namespace {

constexpr char kMagic[4] = {'R', 'T', 'N', 'L'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(v));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    std::uint32_t v;
    read(&v, sizeof(v));
    return v;
  }
  void read(void* dst, std::size_t n) {
    if (pos_ + n > bytes_.size()) throw RegistrationError("truncated tensor archive");
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_tensors(const std::vector<NamedTensor>& tensors) {
  std::string out(kMagic, sizeof(kMagic));
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.append(t.name);
    put_u32(out, static_cast<std::uint32_t>(t.value->rows()));
    put_u32(out, static_cast<std::uint32_t>(t.value->cols()));
    out.append(reinterpret_cast<const char*>(t.value->data()), sizeof(float) * t.value->size());
  }
  return out;
}

std::map<std::string, Matrix> deserialize_tensors(const std::string& bytes) {
  Reader r(bytes);
  char magic[4];
  r.read(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(magic)) != 0) throw RegistrationError("bad tensor archive magic");
  if (r.u32() != kFormatVersion) throw RegistrationError("unsupported tensor archive version");
  std::uint32_t count = r.u32();
  std::map<std::string, Matrix> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name(r.u32(), '\0');
    r.read(name.data(), name.size());
    std::uint32_t rows = r.u32();
    std::uint32_t cols = r.u32();
    Matrix m(rows, cols);
    r.read(m.data(), sizeof(float) * m.size());
    out.emplace(std::move(name), std::move(m));
  }
  if (!r.done()) throw RegistrationError("trailing bytes in tensor archive");
  return out;
}

void write_tensor_archive(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors) {
  std::string bytes = serialize_tensors(tensors);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw StateError("cannot write tensor archive", path.string());
  }
  std::filesystem::rename(tmp, path);
}

std::map<std::string, Matrix> read_tensor_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RegistrationError("cannot open tensor archive", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_tensors(ss.str());
}

}  // namespace rationale::model
