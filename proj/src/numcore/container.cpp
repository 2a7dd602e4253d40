//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/numcore/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace retrograph::numcore {
namespace {

constexpr char kMagic[8] = {'R', 'T', 'G', 'R', 'A', 'P', 'H', '\0'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_string(std::string& out, std::string_view s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  std::string string() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("checkpoint truncated");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

const Tensor2* TensorContainer::tensor(std::string_view name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return &t;
  }
  return nullptr;
}

std::optional<std::string> TensorContainer::meta(std::string_view key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string serialize(const TensorContainer& container) {
  std::string out(kMagic, sizeof(kMagic));
  put_u32(out, kContainerVersion);
  put_u32(out, static_cast<std::uint32_t>(container.metadata.size()));
  for (const auto& [k, v] : container.metadata) {
    put_string(out, k);
    put_string(out, v);
  }
  put_u32(out, static_cast<std::uint32_t>(container.tensors.size()));
  for (const auto& [name, t] : container.tensors) {
    put_string(out, name);
    put_u64(out, t.rows());
    put_u64(out, t.cols());
    for (double v : t.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  put_u64(out, fnv1a64(out));
  return out;
}

TensorContainer deserialize(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) + 4 + 8 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw FormatError("not a retrograph checkpoint (bad magic)");
  }
  const std::string_view body = bytes.substr(0, bytes.size() - 8);
  Reader tail(bytes.substr(bytes.size() - 8));
  if (tail.u64() != fnv1a64(body)) throw FormatError("checkpoint checksum mismatch (corrupted)");

  Reader r(body.substr(8));
  const std::uint32_t version = r.u32();
  if (version != kContainerVersion) {
    throw FormatError("unsupported checkpoint format version " + std::to_string(version));
  }
  TensorContainer c;
  const std::uint32_t metas = r.u32();
  for (std::uint32_t i = 0; i < metas; ++i) {
    std::string k = r.string();
    std::string v = r.string();
    c.metadata.emplace_back(std::move(k), std::move(v));
  }
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.string();
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    if (cols != 0 && rows > r.remaining() / 8 / cols) throw FormatError("tensor exceeds file");
    std::vector<double> data(rows * cols);
    for (double& v : data) v = std::bit_cast<double>(r.u64());
    c.tensors.emplace_back(std::move(name), Tensor2(rows, cols, std::move(data)));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes in checkpoint");
  return c;
}

void save_container(const std::filesystem::path& path, const TensorContainer& container) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::string bytes = serialize(container);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

TensorContainer load_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

}  // namespace retrograph::numcore
