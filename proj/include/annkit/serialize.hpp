// Copyright 2026 The annkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "annkit/core.hpp"

namespace annkit {

// Little-endian byte sink. The library only targets little-endian hosts.
class BinaryWriter {
 public:
  template <typename T>
    requires std::is_trivially_copyable_v<T>
  void Put(const T& v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }

  template <typename T>
    requires std::is_trivially_copyable_v<T>
  void PutVector(std::span<const T> v) {
    Put<std::uint64_t>(v.size());
    const auto* p = reinterpret_cast<const std::uint8_t*>(v.data());
    bytes_.insert(bytes_.end(), p, p + v.size_bytes());
  }
  template <typename T>
  void PutVector(const std::vector<T>& v) {
    PutVector(std::span<const T>(v));
  }

  void PutString(const std::string& s) {
    PutVector(std::span<const char>(s.data(), s.size()));
  }

  void PutCollection(const Collection& x) {
    Put<std::uint64_t>(x.dim());
    PutVector(x.data());
  }

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t>&& Release() && { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
    requires std::is_trivially_copyable_v<T>
  T Get() {
    Need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  template <typename T>
    requires std::is_trivially_copyable_v<T>
  std::vector<T> GetVector() {
    const auto n = Get<std::uint64_t>();
    ANNKIT_CHECK(n <= (bytes_.size() - pos_) / (sizeof(T) ? sizeof(T) : 1),
                 ErrorCode::kFormat, "container: vector length overruns payload");
    std::vector<T> v(n);
    std::memcpy(v.data(), bytes_.data() + pos_, n * sizeof(T));
    pos_ += n * sizeof(T);
    return v;
  }

  std::string GetString() {
    auto v = GetVector<char>();
    return std::string(v.begin(), v.end());
  }

  Collection GetCollection() {
    const auto d = Get<std::uint64_t>();
    auto data = GetVector<float>();
    if (d == 0) return Collection();
    return Collection(std::move(data), d);
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    ANNKIT_CHECK(bytes_.size() - pos_ >= n, ErrorCode::kFormat,
                 "container: truncated payload");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace annkit
