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

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "annkit/harness.hpp"
#include "annkit/random.hpp"

namespace annkit::harness {

std::string_view ToString(Distribution d) {
  switch (d) {
    case Distribution::kGaussian: return "gaussian";
    case Distribution::kUniformCentered: return "uniform";
    case Distribution::kUniformPositive: return "uniform-positive";
    case Distribution::kExponential: return "exponential";
  }
  return "unknown";
}

Distribution ParseDistribution(std::string_view name) {
  if (name == "gaussian") return Distribution::kGaussian;
  if (name == "uniform") return Distribution::kUniformCentered;
  if (name == "uniform-positive") return Distribution::kUniformPositive;
  if (name == "exponential") return Distribution::kExponential;
  Throw(ErrorCode::kInvalidArgument, "unknown distribution '" + std::string(name) + "'");
}

Collection Generate(const SyntheticSpec& spec) {
  ANNKIT_CHECK(spec.m >= 1 && spec.d >= 1, ErrorCode::kInvalidArgument,
               "generate: m and d must be >= 1");
  const double half_width = std::sqrt(12.0) / 2.0;
  Rng rng(spec.seed);
  std::vector<float> data(spec.m * spec.d);
  for (auto& v : data) {
    double x = 0.0;
    switch (spec.distribution) {
      case Distribution::kGaussian: x = rng.Normal(); break;
      case Distribution::kUniformCentered: x = rng.Uniform(-half_width, half_width); break;
      case Distribution::kUniformPositive: x = rng.Uniform(0.0, 2.0 * half_width); break;
      case Distribution::kExponential: x = -std::log1p(-rng.Uniform()); break;
    }
    v = static_cast<float>(x);
  }
  return Collection(std::move(data), spec.d);
}

std::vector<std::uint8_t> EncodeVecs(const Collection& x) {
  std::vector<std::uint8_t> out;
  out.reserve(x.size() * (4 + 4 * x.dim()));
  const auto d = static_cast<std::int32_t>(x.dim());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&d);
    out.insert(out.end(), p, p + 4);
    const auto* r = reinterpret_cast<const std::uint8_t*>(x.row(i).data());
    out.insert(out.end(), r, r + 4 * x.dim());
  }
  return out;
}

Collection DecodeVecs(std::span<const std::uint8_t> bytes) {
  ANNKIT_CHECK(!bytes.empty(), ErrorCode::kEmpty, "vecs: empty input (need m >= 1)");
  std::vector<float> data;
  std::int32_t dim = -1;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    ANNKIT_CHECK(bytes.size() - pos >= 4, ErrorCode::kFormat, "vecs: truncated record header");
    std::int32_t d = 0;
    std::memcpy(&d, bytes.data() + pos, 4);
    pos += 4;
    ANNKIT_CHECK(d > 0, ErrorCode::kFormat, "vecs: non-positive dimension");
    ANNKIT_CHECK(dim < 0 || d == dim, ErrorCode::kFormat, "vecs: inconsistent dimension");
    dim = d;
    const std::size_t need = 4 * static_cast<std::size_t>(d);
    ANNKIT_CHECK(bytes.size() - pos >= need, ErrorCode::kFormat, "vecs: truncated record");
    const std::size_t old = data.size();
    data.resize(old + static_cast<std::size_t>(d));
    std::memcpy(data.data() + old, bytes.data() + pos, need);
    pos += need;
  }
  return Collection(std::move(data), static_cast<std::size_t>(dim));
}

std::vector<std::uint8_t> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  ANNKIT_CHECK(in.good(), ErrorCode::kIo, "cannot open '" + path + "' for reading");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void WriteFile(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  ANNKIT_CHECK(out.good(), ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  ANNKIT_CHECK(out.good(), ErrorCode::kIo, "write to '" + path + "' failed");
}

void SaveVecs(const std::string& path, const Collection& x) {
  WriteFile(path, EncodeVecs(x));
}

Collection LoadVecs(const std::string& path) { return DecodeVecs(ReadFile(path)); }

std::string FormatNumber(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void Report::AddRow(std::vector<std::string> row) {
  ANNKIT_CHECK(row.size() == columns_.size(), ErrorCode::kInvalidArgument,
               "report: row width does not match the header");
  rows_.push_back(std::move(row));
}

std::string Report::ToCsv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return out;
}

Params ParseParams(std::string_view text) {
  Params p;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const auto item = text.substr(start, end - start);
    if (!item.empty()) {
      const auto eq = item.find('=');
      ANNKIT_CHECK(eq != std::string_view::npos && eq > 0, ErrorCode::kInvalidArgument,
                   "parameter '" + std::string(item) + "' is not key=value");
      p[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    }
    start = end + 1;
  }
  return p;
}

std::string ParamString(const Params& p, const std::string& key,
                        const std::string& fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

double ParamDouble(const Params& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used == it->second.size()) return v;
  } catch (const std::exception&) {
  }
  Throw(ErrorCode::kInvalidArgument, "parameter " + key + " is not a number");
}

std::size_t ParamSize(const Params& p, const std::string& key,
                      std::size_t fallback) {
  auto it = p.find(key);
  if (it == p.end() || it->second == "auto") return fallback;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(it->second, &used);
    if (used == it->second.size()) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  Throw(ErrorCode::kInvalidArgument, "parameter " + key + " is not a non-negative integer");
}

std::vector<std::size_t> ParseSizeList(std::string_view text) {
  std::vector<std::size_t> out;
  Params probe;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    probe["v"] = std::string(text.substr(start, end - start));
    ANNKIT_CHECK(!probe["v"].empty(), ErrorCode::kInvalidArgument, "empty list entry");
    out.push_back(ParamSize(probe, "v", 0));
    start = end + 1;
  }
  return out;
}

}  // namespace annkit::harness
