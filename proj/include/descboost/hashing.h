// Copyright 2026 The descboost Authors.
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

#ifndef DESCBOOST_HASHING_H_
#define DESCBOOST_HASHING_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "descboost/core.h"

namespace descboost {

// Platform-independent 64-bit hash of a tuple of integers and strings.
//
// The tuple is encoded as bytes: each integer as 8 little-endian bytes, each
// string as its length (8 little-endian bytes) followed by its raw bytes.
// The byte stream is hashed with FNV-1a 64 and the result passed through the
// SplitMix64 finalizer so that low bits are well mixed.
class StableHasher {
 public:
  StableHasher &Add(std::uint64_t value);
  StableHasher &Add(std::string_view value);
  std::uint64_t Finish() const;

 private:
  void AddByte(unsigned char byte);

  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t SplitMix64Finalize(std::uint64_t x);

// Maps a 64-bit hash to [0, 1) using its top 53 bits.
double HashToUnit(std::uint64_t hash);

std::string Hex64(std::uint64_t value);

// Lowercase hex SHA-256 digest.
std::string Sha256Hex(std::string_view data);

// Content hashes covering every field that can influence a prediction.
std::string CorpusHash(const TokenizedCorpus &corpus);
std::string TaskSpecHash(const TaskSpec &spec);

}  // namespace descboost

#endif  // DESCBOOST_HASHING_H_
