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

#include "descboost/hashing.h"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

#include "descboost/error.h"
#include "descboost/serialization.h"

namespace descboost {

void StableHasher::AddByte(unsigned char byte) {
  state_ ^= byte;
  state_ *= 0x100000001b3ULL;
}

StableHasher &StableHasher::Add(std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    AddByte(static_cast<unsigned char>((value >> (8 * i)) & 0xff));
  }
  return *this;
}

StableHasher &StableHasher::Add(std::string_view value) {
  Add(static_cast<std::uint64_t>(value.size()));
  for (char c : value) AddByte(static_cast<unsigned char>(c));
  return *this;
}

std::uint64_t StableHasher::Finish() const { return SplitMix64Finalize(state_); }

std::uint64_t SplitMix64Finalize(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

double HashToUnit(std::uint64_t hash) {
  return static_cast<double>(hash >> 11) * 0x1.0p-53;
}

std::string Hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

std::string Sha256Hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length,
                 EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string CorpusHash(const TokenizedCorpus &corpus) {
  // Sentence content only; name and split do not change predictions.
  std::string buffer;
  for (const TokenizedSentence &sentence : corpus.sentences) {
    buffer += SentenceToJson(sentence).dump();
    buffer.push_back('\n');
  }
  return Sha256Hex(buffer);
}

std::string TaskSpecHash(const TaskSpec &spec) {
  return Sha256Hex(TaskSpecToJson(spec).dump());
}

}  // namespace descboost
