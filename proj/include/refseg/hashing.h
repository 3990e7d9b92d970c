/* Copyright 2026 The refseg Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef REFSEG_HASHING_H_
#define REFSEG_HASHING_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace refseg {

// Lower-case hex SHA-256 digest.
std::string Sha256Hex(std::string_view data);

// 64-bit FNV-1a. Used by the mock embedder's token buckets.
constexpr uint64_t Fnv1a64(std::string_view data) {
  uint64_t h = 14695981039346656037ull;
  for (char c : data) {
    h ^= static_cast<uint8_t>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string Base64Encode(std::string_view bytes);
// Throws ParseError on malformed input.
std::string Base64Decode(std::string_view text);

}  // namespace refseg

#endif  // REFSEG_HASHING_H_
