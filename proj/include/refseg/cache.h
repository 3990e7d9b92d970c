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

#ifndef REFSEG_CACHE_H_
#define REFSEG_CACHE_H_

#include <atomic>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace refseg {

struct CacheEntry {
  std::string backend_id;
  std::string digest;  // sha256 of the key
  nlohmann::json request;
  std::string completion;
  std::string timestamp;
  std::string path;  // empty for memory-only entries
};

// Content-addressed completion cache.
//
// Keys are canonical JSON objects; an entry lives at
// {dir}/{backend_id}/{sha256(key.dump())}.json holding
// {"request": key, "completion": ..., "timestamp": ...}. Writes go through a
// temporary file and rename, so concurrent writers of the same key are
// harmless. An empty `dir` keeps everything in memory.
class CompletionCache {
 public:
  explicit CompletionCache(std::string dir = "");

  std::optional<std::string> Get(const std::string& backend_id,
                                 const nlohmann::json& key);
  void Put(const std::string& backend_id, const nlohmann::json& key,
           const std::string& completion);

  std::vector<CacheEntry> List(const std::optional<std::string>& backend_id = {}) const;
  // Returns the number of entries removed.
  size_t Purge(const std::optional<std::string>& backend_id = {});

  const std::string& dir() const { return dir_; }
  int hits() const { return hits_.load(); }
  int misses() const { return misses_.load(); }

  static std::string Digest(const nlohmann::json& key);

 private:
  std::string EntryPath(const std::string& backend_id,
                        const std::string& digest) const;

  std::string dir_;
  mutable std::mutex mu_;
  // backend_id -> digest -> entry
  std::map<std::string, std::map<std::string, CacheEntry>> memory_;
  std::atomic<int> hits_{0};
  std::atomic<int> misses_{0};
};

}  // namespace refseg

#endif  // REFSEG_CACHE_H_
