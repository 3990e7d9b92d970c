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

#include "refseg/cache.h"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "refseg/errors.h"
#include "refseg/hashing.h"

namespace refseg {
namespace fs = std::filesystem;

namespace {

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<CacheEntry> ReadEntry(const fs::path& path,
                                    const std::string& backend_id) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(in);
    CacheEntry e;
    e.backend_id = backend_id;
    e.digest = path.stem().string();
    e.request = j.at("request");
    e.completion = j.at("completion").get<std::string>();
    e.timestamp = j.value("timestamp", "");
    e.path = path.string();
    return e;
  } catch (const nlohmann::json::exception&) {
    // Half-written or foreign file: treat as a miss.
    return std::nullopt;
  }
}

}  // namespace

CompletionCache::CompletionCache(std::string dir) : dir_(std::move(dir)) {}

std::string CompletionCache::Digest(const nlohmann::json& key) {
  return Sha256Hex(key.dump());
}

std::string CompletionCache::EntryPath(const std::string& backend_id,
                                       const std::string& digest) const {
  return (fs::path(dir_) / backend_id / (digest + ".json")).string();
}

std::optional<std::string> CompletionCache::Get(const std::string& backend_id,
                                                const nlohmann::json& key) {
  const std::string digest = Digest(key);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto b = memory_.find(backend_id);
    if (b != memory_.end()) {
      auto e = b->second.find(digest);
      if (e != b->second.end()) {
        ++hits_;
        return e->second.completion;
      }
    }
  }
  if (!dir_.empty()) {
    if (auto e = ReadEntry(EntryPath(backend_id, digest), backend_id);
        e && e->request == key) {
      std::lock_guard<std::mutex> lock(mu_);
      memory_[backend_id][digest] = *e;
      ++hits_;
      return e->completion;
    }
  }
  ++misses_;
  return std::nullopt;
}

void CompletionCache::Put(const std::string& backend_id,
                          const nlohmann::json& key,
                          const std::string& completion) {
  CacheEntry entry;
  entry.backend_id = backend_id;
  entry.digest = Digest(key);
  entry.request = key;
  entry.completion = completion;
  entry.timestamp = UtcTimestamp();
  if (!dir_.empty()) {
    const fs::path target = EntryPath(backend_id, entry.digest);
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw ConfigError("cannot create cache dir " + target.parent_path().string());
    std::ostringstream tmp_name;
    tmp_name << target.filename().string() << ".tmp."
             << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "."
             << std::random_device{}();
    const fs::path tmp = target.parent_path() / tmp_name.str();
    {
      std::ofstream out(tmp);
      if (!out) throw ConfigError("cannot write cache entry " + tmp.string());
      out << nlohmann::json{{"request", key},
                            {"completion", completion},
                            {"timestamp", entry.timestamp}}
                 .dump(2)
          << "\n";
    }
    fs::rename(tmp, target, ec);
    if (ec) {
      fs::remove(tmp, ec);
      throw ConfigError("cannot publish cache entry " + target.string());
    }
    entry.path = target.string();
  }
  std::lock_guard<std::mutex> lock(mu_);
  memory_[backend_id][entry.digest] = std::move(entry);
}

std::vector<CacheEntry> CompletionCache::List(
    const std::optional<std::string>& backend_id) const {
  std::vector<CacheEntry> out;
  if (dir_.empty()) {
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& [id, entries] : memory_) {
      if (backend_id && id != *backend_id) continue;
      for (const auto& [digest, e] : entries) out.push_back(e);
    }
    return out;
  }
  if (!fs::is_directory(dir_)) return out;
  std::vector<fs::path> backends;
  for (const auto& d : fs::directory_iterator(dir_)) {
    if (d.is_directory()) backends.push_back(d.path());
  }
  std::sort(backends.begin(), backends.end());
  for (const auto& b : backends) {
    const std::string id = b.filename().string();
    if (backend_id && id != *backend_id) continue;
    std::vector<fs::path> files;
    for (const auto& f : fs::directory_iterator(b)) {
      if (f.path().extension() == ".json") files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      if (auto e = ReadEntry(f, id)) out.push_back(std::move(*e));
    }
  }
  return out;
}

size_t CompletionCache::Purge(const std::optional<std::string>& backend_id) {
  size_t removed = 0;
  if (!dir_.empty()) {
    for (const auto& e : List(backend_id)) {
      std::error_code ec;
      if (fs::remove(e.path, ec)) ++removed;
    }
  }
  std::lock_guard<std::mutex> lock(mu_);
  for (auto it = memory_.begin(); it != memory_.end();) {
    if (backend_id && it->first != *backend_id) {
      ++it;
      continue;
    }
    if (dir_.empty()) removed += it->second.size();
    it = memory_.erase(it);
  }
  return removed;
}

}  // namespace refseg
