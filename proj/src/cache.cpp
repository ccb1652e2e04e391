#include "doslab/cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "doslab/csv.hpp"
#include "doslab/error.hpp"
#include "doslab/rng.hpp"

namespace doslab {

namespace {

constexpr const char* kTrailerTag = "#doslab-cache length=";

std::string hex16(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string trailer(const std::string& payload) {
  return std::string(kTrailerTag) + std::to_string(payload.size()) + " fnv=" + hex16(fnv1a64(payload)) + "\n";
}

}  // namespace

std::string cache_key(const std::string& canonical) { return hex16(fnv1a64(canonical)); }

ResultCache::ResultCache(std::string dir) : dir_(std::move(dir)) {
  require(!dir_.empty(), "cache directory must not be empty");
  std::filesystem::create_directories(dir_);
}

std::string ResultCache::resolve_dir(const std::string& requested) {
  const char* env = std::getenv(kCacheDirEnv);
  if (env != nullptr && *env != '\0') return env;
  return requested;
}

std::string ResultCache::path_for(const std::string& key) const {
  return (std::filesystem::path(dir_) / (key + ".cache")).string();
}

ResultCache::Lookup ResultCache::lookup(const std::string& key) const {
  Lookup out;
  const std::string path = path_for(key);
  if (!std::filesystem::exists(path)) return out;
  std::string raw;
  try {
    raw = read_file(path);
  } catch (const std::exception&) {
    out.status = Status::corrupt;
    return out;
  }
  const auto pos = raw.rfind(kTrailerTag);
  if (pos == std::string::npos) {
    out.status = Status::corrupt;
    return out;
  }
  std::string payload = raw.substr(0, pos);
  if (raw.substr(pos) != trailer(payload)) {
    out.status = Status::corrupt;
    return out;
  }
  out.status = Status::hit;
  out.payload = std::move(payload);
  return out;
}

void ResultCache::store(const std::string& key, const std::string& payload) const {
  write_file_atomic(path_for(key), payload + trailer(payload));
}

}  // namespace doslab
