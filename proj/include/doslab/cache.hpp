#pragma once

#include <optional>
#include <string>

namespace doslab {

inline constexpr const char* kCacheDirEnv = "DOSLAB_CACHE_DIR";

/// 16-hex-digit FNV-1a hash of a canonical request serialization.
std::string cache_key(const std::string& canonical);

/// Directory-backed store of result files. Each entry ends with a trailer
/// line holding the payload length and checksum, so torn writes are caught.
class ResultCache {
 public:
  explicit ResultCache(std::string dir);

  /// $DOSLAB_CACHE_DIR when set, else `requested`.
  static std::string resolve_dir(const std::string& requested);

  const std::string& dir() const { return dir_; }
  std::string path_for(const std::string& key) const;

  enum class Status { hit, miss, corrupt };
  struct Lookup {
    Status status = Status::miss;
    std::string payload;
  };
  Lookup lookup(const std::string& key) const;
  void store(const std::string& key, const std::string& payload) const;

 private:
  std::string dir_;
};

}  // namespace doslab
