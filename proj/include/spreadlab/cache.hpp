#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "spreadlab/grpengine.hpp"

namespace spreadlab {

// On-disk store for stabilizer chains and class tables, keyed by format
// version and group digest. Files end in a CRC line so truncation and edits
// are detected.
class ClassCache {
 public:
  static constexpr int kFormatVersion = 1;

  explicit ClassCache(std::filesystem::path dir);
  // $SPREADLAB_CACHE, else $XDG_CACHE_HOME/spreadlab, else ~/.cache/spreadlab.
  static std::filesystem::path default_dir();

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(const Group& G) const;

  // Serialized base, orbit lengths and class table; computes classes.
  static std::string serialize(const Group& G);
  // Stored text when present. Throws VersionMismatch on a foreign version,
  // digest or checksum. Never computes classes.
  std::optional<std::string> load(const Group& G) const;
  std::string save(const Group& G) const;
  // Stored text, recomputing and rewriting on a miss or mismatch.
  struct Fetch {
    std::string text;
    bool hit = false;
    bool recomputed_after_mismatch = false;
  };
  Fetch fetch(const Group& G) const;
  std::size_t clear() const;

 private:
  std::filesystem::path dir_;
};

}  // namespace spreadlab
