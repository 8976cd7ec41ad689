#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace codei::store {

std::string sha256_hex(std::string_view data);

struct ManifestEntry {
  std::string artifact;  // path relative to the store root
  std::string kind;
  std::string command;
  std::string key;    // hash of the command and its inputs
  std::string group;  // artifacts that accumulate (requirement unions) share a group
  nlohmann::json inputs;
};

// Content-addressed artifact directory. Objects are never rewritten; the manifest
// records which command and inputs produced each one. Manifest updates hold an
// exclusive flock on <root>/.lock.
class RunStore {
 public:
  explicit RunStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  static std::string key(const std::string& command, const nlohmann::json& inputs);

  // Cache lookup by key.
  std::optional<ManifestEntry> find(const std::string& key) const;
  // Most recent entry of a group.
  std::optional<ManifestEntry> latest(const std::string& kind, const std::string& group) const;

  // Stores bytes as objects/<sha256>.<ext> and records the entry. Returns the absolute path.
  std::filesystem::path put(ManifestEntry entry, const std::string& bytes, const std::string& ext = "json");
  std::string read(const ManifestEntry& e) const;

  std::vector<ManifestEntry> manifest() const;

 private:
  std::filesystem::path root_;
};

}  // namespace codei::store
