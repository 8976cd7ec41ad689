#include "codei/store.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace codei::store {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int n = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &n, EVP_sha256(), nullptr))
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < n; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

namespace {

class Lock {
 public:
  explicit Lock(const fs::path& p) : fd_(::open(p.c_str(), O_RDWR | O_CREAT, 0644)) {
    if (fd_ < 0 || ::flock(fd_, LOCK_EX) != 0) throw std::runtime_error("cannot lock " + p.string());
  }
  ~Lock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  Lock(const Lock&) = delete;
  Lock& operator=(const Lock&) = delete;

 private:
  int fd_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write then rename so readers never see a partial file.
void write_atomic(const fs::path& p, const std::string& bytes) {
  auto tmp = p;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << bytes;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, p);
}

json entry_json(const ManifestEntry& e) {
  return {{"artifact", e.artifact}, {"kind", e.kind},   {"command", e.command},
          {"key", e.key},           {"group", e.group}, {"inputs", e.inputs}};
}

ManifestEntry entry_from(const json& j) {
  return {j.at("artifact"), j.at("kind"), j.at("command"), j.at("key"), j.value("group", ""),
          j.value("inputs", json::object())};
}

std::vector<ManifestEntry> load(const fs::path& p) {
  std::vector<ManifestEntry> out;
  if (!fs::exists(p)) return out;
  auto j = json::parse(slurp(p));
  for (const auto& e : j.at("entries")) out.push_back(entry_from(e));
  return out;
}

}  // namespace

RunStore::RunStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "objects");
}

std::string RunStore::key(const std::string& command, const json& inputs) {
  return sha256_hex(json{{"command", command}, {"inputs", inputs}}.dump());
}

std::vector<ManifestEntry> RunStore::manifest() const {
  Lock lock(root_ / ".lock");
  return load(root_ / "manifest.json");
}

std::optional<ManifestEntry> RunStore::find(const std::string& key) const {
  for (const auto& e : manifest())
    if (e.key == key && fs::exists(root_ / e.artifact)) return e;
  return std::nullopt;
}

std::optional<ManifestEntry> RunStore::latest(const std::string& kind, const std::string& group) const {
  std::optional<ManifestEntry> out;
  for (const auto& e : manifest())
    if (e.kind == kind && e.group == group) out = e;
  return out;
}

fs::path RunStore::put(ManifestEntry entry, const std::string& bytes, const std::string& ext) {
  entry.artifact = "objects/" + sha256_hex(bytes) + "." + ext;
  const auto path = root_ / entry.artifact;
  Lock lock(root_ / ".lock");
  if (!fs::exists(path)) write_atomic(path, bytes);
  auto entries = load(root_ / "manifest.json");
  for (const auto& e : entries)
    if (e.key == entry.key && e.artifact == entry.artifact) return path;
  entries.push_back(std::move(entry));
  json arr = json::array();
  for (const auto& e : entries) arr.push_back(entry_json(e));
  write_atomic(root_ / "manifest.json", json{{"schema", 1}, {"entries", arr}}.dump(2) + "\n");
  return path;
}

std::string RunStore::read(const ManifestEntry& e) const { return slurp(root_ / e.artifact); }

}  // namespace codei::store
