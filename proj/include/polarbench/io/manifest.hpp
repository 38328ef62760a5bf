// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace polarbench::io {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct Artifact {
  std::string role;
  std::string file;  // relative to the manifest directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string kind;  // bundle, capture, reconstruction, ...
  std::string tool_version;
  std::string config_hash;
  std::vector<Artifact> artifacts;
  double seconds = 0.0;
  nlohmann::json metadata = nlohmann::json::object();

  /// Hashes `file` (relative to `dir`) and records it.
  void add(const std::filesystem::path& dir, const std::string& role, const std::string& file);
  const Artifact* find(const std::string& role) const;
  /// Throws IoError naming the role when it is absent.
  const Artifact& require(const std::string& role) const;

  void write(const std::filesystem::path& dir) const;
  static RunManifest read(const std::filesystem::path& dir);
};

inline constexpr const char* kManifestName = "manifest.json";

}  // namespace polarbench::io
