// SPDX-License-Identifier: Apache-2.0
#include "polarbench/io/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <sstream>

#include "polarbench/error.hpp"

namespace polarbench::io {

namespace {

std::string to_hex(const unsigned char* d, unsigned n) {
  static const char* digits = "0123456789abcdef";
  std::string s(2 * n, '0');
  for (unsigned i = 0; i < n; ++i) {
    s[2 * i] = digits[d[i] >> 4];
    s[2 * i + 1] = digits[d[i] & 15];
  }
  return s;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned n = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), md.data(), &n, EVP_sha256(), nullptr)) {
    throw IoError("sha256 digest failed");
  }
  return to_hex(md.data(), n);
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(slurp(path)); }

void RunManifest::add(const std::filesystem::path& dir, const std::string& role, const std::string& file) {
  const auto path = dir / file;
  artifacts.push_back({role, file, sha256_file(path), std::filesystem::file_size(path)});
}

const Artifact* RunManifest::find(const std::string& role) const {
  for (const auto& a : artifacts)
    if (a.role == role) return &a;
  return nullptr;
}

const Artifact& RunManifest::require(const std::string& role) const {
  if (const Artifact* a = find(role)) return *a;
  throw IoError("manifest has no artifact with role '" + role + "'");
}

void RunManifest::write(const std::filesystem::path& dir) const {
  nlohmann::json j;
  j["kind"] = kind;
  j["tool_version"] = tool_version;
  j["config_hash"] = config_hash;
  j["seconds"] = seconds;
  j["metadata"] = metadata;
  j["artifacts"] = nlohmann::json::array();
  for (const auto& a : artifacts) {
    j["artifacts"].push_back({{"role", a.role}, {"file", a.file}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  }
  const auto path = dir / kManifestName;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

RunManifest RunManifest::read(const std::filesystem::path& dir) {
  const auto path = dir / kManifestName;
  if (!std::filesystem::exists(path)) throw IoError("missing manifest '" + path.string() + "'");
  try {
    const auto j = nlohmann::json::parse(slurp(path));
    RunManifest m;
    m.kind = j.at("kind").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.seconds = j.at("seconds").get<double>();
    m.metadata = j.at("metadata");
    for (const auto& a : j.at("artifacts")) {
      m.artifacts.push_back({a.at("role").get<std::string>(), a.at("file").get<std::string>(),
                             a.at("sha256").get<std::string>(), a.at("bytes").get<std::uintmax_t>()});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest '" + path.string() + "': " + e.what());
  }
}

}  // namespace polarbench::io
