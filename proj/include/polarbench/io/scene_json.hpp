// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>

#include "json.hpp"
#include "polarbench/scene_synth.hpp"

namespace polarbench::io {

using Json = nlohmann::json;

/// Parsed JSON text that remembers its source for line-anchored errors.
class JsonDocument {
 public:
  /// Throws ConfigError "<source>:<line>:<col>: ..." on a syntax error.
  JsonDocument(std::string text, std::string source);

  const Json& root() const { return root_; }
  const std::string& source() const { return source_; }

  /// Line of the first occurrence of "key" in the text (1 if absent).
  int line_of(const std::string& key) const;

  /// ConfigError naming the source and the line of `key`.
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  /// Rejects keys of `obj` outside `allowed`; `where` names the object.
  void require_known_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) const;

  /// Typed field access with line-anchored errors.
  template <class T>
  T get(const Json& obj, const std::string& key) const {
    if (!obj.contains(key)) fail(key, "missing key '" + key + "'");
    try {
      return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(key, "key '" + key + "' has the wrong type");
    }
  }
  template <class T>
  T get_or(const Json& obj, const std::string& key, T fallback) const {
    return obj.contains(key) ? get<T>(obj, key) : fallback;
  }

 private:
  std::string text_;
  std::string source_;
  Json root_;
};

Json scene_to_json(const SceneSpec& scene);

/// Accepts either "rig": {"focal_px", "baseline_m"} (EasyPolar) or an explicit
/// "cameras" list. Unknown keys are rejected.
SceneSpec scene_from_json(const JsonDocument& doc, const Json& obj);
SceneSpec scene_from_json_text(const std::string& text, const std::string& source = "<scene>");

Json camera_to_json(const CameraModel& cam);
CameraModel camera_from_json(const JsonDocument& doc, const Json& obj);

}  // namespace polarbench::io
