#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "entrain/error.hpp"

namespace entrain::corpus {

/// One dyad in a corpus manifest. Paths are resolved against the manifest's
/// directory when read. `features` points at a precomputed feature cache
/// (synthetic corpora have no audio).
struct DyadEntry {
  std::string dyad_id;
  std::string audio_a;
  std::string audio_b;
  std::string annotations;
  int differences_found = 0;
  std::string speaker_a = "A";
  std::string speaker_b = "B";
  std::string features;
};

struct Manifest {
  std::vector<DyadEntry> dyads;
};

inline Manifest parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir = {}) {
  const nlohmann::json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("dyads")) throw FormatError("manifest: missing 'dyads'");
    list = &doc.at("dyads");
  }
  if (!list->is_array()) throw FormatError("manifest: 'dyads' must be an array");
  auto resolve = [&](const std::string& p) {
    if (p.empty()) return p;
    const std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path.string() : (base_dir / path).lexically_normal().string();
  };
  Manifest m;
  for (const auto& item : *list) {
    try {
      DyadEntry e;
      e.dyad_id = item.at("dyad_id").get<std::string>();
      e.audio_a = resolve(item.value("audio_a", std::string{}));
      e.audio_b = resolve(item.value("audio_b", std::string{}));
      e.annotations = resolve(item.value("annotations", std::string{}));
      e.differences_found = item.at("differences_found").get<int>();
      e.speaker_a = item.value("speaker_a", std::string("A"));
      e.speaker_b = item.value("speaker_b", std::string("B"));
      e.features = resolve(item.value("features", std::string{}));
      if (e.features.empty() && (e.audio_a.empty() || e.audio_b.empty() || e.annotations.empty())) {
        throw FormatError("dyad '" + e.dyad_id + "' needs audio_a, audio_b and annotations");
      }
      m.dyads.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError(std::string("manifest: ") + ex.what());
    }
  }
  return m;
}

inline Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open manifest " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError("manifest " + path.string() + ": " + ex.what());
  }
  return parse_manifest(doc, path.parent_path());
}

/// Serializes with paths written as given (callers pass manifest-relative
/// paths when the corpus should be relocatable).
inline nlohmann::json to_json(const Manifest& m) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : m.dyads) {
    nlohmann::json item{{"dyad_id", e.dyad_id}, {"differences_found", e.differences_found}};
    if (!e.audio_a.empty()) item["audio_a"] = e.audio_a;
    if (!e.audio_b.empty()) item["audio_b"] = e.audio_b;
    if (!e.annotations.empty()) item["annotations"] = e.annotations;
    if (e.speaker_a != "A") item["speaker_a"] = e.speaker_a;
    if (e.speaker_b != "B") item["speaker_b"] = e.speaker_b;
    if (!e.features.empty()) item["features"] = e.features;
    list.push_back(std::move(item));
  }
  return nlohmann::json{{"dyads", list}};
}

}  // namespace entrain::corpus
