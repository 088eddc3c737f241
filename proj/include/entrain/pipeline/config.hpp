#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "entrain/error.hpp"
#include "entrain/lda/fit.hpp"
#include "entrain/learn/classifier.hpp"
#include "entrain/rng.hpp"

namespace entrain::pipeline {

/// Conversation-level feature families that feed the classifiers.
enum class Method { Lda, Pcs, Pca, Stdf };

inline constexpr std::array<Method, 4> kAllMethods{Method::Lda, Method::Pcs, Method::Pca, Method::Stdf};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Lda: return "lda";
    case Method::Pcs: return "pcs";
    case Method::Pca: return "pca";
    case Method::Stdf: return "stdf";
  }
  return "lda";
}

inline std::string_view display_name(Method m) {
  switch (m) {
    case Method::Lda: return "LDA";
    case Method::Pcs: return "Prox/Conv/Sync";
    case Method::Pca: return "PCA";
    case Method::Stdf: return "STDF";
  }
  return "";
}

inline Method parse_method(std::string_view s) {
  for (auto m : kAllMethods) {
    if (to_string(m) == s) return m;
  }
  throw ValidationError("unknown method '" + std::string(s) + "' (expected lda, pcs, pca or stdf)");
}

/// Splits "a,b,c"; empty items are rejected.
inline std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    if (item.empty()) throw ValidationError("empty item in list '" + std::string(text) + "'");
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Parses a list and returns it in canonical order without duplicates.
template <typename T, std::size_t N, typename Parse>
std::vector<T> parse_subset(std::string_view text, const std::array<T, N>& all, Parse parse) {
  std::vector<bool> on(N, false);
  for (const auto& item : split_list(text)) {
    const T v = parse(item);
    for (std::size_t i = 0; i < N; ++i) on[i] = on[i] || all[i] == v;
  }
  std::vector<T> out;
  for (std::size_t i = 0; i < N; ++i) {
    if (on[i]) out.push_back(all[i]);
  }
  return out;
}

inline std::vector<Method> parse_methods(std::string_view text) {
  return parse_subset(text, kAllMethods, parse_method);
}

inline std::vector<learn::ClassifierId> parse_classifiers(std::string_view text) {
  return parse_subset(text, learn::kAllClassifiers, learn::parse_classifier);
}

struct PipelineConfig {
  std::filesystem::path manifest;
  std::filesystem::path out;
  std::uint64_t seed = 1;
  lda::FitMode fit_mode = lda::FitMode::PerFold;
  bool cache = true;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  std::vector<learn::ClassifierId> classifiers{learn::kAllClassifiers.begin(), learn::kAllClassifiers.end()};
  std::size_t workers = 1;

  bool runs(Method m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }
};

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

inline std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Everything that can change results. Paths, worker count and caching are
/// left out, so the same corpus and settings always hash alike.
inline nlohmann::json result_settings(const PipelineConfig& c, std::string_view manifest_bytes) {
  nlohmann::json methods = nlohmann::json::array();
  for (auto m : c.methods) methods.push_back(to_string(m));
  nlohmann::json classifiers = nlohmann::json::array();
  for (auto k : c.classifiers) classifiers.push_back(learn::to_string(k));
  return {{"manifest_fnv1a64", hex64(fnv1a64(manifest_bytes))},
          {"seed", c.seed},
          {"fit_mode", lda::to_string(c.fit_mode)},
          {"methods", methods},
          {"classifiers", classifiers}};
}

inline std::string config_hash(const PipelineConfig& c, std::string_view manifest_bytes) {
  return hex64(fnv1a64(result_settings(c, manifest_bytes).dump()));
}

/// Provenance written at the top of every output file.
struct Stamp {
  std::string config_hash;
  std::uint64_t seed = 0;

  std::vector<std::string> lines() const { return {"config " + config_hash, "seed " + std::to_string(seed)}; }
  nlohmann::json json() const { return {{"config_hash", config_hash}, {"seed", seed}}; }
};

}  // namespace entrain::pipeline
