#pragma once

#include <nlohmann/json.hpp>

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "entrain/learn/loocv.hpp"
#include "entrain/pipeline/config.hpp"

namespace entrain::pipeline {

struct AccuracyCell {
  std::string method;
  std::string classifier;
  double accuracy = 0.0;
};

inline std::vector<AccuracyCell> accuracy_cells(const std::vector<learn::CvReport>& reports) {
  std::vector<AccuracyCell> out;
  for (const auto& r : reports) out.push_back({r.method, r.classifier, r.accuracy});
  return out;
}

/// Reads the cells back from a cv_report.json document.
inline std::vector<AccuracyCell> accuracy_cells(const nlohmann::json& doc) {
  std::vector<AccuracyCell> out;
  try {
    for (const auto& r : doc.at("reports")) {
      out.push_back({r.at("method").get<std::string>(), r.at("classifier").get<std::string>(),
                     r.at("accuracy").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("cv report: ") + e.what());
  }
  return out;
}

/// Methods down, classifiers across, accuracies in percent with two decimals.
inline std::string format_table(const std::vector<AccuracyCell>& cells) {
  std::map<std::pair<std::string, std::string>, double> acc;
  for (const auto& c : cells) acc[{c.method, c.classifier}] = c.accuracy;
  auto has = [&](auto pred) {
    for (const auto& c : cells) {
      if (pred(c)) return true;
    }
    return false;
  };
  std::vector<Method> methods;
  for (auto m : kAllMethods) {
    if (has([&](const AccuracyCell& c) { return c.method == to_string(m); })) methods.push_back(m);
  }
  std::vector<learn::ClassifierId> classifiers;
  for (auto k : learn::kAllClassifiers) {
    if (has([&](const AccuracyCell& c) { return c.classifier == learn::to_string(k); })) classifiers.push_back(k);
  }
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-16s", "Entrainment");
  out += buf;
  for (auto k : classifiers) {
    std::snprintf(buf, sizeof buf, "%13s", std::string(learn::display_name(k)).c_str());
    out += buf;
  }
  out += '\n';
  for (auto m : methods) {
    std::snprintf(buf, sizeof buf, "%-16s", std::string(display_name(m)).c_str());
    out += buf;
    for (auto k : classifiers) {
      const auto it = acc.find({std::string(to_string(m)), std::string(learn::to_string(k))});
      if (it == acc.end()) {
        std::snprintf(buf, sizeof buf, "%13s", "-");
      } else {
        std::snprintf(buf, sizeof buf, "%13.2f", it->second);
      }
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace entrain::pipeline
