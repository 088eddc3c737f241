#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "entrain/dsp/filterbank.hpp"
#include "entrain/features/ems.hpp"
#include "entrain/features/ltas.hpp"
#include "entrain/features/mfcc_stats.hpp"
#include "entrain/features/phonation.hpp"
#include "entrain/types.hpp"

namespace entrain::features {

inline std::vector<std::string> band_labels() {
  std::vector<std::string> out{"full"};
  for (double c : dsp::kOctaveCenters) out.push_back("oct" + std::to_string(static_cast<int>(c)));
  return out;
}

inline std::vector<std::string> mfcc_dimension_labels() {
  std::vector<std::string> out;
  for (const char* prefix : {"c", "d", "dd"}) {
    for (int i = 0; i < 13; ++i) out.push_back(prefix + std::to_string(i));
  }
  return out;
}

/// The 418 slot names in canonical order.
inline const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    n.reserve(kFeatureDims);
    const auto dims = mfcc_dimension_labels();
    for (auto s : kMfccStatNames) {
      for (const auto& d : dims) n.push_back("mfcc_" + std::string(s) + "_" + d);
    }
    const auto bands = band_labels();
    for (const auto& b : bands) {
      for (auto m : kEmsMetricNames) n.push_back("ems_" + b + "_" + std::string(m));
    }
    for (auto s : kLtasFullStats) n.push_back("ltas_full_" + std::string(s));
    for (std::size_t b = 1; b < bands.size(); ++b) {
      for (auto s : kLtasBandStats) n.push_back("ltas_" + bands[b] + "_" + std::string(s));
    }
    for (auto s : kPhonationNames) n.push_back("phon_" + std::string(s));
    n.push_back("intensity_mean_db");
    return n;
  }();
  return names;
}

inline nlohmann::json feature_names_json() { return nlohmann::json(feature_names()); }

}  // namespace entrain::features
