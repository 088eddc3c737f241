#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "entrain/corpus/csv.hpp"
#include "entrain/error.hpp"
#include "entrain/types.hpp"

namespace entrain::corpus {

/// Per-utterance feature matrix of one conversation, rows in midpoint order.
struct FeatureTable {
  std::vector<std::string> names;
  std::vector<Utterance> utterances;
  Eigen::MatrixXd values;  // utterances x names
};

inline const std::vector<std::string>& cache_key_columns() {
  static const std::vector<std::string> cols{"speaker_id", "start_s", "end_s", "midpoint_s"};
  return cols;
}

/// CSV layout: optional '#' stamp lines, a header of the key columns followed
/// by the feature names, then one row per utterance. Values use the shortest
/// round-trip decimal form, so reading back is bit-exact.
inline std::string format_feature_cache(const FeatureTable& t, const std::vector<std::string>& stamp = {}) {
  if (static_cast<std::size_t>(t.values.rows()) != t.utterances.size() ||
      static_cast<std::size_t>(t.values.cols()) != t.names.size()) {
    throw ValidationError("feature table shape does not match its labels");
  }
  std::ostringstream out;
  for (const auto& s : stamp) out << "# " << s << '\n';
  auto header = cache_key_columns();
  header.insert(header.end(), t.names.begin(), t.names.end());
  out << csv::join(header) << '\n';
  for (std::size_t r = 0; r < t.utterances.size(); ++r) {
    const auto& u = t.utterances[r];
    csv::check_field(u.speaker_id);
    out << u.speaker_id << ',' << csv::format_double(u.start_s) << ',' << csv::format_double(u.end_s) << ','
        << csv::format_double(u.midpoint_s());
    for (Eigen::Index c = 0; c < t.values.cols(); ++c) {
      out << ',' << csv::format_double(t.values(static_cast<Eigen::Index>(r), c));
    }
    out << '\n';
  }
  return out.str();
}

inline void write_feature_cache(const std::filesystem::path& path, const FeatureTable& t,
                                const std::vector<std::string>& stamp = {}) {
  csv::write_atomic(path, format_feature_cache(t, stamp));
}

inline FeatureTable parse_feature_table(const csv::Table& table, const std::string& source) {
  const auto& keys = cache_key_columns();
  if (table.header.size() < keys.size() ||
      !std::equal(keys.begin(), keys.end(), table.header.begin())) {
    throw FormatError(source + ": feature cache must start with speaker_id,start_s,end_s,midpoint_s");
  }
  FeatureTable t;
  t.names.assign(table.header.begin() + static_cast<std::ptrdiff_t>(keys.size()), table.header.end());
  t.values.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(t.names.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = source + " row " + std::to_string(table.line_numbers[r]);
    Utterance u;
    u.speaker_id = row[0];
    u.start_s = csv::parse_double(row[1], where);
    u.end_s = csv::parse_double(row[2], where);
    u.source_row = r;
    for (std::size_t c = 0; c < t.names.size(); ++c) {
      t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          csv::parse_double(row[keys.size() + c], where);
    }
    t.utterances.push_back(std::move(u));
  }
  return t;
}

inline FeatureTable read_feature_cache(const std::filesystem::path& path) {
  return parse_feature_table(csv::read(path), path.string());
}

}  // namespace entrain::corpus
