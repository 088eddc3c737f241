#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "entrain/corpus/csv.hpp"
#include "entrain/error.hpp"
#include "entrain/types.hpp"

namespace entrain::corpus {

/// Utterances at or below this duration are dropped before analysis.
inline constexpr double kMinUtteranceSeconds = 0.5;

/// Parses `speaker_id,start_s,end_s` rows. Every speaker must be one of
/// `known_speakers`; rows keep file order.
inline std::vector<Utterance> parse_annotations(std::istream& in, const std::vector<std::string>& known_speakers,
                                                const std::string& source = "annotations") {
  const auto table = csv::parse(in, source);
  if (table.header != std::vector<std::string>{"speaker_id", "start_s", "end_s"}) {
    throw FormatError(source + ": header must be 'speaker_id,start_s,end_s'");
  }
  std::vector<Utterance> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = source + " row " + std::to_string(table.line_numbers[i]);
    Utterance u;
    u.speaker_id = row[0];
    u.start_s = csv::parse_double(row[1], where);
    u.end_s = csv::parse_double(row[2], where);
    if (!std::isfinite(u.start_s) || !std::isfinite(u.end_s) || u.start_s < 0.0) {
      throw ValidationError(where + ": times must be finite and non-negative");
    }
    if (!(u.end_s > u.start_s)) throw ValidationError(where + ": end_s must exceed start_s");
    if (std::find(known_speakers.begin(), known_speakers.end(), u.speaker_id) == known_speakers.end()) {
      throw ValidationError(where + ": unknown speaker id '" + u.speaker_id + "'");
    }
    out.push_back(std::move(u));
  }
  return out;
}

inline std::vector<Utterance> read_annotations(const std::filesystem::path& path,
                                               const std::vector<std::string>& known_speakers) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return parse_annotations(in, known_speakers, path.string());
}

/// Drops utterances of 0.5 s or less, sorts by midpoint and numbers the
/// survivors' feature rows in that order.
inline std::vector<Utterance> prepare_utterances(std::vector<Utterance> raw,
                                                 double min_duration_s = kMinUtteranceSeconds) {
  std::erase_if(raw, [&](const Utterance& u) { return u.duration_s() <= min_duration_s; });
  sort_by_midpoint(raw);
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i].source_row = i;
  return raw;
}

inline std::string format_annotations(const std::vector<Utterance>& utterances) {
  std::ostringstream out;
  out << "speaker_id,start_s,end_s\n";
  for (const auto& u : utterances) {
    csv::check_field(u.speaker_id);
    out << u.speaker_id << ',' << csv::format_double(u.start_s) << ',' << csv::format_double(u.end_s) << '\n';
  }
  return out.str();
}

}  // namespace entrain::corpus
