#pragma once

#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "entrain/corpus/csv.hpp"
#include "entrain/types.hpp"

// Audit format for real and sham conversations: one row per utterance.
namespace entrain::corpus {

inline const std::vector<std::string>& conversation_columns() {
  static const std::vector<std::string> cols{"dyad_id",  "kind",  "sham_index", "speaker_id",
                                             "start_s",  "end_s", "midpoint_s", "source_row"};
  return cols;
}

inline std::string format_conversations(const std::vector<ConversationRecord>& convs,
                                        const std::vector<std::string>& stamp = {}) {
  std::ostringstream out;
  for (const auto& s : stamp) out << "# " << s << '\n';
  out << csv::join(conversation_columns()) << '\n';
  for (const auto& c : convs) {
    csv::check_field(c.dyad_id);
    for (const auto& u : c.utterances) {
      csv::check_field(u.speaker_id);
      out << c.dyad_id << ',' << to_string(c.kind) << ',' << (c.sham_index ? std::to_string(*c.sham_index) : "")
          << ',' << u.speaker_id << ',' << csv::format_double(u.start_s) << ',' << csv::format_double(u.end_s)
          << ',' << csv::format_double(u.midpoint_s()) << ',' << u.source_row << '\n';
    }
  }
  return out.str();
}

inline void write_conversations(const std::filesystem::path& path, const std::vector<ConversationRecord>& convs,
                                const std::vector<std::string>& stamp = {}) {
  csv::write_atomic(path, format_conversations(convs, stamp));
}

/// Groups rows back into conversations, preserving first-appearance order.
inline std::vector<ConversationRecord> parse_conversations(const csv::Table& t, const std::string& source) {
  if (t.header != conversation_columns()) throw FormatError(source + ": unexpected conversation header");
  std::vector<ConversationRecord> out;
  std::map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = source + " row " + std::to_string(t.line_numbers[r]);
    const std::string key = row[0] + '\x1f' + row[1] + '\x1f' + row[2];
    auto it = index.find(key);
    if (it == index.end()) {
      ConversationRecord c;
      c.dyad_id = row[0];
      c.kind = parse_conversation_kind(row[1]);
      if (!row[2].empty()) c.sham_index = static_cast<int>(csv::parse_int(row[2], where));
      it = index.emplace(key, out.size()).first;
      out.push_back(std::move(c));
    }
    Utterance u;
    u.speaker_id = row[3];
    u.start_s = csv::parse_double(row[4], where);
    u.end_s = csv::parse_double(row[5], where);
    u.source_row = static_cast<std::size_t>(csv::parse_int(row[7], where));
    out[it->second].utterances.push_back(std::move(u));
  }
  return out;
}

inline std::vector<ConversationRecord> read_conversations(const std::filesystem::path& path) {
  return parse_conversations(csv::read(path), path.string());
}

}  // namespace entrain::corpus
