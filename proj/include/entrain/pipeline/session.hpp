#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "entrain/corpus/conversation_csv.hpp"
#include "entrain/corpus/feature_cache.hpp"
#include "entrain/corpus/impute.hpp"
#include "entrain/corpus/labels.hpp"
#include "entrain/corpus/load.hpp"
#include "entrain/corpus/manifest.hpp"
#include "entrain/features/extract.hpp"
#include "entrain/features/names.hpp"
#include "entrain/pipeline/config.hpp"
#include "entrain/pipeline/report.hpp"
#include "entrain/pipeline/study.hpp"

namespace entrain::pipeline {

enum class Stage { Ingest, Features, Sham, Entrain, Baselines, Classify };

inline std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Features: return "features";
    case Stage::Sham: return "sham";
    case Stage::Entrain: return "entrain";
    case Stage::Baselines: return "baselines";
    case Stage::Classify: return "classify";
  }
  return "classify";
}

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitPartial = 3;

struct RunSummary {
  int exit_code = kExitOk;
  std::size_t conversations = 0;
  std::vector<Exclusion> exclusions;
  std::vector<learn::CvReport> reports;
  std::vector<std::filesystem::path> written;  // relative to the output directory
};

/// Drops utterances of 0.5 s or less, sorts the rest by midpoint and renumbers
/// rows so that source_row matches the row order.
inline corpus::FeatureTable tidy_feature_table(const corpus::FeatureTable& t) {
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < t.utterances.size(); ++r) {
    if (t.utterances[r].duration_s() > corpus::kMinUtteranceSeconds) keep.push_back(r);
  }
  std::stable_sort(keep.begin(), keep.end(),
                   [&](std::size_t a, std::size_t b) { return midpoint_less(t.utterances[a], t.utterances[b]); });
  corpus::FeatureTable out;
  out.names = t.names;
  out.values.resize(static_cast<Eigen::Index>(keep.size()), t.values.cols());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.values.row(static_cast<Eigen::Index>(k)) = t.values.row(static_cast<Eigen::Index>(keep[k]));
    auto u = t.utterances[keep[k]];
    u.source_row = k;
    out.utterances.push_back(std::move(u));
  }
  return out;
}

inline std::string label_text(SuccessLabel l) { return std::string(to_string(l)); }

/// Free text made safe for one CSV field.
inline std::string csv_text(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

inline void check_dyad_id(const std::string& id) {
  if (id.empty()) throw ValidationError("empty dyad id");
  for (char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) throw ValidationError("dyad id '" + id + "' may only use letters, digits, '-', '_' and '.'");
  }
  if (id == "." || id == "..") throw ValidationError("dyad id '" + id + "' is reserved");
}

/// File-backed pipeline: manifest in, stamped report bundle out.
class Session {
 public:
  explicit Session(PipelineConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.out.empty()) throw ValidationError("an output directory is required");
    if (cfg_.methods.empty()) throw ValidationError("no methods selected");
    if (cfg_.classifiers.empty()) throw ValidationError("no classifiers selected");
    if (cfg_.workers == 0) throw ValidationError("workers must be at least 1");
    const std::string bytes = read_bytes(cfg_.manifest);
    manifest_ = corpus::read_manifest(cfg_.manifest);
    std::set<std::string> seen;
    for (const auto& d : manifest_.dyads) {
      if (!seen.insert(d.dyad_id).second) throw ValidationError("manifest lists dyad '" + d.dyad_id + "' twice");
    }
    stamp_ = {config_hash(cfg_, bytes), cfg_.seed};
    settings_ = result_settings(cfg_, bytes);
  }

  const Stamp& stamp() const { return stamp_; }

  RunSummary run(Stage upto) {
    RunSummary sum;
    sum.conversations = manifest_.dyads.size();
    auto inputs = load_inputs(upto, sum);
    if (upto >= Stage::Sham) {
      StudyOptions opts;
      opts.seed = cfg_.seed;
      opts.fit_mode = cfg_.fit_mode;
      opts.methods = cfg_.methods;
      opts.classifiers = cfg_.classifiers;
      opts.workers = cfg_.workers;
      Study study(std::move(inputs), opts);
      study.build_shams();
      write_shams(study, sum);
      if (upto >= Stage::Entrain) {
        study.rows();
        write_entrainment(study, sum);
      }
      if (upto >= Stage::Baselines) write_baselines(study, sum);
      for (const auto& e : study.exclusions()) sum.exclusions.push_back(e);
      if (upto >= Stage::Classify) {
        sum.reports = study.classify();
        write_reports(study, sum);
      }
    }
    write_exclusions(sum);
    sum.exit_code = sum.exclusions.empty() ? kExitOk : kExitPartial;
    return sum;
  }

 private:
  static void log(const std::string& msg) {
    static std::mutex m;
    std::lock_guard lock(m);
    std::clog << "entrain: " << msg << std::endl;
  }

  void put(RunSummary& sum, const std::filesystem::path& rel, const std::string& contents) const {
    corpus::csv::write_atomic(cfg_.out / rel, contents);
    sum.written.push_back(rel);
  }

  void put_json(RunSummary& sum, const std::filesystem::path& rel, nlohmann::json doc) const {
    doc["stamp"] = stamp_.json();
    put(sum, rel, doc.dump(2) + "\n");
  }

  std::string csv_header() const {
    std::string s;
    for (const auto& l : stamp_.lines()) s += "# " + l + "\n";
    return s;
  }

  static std::string source_fingerprint(const corpus::DyadEntry& e) {
    std::uint64_t h = fnv1a64(e.dyad_id);
    h = fnv1a64(e.speaker_a + "\x1f" + e.speaker_b, h);
    if (!e.features.empty()) return hex64(fnv1a64(read_bytes(e.features), h));
    for (const auto& p : {e.audio_a, e.audio_b, e.annotations}) h = fnv1a64(read_bytes(p), h);
    return hex64(h);
  }

  std::optional<corpus::FeatureTable> cached_features(const std::filesystem::path& path, const std::string& source,
                                                      const ConversationRecord& rec) const {
    if (!cfg_.cache || !std::filesystem::exists(path)) return std::nullopt;
    try {
      const auto table = corpus::csv::read(path);
      if (std::find(table.comments.begin(), table.comments.end(), "source " + source) == table.comments.end()) {
        return std::nullopt;
      }
      auto t = corpus::parse_feature_table(table, path.string());
      if (t.names != features::feature_names() || t.utterances.size() != rec.utterances.size()) return std::nullopt;
      for (std::size_t i = 0; i < t.utterances.size(); ++i) {
        const auto& a = t.utterances[i];
        const auto& b = rec.utterances[i];
        if (a.speaker_id != b.speaker_id || a.start_s != b.start_s || a.end_s != b.end_s) return std::nullopt;
      }
      return t;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  struct Loaded {
    std::optional<DyadInput> input;
    nlohmann::json audit;
    std::string stage;
    std::string error;
  };

  Loaded load_one(const corpus::DyadEntry& e, Stage upto) const {
    Loaded out;
    out.stage = "ingest";
    try {
      check_dyad_id(e.dyad_id);
      DyadInput in;
      in.dyad_id = e.dyad_id;
      in.label = corpus::assign_label(e.differences_found);
      const std::string source = source_fingerprint(e);
      out.audit = {{"dyad_id", e.dyad_id},
                   {"differences_found", e.differences_found},
                   {"label", label_text(in.label)},
                   {"source", source}};
      corpus::FeatureTable table;
      if (!e.features.empty()) {
        auto raw = corpus::read_feature_cache(e.features);
        const std::size_t before = raw.utterances.size();
        table = tidy_feature_table(raw);
        out.audit["input"] = "features";
        out.audit["utterances"] = table.utterances.size();
        out.audit["dropped_short"] = before - table.utterances.size();
        in.real.utterances = table.utterances;
        in.real.dyad_id = e.dyad_id;
        in.real.differences_found = e.differences_found;
        in.real.validate();
        if (upto >= Stage::Features) {
          out.stage = "features";
          if (table.names != features::feature_names()) {
            throw FormatError(e.features + ": columns are not the 418 standard feature names");
          }
          table.values = corpus::impute_missing(std::move(table.values));
        }
      } else {
        corpus::LoadRequest req;
        req.dyad_id = e.dyad_id;
        req.audio_a = e.audio_a;
        req.audio_b = e.audio_b;
        req.annotations = e.annotations;
        req.speaker_a = e.speaker_a;
        req.speaker_b = e.speaker_b;
        req.differences_found = e.differences_found;
        const auto conv = corpus::load_conversation(req);
        in.real = conv.record;
        in.real.validate();
        out.audit["input"] = "audio";
        out.audit["utterances"] = conv.record.utterances.size();
        nlohmann::json loud = nlohmann::json::array();
        for (const auto& l : conv.loudness) {
          loud.push_back({{"gain", l.gain}, {"peak_limited", l.peak_limited}});
        }
        out.audit["loudness"] = loud;
        if (upto >= Stage::Features) {
          out.stage = "features";
          const auto cache = cfg_.out / "features" / (e.dyad_id + ".csv");
          if (auto hit = cached_features(cache, source, in.real)) {
            table = std::move(*hit);
            log("reused cached features for " + e.dyad_id);
          } else {
            table = features::extract_all(conv);
          }
        }
      }
      in.features = std::move(table.values);
      out.input = std::move(in);
    } catch (const std::exception& ex) {
      out.error = ex.what();
    }
    return out;
  }

  std::vector<DyadInput> load_inputs(Stage upto, RunSummary& sum) {
    const auto n = manifest_.dyads.size();
    log(std::string(upto >= Stage::Features ? "loading and extracting " : "loading ") + std::to_string(n) +
        " conversations");
    std::vector<Loaded> loaded(n);
    features::parallel_for(n, cfg_.workers, [&](std::size_t i) { loaded[i] = load_one(manifest_.dyads[i], upto); });
    std::vector<DyadInput> inputs;
    std::vector<std::string> sources;
    nlohmann::json audits = nlohmann::json::array();
    std::vector<ConversationRecord> reals;
    for (std::size_t i = 0; i < n; ++i) {
      auto& l = loaded[i];
      if (!l.input) {
        sum.exclusions.push_back({manifest_.dyads[i].dyad_id, l.stage, l.error});
        log("excluded " + manifest_.dyads[i].dyad_id + " (" + l.stage + "): " + l.error);
        continue;
      }
      audits.push_back(l.audit);
      reals.push_back(l.input->real);
      sources.push_back(l.audit["source"].get<std::string>());
      inputs.push_back(std::move(*l.input));
    }
    put_json(sum, "ingest.json", {{"conversations", audits}});
    put(sum, "utterances.csv", corpus::format_conversations(reals, stamp_.lines()));
    if (upto >= Stage::Features) {
      for (std::size_t k = 0; k < inputs.size(); ++k) {
        auto lines = stamp_.lines();
        lines.push_back("source " + sources[k]);
        corpus::FeatureTable t{features::feature_names(), inputs[k].real.utterances, inputs[k].features};
        put(sum, std::filesystem::path("features") / (inputs[k].dyad_id + ".csv"), corpus::format_feature_cache(t, lines));
      }
      put_json(sum, "features/names.json", {{"names", features::feature_names()}});
    }
    return inputs;
  }

  void write_shams(Study& study, RunSummary& sum) const {
    std::vector<ConversationRecord> convs;
    for (auto i : study.included()) {
      auto real = study.inputs()[i].real;
      real.dyad_id = study.inputs()[i].dyad_id;
      convs.push_back(real);
      for (const auto& s : study.analysis(i).shams) convs.push_back(s);
    }
    put(sum, "shams.csv", corpus::format_conversations(convs, stamp_.lines()));
  }

  void write_entrainment(Study& study, RunSummary& sum) const {
    const auto& glob = study.global_lda();
    for (const auto& p : glob) {
      put_json(sum, std::filesystem::path("lda") / (std::string(to_string(p.feature_set)) + ".json"), lda::to_json(p));
    }
    if (cfg_.fit_mode == lda::FitMode::PerFold) {
      nlohmann::json folds = nlohmann::json::array();
      for (const auto& f : study.fold_lda()) {
        nlohmann::json models = nlohmann::json::array();
        for (const auto& p : f.projections) {
          models.push_back({{"feature_set", to_string(p.feature_set)},
                            {"eigenvalue", p.eigenvalue},
                            {"epsilon", p.epsilon},
                            {"degenerate", p.degenerate},
                            {"pca_components", p.pca_basis ? p.pca_basis->cols() : 0},
                            {"w", std::vector<double>(p.w.data(), p.w.data() + p.w.size())}});
        }
        folds.push_back({{"held_out", f.held_out}, {"models", models}});
      }
      put_json(sum, "lda/folds.json", {{"fit_mode", "per-fold"}, {"folds", folds}});
    }
    std::string csv = csv_header();
    std::vector<std::string> head{"dyad_id", "label", "projection"};
    for (const auto& n : lda::entrainment_names()) head.push_back(n);
    csv += corpus::csv::join(head) + "\n";
    const auto vecs = study.reported_entrainment();
    for (std::size_t k = 0; k < vecs.size(); ++k) {
      const auto& in = study.inputs()[study.included()[k]];
      csv += in.dyad_id + "," + label_text(in.label) + "," + (vecs[k].second ? "held-out-fold" : "all-data");
      for (double v : vecs[k].first) csv += "," + corpus::csv::format_double(v);
      csv += "\n";
    }
    put(sum, "entrainment.csv", csv);
  }

  template <typename Row>
  void write_table(Study& study, RunSummary& sum, const std::filesystem::path& rel, std::vector<std::string> names,
                   Row row) const {
    std::string csv = csv_header();
    names.insert(names.begin(), {"dyad_id", "label"});
    csv += corpus::csv::join(names) + "\n";
    for (auto i : study.included()) {
      const auto& in = study.inputs()[i];
      csv += in.dyad_id + "," + label_text(in.label) + row(study.analysis(i)) + "\n";
    }
    put(sum, rel, csv);
  }

  void write_baselines(Study& study, RunSummary& sum) const {
    auto fmt = [](const auto& values) {
      std::string s;
      for (double v : values) s += "," + corpus::csv::format_double(v);
      return s;
    };
    auto flags = [](const auto& names, const auto& on) {
      std::string s;
      for (std::size_t k = 0; k < on.size(); ++k) {
        if (on[k]) s += (s.empty() ? "" : ";") + names[k];
      }
      return "," + s;
    };
    if (cfg_.runs(Method::Pcs)) {
      auto names = baselines::prox_conv_sync_names();
      const auto value_names = names;
      names.push_back("flagged");
      write_table(study, sum, "baselines/pcs.csv", names, [&](const DyadAnalysis& a) {
        return fmt(a.pcs->values) + flags(value_names, a.pcs->flagged);
      });
    }
    if (cfg_.runs(Method::Pca)) {
      auto names = baselines::pca_similarity_names();
      const auto value_names = names;
      for (const auto& n : baselines::pca_similarity_mean_names()) names.push_back(n);
      names.push_back("rank_reduced");
      write_table(study, sum, "baselines/pca.csv", names, [&](const DyadAnalysis& a) {
        return fmt(a.pca->values) + fmt(a.pca->half_mean) + flags(value_names, a.pca->rank_reduced);
      });
    }
    if (cfg_.runs(Method::Stdf)) {
      write_table(study, sum, "baselines/stdf_candidates.csv", baselines::stdf_candidate_names(),
                  [&](const DyadAnalysis& a) { return fmt(a.stdf); });
    }
  }

  void write_reports(Study& study, RunSummary& sum) const {
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& r : sum.reports) reports.push_back(learn::to_json(r));
    nlohmann::json label_excluded = nlohmann::json::array();
    for (auto i : study.included()) {
      if (study.inputs()[i].label == SuccessLabel::Excluded) label_excluded.push_back(study.inputs()[i].dyad_id);
    }
    nlohmann::json excluded = nlohmann::json::array();
    for (const auto& e : sum.exclusions) excluded.push_back({{"dyad_id", e.dyad_id}, {"stage", e.stage}, {"reason", e.reason}});
    const nlohmann::json counts{{"manifest", sum.conversations},
                                {"analysed", study.included().size()},
                                {"classified", study.rows().size()},
                                {"shams", sham::kShamsPerDyad * study.included().size()},
                                {"label_excluded", label_excluded},
                                {"excluded", excluded}};
    put_json(sum, "cv_report.json", {{"settings", settings_}, {"conversations", counts}, {"reports", reports}});

    const auto ids = study.row_ids();
    std::string folds = csv_header();
    folds += "method,classifier,dyad_id,truth,predicted,skipped,converged,fitted_rows,held_out_in_fit\n";
    for (const auto& r : sum.reports) {
      for (const auto& f : r.folds) {
        const bool leak = std::find(f.fitted_rows.begin(), f.fitted_rows.end(), f.row) != f.fitted_rows.end();
        folds += r.method + "," + r.classifier + "," + f.dyad_id + "," + std::to_string(f.truth) + "," +
                 (f.predicted ? std::to_string(*f.predicted) : "") + "," + (f.skipped ? "1" : "0") + "," +
                 (f.converged ? "1" : "0") + "," + std::to_string(f.fitted_rows.size()) + "," + (leak ? "1" : "0") +
                 "\n";
      }
    }
    put(sum, "folds.csv", folds);

    if (cfg_.runs(Method::Stdf)) {
      const auto names = baselines::stdf_candidate_names();
      nlohmann::json sel = nlohmann::json::array();
      for (const auto& f : study.stdf_folds()) {
        std::vector<std::string> chosen;
        for (auto c : f.selection.columns) chosen.push_back(names[c]);
        sel.push_back({{"held_out", f.held_out},
                       {"selected", chosen},
                       {"abs_correlation", f.selection.abs_correlation},
                       {"padded", f.selection.padded}});
      }
      put_json(sum, "baselines/stdf_folds.json", {{"folds", sel}});
    }

    std::string txt = csv_header();
    txt += "Leave-one-out accuracy (%) over " + std::to_string(study.rows().size()) + " conversations\n\n";
    txt += format_table(accuracy_cells(sum.reports));
    if (!sum.exclusions.empty()) txt += "\n" + std::to_string(sum.exclusions.size()) + " conversation(s) excluded, see exclusions.csv\n";
    put(sum, "report.txt", txt);
  }

  void write_exclusions(RunSummary& sum) const {
    std::string csv = csv_header() + "dyad_id,stage,reason\n";
    for (const auto& e : sum.exclusions) csv += csv_text(e.dyad_id) + "," + e.stage + "," + csv_text(e.reason) + "\n";
    put(sum, "exclusions.csv", csv);
  }

  PipelineConfig cfg_;
  corpus::Manifest manifest_;
  Stamp stamp_;
  nlohmann::json settings_;
};

inline RunSummary run_pipeline(const PipelineConfig& cfg, Stage upto = Stage::Classify) {
  return Session(cfg).run(upto);
}

}  // namespace entrain::pipeline
