#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

#include "entrain/pipeline/session.hpp"
#include "entrain/pipeline/synthetic.hpp"

namespace {

using namespace entrain;
using namespace entrain::pipeline;

struct PipelineFlags {
  std::string manifest;
  std::string out;
  std::uint64_t seed = 1;
  std::string fit_mode = "per-fold";
  std::string methods = "lda,pcs,pca,stdf";
  std::string classifiers = "logistic,svm,nb";
  std::size_t workers = 1;
  bool cache = true;

  PipelineConfig config() const {
    PipelineConfig c;
    c.manifest = manifest;
    c.out = out;
    c.seed = seed;
    c.fit_mode = lda::parse_fit_mode(fit_mode);
    c.methods = parse_methods(methods);
    c.classifiers = parse_classifiers(classifiers);
    c.workers = workers;
    c.cache = cache;
    return c;
  }
};

void add_pipeline_flags(CLI::App* sub, PipelineFlags& f) {
  sub->add_option("--manifest", f.manifest, "Corpus manifest (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "Output directory")->required();
  sub->add_option("--seed", f.seed, "Seed for shams, proximity draws and synthesis");
  sub->add_option("--fit-mode", f.fit_mode, "LDA fitting: per-fold or global")
      ->check(CLI::IsMember({"per-fold", "global"}));
  sub->add_option("--methods", f.methods, "Comma list from lda,pcs,pca,stdf");
  sub->add_option("--classifiers", f.classifiers, "Comma list from nb,logistic,svm");
  sub->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_flag("--cache,!--no-cache", f.cache, "Reuse feature caches in the output directory");
}

int print_report(const std::filesystem::path& out) {
  const auto doc = nlohmann::json::parse(read_bytes(out / "cv_report.json"));
  std::cout << format_table(accuracy_cells(doc));
  const auto& excluded = doc.at("conversations").at("excluded");
  if (!excluded.empty()) std::cout << excluded.size() << " conversation(s) excluded\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local acoustic-prosodic entrainment toolkit"};
  app.require_subcommand(1);

  PipelineFlags flags;
  std::map<CLI::App*, Stage> stages;
  const std::vector<std::tuple<const char*, Stage, const char*>> stage_commands{
      {"ingest", Stage::Ingest, "Load audio and annotations, write the utterance audit"},
      {"features", Stage::Features, "Extract per-utterance features"},
      {"sham", Stage::Sham, "Build sham conversations"},
      {"entrain", Stage::Entrain, "Fit LDA projections and write entrainment vectors"},
      {"baselines", Stage::Baselines, "Compute baseline entrainment measures"},
      {"classify", Stage::Classify, "Leave-one-out classification and report"},
      {"run", Stage::Classify, "Whole pipeline, then print the report table"}};
  CLI::App* run_cmd = nullptr;
  for (const auto& [name, stage, help] : stage_commands) {
    auto* sub = app.add_subcommand(name, help);
    add_pipeline_flags(sub, flags);
    stages[sub] = stage;
    if (std::string(name) == "run") run_cmd = sub;
  }

  std::string report_out;
  auto* report = app.add_subcommand("report", "Print the accuracy table of a finished run");
  report->add_option("--out", report_out, "Output directory of a finished run")->required();

  SyntheticSpec spec;
  std::string synth_out, label_rule = "threshold";
  std::uint64_t synth_seed = 1;
  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus with a manifest");
  synth->add_option("--out", synth_out, "Corpus directory")->required();
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--conversations", spec.n_conversations, "Number of conversations (>= 4)");
  synth->add_option("--turns", spec.turns_per_speaker, "Turns per speaker");
  synth->add_option("--alpha-low", spec.alpha_low, "Entrainment strength of even conversations");
  synth->add_option("--alpha-high", spec.alpha_high, "Entrainment strength of odd conversations");
  synth->add_option("--noise", spec.noise_scale, "Noise scale added to the responding speaker");
  synth->add_option("--persistence", spec.persistence, "Lag-one autocorrelation of each speaker's process");
  synth->add_option("--threshold", spec.threshold, "Alpha above which a conversation is labelled high");
  synth->add_option("--label-rule", label_rule, "threshold or alternating")
      ->check(CLI::IsMember({"threshold", "alternating"}));
  synth->add_flag("--audio", spec.audio, "Write audio and annotations instead of feature caches");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*report) return print_report(report_out);
    if (*synth) {
      spec.label_rule = parse_label_rule(label_rule);
      const auto m = write_synthetic_corpus(spec, synth_seed, synth_out);
      std::cout << "wrote " << m.dyads.size() << " conversations to "
                << (std::filesystem::path(synth_out) / "manifest.json").string() << '\n';
      return kExitOk;
    }
    for (const auto& [sub, stage] : stages) {
      if (!*sub) continue;
      const auto summary = run_pipeline(flags.config(), stage);
      if (sub == run_cmd) std::cout << format_table(accuracy_cells(summary.reports));
      for (const auto& e : summary.exclusions) {
        std::cerr << "excluded " << e.dyad_id << " at " << e.stage << ": " << e.reason << '\n';
      }
      return summary.exit_code;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
