// forge: command-line driver for the dataset pipeline and its stages.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "forge/consistency.hpp"
#include "forge/error.hpp"
#include "forge/ingest.hpp"
#include "forge/pipeline.hpp"
#include "forge/records.hpp"
#include "forge/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::string langs;
};

void add_common(CLI::App* app, Common& c, bool out_required = true) {
  app->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  auto* o = app->add_option("--out", c.out, "output directory");
  if (out_required) o->required();
  app->add_option("--seed", c.seed, "seed for every stochastic step");
  app->add_option("--jobs", c.jobs, "worker threads");
  app->add_option("--langs", c.langs, "comma-separated languages");
}

// Config file first, then command-line overrides.
forge::PipelineConfig make_config(const Common& c) {
  auto cfg = c.config.empty() ? forge::PipelineConfig{} : forge::PipelineConfig::load(c.config);
  if (!c.out.empty()) cfg.out = c.out;
  if (c.seed) cfg.seed = *c.seed;
  if (c.jobs) cfg.jobs = *c.jobs;
  if (!c.langs.empty()) cfg.languages = forge::parse_language_list(c.langs);
  if (cfg.jobs == 0) cfg.jobs = 1;
  if (cfg.languages.empty()) throw forge::ConfigError("language set is empty");
  cfg.minhash.seed = cfg.seed;
  cfg.split.seed = cfg.seed;
  return cfg;
}

void print_report(const forge::StageReport& r) { std::cout << r.to_json().dump(2) << '\n'; }

fs::path in_dir_file(const std::string& dir, const char* name) {
  const auto p = fs::path(dir) / name;
  if (!fs::exists(p)) throw forge::ConfigError("missing input " + p.string());
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forge: build code-text datasets from source trees"};
  app.require_subcommand(1);

  // pipeline
  Common pc;
  std::vector<std::string> p_roots, p_holdouts;
  bool p_no_resume = false, p_exact = false, p_fail_open = false;
  std::string p_backend, p_sidecar;
  auto* pipeline = app.add_subcommand("pipeline", "run every stage end to end");
  add_common(pipeline, pc, false);
  pipeline->add_option("roots", p_roots, "corpus roots (one directory per repo below each)");
  pipeline->add_option("--holdout", p_holdouts, "holdout JSONL for leakage dedup");
  pipeline->add_flag("--no-resume", p_no_resume, "ignore stage markers and rerun everything");
  pipeline->add_flag("--exact-confirm", p_exact, "confirm LSH candidates by exact Jaccard");
  pipeline->add_option("--backend", p_backend, "consistency scorer: baseline or sidecar");
  pipeline->add_option("--sidecar-cmd", p_sidecar, "scorer command line");
  pipeline->add_flag("--fail-open", p_fail_open, "keep pairs when the sidecar is unavailable");

  // extract
  Common ec;
  std::vector<std::string> e_roots;
  std::string e_dump_raw;
  auto* extract = app.add_subcommand("extract", "ingest and extract units and inline comments");
  add_common(extract, ec);
  extract->add_option("roots", e_roots, "corpus roots")->required();
  extract->add_option("--dump-raw", e_dump_raw, "write {repo,path,language,content_hash} lines");

  // clean
  Common cc;
  std::string c_in;
  auto* clean = app.add_subcommand("clean", "parse docstrings and apply the rule filters");
  add_common(clean, cc);
  clean->add_option("--in", c_in, "directory written by `forge extract`")->required();

  // score
  Common sc;
  std::string s_input, s_backend, s_sidecar, s_export;
  bool s_auc = false, s_fail_open = false;
  std::optional<double> s_threshold;
  auto* score = app.add_subcommand("score", "consistency gate over paired records");
  add_common(score, sc);
  score->add_option("--input", s_input, "paired records JSONL")->required()->check(CLI::ExistingFile);
  score->add_option("--backend", s_backend, "baseline or sidecar");
  score->add_option("--sidecar-cmd", s_sidecar, "scorer command line");
  score->add_option("--threshold", s_threshold, "keep when score >= threshold");
  score->add_flag("--fail-open", s_fail_open, "keep pairs when the sidecar is unavailable");
  score->add_flag("--auc", s_auc, "also report AUC against shuffled negatives");
  score->add_option("--export-training", s_export, "write classifier training splits here");

  // dedup
  Common dc;
  std::string d_input;
  std::vector<std::string> d_holdouts;
  bool d_exact = false;
  auto* dedup = app.add_subcommand("dedup", "MinHash LSH leakage check against holdouts");
  add_common(dedup, dc);
  dedup->add_option("--input", d_input, "paired records JSONL")->required()->check(CLI::ExistingFile);
  dedup->add_option("--holdout", d_holdouts, "holdout JSONL")->required();
  dedup->add_flag("--exact-confirm", d_exact, "confirm candidates by exact Jaccard");

  // split
  Common spc;
  std::string sp_input, sp_excluded;
  auto* split = app.add_subcommand("split", "repo-disjoint train/valid/test split");
  add_common(split, spc);
  split->add_option("--input", sp_input, "paired records JSONL")->required()->check(CLI::ExistingFile);
  split->add_option("--excluded", sp_excluded, "excluded.jsonl from `forge dedup`");

  // stats
  Common stc;
  std::vector<std::string> st_files;
  auto* stats = app.add_subcommand("stats", "per-language dataset statistics");
  add_common(stats, stc);
  stats->add_option("files", st_files, "dataset JSONL files")->required();

  // export-holdout
  Common hc;
  std::string h_input, h_lang;
  std::map<std::string, std::string> h_map{{"key", "key"}, {"code", "code"}};
  std::vector<std::string> h_map_args;
  auto* holdout = app.add_subcommand("export-holdout", "benchmark JSONL to dedup holdout format");
  add_common(holdout, hc);
  holdout->add_option("--input", h_input, "benchmark JSONL")->required()->check(CLI::ExistingFile);
  holdout->add_option("--map", h_map_args, "target=source field mapping (key, code, language)");
  holdout->add_option("--lang", h_lang, "language of every problem when not mapped");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(forge::ExitCode::kConfigError);
  }

  try {
    if (pipeline->parsed()) {
      auto cfg = make_config(pc);
      for (const auto& r : p_roots) cfg.roots.emplace_back(r);
      for (const auto& h : p_holdouts) cfg.holdouts.emplace_back(h);
      if (p_no_resume) cfg.resume = false;
      if (p_exact) cfg.minhash.exact_confirm = true;
      if (!p_backend.empty()) {
        const auto b = forge::parse_backend(p_backend);
        if (!b) throw forge::ConfigError("unknown backend " + p_backend);
        cfg.gate.backend = *b;
      }
      if (!p_sidecar.empty()) cfg.gate.sidecar_command = p_sidecar;
      if (p_fail_open) cfg.gate.fail_open = true;
      const auto result = forge::run_pipeline(cfg);
      std::cout << result.manifest["totals"].dump(2) << '\n';
    } else if (extract->parsed()) {
      auto cfg = make_config(ec);
      for (const auto& r : e_roots) cfg.roots.emplace_back(r);
      const fs::path out(cfg.out);
      const auto raw = forge::run_ingest(cfg, out / "raw.jsonl");
      print_report(raw);
      if (!e_dump_raw.empty()) {
        std::ofstream dump(e_dump_raw, std::ios::binary);
        forge::read_jsonl(out / "raw.jsonl", [&](const json& j) {
          dump << forge::dump_line({{"repo", j["repo"]},
                                    {"path", j["path"]},
                                    {"language", j["language"]},
                                    {"content_hash", j["content_hash"]}})
               << '\n';
        });
      }
      print_report(forge::run_extract(out / "raw.jsonl", cfg.extract, cfg.jobs,
                                      out / "units.jsonl", out / "blocks.jsonl"));
    } else if (clean->parsed()) {
      const auto cfg = make_config(cc);
      const fs::path out(cfg.out);
      const auto units = in_dir_file(c_in, "units.jsonl");
      const auto blocks = in_dir_file(c_in, "blocks.jsonl");
      print_report(forge::run_docstring_parse(units, cfg.jobs, out / "metadata.jsonl"));
      forge::FilterOutputs fo{out / "pairs_filtered.jsonl", out / "D_unimodal.jsonl",
                              out / "D_block.jsonl",        out / "filter_traces.jsonl",
                              out / "filter_report.csv",    out / "filter_report.json"};
      print_report(forge::run_rule_filter(units, out / "metadata.jsonl", blocks, cfg.filters,
                                          cfg.jobs, fo));
    } else if (score->parsed()) {
      auto cfg = make_config(sc);
      if (!s_backend.empty()) {
        const auto b = forge::parse_backend(s_backend);
        if (!b) throw forge::ConfigError("unknown backend " + s_backend);
        cfg.gate.backend = *b;
      }
      if (!s_sidecar.empty()) cfg.gate.sidecar_command = s_sidecar;
      if (s_threshold) cfg.gate.threshold = *s_threshold;
      if (s_fail_open) cfg.gate.fail_open = true;
      cfg.gate.validate();
      const fs::path out(cfg.out);
      print_report(forge::run_gate(s_input, cfg.gate, cfg.jobs, out / "pairs_gated.jsonl",
                                   out / "gate_scores.jsonl"));
      if (s_auc || !s_export.empty()) {
        std::vector<forge::PairInput> pairs;
        forge::read_jsonl(s_input, [&](const json& j) {
          pairs.push_back({j.at("key").get<std::string>(), forge::code_token_text(j),
                           j.at("docstring").get<std::string>(),
                           *forge::parse_language(j.at("language").get<std::string>())});
        });
        std::vector<std::string> warnings;
        if (s_auc) {
          const auto labeled =
              forge::generate_negatives(pairs, cfg.seed, cfg.gate.negative_ratio, &warnings);
          std::vector<double> scores;
          std::vector<int> labels;
          for (const auto& p : labeled) {
            scores.push_back(forge::baseline_score(p.code, p.docstring));
            labels.push_back(p.label);
          }
          std::cout << json{{"auc", forge::evaluate_auc(scores, labels)},
                            {"pairs", labeled.size()}}
                           .dump()
                    << '\n';
        }
        if (!s_export.empty())
          forge::write_training_export(
              forge::build_training_export(pairs, cfg.gate, cfg.seed, &warnings), s_export);
        for (const auto& w : warnings) std::cerr << "score: " << w << '\n';
      }
    } else if (dedup->parsed()) {
      auto cfg = make_config(dc);
      if (d_exact) cfg.minhash.exact_confirm = true;
      cfg.minhash.validate();
      std::vector<fs::path> holdouts(d_holdouts.begin(), d_holdouts.end());
      const fs::path out(cfg.out);
      print_report(forge::run_dedup(d_input, holdouts, cfg.minhash, cfg.jobs,
                                    out / "dedup_report.jsonl", out / "excluded.jsonl"));
    } else if (split->parsed()) {
      auto cfg = make_config(spc);
      cfg.split.validate();
      const fs::path out(cfg.out);
      fs::path excluded = sp_excluded;
      if (excluded.empty()) {
        excluded = out / "excluded.empty.jsonl";
        forge::write_text_file(excluded, "");
      }
      print_report(forge::run_split(sp_input, excluded, cfg.split, cfg.subset_fractions,
                                    out / "split_manifest.jsonl", out / "D_paired.jsonl"));
    } else if (stats->parsed()) {
      make_config(stc);
      const fs::path out(stc.out);
      std::vector<fs::path> files(st_files.begin(), st_files.end());
      const auto st = forge::compute_stats(files, -1.0);
      forge::write_text_file(out / "stats.json", st.to_json().dump(2) + "\n");
      forge::write_text_file(out / "stats.csv", st.to_csv());
      std::cout << st.to_csv();
      if (st.malformed_fraction() > 0.01)
        throw forge::DataQualityError(std::to_string(st.malformed) + " of " +
                                      std::to_string(st.lines) + " lines malformed");
    } else if (holdout->parsed()) {
      make_config(hc);
      for (const auto& m : h_map_args) {
        const auto eq = m.find('=');
        if (eq == std::string::npos) throw forge::ConfigError("--map expects target=source");
        h_map[m.substr(0, eq)] = m.substr(eq + 1);
      }
      std::optional<forge::LanguageId> lang;
      if (!h_lang.empty()) {
        lang = forge::parse_language(h_lang);
        if (!lang) throw forge::ConfigError("unknown language " + h_lang);
      }
      const auto n =
          forge::export_holdout(h_input, h_map, lang, fs::path(hc.out) / "holdout.jsonl");
      std::cout << n << " holdout records\n";
    }
  } catch (const forge::Error& e) {
    std::cerr << "forge: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "forge: " << e.what() << '\n';
    return static_cast<int>(forge::ExitCode::kStageFailure);
  }
  return 0;
}
