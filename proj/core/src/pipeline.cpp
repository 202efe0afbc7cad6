#include "forge/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "forge/docstring.hpp"
#include "forge/error.hpp"
#include "forge/hash.hpp"
#include "forge/ingest.hpp"
#include "forge/parallel.hpp"
#include "forge/records.hpp"
#include "forge/sidecar.hpp"
#include "forge/stats.hpp"
#include "forge/tokenize.hpp"

namespace forge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  return p.is_relative() && !base.empty() ? base / p : p;
}

std::vector<fs::path> path_list(const json& v, const fs::path& base, const char* what) {
  std::vector<fs::path> out;
  if (v.is_string()) {
    out.push_back(resolve(v.get<std::string>(), base));
    return out;
  }
  if (!v.is_array()) throw ConfigError(std::string(what) + ": expected a list of paths");
  for (const auto& e : v) out.push_back(resolve(e.get<std::string>(), base));
  return out;
}

json path_json(const std::vector<fs::path>& paths) {
  json a = json::array();
  for (const auto& p : paths) a.push_back(p.generic_string());
  return a;
}

// Reads JSONL, failing the stage on any malformed line. Intermediates are
// written by this program, so a bad line means corruption.
void read_strict(const fs::path& path, const std::string& stage,
                 const std::function<void(const json&)>& fn) {
  const auto st = read_jsonl(path, fn);
  if (st.malformed > 0)
    throw StageError(stage, std::to_string(st.malformed) + " malformed lines in " +
                                path.string());
}

std::vector<ExtractedUnit> read_units(const fs::path& path, const std::string& stage) {
  std::vector<ExtractedUnit> units;
  read_strict(path, stage, [&](const json& j) { units.push_back(unit_from_json(j)); });
  return units;
}

std::vector<json> read_records(const fs::path& path, const std::string& stage) {
  std::vector<json> out;
  read_strict(path, stage, [&](const json& j) { out.push_back(j); });
  return out;
}

}  // namespace

// ---------------------------------------------------------------- config

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base) {
  PipelineConfig c;
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& k = it.key();
      const auto& v = it.value();
      if (k == "roots") c.roots = path_list(v, base, "roots");
      else if (k == "manifests") c.manifests = path_list(v, base, "manifests");
      else if (k == "languages") {
        if (v.is_string()) {
          c.languages = parse_language_list(v.get<std::string>());
        } else {
          c.languages.clear();
          for (const auto& e : v) {
            const auto l = parse_language(e.get<std::string>());
            if (!l) throw ConfigError("config: unknown language " + e.dump());
            c.languages.insert(*l);
          }
        }
      } else if (k == "max_file_bytes") c.max_file_bytes = v.get<std::uintmax_t>();
      else if (k == "max_class_tokens") c.extract.max_class_tokens = v.get<std::size_t>();
      else if (k == "filters") {
        c.filters = v.is_string() ? FilterConfig::load(resolve(v.get<std::string>(), base))
                                  : FilterConfig::from_json(v);
      } else if (k == "gate") {
        json g = v;
        if (g.is_object() && g.contains("enabled")) {
          c.gate_enabled = g["enabled"].get<bool>();
          g.erase("enabled");
        }
        c.gate = GateConfig::from_json(g);
      } else if (k == "export_training") c.export_training = v.get<bool>();
      else if (k == "holdouts") c.holdouts = path_list(v, base, "holdouts");
      else if (k == "dedup") c.minhash = MinHashParams::from_json(v);
      else if (k == "split") {
        for (auto s = v.begin(); s != v.end(); ++s) {
          if (s.key() == "ratios") {
            if (!s.value().is_array() || s.value().size() != 3)
              throw ConfigError("split: ratios needs 3 entries");
            for (std::size_t i = 0; i < 3; ++i) c.split.ratios[i] = s.value()[i].get<double>();
          } else if (s.key() == "ks_target") c.split.ks_target = s.value().get<double>();
          else if (s.key() == "max_swaps") c.split.max_swaps = s.value().get<std::size_t>();
          else throw ConfigError("split config: unknown key " + s.key());
        }
      } else if (k == "subsets") {
        if (!v.is_array() || v.size() != 2) throw ConfigError("subsets: needs 2 fractions");
        c.subset_fractions = {v[0].get<double>(), v[1].get<double>()};
      } else if (k == "out") c.out = resolve(v.get<std::string>(), base);
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "jobs") c.jobs = v.get<std::size_t>();
      else if (k == "resume") c.resume = v.get<bool>();
      else throw ConfigError("config: unknown key " + k);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  const auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config " + path.string() + " is not valid JSON");
  return from_json(j, path.parent_path());
}

void PipelineConfig::validate() {
  if (languages.empty()) throw ConfigError("config: language set is empty");
  if (roots.empty() && manifests.empty()) throw ConfigError("config: no corpus roots");
  if (out.empty()) throw ConfigError("config: no output directory");
  if (jobs == 0) jobs = 1;
  gate.validate();
  if (gate_enabled && gate.backend == ScoreBackend::kSidecar && gate.sidecar_command.empty())
    throw ConfigError("gate: sidecar backend needs sidecar_command");
  minhash.seed = seed;
  minhash.validate();
  split.seed = seed;
  split.validate();
  if (!(subset_fractions[0] > 0.0 && subset_fractions[0] <= subset_fractions[1] &&
        subset_fractions[1] <= 1.0))
    throw ConfigError("subsets: need 0 < small <= medium <= 1");
}

json PipelineConfig::to_json() const {
  json langs = json::array();
  for (auto l : languages) langs.push_back(std::string(language_name(l)));
  json gate_json = gate.to_json();
  gate_json["enabled"] = gate_enabled;
  return {{"roots", path_json(roots)},
          {"manifests", path_json(manifests)},
          {"languages", langs},
          {"max_file_bytes", max_file_bytes},
          {"max_class_tokens", extract.max_class_tokens},
          {"filters", filters.to_json()},
          {"gate", gate_json},
          {"export_training", export_training},
          {"holdouts", path_json(holdouts)},
          {"dedup", minhash.to_json()},
          {"split",
           {{"ratios", split.ratios},
            {"ks_target", split.ks_target},
            {"max_swaps", split.max_swaps}}},
          {"subsets", subset_fractions},
          {"seed", seed}};
}

// ---------------------------------------------------------------- reports

bool StreamCount::balanced() const {
  std::size_t d = 0;
  for (const auto& [_, n] : dropped) d += n;
  return in == out + d;
}

json StreamCount::to_json() const {
  return {{"in", in}, {"out", out}, {"dropped", dropped}};
}

StreamCount StreamCount::from_json(const json& j) {
  StreamCount s;
  s.in = j.at("in").get<std::size_t>();
  s.out = j.at("out").get<std::size_t>();
  s.dropped = j.at("dropped").get<std::map<std::string, std::size_t>>();
  return s;
}

json StageReport::to_json() const {
  json streams_json = json::object();
  for (const auto& [k, s] : streams) streams_json[k] = s.to_json();
  return {{"stage", name}, {"streams", streams_json}, {"extra", extra}};
}

StageReport StageReport::from_json(const json& j) {
  StageReport r;
  r.name = j.at("stage").get<std::string>();
  for (const auto& [k, v] : j.at("streams").items()) r.streams[k] = StreamCount::from_json(v);
  r.extra = j.at("extra");
  return r;
}

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StageError("io", "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return hex64(fnv1a64(ss.str()));
}

// ---------------------------------------------------------------- stages

StageReport run_ingest(const PipelineConfig& cfg, const fs::path& raw_out) {
  ScanOptions opts;
  opts.include_langs = cfg.languages;
  opts.max_file_bytes = cfg.max_file_bytes;
  opts.manifests = cfg.manifests;
  JsonlWriter w(raw_out);
  const auto st = scan_corpus(cfg.roots, opts, [&](RawSourceFile&& f) {
    w.write({{"schema", kSchemaVersion},
             {"repo", f.repo_id},
             {"path", f.rel_path},
             {"language", std::string(language_name(f.language))},
             {"content", f.content},
             {"content_hash", hex64(f.content_hash)}});
  });
  w.commit();
  for (const auto& line : st.skip_log) std::cerr << "ingest: skipped " << line << '\n';
  StageReport r{"ingest", {}, json::object()};
  auto& files = r.streams["files"];
  files.in = st.matched;
  files.out = st.emitted;
  files.dropped = {{"unreadable", st.skipped_unreadable},
                   {"too-large", st.skipped_too_large},
                   {"undecodable", st.skipped_undecodable}};
  return r;
}

StageReport run_extract(const fs::path& raw_in, const ExtractOptions& options,
                        std::size_t jobs, const fs::path& units_out,
                        const fs::path& blocks_out) {
  std::vector<RawSourceFile> files;
  read_strict(raw_in, "extract", [&](const json& j) {
    RawSourceFile f;
    f.repo_id = j.at("repo").get<std::string>();
    f.rel_path = j.at("path").get<std::string>();
    const auto lang = parse_language(j.at("language").get<std::string>());
    if (!lang) throw std::runtime_error("bad language");
    f.language = *lang;
    f.content = j.at("content").get<std::string>();
    f.content_hash = std::stoull(j.at("content_hash").get<std::string>(), nullptr, 16);
    files.push_back(std::move(f));
  });

  struct FileResult {
    bool rejected = false;
    std::string reason;
    std::vector<std::string> units, blocks;
    std::vector<DroppedUnit> dropped;
    std::size_t with_doc = 0, fallback = 0;
  };
  std::vector<FileResult> results(files.size());
  parallel_for(files.size(), jobs, [&](std::size_t i) {
    auto& res = results[i];
    auto parsed = parse_file(files[i]);
    if (parsed.rejected) {
      res.rejected = true;
      res.reason = parsed.reason;
      return;
    }
    for (const auto& u : extract_units(parsed.tree, files[i], options, &res.dropped)) {
      res.with_doc += u.docstring_raw ? 1 : 0;
      res.fallback += u.token_fallback ? 1 : 0;
      res.units.push_back(dump_line(unit_to_json(u)));
    }
    for (const auto& b : extract_inline_blocks(parsed.tree, files[i]))
      res.blocks.push_back(dump_line(inline_to_json(b)));
  });

  StageReport r{"extract", {}, json::object()};
  auto& fc = r.streams["files"];
  auto& uc = r.streams["units"];
  auto& bc = r.streams["blocks"];
  fc.dropped["parse-failure"] = 0;
  uc.dropped["class-token-limit"] = 0;
  std::size_t with_doc = 0, fallback = 0;
  JsonlWriter uw(units_out), bw(blocks_out);
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto& res = results[i];
    ++fc.in;
    if (res.rejected) {
      ++fc.dropped["parse-failure"];
      std::cerr << "extract: rejected " << files[i].repo_id << '/' << files[i].rel_path << ": "
                << res.reason << '\n';
      continue;
    }
    ++fc.out;
    for (const auto& line : res.units) uw.write_raw(line);
    for (const auto& line : res.blocks) bw.write_raw(line);
    uc.in += res.units.size() + res.dropped.size();
    uc.out += res.units.size();
    for (const auto& d : res.dropped) ++uc.dropped[d.reason];
    bc.in += res.blocks.size();
    bc.out += res.blocks.size();
    with_doc += res.with_doc;
    fallback += res.fallback;
  }
  uw.commit();
  bw.commit();
  r.extra = {{"units_with_docstring", with_doc}, {"token_fallback", fallback}};
  return r;
}

StageReport run_docstring_parse(const fs::path& units_in, std::size_t jobs,
                                const fs::path& metadata_out) {
  const auto units = read_units(units_in, "docstring-parse");
  std::vector<std::optional<std::pair<StyleId, std::string>>> lines(units.size());
  parallel_for(units.size(), jobs, [&](std::size_t i) {
    const auto& u = units[i];
    if (!u.docstring_raw) return;
    const auto text = apply_update_filter(FilterId::kStripDelimiters, *u.docstring_raw);
    const auto style = detect_style(text, u.language);
    const auto md = parse_metadata(text, style);
    lines[i].emplace(style, dump_line({{"schema", kSchemaVersion},
                                       {"key", u.key()},
                                       {"docstring_params", metadata_to_json(md)}}));
  });
  StageReport r{"docstring-parse", {}, json::object()};
  auto& s = r.streams["units"];
  std::map<std::string, std::size_t> styles;
  std::size_t with_doc = 0;
  JsonlWriter w(metadata_out);
  for (const auto& l : lines) {
    ++s.in;
    ++s.out;
    if (!l) continue;
    ++with_doc;
    ++styles[std::string(style_name(l->first))];
    w.write_raw(l->second);
  }
  w.commit();
  r.extra = {{"with_docstring", with_doc}, {"styles", styles}};
  return r;
}

StageReport run_rule_filter(const fs::path& units_in, const fs::path& metadata_in,
                            const fs::path& blocks_in, const FilterConfig& cfg,
                            std::size_t jobs, const FilterOutputs& out) {
  const std::string stage = "rule-filter";
  auto units = read_units(units_in, stage);
  std::map<std::string, json> metadata;
  read_strict(metadata_in, stage, [&](const json& j) {
    metadata[j.at("key").get<std::string>()] = j.at("docstring_params");
  });
  std::vector<InlineSample> blocks;
  read_strict(blocks_in, stage, [&](const json& j) { blocks.push_back(inline_from_json(j)); });

  struct UnitResult {
    std::optional<FilterTrace> trace;
    std::string line;
  };
  std::vector<UnitResult> ures(units.size());
  parallel_for(units.size(), jobs, [&](std::size_t i) {
    auto& u = units[i];
    auto& res = ures[i];
    if (!u.docstring_raw) {
      res.line = dump_line(unimodal_record(u));
      return;
    }
    res.trace = clean_pair(u, cfg);
    if (res.trace->removed_by) return;
    auto rec = paired_record(u, *res.trace->text_after, DocstringMetadata{});
    const auto md = metadata.find(res.trace->key);
    if (md == metadata.end())
      throw StageError(stage, "no docstring metadata for " + res.trace->key);
    rec["docstring_params"] = md->second;
    res.line = dump_line(rec);
  });
  std::vector<FilterTrace> btraces(blocks.size());
  parallel_for(blocks.size(), jobs, [&](std::size_t i) { btraces[i] = clean_inline(blocks[i], cfg); });

  StageReport r{stage, {}, json::object()};
  auto& pc = r.streams["pairs"];
  auto& mc = r.streams["unimodal"];
  auto& bc = r.streams["blocks"];
  for (auto id : kRemoveOrder) {
    pc.dropped[std::string(filter_name(id))] = 0;
    bc.dropped[std::string(filter_name(id))] = 0;
  }
  FilterReport report;
  JsonlWriter pw(out.pairs), mw(out.unimodal), bw(out.blocks), tw(out.traces);
  for (std::size_t i = 0; i < units.size(); ++i) {
    const auto& res = ures[i];
    if (!res.trace) {
      ++mc.in;
      ++mc.out;
      mw.write_raw(res.line);
      continue;
    }
    ++pc.in;
    report.add_inputs(units[i].language);
    report.add(*res.trace);
    auto tj = res.trace->to_json();
    tj["stream"] = "pairs";
    tw.write(tj);
    if (res.trace->removed_by) {
      ++pc.dropped[std::string(filter_name(*res.trace->removed_by))];
    } else {
      ++pc.out;
      pw.write_raw(res.line);
    }
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    ++bc.in;
    auto tj = btraces[i].to_json();
    tj["stream"] = "blocks";
    tw.write(tj);
    if (btraces[i].removed_by) {
      ++bc.dropped[std::string(filter_name(*btraces[i].removed_by))];
    } else {
      ++bc.out;
      bw.write(block_record(blocks[i]));
    }
  }
  pw.commit();
  mw.commit();
  bw.commit();
  tw.commit();
  write_text_file(out.report_csv, report.to_csv());
  write_text_file(out.report_json, report.to_json().dump(2) + "\n");
  return r;
}

StageReport run_gate(const fs::path& pairs_in, const GateConfig& cfg, std::size_t jobs,
                     const fs::path& pairs_out, const fs::path& scores_out) {
  const std::string stage = "gate";
  const auto records = read_records(pairs_in, stage);
  std::vector<ScoreRequest> requests;
  std::vector<std::string> keys;
  for (const auto& rec : records) {
    ScoreRequest q;
    q.code = code_token_text(rec);
    q.docstring = rec.at("docstring").get<std::string>();
    q.language = *parse_language(rec.at("language").get<std::string>());
    requests.push_back(std::move(q));
    keys.push_back(rec.at("key").get<std::string>());
  }

  std::vector<double> scores(requests.size());
  bool degraded = false;
  if (cfg.backend == ScoreBackend::kBaseline) {
    parallel_for(requests.size(), jobs, [&](std::size_t i) {
      scores[i] = baseline_score(requests[i].code, requests[i].docstring);
    });
  } else {
    SidecarScorer scorer({cfg.sidecar_command, cfg.batch_size, cfg.timeout_ms}, cfg.fail_open);
    if (!requests.empty()) scores = scorer.score_batch(requests);
    degraded = scorer.degraded();
    if (degraded) std::cerr << "gate: sidecar unavailable, failing open: " << scorer.last_error() << '\n';
  }

  std::map<std::string, double> by_key;
  for (std::size_t i = 0; i < keys.size(); ++i) by_key[keys[i]] = scores[i];
  const auto decision = gate(keys, by_key, cfg.threshold);
  const std::set<std::string> kept(decision.kept.begin(), decision.kept.end());

  StageReport r{stage, {}, json::object()};
  auto& pc = r.streams["pairs"];
  pc.dropped["gated"] = 0;
  JsonlWriter pw(pairs_out), sw(scores_out);
  double sum = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    ScoreRecord sr{keys[i], scores[i], cfg.backend, kept.count(keys[i]) > 0, degraded};
    sw.write(sr.to_json());
    sum += scores[i];
    ++pc.in;
    if (sr.keep) {
      ++pc.out;
      pw.write(records[i]);
    } else {
      ++pc.dropped["gated"];
    }
  }
  pw.commit();
  sw.commit();
  r.extra = {{"backend", std::string(backend_name(cfg.backend))},
             {"threshold", cfg.threshold},
             {"fail_open", degraded},
             {"mean_score", records.empty() ? 0.0 : sum / static_cast<double>(records.size())}};
  return r;
}

std::vector<HashedSample> load_holdout(const fs::path& path, const MinHashParams& params) {
  std::vector<HashedSample> out;
  const auto st = read_jsonl(path, [&](const json& j) {
    out.push_back(hash_sample(j.at("key").get<std::string>(),
                              j.at("code_tokens").get<std::vector<std::string>>(), params));
  });
  if (st.lines > 0 && st.malformed * 100 > st.lines)
    throw DataQualityError(path.string() + ": " + std::to_string(st.malformed) + " of " +
                           std::to_string(st.lines) + " holdout lines malformed");
  return out;
}

StageReport run_dedup(const fs::path& pairs_in, const std::vector<fs::path>& holdouts,
                      const MinHashParams& params, std::size_t jobs,
                      const fs::path& report_out, const fs::path& excluded_out) {
  const std::string stage = "dedup";
  std::vector<std::pair<std::string, std::vector<std::string>>> items;
  read_strict(pairs_in, stage, [&](const json& j) {
    items.emplace_back(j.at("key").get<std::string>(),
                       j.at("code_tokens").get<std::vector<std::string>>());
  });
  std::vector<HashedSample> holdout;
  for (const auto& h : holdouts) {
    auto part = load_holdout(h, params);
    std::move(part.begin(), part.end(), std::back_inserter(holdout));
  }
  std::vector<DedupMatch> matches;
  if (!holdout.empty()) {
    std::vector<HashedSample> corpus(items.size());
    parallel_for(items.size(), jobs, [&](std::size_t i) {
      corpus[i] = hash_sample(items[i].first, items[i].second, params);
    });
    matches = find_near_duplicates(corpus, holdout, params, jobs);
  }
  std::set<std::string> excluded;
  JsonlWriter rw(report_out), ew(excluded_out);
  for (const auto& m : matches) {
    auto j = m.to_json();
    rw.write(j);
    excluded.insert(m.corpus_key);
  }
  for (const auto& k : excluded) ew.write({{"schema", kSchemaVersion}, {"key", k}});
  rw.commit();
  ew.commit();

  StageReport r{stage, {}, json::object()};
  auto& pc = r.streams["pairs"];
  pc.in = items.size();
  pc.out = items.size() - excluded.size();
  pc.dropped["near-duplicate"] = excluded.size();
  r.extra = {{"holdout_records", holdout.size()}, {"matches", matches.size()}};
  return r;
}

StageReport run_split(const fs::path& pairs_in, const fs::path& excluded_in,
                      const SplitParams& params, std::array<double, 2> subset_fractions,
                      const fs::path& manifest_out, const fs::path& pairs_out) {
  const std::string stage = "split";
  std::set<std::string> excluded;
  read_strict(excluded_in, stage,
              [&](const json& j) { excluded.insert(j.at("key").get<std::string>()); });
  std::vector<std::string> lines;
  std::vector<SplitSample> samples;
  read_strict(pairs_in, stage, [&](const json& j) {
    samples.push_back({j.at("key").get<std::string>(), j.at("repo").get<std::string>(),
                       j.at("code_tokens").size()});
    lines.push_back(dump_line(j));
  });

  std::size_t active = 0;
  for (const auto& s : samples) active += excluded.count(s.key) ? 0 : 1;
  SplitManifest manifest;
  if (active > 0) {
    manifest = split_by_repo(samples, params, excluded);
    sample_subsets(manifest, samples, subset_fractions, hash_combine(params.seed, 0x5b5e7));
  }
  for (const auto& w : manifest.warnings) std::cerr << "split: " << w << '\n';
  write_text_file(manifest_out, manifest.to_jsonl());

  StageReport r{stage, {}, json::object()};
  auto& pc = r.streams["pairs"];
  JsonlWriter pw(pairs_out);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (excluded.count(samples[i].key)) continue;
    ++pc.in;
    ++pc.out;
    pw.write_raw(lines[i]);
  }
  pw.commit();
  r.extra = manifest.summary_json();
  return r;
}

// ---------------------------------------------------------------- driver

namespace {

class StageRunner {
 public:
  StageRunner(fs::path work, bool resume) : work_(std::move(work)), resume_(resume) {}

  // `settings` is the part of the config the stage reads; a marker is only
  // reused when it, the input digests and the output digests all match.
  template <typename Fn>
  StageReport run(const std::string& name, const json& settings,
                  const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs,
                  PipelineResult& result, Fn&& fn) {
    const auto marker = work_ / (name + ".done");
    const auto config_fp = hex64(fnv1a64(settings.dump()));
    json in_digests = json::object();
    try {
      for (const auto& p : inputs) in_digests[p.filename().string()] = file_digest(p);
    } catch (const StageError& e) {
      throw StageError(name, e.what());
    }
    if (resume_ && fs::exists(marker)) {
      if (auto report = try_resume(marker, config_fp, in_digests, outputs)) {
        std::cerr << "pipeline: " << name << " up to date, skipped\n";
        result.resumed.push_back(name);
        return *report;
      }
    }
    std::error_code ec;
    fs::remove(marker, ec);
    StageReport report;
    try {
      report = fn();
    } catch (const StageError& e) {
      // Helpers report as "io"; name the stage that was running.
      if (e.stage() == name) throw;
      throw StageError(name, e.what());
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
    for (const auto& [stream, c] : report.streams)
      if (!c.balanced()) throw StageError(name, "accounting mismatch in " + stream);
    json out_digests = json::object();
    for (const auto& p : outputs) out_digests[p.filename().string()] = file_digest(p);
    write_text_file(marker, json{{"config", config_fp},
                                 {"inputs", in_digests},
                                 {"outputs", out_digests},
                                 {"report", report.to_json()}}
                                .dump(2) +
                                "\n");
    return report;
  }

 private:
  std::optional<StageReport> try_resume(const fs::path& marker, const std::string& config_fp,
                                        const json& in_digests,
                                        const std::vector<fs::path>& outputs) const {
    std::ifstream in(marker);
    const auto m = json::parse(in, nullptr, false);
    if (m.is_discarded() || !m.is_object()) return std::nullopt;
    if (m.value("config", "") != config_fp || m.value("inputs", json()) != in_digests)
      return std::nullopt;
    const auto& outs = m.value("outputs", json::object());
    for (const auto& p : outputs) {
      const auto key = p.filename().string();
      if (!fs::exists(p) || !outs.contains(key) || outs[key] != file_digest(p))
        return std::nullopt;
    }
    try {
      return StageReport::from_json(m.at("report"));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  fs::path work_;
  bool resume_;
};

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& input) {
  PipelineConfig cfg = input;
  cfg.validate();
  const auto out = cfg.out;
  const auto work = out / "work";
  fs::create_directories(work);
  const auto config_json = cfg.to_json();
  StageRunner runner(work, cfg.resume);
  PipelineResult result;

  const auto raw = work / "raw.jsonl";
  const auto units = work / "units.jsonl";
  const auto blocks_raw = work / "blocks.jsonl";
  const auto metadata = work / "metadata.jsonl";
  const auto pairs_filtered = work / "pairs_filtered.jsonl";
  const auto pairs_gated = work / "pairs_gated.jsonl";
  const auto excluded = work / "excluded.jsonl";
  FilterOutputs fo{pairs_filtered,       out / "D_unimodal.jsonl",      out / "D_block.jsonl",
                   work / "filter_traces.jsonl", out / "filter_report.csv",
                   out / "filter_report.json"};
  const auto scores = out / "gate_scores.jsonl";
  const auto dedup_report = out / "dedup_report.jsonl";
  const auto split_manifest = out / "split_manifest.jsonl";
  const auto paired = out / "D_paired.jsonl";

  // The corpus is always rescanned; its digest decides what can be resumed.
  {
    StageReport r;
    try {
      r = run_ingest(cfg, raw);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError("ingest", e.what());
    }
    for (const auto& [stream, c] : r.streams)
      if (!c.balanced()) throw StageError("ingest", "accounting mismatch in " + stream);
    result.stages.push_back(r);
  }
  result.stages.push_back(runner.run("extract", {{"max_class_tokens", cfg.extract.max_class_tokens}}, {raw}, {units, blocks_raw}, result, [&] {
    return run_extract(raw, cfg.extract, cfg.jobs, units, blocks_raw);
  }));
  result.stages.push_back(runner.run("docstring-parse", json::object(), {units}, {metadata}, result, [&] {
    return run_docstring_parse(units, cfg.jobs, metadata);
  }));
  result.stages.push_back(runner.run(
      "rule-filter", config_json["filters"], {units, metadata, blocks_raw},
      {fo.pairs, fo.unimodal, fo.blocks, fo.traces, fo.report_csv, fo.report_json}, result,
      [&] { return run_rule_filter(units, metadata, blocks_raw, cfg.filters, cfg.jobs, fo); }));
  result.stages.push_back(
      runner.run("gate", config_json["gate"], {pairs_filtered}, {pairs_gated, scores}, result, [&] {
        if (cfg.gate_enabled) return run_gate(pairs_filtered, cfg.gate, cfg.jobs, pairs_gated, scores);
        fs::copy_file(pairs_filtered, pairs_gated, fs::copy_options::overwrite_existing);
        write_text_file(scores, "");
        StageReport r{"gate", {}, {{"enabled", false}}};
        const auto n = read_records(pairs_filtered, "gate").size();
        r.streams["pairs"] = {n, n, {{"gated", 0}}};
        return r;
      }));
  if (cfg.export_training) {
    std::vector<PairInput> pairs;
    read_strict(pairs_filtered, "gate", [&](const json& j) {
      pairs.push_back({j.at("key").get<std::string>(), code_token_text(j),
                       j.at("docstring").get<std::string>(),
                       *parse_language(j.at("language").get<std::string>())});
    });
    std::vector<std::string> warnings;
    write_training_export(build_training_export(pairs, cfg.gate, cfg.seed, &warnings),
                          out / "gate_training");
    for (const auto& w : warnings) std::cerr << "gate: " << w << '\n';
  }
  std::vector<fs::path> dedup_inputs{pairs_gated};
  dedup_inputs.insert(dedup_inputs.end(), cfg.holdouts.begin(), cfg.holdouts.end());
  result.stages.push_back(
      runner.run("dedup", {{"dedup", config_json["dedup"]}, {"holdouts", config_json["holdouts"]}},
                 dedup_inputs, {dedup_report, excluded}, result, [&] {
        return run_dedup(pairs_gated, cfg.holdouts, cfg.minhash, cfg.jobs, dedup_report,
                         excluded);
      }));
  result.stages.push_back(runner.run(
      "split", {{"split", config_json["split"]}, {"subsets", config_json["subsets"]}, {"seed", cfg.seed}},
      {pairs_gated, excluded}, {split_manifest, paired}, result, [&] {
        return run_split(pairs_gated, excluded, cfg.split, cfg.subset_fractions,
                         split_manifest, paired);
      }));

  // Totals across stages: pairs_out = pairs_in - filtered - gated - excluded.
  auto report = [&](const std::string& stage) -> const StageReport& {
    for (const auto& s : result.stages)
      if (s.name == stage) return s;
    throw StageError(stage, "missing stage report");
  };
  auto stream = [&](const std::string& stage) -> const StreamCount& {
    return report(stage).streams.at("pairs");
  };
  const auto& rf = report("rule-filter");
  const auto& filt = rf.streams.at("pairs");
  const std::size_t filtered = filt.in - filt.out;
  const std::size_t gated = stream("gate").dropped.at("gated");
  const std::size_t excl = stream("dedup").dropped.at("near-duplicate");
  const std::size_t pairs_out = stream("split").out;
  if (pairs_out + filtered + gated + excl != filt.in)
    throw StageError("split", "pair accounting mismatch");

  const auto stats = compute_stats({paired, fo.unimodal, fo.blocks});
  write_text_file(out / "stats.json", stats.to_json().dump(2) + "\n");
  write_text_file(out / "stats.csv", stats.to_csv());

  json stages = json::array();
  for (const auto& s : result.stages) stages.push_back(s.to_json());
  json digests = json::object();
  for (const auto& p : {paired, fo.unimodal, fo.blocks, fo.report_csv, fo.report_json,
                        split_manifest, dedup_report, scores, out / "stats.json"})
    digests[p.filename().string()] = file_digest(p);
  result.manifest = {{"schema", kSchemaVersion},
                     {"seed", cfg.seed},
                     {"config", config_json},
                     {"stages", stages},
                     {"totals",
                      {{"pairs_in", filt.in},
                       {"filtered", filtered},
                       {"gated", gated},
                       {"excluded", excl},
                       {"pairs_out", pairs_out},
                       {"unimodal", rf.streams.at("unimodal").out},
                       {"blocks", rf.streams.at("blocks").out}}},
                     {"outputs", digests}};
  write_text_file(out / "run_manifest.json", result.manifest.dump(2) + "\n");
  return result;
}

// ---------------------------------------------------------------- holdout

namespace {

// Tokens of the outermost definitions, extracted the way corpus units are
// (comments and Python docstrings left out), so shingles line up with
// D_paired code_tokens. Falls back to plain tokenization.
std::vector<std::string> holdout_tokens(const std::string& code, LanguageId lang) {
  RawSourceFile f;
  f.repo_id = "holdout";
  f.rel_path = "holdout";
  f.language = lang;
  f.content = code;
  auto parsed = parse_file(f);
  if (!parsed.rejected) {
    ExtractOptions opts;
    opts.max_class_tokens = static_cast<std::size_t>(-1);
    const auto units = extract_units(parsed.tree, f, opts);
    std::vector<std::string> out;
    for (const auto& u : units) {
      bool nested = false;
      for (const auto& o : units)
        if (&o != &u && o.start_byte <= u.start_byte && u.end_byte <= o.end_byte &&
            (o.end_byte - o.start_byte) > (u.end_byte - u.start_byte))
          nested = true;
      if (!nested) out.insert(out.end(), u.code_tokens.begin(), u.code_tokens.end());
    }
    if (!out.empty()) return out;
  }
  return tokenize_code(code, lang).tokens;
}

}  // namespace

std::size_t export_holdout(const fs::path& benchmark,
                           const std::map<std::string, std::string>& field_map,
                           std::optional<LanguageId> default_language, const fs::path& out) {
  std::vector<std::string> missing_map;
  for (const char* k : {"key", "code"})
    if (!field_map.count(k)) missing_map.push_back(k);
  for (const auto& [k, _] : field_map)
    if (k != "key" && k != "code" && k != "language")
      throw ConfigError("field map: unknown target " + k);
  if (!missing_map.empty()) {
    std::string msg = "field map: missing";
    for (const auto& k : missing_map) msg += " " + k;
    throw ConfigError(msg);
  }
  const auto lang_field = field_map.count("language") ? field_map.at("language") : "";
  JsonlWriter w(out);
  std::size_t line_no = 0;
  const auto st = read_jsonl(benchmark, [&](const json& j) {
    ++line_no;
    std::vector<std::string> missing;
    for (const auto& [target, source] : field_map)
      if (!j.contains(source)) missing.push_back(source);
    if (!missing.empty()) {
      std::string msg = benchmark.string() + " record " + std::to_string(line_no) + ": missing";
      for (const auto& k : missing) msg += " " + k;
      throw ConfigError(msg);
    }
    const auto& key_v = j.at(field_map.at("key"));
    const auto key = key_v.is_string() ? key_v.get<std::string>() : key_v.dump();
    const auto code = j.at(field_map.at("code")).get<std::string>();
    auto lang = default_language;
    if (!lang_field.empty()) lang = parse_language(j.at(lang_field).get<std::string>());
    const auto tokens = lang ? holdout_tokens(code, *lang) : fallback_tokenize(code);
    w.write({{"schema", kSchemaVersion}, {"key", key}, {"code_tokens", tokens}});
  });
  if (st.lines > 0 && st.malformed * 100 > st.lines)
    throw DataQualityError(std::to_string(st.malformed) + " of " + std::to_string(st.lines) +
                           " benchmark lines malformed");
  w.commit();
  return w.count();
}

}  // namespace forge
