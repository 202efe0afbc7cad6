// Acceptance checks: one PASS/FAIL line per criterion, exit 1 on any FAIL.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "docgen.hpp"
#include "forge/consistency.hpp"
#include "forge/extractor.hpp"
#include "forge/filters.hpp"
#include "forge/ingest.hpp"
#include "forge/minhash.hpp"
#include "forge/pipeline.hpp"
#include "forge/records.hpp"
#include "forge/split.hpp"
#include "forge/tokenize.hpp"
#include "synth.hpp"
#include "test_util.hpp"

using namespace forge;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "[" << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string words(std::size_t n) {
  std::string s = "Returns";
  for (std::size_t i = 1; i < n; ++i) s += " item";
  return s;
}

// ------------------------------------------------------------------ checks

void filter_goldens(Outcome& o) {
  const auto t0 = Clock::now();
  struct Update {
    const char* in;
    const char* out;
    FilterId id;
  };
  const Update updates[] = {
      {"/**\n* Lexical essentially tokenizer.\n*\n*/", "Lexical essentially tokenizer.",
       FilterId::kStripDelimiters},
      {"Deletes a Mux asset\n@see https://docs.mux.com/v1/reference#deletean-asset",
       "Deletes a Mux asset", FilterId::kStripHyperlink},
      {"isup <url> - Is it down for everyone, or just you?", "isup <url>", FilterId::kHandleQuestions},
      {"Constructs a <code>GeneralStoresProductModel</code> from a plain JavaScript object.",
       "Constructs a GeneralStoresProductModel from a plain JavaScript object.", FilterId::kStripHtmlTags},
      {"Pull packages data dir.\nnote: Uses su to access package's data dir.", "Pull packages data dir.",
       FilterId::kHandleExamplesNotes},
      {"Set the trust level for a key in GPG keychain.\ncode-block:: bash\n salt '*' gpg.trust-key "
       "key-id='3FAD9F1E'\ntrust-level='marginally'",
       "Set the trust level for a key in GPG keychain.\ncode-block:: bash", FilterId::kStripEmbeddedCode},
  };
  for (const auto& u : updates) {
    const auto r = apply_update_filters(u.in);
    o.require(r.text == u.out && r.applied == std::vector<FilterId>{u.id},
              std::string(filter_name(u.id)) + " output");
  }
  struct Remove {
    const char* in;
    FilterId id;
  };
  const Remove removes[] = {
      {"Write objects", FilterId::kRemoveBadLength},
      {"Retorna uma estrutura com os argumentos passados para o programa.", FilterId::kRemoveNonEnglish},
      {"<!-begin-user-doc-> <!-end-user-doc-> @generated", FilterId::kRemoveAutoGen},
      {"/** */", FilterId::kRemoveEmpty},
  };
  for (const auto& r : removes) {
    const auto u = apply_update_filters(r.in);
    o.require(apply_remove_filters(tokenize_text(u.text), u.text) == r.id,
              std::string(filter_name(r.id)) + " verdict");
  }
  const double s = seconds_since(t0);
  o.require(s < 1.0, "runtime");
  o.detail << "10 goldens, " << s << " s";
}

void filter_idempotence(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(10000);
  std::size_t violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto t = normalize_text(testutil::random_docstring(rng));
    for (auto id : kUpdateOrder) {
      const auto once = apply_update_filter(id, t);
      if (apply_update_filter(id, once) != once) ++violations;
    }
  }
  const double s = seconds_since(t0);
  o.require(violations == 0, std::to_string(violations) + " violations");
  o.require(s < 30.0, "runtime");
  o.detail << "10000 docstrings x 8 filters, " << s << " s";
}

void extraction_fidelity(Outcome& o) {
  ScanOptions opts;
  opts.include_langs = {kAllLanguages.begin(), kAllLanguages.end()};
  const auto files = scan_corpus({testutil::fixtures() / "corpus"}, opts);
  std::vector<std::string> units, blocks;
  std::map<LanguageId, std::size_t> per_lang;
  std::size_t span_errors = 0;
  bool nested = false, fig2 = false;
  for (const auto& f : files) {
    auto parsed = parse_file(f);
    if (parsed.rejected) {
      o.require(false, "rejected " + f.rel_path);
      continue;
    }
    const auto us = extract_units(parsed.tree, f);
    for (const auto& u : us) {
      if (u.end_byte > f.content.size() ||
          u.code != f.content.substr(u.start_byte, u.end_byte - u.start_byte))
        ++span_errors;
      ++per_lang[u.language];
      for (const auto& v : us)
        if (&v != &u && v.start_byte < u.start_byte && u.end_byte < v.end_byte &&
            u.kind == UnitKind::kFunction && v.kind == UnitKind::kFunction)
          nested = true;
      if (u.kind == UnitKind::kClass && u.docstring_raw)
        for (const auto& v : us)
          if (v.kind == UnitKind::kFunction && v.docstring_raw && u.start_byte < v.start_byte &&
              v.end_byte <= u.end_byte)
            fig2 = true;
      units.push_back(dump_line(unit_to_json(u)));
    }
    for (const auto& b : extract_inline_blocks(parsed.tree, f)) blocks.push_back(dump_line(inline_to_json(b)));
  }
  for (auto l : kAllLanguages) o.require(per_lang[l] >= 3, std::string(language_name(l)) + " < 3 units");
  o.require(nested, "nested definition");
  o.require(fig2, "documented class with documented method");
  o.require(span_errors == 0, std::to_string(span_errors) + " span errors");
  const auto gu = testutil::read_lines(testutil::fixtures() / "golden" / "units.jsonl");
  const auto gb = testutil::read_lines(testutil::fixtures() / "golden" / "blocks.jsonl");
  o.require(units == gu, "units differ from golden");
  o.require(blocks == gb, "blocks differ from golden");
  o.detail << units.size() << " units, " << blocks.size() << " blocks, " << files.size() << " files";
}

void length_bounds(Outcome& o) {
  auto doc = [](std::size_t n) {
    const auto t = words(n);
    return apply_remove_filters(tokenize_text(t), t);
  };
  auto inl = [](std::size_t n) {
    const auto t = words(n);
    return apply_inline_remove_filters(tokenize_text(t), t);
  };
  o.require(doc(4) == FilterId::kRemoveBadLength, "doc 4");
  o.require(!doc(5), "doc 5");
  o.require(!doc(500), "doc 500");
  o.require(doc(501) == FilterId::kRemoveBadLength, "doc 501");
  o.require(inl(2) == FilterId::kRemoveBadLength, "inline 2");
  o.require(!inl(3), "inline 3");
  o.require(!inl(15), "inline 15");
  o.require(inl(16) == FilterId::kRemoveBadLength, "inline 16");

  // Class units at exactly 5000 and 5001 code tokens: "x = 1" statements
  // add 3 tokens each and bare "y" statements 1 each.
  auto klass = [](std::size_t triples, std::size_t singles) {
    RawSourceFile f;
    f.repo_id = "r";
    f.rel_path = "k.py";
    f.language = LanguageId::kPython;
    f.content = "class K:\n    \"\"\"A class.\"\"\"\n";
    for (std::size_t i = 0; i < triples; ++i) f.content += "    x = 1\n";
    for (std::size_t i = 0; i < singles; ++i) f.content += "    y\n";
    auto parsed = parse_file(f);
    std::vector<DroppedUnit> dropped;
    auto units = extract_units(parsed.tree, f, {}, &dropped);
    ExtractOptions unlimited;
    unlimited.max_class_tokens = static_cast<std::size_t>(-1);
    const auto all = extract_units(parsed.tree, f, unlimited);
    return std::make_tuple(units.size(), dropped.size(), all.empty() ? 0 : all[0].code_tokens.size());
  };
  const auto base = std::get<2>(klass(0, 1)) - 1;
  const std::size_t triples = (5000 - base) / 3, singles = (5000 - base) % 3;
  const auto [n0, d0, t0] = klass(triples, singles);
  const auto [n1, d1, t1] = klass(triples, singles + 1);
  o.require(t0 == 5000 && n0 == 1 && d0 == 0, "class of 5000 tokens kept");
  o.require(t1 == 5001 && n1 == 0 && d1 == 1, "class of 5001 tokens dropped");
  o.detail << "doc 4/5/500/501, inline 2/3/15/16, class " << t0 << "/" << t1;
}

void minhash_accuracy(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1000);
  auto fresh = [&](std::size_t n, const char* p) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(p + std::to_string(rng() % 1000000));
    return v;
  };
  double err = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = fresh(60, "a");
    const std::size_t keep = rng() % 61;
    std::vector<std::string> b(a.begin(), a.begin() + static_cast<long>(keep));
    for (auto& t : fresh(60 - keep, "b")) b.push_back(t);
    const double exact = exact_jaccard(shingle_set(a, 5), shingle_set(b, 5));
    err += std::abs(signature_agreement(minhash_signature(a, 256, 5, 3), minhash_signature(b, 256, 5, 3)) - exact);
  }
  err /= 1000;
  o.require(err <= 0.05, "mean error");

  MinHashParams p;
  std::vector<std::vector<std::string>> held;
  std::vector<HashedSample> holdout, corpus;
  for (int i = 0; i < 20; ++i) {
    held.push_back(fresh(200, "h"));
    holdout.push_back(hash_sample("h" + std::to_string(i), held.back(), p));
  }
  std::set<std::string> planted;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> t;
    if (i % 50 == 0) {
      t = held[static_cast<std::size_t>(i / 50)];
      t[7] = "edited";
      t[150] = "edited";
      planted.insert("c" + std::to_string(i));
    } else {
      t = fresh(200, "c");
    }
    corpus.push_back(hash_sample("c" + std::to_string(i), t, p));
  }
  std::set<std::string> found;
  for (const auto& m : find_near_duplicates(corpus, holdout, p)) found.insert(m.corpus_key);
  std::size_t recalled = 0;
  for (const auto& k : planted) recalled += found.count(k);
  o.require(recalled == 20, "recall");
  const double s = seconds_since(t0);
  o.require(s < 60.0, "runtime");
  o.detail << "mean |est-exact| " << err << ", recall " << recalled << "/20, " << found.size() - recalled
           << " false positives, " << s << " s";
}

void split_contracts(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(300);
  std::vector<SplitSample> samples;
  for (int i = 0; i < 10000; ++i)
    samples.push_back({"s" + std::to_string(i), "repo" + std::to_string(rng() % 300), 3 + rng() % 400});
  SplitParams p;
  p.seed = 42;
  auto m = split_by_repo(samples, p);
  sample_subsets(m, samples, {0.05, 0.2}, 42);
  auto again = split_by_repo(samples, p);
  sample_subsets(again, samples, {0.05, 0.2}, 42);
  o.require(m.to_jsonl() == again.to_jsonl(), "same seed differs");

  std::map<std::string, SplitName> repo_split;
  std::size_t violations = 0, nesting = 0;
  std::array<std::size_t, 3> counts{};
  std::array<std::vector<std::size_t>, 3> lens;
  std::vector<std::size_t> all;
  for (const auto& s : samples) {
    const auto& a = m.assignment.at(s.key);
    auto [it, fresh] = repo_split.emplace(s.repo, a.split);
    if (it->second != a.split) ++violations;
    if ((a.small && !a.medium) || (a.medium && a.split != SplitName::kTrain)) ++nesting;
    const auto i = static_cast<std::size_t>(a.split);
    ++counts[i];
    lens[i].push_back(s.code_tokens);
    all.push_back(s.code_tokens);
  }
  o.require(violations == 0, "repo disjointness");
  o.require(nesting == 0, "subset nesting");
  const std::array<double, 3> target{0.8, 0.1, 0.1};
  double worst_ks = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    o.require(std::abs(counts[i] / 10000.0 - target[i]) <= 0.01, "size of split " + std::to_string(i));
    const double ks = ks_distance(lens[i], all);
    worst_ks = std::max(worst_ks, ks);
    o.require(ks <= 0.1, "KS of split " + std::to_string(i));
  }
  const double s = seconds_since(t0);
  o.require(s < 60.0, "runtime");
  o.detail << "sizes " << counts[0] << "/" << counts[1] << "/" << counts[2] << ", worst KS " << worst_ks
           << ", subsets " << m.subset_fractions[0] << "/" << m.subset_fractions[1] << ", " << s << " s";
}

void gate_quality(Outcome& o) {
  std::vector<PairInput> pairs;
  for (auto& s : testutil::synth_pairs(5000, 5000)) pairs.push_back(s.pair);
  const auto labeled = generate_negatives(pairs, 17, 1.0);
  std::vector<double> scores;
  std::vector<int> labels;
  std::size_t neg = 0, dropped = 0;
  for (const auto& lp : labeled) {
    scores.push_back(baseline_score(lp.code, lp.docstring));
    labels.push_back(lp.label);
    if (lp.label == 0) {
      ++neg;
      dropped += scores.back() < 0.5;
    }
  }
  o.require(labeled.size() == 10000, "10000 labeled pairs");
  const double auc = evaluate_auc(scores, labels);
  const double drop = static_cast<double>(dropped) / static_cast<double>(neg);
  o.require(auc >= 0.7, "AUC");
  o.require(drop >= 0.7, "negatives dropped");

  // Exact agreement with the pairwise count on 200-sample inputs.
  std::mt19937_64 rng(200);
  bool exact = true;
  for (int r = 0; r < 50; ++r) {
    std::vector<double> s;
    std::vector<int> l;
    for (int i = 0; i < 200; ++i) {
      s.push_back(static_cast<double>(rng() % 64) / 64.0);
      l.push_back(i < 2 ? i : static_cast<int>(rng() % 2));
    }
    double wins = 0, total = 0;
    for (std::size_t i = 0; i < 200; ++i)
      for (std::size_t j = 0; j < 200; ++j)
        if (l[i] == 1 && l[j] == 0) {
          total += 1;
          wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
    if (evaluate_auc(s, l) != wins / total) exact = false;
  }
  o.require(exact, "AUC vs brute force");
  o.detail << "AUC " << auc << ", negatives dropped " << drop * 100 << "%";
}

void pipeline_accounting(Outcome& o) {
  const auto a = testutil::temp_dir("accept_a");
  const auto b = testutil::temp_dir("accept_b");
  auto run = [&](const fs::path& out) {
    PipelineConfig c;
    c.roots = {testutil::fixtures() / "corpus"};
    c.out = out;
    c.seed = 7;
    c.resume = false;
    return run_pipeline(c);
  };
  const auto ra = run(a);
  run(b);
  std::size_t unbalanced = 0;
  for (const auto& s : ra.stages)
    for (const auto& [_, c] : s.streams) unbalanced += !c.balanced();
  o.require(unbalanced == 0, "stage accounting");
  const auto& t = ra.manifest["totals"];
  const auto in = t["pairs_in"].get<std::size_t>();
  const auto out = t["pairs_out"].get<std::size_t>();
  o.require(out == in - t["filtered"].get<std::size_t>() - t["gated"].get<std::size_t>() -
                       t["excluded"].get<std::size_t>(),
            "pair totals");
  std::size_t files = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    if (testutil::read_file(e.path()) != testutil::read_file(b / e.path().filename())) ++differ;
  }
  o.require(differ == 0, std::to_string(differ) + " files differ");
  o.detail << ra.stages.size() << " stages, pairs " << in << " -> " << out << ", " << files
           << " output files identical";
  fs::remove_all(a);
  fs::remove_all(b);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> checks = {
      {"rule-filter goldens", filter_goldens},
      {"update filter idempotence", filter_idempotence},
      {"extraction fidelity", extraction_fidelity},
      {"length bounds", length_bounds},
      {"minhash accuracy", minhash_accuracy},
      {"split contracts", split_contracts},
      {"baseline gate quality", gate_quality},
      {"pipeline accounting", pipeline_accounting},
  };
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << "exception: " << e.what();
    }
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << std::endl;
    failed += !o.ok;
  }
  return failed == 0 ? 0 : 1;
}
