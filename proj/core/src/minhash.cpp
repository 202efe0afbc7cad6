#include "forge/minhash.hpp"

#include <algorithm>
#include <limits>

#include "forge/error.hpp"
#include "forge/hash.hpp"
#include "forge/parallel.hpp"

namespace forge {

void MinHashParams::validate() const {
  if (num_perm == 0) throw ConfigError("minhash: num_perm must be positive");
  if (shingle == 0) throw ConfigError("minhash: shingle width must be positive");
  if (bands * rows != num_perm)
    throw ConfigError("minhash: bands x rows (" + std::to_string(bands) + "x" +
                      std::to_string(rows) + ") must equal num_perm " +
                      std::to_string(num_perm));
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw ConfigError("minhash: threshold must be in (0,1]");
}

MinHashParams MinHashParams::from_json(const nlohmann::json& j) {
  MinHashParams p;
  if (!j.is_object()) throw ConfigError("dedup config: expected an object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& k = it.key();
      const auto& v = it.value();
      if (k == "num_perm") p.num_perm = v.get<std::size_t>();
      else if (k == "shingle") p.shingle = v.get<std::size_t>();
      else if (k == "seed") p.seed = v.get<std::uint64_t>();
      else if (k == "bands") p.bands = v.get<std::size_t>();
      else if (k == "rows") p.rows = v.get<std::size_t>();
      else if (k == "threshold") p.threshold = v.get<double>();
      else if (k == "exact_confirm") p.exact_confirm = v.get<bool>();
      else throw ConfigError("dedup config: unknown key " + k);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("dedup config: ") + e.what());
  }
  p.validate();
  return p;
}

nlohmann::json MinHashParams::to_json() const {
  return {{"num_perm", num_perm}, {"shingle", shingle},     {"seed", seed},
          {"bands", bands},       {"rows", rows},           {"threshold", threshold},
          {"exact_confirm", exact_confirm}};
}

std::vector<std::uint64_t> shingle_set(const std::vector<std::string>& tokens,
                                       std::size_t w) {
  std::vector<std::uint64_t> out;
  auto hash_range = [&](std::size_t b, std::size_t e) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = b; i < e; ++i) {
      h = fnv1a64(tokens[i], h);
      h = fnv1a64("\x1f", h);
    }
    return mix64(h);
  };
  if (tokens.size() < w) {
    out.push_back(hash_range(0, tokens.size()));
  } else {
    out.reserve(tokens.size() - w + 1);
    for (std::size_t i = 0; i + w <= tokens.size(); ++i) out.push_back(hash_range(i, i + w));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MinHashSignature minhash_signature(const std::vector<std::string>& tokens,
                                   std::size_t num_perm, std::size_t w,
                                   std::uint64_t seed) {
  MinHashSignature sig;
  sig.seed = seed;
  sig.shingle = w;
  sig.short_input = tokens.size() < w;
  sig.values.assign(num_perm, std::numeric_limits<std::uint64_t>::max());
  // Permutation i is x -> mix64(x + a_i); mix64 is a bijection.
  std::vector<std::uint64_t> salts(num_perm);
  for (std::size_t i = 0; i < num_perm; ++i) salts[i] = mix64(hash_combine(seed, i));
  for (auto x : shingle_set(tokens, w))
    for (std::size_t i = 0; i < num_perm; ++i)
      sig.values[i] = std::min(sig.values[i], mix64(x + salts[i]));
  return sig;
}

double signature_agreement(const MinHashSignature& a, const MinHashSignature& b) {
  if (a.values.size() != b.values.size() || a.values.empty()) return 0.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) same += a.values[i] == b.values[i];
  return static_cast<double>(same) / static_cast<double>(a.values.size());
}

double exact_jaccard(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t i = 0, j = 0, both = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++both;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return static_cast<double>(both) / static_cast<double>(a.size() + b.size() - both);
}

HashedSample hash_sample(std::string key, const std::vector<std::string>& tokens,
                         const MinHashParams& params) {
  HashedSample s;
  s.key = std::move(key);
  s.signature = minhash_signature(tokens, params.num_perm, params.shingle, params.seed);
  if (params.exact_confirm) s.shingles = shingle_set(tokens, params.shingle);
  return s;
}

nlohmann::json DedupMatch::to_json() const {
  return {{"schema", 1},
          {"key", corpus_key},
          {"holdout_key", holdout_key},
          {"est_jaccard", est_jaccard}};
}

LshIndex::LshIndex(std::size_t bands, std::size_t rows)
    : bands_(bands), rows_(rows), tables_(bands) {}

std::uint64_t LshIndex::band_hash(const MinHashSignature& sig, std::size_t band) const {
  std::uint64_t h = mix64(band);
  for (std::size_t r = 0; r < rows_; ++r) h = hash_combine(h, sig.values[band * rows_ + r]);
  return h;
}

void LshIndex::add(std::size_t id, const MinHashSignature& sig) {
  if (sig.values.size() != bands_ * rows_)
    throw ConfigError("minhash: signature length does not match the banding");
  for (std::size_t b = 0; b < bands_; ++b) tables_[b].emplace(band_hash(sig, b), id);
}

std::vector<std::size_t> LshIndex::query(const MinHashSignature& sig) const {
  std::vector<std::size_t> out;
  if (sig.values.size() != bands_ * rows_) return out;
  for (std::size_t b = 0; b < bands_; ++b) {
    const auto range = tables_[b].equal_range(band_hash(sig, b));
    for (auto it = range.first; it != range.second; ++it) out.push_back(it->second);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<DedupMatch> find_near_duplicates(const std::vector<HashedSample>& corpus,
                                             const std::vector<HashedSample>& holdout,
                                             const MinHashParams& params,
                                             std::size_t jobs) {
  params.validate();
  if (holdout.empty() || corpus.empty()) return {};
  LshIndex index(params.bands, params.rows);
  for (std::size_t i = 0; i < holdout.size(); ++i) index.add(i, holdout[i].signature);
  std::vector<std::vector<DedupMatch>> per(corpus.size());
  parallel_for(corpus.size(), jobs, [&](std::size_t c) {
    for (auto h : index.query(corpus[c].signature)) {
      const double est = params.exact_confirm
                             ? exact_jaccard(corpus[c].shingles, holdout[h].shingles)
                             : signature_agreement(corpus[c].signature, holdout[h].signature);
      if (est >= params.threshold) per[c].push_back({corpus[c].key, holdout[h].key, est});
    }
  });
  std::vector<DedupMatch> out;
  for (auto& v : per)
    for (auto& m : v) out.push_back(std::move(m));
  std::sort(out.begin(), out.end(), [](const DedupMatch& a, const DedupMatch& b) {
    return a.corpus_key != b.corpus_key ? a.corpus_key < b.corpus_key
                                        : a.holdout_key < b.holdout_key;
  });
  return out;
}

}  // namespace forge
