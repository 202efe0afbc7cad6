#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace forge {

struct MinHashParams {
  std::size_t num_perm = 256;
  std::size_t shingle = 5;
  std::uint64_t seed = 1;
  std::size_t bands = 32;
  std::size_t rows = 8;
  double threshold = 0.8;
  bool exact_confirm = false;

  // bands * rows must equal num_perm; throws ConfigError.
  void validate() const;
  static MinHashParams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct MinHashSignature {
  std::vector<std::uint64_t> values;
  std::uint64_t seed = 0;
  std::size_t shingle = 0;
  bool short_input = false;  // fewer tokens than the shingle width
};

// Sorted, de-duplicated hashes of the w-token shingles. A list shorter than
// w yields one shingle over the whole sequence.
std::vector<std::uint64_t> shingle_set(const std::vector<std::string>& tokens,
                                       std::size_t w);

MinHashSignature minhash_signature(const std::vector<std::string>& tokens,
                                   std::size_t num_perm, std::size_t w,
                                   std::uint64_t seed);

// Fraction of positions where two signatures agree.
double signature_agreement(const MinHashSignature& a, const MinHashSignature& b);

// Exact Jaccard of the two shingle sets.
double exact_jaccard(const std::vector<std::uint64_t>& a,
                     const std::vector<std::uint64_t>& b);

struct HashedSample {
  std::string key;
  MinHashSignature signature;
  std::vector<std::uint64_t> shingles;  // filled only for exact confirmation
};

HashedSample hash_sample(std::string key, const std::vector<std::string>& tokens,
                         const MinHashParams& params);

struct DedupMatch {
  std::string corpus_key;
  std::string holdout_key;
  double est_jaccard = 0.0;

  nlohmann::json to_json() const;
};

// Band buckets over the holdout signatures. Built once, then read-only.
class LshIndex {
 public:
  LshIndex(std::size_t bands, std::size_t rows);
  void add(std::size_t id, const MinHashSignature& sig);
  // Candidate ids sharing at least one band bucket, ascending.
  std::vector<std::size_t> query(const MinHashSignature& sig) const;

 private:
  std::uint64_t band_hash(const MinHashSignature& sig, std::size_t band) const;
  std::size_t bands_;
  std::size_t rows_;
  std::vector<std::unordered_multimap<std::uint64_t, std::size_t>> tables_;
};

// LSH candidates confirmed by signature agreement (or exact Jaccard when
// params.exact_confirm) >= threshold. Sorted by (corpus_key, holdout_key).
std::vector<DedupMatch> find_near_duplicates(const std::vector<HashedSample>& corpus,
                                             const std::vector<HashedSample>& holdout,
                                             const MinHashParams& params,
                                             std::size_t jobs = 1);

}  // namespace forge
