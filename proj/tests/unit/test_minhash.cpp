#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "forge/error.hpp"
#include "forge/minhash.hpp"

using namespace forge;

namespace {

std::vector<std::string> fresh_tokens(std::mt19937_64& rng, std::size_t n, const std::string& prefix) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(rng() % 1000000));
  return out;
}

}  // namespace

TEST_CASE("identical token lists give identical signatures") {
  std::mt19937_64 rng(1);
  const auto t = fresh_tokens(rng, 50, "t");
  const auto a = minhash_signature(t, 256, 5, 9);
  const auto b = minhash_signature(t, 256, 5, 9);
  CHECK(a.values == b.values);
  CHECK(a.values.size() == 256);
  CHECK(signature_agreement(a, b) == 1.0);
  CHECK(minhash_signature(t, 256, 5, 10).values != a.values);
}

TEST_CASE("short input is one shingle and flagged") {
  const std::vector<std::string> t = {"a", "b", "c"};
  CHECK(shingle_set(t, 5).size() == 1);
  CHECK(minhash_signature(t, 64, 5, 1).short_input);
  CHECK_FALSE(minhash_signature({"a", "b", "c", "d", "e"}, 64, 5, 1).short_input);
}

TEST_CASE("disjoint vocabularies barely agree") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto a = fresh_tokens(rng, 80, "a");
    const auto b = fresh_tokens(rng, 80, "b");
    CHECK(exact_jaccard(shingle_set(a, 5), shingle_set(b, 5)) == 0.0);
    CHECK(signature_agreement(minhash_signature(a, 256, 5, i), minhash_signature(b, 256, 5, i)) <= 0.05);
  }
}

TEST_CASE("agreement around Jaccard 0.5 over 100 seeds") {
  std::mt19937_64 rng(3);
  std::vector<std::string> a = fresh_tokens(rng, 104, "s");
  std::vector<std::string> b(a.begin(), a.begin() + 70);
  for (auto& t : fresh_tokens(rng, 34, "x")) b.push_back(t);
  const double j = exact_jaccard(shingle_set(a, 5), shingle_set(b, 5));
  CHECK(j == doctest::Approx(0.5).epsilon(0.05));
  double sum = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    sum += signature_agreement(minhash_signature(a, 256, 5, seed), minhash_signature(b, 256, 5, seed));
  CHECK(std::abs(sum / 100 - j) <= 0.05);
}

TEST_CASE("mean estimation error over 1000 random pairs") {
  std::mt19937_64 rng(4);
  double err = 0;
  for (int i = 0; i < 1000; ++i) {
    // Overlap varies from none to full.
    const auto base = fresh_tokens(rng, 60, "b");
    const std::size_t keep = rng() % 61;
    std::vector<std::string> other(base.begin(), base.begin() + static_cast<long>(keep));
    for (auto& t : fresh_tokens(rng, 60 - keep, "o")) other.push_back(t);
    const double exact = exact_jaccard(shingle_set(base, 5), shingle_set(other, 5));
    const double est = signature_agreement(minhash_signature(base, 256, 5, 77),
                                           minhash_signature(other, 256, 5, 77));
    err += std::abs(est - exact);
  }
  CHECK(err / 1000 <= 0.05);
}

TEST_CASE("params validation") {
  MinHashParams p;
  CHECK_NOTHROW(p.validate());
  p.bands = 16;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK_THROWS_AS(MinHashParams::from_json(nlohmann::json::parse(R"({"num_perm": 100})")), ConfigError);
  CHECK_THROWS_AS(MinHashParams::from_json(nlohmann::json::parse(R"({"permutations": 256})")), ConfigError);
  const auto q = MinHashParams::from_json(nlohmann::json::parse(R"({"num_perm": 128, "bands": 16, "rows": 8})"));
  CHECK(q.num_perm == 128);
  CHECK(MinHashParams::from_json(q.to_json()).to_json() == q.to_json());
}

TEST_CASE("byte-identical sample is reported with est 1.0; empty holdout") {
  MinHashParams p;
  std::mt19937_64 rng(5);
  const auto t = fresh_tokens(rng, 40, "t");
  const std::vector<HashedSample> corpus = {hash_sample("c1", t, p),
                                            hash_sample("c2", fresh_tokens(rng, 40, "u"), p)};
  const std::vector<HashedSample> holdout = {hash_sample("h1", t, p)};
  const auto m = find_near_duplicates(corpus, holdout, p);
  REQUIRE(m.size() == 1);
  CHECK(m[0].corpus_key == "c1");
  CHECK(m[0].holdout_key == "h1");
  CHECK(m[0].est_jaccard == 1.0);
  CHECK(find_near_duplicates(corpus, {}, p).empty());
}

TEST_CASE("planted near-copies are all recalled") {
  MinHashParams p;
  std::mt19937_64 rng(6);
  std::vector<std::vector<std::string>> held;
  std::vector<HashedSample> holdout;
  for (int i = 0; i < 20; ++i) {
    held.push_back(fresh_tokens(rng, 200, "h"));
    holdout.push_back(hash_sample("h" + std::to_string(i), held.back(), p));
  }
  std::vector<HashedSample> corpus;
  std::set<std::string> planted;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> t;
    if (i % 50 == 0) {
      t = held[static_cast<std::size_t>(i / 50)];
      t[100] = "changed";
      REQUIRE(exact_jaccard(shingle_set(t, 5), shingle_set(held[static_cast<std::size_t>(i / 50)], 5)) >= 0.9);
      planted.insert("c" + std::to_string(i));
    } else {
      t = fresh_tokens(rng, 200, "c");
    }
    corpus.push_back(hash_sample("c" + std::to_string(i), t, p));
  }
  for (std::size_t jobs : {1u, 4u}) {
    const auto m = find_near_duplicates(corpus, holdout, p, jobs);
    std::set<std::string> found;
    for (const auto& d : m) found.insert(d.corpus_key);
    CHECK(found == planted);
  }
}

TEST_CASE("exact confirmation uses the shingle sets") {
  MinHashParams p;
  p.exact_confirm = true;
  std::mt19937_64 rng(8);
  const auto base = fresh_tokens(rng, 200, "e");
  auto near = base;
  near[50] = "x";
  const std::vector<HashedSample> corpus = {hash_sample("c", near, p)};
  const std::vector<HashedSample> holdout = {hash_sample("h", base, p)};
  REQUIRE_FALSE(corpus[0].shingles.empty());
  const auto m = find_near_duplicates(corpus, holdout, p);
  REQUIRE(m.size() == 1);
  CHECK(m[0].est_jaccard == doctest::Approx(exact_jaccard(shingle_set(near, 5), shingle_set(base, 5))));
}
