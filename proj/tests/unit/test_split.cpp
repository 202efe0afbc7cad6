#include <doctest.h>

#include <random>

#include "forge/error.hpp"
#include "forge/split.hpp"

using namespace forge;

namespace {

std::vector<SplitSample> samples(std::size_t n, std::size_t repos, std::uint64_t seed, bool equal = false) {
  std::mt19937_64 rng(seed);
  std::vector<SplitSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto repo = equal ? i % repos : rng() % repos;
    out.push_back({"s" + std::to_string(i), "r" + std::to_string(repo), 5 + rng() % 300});
  }
  return out;
}

void check_partition_and_repos(const SplitManifest& m, const std::vector<SplitSample>& s) {
  REQUIRE(m.assignment.size() == s.size());
  std::map<std::string, SplitName> repo_split;
  for (const auto& x : s) {
    const auto& a = m.assignment.at(x.key);
    CHECK(a.repo == x.repo);
    if (a.split == SplitName::kExcluded) continue;
    auto [it, fresh] = repo_split.emplace(x.repo, a.split);
    CHECK(it->second == a.split);
    if (a.small) CHECK(a.medium);
    if (a.medium) CHECK(a.split == SplitName::kTrain);
  }
}

}  // namespace

TEST_CASE("single repo, all train") {
  SplitParams p;
  p.ratios = {1, 0, 0};
  const auto s = samples(20, 1, 1);
  const auto m = split_by_repo(s, p);
  for (const auto& [k, a] : m.assignment) CHECK(a.split == SplitName::kTrain);
}

TEST_CASE("too few repos is an error") {
  SplitParams p;
  CHECK_THROWS_AS(split_by_repo(samples(20, 2, 1), p), StageError);
}

TEST_CASE("ratios must sum to one") {
  SplitParams p;
  p.ratios = {0.8, 0.1, 0.2};
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("100 equal repos: counts within 1% and repo-disjoint") {
  SplitParams p;
  const auto s = samples(10000, 100, 1, true);
  const auto m = split_by_repo(s, p);
  check_partition_and_repos(m, s);
  const double n = 10000;
  CHECK(std::abs(m.diagnostics.counts[0] / n - 0.8) <= 0.01);
  CHECK(std::abs(m.diagnostics.counts[1] / n - 0.1) <= 0.01);
  CHECK(std::abs(m.diagnostics.counts[2] / n - 0.1) <= 0.01);
  for (double ks : m.diagnostics.ks) CHECK(ks <= 0.1);
}

TEST_CASE("same seed gives an identical manifest") {
  SplitParams p;
  const auto s = samples(3000, 150, 2);
  auto a = split_by_repo(s, p);
  auto b = split_by_repo(s, p);
  sample_subsets(a, s, {0.05, 0.2}, 5);
  sample_subsets(b, s, {0.05, 0.2}, 5);
  CHECK(a.to_jsonl() == b.to_jsonl());
  CHECK(a.summary_json() == b.summary_json());
}

TEST_CASE("excluded samples are marked and not split") {
  SplitParams p;
  const auto s = samples(500, 40, 3);
  const std::set<std::string> ex = {"s1", "s7", "s100"};
  const auto m = split_by_repo(s, p, ex);
  check_partition_and_repos(m, s);
  for (const auto& k : ex) CHECK(m.assignment.at(k).split == SplitName::kExcluded);
  CHECK(m.diagnostics.excluded == 3);
  CHECK(m.diagnostics.counts[0] + m.diagnostics.counts[1] + m.diagnostics.counts[2] == 497);
}

TEST_CASE("subsets: full fraction") {
  SplitParams p;
  const auto s = samples(400, 40, 4);
  auto m = split_by_repo(s, p);
  sample_subsets(m, s, {1.0, 1.0}, 1);
  for (const auto& [k, a] : m.assignment) {
    CHECK(a.small == (a.split == SplitName::kTrain));
    CHECK(a.medium == (a.split == SplitName::kTrain));
  }
}

TEST_CASE("subsets: 1000 samples over 200 repos") {
  // Train-only split so the subset fractions are of all 1000 samples.
  SplitParams p;
  p.ratios = {1, 0, 0};
  const auto s = samples(1000, 200, 6, true);
  auto m = split_by_repo(s, p);
  sample_subsets(m, s, {0.05, 0.2}, 6);
  check_partition_and_repos(m, s);
  std::size_t small = 0, medium = 0;
  for (const auto& [k, a] : m.assignment) {
    small += a.small;
    medium += a.medium;
  }
  CHECK(small >= 40);
  CHECK(small <= 60);
  CHECK(medium >= 190);
  CHECK(medium <= 210);
  CHECK(m.subset_fractions[0] == doctest::Approx(small / 1000.0));
}

TEST_CASE("nesting holds under many seeds") {
  SplitParams p;
  const auto s = samples(800, 60, 7);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    p.seed = seed;
    auto m = split_by_repo(s, p);
    sample_subsets(m, s, {0.05, 0.2}, seed);
    check_partition_and_repos(m, s);
  }
}

TEST_CASE("manifest lines") {
  SplitParams p;
  p.ratios = {1, 0, 0};
  auto m = split_by_repo({{"a", "r", 3}}, p);
  sample_subsets(m, {{"a", "r", 3}}, {1.0, 1.0}, 1);
  const auto j = nlohmann::json::parse(m.to_jsonl());
  CHECK(j["schema"] == 1);
  CHECK(j["key"] == "a");
  CHECK(j["split"] == "train");
  CHECK(j["repo"] == "r");
  CHECK(j["subsets"] == nlohmann::json::array({"small", "medium"}));
}

TEST_CASE("KS distance") {
  CHECK(ks_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_distance({1, 1}, {9, 9}) == 1.0);
  // Brute force over all thresholds.
  std::mt19937_64 rng(8);
  for (int r = 0; r < 20; ++r) {
    std::vector<std::size_t> a, b;
    for (int i = 0; i < 50; ++i) a.push_back(rng() % 30);
    for (int i = 0; i < 70; ++i) b.push_back(rng() % 40);
    double best = 0;
    for (std::size_t t = 0; t < 41; ++t) {
      double fa = 0, fb = 0;
      for (auto x : a) fa += x <= t;
      for (auto x : b) fb += x <= t;
      best = std::max(best, std::abs(fa / 50 - fb / 70));
    }
    CHECK(ks_distance(a, b) == doctest::Approx(best));
  }
}
