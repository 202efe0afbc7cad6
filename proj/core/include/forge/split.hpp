#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace forge {

enum class SplitName { kTrain, kValid, kTest, kExcluded };
std::string_view split_name(SplitName s);

struct SplitSample {
  std::string key;
  std::string repo;
  std::size_t code_tokens = 0;
};

struct SplitParams {
  std::array<double, 3> ratios{0.8, 0.1, 0.1};  // train, valid, test
  std::uint64_t seed = 1;
  double ks_target = 0.1;
  std::size_t max_swaps = 1000;

  void validate() const;  // throws ConfigError
};

struct Assignment {
  SplitName split = SplitName::kTrain;
  std::string repo;
  bool small = false;
  bool medium = false;
};

struct SplitDiagnostics {
  std::array<std::size_t, 3> counts{};
  std::array<std::size_t, 3> repos{};
  std::array<double, 3> ks{};  // KS distance of code-token lengths vs all
  std::size_t swaps = 0;
  std::size_t excluded = 0;
};

struct SplitManifest {
  std::map<std::string, Assignment> assignment;  // by sample key
  std::uint64_t seed = 0;
  std::array<double, 3> ratios{};
  SplitDiagnostics diagnostics;
  std::array<double, 2> subset_fractions{};  // achieved small, medium
  std::vector<std::string> warnings;

  // One line per sample: {"schema":1,"key","split","subsets","repo"}.
  std::string to_jsonl() const;
  nlohmann::json summary_json() const;
};

// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::vector<std::size_t> a, std::vector<std::size_t> b);

// Repo-disjoint split. Repos are assigned largest first (seeded tie-break)
// to the split furthest below its target count, then repo swaps lower the
// worst KS distance until it is <= ks_target or max_swaps is reached.
// Samples whose key is in `excluded` are marked excluded and not split.
// Throws StageError when there are fewer repos than non-empty splits.
SplitManifest split_by_repo(const std::vector<SplitSample>& samples,
                            const SplitParams& params,
                            const std::set<std::string>& excluded = {});

// Nested repo-granular subsets of train: a seeded repo order, small and
// medium are the prefixes whose sample fraction is closest to the targets.
// Warns when a target is missed by more than 0.01.
void sample_subsets(SplitManifest& manifest, const std::vector<SplitSample>& samples,
                    std::array<double, 2> fractions, std::uint64_t seed);

}  // namespace forge
