#include "forge/split.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "forge/error.hpp"
#include "forge/hash.hpp"

namespace forge {
namespace {

struct Repo {
  std::string name;
  std::vector<std::size_t> samples;  // indices into the input
  std::vector<std::pair<std::size_t, std::size_t>> hist;  // (length rank, count)
  int split = 0;
};

// Cumulative-count KS over length ranks, for fast swap evaluation.
struct Cdf {
  std::vector<long long> counts;
  long long total = 0;

  void add(const Repo& r, int sign) {
    for (const auto& [rank, n] : r.hist) counts[rank] += sign * static_cast<long long>(n);
    total += sign * static_cast<long long>(r.samples.size());
  }
};

double ks_against(const Cdf& part, const Cdf& all) {
  if (part.total == 0 || all.total == 0) return part.total == all.total ? 0.0 : 1.0;
  double best = 0.0;
  long long a = 0, b = 0;
  for (std::size_t i = 0; i < all.counts.size(); ++i) {
    a += part.counts[i];
    b += all.counts[i];
    best = std::max(best, std::abs(static_cast<double>(a) / static_cast<double>(part.total) -
                                   static_cast<double>(b) / static_cast<double>(all.total)));
  }
  return best;
}

}  // namespace

std::string_view split_name(SplitName s) {
  switch (s) {
    case SplitName::kTrain: return "train";
    case SplitName::kValid: return "valid";
    case SplitName::kTest: return "test";
    case SplitName::kExcluded: return "excluded";
  }
  return "excluded";
}

void SplitParams::validate() const {
  double sum = 0;
  for (double r : ratios) {
    if (r < 0.0) throw ConfigError("split: ratios must be non-negative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw ConfigError("split: ratios must sum to 1");
  if (!(ks_target > 0.0)) throw ConfigError("split: ks_target must be positive");
}

double ks_distance(std::vector<std::size_t> a, std::vector<std::size_t> b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty() ? 0.0 : 1.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const auto v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / static_cast<double>(a.size()) -
                                   static_cast<double>(j) / static_cast<double>(b.size())));
  }
  return best;
}

SplitManifest split_by_repo(const std::vector<SplitSample>& samples,
                            const SplitParams& params,
                            const std::set<std::string>& excluded) {
  params.validate();
  SplitManifest m;
  m.seed = params.seed;
  m.ratios = params.ratios;

  std::vector<std::size_t> lengths;
  for (const auto& s : samples)
    if (!excluded.count(s.key)) lengths.push_back(s.code_tokens);
  std::sort(lengths.begin(), lengths.end());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
  auto rank_of = [&](std::size_t len) {
    return static_cast<std::size_t>(std::lower_bound(lengths.begin(), lengths.end(), len) -
                                    lengths.begin());
  };

  std::map<std::string, Repo> by_name;
  std::size_t n = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (excluded.count(s.key)) {
      m.assignment[s.key] = {SplitName::kExcluded, s.repo, false, false};
      ++m.diagnostics.excluded;
      continue;
    }
    auto& r = by_name[s.repo];
    r.name = s.repo;
    r.samples.push_back(i);
    ++n;
  }
  std::vector<Repo> repos;
  for (auto& [name, r] : by_name) {
    std::map<std::size_t, std::size_t> h;
    for (auto i : r.samples) ++h[rank_of(samples[i].code_tokens)];
    r.hist.assign(h.begin(), h.end());
    repos.push_back(std::move(r));
  }
  if (repos.empty()) return m;

  std::vector<int> active;
  for (int s = 0; s < 3; ++s)
    if (params.ratios[static_cast<std::size_t>(s)] > 0.0) active.push_back(s);
  if (repos.size() < active.size())
    throw StageError("split", "fewer repos (" + std::to_string(repos.size()) +
                                  ") than non-empty splits (" +
                                  std::to_string(active.size()) + ")");

  // Largest first, seeded tie-break.
  std::sort(repos.begin(), repos.end(), [&](const Repo& a, const Repo& b) {
    if (a.samples.size() != b.samples.size()) return a.samples.size() > b.samples.size();
    const auto ha = seeded_hash(a.name, params.seed);
    const auto hb = seeded_hash(b.name, params.seed);
    return ha != hb ? ha < hb : a.name < b.name;
  });

  std::array<double, 3> target{};
  for (int s = 0; s < 3; ++s)
    target[static_cast<std::size_t>(s)] = params.ratios[static_cast<std::size_t>(s)] * static_cast<double>(n);
  std::array<long long, 3> count{};
  for (auto& r : repos) {
    int pick = active.front();
    double best = -1e300;
    for (int s : active) {
      const auto k = static_cast<std::size_t>(s);
      const double deficit = target[k] - static_cast<double>(count[k]);
      if (deficit > best) {
        best = deficit;
        pick = s;
      }
    }
    r.split = pick;
    count[static_cast<std::size_t>(pick)] += static_cast<long long>(r.samples.size());
  }

  Cdf all{std::vector<long long>(lengths.size(), 0), 0};
  std::array<Cdf, 3> part;
  for (auto& p : part) p.counts.assign(lengths.size(), 0);
  for (const auto& r : repos) {
    all.add(r, 1);
    part[static_cast<std::size_t>(r.split)].add(r, 1);
  }
  auto worst = [&](const std::array<Cdf, 3>& p) {
    double w = 0;
    for (int s : active) w = std::max(w, ks_against(p[static_cast<std::size_t>(s)], all));
    return w;
  };
  const double slack = 0.01 * static_cast<double>(n);
  auto deviation = [&](int s, long long c) {
    return std::abs(static_cast<double>(c) - target[static_cast<std::size_t>(s)]);
  };

  auto apply_swap = [&](std::size_t a, std::size_t b) {
    const auto sa = static_cast<std::size_t>(repos[a].split);
    const auto sb = static_cast<std::size_t>(repos[b].split);
    part[sa].add(repos[a], -1);
    part[sa].add(repos[b], 1);
    part[sb].add(repos[b], -1);
    part[sb].add(repos[a], 1);
  };

  std::size_t swaps = 0;
  double current = worst(part);
  while (current > params.ks_target && swaps < params.max_swaps) {
    // Only swaps that move a repo out of the worst split can lower the max.
    int worst_split = active.front();
    for (int s : active)
      if (ks_against(part[static_cast<std::size_t>(s)], all) >
          ks_against(part[static_cast<std::size_t>(worst_split)], all))
        worst_split = s;
    double best_val = current;
    std::size_t best_a = 0, best_b = 0;
    bool found = false;
    for (std::size_t a = 0; a < repos.size(); ++a) {
      if (repos[a].split != worst_split) continue;
      for (std::size_t b = 0; b < repos.size(); ++b) {
        const int sa = repos[a].split;
        const int sb = repos[b].split;
        if (sa == sb) continue;
        const auto na = static_cast<long long>(repos[a].samples.size());
        const auto nb = static_cast<long long>(repos[b].samples.size());
        const auto ka = static_cast<std::size_t>(sa);
        const auto kb = static_cast<std::size_t>(sb);
        if (deviation(sa, count[ka] - na + nb) > std::max(slack, deviation(sa, count[ka])) ||
            deviation(sb, count[kb] - nb + na) > std::max(slack, deviation(sb, count[kb])))
          continue;
        apply_swap(a, b);
        std::swap(repos[a].split, repos[b].split);
        const double v = worst(part);
        apply_swap(a, b);  // with the splits exchanged this undoes the move
        std::swap(repos[a].split, repos[b].split);
        if (v < best_val - 1e-12) {
          best_val = v;
          best_a = a;
          best_b = b;
          found = true;
        }
      }
    }
    if (!found) break;
    const auto ka = static_cast<std::size_t>(repos[best_a].split);
    const auto kb = static_cast<std::size_t>(repos[best_b].split);
    const auto na = static_cast<long long>(repos[best_a].samples.size());
    const auto nb = static_cast<long long>(repos[best_b].samples.size());
    apply_swap(best_a, best_b);
    count[ka] += nb - na;
    count[kb] += na - nb;
    std::swap(repos[best_a].split, repos[best_b].split);
    current = best_val;
    ++swaps;
  }

  m.diagnostics.swaps = swaps;
  for (const auto& r : repos) {
    const auto s = static_cast<std::size_t>(r.split);
    ++m.diagnostics.repos[s];
    m.diagnostics.counts[s] += r.samples.size();
    for (auto i : r.samples)
      m.assignment[samples[i].key] = {static_cast<SplitName>(r.split), r.name, false, false};
  }
  for (std::size_t s = 0; s < 3; ++s) m.diagnostics.ks[s] = ks_against(part[s], all);
  return m;
}

void sample_subsets(SplitManifest& manifest, const std::vector<SplitSample>& samples,
                    std::array<double, 2> fractions, std::uint64_t seed) {
  if (!(fractions[0] > 0.0 && fractions[0] <= fractions[1] && fractions[1] <= 1.0))
    throw ConfigError("subsets: fractions must be ascending and in (0,1]");
  std::map<std::string, std::size_t> repo_size;
  std::size_t total = 0;
  for (const auto& s : samples) {
    const auto it = manifest.assignment.find(s.key);
    if (it == manifest.assignment.end() || it->second.split != SplitName::kTrain) continue;
    ++repo_size[it->second.repo];
    ++total;
  }
  for (auto& [key, a] : manifest.assignment) a.small = a.medium = false;
  if (total == 0) return;
  std::vector<std::string> order;
  for (const auto& [name, size] : repo_size) order.push_back(name);
  Rng rng(hash_combine(seed, 0x5b5e7));
  seeded_shuffle(order.begin(), order.end(), rng);

  // Prefix length whose cumulative fraction is closest to each target; the
  // medium prefix never ends before the small one.
  std::array<std::size_t, 2> cut{};
  std::array<double, 2> achieved{};
  std::size_t from = 0;
  for (std::size_t f = 0; f < 2; ++f) {
    std::size_t acc = 0;
    for (std::size_t k = 0; k < from; ++k) acc += repo_size[order[k]];
    double best = 1e300;
    for (std::size_t k = from; k <= order.size(); ++k) {
      const double frac = static_cast<double>(acc) / static_cast<double>(total);
      const double d = std::abs(frac - fractions[f]);
      if (d < best) {
        best = d;
        cut[f] = k;
        achieved[f] = frac;
      }
      if (k < order.size()) acc += repo_size[order[k]];
    }
    from = cut[f];
  }
  std::set<std::string> small(order.begin(), order.begin() + static_cast<long>(cut[0]));
  std::set<std::string> medium(order.begin(), order.begin() + static_cast<long>(cut[1]));
  for (auto& [key, a] : manifest.assignment) {
    if (a.split != SplitName::kTrain) continue;
    a.small = small.count(a.repo) > 0;
    a.medium = medium.count(a.repo) > 0;
  }
  manifest.subset_fractions = achieved;
  const char* names[2] = {"small", "medium"};
  for (std::size_t f = 0; f < 2; ++f) {
    if (std::abs(achieved[f] - fractions[f]) > 0.01) {
      std::ostringstream w;
      w << "subsets: " << names[f] << " target " << fractions[f] << " unattainable at repo "
        << "granularity; achieved " << achieved[f];
      manifest.warnings.push_back(w.str());
    }
  }
}

std::string SplitManifest::to_jsonl() const {
  std::string out;
  for (const auto& [key, a] : assignment) {
    nlohmann::json subsets = nlohmann::json::array();
    if (a.small) subsets.push_back("small");
    if (a.medium) subsets.push_back("medium");
    nlohmann::json j = {{"schema", 1},
                        {"key", key},
                        {"split", std::string(split_name(a.split))},
                        {"subsets", subsets},
                        {"repo", a.repo}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

nlohmann::json SplitManifest::summary_json() const {
  nlohmann::json j;
  j["schema"] = 1;
  j["seed"] = seed;
  j["ratios"] = {ratios[0], ratios[1], ratios[2]};
  const char* names[3] = {"train", "valid", "test"};
  for (std::size_t s = 0; s < 3; ++s) {
    j["splits"][names[s]] = {{"samples", diagnostics.counts[s]},
                             {"repos", diagnostics.repos[s]},
                             {"ks", diagnostics.ks[s]}};
  }
  j["excluded"] = diagnostics.excluded;
  j["swaps"] = diagnostics.swaps;
  j["subsets"] = {{"small", subset_fractions[0]}, {"medium", subset_fractions[1]}};
  j["warnings"] = warnings;
  return j;
}

}  // namespace forge
