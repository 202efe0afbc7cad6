#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace forge {

// Character-trigram naive Bayes language identifier over a small built-in
// profile set (English plus several Latin-script languages common in code
// comments). Deterministic and dependency free.
class LanguageIdentifier {
 public:
  // The shared instance trained on the built-in profiles.
  static const LanguageIdentifier& builtin();

  // Adds (or extends) a profile from sample text.
  void train(const std::string& language, std::string_view sample);

  // Posterior per profile, sorted by descending probability. English gets
  // prior 0.5; the other profiles split the rest.
  std::vector<std::pair<std::string, double>> posteriors(
      std::string_view text) const;

  // P(english | text). Texts with too few letters to judge return 1.0;
  // texts dominated by non-Latin scripts return 0.0.
  double english_probability(std::string_view text) const;

 private:
  struct Profile {
    std::string name;
    std::unordered_map<std::uint64_t, std::uint32_t> counts;
    std::uint64_t total = 0;
  };

  std::vector<Profile> profiles_;
  std::unordered_map<std::uint64_t, bool> vocabulary_;
};

}  // namespace forge
