#pragma once

// Random docstrings mixing every kind of noise the update filters handle.

#include <random>
#include <string>
#include <vector>

namespace testutil {

inline std::string random_docstring(std::mt19937_64& rng) {
  static const std::vector<std::string> sentences = {
      "Returns the number of elements in the list.",
      "Parses the header and stores the result.",
      "isup <url> - Is it down for everyone, or just you?",
      "Constructs a <code>Widget</code> from a <b>plain</b> object.",
      "See https://example.org/docs#section for details.",
      "Deletes a Mux asset",
      "@see https://docs.mux.com/v1/reference#deletean-asset",
      "note: Uses su to access the data dir.",
      "Example: foo(1, 2)",
      "code-block:: bash",
      " salt '*' gpg.trust-key key-id='3FAD9F1E'",
      "[B,A] = YULEWALK(N,F,M) finds the N-th order",
      "y = \\sqrt{x} + \\exp(z)",
      "@static",
      "@since 3.0.0",
      "@param x the value",
      "Does it work?",
      "Retorna uma estrutura com os argumentos.",
      "TODO: finish this",
      "<!-begin-user-doc-> <!-end-user-doc-> @generated",
      ">>> add(1, 2)",
      "3",
      "",
      "   ",
      "Why not? Because.",
      "Computes <i>x</i> squared.",
      "* bullet item",
      "Warning: slow.",
      "http://a.b/c",
      "Lexical essentially tokenizer.",
      "\\f$x^2\\f$ is the square.",
      "</p>",
      "??",
      "e.g. like this. Then that.",
  };
  static const std::vector<std::pair<std::string, std::string>> wrappers = {
      {"", ""},           {"/**\n* ", "\n*/"}, {"/* ", " */"}, {"\"\"\"", "\"\"\""},
      {"/// ", ""},       {"# ", ""},          {"// ", ""},    {"'''", "'''"},
      {"/*!\n", "\n*/"},  {"=begin\n", "\n=end"},
  };
  const auto& w = wrappers[rng() % wrappers.size()];
  const std::size_t n = 1 + rng() % 6;
  std::string body;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) body += (rng() % 3 == 0) ? " " : "\n";
    // Line-comment wrappers repeat their marker on each line.
    if (i && (w.first == "/// " || w.first == "# " || w.first == "// ") && body.back() == '\n')
      body += w.first;
    body += sentences[rng() % sentences.size()];
  }
  return w.first + body + w.second;
}

}  // namespace testutil
