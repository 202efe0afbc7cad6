#include <cctype>

#include "parser_detail.hpp"

namespace forge {
namespace {

// Bytes covered by outermost error nodes.
std::size_t structural_error_bytes(const SyntaxTree& tree) {
  std::size_t total = 0;
  std::vector<NodeId> stack{tree.root()};
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    const auto& n = tree.node(id);
    if (n.error || n.kind == NodeKind::kError) {
      total += n.end - n.begin;
      continue;
    }
    for (auto c : n.children) stack.push_back(c);
  }
  return total;
}

}  // namespace

ParseOutcome parse_source(std::string_view content, LanguageId language) {
  auto lexed = lex(content, language);
  std::size_t token_errors = 0;
  for (const auto& tk : lexed.tokens)
    if (tk.kind == TokenKind::kError) token_errors += tk.end - tk.begin;

  SyntaxTree tree(content, language, std::move(lexed.tokens));
  switch (language) {
    case LanguageId::kPython: detail::parse_python(tree); break;
    case LanguageId::kRuby: detail::parse_ruby(tree); break;
    default: detail::parse_brace(tree); break;
  }

  std::size_t visible = 0;
  for (unsigned char ch : content)
    if (!std::isspace(ch)) ++visible;

  std::string reason;
  if (visible > 0) {
    if (lexed.runaway && token_errors * 2 > content.size())
      reason = "unterminated literal";
    else if (token_errors * 10 > visible)
      reason = "lexical errors";
    else if (structural_error_bytes(tree) * 2 > content.size())
      reason = "unbalanced structure";
  }
  const bool rejected = !reason.empty();
  tree.set_rejected(rejected);
  return ParseOutcome{std::move(tree), rejected, std::move(reason)};
}

}  // namespace forge
