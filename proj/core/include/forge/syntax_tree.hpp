#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "forge/language.hpp"
#include "forge/lexer.hpp"

namespace forge {

enum class NodeKind : std::uint8_t {
  kRoot,
  kStatement,
  kBlock,
  kFunction,
  kClass,
  kComment,
  kToken,
  kError,
};

std::string_view node_kind_name(NodeKind kind);

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

struct Node {
  NodeKind kind = NodeKind::kToken;
  std::uint32_t begin = 0;  // byte span [begin, end)
  std::uint32_t end = 0;
  NodeId parent = kNoNode;
  std::vector<NodeId> children;  // in source order
  std::int32_t token = -1;       // kToken / kComment: index into tokens()
  bool error = false;

  // kFunction / kClass only.
  std::string name;
  bool anonymous = false;
  NodeId body = kNoNode;  // the kBlock holding the definition's body
};

// A parsed file. The tree borrows the source text; the RawSourceFile it was
// parsed from must outlive it. Confined to the thread that built it.
class SyntaxTree {
 public:
  SyntaxTree(std::string_view source, LanguageId language,
             std::vector<Token> tokens);

  std::string_view source() const { return source_; }
  LanguageId language() const { return language_; }
  const std::vector<Token>& tokens() const { return tokens_; }

  NodeId root() const { return 0; }
  const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  Node& node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return nodes_.size(); }

  std::string_view text(NodeId id) const {
    const auto& n = node(id);
    return source_.substr(n.begin, n.end - n.begin);
  }
  const Token& token_of(NodeId id) const {
    return tokens_[static_cast<std::size_t>(node(id).token)];
  }

  // 1-based line containing byte offset.
  std::uint32_t line_of(std::uint32_t offset) const;
  std::uint32_t start_line(NodeId id) const { return line_of(node(id).begin); }
  std::uint32_t end_line(NodeId id) const {
    const auto& n = node(id);
    return line_of(n.end > n.begin ? n.end - 1 : n.begin);
  }

  // True if `id` or any ancestor is an error node.
  bool inside_error(NodeId id) const;

  // Leaf code tokens under `id`, in source order, comments excluded.
  std::vector<std::string_view> code_leaves(NodeId id) const;

  // Construction API used by the parsers.
  NodeId add(NodeKind kind, NodeId parent, std::uint32_t begin,
             std::uint32_t end);
  NodeId add_token(NodeId parent, std::int32_t token_index);
  void set_rejected(bool rejected) { rejected_ = rejected; }
  bool rejected() const { return rejected_; }
  // Recomputes spans bottom-up from the leaves.
  void fix_spans(NodeId id);
  // Checks span nesting; used by tests.
  bool spans_consistent() const;

  std::string debug_string() const;

 private:
  std::string_view source_;
  LanguageId language_;
  std::vector<Token> tokens_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> line_starts_;
  bool rejected_ = false;
};

struct ParseOutcome {
  SyntaxTree tree;
  bool rejected = false;  // total parse failure
  std::string reason;
};

// Parses `content` with the structural grammar for `language`.
ParseOutcome parse_source(std::string_view content, LanguageId language);

}  // namespace forge
