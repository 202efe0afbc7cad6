#include "forge/syntax_tree.hpp"

#include <algorithm>
#include <sstream>

namespace forge {

std::string_view node_kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::kRoot: return "root";
    case NodeKind::kStatement: return "statement";
    case NodeKind::kBlock: return "block";
    case NodeKind::kFunction: return "function";
    case NodeKind::kClass: return "class";
    case NodeKind::kComment: return "comment";
    case NodeKind::kToken: return "token";
    case NodeKind::kError: return "error";
  }
  return "?";
}

SyntaxTree::SyntaxTree(std::string_view source, LanguageId language,
                       std::vector<Token> tokens)
    : source_(source), language_(language), tokens_(std::move(tokens)) {
  line_starts_.push_back(0);
  for (std::uint32_t i = 0; i < source_.size(); ++i)
    if (source_[i] == '\n') line_starts_.push_back(i + 1);
  Node root;
  root.kind = NodeKind::kRoot;
  root.begin = 0;
  root.end = static_cast<std::uint32_t>(source_.size());
  nodes_.push_back(std::move(root));
}

std::uint32_t SyntaxTree::line_of(std::uint32_t offset) const {
  auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
  return static_cast<std::uint32_t>(it - line_starts_.begin());
}

bool SyntaxTree::inside_error(NodeId id) const {
  for (NodeId cur = id; cur != kNoNode; cur = node(cur).parent)
    if (node(cur).error || node(cur).kind == NodeKind::kError) return true;
  return false;
}

std::vector<std::string_view> SyntaxTree::code_leaves(NodeId id) const {
  std::vector<std::string_view> out;
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    const auto cur = stack.back();
    stack.pop_back();
    const auto& n = node(cur);
    if (n.kind == NodeKind::kToken) {
      const auto& tok = token_of(cur);
      if (tok.is_code()) out.push_back(tok.text(source_));
      continue;
    }
    if (n.kind == NodeKind::kComment) continue;
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it)
      stack.push_back(*it);
  }
  return out;
}

NodeId SyntaxTree::add(NodeKind kind, NodeId parent, std::uint32_t begin,
                       std::uint32_t end) {
  Node n;
  n.kind = kind;
  n.parent = parent;
  n.begin = begin;
  n.end = end;
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(std::move(n));
  if (parent != kNoNode) node(parent).children.push_back(id);
  return id;
}

NodeId SyntaxTree::add_token(NodeId parent, std::int32_t token_index) {
  const auto& tok = tokens_[static_cast<std::size_t>(token_index)];
  const auto kind = tok.is_comment() ? NodeKind::kComment : NodeKind::kToken;
  const auto id = add(kind, parent, tok.begin, tok.end);
  node(id).token = token_index;
  return id;
}

void SyntaxTree::fix_spans(NodeId id) {
  // Post-order without recursion: deep nesting in generated code would
  // otherwise blow the stack.
  std::vector<std::pair<NodeId, bool>> stack{{id, false}};
  while (!stack.empty()) {
    auto [cur, visited] = stack.back();
    stack.pop_back();
    auto& n = node(cur);
    if (n.children.empty()) continue;
    if (!visited) {
      stack.push_back({cur, true});
      for (auto c : n.children) stack.push_back({c, false});
      continue;
    }
    if (n.kind == NodeKind::kRoot) continue;
    n.begin = node(n.children.front()).begin;
    n.end = node(n.children.back()).end;
    for (auto c : n.children) {
      n.begin = std::min(n.begin, node(c).begin);
      n.end = std::max(n.end, node(c).end);
    }
  }
}

bool SyntaxTree::spans_consistent() const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.begin > n.end || n.end > source_.size()) return false;
    std::uint32_t prev_end = n.begin;
    for (auto c : n.children) {
      const auto& ch = node(c);
      if (ch.parent != static_cast<NodeId>(i)) return false;
      if (ch.begin < n.begin || ch.end > n.end) return false;
      if (ch.begin < prev_end) return false;
      prev_end = ch.end;
    }
  }
  return true;
}

std::string SyntaxTree::debug_string() const {
  std::ostringstream out;
  std::vector<std::pair<NodeId, int>> stack{{root(), 0}};
  while (!stack.empty()) {
    auto [id, depth] = stack.back();
    stack.pop_back();
    const auto& n = node(id);
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ')
        << node_kind_name(n.kind);
    if (!n.name.empty()) out << " '" << n.name << "'";
    if (n.error) out << " !error";
    if (n.kind == NodeKind::kToken || n.kind == NodeKind::kComment)
      out << " " << text(id);
    out << " [" << n.begin << "," << n.end << ")\n";
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it)
      stack.push_back({*it, depth + 1});
  }
  return out.str();
}

}  // namespace forge
