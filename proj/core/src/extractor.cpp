#include "forge/extractor.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

#include "forge/tokenize.hpp"

namespace forge {
namespace {

bool is_item_parent(const SyntaxTree& tree, NodeId id) {
  const auto kind = tree.node(id).kind;
  return kind == NodeKind::kBlock || kind == NodeKind::kRoot;
}

// True if only whitespace precedes `offset` on its line.
bool starts_line(std::string_view src, std::uint32_t offset) {
  while (offset > 0) {
    const char c = src[offset - 1];
    if (c == '\n') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
    --offset;
  }
  return true;
}

bool is_line_comment(const SyntaxTree& tree, NodeId id) {
  const auto& n = tree.node(id);
  return n.kind == NodeKind::kComment &&
         tree.token_of(id).kind == TokenKind::kLineComment;
}

// Index of `id` among its parent's children.
std::size_t child_index(const SyntaxTree& tree, NodeId id) {
  const auto& ch = tree.node(tree.node(id).parent).children;
  return static_cast<std::size_t>(std::find(ch.begin(), ch.end(), id) -
                                  ch.begin());
}

// The node standing for the definition in its enclosing block: the
// definition itself or the statement that begins on the same line.
NodeId item_anchor(const SyntaxTree& tree, NodeId def) {
  const auto parent = tree.node(def).parent;
  if (parent == kNoNode) return kNoNode;
  if (is_item_parent(tree, parent)) return def;
  const auto& p = tree.node(parent);
  if (p.kind == NodeKind::kStatement && p.parent != kNoNode &&
      is_item_parent(tree, p.parent) &&
      tree.start_line(parent) == tree.start_line(def))
    return parent;
  return kNoNode;
}

struct Span {
  std::uint32_t begin;
  std::uint32_t end;
};

// Comment run adjacent to (ending at most one line before) the definition.
std::optional<Span> preceding_comment(const SyntaxTree& tree, NodeId def) {
  const auto anchor = item_anchor(tree, def);
  if (anchor == kNoNode) return std::nullopt;
  const auto& siblings = tree.node(tree.node(anchor).parent).children;
  std::size_t i = child_index(tree, anchor);
  if (i == 0) return std::nullopt;
  NodeId last = siblings[i - 1];
  if (tree.node(last).kind != NodeKind::kComment) return std::nullopt;
  if (!starts_line(tree.source(), tree.node(last).begin)) return std::nullopt;
  if (tree.start_line(def) > tree.end_line(last) + 1) return std::nullopt;
  NodeId first = last;
  if (is_line_comment(tree, last)) {
    std::size_t k = i - 1;
    while (k > 0) {
      const NodeId prev = siblings[k - 1];
      if (!is_line_comment(tree, prev) ||
          !starts_line(tree.source(), tree.node(prev).begin) ||
          tree.end_line(prev) + 1 != tree.start_line(first))
        break;
      first = prev;
      --k;
    }
  }
  return Span{tree.node(first).begin, tree.node(last).end};
}

// First body item when it is a comment run (Ruby fallback).
std::optional<Span> leading_body_comment(const SyntaxTree& tree, NodeId body) {
  const auto& ch = tree.node(body).children;
  std::size_t i = 0;
  while (i < ch.size() && tree.node(ch[i]).kind == NodeKind::kToken &&
         !tree.token_of(ch[i]).is_code())
    ++i;
  if (i >= ch.size() || !is_line_comment(tree, ch[i])) return std::nullopt;
  NodeId first = ch[i];
  NodeId last = first;
  for (std::size_t k = i + 1; k < ch.size(); ++k) {
    if (!is_line_comment(tree, ch[k]) ||
        tree.start_line(ch[k]) != tree.end_line(last) + 1)
      break;
    last = ch[k];
  }
  return Span{tree.node(first).begin, tree.node(last).end};
}

// Python: the leading string-literal statement of the body.
NodeId python_docstring(const SyntaxTree& tree, NodeId body) {
  for (auto c : tree.node(body).children) {
    const auto& n = tree.node(c);
    if (n.kind == NodeKind::kComment) continue;
    if (n.kind != NodeKind::kStatement || n.children.empty()) return kNoNode;
    for (auto leaf : n.children) {
      const auto& ln = tree.node(leaf);
      if (ln.kind == NodeKind::kComment) continue;
      if (ln.kind != NodeKind::kToken ||
          tree.token_of(leaf).kind != TokenKind::kString)
        return kNoNode;
    }
    return c;
  }
  return kNoNode;
}

void collect_code(const SyntaxTree& tree, NodeId id, NodeId skip,
                  std::vector<std::string>& out, bool& has_error) {
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    const auto cur = stack.back();
    stack.pop_back();
    if (cur == skip) continue;
    const auto& n = tree.node(cur);
    if (n.kind == NodeKind::kToken) {
      const auto& tk = tree.token_of(cur);
      if (tk.kind == TokenKind::kError) has_error = true;
      if (tk.is_code()) out.emplace_back(tk.text(tree.source()));
      continue;
    }
    if (n.kind == NodeKind::kComment) continue;
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it)
      stack.push_back(*it);
  }
}

std::string make_key(const std::string& repo, const std::string& path,
                     std::uint32_t begin, std::uint32_t end) {
  return repo + "/" + path + "#" + std::to_string(begin) + "-" +
         std::to_string(end);
}

std::string strip_comment_marker(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  if (line.compare(i, 2, "//") == 0) {
    i += 2;
    if (i < line.size() && (line[i] == '/' || line[i] == '!')) ++i;
  } else {
    while (i < line.size() && line[i] == '#') ++i;
  }
  std::size_t j = line.size();
  while (j > i && std::isspace(static_cast<unsigned char>(line[j - 1]))) --j;
  while (i < j && (line[i] == ' ' || line[i] == '\t')) ++i;
  return std::string(line.substr(i, j - i));
}

}  // namespace

std::string_view unit_kind_name(UnitKind kind) {
  return kind == UnitKind::kClass ? "class" : "function";
}

std::string ExtractedUnit::key() const {
  return make_key(repo_id, rel_path, start_byte, end_byte);
}

std::string InlineSample::key() const {
  return make_key(repo_id, rel_path, start_byte, end_byte);
}

ParseOutcome parse_file(const RawSourceFile& file) {
  return parse_source(file.content, file.language);
}

std::vector<ExtractedUnit> extract_units(const SyntaxTree& tree,
                                         const RawSourceFile& file,
                                         const ExtractOptions& options,
                                         std::vector<DroppedUnit>* dropped) {
  std::vector<ExtractedUnit> units;
  std::deque<NodeId> queue{tree.root()};
  const auto src = tree.source();
  while (!queue.empty()) {
    const auto id = queue.front();
    queue.pop_front();
    const auto& n = tree.node(id);
    if (n.error || n.kind == NodeKind::kError) continue;
    for (auto c : n.children) queue.push_back(c);
    if (n.kind != NodeKind::kFunction && n.kind != NodeKind::kClass) continue;
    if (tree.inside_error(id)) continue;

    ExtractedUnit u;
    u.repo_id = file.repo_id;
    u.rel_path = file.rel_path;
    u.language = file.language;
    u.kind = n.kind == NodeKind::kClass ? UnitKind::kClass : UnitKind::kFunction;
    u.identifier = n.name;
    u.anonymous = n.anonymous;
    u.start_byte = n.begin;
    u.end_byte = n.end;
    u.start_line = tree.start_line(id);
    u.end_line = tree.end_line(id);
    u.code = std::string(src.substr(n.begin, n.end - n.begin));

    NodeId doc_stmt = kNoNode;
    std::optional<Span> doc;
    if (file.language == LanguageId::kPython) {
      if (n.body != kNoNode) doc_stmt = python_docstring(tree, n.body);
      if (doc_stmt != kNoNode)
        doc = Span{tree.node(doc_stmt).begin, tree.node(doc_stmt).end};
    } else {
      doc = preceding_comment(tree, id);
      if (!doc && file.language == LanguageId::kRuby && n.body != kNoNode)
        doc = leading_body_comment(tree, n.body);
    }
    if (doc) {
      u.docstring_raw = std::string(src.substr(doc->begin, doc->end - doc->begin));
      u.docstring_tokens = tokenize_text(*u.docstring_raw);
    }

    bool has_error = false;
    collect_code(tree, id, doc_stmt, u.code_tokens, has_error);
    if (has_error) {
      u.code_tokens = fallback_tokenize(u.code);
      u.token_fallback = true;
    }
    if (u.kind == UnitKind::kClass &&
        u.code_tokens.size() > options.max_class_tokens) {
      if (dropped) dropped->push_back({u.key(), "class-token-limit"});
      continue;
    }
    units.push_back(std::move(u));
  }
  return units;
}

std::vector<InlineSample> extract_inline_blocks(const SyntaxTree& tree,
                                                const RawSourceFile& file) {
  std::vector<InlineSample> out;
  const auto src = tree.source();
  for (NodeId b = 0; b < static_cast<NodeId>(tree.size()); ++b) {
    const auto& block = tree.node(b);
    if (block.kind != NodeKind::kBlock || tree.inside_error(b)) continue;
    std::optional<std::string> enclosing;
    for (NodeId up = block.parent; up != kNoNode; up = tree.node(up).parent) {
      const auto kind = tree.node(up).kind;
      if (kind == NodeKind::kFunction) {
        enclosing = tree.node(up).name;
        break;
      }
      if (kind == NodeKind::kClass) break;
    }
    if (!enclosing) continue;

    // Items: statements and comment groups, braces excluded.
    const auto& ch = block.children;
    std::vector<NodeId> items;
    for (auto c : ch)
      if (tree.node(c).kind != NodeKind::kToken) items.push_back(c);

    auto run_text = [&](std::size_t from, std::size_t to) -> std::string {
      // Statements in items[from, to).
      if (from >= to) return {};
      return std::string(src.substr(tree.node(items[from]).begin,
                                    tree.node(items[to - 1]).end -
                                        tree.node(items[from]).begin));
    };

    std::size_t i = 0;
    std::size_t prev_boundary = 0;  // first item after the previous comment
    while (i < items.size()) {
      if (tree.node(items[i]).kind != NodeKind::kComment) {
        ++i;
        continue;
      }
      // A group of comments: line comments on consecutive lines merge.
      std::size_t j = i;
      while (j + 1 < items.size() &&
             tree.node(items[j + 1]).kind == NodeKind::kComment &&
             is_line_comment(tree, items[j]) &&
             is_line_comment(tree, items[j + 1]) &&
             tree.start_line(items[j + 1]) == tree.end_line(items[j]) + 1)
        ++j;
      const std::size_t group_end = j + 1;
      std::size_t next_comment = group_end;
      while (next_comment < items.size() &&
             tree.node(items[next_comment]).kind != NodeKind::kComment)
        ++next_comment;
      if (is_line_comment(tree, items[i]) &&
          starts_line(src, tree.node(items[i]).begin)) {
        InlineSample s;
        s.repo_id = file.repo_id;
        s.rel_path = file.rel_path;
        s.language = file.language;
        for (std::size_t k = i; k < group_end; ++k) {
          if (k > i) s.comment += '\n';
          s.comment += strip_comment_marker(tree.text(items[k]));
        }
        s.comment_tokens = tokenize_text(s.comment);
        s.prev_context = run_text(prev_boundary, i);
        s.next_context = run_text(group_end, next_comment);
        s.enclosing_identifier = enclosing;
        s.start_byte = tree.node(items[i]).begin;
        s.end_byte = tree.node(items[j]).end;
        if (!s.prev_context.empty() || !s.next_context.empty())
          out.push_back(std::move(s));
      }
      prev_boundary = group_end;
      i = group_end;
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.start_byte < b.start_byte;
  });
  return out;
}

}  // namespace forge
