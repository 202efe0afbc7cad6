// Indentation-structured parser for Python: logical lines are grouped into
// blocks by their indentation column.
#include <algorithm>
#include <initializer_list>

#include "parser_detail.hpp"

namespace forge::detail {
namespace {

bool one_of(std::string_view s, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

struct Item {
  std::vector<std::size_t> toks;  // code and trailing comment tokens
  std::size_t comment = 0;        // standalone comment if toks is empty
  std::uint32_t indent = 0;
  bool error = false;
};

class PythonParser {
 public:
  explicit PythonParser(SyntaxTree& tree)
      : t_(tree), src_(tree.source()), toks_(tree.tokens()) {}

  void run() {
    const auto items = logical_lines();
    build(items);
    t_.fix_spans(t_.root());
  }

 private:
  struct Frame {
    NodeId block;
    std::uint32_t indent;
  };

  SyntaxTree& t_;
  std::string_view src_;
  const std::vector<Token>& toks_;
  std::vector<Frame> stack_;
  std::vector<std::size_t> pending_;  // standalone comments not yet placed

  std::string_view text(std::size_t i) const { return toks_[i].text(src_); }

  std::uint32_t visual_indent(std::size_t tok) const {
    std::uint32_t start = toks_[tok].begin;
    while (start > 0 && src_[start - 1] != '\n') --start;
    std::uint32_t col = 0;
    for (std::uint32_t i = start; i < toks_[tok].begin; ++i) {
      if (src_[i] == '\t') col = (col / 8 + 1) * 8;
      else ++col;
    }
    return col;
  }

  std::vector<Item> logical_lines() const {
    std::vector<Item> out;
    Item cur;
    std::vector<char> open;
    auto flush = [&] {
      if (!open.empty()) cur.error = true;
      bool has_code = false;
      for (auto k : cur.toks)
        if (toks_[k].is_code()) has_code = true;
      if (has_code) {
        std::size_t first = cur.toks.front();
        for (auto k : cur.toks)
          if (toks_[k].is_code()) {
            first = k;
            break;
          }
        cur.indent = visual_indent(first);
        out.push_back(std::move(cur));
      } else {
        for (auto k : cur.toks) {
          Item c;
          c.comment = k;
          c.indent = visual_indent(k);
          out.push_back(std::move(c));
        }
      }
      cur = Item{};
      open.clear();
    };
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      const Token& tk = toks_[i];
      if (tk.kind == TokenKind::kNewline) {
        if (open.empty()) flush();
        continue;
      }
      if (tk.kind == TokenKind::kPunct) {
        const auto p = text(i);
        if (p == "(" || p == "[" || p == "{") {
          open.push_back(p[0]);
        } else if (p == ")" || p == "]" || p == "}") {
          const char want = p == ")" ? '(' : p == "]" ? '[' : '{';
          if (!open.empty() && open.back() == want) open.pop_back();
          else cur.error = true;
        }
      }
      cur.toks.push_back(i);
    }
    flush();
    return out;
  }

  void place_comment(NodeId block, std::size_t tok) {
    t_.add_token(block, static_cast<int>(tok));
  }

  void close_top() {
    const auto top = stack_.back();
    std::size_t k = 0;
    while (k < pending_.size() &&
           visual_indent(pending_[k]) >= top.indent)
      place_comment(top.block, pending_[k++]);
    pending_.erase(pending_.begin(), pending_.begin() + static_cast<long>(k));
    stack_.pop_back();
  }

  // Index in `toks` of the first depth-0 ':' (or npos).
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t first_colon(const std::vector<std::size_t>& toks) const {
    int depth = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const auto k = toks[i];
      if (toks_[k].kind != TokenKind::kPunct) continue;
      const auto p = text(k);
      if (p == "(" || p == "[" || p == "{") ++depth;
      else if (p == ")" || p == "]" || p == "}") --depth;
      else if (p == ":" && depth == 0) return i;
    }
    return npos;
  }

  void set_definition(NodeId s, const std::vector<std::size_t>& toks) {
    std::size_t i = 0;
    while (i < toks.size() && !toks_[toks[i]].is_code()) ++i;
    if (i < toks.size() && text(toks[i]) == "async") ++i;
    if (i + 1 >= toks.size()) return;
    const auto kw = text(toks[i]);
    if (kw != "def" && kw != "class") return;
    if (toks_[toks[i + 1]].kind != TokenKind::kWord) return;
    auto& n = t_.node(s);
    n.kind = kw == "def" ? NodeKind::kFunction : NodeKind::kClass;
    n.name = std::string(text(toks[i + 1]));
  }

  // Adds simple statements split on depth-0 ';'.
  void add_simple(NodeId block, const std::vector<std::size_t>& toks,
                  bool error) {
    NodeId s = kNoNode;
    int depth = 0;
    for (auto k : toks) {
      if (s == kNoNode) {
        s = t_.add(NodeKind::kStatement, block, toks_[k].begin, toks_[k].end);
        t_.node(s).error = error;
      }
      t_.add_token(s, static_cast<int>(k));
      if (toks_[k].kind == TokenKind::kPunct) {
        const auto p = text(k);
        if (p == "(" || p == "[" || p == "{") ++depth;
        else if (p == ")" || p == "]" || p == "}") --depth;
        else if (p == ";" && depth == 0) s = kNoNode;
      }
    }
  }

  void build(const std::vector<Item>& items) {
    stack_.push_back({t_.root(), 0});
    NodeId awaiting = kNoNode;
    std::uint32_t awaiting_indent = 0;
    for (const auto& item : items) {
      if (item.toks.empty()) {
        pending_.push_back(item.comment);
        continue;
      }
      const auto indent = item.indent;
      if (awaiting != kNoNode) {
        if (indent > awaiting_indent) stack_.push_back({awaiting, indent});
        else t_.node(awaiting).error = true;
        awaiting = kNoNode;
      }
      while (stack_.size() > 1 && indent < stack_.back().indent) close_top();
      const NodeId block = stack_.back().block;
      for (auto c : pending_) place_comment(block, c);
      pending_.clear();

      // Split off a trailing comment so it stays with the statement.
      std::vector<std::size_t> code;
      for (auto k : item.toks) code.push_back(k);
      std::size_t last_code = npos;
      for (std::size_t i = code.size(); i-- > 0;)
        if (toks_[code[i]].is_code()) {
          last_code = i;
          break;
        }
      const auto colon = first_colon(code);
      bool compound = false;
      for (auto k : code) {
        if (!toks_[k].is_code()) continue;
        compound = one_of(text(k), {"if", "elif", "else", "for", "while", "try",
                                    "except", "finally", "with", "def", "class",
                                    "async", "match", "case"});
        break;
      }
      const bool opens = last_code != npos && text(code[last_code]) == ":" &&
                         toks_[code[last_code]].kind == TokenKind::kPunct &&
                         (compound || colon == last_code);
      const bool one_liner = !opens && compound && colon != npos;
      if (!opens && !one_liner) {
        add_simple(block, code, item.error);
        continue;
      }
      const std::size_t split = opens ? last_code : colon;
      const auto first = code.front();
      const auto s = t_.add(NodeKind::kStatement, block, toks_[first].begin,
                            toks_[first].end);
      t_.node(s).error = item.error;
      for (std::size_t i = 0; i <= split; ++i)
        t_.add_token(s, static_cast<int>(code[i]));
      const auto& colon_tok = toks_[code[split]];
      const auto b = t_.add(NodeKind::kBlock, s, colon_tok.end, colon_tok.end);
      set_definition(s, code);
      if (t_.node(s).kind != NodeKind::kStatement) t_.node(s).body = b;
      if (opens) {
        // Trailing comment after the ':' stays on the header.
        for (std::size_t i = split + 1; i < code.size(); ++i)
          t_.add_token(s, static_cast<int>(code[i]));
        awaiting = b;
        awaiting_indent = indent;
      } else {
        std::vector<std::size_t> body(code.begin() + static_cast<long>(split) + 1,
                                      code.end());
        add_simple(b, body, item.error);
      }
    }
    if (awaiting != kNoNode) t_.node(awaiting).error = true;
    while (stack_.size() > 1) close_top();
    for (auto c : pending_) place_comment(t_.root(), c);
    pending_.clear();
  }
};

}  // namespace

void parse_python(SyntaxTree& tree) { PythonParser(tree).run(); }

}  // namespace forge::detail
