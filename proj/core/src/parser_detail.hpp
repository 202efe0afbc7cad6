#pragma once

#include "forge/syntax_tree.hpp"

namespace forge::detail {

// Each parser fills the root of `tree` from its token stream.
void parse_brace(SyntaxTree& tree);
void parse_python(SyntaxTree& tree);
void parse_ruby(SyntaxTree& tree);

// Moves children [first, last] of `parent` under a new node of `kind`,
// which takes their place. Returns the new node.
NodeId wrap_children(SyntaxTree& tree, NodeId parent, std::size_t first,
                     std::size_t last, NodeKind kind);

std::string anonymous_name(const SyntaxTree& tree, NodeId id);

}  // namespace forge::detail
