#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dvkit/error.hpp"

namespace dvkit::sexpr {

enum class NodeType { kList, kKeyword, kSymbol, kString, kNumber };

/// One datum of the keyword s-expression syntax shared by task specs and
/// retrieval queries. Keywords keep their text without the leading ':'.
struct Node {
  NodeType type = NodeType::kList;
  std::string text;
  double number = 0.0;
  std::vector<Node> items;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is(NodeType t) const { return type == t; }
  bool is_symbol(std::string_view s) const {
    return type == NodeType::kSymbol && text == s;
  }
};

const char* type_name(NodeType t);

/// Reads every top-level datum in `source`. `;` starts a comment that runs
/// to end of line. Throws SyntaxError on unbalanced parentheses, bad string
/// escapes, malformed numbers, or stray characters.
std::vector<Node> read_all(std::string_view source);

/// Reads exactly one datum; anything else is a SyntaxError.
Node read_one(std::string_view source);

/// Keyword/value pairs of a list after its head items, e.g. for
/// `(task :name "x" :goal (...))` with `skip = 1` returns {name, goal}.
/// Throws SyntaxError on a dangling keyword, a non-keyword where a keyword is
/// expected, or a repeated keyword.
struct Field {
  const Node* key;
  const Node* value;
};
std::vector<Field> keyword_fields(const Node& list, std::size_t skip);

/// Shortest decimal text that reads back to exactly `v`.
std::string format_number(double v);

/// Double-quoted string literal with `\"` and `\\` escapes.
std::string quote(std::string_view s);

}  // namespace dvkit::sexpr
