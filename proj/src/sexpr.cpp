#include "dvkit/sexpr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "dvkit/error.hpp"

namespace dvkit::sexpr {

namespace {

bool is_delimiter(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' ||
         c == '"' || c == ';';
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  const auto first = static_cast<unsigned char>(s.front());
  if (!std::isalpha(first) && s.front() != '_') return false;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (!std::isalnum(u) && c != '_' && c != '-' && c != '.') return false;
  }
  return true;
}

bool looks_numeric(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i < s.size() && s[i] == '.') ++i;
  return i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]));
}

class Reader {
 public:
  explicit Reader(std::string_view src) : src_(src) {}

  std::vector<Node> all() {
    std::vector<Node> out;
    skip_space();
    while (pos_ < src_.size()) {
      out.push_back(datum());
      skip_space();
    }
    return out;
  }

  std::size_t line() const { return line_; }
  std::size_t column() const { return col_; }

 private:
  [[noreturn]] void fail(std::size_t line, std::size_t col,
                         const std::string& what) const {
    throw SyntaxError(line, col, what);
  }

  char peek() const { return src_[pos_]; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = peek();
      if (c == ';') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Node datum() {
    Node node;
    node.line = line_;
    node.column = col_;
    const char c = peek();
    if (c == '(') {
      advance();
      node.type = NodeType::kList;
      for (;;) {
        skip_space();
        if (pos_ >= src_.size())
          fail(node.line, node.column, "unterminated list");
        if (peek() == ')') {
          advance();
          break;
        }
        node.items.push_back(datum());
      }
      return node;
    }
    if (c == ')') fail(line_, col_, "unexpected ')'");
    if (c == '"') {
      node.type = NodeType::kString;
      node.text = string_body(node.line, node.column);
      return node;
    }
    const std::size_t start = pos_;
    while (pos_ < src_.size() && !is_delimiter(peek())) advance();
    const std::string_view tok = src_.substr(start, pos_ - start);
    if (tok.front() == ':') {
      if (!is_identifier(tok.substr(1)))
        fail(node.line, node.column, "malformed keyword '" + std::string(tok) + "'");
      node.type = NodeType::kKeyword;
      node.text = std::string(tok.substr(1));
      return node;
    }
    if (looks_numeric(tok)) {
      const char* first = tok.data();
      if (*first == '+') ++first;
      const char* last = tok.data() + tok.size();
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last || !std::isfinite(v))
        fail(node.line, node.column, "malformed number '" + std::string(tok) + "'");
      node.type = NodeType::kNumber;
      node.number = v;
      node.text = std::string(tok);
      return node;
    }
    if (!is_identifier(tok))
      fail(node.line, node.column, "unexpected token '" + std::string(tok) + "'");
    node.type = NodeType::kSymbol;
    node.text = std::string(tok);
    return node;
  }

  std::string string_body(std::size_t line, std::size_t col) {
    advance();  // opening quote
    std::string out;
    for (;;) {
      if (pos_ >= src_.size()) fail(line, col, "unterminated string");
      const char c = peek();
      if (c == '"') {
        advance();
        return out;
      }
      if (c == '\\') {
        const std::size_t el = line_, ec = col_;
        advance();
        if (pos_ >= src_.size()) fail(line, col, "unterminated string");
        const char e = peek();
        if (e != '"' && e != '\\') fail(el, ec, "unknown escape");
        out.push_back(e);
        advance();
        continue;
      }
      if (c == '\n') fail(line_, col_, "newline inside string");
      out.push_back(c);
      advance();
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace

const char* type_name(NodeType t) {
  switch (t) {
    case NodeType::kList: return "list";
    case NodeType::kKeyword: return "keyword";
    case NodeType::kSymbol: return "symbol";
    case NodeType::kString: return "string";
    case NodeType::kNumber: return "number";
  }
  return "?";
}

std::vector<Node> read_all(std::string_view source) {
  return Reader(source).all();
}

Node read_one(std::string_view source) {
  Reader reader(source);
  auto nodes = reader.all();
  if (nodes.empty()) throw SyntaxError(1, 1, "empty input");
  if (nodes.size() > 1)
    throw SyntaxError(nodes[1].line, nodes[1].column,
                      "unexpected datum after end of form");
  return std::move(nodes.front());
}

std::vector<Field> keyword_fields(const Node& list, std::size_t skip) {
  std::vector<Field> out;
  std::set<std::string> seen;
  for (std::size_t i = skip; i < list.items.size(); i += 2) {
    const Node& key = list.items[i];
    if (!key.is(NodeType::kKeyword))
      throw SyntaxError(key.line, key.column,
                        std::string("expected keyword, found ") + type_name(key.type));
    if (i + 1 >= list.items.size())
      throw SyntaxError(key.line, key.column, "keyword :" + key.text + " has no value");
    if (!seen.insert(key.text).second)
      throw SyntaxError(key.line, key.column, "duplicate keyword :" + key.text);
    out.push_back({&key, &list.items[i + 1]});
  }
  return out;
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // fold -0
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace dvkit::sexpr
