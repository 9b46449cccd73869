#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace dvkit {

/// Base of every domain error raised by the toolkit.
///
/// `kind()` is a stable identifier (e.g. "SyntaxError") that the CLI puts
/// into its structured error report; `line`/`column`/`field` are filled in
/// when the failing input has a position.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

  std::optional<std::size_t> line;
  std::optional<std::size_t> column;
  std::optional<std::string> field;

 private:
  std::string kind_;
};

/// Error with a (line, column) position in a text source.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line_no, std::size_t col_no, const std::string& what)
      : Error("SyntaxError", std::to_string(line_no) + ":" +
                                 std::to_string(col_no) + ": " + what) {
    line = line_no;
    column = col_no;
  }
};

/// A numeric invariant of a named field failed.
class RangeError : public Error {
 public:
  RangeError(const std::string& field_name, const std::string& what)
      : Error("RangeError", field_name + ": " + what) {
    field = field_name;
  }
};

/// Line-delimited record failed schema validation.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line_no, const std::string& field_name,
              const std::string& what)
      : Error("SchemaError", "line " + std::to_string(line_no) + ": " +
                                 field_name + ": " + what) {
    line = line_no;
    field = field_name;
  }
};

}  // namespace dvkit
