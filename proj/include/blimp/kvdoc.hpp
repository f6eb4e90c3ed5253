#pragma once

// Minimal key-value tree document used for design files: a TOML subset with
// `[table]` and `[[array-of-tables]]` headers, bare keys, and string, number,
// boolean and (nested) array values. Comments start with '#'.

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace blimp::kv {

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<double, bool, std::string, Array> data;
  bool integral = false;
  int line = 0;
  int column = 0;

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
};

/// Insertion-ordered key/value table.
struct Table {
  std::vector<std::pair<std::string, Value>> entries;
  int line = 0;

  const Value* find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key) != nullptr; }
  void set(std::string key, Value v);
};

struct Document {
  Table root;
  std::vector<std::pair<std::string, Table>> tables;
  std::vector<std::pair<std::string, std::vector<Table>>> table_arrays;

  const Table* table(std::string_view name) const;
  const std::vector<Table>* table_array(std::string_view name) const;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& msg, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

Document parse(std::string_view text);

/// Renders a number so it parses back to the identical double.
std::string format_number(double v);

} // namespace blimp::kv
