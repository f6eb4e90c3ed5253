#include "blimp/kvdoc.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace blimp::kv {

const Value* Table::find(std::string_view key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

void Table::set(std::string key, Value v) {
  for (auto& [k, old] : entries) {
    if (k == key) {
      old = std::move(v);
      return;
    }
  }
  entries.emplace_back(std::move(key), std::move(v));
}

const Table* Document::table(std::string_view name) const {
  for (const auto& [k, t] : tables) {
    if (k == name) return &t;
  }
  return nullptr;
}

const std::vector<Table>* Document::table_array(std::string_view name) const {
  for (const auto& [k, t] : table_arrays) {
    if (k == name) return &t;
  }
  return nullptr;
}

SyntaxError::SyntaxError(const std::string& msg, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Document run() {
    Document doc;
    Table* current = &doc.root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        current = header(doc);
      } else {
        key_value(*current);
      }
      end_of_line();
    }
    return doc;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;

  bool eof() const { return pos_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }

  char get() {
    char c = s_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, line_, col_); }

  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) get();
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') get();
    }
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\r') get();
      if (peek() == '\n') {
        get();
        continue;
      }
      break;
    }
  }

  // Whitespace, comments and newlines, as allowed inside arrays.
  void skip_insignificant() {
    while (!eof()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        get();
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (peek() == '\r') get();
    if (eof()) return;
    if (peek() != '\n') fail(std::string("unexpected character '") + peek() + "'");
    get();
  }

  static bool bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string bare_key() {
    std::string k;
    while (!eof() && bare_key_char(peek())) k.push_back(get());
    if (k.empty()) fail("expected a key");
    return k;
  }

  Table* header(Document& doc) {
    const int line = line_;
    get(); // '['
    const bool array = peek() == '[';
    if (array) get();
    skip_spaces();
    std::string name = bare_key();
    skip_spaces();
    if (peek() != ']') fail("expected ']'");
    get();
    if (array) {
      if (peek() != ']') fail("expected ']]'");
      get();
      for (auto& [k, v] : doc.table_arrays) {
        if (k == name) {
          v.emplace_back().line = line;
          return &v.back();
        }
      }
      if (doc.table(name)) fail("'" + name + "' already defined as a table");
      doc.table_arrays.emplace_back(name, std::vector<Table>(1));
      doc.table_arrays.back().second.back().line = line;
      return &doc.table_arrays.back().second.back();
    }
    if (doc.table(name) || doc.table_array(name)) fail("duplicate table '" + name + "'");
    doc.tables.emplace_back(name, Table{});
    doc.tables.back().second.line = line;
    return &doc.tables.back().second;
  }

  void key_value(Table& table) {
    const int kline = line_;
    const int kcol = col_;
    std::string key = bare_key();
    skip_spaces();
    if (peek() != '=') fail("expected '=' after key '" + key + "'");
    get();
    skip_spaces();
    Value v = value();
    if (table.contains(key)) throw SyntaxError("duplicate key '" + key + "'", kline, kcol);
    table.entries.emplace_back(std::move(key), std::move(v));
  }

  Value value() {
    Value v;
    v.line = line_;
    v.column = col_;
    const char c = peek();
    if (c == '"') {
      v.data = string_literal();
    } else if (c == '[') {
      v.data = array();
    } else if (s_.substr(pos_, 4) == "true" && !bare_key_char(peek(4))) {
      for (int i = 0; i < 4; ++i) get();
      v.data = true;
    } else if (s_.substr(pos_, 5) == "false" && !bare_key_char(peek(5))) {
      for (int i = 0; i < 5; ++i) get();
      v.data = false;
    } else if (c == '+' || c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
      number(v);
    } else if (eof() || c == '\n') {
      fail("missing value");
    } else {
      fail(std::string("unexpected character '") + c + "' in value");
    }
    return v;
  }

  std::string string_literal() {
    get(); // opening quote
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = get();
      if (c == '"') break;
      if (c == '\\') {
        if (eof()) fail("unterminated escape");
        char e = get();
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: fail(std::string("unknown escape '\\") + e + "'");
        }
        continue;
      }
      out.push_back(c);
    }
    return out;
  }

  Array array() {
    get(); // '['
    Array out;
    skip_insignificant();
    if (peek() == ']') {
      get();
      return out;
    }
    while (true) {
      skip_insignificant();
      if (eof()) fail("unterminated array");
      out.push_back(value());
      skip_insignificant();
      if (peek() == ',') {
        get();
        skip_insignificant();
        if (peek() == ']') {
          get();
          return out;
        }
        continue;
      }
      if (peek() == ']') {
        get();
        return out;
      }
      fail("expected ',' or ']' in array");
    }
  }

  void number(Value& v) {
    const std::size_t start = pos_;
    std::string tok;
    while (!eof()) {
      char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' || c == '_') {
        if (c != '_') tok.push_back(c);
        get();
      } else {
        break;
      }
    }
    const char* first = tok.c_str();
    if (*first == '+') ++first;
    char* end = nullptr;
    const double d = std::strtod(first, &end);
    if (end == first || *end != '\0' || !std::isfinite(d)) {
      pos_ = start;
      fail("invalid number '" + tok + "'");
    }
    v.data = d;
    v.integral = tok.find_first_of(".eE") == std::string::npos;
  }
};

} // namespace

Document parse(std::string_view text) { return Parser(text).run(); }

std::string format_number(double v) {
  if (v == 0.0) return "0.0";
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

} // namespace blimp::kv
