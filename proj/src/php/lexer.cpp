#include "dekant/php/lexer.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <cctype>

namespace dekant::php {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || (c & 0x80); }
bool ident_char(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

constexpr std::array<std::string_view, 12> kCasts = {"int",    "integer", "bool",  "boolean", "float", "double",
                                                     "real",   "string",  "array", "object",  "unset", "binary"};

constexpr std::array<std::string_view, 45> kOps = {
    "<=>", "**=", "...", "<<=", ">>=", "===", "!==", "?\?=", "?->", "<<", ">>", "<=", ">=", "==", "!=",
    "<>",  "&&",  "||",  "??",  "->",  "=>",  "::",  "++",  "--",  "+=", "-=", "*=", "/=", ".=", "%=",
    "&=",  "|=",  "^=",  "**",  "+",   "-",   "*",   "/",   "%",   "=",  ".",  "<",  ">",  "!",  "?"};
constexpr std::string_view kSingleOps = "&|^~@,;:()[]{}$\\";

class Lexer {
 public:
  Lexer(std::string_view src, std::string path, Pos origin, bool php_mode)
      : src_(src), path_(std::move(path)), line_(origin.line), col_(origin.col), php_(php_mode) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (i_ < src_.size()) {
      if (!php_) {
        html(out);
        continue;
      }
      if (skip_space_and_comments()) continue;
      if (i_ >= src_.size()) break;
      out.push_back(next());
      if (out.back().kind == Tok::CloseTag) php_ = false;
    }
    out.push_back(Token{Tok::End, "", here(), {}});
    return out;
  }

 private:
  Pos here() const { return {line_, col_}; }
  char peek(std::size_t k = 0) const { return i_ + k < src_.size() ? src_[i_ + k] : '\0'; }
  bool starts(std::string_view s) const { return src_.substr(i_, s.size()) == s; }

  bool starts_ci(std::string_view s) const {
    if (i_ + s.size() > src_.size()) return false;
    for (std::size_t k = 0; k < s.size(); ++k)
      if (std::tolower(static_cast<unsigned char>(src_[i_ + k])) != s[k]) return false;
    return true;
  }

  void advance(std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i_ < src_.size(); ++k, ++i_) {
      if (src_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }

  [[noreturn]] void fail(Pos p, const std::string& msg) const { throw ParseError(path_, p, msg); }

  void html(std::vector<Token>& out) {
    const Pos start = here();
    std::string text;
    while (i_ < src_.size()) {
      if (starts_ci("<?php") && !ident_char(peek(5))) {
        advance(5);
        php_ = true;
        break;
      }
      if (starts("<?=")) {
        advance(3);
        php_ = true;
        flush_html(out, text, start);
        out.push_back(Token{Tok::Ident, "echo", here(), {}});
        return;
      }
      if (starts("<?") && !starts("<?xml")) {
        advance(2);
        php_ = true;
        break;
      }
      text += peek();
      advance();
    }
    flush_html(out, text, start);
  }

  static void flush_html(std::vector<Token>& out, const std::string& text, Pos start) {
    if (text.find_first_not_of(" \t\r\n") != std::string::npos) out.push_back(Token{Tok::InlineHtml, text, start, {}});
  }

  bool skip_space_and_comments() {
    const char c = peek();
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      return true;
    }
    if (c == '#' && peek(1) != '[') return skip_line_comment();
    if (c == '/' && peek(1) == '/') return skip_line_comment();
    if (c == '/' && peek(1) == '*') {
      const Pos p = here();
      advance(2);
      while (i_ < src_.size() && !starts("*/")) advance();
      if (i_ >= src_.size()) fail(p, "unterminated comment");
      advance(2);
      return true;
    }
    return false;
  }

  bool skip_line_comment() {
    while (i_ < src_.size() && peek() != '\n' && !starts("?>")) advance();
    return true;
  }

  Token next() {
    const Pos p = here();
    const char c = peek();
    if (starts("?>")) {
      advance(2);
      if (peek() == '\n') advance();
      return {Tok::CloseTag, ";", p, {}};
    }
    if (c == '$' && ident_start(peek(1))) {
      advance();
      return {Tok::Variable, take_ident(), p, {}};
    }
    if (ident_start(c) || (c == '\\' && ident_start(peek(1)))) {
      std::string name;
      while (ident_char(peek()) || (peek() == '\\' && ident_start(peek(1)))) {
        name += peek();
        advance();
      }
      return {Tok::Ident, name, p, {}};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))))
      return {Tok::Number, take_number(), p, {}};
    if (c == '\'') return {Tok::String, take_single_quoted(), p, {}};
    if (c == '"') {
      advance();
      Token t{Tok::Template, "", p, {}};
      t.parts = take_template("\"", p);
      return t;
    }
    if (starts("<<<")) return take_heredoc(p);
    if (c == '(') {
      if (auto cast = try_cast()) return {Tok::Cast, *cast, p, {}};
    }
    for (auto op : kOps)
      if (starts(op)) {
        advance(op.size());
        return {Tok::Op, std::string(op), p, {}};
      }
    if (kSingleOps.find(c) != std::string_view::npos) {
      advance();
      return {Tok::Op, std::string(1, c), p, {}};
    }
    fail(p, std::string("unexpected character '") + c + "'");
  }

  std::string take_ident() {
    std::string name;
    while (ident_char(peek())) {
      name += peek();
      advance();
    }
    return name;
  }

  std::string take_number() {
    std::string num;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X' || peek(1) == 'b' || peek(1) == 'B')) {
      num += peek();
      num += peek(1);
      advance(2);
      while (std::isxdigit(static_cast<unsigned char>(peek())) || peek() == '_') {
        num += peek();
        advance();
      }
      return num;
    }
    while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '.') {
      if (peek() == '.' && !std::isdigit(static_cast<unsigned char>(peek(1)))) break;
      num += peek();
      advance();
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (std::isdigit(static_cast<unsigned char>(peek(1))) ||
         ((peek(1) == '-' || peek(1) == '+') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
      num += peek();
      num += peek(1);
      advance(2);
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        num += peek();
        advance();
      }
    }
    return num;
  }

  std::optional<std::string> try_cast() {
    std::size_t k = 1;
    while (peek(k) == ' ' || peek(k) == '\t') ++k;
    std::size_t start = k;
    while (std::isalpha(static_cast<unsigned char>(peek(k)))) ++k;
    std::string word(src_.substr(i_ + start, k - start));
    for (auto& ch : word) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    while (peek(k) == ' ' || peek(k) == '\t') ++k;
    if (peek(k) != ')') return std::nullopt;
    for (auto c : kCasts)
      if (c == word) {
        advance(k + 1);
        return word;
      }
    return std::nullopt;
  }

  std::string take_single_quoted() {
    const Pos p = here();
    advance();
    std::string value;
    while (true) {
      if (i_ >= src_.size()) fail(p, "unterminated string");
      const char c = peek();
      if (c == '\'') {
        advance();
        return value;
      }
      if (c == '\\' && (peek(1) == '\'' || peek(1) == '\\')) {
        value += peek(1);
        advance(2);
        continue;
      }
      value += c;
      advance();
    }
  }

  // Reads interpolated content until `terminator` (a quote, or a heredoc
  // closing line handled by the caller through `limit`).
  std::vector<TemplatePart> take_template(std::string_view terminator, Pos open, std::size_t limit = std::string::npos) {
    std::vector<TemplatePart> parts;
    TemplatePart lit{false, "", here()};
    auto flush = [&] {
      if (!lit.text.empty()) parts.push_back(lit);
      lit = TemplatePart{false, "", here()};
    };
    while (true) {
      if (i_ >= src_.size() || (limit != std::string::npos && i_ >= limit)) {
        if (limit != std::string::npos) break;
        fail(open, "unterminated string");
      }
      if (!terminator.empty() && starts(terminator)) {
        advance(terminator.size());
        break;
      }
      const char c = peek();
      if (c == '\\') {
        lit.text += take_escape(terminator == "\"");
        continue;
      }
      if (c == '$' && ident_start(peek(1))) {
        flush();
        parts.push_back(take_simple_interpolation());
        lit.pos = here();
        continue;
      }
      if (c == '{' && peek(1) == '$') {
        flush();
        const Pos p = here();
        advance();
        parts.push_back(TemplatePart{true, take_braced(p), p});
        lit.pos = here();
        continue;
      }
      if (c == '$' && peek(1) == '{') {
        flush();
        const Pos p = here();
        advance(2);
        std::string inner = take_braced(p);
        if (!inner.empty() && std::all_of(inner.begin(), inner.end(), ident_char))
          inner = "$" + inner;
        else
          inner = "${" + inner + "}";
        parts.push_back(TemplatePart{true, inner, p});
        lit.pos = here();
        continue;
      }
      lit.text += c;
      advance();
    }
    flush();
    return parts;
  }

  std::string take_escape(bool double_quoted) {
    const char e = peek(1);
    auto simple = [&](char out) {
      advance(2);
      return std::string(1, out);
    };
    switch (e) {
      case 'n': return simple('\n');
      case 't': return simple('\t');
      case 'r': return simple('\r');
      case 'v': return simple('\v');
      case 'e': return simple('\x1b');
      case 'f': return simple('\f');
      case '\\': return simple('\\');
      case '$': return simple('$');
      case '"':
        if (double_quoted) return simple('"');
        break;
      case 'x':
        if (std::isxdigit(static_cast<unsigned char>(peek(2)))) {
          advance(2);
          std::string hex;
          while (hex.size() < 2 && std::isxdigit(static_cast<unsigned char>(peek()))) {
            hex += peek();
            advance();
          }
          return std::string(1, static_cast<char>(std::stoi(hex, nullptr, 16)));
        }
        break;
      default:
        if (e >= '0' && e <= '7') {
          advance();
          std::string oct;
          while (oct.size() < 3 && peek() >= '0' && peek() <= '7') {
            oct += peek();
            advance();
          }
          return std::string(1, static_cast<char>(std::stoi(oct, nullptr, 8) & 0xff));
        }
    }
    advance();
    return "\\";
  }

  TemplatePart take_simple_interpolation() {
    TemplatePart part{true, "", here()};
    advance();
    part.text = "$" + take_ident();
    if (peek() == '[') {
      std::size_t k = 1;
      std::string key;
      bool neg = peek(k) == '-';
      if (neg) ++k;
      while (ident_char(peek(k)) || (peek(k) == '$' && k == 1)) key += peek(k++);
      if (peek(k) == ']' && !key.empty()) {
        std::string rendered;
        if (key[0] == '$' || std::isdigit(static_cast<unsigned char>(key[0])))
          rendered = (neg ? "-" : "") + key;
        else
          rendered = "'" + key + "'";
        part.text += "[" + rendered + "]";
        advance(k + 1);
      }
    } else if (peek() == '-' && peek(1) == '>' && ident_start(peek(2))) {
      advance(2);
      part.text += "->" + take_ident();
    }
    return part;
  }

  // Positioned just after '{'; returns the text up to the matching '}'.
  std::string take_braced(Pos open) {
    int depth = 1;
    std::string text;
    while (true) {
      if (i_ >= src_.size()) fail(open, "unterminated interpolation");
      const char c = peek();
      if (c == '{') ++depth;
      if (c == '}' && --depth == 0) {
        advance();
        return text;
      }
      if (c == '\'' ) {
        const std::size_t before = i_;
        take_single_quoted();
        text += std::string(src_.substr(before, i_ - before));
        continue;
      }
      text += c;
      advance();
    }
  }

  Token take_heredoc(Pos p) {
    advance(3);
    while (peek() == ' ' || peek() == '\t') advance();
    bool nowdoc = false;
    bool quoted = false;
    if (peek() == '\'') {
      nowdoc = true;
      advance();
    } else if (peek() == '"') {
      quoted = true;
      advance();
    }
    const std::string label = take_ident();
    if (label.empty()) fail(p, "bad heredoc label");
    if (nowdoc || quoted) advance();
    if (peek() == '\r') advance();
    if (peek() != '\n') fail(p, "heredoc label must end the line");
    advance();

    // Find the closing line: optional indentation, the label, then a non-identifier char.
    std::size_t scan = i_;
    std::size_t close_begin = std::string::npos, close_end = 0;
    while (scan <= src_.size()) {
      std::size_t k = scan;
      while (k < src_.size() && (src_[k] == ' ' || src_[k] == '\t')) ++k;
      if (src_.substr(k, label.size()) == label &&
          (k + label.size() >= src_.size() || !ident_char(src_[k + label.size()]))) {
        close_begin = scan;
        close_end = k + label.size();
        break;
      }
      const auto nl = src_.find('\n', scan);
      if (nl == std::string_view::npos) break;
      scan = nl + 1;
    }
    if (close_begin == std::string::npos) fail(p, "unterminated heredoc");
    const std::size_t body_end = close_begin > i_ ? close_begin - 1 : i_;  // drop the final newline

    Token t{Tok::Template, "", p, {}};
    if (nowdoc) {
      t.kind = Tok::String;
      t.text = std::string(src_.substr(i_, body_end - i_));
    } else {
      t.parts = take_template("", p, body_end);
    }
    while (i_ < close_end) advance();
    return t;
  }

  std::string_view src_;
  std::string path_;
  std::size_t i_ = 0;
  int line_;
  int col_;
  bool php_;
};

}  // namespace

std::vector<Token> lex(std::string_view source, const std::string& path) {
  return Lexer(source, path, {1, 1}, false).run();
}

std::vector<Token> lex_fragment(std::string_view code, const std::string& path, Pos origin) {
  return Lexer(code, path, origin, true).run();
}

}  // namespace dekant::php
