#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dekant/php/ast.hpp"

namespace dekant::php {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, Pos pos, const std::string& msg)
      : std::runtime_error(path + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + msg),
        path_(std::move(path)),
        pos_(pos) {}
  const std::string& path() const { return path_; }
  Pos pos() const { return pos_; }

 private:
  std::string path_;
  Pos pos_;
};

enum class Tok {
  InlineHtml,  // text outside <?php ... ?>
  Variable,    // $name (text = name)
  Ident,
  String,      // single-quoted or nowdoc: text = value
  Template,    // double-quoted or heredoc: parts
  Number,
  Cast,        // (int) etc: text = type
  Op,          // punctuation / operators
  CloseTag,    // ?> acts as ';'
  End,
};

struct TemplatePart {
  bool is_expr = false;
  std::string text;  // literal value, or PHP expression source
  Pos pos;
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Pos pos;
  std::vector<TemplatePart> parts;
};

std::vector<Token> lex(std::string_view source, const std::string& path);
// Lexes an expression fragment (from string interpolation) that starts at `origin`.
std::vector<Token> lex_fragment(std::string_view code, const std::string& path, Pos origin);

}  // namespace dekant::php
