#pragma once

#include <string>
#include <string_view>

#include "dekant/php/ast.hpp"
#include "dekant/php/lexer.hpp"

namespace dekant::php {

// Throws ParseError with line/column on malformed supported constructs.
Ast parse_file(std::string_view source, const std::string& path);

// Pretty-prints back to PHP; parse(print(ast)) is structurally equal to ast.
std::string print_ast(const Ast& ast);
std::string print_stmt(const Stmt& stmt, int indent = 0);
std::string print_expr(const Expr& expr);

// Removes ternaries, ?? and interpolation; turns compound assignment into '='.
Ast desugar(const Ast& ast);
Stmt desugar(const Stmt& stmt);
Expr desugar(const Expr& expr);

}  // namespace dekant::php
