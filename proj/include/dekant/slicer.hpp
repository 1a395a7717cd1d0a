#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "dekant/isl.hpp"
#include "dekant/php/ast.hpp"
#include "dekant/token_config.hpp"

namespace dekant {

struct SliceOptions {
  std::size_t path_cap = 64;        // distinct slices per sink
  std::size_t path_budget = 16384;  // complete paths walked per file
  int inline_depth = 3;
  std::string root;                 // base for literal include paths; empty: the file's directory
  std::vector<VulnClass> classes;   // empty: every class
};

enum class SliceRole { Plain, Header, ElseMarker };

struct SliceStmt {
  php::Stmt stmt;  // an If header keeps only its condition
  SliceRole role = SliceRole::Plain;
  bool in_then = false;  // nearest enclosing kept branch is a then-branch
  bool in_loop = false;
  std::string file;
  int line = 0;
};

struct Slice {
  std::string file;
  std::vector<SliceStmt> statements;
  int entry_line = 0;
  int sink_line = 0;
  VulnClass sink_class = VulnClass::SQLI;
  std::string sink;
  std::vector<std::string> branches;  // "3:then", "3:else" along the path
  std::size_t path_index = 0;
  bool loop_approx = false;
  bool cut = false;
};

struct SliceResult {
  std::vector<Slice> slices;
  std::vector<std::string> diagnostics;  // "path:line: message"
};

SliceResult extract_slices(const php::Ast& ast, const TokenConfig& config, const SliceOptions& options = {});

// Splices user-defined callees into the statement list. Callee variables are
// renamed "<function>.<var>"; calls left once `depth` runs out are marked cut.
std::vector<php::Stmt> inline_calls(const std::vector<php::Stmt>& stmts,
                                    const std::map<std::string, php::Function>& functions, int depth,
                                    std::vector<std::string>* diagnostics = nullptr, const std::string& file = {});

// Moves non-atomic data arguments of string/sanitization/check functions into
// temporaries so every such call takes a single parameter token.
std::vector<php::Stmt> hoist_arguments(const std::vector<php::Stmt>& stmts, const TokenConfig& config);

std::string dump_slices(const std::vector<Slice>& slices);

}  // namespace dekant
