#pragma once

#include <stdexcept>
#include <string>

#include "dekant/isl.hpp"
#include "dekant/php/ast.hpp"
#include "dekant/slicer.hpp"
#include "dekant/token_config.hpp"

namespace dekant {

class TranslateError : public std::runtime_error {
 public:
  TranslateError(int line, const std::string& what) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// An If statement translates as its header: cond ... cond.
IslInstruction translate_stmt(const php::Stmt& stmt, const TokenConfig& config);
IslInstruction translate_stmt(const SliceStmt& stmt, const TokenConfig& config);

SliceIsl translate_slice(const Slice& slice, const TokenConfig& config);

// Tab-separated line / slice-isl / variable map, one instruction per line.
std::string dump_isl(const SliceIsl& slice);

}  // namespace dekant
