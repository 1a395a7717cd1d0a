#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dekant::php {

struct Pos {
  int line = 0;
  int col = 0;
};

struct Expr {
  enum class Kind {
    Variable,     // text = name without '$'
    Index,        // kids = {base, key} or {base} for $a[]
    Property,     // kids = {object}, text = property name
    StaticProp,   // text = "Class::$name"
    Literal,      // text = value; numeric marks number literals
    Const,        // bare identifier: true, null, PHP_EOL, ...
    Interpolated, // kids = parts (Literal or expressions)
    Binary,       // text = operator
    Unary,        // text = operator ("!", "-", "++", "post++", "@", ...)
    Cast,         // text = target type
    Ternary,      // kids = {cond, then, else}; then may be absent for ?:
    Choice,       // desugared ternary/??: value is one of kids
    Assign,       // text = operator; kids = {target, value}
    Call,         // text = function name; kids = args
    MethodCall,   // text = method; kids = {object, args...}
    StaticCall,   // text = "Class::method"; kids = args
    New,          // text = class; kids = args
    Array,        // kids = values (keys dropped when the value is what flows)
    Opaque,       // closures, list(), ... ; text = summary
  };

  Kind kind = Kind::Literal;
  std::string text;
  std::vector<Expr> kids;
  bool numeric = false;
  bool cut = false;  // inlining gave up on this call
  Pos pos;

  static Expr variable(std::string name, Pos p = {}) { return {Kind::Variable, std::move(name), {}, false, false, p}; }
  static Expr literal(std::string value, Pos p = {}) { return {Kind::Literal, std::move(value), {}, false, false, p}; }
};

struct Stmt {
  enum class Kind {
    Assign,         // target, value; op "=" ".=" ...
    TernaryAssign,  // Assign whose value is a ternary (before desugaring)
    Expr,           // value
    Call,           // value is the call expression
    If,             // value = condition, body / orelse; elseif chains nest in orelse
    Echo,           // args; op = "echo" or "print"
    Include,        // value; op = include kind
    Return,         // value optional (has_value)
    Loop,           // op = while/for/foreach/do; body; see below
    Global,         // op = "global"/"static"; args
    InlineHtml,
    Opaque,         // unsupported construct; op = leading keyword
  };

  Kind kind = Kind::Expr;
  Pos pos;
  int end_line = 0;
  std::string op;
  Expr target;
  Expr value;
  bool has_value = false;
  std::vector<Expr> args;   // echo/global args, for-loop init, foreach key
  std::vector<Expr> step;   // for-loop step expressions
  std::vector<Stmt> body;
  std::vector<Stmt> orelse;
  bool elseif = false;      // this If is an elseif arm
  Pos else_pos;             // position of the else/elseif keyword when orelse is used
  std::string raw;          // token text of an opaque statement
};

struct Param {
  std::string name;
  std::optional<Expr> default_value;
  bool by_ref = false;
};

struct Function {
  std::string name;
  std::vector<Param> params;
  std::vector<Stmt> body;
  Pos pos;
};

struct Ast {
  std::string path;
  std::vector<Stmt> statements;
  std::map<std::string, Function> functions;  // lower-cased names
  int line_count = 0;
};

bool same_expr(const Expr& a, const Expr& b);
bool same_stmt(const Stmt& a, const Stmt& b);
bool same_ast(const Ast& a, const Ast& b);

}  // namespace dekant::php
