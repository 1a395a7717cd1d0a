#include "dekant/translator.hpp"

#include <cstdlib>
#include <sstream>

#include "dekant/callsite.hpp"

namespace dekant {

using php::Expr;
using php::Stmt;
using K = Expr::Kind;
using SK = Stmt::Kind;

namespace {

struct Piece {
  Piece(IslToken t, std::string n = std::string(kNoName), std::string k = {})
      : token(t), name(std::move(n)), key(std::move(k)) {}
  IslToken token;
  std::string name;
  std::string key;
};

using Pieces = std::vector<Piece>;

void append(Pieces& out, Pieces more) {
  out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
}

// Non-empty groups joined by conc.
Pieces joined(std::vector<Pieces> groups) {
  Pieces out;
  for (auto& g : groups) {
    if (g.empty()) continue;
    if (!out.empty()) out.push_back({IslToken::conc});
    append(out, std::move(g));
  }
  return out;
}

void flatten_concat(const Expr& e, std::vector<const Expr*>& out) {
  if (is_concat(e) && e.kids.size() == 2) {
    flatten_concat(e.kids[0], out);
    flatten_concat(e.kids[1], out);
  } else {
    out.push_back(&e);
  }
}

class Translator {
 public:
  explicit Translator(const TokenConfig& config) : config_(config) {}

  Pieces value(const Expr& e) const {
    switch (e.kind) {
      case K::Variable:
        if (config_.is_input(e.text)) return {{IslToken::input, std::string(kNoName), e.text}};
        return {{IslToken::var, e.text}};
      case K::Index:
      case K::Property:
      case K::StaticProp:
        if (is_input_access(e, config_)) return {{IslToken::input, std::string(kNoName), input_key(e)}};
        if (auto n = tracked_name(e)) return {{IslToken::var, *n}};
        return e.kids.empty() ? Pieces{} : value(e.kids[0]);
      case K::Binary:
        if (is_concat(e)) {
          std::vector<const Expr*> parts;
          flatten_concat(e, parts);
          std::vector<Pieces> groups;
          for (const Expr* p : parts) groups.push_back(value(*p));
          return joined(std::move(groups));
        }
        if (is_logical(e)) return condition(e);
        if (e.text == "??") return choice(e);
        return {};
      case K::Unary:
        if (e.text == "!") return condition(e);
        if (e.text == "@" && !e.kids.empty()) return value(e.kids[0]);
        return {};
      case K::Cast:
        return e.kids.empty() ? Pieces{} : value(e.kids[0]);
      case K::Ternary:
        // the condition only picks a value
        if (e.kids.size() == 3) return joined({value(e.kids[1]), value(e.kids[2])});
        return choice(e);
      case K::Choice:
      case K::Array:
      case K::New:
      case K::Interpolated:
        return choice(e);
      case K::Assign:
        return e.kids.size() == 2 ? value(e.kids[1]) : Pieces{};
      case K::Call:
      case K::MethodCall:
      case K::StaticCall:
        return call(e);
      default:
        return {};
    }
  }

  // Checks are concatenated without conc; comparisons contribute nothing.
  Pieces condition(const Expr& e) const {
    if (is_logical(e)) {
      Pieces out;
      for (const auto& k : e.kids) append(out, condition(k));
      return out;
    }
    if (e.kind == K::Unary && e.text == "!" && !e.kids.empty()) return condition(e.kids[0]);
    if (e.kind == K::Binary && !is_concat(e) && e.text != "??") return {};
    return value(e);
  }

  Pieces header(const Expr& cond) const {
    Pieces inner = condition(cond);
    if (inner.empty()) inner = bare_vars(cond);
    Pieces out{{IslToken::cond}};
    append(out, std::move(inner));
    out.push_back({IslToken::cond});
    return out;
  }

  Pieces sink(const Expr& call, const FunctionSpec& spec) const {
    const auto args = call_args(call);
    std::vector<Pieces> groups;
    for (std::size_t i = 0; i < args.size(); ++i)
      if (spec.is_relevant(i)) groups.push_back(value(args[i]));
    Pieces out{{IslToken::ss}};
    append(out, joined(std::move(groups)));
    return out;
  }

  Pieces sink_args(const std::vector<Expr>& args) const {
    std::vector<Pieces> groups;
    for (const auto& a : args) groups.push_back(value(a));
    Pieces out{{IslToken::ss}};
    append(out, joined(std::move(groups)));
    return out;
  }

 private:
  Pieces choice(const Expr& e) const {
    std::vector<Pieces> groups;
    for (const auto& k : e.kids) groups.push_back(value(k));
    return joined(std::move(groups));
  }

  Pieces bare_vars(const Expr& e) const {
    if (e.kind == K::Variable || e.kind == K::Index || e.kind == K::Property || e.kind == K::StaticProp) return value(e);
    Pieces out;
    for (const auto& k : e.kids) append(out, bare_vars(k));
    return out;
  }

  // A literal string operand of a modifier still occupies the param slot.
  Pieces param(std::span<const Expr> args, std::size_t i) const {
    if (i < args.size()) {
      Pieces p = value(args[i]);
      if (!p.empty()) return p;
    }
    return {{IslToken::var}};
  }

  IslToken length_token(std::span<const Expr> args, std::size_t i) const {
    if (i < args.size()) {
      const Expr* e = &args[i];
      bool negative = false;
      if (e->kind == K::Unary && e->text == "-" && !e->kids.empty()) {
        negative = true;
        e = &e->kids[0];
      }
      if (e->kind == K::Literal && e->numeric) {
        const long n = std::strtol(e->text.c_str(), nullptr, 0);
        const auto len = static_cast<std::size_t>(std::labs(negative ? -n : n));
        return len < config_.char_threshold() ? IslToken::char5 : IslToken::char6;
      }
    }
    return IslToken::char6;  // unknown length
  }

  static bool zero_offset(std::span<const Expr> args, std::size_t i) {
    return i < args.size() && args[i].kind == K::Literal && args[i].numeric && std::strtol(args[i].text.c_str(), nullptr, 0) == 0;
  }

  Pieces call(const Expr& e) const {
    const auto args = call_args(e);
    const FunctionSpec* spec = lookup_call(e, config_);
    if (!spec) {
      std::vector<Pieces> groups;
      if (e.kind == K::MethodCall && !e.cut) groups.push_back(value(e.kids[0]));
      for (const auto& a : args) groups.push_back(value(a));
      return joined(std::move(groups));
    }
    switch (spec->token) {
      case IslToken::ss:
        return sink(e, *spec);
      case IslToken::add_str: {
        Pieces out{{IslToken::add_str}};
        append(out, param(args, 0));
        out.push_back({length_token(args, 1)});
        append(out, param(args, 2));
        return out;
      }
      case IslToken::sub_str: {
        Pieces out{{IslToken::sub_str}};
        append(out, param(args, 0));
        out.push_back({length_token(args, 2)});
        if (!zero_offset(args, 1)) out.push_back({IslToken::start_where});
        return out;
      }
      case IslToken::sub_str_replace: {
        Pieces out{{IslToken::sub_str_replace}};
        append(out, param(args, 0));
        out.push_back({length_token(args, 3)});
        append(out, param(args, 1));
        if (!zero_offset(args, 2)) out.push_back({IslToken::start_where});
        return out;
      }
      default: {
        std::vector<Pieces> groups;
        for (std::size_t i : data_args(e, config_)) groups.push_back(value(args[i]));
        Pieces inner = joined(std::move(groups));
        if (inner.empty()) return {};
        Pieces out{{spec->token}};
        append(out, std::move(inner));
        return out;
      }
    }
  }

  const TokenConfig& config_;
};

Pieces translate_pieces(const Stmt& s, const TokenConfig& config, bool& assignment) {
  const Translator tr(config);
  assignment = false;
  switch (s.kind) {
    case SK::Assign:
    case SK::TernaryAssign: {
      const auto name = tracked_name(s.target);
      if (!name) throw TranslateError(s.pos.line, "assignment target is not a variable");
      Pieces out = tr.value(s.value);
      out.push_back({IslToken::var, *name});
      assignment = true;
      return out;
    }
    case SK::Echo: {
      if (!config.lookup(s.op)) throw TranslateError(s.pos.line, "'" + s.op + "' is not a configured sink");
      return tr.sink_args(s.args);
    }
    case SK::Include: {
      if (!config.lookup(s.op)) throw TranslateError(s.pos.line, "'" + s.op + "' is not a configured sink");
      return tr.sink_args({s.value});
    }
    case SK::If:
      return tr.header(s.value);
    case SK::Expr:
    case SK::Call:
    case SK::Return:
      if (s.has_value) return tr.value(s.value);
      return {};
    default:
      throw TranslateError(s.pos.line, "statement kind is not translatable");
  }
}

IslInstruction finish(Pieces pieces, bool assignment, const SourceLoc& loc) {
  if (pieces.empty()) throw TranslateError(loc.line, "statement translates to no tokens");
  IslInstruction out;
  out.loc = loc;
  out.varmap.is_assignment = assignment;
  for (auto& p : pieces) {
    out.tokens.push_back(p.token);
    out.varmap.names.push_back(std::move(p.name));
    out.input_keys.push_back(std::move(p.key));
  }
  if (!validate_sequence(out.tokens))
    throw TranslateError(loc.line, "'" + join_tokens(out.tokens) + "' is not a valid ISL statement");
  return out;
}

}  // namespace

IslInstruction translate_stmt(const Stmt& stmt, const TokenConfig& config) {
  bool assignment = false;
  Pieces pieces = translate_pieces(stmt, config, assignment);
  return finish(std::move(pieces), assignment, {{}, stmt.pos.line, stmt.pos.col});
}

IslInstruction translate_stmt(const SliceStmt& stmt, const TokenConfig& config) {
  const SourceLoc loc{stmt.file, stmt.line, stmt.stmt.pos.col};
  if (stmt.role == SliceRole::ElseMarker) return finish({{IslToken::cond}}, false, loc);
  bool assignment = false;
  Pieces pieces = translate_pieces(stmt.stmt, config, assignment);
  if (stmt.in_then) pieces.insert(pieces.begin(), Piece{IslToken::cond});
  return finish(std::move(pieces), assignment, loc);
}

SliceIsl translate_slice(const Slice& slice, const TokenConfig& config) {
  SliceIsl out;
  out.sink_class = slice.sink_class;
  out.origin = slice.file;
  out.entry_line = slice.entry_line;
  out.sink_line = slice.sink_line;
  out.sink = slice.sink;
  for (const auto& st : slice.statements) out.instructions.push_back(translate_stmt(st, config));
  return out;
}

std::string dump_isl(const SliceIsl& slice) {
  std::ostringstream out;
  out << "# " << slice.origin << " " << label_of(slice.sink_class) << " entry=" << slice.entry_line
      << " sink=" << slice.sink_line << "\n";
  for (const auto& in : slice.instructions)
    out << in.loc.line << "\t" << join_tokens(in.tokens) << "\t" << render_varmap(in.varmap) << "\n";
  return out.str();
}

}  // namespace dekant
