#include "dekant/php/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace dekant::php {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

using K = Expr::Kind;

struct Binding {
  int left;
  int right;
};

// Higher binds tighter. '.' sits below shifts and +/- as in PHP 8.
std::optional<Binding> infix_binding(const std::string& op) {
  static const std::vector<std::pair<std::set<std::string>, Binding>> table = {
      {{"or"}, {2, 3}},
      {{"xor"}, {4, 5}},
      {{"and"}, {6, 7}},
      {{"?"}, {10, 9}},
      {{"??"}, {12, 11}},
      {{"||"}, {14, 15}},
      {{"&&"}, {16, 17}},
      {{"|"}, {18, 19}},
      {{"^"}, {20, 21}},
      {{"&"}, {22, 23}},
      {{"==", "!=", "===", "!==", "<>", "<=>"}, {24, 25}},
      {{"<", "<=", ">", ">="}, {26, 27}},
      {{"."}, {28, 29}},
      {{"<<", ">>"}, {30, 31}},
      {{"+", "-"}, {32, 33}},
      {{"*", "/", "%"}, {34, 35}},
      {{"instanceof"}, {38, 39}},
      {{"**"}, {42, 41}},
  };
  for (const auto& [ops, b] : table)
    if (ops.count(op)) return b;
  return std::nullopt;
}

const std::set<std::string> kAssignOps = {"=",  "+=", "-=", "*=", "/=", ".=", "%=",
                                          "&=", "|=", "^=", "<<=", ">>=", "**=", "?\?="};
constexpr int kAssignRight = 8;
constexpr int kUnary = 36;
constexpr int kPrefixIncrement = 44;

const std::set<std::string> kOpaqueKeywords = {"switch", "class",  "interface", "trait", "abstract", "final",
                                               "namespace", "use", "try",       "declare", "goto", "const",
                                               "enum",  "throw", "readonly"};
const std::set<std::string> kIncludes = {"include", "include_once", "require", "require_once"};

std::string token_source(const Token& t) {
  switch (t.kind) {
    case Tok::Variable: return "$" + t.text;
    case Tok::String: {
      std::string out = "'";
      for (char c : t.text) {
        if (c == '\'' || c == '\\') out += '\\';
        out += c;
      }
      return out + "'";
    }
    case Tok::Template: {
      std::string out = "\"";
      for (const auto& p : t.parts) {
        if (p.is_expr) {
          out += "{" + p.text + "}";
          continue;
        }
        for (char c : p.text) {
          if (c == '"' || c == '\\' || c == '$') out += '\\';
          out += c;
        }
      }
      return out + "\"";
    }
    case Tok::Cast: return "(" + t.text + ")";
    case Tok::End: return "";
    default: return t.text;
  }
}

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string path) : toks_(std::move(toks)), path_(std::move(path)) {}

  Ast parse_program() {
    Ast ast;
    ast.path = path_;
    std::vector<Stmt> out;
    while (!at_end()) parse_statement(out);
    ast.statements = std::move(out);
    ast.functions = std::move(functions_);
    return ast;
  }

  Expr parse_fragment() {
    Expr e = parse_expr(0);
    if (!at_end()) fail(peek().pos, "unexpected '" + token_source(peek()) + "' in interpolation");
    return e;
  }

 private:
  // --- token helpers -------------------------------------------------------
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Tok::End; }
  const Token& take() {
    const Token& t = peek();
    if (i_ < toks_.size() - 1) ++i_;
    return t;
  }
  bool is_op(std::string_view op, std::size_t k = 0) const { return peek(k).kind == Tok::Op && peek(k).text == op; }
  bool is_kw(std::string_view kw, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && lower(peek(k).text) == kw;
  }
  bool accept_op(std::string_view op) {
    if (!is_op(op)) return false;
    take();
    return true;
  }
  bool accept_kw(std::string_view kw) {
    if (!is_kw(kw)) return false;
    take();
    return true;
  }
  const Token& expect_op(std::string_view op) {
    if (!is_op(op)) fail(peek().pos, "expected '" + std::string(op) + "', found '" + describe(peek()) + "'");
    return take();
  }
  static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of file" : token_source(t); }
  [[noreturn]] void fail(Pos p, const std::string& msg) const { throw ParseError(path_, p, msg); }

  void end_statement() {
    if (peek().kind == Tok::CloseTag || at_end()) {
      if (!at_end()) take();
      return;
    }
    if (!accept_op(";")) fail(peek().pos, "expected ';', found '" + describe(peek()) + "'");
  }

  int last_line() const { return i_ > 0 ? toks_[i_ - 1].pos.line : peek().pos.line; }

  // --- statements ----------------------------------------------------------
  void parse_statement(std::vector<Stmt>& out) {
    const Token& t = peek();
    if (t.kind == Tok::InlineHtml) {
      Stmt s;
      s.kind = Stmt::Kind::InlineHtml;
      s.pos = t.pos;
      s.raw = t.text;
      take();
      s.end_line = last_line();
      out.push_back(std::move(s));
      return;
    }
    if (t.kind == Tok::CloseTag || is_op(";")) {
      take();
      return;
    }
    if (is_op("{")) {
      take();
      while (!is_op("}")) {
        if (at_end()) fail(t.pos, "unterminated block");
        parse_statement(out);
      }
      take();
      return;
    }
    if (t.kind == Tok::Ident && !is_op("::", 1)) {
      const std::string kw = lower(t.text);
      if (kw == "if") return out.push_back(parse_if());
      if (kw == "while") return out.push_back(parse_while());
      if (kw == "do") return out.push_back(parse_do());
      if (kw == "for") return out.push_back(parse_for());
      if (kw == "foreach") return out.push_back(parse_foreach());
      if (kw == "function" && (peek(1).kind == Tok::Ident || (is_op("&", 1) && peek(2).kind == Tok::Ident)))
        return parse_function();
      if (kw == "return") return out.push_back(parse_return());
      if (kw == "echo" || kw == "print") return out.push_back(parse_echo(kw));
      if (kw == "global") return out.push_back(parse_global(kw));
      if (kw == "static" && peek(1).kind == Tok::Variable) return out.push_back(parse_global(kw));
      if (kw == "break" || kw == "continue" || kOpaqueKeywords.count(kw)) return out.push_back(parse_opaque(kw));
      if (kw == "else" || kw == "elseif" || kw == "endif" || kw == "endwhile" || kw == "endfor" ||
          kw == "endforeach")
        fail(t.pos, "unexpected '" + t.text + "'");
      if (kIncludes.count(kw)) {
        Stmt s;
        s.kind = Stmt::Kind::Include;
        s.pos = t.pos;
        s.op = kw;
        take();
        s.value = parse_expr(0);
        s.has_value = true;
        end_statement();
        s.end_line = last_line();
        return out.push_back(std::move(s));
      }
    }
    out.push_back(parse_expression_statement());
  }

  Stmt parse_expression_statement() {
    const Pos p = peek().pos;
    Expr e = parse_expr(0);
    end_statement();
    Stmt s = statement_from_expr(std::move(e));
    s.pos = p;
    s.end_line = last_line();
    return s;
  }

  static Stmt statement_from_expr(Expr e) {
    Stmt s;
    if (e.kind == K::Assign) {
      s.kind = e.text == "=" && e.kids[1].kind == K::Ternary ? Stmt::Kind::TernaryAssign : Stmt::Kind::Assign;
      s.op = e.text;
      s.target = std::move(e.kids[0]);
      s.value = std::move(e.kids[1]);
      s.has_value = true;
      return s;
    }
    if (e.kind == K::Call && kIncludes.count(e.text) && e.kids.size() == 1) {
      s.kind = Stmt::Kind::Include;
      s.op = e.text;
      s.value = std::move(e.kids[0]);
      s.has_value = true;
      return s;
    }
    if (e.kind == K::Call && e.text == "print" && e.kids.size() == 1) {
      s.kind = Stmt::Kind::Echo;
      s.op = "print";
      s.args = std::move(e.kids);
      return s;
    }
    s.kind = (e.kind == K::Call || e.kind == K::MethodCall || e.kind == K::StaticCall) ? Stmt::Kind::Call
                                                                                       : Stmt::Kind::Expr;
    s.value = std::move(e);
    s.has_value = true;
    return s;
  }

  Expr parse_condition() {
    expect_op("(");
    Expr e = parse_expr(0);
    expect_op(")");
    return e;
  }

  // Body of a control structure: block, single statement, or ':' alternative
  // syntax terminated by one of `enders` (the ender itself is not consumed).
  std::vector<Stmt> parse_body(bool& alt, const std::vector<std::string>& enders) {
    std::vector<Stmt> body;
    if (accept_op(":")) {
      alt = true;
      const Pos p = peek().pos;
      while (true) {
        if (at_end()) fail(p, "missing " + enders.front());
        bool stop = false;
        for (const auto& e : enders) stop = stop || is_kw(e);
        if (stop) break;
        parse_statement(body);
      }
      return body;
    }
    alt = false;
    parse_statement(body);
    return body;
  }

  Stmt parse_if() {
    Stmt s;
    s.kind = Stmt::Kind::If;
    s.pos = peek().pos;
    take();
    s.value = parse_condition();
    s.has_value = true;
    bool alt = false;
    s.body = parse_body(alt, {"elseif", "else", "endif"});
    parse_else(s, alt);
    s.end_line = last_line();
    return s;
  }

  void parse_else(Stmt& s, bool alt) {
    if (is_kw("elseif") || (is_kw("else") && is_kw("if", 1))) {
      s.else_pos = peek().pos;
      if (is_kw("else")) take();
      Stmt arm;
      arm.kind = Stmt::Kind::If;
      arm.elseif = true;
      arm.pos = peek().pos;
      take();
      arm.value = parse_condition();
      arm.has_value = true;
      bool arm_alt = false;
      arm.body = parse_body(arm_alt, {"elseif", "else", "endif"});
      parse_else(arm, arm_alt);
      arm.end_line = last_line();
      s.orelse.push_back(std::move(arm));
      return;
    }
    if (is_kw("else")) {
      s.else_pos = peek().pos;
      take();
      bool else_alt = false;
      s.orelse = parse_body(else_alt, {"endif"});
      if (else_alt) {
        accept_kw("endif");
        end_statement();
      }
      return;
    }
    if (alt) {
      if (!accept_kw("endif")) fail(peek().pos, "expected endif");
      end_statement();
    }
  }

  Stmt loop(std::string op) {
    Stmt s;
    s.kind = Stmt::Kind::Loop;
    s.pos = peek().pos;
    s.op = std::move(op);
    take();
    return s;
  }

  void loop_body(Stmt& s, const std::string& ender) {
    bool alt = false;
    s.body = parse_body(alt, {ender});
    if (alt) {
      take();
      end_statement();
    }
    s.end_line = last_line();
  }

  Stmt parse_while() {
    Stmt s = loop("while");
    s.value = parse_condition();
    s.has_value = true;
    loop_body(s, "endwhile");
    return s;
  }

  Stmt parse_do() {
    Stmt s = loop("do");
    parse_statement(s.body);
    if (!accept_kw("while")) fail(peek().pos, "expected while after do body");
    s.value = parse_condition();
    s.has_value = true;
    end_statement();
    s.end_line = last_line();
    return s;
  }

  std::vector<Expr> expr_list(std::string_view until) {
    std::vector<Expr> out;
    while (!is_op(until)) {
      out.push_back(parse_expr(0));
      if (!accept_op(",")) break;
    }
    return out;
  }

  Stmt parse_for() {
    Stmt s = loop("for");
    expect_op("(");
    s.args = expr_list(";");
    expect_op(";");
    if (!is_op(";")) {
      s.value = parse_expr(0);
      s.has_value = true;
    }
    expect_op(";");
    s.step = expr_list(")");
    expect_op(")");
    loop_body(s, "endfor");
    return s;
  }

  Stmt parse_foreach() {
    Stmt s = loop("foreach");
    expect_op("(");
    s.value = parse_expr(0);
    s.has_value = true;
    if (!accept_kw("as")) fail(peek().pos, "expected 'as' in foreach");
    accept_op("&");
    Expr first = parse_expr(kAssignRight + 1);
    if (accept_op("=>")) {
      accept_op("&");
      s.args.push_back(std::move(first));
      s.target = parse_expr(kAssignRight + 1);
    } else {
      s.target = std::move(first);
    }
    expect_op(")");
    loop_body(s, "endforeach");
    return s;
  }

  void parse_function() {
    const Pos p = take().pos;
    accept_op("&");
    Function f;
    f.pos = p;
    f.name = take().text;
    expect_op("(");
    while (!is_op(")")) {
      Param prm;
      while (peek().kind == Tok::Ident || is_op("?")) take();  // type hints
      if (accept_op("&")) prm.by_ref = true;
      accept_op("...");
      if (peek().kind != Tok::Variable) fail(peek().pos, "expected parameter name");
      prm.name = take().text;
      if (accept_op("=")) prm.default_value = parse_expr(kAssignRight + 1);
      f.params.push_back(std::move(prm));
      if (!accept_op(",")) break;
    }
    expect_op(")");
    if (accept_op(":")) {
      accept_op("?");
      take();
    }
    const Pos open = peek().pos;
    expect_op("{");
    while (!is_op("}")) {
      if (at_end()) fail(open, "unterminated function body");
      parse_statement(f.body);
    }
    take();
    functions_.insert_or_assign(lower(f.name), std::move(f));
  }

  Stmt parse_return() {
    Stmt s;
    s.kind = Stmt::Kind::Return;
    s.pos = take().pos;
    if (!is_op(";") && peek().kind != Tok::CloseTag && !at_end()) {
      s.value = parse_expr(0);
      s.has_value = true;
    }
    end_statement();
    s.end_line = last_line();
    return s;
  }

  Stmt parse_echo(const std::string& kw) {
    Stmt s;
    s.kind = Stmt::Kind::Echo;
    s.op = kw;
    s.pos = take().pos;
    s.args.push_back(parse_expr(0));
    while (kw == "echo" && accept_op(",")) s.args.push_back(parse_expr(0));
    end_statement();
    s.end_line = last_line();
    return s;
  }

  Stmt parse_global(const std::string& kw) {
    Stmt s;
    s.kind = Stmt::Kind::Global;
    s.op = kw;
    s.pos = take().pos;
    do {
      s.args.push_back(parse_expr(kAssignRight - 1));
    } while (accept_op(","));
    end_statement();
    s.end_line = last_line();
    return s;
  }

  // Skips an unsupported construct, keeping its tokens for printing.
  Stmt parse_opaque(const std::string& kw) {
    Stmt s;
    s.kind = Stmt::Kind::Opaque;
    s.op = kw;
    s.pos = peek().pos;
    std::vector<std::string> words;
    int depth = 0;
    bool saw_block = false;
    while (!at_end()) {
      const Token& t = take();
      words.push_back(token_source(t));
      if (t.kind == Tok::Op && (t.text == "(" || t.text == "[" || t.text == "{")) {
        ++depth;
        if (t.text == "{") saw_block = true;
      } else if (t.kind == Tok::Op && (t.text == ")" || t.text == "]" || t.text == "}")) {
        --depth;
        if (depth == 0 && t.text == "}" && saw_block) {
          if (is_kw("catch") || is_kw("finally") || is_kw("else")) continue;
          break;
        }
      } else if (depth == 0 && ((t.kind == Tok::Op && t.text == ";") || t.kind == Tok::CloseTag)) {
        words.back() = ";";
        break;
      }
    }
    if (depth != 0) fail(s.pos, "unbalanced " + kw + " statement");
    for (const auto& w : words) s.raw += (s.raw.empty() ? "" : " ") + w;
    s.end_line = last_line();
    return s;
  }

  // --- expressions ---------------------------------------------------------
  Expr parse_expr(int min_bp) {
    Expr lhs = parse_prefix();
    while (true) {
      const Token& t = peek();
      if (t.kind == Tok::Ident) {
        const std::string w = lower(t.text);
        if (w != "and" && w != "or" && w != "xor" && w != "instanceof") break;
        const auto b = *infix_binding(w);
        if (b.left < min_bp) break;
        take();
        Expr rhs = w == "instanceof" ? parse_class_ref() : parse_expr(b.right);
        lhs = binary(w, std::move(lhs), std::move(rhs));
        continue;
      }
      if (t.kind != Tok::Op) break;
      const std::string op = t.text;
      if (kAssignOps.count(op)) {
        if (kAssignRight < min_bp) break;
        if (!is_lvalue(lhs)) fail(t.pos, "cannot assign to this expression");
        take();
        if (op == "=") accept_op("&");
        Expr rhs = parse_expr(kAssignRight);
        Expr a{K::Assign, op, {}, false, false, lhs.pos};
        a.kids.push_back(std::move(lhs));
        a.kids.push_back(std::move(rhs));
        lhs = std::move(a);
        continue;
      }
      if (op == "?") {
        const auto b = *infix_binding(op);
        if (b.left < min_bp) break;
        take();
        Expr t3{K::Ternary, "?", {}, false, false, lhs.pos};
        t3.kids.push_back(std::move(lhs));
        if (accept_op(":")) {
          t3.text = "?:";
        } else {
          t3.kids.push_back(parse_expr(kAssignRight));
          expect_op(":");
        }
        t3.kids.push_back(parse_expr(b.right));
        lhs = std::move(t3);
        continue;
      }
      const auto b = infix_binding(op);
      if (!b || b->left < min_bp) break;
      take();
      Expr rhs = parse_expr(b->right);
      lhs = binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  static Expr binary(std::string op, Expr l, Expr r) {
    Expr b{K::Binary, std::move(op), {}, false, false, l.pos};
    b.kids.push_back(std::move(l));
    b.kids.push_back(std::move(r));
    return b;
  }

  static bool is_lvalue(const Expr& e) {
    return e.kind == K::Variable || e.kind == K::Index || e.kind == K::Property || e.kind == K::StaticProp ||
           (e.kind == K::Opaque && (e.text.rfind("list", 0) == 0 || e.text.rfind("[", 0) == 0)) ||
           (e.kind == K::Array);
  }

  Expr parse_class_ref() {
    const Token& t = take();
    if (t.kind == Tok::Variable) return Expr::variable(t.text, t.pos);
    if (t.kind != Tok::Ident) fail(t.pos, "expected class name");
    return Expr{K::Const, t.text, {}, false, false, t.pos};
  }

  std::vector<Expr> parse_args() {
    expect_op("(");
    std::vector<Expr> args;
    while (!is_op(")")) {
      accept_op("...");
      accept_op("&");
      if (peek().kind == Tok::Ident && is_op(":", 1) && !is_op("::", 1)) {
        take();
        take();
      }
      args.push_back(parse_expr(0));
      if (!accept_op(",")) break;
    }
    expect_op(")");
    return args;
  }

  Expr parse_array_items(std::string_view close, Pos p) {
    Expr arr{K::Array, "", {}, false, false, p};
    while (!is_op(close)) {
      if (is_op(",")) {
        take();
        continue;
      }
      accept_op("...");
      accept_op("&");
      Expr item = parse_expr(0);
      if (accept_op("=>")) {
        accept_op("&");
        item = parse_expr(0);
      }
      arr.kids.push_back(std::move(item));
      if (!accept_op(",")) break;
    }
    expect_op(close);
    return arr;
  }

  // Collects tokens of a balanced construct into an opaque expression.
  Expr skip_opaque_expr(std::string summary_prefix, Pos p) {
    std::string raw = std::move(summary_prefix);
    int depth = 0;
    bool started = false;
    while (!at_end()) {
      const Token& t = peek();
      const bool open = t.kind == Tok::Op && (t.text == "(" || t.text == "[" || t.text == "{");
      const bool close = t.kind == Tok::Op && (t.text == ")" || t.text == "]" || t.text == "}");
      if (close && depth == 0) break;
      if (!open && !close && depth == 0 && started && t.kind == Tok::Op && (t.text == ";" || t.text == ","))
        break;
      take();
      raw += " " + token_source(t);
      if (open) {
        ++depth;
        started = true;
      }
      if (close && --depth == 0 && t.text == "}") break;
    }
    return Expr{K::Opaque, raw, {}, false, false, p};
  }

  Expr parse_prefix() {
    const Token& t = peek();
    const Pos p = t.pos;
    switch (t.kind) {
      case Tok::Variable: {
        take();
        return parse_postfix(Expr::variable(t.text, p));
      }
      case Tok::Number: {
        take();
        Expr e = Expr::literal(t.text, p);
        e.numeric = true;
        return e;
      }
      case Tok::String: {
        take();
        return parse_postfix(Expr::literal(t.text, p));
      }
      case Tok::Template: {
        take();
        return template_expr(t);
      }
      case Tok::Cast: {
        take();
        Expr c{K::Cast, t.text, {}, false, false, p};
        c.kids.push_back(parse_expr(kUnary));
        return c;
      }
      case Tok::Ident:
        return parse_ident();
      case Tok::Op:
        break;
      default:
        fail(p, "unexpected '" + describe(t) + "'");
    }
    const std::string op = t.text;
    if (op == "(") {
      take();
      Expr e = parse_expr(0);
      expect_op(")");
      return parse_postfix(std::move(e));
    }
    if (op == "[") {
      take();
      return parse_postfix(parse_array_items("]", p));
    }
    if (op == "!" || op == "-" || op == "+" || op == "~" || op == "@") {
      take();
      Expr u{K::Unary, op, {}, false, false, p};
      u.kids.push_back(parse_expr(op == "!" ? kUnary : kPrefixIncrement - 2));
      return u;
    }
    if (op == "++" || op == "--") {
      take();
      Expr u{K::Unary, op, {}, false, false, p};
      u.kids.push_back(parse_expr(kPrefixIncrement));
      return u;
    }
    if (op == "&") {
      take();
      return parse_expr(kUnary);
    }
    if (op == "$") {
      take();
      if (is_op("{")) {
        take();
        Expr inner = parse_expr(0);
        expect_op("}");
        if (inner.kind == K::Const) return parse_postfix(Expr::variable(inner.text, p));
        if (inner.kind == K::Literal && !inner.numeric) return parse_postfix(Expr::variable(inner.text, p));
        Expr o{K::Opaque, "${...}", {}, false, false, p};
        o.kids.push_back(std::move(inner));
        return parse_postfix(std::move(o));
      }
      Expr o{K::Opaque, "$$", {}, false, false, p};
      o.kids.push_back(parse_prefix());
      return o;
    }
    fail(p, "unexpected '" + op + "'");
  }

  Expr template_expr(const Token& t) {
    bool has_expr = false;
    for (const auto& part : t.parts) has_expr = has_expr || part.is_expr;
    if (!has_expr) {
      std::string value;
      for (const auto& part : t.parts) value += part.text;
      return Expr::literal(value, t.pos);
    }
    Expr e{K::Interpolated, "", {}, false, false, t.pos};
    for (const auto& part : t.parts) {
      if (!part.is_expr) {
        e.kids.push_back(Expr::literal(part.text, part.pos));
        continue;
      }
      Parser sub(lex_fragment(part.text, path_, part.pos), path_);
      e.kids.push_back(sub.parse_fragment());
    }
    return e;
  }

  Expr parse_ident() {
    const Token& t = take();
    const Pos p = t.pos;
    const std::string w = lower(t.text);
    if (w == "true" || w == "false" || w == "null") return Expr{K::Const, w, {}, false, false, p};
    if (w == "new") {
      std::string cls;
      if (peek().kind == Tok::Ident)
        cls = take().text;
      else if (peek().kind == Tok::Variable)
        cls = "$" + take().text;
      else if (is_kw("class"))
        return skip_opaque_expr("new", p);
      else
        fail(peek().pos, "expected class name after new");
      Expr n{K::New, cls, {}, false, false, p};
      if (is_op("(")) n.kids = parse_args();
      return parse_postfix(std::move(n));
    }
    if (w == "exit" || w == "die") {
      Expr c{K::Call, w, {}, false, false, p};
      if (is_op("(")) c.kids = parse_args();
      return c;
    }
    if (w == "print") {
      Expr c{K::Call, "print", {}, false, false, p};
      c.kids.push_back(parse_expr(kAssignRight));
      return c;
    }
    if (kIncludes.count(w)) {
      Expr c{K::Call, w, {}, false, false, p};
      c.kids.push_back(parse_expr(kAssignRight));
      return c;
    }
    if (w == "clone") {
      Expr u{K::Unary, "clone", {}, false, false, p};
      u.kids.push_back(parse_expr(kPrefixIncrement));
      return u;
    }
    if (w == "array" && is_op("(")) {
      take();
      return parse_postfix(parse_array_items(")", p));
    }
    if (w == "list" && is_op("(")) return skip_opaque_expr("list", p);
    if (w == "function" || w == "fn" || (w == "static" && (is_kw("function") || is_kw("fn")))) {
      std::string raw = t.text;
      if (w == "static") raw += " " + take().text;
      return skip_opaque_expr(raw, p);
    }
    if (is_op("(")) {
      Expr c{K::Call, t.text, {}, false, false, p};
      c.kids = parse_args();
      return parse_postfix(std::move(c));
    }
    if (is_op("::")) {
      take();
      if (peek().kind == Tok::Variable) {
        Expr sp{K::StaticProp, t.text + "::$" + take().text, {}, false, false, p};
        return parse_postfix(std::move(sp));
      }
      const Token& m = take();
      if (m.kind != Tok::Ident) fail(m.pos, "expected member name after ::");
      if (is_op("(")) {
        Expr c{K::StaticCall, t.text + "::" + m.text, {}, false, false, p};
        c.kids = parse_args();
        return parse_postfix(std::move(c));
      }
      return Expr{K::Const, t.text + "::" + m.text, {}, false, false, p};
    }
    return Expr{K::Const, t.text, {}, false, false, p};
  }

  Expr parse_postfix(Expr e) {
    while (true) {
      if (is_op("[")) {
        take();
        Expr idx{K::Index, "", {}, false, false, e.pos};
        idx.kids.push_back(std::move(e));
        if (!is_op("]")) idx.kids.push_back(parse_expr(0));
        expect_op("]");
        e = std::move(idx);
        continue;
      }
      if (is_op("->") || is_op("?->")) {
        take();
        std::string name;
        if (peek().kind == Tok::Ident)
          name = take().text;
        else if (peek().kind == Tok::Variable)
          name = "$" + take().text;
        else
          fail(peek().pos, "expected property name");
        if (is_op("(")) {
          Expr m{K::MethodCall, name, {}, false, false, e.pos};
          m.kids.push_back(std::move(e));
          for (auto& a : parse_args()) m.kids.push_back(std::move(a));
          e = std::move(m);
        } else {
          Expr pr{K::Property, name, {}, false, false, e.pos};
          pr.kids.push_back(std::move(e));
          e = std::move(pr);
        }
        continue;
      }
      if (is_op("::") && (e.kind == K::Variable)) {
        take();
        const Token& m = take();
        Expr c{K::StaticCall, "$" + e.text + "::" + m.text, {}, false, false, e.pos};
        if (is_op("(")) c.kids = parse_args();
        e = std::move(c);
        continue;
      }
      if (is_op("(") && e.kind != K::Literal) {
        Expr c{K::Call, "{dynamic}", {}, false, false, e.pos};
        c.kids = parse_args();
        e = std::move(c);
        continue;
      }
      if (is_op("++") || is_op("--")) {
        Expr u{K::Unary, "post" + take().text, {}, false, false, e.pos};
        u.kids.push_back(std::move(e));
        e = std::move(u);
        continue;
      }
      return e;
    }
  }

  std::vector<Token> toks_;
  std::string path_;
  std::size_t i_ = 0;
  std::map<std::string, Function> functions_;
};

// --- printing --------------------------------------------------------------

std::string quote_single(const std::string& v) {
  std::string out = "'";
  for (char c : v) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  return out + "'";
}

std::string quote_template_literal(const std::string& v) {
  std::string out;
  for (char c : v) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\v': out += "\\v"; break;
      case '\f': out += "\\f"; break;
      case '\x1b': out += "\\e"; break;
      case '"':
      case '\\':
      case '$':
        out += '\\';
        out += c;
        break;
      default: out += c;
    }
  }
  return out;
}

std::string join_exprs(const std::vector<Expr>& v, std::size_t from = 0) {
  std::string out;
  for (std::size_t i = from; i < v.size(); ++i) out += (i > from ? ", " : "") + print_expr(v[i]);
  return out;
}

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 4, ' '); }

std::string print_block(const std::vector<Stmt>& body, int indent) {
  std::string out = "{\n";
  for (const auto& s : body) out += print_stmt(s, indent + 1);
  return out + pad(indent) + "}";
}

std::string print_if(const Stmt& s, int indent) {
  std::string out = "if (" + print_expr(s.value) + ") " + print_block(s.body, indent);
  if (s.orelse.size() == 1 && s.orelse[0].kind == Stmt::Kind::If && s.orelse[0].elseif)
    return out + " else" + print_if(s.orelse[0], indent);
  if (!s.orelse.empty()) out += " else " + print_block(s.orelse, indent);
  return out;
}

}  // namespace

std::string print_expr(const Expr& e) {
  switch (e.kind) {
    case K::Variable: {
      const bool plain = !e.text.empty() && std::all_of(e.text.begin(), e.text.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || (c & 0x80);
      }) && !std::isdigit(static_cast<unsigned char>(e.text[0]));
      return plain ? "$" + e.text : "${" + quote_single(e.text) + "}";
    }
    case K::Index: return print_expr(e.kids[0]) + "[" + (e.kids.size() > 1 ? print_expr(e.kids[1]) : "") + "]";
    case K::Property: return print_expr(e.kids[0]) + "->" + e.text;
    case K::StaticProp: return e.text;
    case K::Literal: return e.numeric ? e.text : quote_single(e.text);
    case K::Const: return e.text;
    case K::Interpolated: {
      std::string out = "\"";
      for (const auto& k : e.kids)
        out += (k.kind == K::Literal && !k.numeric) ? quote_template_literal(k.text) : "{" + print_expr(k) + "}";
      return out + "\"";
    }
    case K::Binary: return "(" + print_expr(e.kids[0]) + " " + e.text + " " + print_expr(e.kids[1]) + ")";
    case K::Unary:
      if (e.text.rfind("post", 0) == 0) return "(" + print_expr(e.kids[0]) + e.text.substr(4) + ")";
      if (e.text == "clone") return "(clone " + print_expr(e.kids[0]) + ")";
      return "(" + e.text + print_expr(e.kids[0]) + ")";
    case K::Cast: return "((" + e.text + ")" + print_expr(e.kids[0]) + ")";
    case K::Ternary:
      if (e.text == "?:") return "(" + print_expr(e.kids[0]) + " ?: " + print_expr(e.kids[1]) + ")";
      return "(" + print_expr(e.kids[0]) + " ? " + print_expr(e.kids[1]) + " : " + print_expr(e.kids[2]) + ")";
    case K::Choice: {
      std::string out = "(";
      for (std::size_t i = 0; i < e.kids.size(); ++i) out += (i ? " ?: " : "") + print_expr(e.kids[i]);
      return out + ")";
    }
    case K::Assign: return "(" + print_expr(e.kids[0]) + " " + e.text + " " + print_expr(e.kids[1]) + ")";
    case K::Call: return e.text + "(" + join_exprs(e.kids) + ")";
    case K::MethodCall: return print_expr(e.kids[0]) + "->" + e.text + "(" + join_exprs(e.kids, 1) + ")";
    case K::StaticCall: return e.text + "(" + join_exprs(e.kids) + ")";
    case K::New: return "new " + e.text + "(" + join_exprs(e.kids) + ")";
    case K::Array: return "[" + join_exprs(e.kids) + "]";
    case K::Opaque:
      if (e.text == "${...}") return "${" + print_expr(e.kids[0]) + "}";
      if (e.text == "$$") return "$" + print_expr(e.kids[0]);
      return e.text;
  }
  return "";
}

std::string print_stmt(const Stmt& s, int indent) {
  std::string out = pad(indent);
  switch (s.kind) {
    case Stmt::Kind::Assign:
    case Stmt::Kind::TernaryAssign:
      out += print_expr(s.target) + " " + s.op + " " + print_expr(s.value) + ";";
      break;
    case Stmt::Kind::Expr:
    case Stmt::Kind::Call: out += print_expr(s.value) + ";"; break;
    case Stmt::Kind::If: out += print_if(s, indent); break;
    case Stmt::Kind::Echo: out += s.op + " " + join_exprs(s.args) + ";"; break;
    case Stmt::Kind::Include: out += s.op + " " + print_expr(s.value) + ";"; break;
    case Stmt::Kind::Return: out += s.has_value ? "return " + print_expr(s.value) + ";" : "return;"; break;
    case Stmt::Kind::Loop:
      if (s.op == "while") out += "while (" + print_expr(s.value) + ") " + print_block(s.body, indent);
      if (s.op == "do") out += "do " + print_block(s.body, indent) + " while (" + print_expr(s.value) + ");";
      if (s.op == "for")
        out += "for (" + join_exprs(s.args) + "; " + (s.has_value ? print_expr(s.value) : "") + "; " +
               join_exprs(s.step) + ") " + print_block(s.body, indent);
      if (s.op == "foreach")
        out += "foreach (" + print_expr(s.value) + " as " + (s.args.empty() ? "" : print_expr(s.args[0]) + " => ") +
               print_expr(s.target) + ") " + print_block(s.body, indent);
      break;
    case Stmt::Kind::Global: out += s.op + " " + join_exprs(s.args) + ";"; break;
    case Stmt::Kind::InlineHtml: return "?>" + s.raw + "<?php\n";
    case Stmt::Kind::Opaque: out += s.raw; break;
  }
  return out + "\n";
}

std::string print_ast(const Ast& ast) {
  std::string out = "<?php\n";
  for (const auto& [key, f] : ast.functions) {
    out += "function " + f.name + "(";
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      const auto& p = f.params[i];
      out += (i ? ", " : "") + std::string(p.by_ref ? "&" : "") + "$" + p.name;
      if (p.default_value) out += " = " + print_expr(*p.default_value);
    }
    out += ") " + print_block(f.body, 0) + "\n";
  }
  for (const auto& s : ast.statements) out += print_stmt(s, 0);
  return out;
}

Ast parse_file(std::string_view source, const std::string& path) {
  Parser parser(lex(source, path), path);
  Ast ast = parser.parse_program();
  ast.line_count = static_cast<int>(std::count(source.begin(), source.end(), '\n')) +
                   (source.empty() || source.back() == '\n' ? 0 : 1);
  return ast;
}

// --- structural equality ---------------------------------------------------

bool same_expr(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.text != b.text || a.numeric != b.numeric || a.kids.size() != b.kids.size()) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!same_expr(a.kids[i], b.kids[i])) return false;
  return true;
}

namespace {
bool same_exprs(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_expr(a[i], b[i])) return false;
  return true;
}
bool same_stmts(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_stmt(a[i], b[i])) return false;
  return true;
}
}  // namespace

bool same_stmt(const Stmt& a, const Stmt& b) {
  return a.kind == b.kind && a.op == b.op && same_expr(a.target, b.target) && a.has_value == b.has_value &&
         (!a.has_value || same_expr(a.value, b.value)) && same_exprs(a.args, b.args) && same_exprs(a.step, b.step) &&
         same_stmts(a.body, b.body) && same_stmts(a.orelse, b.orelse) && a.elseif == b.elseif && a.raw == b.raw;
}

bool same_ast(const Ast& a, const Ast& b) {
  if (!same_stmts(a.statements, b.statements) || a.functions.size() != b.functions.size()) return false;
  for (const auto& [name, fa] : a.functions) {
    auto it = b.functions.find(name);
    if (it == b.functions.end()) return false;
    const Function& fb = it->second;
    if (fa.name != fb.name || fa.params.size() != fb.params.size() || !same_stmts(fa.body, fb.body)) return false;
    for (std::size_t i = 0; i < fa.params.size(); ++i) {
      const auto &pa = fa.params[i], &pb = fb.params[i];
      if (pa.name != pb.name || pa.by_ref != pb.by_ref || pa.default_value.has_value() != pb.default_value.has_value())
        return false;
      if (pa.default_value && !same_expr(*pa.default_value, *pb.default_value)) return false;
    }
  }
  return true;
}

// --- desugaring ------------------------------------------------------------

Expr desugar(const Expr& e) {
  Expr out = e;
  for (auto& k : out.kids) k = desugar(k);
  switch (out.kind) {
    case K::Ternary: {
      Expr c{K::Choice, "", {}, false, false, out.pos};
      // the condition only decides which branch flows; a?:b yields a itself
      if (out.text == "?:") {
        c.kids = {out.kids[0], out.kids[1]};
      } else {
        c.kids = {out.kids[1], out.kids[2]};
      }
      return c;
    }
    case K::Binary:
      if (out.text == "??") {
        Expr c{K::Choice, "", {}, false, false, out.pos};
        c.kids = std::move(out.kids);
        return c;
      }
      return out;
    case K::Interpolated: {
      std::vector<Expr> parts;
      for (auto& k : out.kids)
        if (!(k.kind == K::Literal && k.text.empty())) parts.push_back(std::move(k));
      if (parts.empty()) return Expr::literal("", out.pos);
      Expr acc = std::move(parts[0]);
      for (std::size_t i = 1; i < parts.size(); ++i) {
        Expr b{K::Binary, ".", {}, false, false, out.pos};
        b.kids.push_back(std::move(acc));
        b.kids.push_back(std::move(parts[i]));
        acc = std::move(b);
      }
      return acc;
    }
    case K::Assign:
      if (out.text != "=") {
        std::string op = out.text.substr(0, out.text.size() - 1);
        Expr rhs{op == "??" ? K::Choice : K::Binary, op == "??" ? "" : op, {}, false, false, out.pos};
        rhs.kids = {out.kids[0], out.kids[1]};
        out.text = "=";
        out.kids[1] = std::move(rhs);
      }
      return out;
    default:
      return out;
  }
}

Stmt desugar(const Stmt& s) {
  Stmt out = s;
  if (out.has_value) out.value = desugar(out.value);
  out.target = desugar(out.target);
  for (auto& a : out.args) a = desugar(a);
  for (auto& a : out.step) a = desugar(a);
  for (auto& b : out.body) b = desugar(b);
  for (auto& b : out.orelse) b = desugar(b);
  if (out.kind == Stmt::Kind::TernaryAssign) out.kind = Stmt::Kind::Assign;
  if (out.kind == Stmt::Kind::Assign && out.op != "=") {
    std::string op = out.op.substr(0, out.op.size() - 1);
    Expr rhs{op == "??" ? K::Choice : K::Binary, op == "??" ? "" : op, {}, false, false, out.value.pos};
    rhs.kids = {out.target, out.value};
    out.value = std::move(rhs);
    out.op = "=";
  }
  return out;
}

Ast desugar(const Ast& ast) {
  Ast out = ast;
  for (auto& s : out.statements) s = desugar(s);
  for (auto& [name, f] : out.functions) {
    for (auto& s : f.body) s = desugar(s);
    for (auto& p : f.params)
      if (p.default_value) p.default_value = desugar(*p.default_value);
  }
  return out;
}

}  // namespace dekant::php
