#include "dekant/slicer.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "dekant/callsite.hpp"
#include "dekant/php/parser.hpp"

namespace dekant {

using php::Expr;
using php::Function;
using php::Stmt;
using K = Expr::Kind;
using SK = Stmt::Kind;

namespace {

std::string where(const std::string& file, int line) { return file + ":" + std::to_string(line) + ": "; }

bool is_atomic(const Expr& e) {
  switch (e.kind) {
    case K::Variable:
    case K::Literal:
    case K::Const:
    case K::StaticProp:
      return true;
    case K::Index:
      return !e.kids.empty() && is_atomic(e.kids[0]) && (e.kids.size() < 2 || e.kids[1].kind == K::Literal);
    case K::Property:
      return !e.kids.empty() && e.kids[0].kind == K::Variable;
    default:
      return false;
  }
}

bool keeps_name(const std::string& name) {
  return name == "this" || name == "GLOBALS" || name.starts_with("_") || name.starts_with("HTTP_");
}

// Post-order rewrite of every expression reachable from a statement.
void rewrite_exprs(Stmt& s, const std::function<void(Expr&)>& f) {
  std::function<void(Expr&)> walk = [&](Expr& e) {
    for (auto& k : e.kids) walk(k);
    f(e);
  };
  walk(s.target);
  walk(s.value);
  for (auto& a : s.args) walk(a);
  for (auto& a : s.step) walk(a);
  for (auto& b : s.body) rewrite_exprs(b, f);
  for (auto& b : s.orelse) rewrite_exprs(b, f);
}

void move_to(Stmt& s, php::Pos site) {
  s.pos = site;
  s.end_line = site.line;
  if (s.else_pos.line) s.else_pos = site;
  for (auto& b : s.body) move_to(b, site);
  for (auto& b : s.orelse) move_to(b, site);
}

void collect_targets(const std::vector<Stmt>& body, std::set<std::string>& assigned, std::set<std::string>& globals) {
  for (const auto& s : body) {
    if (s.kind == SK::Assign || s.kind == SK::TernaryAssign)
      if (auto n = tracked_name(s.target)) assigned.insert(*n);
    if (s.kind == SK::Loop && s.op == "foreach") {
      if (auto n = tracked_name(s.target)) assigned.insert(*n);
      for (const auto& k : s.args)
        if (auto n = tracked_name(k)) assigned.insert(*n);
    }
    if (s.kind == SK::Global && s.op == "global")
      for (const auto& a : s.args)
        if (a.kind == K::Variable) globals.insert(a.text);
    rewrite_exprs(const_cast<Stmt&>(s), [&](Expr& e) {
      if (e.kind == K::Assign && !e.kids.empty())
        if (auto n = tracked_name(e.kids[0])) assigned.insert(*n);
      if (e.kind == K::Unary && (e.text.find("++") != std::string::npos || e.text.find("--") != std::string::npos) &&
          !e.kids.empty())
        if (auto n = tracked_name(e.kids[0])) assigned.insert(*n);
    });
    collect_targets(s.body, assigned, globals);
    collect_targets(s.orelse, assigned, globals);
  }
}

Stmt make_assign(Expr target, Expr value, php::Pos pos) {
  Stmt s;
  s.kind = SK::Assign;
  s.op = "=";
  s.pos = pos;
  s.end_line = pos.line;
  s.target = std::move(target);
  s.value = std::move(value);
  s.has_value = true;
  return s;
}

Stmt make_expr_stmt(Expr value, php::Pos pos) {
  Stmt s;
  s.kind = is_call(value) ? SK::Call : SK::Expr;
  s.pos = pos;
  s.end_line = pos.line;
  s.value = std::move(value);
  s.has_value = true;
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

class Inliner {
 public:
  Inliner(const std::map<std::string, Function>& functions, std::vector<std::string>* diags, std::string file)
      : functions_(functions), diags_(diags), file_(std::move(file)) {}

  std::vector<Stmt> run(const std::vector<Stmt>& in, int depth) {
    std::vector<Stmt> out;
    for (const auto& s : in) stmt(s, depth, out);
    return out;
  }

 private:
  const Function* callee(const Expr& e) const {
    if (e.kind != K::Call || e.cut) return nullptr;
    const auto it = functions_.find(lower(e.text));
    return it == functions_.end() ? nullptr : &it->second;
  }

  void stmt(const Stmt& s, int depth, std::vector<Stmt>& out) {
    Stmt c = s;
    std::vector<Stmt> pre;
    switch (s.kind) {
      case SK::Assign:
      case SK::TernaryAssign:
      case SK::Expr:
      case SK::Call:
      case SK::Return: {
        const bool assigns = s.kind == SK::Assign || s.kind == SK::TernaryAssign;
        if (s.has_value && callee(s.value) && (!assigns || s.op == "=") && s.kind != SK::Return) {
          Expr call = s.value;
          for (auto& k : call.kids) k = expr(k, depth, pre, s.pos);
          if (depth > 0) {
            expand(call, depth, assigns ? &c.target : nullptr, s.pos, pre);
            out.insert(out.end(), pre.begin(), pre.end());
            return;
          }
          c.value = cut(std::move(call), s.pos);
          break;
        }
        if (s.has_value) c.value = expr(s.value, depth, pre, s.pos);
        break;
      }
      case SK::Echo:
      case SK::Global:
        for (auto& a : c.args) a = expr(a, depth, pre, s.pos);
        break;
      case SK::Include:
        c.value = expr(s.value, depth, pre, s.pos);
        break;
      case SK::If:
        c.value = expr(s.value, depth, pre, s.pos);
        c.body = run(s.body, depth);
        c.orelse = run(s.orelse, depth);
        break;
      case SK::Loop:
        if (s.has_value) c.value = expr(s.value, depth, pre, s.pos);
        for (auto& a : c.args) a = expr(a, depth, pre, s.pos);
        c.body = run(s.body, depth);
        break;
      default:
        break;
    }
    out.insert(out.end(), pre.begin(), pre.end());
    out.push_back(std::move(c));
  }

  Expr expr(const Expr& e, int depth, std::vector<Stmt>& pre, php::Pos site) {
    Expr c = e;
    for (auto& k : c.kids) k = expr(k, depth, pre, site);
    if (!callee(c)) return c;
    if (depth <= 0) return cut(std::move(c), site);
    return expand(c, depth, nullptr, site, pre);
  }

  Expr cut(Expr call, php::Pos site) {
    call.cut = true;
    if (diags_) diags_->push_back(where(file_, site.line) + "inline depth exhausted at call to " + call.text);
    return call;
  }

  // Appends the callee body to `out`; returns the expression holding its result.
  Expr expand(const Expr& call, int depth, const Expr* target, php::Pos site, std::vector<Stmt>& out) {
    const Function& f = *callee(call);
    const int n = ++instances_[lower(f.name)];
    const std::string prefix = f.name + (n > 1 ? "#" + std::to_string(n) : "") + ".";
    const Expr result = target ? *target : Expr::variable(prefix + "return", site);

    std::set<std::string> assigned, globals;
    collect_targets(f.body, assigned, globals);

    std::map<std::string, Expr> subst;
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      const auto& p = f.params[i];
      Expr arg = i < call.kids.size()     ? call.kids[i]
                 : p.default_value        ? *p.default_value
                                          : Expr::literal("", site);
      if (!assigned.count(p.name) && is_atomic(arg))
        subst.emplace(p.name, std::move(arg));
      else
        out.push_back(make_assign(Expr::variable(prefix + p.name, site), std::move(arg), site));
    }

    std::vector<Stmt> body = f.body;
    for (auto& s : body) {
      rewrite_exprs(s, [&](Expr& e) {
        if (e.kind != K::Variable || keeps_name(e.text) || globals.count(e.text)) return;
        if (const auto it = subst.find(e.text); it != subst.end())
          e = it->second;
        else
          e.text = prefix + e.text;
      });
    }
    bind_returns(body, result);
    for (auto& s : body) move_to(s, site);
    auto expanded = run(body, depth - 1);
    out.insert(out.end(), std::make_move_iterator(expanded.begin()), std::make_move_iterator(expanded.end()));
    return result;
  }

  static void bind_returns(std::vector<Stmt>& body, const Expr& result) {
    for (auto& s : body) {
      if (s.kind == SK::Return && s.has_value)
        s = make_assign(result, s.value, s.pos);
      else if (s.kind == SK::Return)
        s = make_assign(result, Expr::literal("", s.pos), s.pos);
      bind_returns(s.body, result);
      bind_returns(s.orelse, result);
    }
  }

  const std::map<std::string, Function>& functions_;
  std::vector<std::string>* diags_;
  std::string file_;
  std::map<std::string, int> instances_;
};

class Hoister {
 public:
  explicit Hoister(const TokenConfig& config) : config_(config) {}

  std::vector<Stmt> run(const std::vector<Stmt>& in) {
    std::vector<Stmt> out;
    for (const auto& s : in) stmt(s, out);
    return out;
  }

 private:
  void stmt(const Stmt& s, std::vector<Stmt>& out) {
    Stmt c = s;
    std::vector<Stmt> pre;
    if (s.has_value) c.value = expr(s.value, pre, s.pos);
    for (auto& a : c.args) a = expr(a, pre, s.pos);
    c.body = run(s.body);
    c.orelse = run(s.orelse);
    out.insert(out.end(), pre.begin(), pre.end());
    out.push_back(std::move(c));
  }

  Expr expr(const Expr& e, std::vector<Stmt>& pre, php::Pos site) {
    Expr c = e;
    for (auto& k : c.kids) k = expr(k, pre, site);
    if (!is_call(c)) return c;
    const FunctionSpec* spec = lookup_call(c, config_);
    if (!spec || spec->token == IslToken::ss) return c;
    const std::size_t offset = c.kind == K::MethodCall ? 1 : 0;
    for (std::size_t i : data_args(c, config_)) {
      Expr& arg = c.kids[i + offset];
      if (is_atomic(arg)) continue;
      Expr tmp = Expr::variable("tmp#" + std::to_string(++counter_), site);
      pre.push_back(make_assign(tmp, std::move(arg), site));
      arg = std::move(tmp);
    }
    return c;
  }

  const TokenConfig& config_;
  int counter_ = 0;
};

// Statement tree with loops flattened and literal includes spliced in.
struct Node {
  bool is_if = false;
  Stmt stmt;
  std::string file;
  bool in_loop = false;
  std::vector<Node> then_branch;
  std::vector<Node> else_branch;
  bool has_else = false;
};

struct Facts {
  bool tainted = false;
  bool input = false;
  std::set<std::string> reads;

  void merge(const Facts& o) {
    tainted |= o.tainted;
    input |= o.input;
    reads.insert(o.reads.begin(), o.reads.end());
  }
};

struct SinkUse {
  const FunctionSpec* spec = nullptr;
  std::string name;
  Facts facts;
};

struct PathItem {
  const Node* node = nullptr;
  SliceRole role = SliceRole::Plain;
  std::vector<std::pair<std::size_t, bool>> scopes;  // enclosing headers, innermost last
  bool took_then = false;
  std::size_t marker = static_cast<std::size_t>(-1);
};

class Extractor {
 public:
  Extractor(const TokenConfig& config, const SliceOptions& options) : config_(config), options_(options) {}

  SliceResult run(const php::Ast& parsed) {
    const php::Ast ast = php::desugar(parsed);
    functions_ = ast.functions;
    base_ = options_.root.empty() ? std::filesystem::path(ast.path).parent_path() : std::filesystem::path(options_.root);
    active_.insert(ast.path);
    preload(ast);
    roots_ = build(ast.statements, ast.path, false);
    active_.clear();

    std::vector<PathItem> path;
    walk(roots_, 0, path, [&] { analyze(path); });
    if (exhausted_)
      result_.diagnostics.push_back(where(ast.path, 1) + "path budget of " + std::to_string(options_.path_budget) +
                                    " exhausted; remaining paths not analyzed");

    std::stable_sort(result_.slices.begin(), result_.slices.end(), [](const Slice& a, const Slice& b) {
      return std::tie(a.file, a.sink_line, a.path_index) < std::tie(b.file, b.sink_line, b.path_index);
    });
    return std::move(result_);
  }

 private:
  // --- program preparation ------------------------------------------------

  std::optional<std::filesystem::path> include_target(const Stmt& s, const std::string& file) {
    if (s.value.kind != K::Literal || s.value.numeric) {
      result_.diagnostics.push_back(where(file, s.pos.line) + "dynamic " + s.op + " not resolved");
      return std::nullopt;
    }
    const auto p = (base_ / s.value.text).lexically_normal();
    if (!std::filesystem::is_regular_file(p)) {
      result_.diagnostics.push_back(where(file, s.pos.line) + s.op + " '" + s.value.text + "' not found");
      return std::nullopt;
    }
    return p;
  }

  const php::Ast* load(const std::filesystem::path& p, const std::string& from, int line) {
    const std::string key = p.string();
    if (auto it = included_.find(key); it != included_.end()) return it->second ? &*it->second : nullptr;
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      included_[key] = php::desugar(php::parse_file(ss.str(), key));
    } catch (const std::exception& e) {
      result_.diagnostics.push_back(where(from, line) + "included file skipped: " + e.what());
      included_[key] = std::nullopt;
      return nullptr;
    }
    return &*included_[key];
  }

  void preload(const php::Ast& ast) {
    std::function<void(const std::vector<Stmt>&)> scan = [&](const std::vector<Stmt>& stmts) {
      for (const auto& s : stmts) {
        if (s.kind == SK::Include && s.value.kind == K::Literal && !s.value.numeric) {
          const auto p = (base_ / s.value.text).lexically_normal();
          if (!std::filesystem::is_regular_file(p) || included_.count(p.string())) continue;
          if (const php::Ast* inc = load(p, ast.path, s.pos.line)) {
            for (const auto& [name, fn] : inc->functions) functions_.emplace(name, fn);
            preload(*inc);
          }
        }
        scan(s.body);
        scan(s.orelse);
      }
    };
    scan(ast.statements);
  }

  std::vector<Node> build(const std::vector<Stmt>& raw, const std::string& file, bool in_loop) {
    Inliner inliner(functions_, &result_.diagnostics, file);
    const auto stmts = Hoister(config_).run(inliner.run(raw, options_.inline_depth));
    std::vector<Node> out;
    convert(stmts, file, in_loop, out);
    return out;
  }

  void plain(Stmt s, const std::string& file, bool in_loop, std::vector<Node>& out) {
    Node n;
    n.stmt = std::move(s);
    n.file = file;
    n.in_loop = in_loop;
    out.push_back(std::move(n));
  }

  void convert(const std::vector<Stmt>& stmts, const std::string& file, bool in_loop, std::vector<Node>& out) {
    for (const auto& s : stmts) {
      switch (s.kind) {
        case SK::Assign:
        case SK::TernaryAssign:
        case SK::Expr:
        case SK::Call:
        case SK::Echo:
        case SK::Return:
          plain(s, file, in_loop, out);
          break;
        case SK::Include: {
          const auto target = include_target(s, file);
          if (!target) {
            plain(s, file, in_loop, out);
            break;
          }
          const std::string key = target->string();
          if (active_.count(key)) break;
          const php::Ast* inc = load(*target, file, s.pos.line);
          if (!inc) break;
          active_.insert(key);
          auto nodes = build(inc->statements, key, in_loop);
          active_.erase(key);
          out.insert(out.end(), std::make_move_iterator(nodes.begin()), std::make_move_iterator(nodes.end()));
          break;
        }
        case SK::If: {
          Node n;
          n.is_if = true;
          n.file = file;
          n.in_loop = in_loop;
          n.stmt = s;
          n.stmt.body.clear();
          n.stmt.orelse.clear();
          convert(s.body, file, in_loop, n.then_branch);
          convert(s.orelse, file, in_loop, n.else_branch);
          n.has_else = !s.orelse.empty();
          out.push_back(std::move(n));
          break;
        }
        case SK::Loop:
          if (s.op == "foreach") {
            if (!s.args.empty()) plain(make_assign(s.args[0], s.value, s.pos), file, true, out);
            plain(make_assign(s.target, s.value, s.pos), file, true, out);
          }
          for (const auto& init : s.args)
            if (s.op == "for") plain(as_stmt(init, s.pos), file, true, out);
          convert(s.body, file, true, out);
          for (const auto& step : s.step) plain(as_stmt(step, s.pos), file, true, out);
          break;
        case SK::Opaque:
          if (s.op != "break" && s.op != "continue")
            result_.diagnostics.push_back(where(file, s.pos.line) + "unsupported construct '" + s.op + "' skipped");
          break;
        default:
          break;
      }
    }
  }

  static Stmt as_stmt(const Expr& e, php::Pos pos) {
    if (e.kind == K::Assign && e.kids.size() == 2) return make_assign(e.kids[0], e.kids[1], pos);
    return make_expr_stmt(e, pos);
  }

  // --- paths --------------------------------------------------------------

  void walk(const std::vector<Node>& seq, std::size_t i, std::vector<PathItem>& path, const std::function<void()>& k) {
    if (exhausted_) return;
    if (i == seq.size()) return k();
    const Node& n = seq[i];
    const auto rest = [&] { walk(seq, i + 1, path, k); };
    if (!n.is_if) {
      path.push_back({&n, SliceRole::Plain, scopes_});
      rest();
      path.pop_back();
      return;
    }
    const std::size_t h = path.size();
    path.push_back({&n, SliceRole::Header, scopes_});

    path[h].took_then = true;
    scopes_.emplace_back(h, true);
    walk(n.then_branch, 0, path, rest);
    scopes_.pop_back();

    path[h].took_then = false;
    scopes_.emplace_back(h, false);
    if (n.has_else) {
      path[h].marker = path.size();
      path.push_back({&n, SliceRole::ElseMarker, scopes_});
    }
    walk(n.else_branch, 0, path, rest);
    if (n.has_else) path.pop_back();
    path[h].marker = static_cast<std::size_t>(-1);
    scopes_.pop_back();

    path.pop_back();
  }

  Facts eval(const Expr& e, const std::set<std::string>& taint) const {
    Facts f;
    const auto all = [&](std::span<const Expr> kids) {
      for (const auto& k : kids) f.merge(eval(k, taint));
    };
    switch (e.kind) {
      case K::Variable:
        if (config_.is_input(e.text)) {
          f.tainted = f.input = true;
          f.reads.insert("$" + e.text);
        } else if (taint.count(e.text)) {
          f.tainted = true;
          f.reads.insert(e.text);
        }
        break;
      case K::Index:
        if (is_input_access(e, config_)) {
          f.tainted = f.input = true;
          f.reads.insert("$" + input_key(e));  // lets a header that checks this access join the slice
        } else if (!e.kids.empty())
          f.merge(eval(e.kids[0], taint));
        break;
      case K::Property:
      case K::StaticProp:
        if (auto n = tracked_name(e); n && taint.count(*n)) {
          f.tainted = true;
          f.reads.insert(*n);
        }
        if (e.kind == K::Property) all(e.kids);
        break;
      case K::Binary:
        if (is_concat(e) || is_logical(e) || e.text == "??") all(e.kids);
        break;
      case K::Unary:
        if (e.text == "!" || e.text == "@") all(e.kids);
        break;
      case K::Cast:
      case K::Choice:
      case K::Ternary:
      case K::Array:
      case K::New:
      case K::Interpolated:
        all(e.kids);
        break;
      case K::Assign:
        if (e.kids.size() == 2) f.merge(eval(e.kids[1], taint));
        break;
      case K::Call:
      case K::MethodCall:
      case K::StaticCall: {
        const auto args = call_args(e);
        if (e.cut) {
          all(args);
          break;
        }
        for (std::size_t i : data_args(e, config_)) f.merge(eval(args[i], taint));
        if (e.kind == K::MethodCall && !lookup_call(e, config_)) f.merge(eval(e.kids[0], taint));
        break;
      }
      default:
        break;
    }
    return f;
  }

  std::optional<SinkUse> sink_of(const Stmt& s, const std::set<std::string>& taint) const {
    SinkUse use;
    if (s.kind == SK::Echo || s.kind == SK::Include) {
      use.spec = config_.lookup(s.op);
      use.name = s.op;
      if (!use.spec || use.spec->token != IslToken::ss) return std::nullopt;
      if (s.kind == SK::Echo)
        for (const auto& a : s.args) use.facts.merge(eval(a, taint));
      else
        use.facts = eval(s.value, taint);
      return use;
    }
    if (!s.has_value) return std::nullopt;
    const Expr* v = &s.value;
    while (v->kind == K::Unary && v->text == "@" && !v->kids.empty()) v = &v->kids[0];
    if (!is_call(*v)) return std::nullopt;
    use.spec = lookup_call(*v, config_);
    if (!use.spec || use.spec->token != IslToken::ss) return std::nullopt;
    use.name = call_name(*v, config_);
    const auto args = call_args(*v);
    for (std::size_t i : data_args(*v, config_)) use.facts.merge(eval(args[i], taint));
    return use;
  }

  static bool has_cut(const Stmt& s) {
    bool cut = false;
    rewrite_exprs(const_cast<Stmt&>(s), [&](Expr& e) { cut |= e.cut; });
    return cut;
  }

  void analyze(const std::vector<PathItem>& path) {
    const std::size_t index = paths_++;
    if (paths_ >= options_.path_budget) exhausted_ = true;

    const std::size_t n = path.size();
    std::vector<Facts> facts(n);
    std::vector<std::optional<SinkUse>> sinks(n);
    std::set<std::string> taint;
    for (std::size_t i = 0; i < n; ++i) {
      const Node& node = *path[i].node;
      if (path[i].role == SliceRole::ElseMarker) continue;
      const Stmt& s = node.stmt;
      if (path[i].role == SliceRole::Header) {
        facts[i] = eval(s.value, taint);
        continue;
      }
      sinks[i] = sink_of(s, taint);
      if (s.kind == SK::Assign || s.kind == SK::TernaryAssign) {
        facts[i] = eval(s.value, taint);
        if (const auto def = tracked_name(s.target)) {
          if (facts[i].tainted)
            taint.insert(*def);
          else if (is_strong_target(s.target))
            taint.erase(*def);
        }
      } else if (s.has_value) {
        facts[i] = eval(s.value, taint);
      }
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (!sinks[i] || !sinks[i]->facts.tainted) continue;
      for (VulnClass cls : sinks[i]->spec->classes) {
        if (!options_.classes.empty() &&
            std::find(options_.classes.begin(), options_.classes.end(), cls) == options_.classes.end())
          continue;
        slice_back(path, facts, i, *sinks[i], cls, index);
      }
    }
  }

  void slice_back(const std::vector<PathItem>& path, const std::vector<Facts>& facts, std::size_t sink,
                  const SinkUse& use, VulnClass cls, std::size_t index) {
    std::set<std::string> needed = use.facts.reads;
    std::vector<char> keep(path.size(), 0), marked(path.size(), 0);
    const auto mark = [&](std::size_t k) {
      for (const auto& sc : path[k].scopes) marked[sc.first] = 1;
    };
    keep[sink] = 1;
    mark(sink);
    for (std::size_t k = sink; k-- > 0;) {
      const PathItem& item = path[k];
      const Stmt& s = item.node->stmt;
      if (item.role == SliceRole::Plain && (s.kind == SK::Assign || s.kind == SK::TernaryAssign)) {
        const auto def = tracked_name(s.target);
        if (!def || !needed.count(*def)) continue;
        if (is_strong_target(s.target)) needed.erase(*def);
        if (facts[k].tainted) {
          keep[k] = 1;
          mark(k);
          needed.insert(facts[k].reads.begin(), facts[k].reads.end());
        }
      } else if (item.role == SliceRole::Header && marked[k] && facts[k].tainted) {
        const auto& reads = facts[k].reads;
        if (std::none_of(reads.begin(), reads.end(), [&](const auto& r) { return needed.count(r); })) continue;
        keep[k] = 1;
        mark(k);
        if (item.took_then)
          needed.insert(reads.begin(), reads.end());
        else if (item.marker < path.size())
          keep[item.marker] = 1;
      }
    }

    Slice slice;
    slice.file = path[sink].node->file;
    slice.sink_class = cls;
    slice.sink = use.name;
    slice.path_index = index;
    slice.sink_line = path[sink].node->stmt.pos.line;
    std::string key = std::to_string(static_cast<int>(cls));
    for (std::size_t k = 0; k <= sink; ++k) {
      const PathItem& item = path[k];
      if (item.role == SliceRole::Header && k < sink && std::any_of(path[sink].scopes.begin(), path[sink].scopes.end(),
                                                                    [&](const auto& sc) { return sc.first == k; }))
        slice.branches.push_back(std::to_string(item.node->stmt.pos.line) + (item.took_then ? ":then" : ":else"));
      if (!keep[k]) continue;
      SliceStmt st;
      st.role = item.role;
      st.file = item.node->file;
      st.in_loop = item.node->in_loop;
      if (item.role == SliceRole::ElseMarker) {
        st.stmt.pos = item.node->stmt.else_pos;
        st.line = item.node->stmt.else_pos.line;
      } else {
        st.stmt = item.node->stmt;
        st.line = st.stmt.pos.line;
      }
      for (auto it = item.scopes.rbegin(); it != item.scopes.rend(); ++it)
        if (keep[it->first]) {
          st.in_then = it->second && item.role == SliceRole::Plain;
          break;
        }
      if (st.role != SliceRole::ElseMarker && (facts[k].input || (k == sink && use.facts.input)) && !slice.entry_line)
        slice.entry_line = st.line;
      slice.loop_approx |= st.in_loop;
      slice.cut |= has_cut(st.stmt);
      key += "|" + std::to_string(reinterpret_cast<std::uintptr_t>(item.node)) + ":" +
             std::to_string(static_cast<int>(item.role));
      slice.statements.push_back(std::move(st));
    }

    const auto& first = slice.statements.front();
    const bool starts_at_input = first.role != SliceRole::ElseMarker && first.line == slice.entry_line;
    if (!starts_at_input || !seen_.insert(key).second) return;

    const std::string sink_key = std::to_string(reinterpret_cast<std::uintptr_t>(path[sink].node)) + ":" +
                                 std::to_string(static_cast<int>(cls));
    if (++per_sink_[sink_key] > options_.path_cap) {
      if (per_sink_[sink_key] == options_.path_cap + 1)
        result_.diagnostics.push_back(where(slice.file, slice.sink_line) + "path cap of " +
                                      std::to_string(options_.path_cap) + " reached for " + use.name +
                                      "; further slices dropped");
      return;
    }
    result_.slices.push_back(std::move(slice));
  }

  const TokenConfig& config_;
  const SliceOptions& options_;
  SliceResult result_;
  std::map<std::string, Function> functions_;
  std::filesystem::path base_;
  std::map<std::string, std::optional<php::Ast>> included_;
  std::set<std::string> active_;
  std::vector<Node> roots_;
  std::vector<std::pair<std::size_t, bool>> scopes_;
  std::size_t paths_ = 0;
  bool exhausted_ = false;
  std::set<std::string> seen_;
  std::map<std::string, std::size_t> per_sink_;
};

}  // namespace

std::vector<Stmt> inline_calls(const std::vector<Stmt>& stmts, const std::map<std::string, Function>& functions,
                               int depth, std::vector<std::string>* diagnostics, const std::string& file) {
  return Inliner(functions, diagnostics, file).run(stmts, depth);
}

std::vector<Stmt> hoist_arguments(const std::vector<Stmt>& stmts, const TokenConfig& config) {
  return Hoister(config).run(stmts);
}

SliceResult extract_slices(const php::Ast& ast, const TokenConfig& config, const SliceOptions& options) {
  return Extractor(config, options).run(ast);
}

std::string dump_slices(const std::vector<Slice>& slices) {
  std::ostringstream out;
  for (std::size_t i = 0; i < slices.size(); ++i) {
    const Slice& s = slices[i];
    out << "slice " << i + 1 << " " << s.file << " " << label_of(s.sink_class) << " entry=" << s.entry_line
        << " sink=" << s.sink_line << " via " << s.sink << " path=" << s.path_index;
    for (const auto& b : s.branches) out << " " << b;
    if (s.loop_approx) out << " loop-once";
    if (s.cut) out << " inline-cut";
    out << "\n";
    for (const auto& st : s.statements) {
      out << "  " << st.line << "\t";
      if (st.role == SliceRole::ElseMarker) {
        out << "else";
      } else if (st.role == SliceRole::Header) {
        out << "if (" << php::print_expr(st.stmt.value) << ")";
      } else {
        std::string text = php::print_stmt(st.stmt);
        while (!text.empty() && (text.back() == '\n' || text.back() == ' ')) text.pop_back();
        out << (st.in_then ? "  " : "") << text;
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace dekant
