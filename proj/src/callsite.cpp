#include "dekant/callsite.hpp"

namespace dekant {

using php::Expr;
using K = Expr::Kind;

bool is_call(const Expr& e) { return e.kind == K::Call || e.kind == K::MethodCall || e.kind == K::StaticCall; }

std::span<const Expr> call_args(const Expr& call) {
  std::span<const Expr> all(call.kids);
  if (call.kind == K::MethodCall && !all.empty()) return all.subspan(1);
  return all;
}

const FunctionSpec* lookup_call(const Expr& call, const TokenConfig& config) {
  if (call.cut) return nullptr;
  switch (call.kind) {
    case K::Call:
      return config.lookup(call.text);
    case K::MethodCall:
      // receivers are untyped; the only configured methods belong to mysqli
      for (const char* cls : {"mysqli::", "mysqli_stmt::"})
        if (const FunctionSpec* spec = config.lookup(cls + call.text)) return spec;
      return nullptr;
    case K::StaticCall:
      return config.lookup(call.text);
    default:
      return nullptr;
  }
}

std::string call_name(const Expr& call, const TokenConfig& config) {
  if (call.kind != K::MethodCall) return call.text;
  for (const char* cls : {"mysqli::", "mysqli_stmt::"})
    if (config.lookup(cls + call.text)) return cls + call.text;
  return "->" + call.text;
}

std::vector<std::size_t> data_args(const Expr& call, const TokenConfig& config) {
  const auto args = call_args(call);
  std::vector<std::size_t> out;
  const FunctionSpec* spec = lookup_call(call, config);
  if (spec) {
    switch (spec->token) {
      case IslToken::add_str:  // str_pad(input, length, pad)
        for (std::size_t i : {0u, 2u})
          if (i < args.size()) out.push_back(i);
        return out;
      case IslToken::sub_str:  // substr(string, offset, length)
        if (!args.empty()) out.push_back(0);
        return out;
      case IslToken::sub_str_replace:  // substr_replace(string, replacement, offset, length)
        for (std::size_t i : {0u, 1u})
          if (i < args.size()) out.push_back(i);
        return out;
      default:
        break;
    }
  }
  for (std::size_t i = 0; i < args.size(); ++i)
    if (!spec || spec->is_relevant(i)) out.push_back(i);
  return out;
}

bool is_input_access(const Expr& e, const TokenConfig& config) {
  if (e.kind == K::Variable) return config.is_input(e.text);
  if (e.kind == K::Index && !e.kids.empty()) return is_input_access(e.kids[0], config);
  return false;
}

std::string input_key(const Expr& e) {
  if (e.kind == K::Variable) return e.text;
  if (e.kind == K::Index && !e.kids.empty()) {
    if (e.kids[0].kind == K::Variable) {
      if (e.kids.size() > 1 && e.kids[1].kind == K::Literal) return e.kids[0].text + "[" + e.kids[1].text + "]";
      return e.kids[0].text;
    }
    return input_key(e.kids[0]);
  }
  return {};
}

std::optional<std::string> tracked_name(const Expr& e) {
  switch (e.kind) {
    case K::Variable:
      return e.text;
    case K::StaticProp:
      return e.text;
    case K::Index:
      if (e.kids.empty()) return std::nullopt;
      return tracked_name(e.kids[0]);
    case K::Property:
      if (e.kids.empty()) return std::nullopt;
      if (auto base = tracked_name(e.kids[0])) return *base + "->" + e.text;
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

bool is_strong_target(const Expr& e) {
  return e.kind == K::Variable || e.kind == K::StaticProp ||
         (e.kind == K::Property && !e.kids.empty() && tracked_name(e.kids[0]));
}

bool is_concat(const Expr& e) { return e.kind == K::Binary && e.text == "."; }

bool is_logical(const Expr& e) {
  if (e.kind != K::Binary) return false;
  const std::string& op = e.text;
  return op == "&&" || op == "||" || op == "and" || op == "or" || op == "xor";
}

}  // namespace dekant
