#include "dekant/isl.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace dekant {

namespace {

constexpr std::array<std::string_view, kNumTokens> kTokenNames = {
    "input", "var", "sanit_f", "ss", "typechk_str", "typechk_num", "contentchk", "fillchk",
    "cond", "join_str", "erase_str", "replace_str", "split_str", "add_str", "sub_str",
    "sub_str_replace", "char5", "char6", "start_where", "conc", "var_vv", "miss"};

constexpr std::array<std::string_view, kNumStates> kStateNames = {"Taint", "N-Taint", "San", "Val",
                                                                  "Chg_str"};

constexpr std::array<std::string_view, kNumClasses> kClassLabels = {
    "SQLI", "XSS", "RFI", "LFI", "OSCI", "PHPCI", "LDAPI", "DT/PT", "SCD", "CS", "HI", "SF"};
constexpr std::array<std::string_view, kNumClasses> kClassSuffixes = {
    "sqli", "xss", "rfi", "lfi", "osci", "phpci", "ldapi", "dtpt", "scd", "cs", "hi", "sf"};

using T = IslToken;

bool is_param(T t) { return t == T::input || t == T::var || t == T::var_vv; }
bool is_var(T t) { return t == T::var || t == T::var_vv; }
bool is_num_chars(T t) { return t == T::char5 || t == T::char6; }

// Least-fixpoint evaluation of the grammar over spans: ends[i] holds every
// position e such that tokens[i, e) derives the nonterminal. Left recursion
// through statement/concat/assignment is harmless this way.
class SpanParser {
 public:
  explicit SpanParser(std::span<const T> toks)
      : toks_(toks),
        n_(toks.size()),
        stmt_(n_ + 1, std::vector<char>(n_ + 1, 0)),
        concat_(stmt_),
        seq_(stmt_) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = n_; i-- > 0;) {
        changed |= step_stmt(i);
        changed |= step_concat(i);
        changed |= step_seq(i);
      }
    }
  }

  bool statement_spans_all() const { return n_ > 0 && stmt_[0][n_]; }

 private:
  T at(std::size_t i) const { return i < n_ ? toks_[i] : T::miss; }
  bool param_at(std::size_t i) const { return i < n_ && is_param(toks_[i]); }

  static bool mark(std::vector<char>& row, std::size_t e) {
    if (row[e]) return false;
    row[e] = 1;
    return true;
  }

  bool step_stmt(std::size_t i) {
    auto& row = stmt_[i];
    bool ch = false;
    const T t = toks_[i];
    switch (t) {
      case T::ss:
        if (i + 1 <= n_)
          for (std::size_t e = i + 1; e <= n_; ++e)
            if (concat_[i + 1][e]) ch |= mark(row, e);
        break;
      case T::sanit_f:
      case T::typechk_str:
      case T::typechk_num:
      case T::fillchk:
      case T::contentchk:
      case T::join_str:
      case T::erase_str:
      case T::replace_str:
      case T::split_str:
        if (param_at(i + 1)) ch |= mark(row, i + 2);
        break;
      case T::add_str:
        if (param_at(i + 1) && is_num_chars(at(i + 2)) && param_at(i + 3)) ch |= mark(row, i + 4);
        break;
      case T::sub_str:
        if (param_at(i + 1) && is_num_chars(at(i + 2))) {
          ch |= mark(row, i + 3);
          if (at(i + 3) == T::start_where) ch |= mark(row, i + 4);
        }
        break;
      case T::sub_str_replace:
        if (param_at(i + 1) && is_num_chars(at(i + 2)) && param_at(i + 3)) {
          ch |= mark(row, i + 4);
          if (at(i + 4) == T::start_where) ch |= mark(row, i + 5);
        }
        break;
      case T::cond:
        if (i + 1 <= n_)
          for (std::size_t e = i + 1; e <= n_; ++e)
            if (seq_[i + 1][e]) {
              ch |= mark(row, e);
              if (at(e) == T::cond) ch |= mark(row, e + 1);
            }
        break;
      default:
        break;
    }
    for (std::size_t e = i + 1; e <= n_; ++e)
      if (concat_[i][e]) ch |= mark(row, e);
    // assignment: (statement | param) attrib_var
    for (std::size_t e = i + 1; e < n_; ++e)
      if ((row[e] || (e == i + 1 && param_at(i))) && is_var(toks_[e])) ch |= mark(row, e + 1);
    return ch;
  }

  bool step_concat(std::size_t i) {
    auto& row = concat_[i];
    bool ch = false;
    for (std::size_t e = i + 1; e <= n_; ++e) {
      const bool head = stmt_[i][e] || (e == i + 1 && param_at(i));
      if (!head) continue;
      ch |= mark(row, e);
      if (at(e) == T::conc && e + 1 <= n_)
        for (std::size_t f = e + 1; f <= n_; ++f)
          if (concat_[e + 1][f]) ch |= mark(row, f);
    }
    return ch;
  }

  bool step_seq(std::size_t i) {
    auto& row = seq_[i];
    bool ch = false;
    for (std::size_t e = i + 1; e <= n_; ++e) {
      if (!stmt_[i][e]) continue;
      ch |= mark(row, e);
      if (e < n_)
        for (std::size_t f = e + 1; f <= n_; ++f)
          if (seq_[e][f]) ch |= mark(row, f);
    }
    return ch;
  }

  std::span<const T> toks_;
  std::size_t n_;
  std::vector<std::vector<char>> stmt_, concat_, seq_;
};

}  // namespace

std::string_view name_of(IslToken t) { return kTokenNames[index_of(t)]; }
std::string_view name_of(HmmState s) { return kStateNames[index_of(s)]; }

std::optional<IslToken> parse_token(std::string_view text) {
  if (text == "typechk_int") return IslToken::typechk_num;
  for (std::size_t i = 0; i < kNumTokens; ++i)
    if (kTokenNames[i] == text) return static_cast<IslToken>(i);
  return std::nullopt;
}

std::optional<HmmState> parse_state(std::string_view text) {
  for (std::size_t i = 0; i < kNumStates; ++i)
    if (kStateNames[i] == text) return static_cast<HmmState>(i);
  return std::nullopt;
}

const std::array<IslToken, kNumTokens>& all_tokens() {
  static const auto tokens = [] {
    std::array<IslToken, kNumTokens> a{};
    for (std::size_t i = 0; i < kNumTokens; ++i) a[i] = static_cast<IslToken>(i);
    return a;
  }();
  return tokens;
}

const std::array<HmmState, kNumStates>& all_states() {
  static constexpr std::array<HmmState, kNumStates> states = {
      HmmState::Taint, HmmState::NTaint, HmmState::San, HmmState::Val, HmmState::ChgStr};
  return states;
}

bool can_emit(HmmState s, IslToken t) {
  switch (t) {
    case T::input:
    case T::var:
    case T::var_vv:
      return true;
    case T::conc:
      return s == HmmState::Taint || s == HmmState::NTaint;
    case T::miss:  // padding carries the final state, which is Taint or N-Taint
      return s == HmmState::Taint || s == HmmState::NTaint;
    case T::cond:
    case T::ss:
      return s == HmmState::NTaint;
    case T::sanit_f:
      return s == HmmState::San;
    case T::typechk_str:
    case T::typechk_num:
    case T::contentchk:
    case T::fillchk:
      return s == HmmState::Val;
    case T::join_str:
    case T::erase_str:
    case T::replace_str:
    case T::split_str:
    case T::add_str:
    case T::sub_str:
    case T::sub_str_replace:
    case T::char5:
    case T::char6:
    case T::start_where:
      return s == HmmState::ChgStr;
  }
  return false;
}

const std::array<VulnClass, kNumClasses>& all_classes() {
  static const auto classes = [] {
    std::array<VulnClass, kNumClasses> a{};
    for (std::size_t i = 0; i < kNumClasses; ++i) a[i] = static_cast<VulnClass>(i);
    return a;
  }();
  return classes;
}

std::string_view label_of(VulnClass c) { return kClassLabels[static_cast<std::size_t>(c)]; }
std::string_view suffix_of(VulnClass c) { return kClassSuffixes[static_cast<std::size_t>(c)]; }

std::optional<VulnClass> parse_class(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  std::erase(lower, '/');
  for (std::size_t i = 0; i < kNumClasses; ++i)
    if (kClassSuffixes[i] == lower) return static_cast<VulnClass>(i);
  return std::nullopt;
}

bool validate_sequence(std::span<const IslToken> tokens) {
  if (tokens.empty()) return false;
  // A lone cond is the else marker.
  if (tokens.size() == 1 && tokens[0] == T::cond) return true;
  if (std::find(tokens.begin(), tokens.end(), T::miss) != tokens.end()) return false;
  return SpanParser(tokens).statement_spans_all();
}

std::string join_tokens(std::span<const IslToken> tokens) {
  std::string out;
  for (auto t : tokens) {
    if (!out.empty()) out += ' ';
    out += name_of(t);
  }
  return out;
}

std::string render_varmap(const VarMapEntry& entry) {
  std::string out = entry.is_assignment ? "1" : "0";
  for (const auto& n : entry.names) {
    out += ' ';
    out += n;
  }
  return out;
}

}  // namespace dekant
