#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dekant/corpus.hpp"
#include "dekant/isl.hpp"

using namespace dekant;
using T = IslToken;

namespace {
bool valid(std::initializer_list<T> toks) { return validate_sequence(std::vector<T>(toks)); }
}  // namespace

TEST_CASE("vocabulary order and names") {
  CHECK(kNumTokens == 22);
  CHECK(name_of(T::input) == "input");
  CHECK(name_of(T::miss) == "miss");
  CHECK(index_of(T::var_vv) == 20);
  CHECK(name_of(HmmState::NTaint) == "N-Taint");
  CHECK(name_of(HmmState::ChgStr) == "Chg_str");
  CHECK(parse_token("typechk_int") == T::typechk_num);
  CHECK_FALSE(parse_token("typechk_float").has_value());
  for (auto t : all_tokens()) CHECK(parse_token(name_of(t)) == t);
  for (auto s : all_states()) CHECK(parse_state(name_of(s)) == s);
}

TEST_CASE("emission constraints") {
  CHECK(can_emit(HmmState::San, T::sanit_f));
  CHECK_FALSE(can_emit(HmmState::San, T::conc));
  CHECK_FALSE(can_emit(HmmState::Taint, T::ss));
  CHECK(can_emit(HmmState::NTaint, T::ss));
  for (auto t : {T::typechk_str, T::typechk_num, T::contentchk, T::fillchk}) CHECK(can_emit(HmmState::Val, t));
  int san = 0, val = 0, chg = 0, taint = 0, ntaint = 0;
  for (auto t : all_tokens()) {
    if (t == T::miss) continue;
    san += can_emit(HmmState::San, t);
    val += can_emit(HmmState::Val, t);
    chg += can_emit(HmmState::ChgStr, t);
    taint += can_emit(HmmState::Taint, t);
    ntaint += can_emit(HmmState::NTaint, t);
  }
  CHECK(san == 4);
  CHECK(val == 7);
  CHECK(chg == 13);
  CHECK(taint == 4);
  CHECK(ntaint == 6);
}

TEST_CASE("grammar") {
  CHECK(valid({T::input, T::var}));
  CHECK(valid({T::ss, T::var, T::var}));
  CHECK_FALSE(valid({T::start_where}));
  CHECK(valid({T::var, T::var}));
  CHECK(valid({T::cond, T::fillchk, T::var, T::contentchk, T::var, T::typechk_num, T::var, T::cond}));
  CHECK(valid({T::cond, T::ss, T::var}));
  CHECK(valid({T::cond}));
  CHECK(valid({T::ss, T::var}));
  CHECK(valid({T::ss, T::input}));
  CHECK(valid({T::ss, T::var, T::conc, T::input, T::conc, T::var}));
  CHECK(valid({T::sanit_f, T::input, T::var}));
  CHECK(valid({T::sub_str, T::var, T::char5, T::start_where, T::var}));
  CHECK(valid({T::sub_str_replace, T::var, T::char6, T::input, T::var}));
  CHECK(valid({T::add_str, T::var, T::char6, T::var}));
  CHECK(valid({T::ss, T::sanit_f, T::var, T::conc, T::var}));
  CHECK(valid({T::var_vv, T::var}));
  CHECK_FALSE(valid({T::cond, T::cond}));
  CHECK_FALSE(valid({T::conc}));
  CHECK_FALSE(valid({T::var, T::conc}));
  CHECK_FALSE(valid({T::sanit_f}));
  CHECK_FALSE(valid({T::ss}));
  CHECK_FALSE(valid({T::input, T::input}));
  CHECK_FALSE(valid({T::sub_str, T::var, T::start_where}));
  CHECK_FALSE(valid({T::input, T::var, T::miss}));
  CHECK_FALSE(validate_sequence({}));
}

TEST_CASE("every demo corpus sequence is grammatical") {
  std::ifstream in(DEKANT_SOURCE_DIR "/data/corpus/demo.corpus");
  std::stringstream ss;
  ss << in.rdbuf();
  const Corpus c = load_corpus(ss.str());
  CHECK(c.entries.size() > 24);
  for (const auto& e : c.entries) {
    std::vector<T> toks;
    for (const auto& p : e.unpadded()) toks.push_back(p.first);
    INFO(join_tokens(toks));
    CHECK(validate_sequence(toks));
  }
}

TEST_CASE("vulnerability classes") {
  CHECK(parse_class("sqli") == VulnClass::SQLI);
  CHECK(parse_class("DT/PT") == VulnClass::DTPT);
  CHECK(parse_class("Xss") == VulnClass::XSS);
  CHECK_FALSE(parse_class("csrf").has_value());
  CHECK(label_of(VulnClass::DTPT) == "DT/PT");
}

TEST_CASE("varmap rendering") {
  CHECK(render_varmap({true, {"-", "q", "r"}}) == "1 - q r");
  CHECK(render_varmap({false, {"-"}}) == "0 -");
}
