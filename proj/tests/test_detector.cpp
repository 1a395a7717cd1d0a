#include <string>
#include <vector>

#include "doctest.h"
#include "dekant/detector.hpp"
#include "dekant/slicer.hpp"
#include "dekant/translator.hpp"
#include "support.hpp"

using namespace dekant;
using testing_support::bundled_config;
using testing_support::demo_model;
using testing_support::parse_fixture;

namespace {

std::vector<Decoding> decode_fixture(const std::string& rel, const DetectorOptions& options = {}) {
  std::vector<Decoding> out;
  for (const auto& s : extract_slices(parse_fixture(rel), bundled_config()).slices)
    out.push_back(classify_slice(translate_slice(s, bundled_config()), demo_model(), options));
  return out;
}

Decoding decode_code(const std::string& code, const DetectorOptions& options = {}) {
  const auto slices = extract_slices(php::parse_file(code, "t.php"), bundled_config()).slices;
  REQUIRE(slices.size() == 1);
  return classify_slice(translate_slice(slices[0], bundled_config()), demo_model(), options);
}

IslInstruction instruction(std::vector<IslToken> tokens, std::vector<std::string> names, bool assignment) {
  IslInstruction in;
  in.tokens = std::move(tokens);
  in.varmap.names = std::move(names);
  in.varmap.is_assignment = assignment;
  in.input_keys.assign(in.tokens.size(), "");
  return in;
}

}  // namespace

TEST_CASE("login query trace and tainted list") {
  const auto d = decode_fixture("fixtures/login_query/login.php");
  REQUIRE(d.size() == 1);
  const auto& steps = d[0].steps;
  REQUIRE(steps.size() == 3);
  CHECK(render_trace(steps[0]) == "<input,Taint> <var_vv_u,Taint>");
  CHECK(render_trace(steps[1]) == "<var_vv_u,Taint> <var_vv_q,Taint>");
  CHECK(render_trace(steps[2]) == "<ss,N-Taint> <var_vv_q,Taint> <var_vv_r,Taint>");
  CHECK(steps[0].tl == "{u}");
  CHECK(steps[1].tl == "{u, q}");
  CHECK(steps[2].tl == "{u, q, r}");
  CHECK(d[0].final_state == HmmState::Taint);
  REQUIRE(d[0].alert);
  CHECK(d[0].alert->sink_line == 3);
  CHECK(d[0].alert->trace.size() == 3);
}

TEST_CASE("validated form lists") {
  const auto d = decode_fixture("fixtures/validated_echo/user_form.php");
  REQUIRE(d.size() == 2);

  const auto& then = d[0].steps;
  REQUIRE(then.size() == 4);
  CHECK(then[0].tl == "{u}");
  CHECK(then[1].tl == "{u, a}");
  CHECK(then[2].ctl == "{u, a}");
  CHECK(then[3].ctl == "{u, a}");
  CHECK(then[2].shape == Shape::Header);
  CHECK(then[3].shape == Shape::Branch);
  CHECK(render_trace(then[3]) == "<cond,N-Taint> <ss,N-Taint> <var,N-Taint>");
  CHECK(d[0].final_state == HmmState::NTaint);
  CHECK_FALSE(d[0].alert);

  const auto& other = d[1].steps;
  REQUIRE(other.size() == 4);
  CHECK(other[1].ctl == "{u, a}");
  CHECK(other[2].shape == Shape::Else);
  CHECK(other[2].ctl == "{}");
  CHECK(other[3].ctl == "{}");
  CHECK(render_trace(other[3]) == "<ss,N-Taint> <var_vv_u,Taint>");
  CHECK(d[1].final_state == HmmState::Taint);
  CHECK(d[1].alert);
}

TEST_CASE("sanitized input decodes as sanitization") {
  const auto in = instruction({IslToken::sanit_f, IslToken::input, IslToken::var}, {"-", "-", "v"}, true);
  TaintArtifacts lists;
  const auto prepared = before_vit(in, lists, demo_model());
  const auto vit = decode_vit(prepared.rows, demo_model(), FinalStates::TaintOrNTaint);
  CHECK(vit.states == std::vector<HmmState>{HmmState::San, HmmState::San, HmmState::NTaint});

  const auto d = decode_fixture("fixtures/sanitized_echo/escape.php");
  REQUIRE(d.size() == 1);
  CHECK(d[0].steps[0].sl == "{v}");
  CHECK(d[0].steps[0].tl == "{}");
  CHECK(d[0].final_state == HmmState::NTaint);
}

TEST_CASE("copies keep taint") {
  const auto d = decode_code("<?php\n$a = $_GET['a'];\n$b = $a;\necho $b;\n");
  CHECK(d.final_state == HmmState::Taint);
  CHECK(d.steps[1].tl == "{a, b}");
}

TEST_CASE("reassigning from a sanitizer untaints") {
  const auto d = decode_code("<?php\n$a = $_GET['a'];\n$a = htmlentities($a);\necho $a;\n");
  CHECK(d.steps[1].tl == "{}");
  CHECK(d.steps[1].sl == "{a}");
  CHECK(d.final_state == HmmState::NTaint);
}

TEST_CASE("strict trigger set only validates after typechk_num and contentchk") {
  const std::string code = "<?php\n$u = $_GET['u'];\nif (isset($u))\n  echo $u;\n";
  const auto lax = decode_code(code);
  const auto strict = decode_code(code, DetectorOptions{.strict_triggers = true});
  CHECK(join_tokens(lax.steps[1].tokens) == "cond fillchk var cond");
  CHECK(join_tokens(strict.steps[1].tokens) == "cond fillchk var_vv cond");
  CHECK(strict.steps[1].ctl == "{u}");

  const auto form = decode_fixture("fixtures/validated_echo/user_form.php", DetectorOptions{.strict_triggers = true});
  CHECK(form[0].steps[2].ctl == "{u, a}");
  CHECK(form[0].final_state == HmmState::NTaint);
  CHECK(form[1].final_state == HmmState::Taint);
}

TEST_CASE("instruction shapes") {
  using T = IslToken;
  CHECK(shape_of({T::cond}) == Shape::Else);
  CHECK(shape_of({T::cond, T::var, T::cond}) == Shape::Header);
  CHECK(shape_of({T::cond, T::ss, T::var}) == Shape::Branch);
  CHECK(shape_of({T::ss, T::var}) == Shape::Plain);
}

TEST_CASE("lists render in first-seen order") {
  TaintArtifacts lists;
  lists.insert(ListKind::TL, "u");
  lists.insert(ListKind::TL, "a");
  lists.insert(ListKind::CTL, "a");
  lists.insert(ListKind::CTL, "u");
  CHECK(lists.render(ListKind::TL) == "{u, a}");
  CHECK(lists.render(ListKind::CTL) == "{u, a}");
  lists.erase(ListKind::TL, "u");
  CHECK(lists.render(ListKind::TL) == "{a}");
  lists.clear(ListKind::CTL);
  CHECK(lists.render(ListKind::CTL) == "{}");
  CHECK(lists.render(ListKind::SL) == "{}");
}

TEST_CASE("before_vit rewrites tainted names outside validation") {
  TaintArtifacts lists;
  lists.insert(ListKind::TL, "q");
  lists.insert(ListKind::TL, "s");
  lists.insert(ListKind::SL, "s");
  const auto in = instruction({IslToken::ss, IslToken::var, IslToken::conc, IslToken::var}, {"-", "q", "-", "s"}, false);
  const auto p = before_vit(in, lists, demo_model());
  CHECK(join_tokens(p.tokens) == "ss var_vv conc var");
  CHECK(p.rows.rows() == 4);
}
