#include <string>
#include <vector>

#include "doctest.h"
#include "dekant/slicer.hpp"
#include "dekant/translator.hpp"
#include "support.hpp"

using namespace dekant;
using testing_support::bundled_config;
using testing_support::parse_fixture;

namespace {

std::vector<std::string> rows(const SliceIsl& isl) {
  std::vector<std::string> out;
  for (const auto& in : isl.instructions)
    out.push_back(std::to_string(in.loc.line) + " " + join_tokens(in.tokens) + " | " + render_varmap(in.varmap));
  return out;
}

IslInstruction one(const std::string& code) {
  const auto ast = php::parse_file("<?php " + code, "t.php");
  REQUIRE(ast.statements.size() == 1);
  return translate_stmt(ast.statements.front(), bundled_config());
}

std::string tokens_of(const std::string& code) { return join_tokens(one(code).tokens); }

}  // namespace

TEST_CASE("login query slice translates to its isl and variable map") {
  const auto slices = extract_slices(parse_fixture("fixtures/login_query/login.php"), bundled_config()).slices;
  REQUIRE(slices.size() == 1);
  const auto isl = translate_slice(slices[0], bundled_config());
  CHECK(rows(isl) == std::vector<std::string>{"1 input var | 1 - u", "2 var var | 1 u q", "3 ss var var | 1 - q r"});
}

TEST_CASE("validated form slices translate with branch markers") {
  const auto slices = extract_slices(parse_fixture("fixtures/validated_echo/user_form.php"), bundled_config()).slices;
  REQUIRE(slices.size() == 2);
  const std::string header = "3 cond fillchk var contentchk var typechk_num var cond | 0 - - a - u - a -";
  CHECK(rows(translate_slice(slices[0], bundled_config())) ==
        std::vector<std::string>{"1 input var | 1 - u", "2 input var | 1 - a", header, "4 cond ss var | 0 - - u"});
  CHECK(rows(translate_slice(slices[1], bundled_config())) ==
        std::vector<std::string>{"1 input var | 1 - u", header, "5 cond | 0 -", "6 ss var | 0 - u"});
}

TEST_CASE("collection statements use the representation tokens") {
  const auto ast = parse_fixture("fixtures/collection/statements.php");
  const std::vector<std::string> want = {
      "input var",
      "input var",
      "sanit_f input var",
      "sanit_f input var",
      "sanit_f var var",
      "var var",
      "ss var var",
      "ss var var",
      "ss var",
      "ss var",
      "var var",
      "cond fillchk var cond",
      "cond typechk_str var contentchk var cond",
      // isset is a presence check here, not a string type check
      "cond fillchk var contentchk var typechk_num var cond",
  };
  REQUIRE(ast.statements.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CAPTURE(i);
    CHECK(join_tokens(translate_stmt(ast.statements[i], bundled_config()).tokens) == want[i]);
  }
}

TEST_CASE("direct echo of input") {
  const auto in = one("echo $_GET['x'];");
  CHECK(join_tokens(in.tokens) == "ss input");
  CHECK(render_varmap(in.varmap) == "0 - -");
  CHECK(in.input_keys[1] == "_GET[x]");
}

TEST_CASE("string manipulation tokens") {
  CHECK(tokens_of("$x = substr($a, 0, 3);") == "sub_str var char5 var");
  CHECK(tokens_of("$x = substr($a, 2, 30);") == "sub_str var char6 start_where var");
  CHECK(tokens_of("$x = substr($a, 2);") == "sub_str var char6 start_where var");
  CHECK(tokens_of("$x = str_pad($a, 10, $b);") == "add_str var char6 var var");
  CHECK(tokens_of("$x = str_pad($a, 4, '*');") == "add_str var char5 var var");
  CHECK(tokens_of("$x = substr_replace($a, $b, 0, 2);") == "sub_str_replace var char5 var var");
  CHECK(tokens_of("$x = trim($a);") == "erase_str var var");
  CHECK(tokens_of("$x = str_replace('a', 'b', $a);") == "replace_str var var");
  CHECK(tokens_of("$x = explode(',', $a);") == "split_str var var");
  CHECK(tokens_of("$x = implode(',', $a);") == "join_str var var");
  CHECK(tokens_of("$x = $a . 'lit' . $b;") == "var conc var var");
  CHECK(tokens_of("$x = (int) $a;") == "var var");
  CHECK(tokens_of("$x = frobnicate($a);") == "var var");
  CHECK(tokens_of("if ($a > 3 && $b) {}") == "cond var cond");
  CHECK(tokens_of("if ($a > 3) {}") == "cond var cond");
}

TEST_CASE("untranslatable statements are rejected") {
  CHECK_THROWS_AS(one("return;"), TranslateError);
  CHECK_THROWS_AS(one("print_r(3);"), TranslateError);
  CHECK(tokens_of("$x = 'constant';") == "var");
}

TEST_CASE("translated statements never carry detector tokens and always parse") {
  for (const char* file : {"fixtures/login_query/login.php", "fixtures/validated_echo/user_form.php", "fixtures/sanitized_echo/escape.php",
                           "fixtures/collection/statements.php"}) {
    const auto ast = parse_fixture(file);
    for (const auto& s : ast.statements) {
      const auto in = translate_stmt(s, bundled_config());
      CHECK(validate_sequence(in.tokens));
      for (auto t : in.tokens) {
        CHECK(t != IslToken::var_vv);
        CHECK(t != IslToken::miss);
      }
      CHECK(in.varmap.names.size() == in.tokens.size());
    }
  }
}
