#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dekant/php/parser.hpp"

using namespace dekant::php;
using K = Expr::Kind;

namespace {
std::string read(const std::string& rel) {
  std::ifstream in(std::string(DEKANT_SOURCE_DIR) + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_round_trip(const std::string& src) {
  const Ast a = parse_file(src, "t.php");
  const std::string printed = print_ast(a);
  INFO(printed);
  const Ast b = parse_file(printed, "printed.php");
  CHECK(same_ast(a, b));
  CHECK(print_ast(b) == printed);
}
}  // namespace

TEST_CASE("superglobal assignment") {
  const Ast ast = parse_file("<?php $u = $_POST['username'];", "f.php");
  REQUIRE(ast.statements.size() == 1);
  const Stmt& s = ast.statements[0];
  CHECK(s.kind == Stmt::Kind::Assign);
  CHECK(s.pos.line == 1);
  CHECK(s.target.kind == K::Variable);
  CHECK(s.target.text == "u");
  CHECK(s.value.kind == K::Index);
  CHECK(s.value.kids[0].text == "_POST");
  CHECK(s.value.kids[1].text == "username");
}

TEST_CASE("echo and empty file") {
  const Ast ast = parse_file("<?php echo $v;", "f.php");
  REQUIRE(ast.statements.size() == 1);
  CHECK(ast.statements[0].kind == Stmt::Kind::Echo);
  CHECK(ast.statements[0].args[0].text == "v");
  CHECK(parse_file("", "e.php").statements.empty());
  CHECK(parse_file("<html></html>", "h.php").statements.size() == 1);
}

TEST_CASE("sample programs parse with source lines") {
  const Ast one = parse_file(read("fixtures/login_query/login.php"), "login.php");
  REQUIRE(one.statements.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(one.statements[i].pos.line == i + 1);
  CHECK(one.statements[2].value.kind == K::Call);
  CHECK(one.statements[2].value.text == "mysqli_query");

  const Ast two = parse_file(read("fixtures/validated_echo/user_form.php"), "user_form.php");
  REQUIRE(two.statements.size() == 3);
  CHECK(two.statements[0].kind == Stmt::Kind::TernaryAssign);
  const Stmt& branch = two.statements[2];
  CHECK(branch.kind == Stmt::Kind::If);
  CHECK(branch.pos.line == 3);
  CHECK(branch.body[0].pos.line == 4);
  CHECK(branch.else_pos.line == 5);
  CHECK(branch.orelse[0].pos.line == 6);
  // ${u} is the plain variable u
  CHECK(branch.orelse[0].args[0].kids[0].kind == K::Variable);
  CHECK(branch.orelse[0].args[0].kids[0].text == "u");
}

TEST_CASE("desugaring") {
  const Ast two = desugar(parse_file(read("fixtures/validated_echo/user_form.php"), "user_form.php"));
  const Stmt& first = two.statements[0];
  CHECK(first.kind == Stmt::Kind::Assign);
  CHECK(first.value.kind == K::Choice);
  CHECK(first.value.kids[0].kind == K::Index);

  const Ast interp = desugar(parse_file("<?php $q = \"WHERE user='$u' AND x={$a['k']}\";", "i.php"));
  const Expr& v = interp.statements[0].value;
  CHECK(print_expr(v) == "((('WHERE user=\\'' . $u) . '\\' AND x=') . $a['k'])");

  const Ast compound = desugar(parse_file("<?php $q .= $u;", "c.php"));
  CHECK(compound.statements[0].op == "=");
  CHECK(print_expr(compound.statements[0].value) == "($q . $u)");

  // fixpoint
  CHECK(same_ast(desugar(two), two));
  const Ast plain = parse_file("<?php $a = $b . $c; echo $a;", "p.php");
  CHECK(same_ast(desugar(plain), plain));
}

TEST_CASE("control flow and functions") {
  const Ast ast = parse_file(R"(<?php
function f($x, $y = 2) { return htmlentities($x); }
if ($a): echo 1; elseif ($b): echo 2; else: echo 3; endif;
foreach ($_GET as $k => $v) { echo $v; }
while ($i < 3) $i++;
for ($i = 0; $i < 3; $i++) { echo $i; }
do { $x = 1; } while ($x);
switch ($a) { case 1: echo $a; break; }
$s = <<<EOT
Hello $name!
EOT;
$t = (int) $_GET['n'];
$c->query("SELECT " . $q);
)", "cf.php");
  CHECK(ast.functions.count("f") == 1);
  CHECK(ast.functions.at("f").params.size() == 2);
  REQUIRE(ast.statements.size() == 9);
  CHECK(ast.statements[0].kind == Stmt::Kind::If);
  CHECK(ast.statements[0].orelse[0].elseif);
  CHECK(ast.statements[1].kind == Stmt::Kind::Loop);
  CHECK(ast.statements[5].kind == Stmt::Kind::Opaque);
  CHECK(ast.statements[5].pos.line == 8);
  CHECK(ast.statements[6].value.kind == K::Interpolated);
  CHECK(ast.statements[7].value.kind == K::Cast);
  CHECK(ast.statements[8].value.kind == K::MethodCall);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_file("<?php\n$a = ;\n", "bad.php");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.pos().line == 2);
    CHECK(e.pos().col == 6);
    CHECK(std::string(e.what()).rfind("bad.php:2:6:", 0) == 0);
  }
  CHECK_THROWS_AS(parse_file("<?php if ($a { }", "b.php"), ParseError);
  CHECK_THROWS_AS(parse_file("<?php $s = 'abc", "b.php"), ParseError);
  CHECK_THROWS_AS(parse_file("<?php foo(1, 2", "b.php"), ParseError);
}

TEST_CASE("pretty-print round trip") {
  check_round_trip(read("fixtures/login_query/login.php"));
  check_round_trip(read("fixtures/validated_echo/user_form.php"));
  check_round_trip(R"(<?php
function g($a, &$b = null) { $b = $a . "x\n$a"; return trim($a); }
$x = isset($_GET['a']) ? $_GET['a'] : ($y ?: 'd');
$z = $_COOKIE['c'] ?? "def";
$arr = array('a' => $x, $y);
$w = $arr[0] . $obj->prop . C::$s . C::K;
if (!empty($x) || $y == 3 && $z !== null) { echo $x, $y; } elseif ($q) { print $q; } else { exit(); }
foreach ($arr as $k => $v) { $t .= $v; }
include 'lib.php';
$s = substr($x, 0, -5);
$n = new Foo($x);
$m = $db->query("SELECT * FROM t WHERE a = '{$x}'");
class A { function b() {} }
?>
<p>html</p>
<?php echo $x;
)");
}

TEST_CASE("line numbers stay within the file") {
  for (const char* f : {"fixtures/login_query/login.php", "fixtures/validated_echo/user_form.php"}) {
    const std::string src = read(f);
    const Ast ast = parse_file(src, f);
    for (const auto& s : ast.statements) {
      CHECK(s.pos.line >= 1);
      CHECK(s.pos.line <= ast.line_count);
    }
  }
}
