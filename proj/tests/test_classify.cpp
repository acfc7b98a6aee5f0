#include <catch2/catch_amalgamated.hpp>

#include "probmine/classify.hpp"
#include "probmine/parser.hpp"
#include "probmine/printer.hpp"

using namespace probmine;

static FormulaClassValue cls(const std::string& s) { return formula_class(parse_formula(s)).value; }

TEST_CASE("formula classification") {
  CHECK(cls("x:0 =0 y:0") == FormulaClassValue::QuantifierFree);
  CHECK(cls("!x:0 =0 y:0 -> w:Om in A:Ev") == FormulaClassValue::QuantifierFree);
  CHECK(cls("ex n:0. w:Om in A:Ev(0) n") == FormulaClassValue::Existential);
  CHECK(cls("all n:0. w:Om in A:Ev(0) n") == FormulaClassValue::Universal);
  CHECK(cls("all k:0. ex n:0. n >=0 k") == FormulaClassValue::General);
  CHECK(cls("(ex n:0. n >0 0) & (ex j:0. j >0 1)") == FormulaClassValue::Existential);
  CHECK(cls("(ex n:0. n >0 0) & (all j:0. j >0 1)") == FormulaClassValue::General);

  // bounded type-0 quantifiers stay quantifier-free
  CHECK(cls("ex n <= k:0 : 0. w:Om in A:Ev(0) n") == FormulaClassValue::QuantifierFree);
  CHECK(cls("all n <= k:0 : 0. n <=0 k:0") == FormulaClassValue::QuantifierFree);

  // negation of a proper quantifier alternates to General
  CHECK(cls("!ex n:0. n >0 0") == FormulaClassValue::General);

  // a Pr node is never in a restricted class
  CHECK(cls("Pr[ w in A:Ev ] >= 1/2") == FormulaClassValue::General);
}

TEST_CASE("classification reports quantifier types") {
  auto c = formula_class(parse_formula("all F:0(0(0)). ex n:0. F (\\j:0. n) =0 n"));
  REQUIRE(c.type_report.size() == 2);
  CHECK(c.type_report[0].quantifier == "all");
  CHECK(c.type_report[0].type == parse_type("0(0(0))"));
  CHECK_FALSE(c.type_report[0].small);
  CHECK(c.type_report[0].admissible);
  CHECK(c.type_report[1].small);
}

TEST_CASE("de morgan dual") {
  // comparisons flip
  CHECK(print_formula(demorgan_dual(parse_formula("x:0 <=0 y:0"))) == "x:0 >0 y:0");
  CHECK(print_formula(demorgan_dual(parse_formula("Pr(A:Ev) < 1"))) == "Pr(A:Ev) >= 1");

  // equalities and membership pick up a negation
  CHECK(print_formula(demorgan_dual(parse_formula("x:0 =0 y:0"))) == "!x:0 =0 y:0");
  CHECK(print_formula(demorgan_dual(parse_formula("w:Om in A:Ev"))) == "!w:Om in A:Ev");

  // connectives and quantifiers swap
  CHECK(print_formula(demorgan_dual(parse_formula("ex n:0. n >0 0"))) == "all n:0. n <=0 0");
  CHECK(print_formula(demorgan_dual(parse_formula("a:0 >0 0 & b:0 >0 0"))) ==
        "a:0 <=0 0 | b:0 <=0 0");
  CHECK(print_formula(demorgan_dual(parse_formula("all n <= k:0 : 0. n <0 k:0"))) ==
        "ex n <= k:0 : 0. n >=0 k:0");

  // implication: dual(a -> b) = a & dual(b)
  CHECK(print_formula(demorgan_dual(parse_formula("a:0 >0 0 -> b:0 >0 0"))) ==
        "a:0 >0 0 & b:0 <=0 0");

  // dual is involutive up to classical equivalence; on negation-free
  // comparison formulas it is syntactically involutive
  FormulaPtr f = parse_formula("all n:0. (x:0 <0 n | ex j <= n : 0. j >0 0)");
  CHECK(ast_equal(demorgan_dual(demorgan_dual(f)), f));
}

TEST_CASE("syntactic monotonicity") {
  // widening bounded quantifiers
  auto v1 = monotonicity_syntactic(parse_formula("ex n <= x:0 : 0. w:Om in A:Ev(0) n"), "x");
  CHECK(v1.direction == MonoDir::Monotone);
  CHECK(v1.evidence == MonoEvidence::Syntactic);
  CHECK(v1.detail == "widening-bounded-ex");

  auto v2 = monotonicity_syntactic(parse_formula("all n <= x:0 : 0. w:Om in A:Ev(0) n"), "x");
  CHECK(v2.direction == MonoDir::AntiMonotone);
  CHECK(v2.detail == "widening-bounded-all");

  // comparison occurrences
  CHECK(monotonicity_syntactic(parse_formula("x:0 <=0 t:0"), "x").direction ==
        MonoDir::AntiMonotone);
  CHECK(monotonicity_syntactic(parse_formula("x:0 >=0 t:0"), "x").direction == MonoDir::Monotone);
  CHECK(monotonicity_syntactic(parse_formula("t:0 <=0 x:0"), "x").direction == MonoDir::Monotone);

  // congruence through conjunction
  auto v3 = monotonicity_syntactic(parse_formula("x:0 >=0 a:0 & x:0 >0 b:0"), "x");
  CHECK(v3.direction == MonoDir::Monotone);
  CHECK(v3.detail == "congruence");

  // mixed directions are unknown; annotation hints are honored
  auto v4 = monotonicity_syntactic(parse_formula("x:0 >=0 a:0 & x:0 <=0 b:0"), "x");
  CHECK(v4.direction == MonoDir::Unknown);
  auto v5 = monotonicity_syntactic(parse_formula("x:0 >=0 a:0 & x:0 <=0 b:0"), "x",
                                   MonoDir::Monotone);
  CHECK(v5.direction == MonoDir::Monotone);
  CHECK(v5.evidence == MonoEvidence::Annotated);

  // a variable that does not occur is trivially monotone
  auto v6 = monotonicity_syntactic(parse_formula("a:0 =0 b:0"), "x");
  CHECK(v6.direction == MonoDir::Monotone);
  CHECK(v6.detail == "constant");
}
