#include <catch2/catch_amalgamated.hpp>

#include "probmine/interp.hpp"
#include "probmine/parser.hpp"
#include "probmine/printer.hpp"

using namespace probmine;

static std::size_t fsize(const FormulaPtr& f) {
  if (!f) return 0;
  return 1 + fsize(f->lhs) + fsize(f->rhs);
}

TEST_CASE("kuroda negative translation") {
  // atoms just pick up the outer double negation
  FormulaPtr a = kuroda(parse_formula("x:0 =0 0"));
  REQUIRE(a->kind == Formula::Kind::Not);
  REQUIRE(a->lhs->kind == Formula::Kind::Not);
  CHECK(a->lhs->lhs->kind == Formula::Kind::AtomNat);

  // universal quantifiers get an inner double negation, existentials do not
  FormulaPtr f = kuroda(parse_formula("all x:0. ex y:0. y >=0 x"));
  const FormulaPtr& all = f->lhs->lhs;
  REQUIRE(all->kind == Formula::Kind::Forall);
  REQUIRE(all->lhs->kind == Formula::Kind::Not);
  REQUIRE(all->lhs->lhs->kind == Formula::Kind::Not);
  CHECK(all->lhs->lhs->lhs->kind == Formula::Kind::Exists);

  // bounded universals are treated like universals
  FormulaPtr g = kuroda(parse_formula("all n <= k:0 : 0. n <=0 k:0"));
  REQUIRE(g->lhs->lhs->kind == Formula::Kind::BForall);
  CHECK(g->lhs->lhs->lhs->kind == Formula::Kind::Not);

  // output reparses and typechecks
  FormulaPtr back = parse_formula(print_formula(f));
  CHECK(ast_equal(back, f));
  CHECK_NOTHROW(typecheck(f));
}

TEST_CASE("dialectica golden example") {
  DialecticaForm d = dialectica(parse_formula("all x:0. ex y:0. y >=0 x"));
  REQUIRE(d.exists_vars.size() == 1);
  CHECK(d.exists_vars[0].name == "Y");
  CHECK(d.exists_vars[0].type == parse_type("0(0)"));
  REQUIRE(d.forall_vars.size() == 1);
  CHECK(d.forall_vars[0].name == "x");
  CHECK(print_formula(render(d)) == "ex Y:0(0). all x:0. (Y x) >=0 x");
  CHECK_NOTHROW(typecheck(render(d)));
}

TEST_CASE("dialectica clause behavior") {
  // quantifier-free formulas are stable
  DialecticaForm qf = dialectica(parse_formula("x:0 =0 y:0"));
  CHECK(qf.exists_vars.empty());
  CHECK(qf.forall_vars.empty());
  CHECK(ast_equal(qf.matrix, parse_formula("x:0 =0 y:0")));

  // implication from a quantifier-free premise: witness passes through
  DialecticaForm d1 = dialectica(parse_formula("a:0 =0 0 -> ex y:0. y >=0 a:0"));
  REQUIRE(d1.exists_vars.size() == 1);
  CHECK(d1.exists_vars[0].name == "y");
  CHECK(d1.exists_vars[0].type == Type::nat());
  CHECK(d1.forall_vars.empty());

  // implication from a universal premise turns the forall into an exists
  DialecticaForm d2 = dialectica(parse_formula("(all x:0. x >=0 a:0) -> b:0 =0 0"));
  REQUIRE(d2.exists_vars.size() == 1);
  CHECK(d2.exists_vars[0].type == Type::nat());
  CHECK(d2.forall_vars.empty());
  CHECK(formula_class(d2.matrix).value == FormulaClassValue::QuantifierFree);

  // disjunction introduces a selector flag
  DialecticaForm d3 = dialectica(parse_formula("(ex n:0. n >0 0) | (ex j:0. j >0 1)"));
  REQUIRE(d3.exists_vars.size() == 3);
  CHECK(d3.exists_vars[0].name == "z");
  CHECK(print_formula(render(d3)) ==
        "ex z:0. ex n:0. ex j:0. (z =0 0 -> n >0 0) & (z >0 0 -> j >0 1)");

  // clashing binder names on the two sides are separated
  DialecticaForm d4 = dialectica(parse_formula("(ex n:0. n >0 0) & (ex n:0. n >0 1)"));
  REQUIRE(d4.exists_vars.size() == 2);
  CHECK(d4.exists_vars[0].name != d4.exists_vars[1].name);
  CHECK_NOTHROW(typecheck(render(d4)));

  // bounded quantifiers are expanded to guarded unbounded ones first
  DialecticaForm d5 = dialectica(parse_formula("ex n <= k:0 : 0. n >0 0"));
  REQUIRE(d5.exists_vars.size() == 1);
  CHECK(d5.exists_vars[0].name == "n");
  CHECK(print_formula(d5.matrix) == "n:0 <=0 k:0 & n:0 >0 0");
  CHECK(formula_class(d5.matrix).value == FormulaClassValue::QuantifierFree);

  // matrices stay quantifier-free and linearly bounded
  for (const char* s :
       {"all x:0. ex y:0. y >=0 x", "(all x:0. x >=0 a:0) -> ex y:0. y >0 0",
        "!all x:0. ex y:0. (y >0 x & y <=0 f:0(0) x)",
        "all x:0. (ex y:0. y >=0 x) -> ex z:0. z >0 x"}) {
    FormulaPtr f = parse_formula(s);
    DialecticaForm d = dialectica(f);
    CHECK(formula_class(d.matrix).value == FormulaClassValue::QuantifierFree);
    CHECK(fsize(d.matrix) <= 6 * fsize(f));
    CHECK_NOTHROW(typecheck(render(d)));
    // rendered form reparses to itself
    CHECK(ast_equal(parse_formula(print_formula(render(d))), render(d)));
  }

  CHECK_THROWS_AS(dialectica(parse_formula("Pr[ w in A:Ev ] >= 1/2")), UnsupportedNode);
}

TEST_CASE("modified realizability") {
  MRForm m1 = modified_realizability(parse_formula("all x:0. ex y:0. y >=0 x"));
  CHECK(print_formula(render(m1)) == "ex Y:0(0). all x:0. (Y x) >=0 x");

  MRForm m2 = modified_realizability(parse_formula("(ex n:0. n >0 0) -> ex y:0. y >0 1"));
  REQUIRE(m2.witness_vars.size() == 1);
  CHECK(m2.witness_vars[0].name == "Y");
  CHECK(m2.witness_vars[0].type == parse_type("0(0)"));
  CHECK(print_formula(render(m2)) == "ex Y:0(0). all n:0. n >0 0 -> (Y n) >0 1");

  // in mr the premise's forall is kept in the matrix (no counter-witnesses)
  MRForm m3 = modified_realizability(parse_formula("(all x:0. x >=0 a:0) -> b:0 =0 0"));
  CHECK(m3.witness_vars.empty());
  CHECK_NOTHROW(typecheck(render(m3)));

  MRForm qf = modified_realizability(parse_formula("x:0 =0 y:0"));
  CHECK(qf.witness_vars.empty());
  CHECK_THROWS_AS(modified_realizability(parse_formula("Pr[ w in A:Ev ] >= 1/2")),
                  UnsupportedNode);
}
