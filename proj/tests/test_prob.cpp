#include <catch2/catch_amalgamated.hpp>

#include "probmine/expand.hpp"
#include "probmine/modulus.hpp"
#include "probmine/parser.hpp"
#include "probmine/printer.hpp"
#include "probmine/prob.hpp"

using namespace probmine;

static std::string pp(const FormulaPtr& f) { return print_formula(f); }

TEST_CASE("outer and inner expansion") {
  FormulaPtr phi = parse_formula("w:Om in B:Ev");
  RealPtr half = mk_ratlit(Rat(1, 2));
  CHECK(pp(outer_expand(phi, half)) ==
        "all A:Ev. Pr(A) < 1/2 -> ex w:Om. w in (A^c) & w in B:Ev");
  CHECK(pp(inner_expand(phi, half)) ==
        "all A:Ev. Pr(A) > 1/2 -> ex w:Om. w in A & !w in B:Ev");
  CHECK_NOTHROW(typecheck(outer_expand(phi, half)));

  // the bound set variable avoids clashing with a free A in the body
  FormulaPtr clash = parse_formula("w:Om in A:Ev");
  FormulaPtr ex = outer_expand(clash, half);
  CHECK(ex->name != "A");

  // a body without the sample variable is rejected
  CHECK_THROWS_AS(outer_expand(parse_formula("x:0 =0 0"), half), SampleVarMissing);
  CHECK_THROWS_AS(inner_expand(parse_formula("x:0 =0 0"), half), SampleVarMissing);
}

TEST_CASE("splitting a bound over a finite union") {
  FormulaPtr phi = parse_formula("w:Om in A:Ev(0) n:0");
  RealPtr half = mk_ratlit(Rat(1, 2));

  // a single index collapses to one probability statement
  CHECK(pp(sum_outer_geq(phi, "n", mk_natlit(0), half)) ==
        "all lamt:R(0). 1/2 >= lamt[0] -> Pr[ w in (A:Ev(0) 0) ] >= lamt[0]");

  // literal bounds expand the sum
  CHECK(pp(sum_outer_geq(phi, "n", mk_natlit(1), half)) ==
        "all lamt:R(0). 1/2 >= (lamt[0] + lamt[1]) -> "
        "ex n <= 1 : 0. Pr[ w in (A:Ev(0) n) ] >= lamt[n]");

  // symbolic bounds keep the sum folded
  CHECK(pp(sum_outer_geq(phi, "n", mk_var("m", Type::nat()), half)) ==
        "all lamt:R(0). 1/2 >= sum(n, m:0, lamt[n]) -> "
        "ex n <= m:0 : 0. Pr[ w in (A:Ev(0) n) ] >= lamt[n]");
}

TEST_CASE("statement form detection") {
  ProbForm f1 = detect_form(parse_formula("Pr[ all x:0. ex n:0. w in A:Ev(0)(0) x n ] >= 1/2"));
  CHECK(f1.shape == ProbShape::Form1);
  CHECK(f1.outer_name == "x");
  CHECK(f1.inner_name == "n");

  ProbForm f2 = detect_form(parse_formula("all x:0. Pr[ ex n:0. w in A:Ev(0)(0) x n ] >= 1/2"));
  CHECK(f2.shape == ProbShape::Form2);

  ProbForm f3 = detect_form(
      parse_formula("all m:0. all x:0. ex n:0. Pr[ w in A:Ev(0)(0) x n ] >= 1/2 - 2^-m"));
  CHECK(f3.shape == ProbShape::Form3);
  CHECK(f3.error_name == "m");

  // a wrong error margin is diagnosed, not silently accepted
  ProbForm bad = detect_form(
      parse_formula("all m:0. all x:0. ex n:0. Pr[ w in A:Ev(0)(0) x n ] >= 1/2"));
  CHECK(bad.shape == ProbShape::Other);
  CHECK(bad.diagnostic == "innermost bound is not of the shape lam - 2^-m");
  CHECK(detect_form(parse_formula("Pr[ w in A:Ev ] >= 1/2")).shape == ProbShape::Other);
}

TEST_CASE("quantitative interpretation") {
  ProbForm f2 = detect_form(parse_formula("all x:0. Pr[ ex n:0. w in A:Ev(0)(0) x n ] >= 1/2"));
  ModulusSpec q2 = quantitative_interpretation(f2, InterpMode::Classical);
  CHECK(q2.kind == ModulusSpecKind::PlusTwo);
  CHECK(pp(q2.spec_formula) ==
        "all m:0. all x:0. Pr[ ex n <= (Phi:0(0)(0) m x) : 0. "
        "w in (A:Ev(0)(0) x n) ] >= (1/2 - 2^-m)");
  CHECK_NOTHROW(typecheck(q2.spec_formula));

  ProbForm f3 = detect_form(
      parse_formula("all m:0. all x:0. ex n:0. Pr[ w in A:Ev(0)(0) x n ] >= 1/2 - 2^-m"));
  ModulusSpec q3 = quantitative_interpretation(f3, InterpMode::Classical);
  CHECK(q3.kind == ModulusSpecKind::PlusThree);
  CHECK(pp(q3.spec_formula) ==
        "all m:0. all x:0. ex n <= (Phi:0(0)(0) m x) : 0. "
        "Pr[ w in (A:Ev(0)(0) x n) ] >= (1/2 - 2^-m)");

  // a matrix monotone in n admits a direct witness
  ModulusSpec q3m = quantitative_interpretation(
      f3, InterpMode::Classical,
      MonotoneVerdict{MonoDir::Monotone, MonoEvidence::Annotated, "given"});
  CHECK(pp(q3m.spec_formula) ==
        "all m:0. all x:0. Pr[ w in (A:Ev(0)(0) x (Phi:0(0)(0) m x)) ] >= (1/2 - 2^-m)");
  CHECK(q3m.majorant_note.find("direct witness") != std::string::npos);

  ProbForm f1 = detect_form(parse_formula("Pr[ all x:0. ex n:0. w in A:Ev(0)(0) x n ] >= 1/2"));
  ModulusSpec q1i = quantitative_interpretation(f1, InterpMode::Semiconstructive);
  CHECK(q1i.kind == ModulusSpecKind::PlusOneIntuitionistic);
  CHECK(pp(q1i.spec_formula) ==
        "all m:0. Pr[ all x:0. ex n <= (Phi:0(0)(0) m x) : 0. "
        "w in (A:Ev(0)(0) x n) ] >= (1/2 - 2^-m)");

  ModulusSpec q1c = quantitative_interpretation(f1, InterpMode::Classical);
  CHECK(q1c.kind == ModulusSpecKind::PlusOneClassical);
  CHECK(pp(q1c.spec_formula) ==
        "all m:0. Pr[ ex N <= (Phi:0(0) m) : 0. all x <= (xt:0(0) N) : 0. "
        "ex n <= N : 0. w in (A:Ev(0)(0) x n) ] >= (1/2 - 2^-m)");
  CHECK_NOTHROW(typecheck(q1c.spec_formula));

  // a degree-1 outer type is rendered through a pointwise majorant
  ModulusSpec q2f = quantitative_interpretation(
      detect_form(parse_formula("all g:0(0). Pr[ ex n:0. w in A:Ev(0)(0(0)) g n ] >= 1/2")),
      InterpMode::Classical);
  CHECK(pp(q2f.spec_formula) ==
        "all m:0. all xstar:0(0). all g <= xstar : 0(0). "
        "Pr[ ex n <= (Phi:0(0(0))(0) m xstar) : 0. w in (A:Ev(0)(0(0)) g n) ] >= (1/2 - 2^-m)");
  CHECK_NOTHROW(typecheck(q2f.spec_formula));

  // the classical Form1 reading is only rendered over type-0 outer variables
  ProbForm f1f = detect_form(
      parse_formula("Pr[ all g:0(0). ex n:0. w in A:Ev(0)(0(0)) g n ] >= 1/2"));
  CHECK_THROWS_AS(quantitative_interpretation(f1f, InterpMode::Classical),
                  UnsupportedQuantifierType);
  CHECK_THROWS_AS(
      quantitative_interpretation(detect_form(parse_formula("Pr[ w in A:Ev ] >= 1/2")),
                                  InterpMode::Classical),
      ShapeOther);
}

TEST_CASE("semantic monotonicity oracle") {
  ContentSpace two = ContentSpace::powerset("two", {{"a", Rat(1, 2)}, {"b", Rat(1, 2)}});
  EvalBounds b;
  b.nat_bound = 3;
  CHECK(monotonicity_semantic(parse_formula("x:0 >=0 c:0"), "x", two, b).direction ==
        MonoDir::Monotone);
  CHECK(monotonicity_semantic(parse_formula("x:0 <0 c:0"), "x", two, b).direction ==
        MonoDir::AntiMonotone);
  auto mixed = monotonicity_semantic(parse_formula("x:0 =0 1"), "x", two, b);
  CHECK(mixed.direction == MonoDir::Unknown);
  auto v = monotonicity_semantic(parse_formula("ex n <= x:0 : 0. n >=0 c:0"), "x", two, b);
  CHECK(v.direction == MonoDir::Monotone);
  CHECK(v.evidence == MonoEvidence::SemanticallyChecked);
}

TEST_CASE("prenex rewriting with a principle ledger") {
  auto go = [](const char* f, const char* rule, const SideEvidence& side = {}) {
    return prenex_rewrite(parse_formula(f), rule, side);
  };

  // rules that hold intuitionistically carry an empty ledger
  RewriteResult r1 = go("Pr[ all x:0. w in A:Ev(0) x ] >= 1/2", "R1");
  CHECK(pp(r1.formula) == "all x:0. Pr[ w in (A:Ev(0) x) ] >= 1/2");
  CHECK(r1.justification.to_string() == "{}");

  RewriteResult r3 = go("Pr[ ex x:0. w in A:Ev(0) x ] <= 1/2", "R3");
  CHECK(pp(r3.formula) == "all x:0. Pr[ w in (A:Ev(0) x) ] <= 1/2");
  CHECK(r3.justification.to_string() == "{}");

  RewriteResult r6 = go("Pr[ all x:0. all n <= x : 0. w in A:Ev(0) n ] <= 1/2", "R6");
  CHECK(pp(r6.formula) ==
        "all mu:R. mu > 0 -> ex x:0. Pr[ all n <= x : 0. w in (A:Ev(0) n) ] <= (1/2 + mu)");
  CHECK(r6.justification.to_string() == "{ClassicalLogic, UB_S(0)}");

  // R2 undoes R6 with no extra principles
  RewriteResult r2 = prenex_rewrite(r6.formula, "R2");
  CHECK(pp(r2.formula) == "Pr[ all x:0. all n <= x : 0. w in (A:Ev(0) n) ] <= 1/2");
  CHECK(r2.justification.to_string() == "{}");

  RewriteResult r8 = go("Pr[ ex x:0. ex n <= x : 0. w in A:Ev(0) n ] >= 1/2", "R8");
  CHECK(pp(r8.formula) ==
        "all mu:R. mu > 0 -> ex x:0. Pr[ ex n <= x : 0. w in (A:Ev(0) n) ] >= (1/2 - mu)");
  CHECK(r8.justification.to_string() == "{ClassicalLogic, UB_S(0)}");

  RewriteResult r4 = prenex_rewrite(r8.formula, "R4");
  CHECK(pp(r4.formula) == "Pr[ ex x:0. ex n <= x : 0. w in (A:Ev(0) n) ] >= 1/2");
  CHECK(r4.justification.to_string() == "{}");

  RewriteResult r5 = go("all x:0. Pr[ all n <= x : 0. w in A:Ev(0) n ] >= 1/2", "R5");
  CHECK(pp(r5.formula) == "Pr[ all x:0. all n <= x : 0. w in (A:Ev(0) n) ] >= 1/2");
  CHECK(r5.justification.to_string() == "{ClassicalLogic, UB_Omega(0)}");

  RewriteResult r7 = go("all x:0. Pr[ ex n <= x : 0. w in A:Ev(0) n ] <= 1/2", "R7");
  CHECK(pp(r7.formula) == "Pr[ ex x:0. ex n <= x : 0. w in (A:Ev(0) n) ] <= 1/2");
  CHECK(r7.justification.to_string() == "{ClassicalLogic, UB_Omega(0)}");

  // the semiconstructive rules drop the side conditions but pay more
  RewriteResult r9 = go("Pr[ all x:0. w in A:Ev(0) x ] <= 1/2", "R9");
  CHECK(pp(r9.formula) ==
        "all mu:R. mu > 0 -> ex x:0. Pr[ w in (A:Ev(0) x) ] <= (1/2 + mu)");
  CHECK(r9.justification.to_string() == "{IP_forall, UB_S_full(0)}");

  RewriteResult r10 = go("Pr[ ex x:0. w in A:Ev(0) x ] >= 1/2", "R10");
  CHECK(r10.justification.to_string() == "{IP_forall, UB_S_full(0)}");

  RewriteResult r11 = go("all x:0. Pr[ all n <= x : 0. w in A:Ev(0) n ] >= 1/2", "R11");
  CHECK(pp(r11.formula) == "Pr[ all x:0. all n <= x : 0. w in (A:Ev(0) n) ] >= 1/2");
  CHECK(r11.justification.to_string() == "{CC0_Omega}");

  // guard failures
  CHECK_THROWS_AS(go("Pr[ ex x:0. w in A:Ev(0) x ] >= 1/2", "R1"), RuleMismatch);
  CHECK_THROWS_AS(go("all x:0. Pr[ ex n <= x : 0. w in A:Ev(0) n ] >= 1/2", "R5"),
                  SideConditionUnmet);  // matrix is monotone, not anti-monotone
  CHECK_THROWS_AS(go("all x:0. Pr[ ex n <= x : 0. w in A:Ev(0) n ] >= 1/2", "R11"),
                  SideConditionUnmet);
  CHECK_THROWS_AS(go("all r:R. Pr[ w in A:Ev ] >= 1/2", "R5"), SideConditionUnmet);
  CHECK_THROWS_AS(go("Pr[ all x:0. w in A:Ev(0) x ] >= 1/2", "R99"), RuleMismatch);

  // an annotation supplied as side evidence overrides the syntactic check
  SideEvidence hint;
  hint.mono = MonotoneVerdict{MonoDir::AntiMonotone, MonoEvidence::Annotated, "user"};
  CHECK_NOTHROW(go("all x:0. Pr[ w in A:Ev(0) x ] >= 1/2", "R5", hint));
}

TEST_CASE("measurable collapse and null-set weakening") {
  ContentSpace two = ContentSpace::powerset("two", {{"a", Rat(1, 2)}, {"b", Rat(1, 2)}});
  SideEvidence side;
  side.model = &two;
  side.measurable_witness = parse_expr("{a b}");
  RewriteResult r12 =
      prenex_rewrite(parse_formula("Pr[ w in {a} | w in {b} ] >= 1"), "R12", side);
  CHECK(pp(r12.formula) == "Pr({a b}) >= 1");
  CHECK(r12.justification.to_string() == "{}");

  // a witness that misses part of the truth set is rejected
  side.measurable_witness = parse_expr("{a}");
  CHECK_THROWS_AS(prenex_rewrite(parse_formula("Pr[ w in {a} | w in {b} ] >= 1"), "R12", side),
                  SideConditionUnmet);

  ContentSpace tri = ContentSpace::powerset(
      "tri", {{"a", Rat(1, 2)}, {"b", Rat(1, 2)}, {"c", Rat(0)}});
  SideEvidence weak;
  weak.model = &tri;
  weak.weakened_to = parse_formula("w:Om in {a}");
  weak.null_set = parse_expr("{c}");
  RewriteResult r13 =
      prenex_rewrite(parse_formula("Pr[ w in {a} | w in {c} ] >= 1/2"), "R13", weak);
  CHECK(pp(r13.formula) == "Pr[ w in {a} ] >= 1/2");
  CHECK(r13.justification.to_string() == "{}");

  // the implication must hold outside the null set
  weak.weakened_to = parse_formula("w:Om in {b}");
  CHECK_THROWS_AS(prenex_rewrite(parse_formula("Pr[ w in {a} | w in {c} ] >= 1/2"), "R13", weak),
                  SideConditionUnmet);
  // and the designated set must actually be null
  weak.weakened_to = parse_formula("w:Om in {a}");
  weak.null_set = parse_expr("{b}");
  CHECK_THROWS_AS(prenex_rewrite(parse_formula("Pr[ w in {a} | w in {c} ] >= 1/2"), "R13", weak),
                  SideConditionUnmet);
}

TEST_CASE("schema instantiation") {
  SchemaInstance ub = instantiate_ub(Type::nat(), SchemaSort::Omega,
                                     parse_formula("x:0 <=0 k:0 & w:0 >=0 x:0"), Type::nat(), {},
                                     UBMode::Restricted);
  CHECK(ub.principle == "UB_Omega(0)");
  CHECK(pp(ub.rendered) ==
        "all y:0(0). (all k:0. all x:0. ex w:0. min(x, y k) <=0 k & w >=0 min(x, y k)) -> "
        "ex chi:0(0). all k:0. all x:0. ex w <= (chi k) : 0. "
        "min(x, y k) <=0 k & w >=0 min(x, y k)");

  // the bounding functional lives one type degree above rho
  SchemaInstance ub1 = instantiate_ub(parse_type("0(0)"), SchemaSort::Ev,
                                      parse_formula("w:0(0) k:0 >=0 k:0"), Type::nat(), {},
                                      UBMode::Full);
  CHECK(ub1.principle == "UB_S_full(0(0))");
  CHECK(ub1.rendered->lhs->rhs->var_type == parse_type("0(0)(0)"));

  CHECK_THROWS_AS(instantiate_ub(Type::omega(), SchemaSort::Omega,
                                 parse_formula("k:0 =0 k:0"), Type::nat(), {}, UBMode::Full),
                  NotPure);
  CHECK_THROWS_AS(instantiate_ub(Type::nat(), SchemaSort::Omega,
                                 parse_formula("k:0 =0 k:0"), Type::omega(), {}, UBMode::Full),
                  BadAlphaShape);
  // restricted mode rejects a genuinely universal matrix
  CHECK_THROWS_AS(instantiate_ub(Type::nat(), SchemaSort::Omega,
                                 parse_formula("all j:0. j >=0 x:0"), Type::nat(), {},
                                 UBMode::Restricted),
                  FormulaClassViolation);

  SchemaInstance cc = instantiate_cc(SchemaSort::Omega, parse_formula("z1:Om(0) n:0 in B:Ev"),
                                     {parse_type("Om(0)")});
  CHECK(cc.principle == "CC0_Omega");
  CHECK(pp(cc.rendered) ==
        "(all k:0. ex z1:Om(0). all n <= k : 0. (z1 n) in B:Ev) -> "
        "ex z1:Om(0). all n:0. (z1 n) in B:Ev");
  CHECK_THROWS_AS(instantiate_cc(SchemaSort::Omega, parse_formula("ex j:0. j =0 n:0"), {}),
                  FormulaClassViolation);
  CHECK_THROWS_AS(instantiate_cc(SchemaSort::Ev, parse_formula("z1:Om(0) n:0 in B:Ev"),
                                 {parse_type("Om(0)")}),
                  TypeMismatch);
}

TEST_CASE("sigma additivity statement pair") {
  auto [lower, upper] = sigma_additivity_statement(parse_expr("A:Ev(0)"));
  CHECK(pp(lower) == "all l:0. Pr[ ex n:0. w in (A:Ev(0) n) ] >= sum(n, l, Pr(up A:Ev(0) n))");
  CHECK(pp(upper) ==
        "all k:0. ex l:0. Pr[ ex n:0. w in (A:Ev(0) n) ] <= (sum(n, l, Pr(up A:Ev(0) n)) + 2^-k)");
  CHECK_NOTHROW(typecheck(lower));
  CHECK_NOTHROW(typecheck(upper));
  CHECK_THROWS_AS(sigma_additivity_statement(parse_expr("A:Ev")), TypeMismatch);
}

TEST_CASE("modulus transformation") {
  ModulusTable phi = ModulusTable::from_expr(parse_modulus_expr("m + x"));
  ModulusTable phi2 = transform_modulus_equiv(phi);
  for (std::uint64_t m = 0; m < 5; ++m)
    for (std::uint64_t x = 0; x < 5; ++x)
      CHECK(phi2.eval(m, x) == m + 2 * x + 1);

  ModulusTable tab = ModulusTable::from_table({{0, 1}, {2, 3}, {4, 5}, {6, 7}});
  ModulusTable tab2 = transform_modulus_equiv(tab);
  CHECK(tab2.eval(0, 0) == 2);  // phi(1, 0)
  CHECK(tab2.eval(0, 1) == 5);  // phi(2, 1)
  CHECK(tab2.eval(1, 0) == 4);  // phi(2, 0)
  CHECK_THROWS_AS(tab2.eval(5, 0), DomainExceeded);
  CHECK_THROWS_AS(transform_modulus_equiv(ModulusTable::from_table({{0}})), DomainExceeded);
}
