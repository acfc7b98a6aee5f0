#pragma once

// Seeded deterministic corpus generators: random formulas for the round-trip
// and translation-equivalence suites, random predicates over the sample
// variable, and random indexed event families.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "probmine/ast.hpp"
#include "probmine/model.hpp"

namespace probmine::gen {

// mt19937_64 has a standardized algorithm; pair it with explicit modulo
// reduction so streams are byte-identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t below(std::uint64_t n) { return eng_() % n; }
  bool flip() { return eng_() % 2 == 0; }

 private:
  std::mt19937_64 eng_;
};

// ---------------------------------------------------------------------------
// Round-trip corpus: arbitrary well-typed formulas of bounded depth
// ---------------------------------------------------------------------------

namespace detail {

struct Scope {
  std::vector<std::string> nats;   // bound type-0 variables
  std::vector<std::string> sets;   // bound Ev variables
  bool sample = false;             // the sample variable is in scope
  int quantifiers = 0;
};

inline ExprPtr gen_nat_expr(Rng& rng, const Scope& sc) {
  if (!sc.nats.empty() && rng.flip())
    return mk_var(sc.nats[rng.below(sc.nats.size())], Type::nat());
  return mk_natlit(rng.below(4));
}

inline ExprPtr gen_set_expr(Rng& rng, const Scope& sc, int depth) {
  switch (rng.below(depth > 0 ? 5 : 3)) {
    case 0:
      if (!sc.sets.empty()) return mk_var(sc.sets[rng.below(sc.sets.size())], Type::ev());
      [[fallthrough]];
    case 1:
      return mk_setlit(rng.flip() ? std::vector<std::string>{"a"}
                                  : std::vector<std::string>{"a", "b"});
    case 2:
      return mk_empty();
    case 3:
      return mk_compl(gen_set_expr(rng, sc, depth - 1));
    default:
      return mk_union(gen_set_expr(rng, sc, depth - 1), gen_set_expr(rng, sc, depth - 1));
  }
}

inline RealPtr gen_real_term(Rng& rng, const Scope& sc, int depth) {
  switch (rng.below(depth > 0 ? 6 : 3)) {
    case 0:
      return mk_ratlit(Rat(rng.below(5), 4));
    case 1:
      return mk_realvar("lam");
    case 2:
      return mk_powhalf(gen_nat_expr(rng, sc));
    case 3:
      return mk_prob(gen_set_expr(rng, sc, depth - 1));
    case 4:
      return mk_add(gen_real_term(rng, sc, depth - 1), gen_real_term(rng, sc, depth - 1));
    default:
      return mk_sub(gen_real_term(rng, sc, depth - 1), gen_real_term(rng, sc, depth - 1));
  }
}

inline FormulaPtr gen_atom(Rng& rng, const Scope& sc) {
  switch (rng.below(sc.sample ? 3 : 2)) {
    case 0: {
      CmpOp ops[] = {CmpOp::Eq, CmpOp::Le, CmpOp::Lt, CmpOp::Ge, CmpOp::Gt};
      return mk_atomnat(gen_nat_expr(rng, sc), ops[rng.below(5)], gen_nat_expr(rng, sc));
    }
    case 1: {
      CmpOp ops[] = {CmpOp::Le, CmpOp::Lt, CmpOp::Ge, CmpOp::Gt};
      return mk_atomcmp(gen_real_term(rng, sc, 1), ops[rng.below(4)],
                        gen_real_term(rng, sc, 1));
    }
    default:
      return mk_atomin(mk_var(kSampleVar, Type::omega()), gen_set_expr(rng, sc, 1));
  }
}

inline FormulaPtr gen_formula_at(Rng& rng, Scope sc, int depth) {
  if (depth <= 0) return gen_atom(rng, sc);
  switch (rng.below(9)) {
    case 0:
      return gen_atom(rng, sc);
    case 1:
      return mk_not(gen_formula_at(rng, sc, depth - 1));
    case 2:
      return mk_and(gen_formula_at(rng, sc, depth - 1), gen_formula_at(rng, sc, depth - 1));
    case 3:
      return mk_or(gen_formula_at(rng, sc, depth - 1), gen_formula_at(rng, sc, depth - 1));
    case 4:
      return mk_implies(gen_formula_at(rng, sc, depth - 1), gen_formula_at(rng, sc, depth - 1));
    case 5:
    case 6: {
      std::string v = "n" + std::to_string(sc.quantifiers);
      Scope inner = sc;
      inner.nats.push_back(v);
      inner.quantifiers++;
      FormulaPtr body = gen_formula_at(rng, inner, depth - 1);
      bool ex = rng.flip();
      if (rng.flip()) {
        ExprPtr bound = gen_nat_expr(rng, sc);
        return ex ? mk_bexists(v, Type::nat(), bound, std::move(body))
                  : mk_bforall(v, Type::nat(), bound, std::move(body));
      }
      return ex ? mk_exists(v, Type::nat(), std::move(body))
                : mk_forall(v, Type::nat(), std::move(body));
    }
    case 7: {
      std::string v = "B" + std::to_string(sc.quantifiers);
      Scope inner = sc;
      inner.sets.push_back(v);
      inner.quantifiers++;
      FormulaPtr body = gen_formula_at(rng, inner, depth - 1);
      return rng.flip() ? mk_exists(v, Type::ev(), std::move(body))
                        : mk_forall(v, Type::ev(), std::move(body));
    }
    default: {
      if (sc.sample) return gen_atom(rng, sc);  // no nested Pr
      Scope inner = sc;
      inner.sample = true;
      FormulaPtr body = gen_formula_at(rng, inner, depth - 1);
      RealPtr lam = gen_real_term(rng, sc, 1);
      return rng.flip() ? mk_probgeq(std::move(body), std::move(lam))
                        : mk_probleq(std::move(body), std::move(lam));
    }
  }
}

}  // namespace detail

inline FormulaPtr random_formula(Rng& rng, int max_depth = 6) {
  return detail::gen_formula_at(rng, detail::Scope{}, 1 + static_cast<int>(rng.below(max_depth)));
}

// ---------------------------------------------------------------------------
// Translation-equivalence corpus: Pr-free formulas with small witness spaces
// ---------------------------------------------------------------------------

namespace detail {

// decidable atoms over bound type-0 variables and two free predicate tables
inline FormulaPtr gen_dec_atom(Rng& rng, const Scope& sc) {
  auto operand = [&]() -> ExprPtr {
    ExprPtr base = gen_nat_expr(rng, sc);
    if (!sc.nats.empty() && rng.below(3) == 0) {
      const char* table = rng.flip() ? "p" : "q";
      return mk_app(mk_var(table, Type::arrow(Type::nat(), Type::nat())), std::move(base));
    }
    return base;
  };
  CmpOp ops[] = {CmpOp::Eq, CmpOp::Le, CmpOp::Lt, CmpOp::Ge, CmpOp::Gt};
  return mk_atomnat(operand(), ops[rng.below(5)], operand());
}

inline FormulaPtr gen_equiv_at(Rng& rng, Scope sc, int depth, int quant_budget) {
  if (depth <= 0 || (quant_budget <= 0 && rng.flip())) return gen_dec_atom(rng, sc);
  switch (rng.below(6)) {
    case 0:
      return gen_dec_atom(rng, sc);
    case 1:
      return mk_not(gen_equiv_at(rng, sc, depth - 1, quant_budget));
    case 2:
      return mk_and(gen_equiv_at(rng, sc, depth - 1, quant_budget / 2),
                    gen_equiv_at(rng, sc, depth - 1, quant_budget / 2));
    case 3:
      return mk_or(gen_equiv_at(rng, sc, depth - 1, quant_budget / 2),
                   gen_equiv_at(rng, sc, depth - 1, quant_budget / 2));
    case 4:
      return mk_implies(gen_equiv_at(rng, sc, depth - 1, quant_budget / 2),
                        gen_equiv_at(rng, sc, depth - 1, quant_budget / 2));
    default: {
      if (quant_budget <= 0) return gen_dec_atom(rng, sc);
      std::string v = "n" + std::to_string(sc.quantifiers);
      Scope inner = sc;
      inner.nats.push_back(v);
      inner.quantifiers++;
      FormulaPtr body = gen_equiv_at(rng, inner, depth - 1, quant_budget - 1);
      bool ex = rng.flip();
      if (rng.flip()) {
        ExprPtr bound = gen_nat_expr(rng, sc);
        return ex ? mk_bexists(v, Type::nat(), bound, std::move(body))
                  : mk_bforall(v, Type::nat(), bound, std::move(body));
      }
      return ex ? mk_exists(v, Type::nat(), std::move(body))
                : mk_forall(v, Type::nat(), std::move(body));
    }
  }
}

}  // namespace detail

inline FormulaPtr random_equiv_formula(Rng& rng) {
  return detail::gen_equiv_at(rng, detail::Scope{}, 2 + static_cast<int>(rng.below(2)), 2);
}

// a random total table {0..3} -> {0..3} for the free predicate symbols
inline Value random_nat_table(Rng& rng, const EvalBounds& b) {
  std::vector<Value> tab;
  for (std::uint64_t i = 0; i <= b.fun_dom; ++i)
    tab.push_back(Value::nat(rng.below(b.fun_ran + 1)));
  return Value::fun(Type::arrow(Type::nat(), Type::nat()), std::move(tab));
}

// ---------------------------------------------------------------------------
// Random predicates over the sample variable of a concrete model
// ---------------------------------------------------------------------------

namespace detail {

inline ExprPtr mask_literal(std::uint64_t mask, const ContentSpace& m) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < m.omega.size(); ++i)
    if (mask >> i & 1) names.push_back(m.omega[i]);
  if (names.empty()) return mk_empty();
  return mk_setlit(std::move(names));
}

}  // namespace detail

// Boolean combination of memberships in arbitrary (not necessarily
// measurable) subsets of the sample space.
inline FormulaPtr random_predicate(Rng& rng, const ContentSpace& m, int depth = 2) {
  if (depth <= 0 || rng.below(3) == 0) {
    std::uint64_t mask = rng.below(m.full() + 1);
    return mk_atomin(mk_var(kSampleVar, Type::omega()), detail::mask_literal(mask, m));
  }
  switch (rng.below(4)) {
    case 0:
      return mk_not(random_predicate(rng, m, depth - 1));
    case 1:
      return mk_and(random_predicate(rng, m, depth - 1), random_predicate(rng, m, depth - 1));
    case 2:
      return mk_or(random_predicate(rng, m, depth - 1), random_predicate(rng, m, depth - 1));
    default:
      return mk_implies(random_predicate(rng, m, depth - 1),
                        random_predicate(rng, m, depth - 1));
  }
}

// a random family of algebra sets of the given length, as an Ev(0) value
inline Value random_event_family(Rng& rng, const ContentSpace& m, std::size_t len) {
  std::vector<Value> tab;
  for (std::size_t i = 0; i < len; ++i)
    tab.push_back(Value::set(m.algebra[rng.below(m.algebra.size())]));
  return Value::fun(Type::arrow(Type::ev(), Type::nat()), std::move(tab));
}

// ---------------------------------------------------------------------------
// The builtin model fleet
// ---------------------------------------------------------------------------

inline std::vector<LoadedModel> builtin_fleet() {
  std::vector<LoadedModel> fleet;
  auto add = [&](ContentSpace space) {
    LoadedModel lm;
    lm.space = std::move(space);
    lm.bounds.grid = model_grid(lm.space, lm.bounds);
    fleet.push_back(std::move(lm));
  };
  add(ContentSpace::powerset("point", {{"a", Rat(1)}}));
  add(ContentSpace::powerset("coin", {{"a", Rat(1, 2)}, {"b", Rat(1, 2)}}));
  add(ContentSpace::powerset("skew3", {{"a", Rat(1, 2)}, {"b", Rat(1, 3)}, {"c", Rat(1, 6)}}));
  add(ContentSpace::powerset("null3", {{"a", Rat(1, 2)}, {"b", Rat(1, 2)}, {"c", Rat(0)}}));
  add(ContentSpace::subalgebra("sub4", {"a", "b", "c", "d"}, {{{"a", "b"}, Rat(1, 2)}}));
  add(ContentSpace::subalgebra("blocks6", {"a", "b", "c", "d", "e", "f"},
                               {{{"a", "b"}, Rat(1, 2)}, {{"c", "d"}, Rat(1, 3)}}));
  return fleet;
}

}  // namespace probmine::gen
