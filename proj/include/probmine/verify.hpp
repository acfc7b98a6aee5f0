#pragma once

// Model-backed verification suites shared by the command-line driver and the
// acceptance harness. Every suite is deterministic in (model, seed) and
// reports line-oriented PASS/FAIL results with re-runnable witnesses.

#include <cstdint>
#include <string>
#include <vector>

#include "probmine/expand.hpp"
#include "probmine/gen.hpp"
#include "probmine/interp.hpp"
#include "probmine/model.hpp"
#include "probmine/modulus.hpp"
#include "probmine/parser.hpp"
#include "probmine/printer.hpp"
#include "probmine/prob.hpp"

namespace probmine::verify {

struct SuiteReport {
  std::string suite;
  bool pass = true;
  std::size_t cases = 0;
  std::vector<std::string> failures;  // FAIL lines with witnesses

  void fail(const std::string& witness) {
    pass = false;
    if (failures.size() < 20) failures.push_back("FAIL suite=" + suite + " " + witness);
  }
};

// ---------------------------------------------------------------------------
// roundtrip: print-parse identity on random well-typed formulas
// ---------------------------------------------------------------------------

inline SuiteReport suite_roundtrip(std::uint64_t seed, std::size_t count = 200,
                                   int max_depth = 6) {
  SuiteReport r;
  r.suite = "roundtrip";
  gen::Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    FormulaPtr f = gen::random_formula(rng, max_depth);
    std::string printed = print_formula(f);
    ++r.cases;
    try {
      FormulaPtr back = parse_formula(printed);
      if (!ast_equal(f, back)) {
        r.fail("case=" + std::to_string(i) + " formula=\"" + printed + "\"");
        continue;
      }
      if (print_formula(back) != printed)
        r.fail("case=" + std::to_string(i) + " reprint formula=\"" + printed + "\"");
      typecheck(f);
    } catch (const std::exception& e) {
      r.fail("case=" + std::to_string(i) + " error=\"" + e.what() + "\" formula=\"" + printed +
             "\"");
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// interp-equiv: eval(f) = eval(kuroda) = eval(dialectica) = eval(mr)
// ---------------------------------------------------------------------------

namespace detail {

inline bool prefix_within_cap(const std::vector<TypedVar>& vars, const ContentSpace& m,
                              const EvalBounds& b, std::size_t cap) {
  std::size_t total = 1;
  for (const auto& v : vars) {
    std::size_t d;
    try {
      d = probmine::detail::domain_size(v.type, m, b, probmine::detail::NatRole::Quant);
    } catch (const BoundsExceeded&) {
      return false;
    }
    if (d == 0 || total > cap / d) return false;
    total *= d;
  }
  return total <= cap;
}

}  // namespace detail

inline SuiteReport suite_interp_equiv(std::uint64_t seed, std::size_t count = 100) {
  SuiteReport r;
  r.suite = "interp-equiv";
  gen::Rng rng(seed);
  ContentSpace point = ContentSpace::powerset("point", {{"a", Rat(1)}});
  EvalBounds b;  // nat_bound = fun_dom = fun_ran = 3: quantifiers over {0..3}
  constexpr std::size_t kWitnessCap = 100000;

  std::size_t produced = 0, attempts = 0;
  while (produced < count && attempts < count * 60) {
    ++attempts;
    FormulaPtr f = gen::random_equiv_formula(rng);
    Env env;
    env["p"] = gen::random_nat_table(rng, b);
    env["q"] = gen::random_nat_table(rng, b);

    DialecticaForm dia;
    MRForm mr;
    try {
      dia = dialectica(f);
      mr = modified_realizability(f);
    } catch (const UnsupportedNode&) {
      continue;
    }
    std::vector<TypedVar> vars = dia.exists_vars;
    vars.insert(vars.end(), dia.forall_vars.begin(), dia.forall_vars.end());
    vars.insert(vars.end(), mr.witness_vars.begin(), mr.witness_vars.end());
    if (!detail::prefix_within_cap(vars, point, b, kWitnessCap)) continue;

    ++produced;
    ++r.cases;
    try {
      bool direct = eval(f, point, b, env);
      bool neg = eval(kuroda(f), point, b, env);
      bool dial = eval(render(dia), point, b, env);
      bool real = eval(render(mr), point, b, env);
      if (direct != neg || direct != dial || direct != real)
        r.fail("case=" + std::to_string(produced - 1) + " direct=" + std::to_string(direct) +
               " kuroda=" + std::to_string(neg) + " dialectica=" + std::to_string(dial) +
               " mr=" + std::to_string(real) + " formula=\"" + print_formula(f) + "\"");
    } catch (const std::exception& e) {
      r.fail("case=" + std::to_string(produced - 1) + " error=\"" + e.what() + "\" formula=\"" +
             print_formula(f) + "\"");
    }
  }
  if (produced < count) r.fail("witness=corpus-exhausted produced=" + std::to_string(produced));
  return r;
}

// ---------------------------------------------------------------------------
// outer-oracle: expansion evaluation equals direct content comparison
// ---------------------------------------------------------------------------

inline SuiteReport suite_outer_oracle(const LoadedModel& lm, std::uint64_t seed,
                                      std::size_t count = 200) {
  SuiteReport r;
  r.suite = "outer-oracle";
  gen::Rng rng(seed);
  const ContentSpace& m = lm.space;
  const EvalBounds& b = lm.bounds;
  for (std::size_t i = 0; i < count; ++i) {
    FormulaPtr phi = gen::random_predicate(rng, m);
    Rat lam = b.grid[rng.below(b.grid.size())];
    RealPtr lamt = mk_ratlit(lam);
    ++r.cases;
    try {
      Content c = outer_inner_content(phi, m, b);
      bool geq = eval(mk_probgeq(phi, lamt), m, b);
      bool leq = eval(mk_probleq(phi, lamt), m, b);
      bool dual_route = eval(outer_expand(demorgan_dual(phi), mk_ratlit(Rat(1) - lam)), m, b);
      std::string witness = "model=" + m.id + " lam=" + rat_to_string(lam) + " formula=\"" +
                            print_formula(phi) + "\"";
      if (geq != (c.outer >= lam)) r.fail("kind=outer " + witness);
      if (leq != (c.inner <= lam)) r.fail("kind=inner " + witness);
      if (leq != dual_route) r.fail("kind=duality " + witness);
    } catch (const std::exception& e) {
      r.fail("model=" + m.id + " error=\"" + e.what() + "\"");
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// algebra: collapse, duality, null-set weakening, subadditivity
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t largest_null_set(const ContentSpace& m) {
  std::uint64_t n0 = 0;
  for (auto a : m.algebra)
    if (m.p(a) == Rat(0)) n0 |= a;
  return m.in_algebra(n0) && m.p(n0) == Rat(0) ? n0 : 0;
}

}  // namespace detail

inline SuiteReport suite_algebra(const LoadedModel& lm, std::uint64_t seed,
                                 std::size_t count = 100) {
  SuiteReport r;
  r.suite = "algebra";
  gen::Rng rng(seed);
  const ContentSpace& m = lm.space;
  const EvalBounds& b = lm.bounds;

  // measurable collapse: outer = inner = P(B) on every algebra set
  for (auto a : m.algebra) {
    ++r.cases;
    Content c = outer_inner_content(a, m);
    if (c.outer != m.p(a) || c.inner != m.p(a))
      r.fail("law=collapse model=" + m.id + " set=" + m.set_to_string(a));
  }

  std::uint64_t n0 = detail::largest_null_set(m);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t t = rng.below(m.full() + 1);
    std::uint64_t extra = rng.below(m.full() + 1);

    // duality: inner content of T is 1 - outer content of its complement
    ++r.cases;
    Content ct = outer_inner_content(t, m);
    Content cc = outer_inner_content(m.full() & ~t, m);
    if (ct.inner != Rat(1) - cc.outer)
      r.fail("law=duality model=" + m.id + " set=" + m.set_to_string(t));

    // null-set weakening: phi -> psi outside a null set is outer-monotone
    ++r.cases;
    std::uint64_t psi = (t & ~n0) | extra;
    if (outer_inner_content(t, m).outer > outer_inner_content(psi, m).outer)
      r.fail("law=weakening model=" + m.id + " phi=" + m.set_to_string(t) +
             " psi=" + m.set_to_string(psi));

    // subadditivity of the outer content over a lambda-tilde grid
    std::size_t len = 2 + rng.below(2);
    std::vector<std::uint64_t> fam;
    std::uint64_t uni = 0;
    std::vector<Rat> outs;
    for (std::size_t n = 0; n < len; ++n) {
      fam.push_back(rng.below(m.full() + 1));
      uni |= fam.back();
      outs.push_back(outer_inner_content(fam[n], m).outer);
    }
    Rat uo = outer_inner_content(uni, m).outer;
    ++r.cases;
    Rat sum(0);
    for (const auto& o : outs) sum += o;
    if (uo > sum) r.fail("law=subadditivity model=" + m.id);

    // grid form: outer(union) >= sum(lamt) forces some outer(A_n) >= lamt_n
    std::vector<std::size_t> idx(len, 0);
    bool carry = false;
    while (!carry) {
      Rat total(0);
      for (std::size_t n = 0; n < len; ++n) total += b.grid[idx[n]];
      if (uo >= total) {
        ++r.cases;
        bool some = false;
        for (std::size_t n = 0; n < len && !some; ++n)
          if (outs[n] >= b.grid[idx[n]]) some = true;
        if (!some) r.fail("law=subadditivity-grid model=" + m.id);
      }
      std::size_t d = 0;
      while (d < len && ++idx[d] == b.grid.size()) idx[d++] = 0;
      carry = d == len;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// prenex: semantic soundness (and completeness for R5-R10) plus the ledger
// ---------------------------------------------------------------------------

namespace detail {

inline FormulaPtr member(const ExprPtr& set) {
  return mk_atomin(mk_var(kSampleVar, Type::omega()), set);
}

inline ExprPtr fam_at(const std::string& fam, const ExprPtr& n) {
  return mk_app(mk_var(fam, Type::arrow(Type::ev(), Type::nat())), n);
}

// matrix families: anti-monotone (all n <= x), monotone (ex n <= x)
inline FormulaPtr anti_matrix(const std::string& fam) {
  return mk_bforall("n", Type::nat(), mk_var("x", Type::nat()),
                    member(fam_at(fam, mk_var("n", Type::nat()))));
}
inline FormulaPtr mono_matrix(const std::string& fam) {
  return mk_bexists("n", Type::nat(), mk_var("x", Type::nat()),
                    member(fam_at(fam, mk_var("n", Type::nat()))));
}

}  // namespace detail

inline SuiteReport suite_prenex(const LoadedModel& lm, std::uint64_t seed,
                                std::size_t trials = 25) {
  SuiteReport r;
  r.suite = "prenex";
  gen::Rng rng(seed);
  const ContentSpace& m = lm.space;
  const EvalBounds& b = lm.bounds;

  // thresholds come from the coarse lattice (base grid plus probabilities);
  // the evaluation grid refines it by the mu offset, so "for all mu > 0"
  // premises are decided exactly against these lambdas
  std::vector<Rat> lambda_pool = EvalBounds{}.grid;
  for (const auto& [mask, p] : m.prob) lambda_pool.push_back(p);
  std::sort(lambda_pool.begin(), lambda_pool.end());
  lambda_pool.erase(std::unique(lambda_pool.begin(), lambda_pool.end()), lambda_pool.end());

  struct Case {
    std::string rule;
    FormulaPtr lhs;
    bool equivalence;
    std::string ledger;
  };

  for (std::size_t t = 0; t < trials; ++t) {
    Env env;
    env["A"] = gen::random_event_family(rng, m, static_cast<std::size_t>(b.nat_bound) + 1);
    Rat lam = lambda_pool[rng.below(lambda_pool.size())];
    RealPtr lamt = mk_ratlit(lam);

    FormulaPtr anti = detail::anti_matrix("A");
    FormulaPtr mono = detail::mono_matrix("A");
    FormulaPtr plain = detail::member(detail::fam_at("A", mk_var("x", Type::nat())));

    std::vector<Case> cases = {
        {"R1", mk_probgeq(mk_forall("x", Type::nat(), plain), lamt), false, "{}"},
        {"R3", mk_probleq(mk_exists("x", Type::nat(), plain), lamt), false, "{}"},
        {"R2", probmine::detail::eps_form("x", Type::nat(), anti, lamt, true), false, "{}"},
        {"R4", probmine::detail::eps_form("x", Type::nat(), mono, lamt, false), false, "{}"},
        {"R5", mk_forall("x", Type::nat(), mk_probgeq(anti, lamt)), true,
         "{ClassicalLogic, UB_Omega(0)}"},
        {"R6", mk_probleq(mk_forall("x", Type::nat(), anti), lamt), true,
         "{ClassicalLogic, UB_S(0)}"},
        {"R7", mk_forall("x", Type::nat(), mk_probleq(mono, lamt)), true,
         "{ClassicalLogic, UB_Omega(0)}"},
        {"R8", mk_probgeq(mk_exists("x", Type::nat(), mono), lamt), true,
         "{ClassicalLogic, UB_S(0)}"},
        {"R9", mk_probleq(mk_forall("x", Type::nat(), anti), lamt), true,
         "{IP_forall, UB_S_full(0)}"},
        {"R10", mk_probgeq(mk_exists("x", Type::nat(), mono), lamt), true,
         "{IP_forall, UB_S_full(0)}"},
        {"R11", mk_forall("x", Type::nat(), mk_probgeq(anti, lamt)), false, "{CC0_Omega}"},
    };

    for (const auto& c : cases) {
      ++r.cases;
      std::string witness = "rule=" + c.rule + " model=" + m.id + " seed-case=" +
                            std::to_string(t) + " lam=" + rat_to_string(lam);
      try {
        RewriteResult res = prenex_rewrite(c.lhs, c.rule);
        if (res.justification.to_string() != c.ledger) {
          r.fail(witness + " kind=ledger got=" + res.justification.to_string());
          continue;
        }
        bool lv = eval(c.lhs, m, b, env);
        bool rv = eval(res.formula, m, b, env);
        if (lv && !rv) r.fail(witness + " kind=soundness");
        if (c.equivalence && rv && !lv) r.fail(witness + " kind=completeness");
      } catch (const std::exception& e) {
        r.fail(witness + " error=\"" + e.what() + "\"");
      }
    }

    // R12: measurable collapse against the truth set of a random predicate
    {
      ++r.cases;
      FormulaPtr phi = gen::random_predicate(rng, m);
      std::uint64_t ts = truth_set(phi, m, b);
      SideEvidence side;
      side.model = &m;
      side.bounds = b;
      side.measurable_witness = gen::detail::mask_literal(ts, m);
      FormulaPtr lhs = mk_probgeq(phi, lamt);
      std::string witness = "rule=R12 model=" + m.id + " seed-case=" + std::to_string(t);
      try {
        RewriteResult res = prenex_rewrite(lhs, "R12", side);
        if (res.justification.to_string() != "{}")
          r.fail(witness + " kind=ledger");
        else if (eval(lhs, m, b) != eval(res.formula, m, b))
          r.fail(witness + " kind=equivalence formula=\"" + print_formula(phi) + "\"");
      } catch (const SideConditionUnmet&) {
        if (m.in_algebra(ts)) r.fail(witness + " kind=rejected-measurable");
      } catch (const std::exception& e) {
        r.fail(witness + " error=\"" + e.what() + "\"");
      }
    }

    // R13: null-set weakening towards the truth set minus the null part
    {
      ++r.cases;
      std::uint64_t n0 = detail::largest_null_set(m);
      FormulaPtr phi = gen::random_predicate(rng, m);
      std::uint64_t ts = truth_set(phi, m, b);
      SideEvidence side;
      side.model = &m;
      side.bounds = b;
      side.null_set = gen::detail::mask_literal(n0, m);
      side.weakened_to = detail::member(gen::detail::mask_literal(ts & ~n0, m));
      FormulaPtr lhs = mk_probgeq(phi, lamt);
      std::string witness = "rule=R13 model=" + m.id + " seed-case=" + std::to_string(t);
      try {
        RewriteResult res = prenex_rewrite(lhs, "R13", side);
        if (res.justification.to_string() != "{}")
          r.fail(witness + " kind=ledger");
        else if (eval(lhs, m, b) && !eval(res.formula, m, b))
          r.fail(witness + " kind=soundness formula=\"" + print_formula(phi) + "\"");
      } catch (const std::exception& e) {
        r.fail(witness + " error=\"" + e.what() + "\"");
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// sigma: the sigma-additivity statement pair holds on finite spaces
// ---------------------------------------------------------------------------

inline SuiteReport suite_sigma(const LoadedModel& lm, std::uint64_t seed,
                               std::size_t trials = 25, std::uint64_t index_bound = 6) {
  SuiteReport r;
  r.suite = "sigma";
  gen::Rng rng(seed);
  const ContentSpace& m = lm.space;
  EvalBounds b = lm.bounds;
  b.nat_bound = index_bound;

  auto [lower, upper] =
      sigma_additivity_statement(mk_var("A", Type::arrow(Type::ev(), Type::nat())));
  for (std::size_t t = 0; t < trials; ++t) {
    Env env;
    env["A"] = gen::random_event_family(rng, m, static_cast<std::size_t>(index_bound) + 2);
    ++r.cases;
    try {
      if (!eval(lower, m, b, env))
        r.fail("statement=lower model=" + m.id + " seed-case=" + std::to_string(t));
      if (!eval(upper, m, b, env))
        r.fail("statement=upper model=" + m.id + " seed-case=" + std::to_string(t));
    } catch (const std::exception& e) {
      r.fail("model=" + m.id + " error=\"" + e.what() + "\"");
    }

    // disjointification invariants on the same family
    ++r.cases;
    std::vector<std::uint64_t> fam;
    for (const auto& v : env["A"].table) fam.push_back(v.num);
    std::vector<std::uint64_t> dis = disjointify(fam);
    std::uint64_t pu_a = 0, pu_d = 0;
    for (std::size_t i = 0; i < fam.size(); ++i) {
      pu_a |= fam[i];
      pu_d |= dis[i];
      if (pu_a != pu_d) r.fail("law=disjointify-partial-unions model=" + m.id);
      for (std::size_t j = 0; j < i; ++j)
        if (dis[i] & dis[j]) r.fail("law=disjointify-disjoint model=" + m.id);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// fluct: the dynamic program against the brute-force oracle
// ---------------------------------------------------------------------------

inline SuiteReport suite_fluct(std::uint64_t seed, std::size_t sample = 0) {
  SuiteReport r;
  r.suite = "fluct";
  const std::vector<Rat> levels = {Rat(0), Rat(1, 4), Rat(1, 2), Rat(1)};
  const std::size_t len = 8;
  const std::uint64_t total = 65536;  // 4^8
  gen::Rng rng(seed);
  for (std::uint64_t t = 0; t < (sample ? sample : total); ++t) {
    std::uint64_t code = sample ? rng.below(total) : t;
    std::vector<Rat> xs;
    std::uint64_t rest = code;
    for (std::size_t i = 0; i < len; ++i) {
      xs.push_back(levels[rest % 4]);
      rest /= 4;
    }
    for (unsigned k = 0; k <= 2; ++k) {
      ++r.cases;
      std::uint64_t dp = count_fluctuations(xs, k, len);
      std::uint64_t bf = count_fluctuations_brute(xs, k, len);
      if (dp != bf)
        r.fail("seq-code=" + std::to_string(code) + " k=" + std::to_string(k) +
               " dp=" + std::to_string(dp) + " brute=" + std::to_string(bf));
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// modulus: verified PlusTwo moduli survive the Form1-style transform
// ---------------------------------------------------------------------------

inline SuiteReport suite_modulus(const LoadedModel& lm, std::uint64_t seed,
                                 std::size_t families = 50) {
  SuiteReport r;
  r.suite = "modulus";
  gen::Rng rng(seed);
  const ContentSpace& m = lm.space;
  EvalBounds b = lm.bounds;
  const std::uint64_t xb = 3, mb = 3;
  b.nat_bound = std::max(xb, mb);
  const std::size_t len = 6;  // family horizon; coverage is forced below it

  Type ev_seq = Type::arrow(Type::ev(), Type::nat());
  Type fam_t = Type::arrow(ev_seq, Type::nat());
  Type nat_seq = Type::arrow(Type::nat(), Type::nat());
  Type mod_t = Type::arrow(nat_seq, Type::nat());

  ExprPtr a_xn = mk_app(mk_app(mk_var("A", fam_t), mk_var("x", Type::nat())),
                        mk_var("n", Type::nat()));
  FormulaPtr matrix = mk_atomin(mk_var(kSampleVar, Type::omega()), a_xn);
  RealPtr margin = mk_sub(mk_ratlit(Rat(1)), mk_powhalf(mk_var("m", Type::nat())));
  auto bound_app = [&](const char* name) {
    return mk_app(mk_app(mk_var(name, mod_t), mk_var("m", Type::nat())),
                  mk_var("x", Type::nat()));
  };
  // all m. all x. Pr[ ex n <= Phi m x. w in A x n ] >= 1 - 2^-m
  FormulaPtr premise = mk_forall(
      "m", Type::nat(),
      mk_forall("x", Type::nat(),
                mk_probgeq(mk_bexists("n", Type::nat(), bound_app("Phi"), matrix), margin)));
  // all m. Pr[ all x. ex n <= Phip m x. w in A x n ] >= 1 - 2^-m
  FormulaPtr conclusion = mk_forall(
      "m", Type::nat(),
      mk_probgeq(mk_forall("x", Type::nat(),
                           mk_bexists("n", Type::nat(), bound_app("Phip"), matrix)),
                 margin));

  for (std::size_t fam_i = 0; fam_i < families; ++fam_i) {
    // random family with forced eventual coverage for every x
    std::vector<std::vector<std::uint64_t>> fam(static_cast<std::size_t>(xb) + 1);
    for (auto& row : fam) {
      for (std::size_t n = 0; n < len; ++n)
        row.push_back(m.algebra[rng.below(m.algebra.size())]);
      row[1 + rng.below(len - 1)] = m.full();
    }

    // the minimal PlusTwo modulus, with rows deep enough for the transform
    std::vector<std::vector<std::uint64_t>> phi(static_cast<std::size_t>(mb + xb + 2));
    bool defined = true;
    for (std::uint64_t mm = 0; mm < phi.size() && defined; ++mm) {
      Rat target = Rat(1) - pow_half(static_cast<unsigned>(mm));
      for (std::uint64_t x = 0; x <= xb; ++x) {
        std::uint64_t uni = 0, best = len;
        for (std::uint64_t n = 0; n < len; ++n) {
          uni |= fam[x][n];
          if (m.p(uni) >= target) {
            best = n;
            break;
          }
        }
        if (best == len) {
          defined = false;
          break;
        }
        phi[mm].push_back(best);
      }
    }
    if (!defined) {
      r.fail("family=" + std::to_string(fam_i) + " model=" + m.id + " kind=no-modulus");
      continue;
    }
    ModulusTable phit = ModulusTable::from_table(phi);
    ModulusTable phip = transform_modulus_equiv(phit);

    auto table_value = [&](const ModulusTable& mt, std::uint64_t rows) {
      std::vector<Value> outer;
      for (std::uint64_t mm = 0; mm <= rows; ++mm) {
        std::vector<Value> row;
        for (std::uint64_t x = 0; x <= xb; ++x) row.push_back(Value::nat(mt.eval(mm, x)));
        outer.push_back(Value::fun(nat_seq, std::move(row)));
      }
      return Value::fun(mod_t, std::move(outer));
    };
    std::vector<Value> fam_v;
    for (const auto& row : fam) {
      std::vector<Value> sets;
      for (auto mask : row) sets.push_back(Value::set(mask));
      fam_v.push_back(Value::fun(ev_seq, std::move(sets)));
    }

    Env env;
    env["A"] = Value::fun(fam_t, std::move(fam_v));
    env["Phi"] = table_value(phit, b.nat_bound);
    env["Phip"] = table_value(phip, b.nat_bound);

    ++r.cases;
    try {
      if (!eval(premise, m, b, env)) {
        r.fail("family=" + std::to_string(fam_i) + " model=" + m.id + " kind=premise");
        continue;
      }
      if (!eval(conclusion, m, b, env))
        r.fail("family=" + std::to_string(fam_i) + " model=" + m.id + " kind=transform");
    } catch (const std::exception& e) {
      r.fail("family=" + std::to_string(fam_i) + " model=" + m.id + " error=\"" + e.what() +
             "\"");
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

inline bool suite_needs_model(const std::string& name) {
  return name == "outer-oracle" || name == "algebra" || name == "prenex" || name == "sigma" ||
         name == "modulus";
}

inline SuiteReport run_suite(const std::string& name, const LoadedModel* model,
                             std::uint64_t seed) {
  if (name == "roundtrip") return suite_roundtrip(seed);
  if (name == "interp-equiv") return suite_interp_equiv(seed);
  if (name == "fluct") return suite_fluct(seed);
  if (!model) throw std::invalid_argument("suite " + name + " needs --model");
  if (name == "outer-oracle") return suite_outer_oracle(*model, seed);
  if (name == "algebra") return suite_algebra(*model, seed);
  if (name == "prenex") return suite_prenex(*model, seed);
  if (name == "sigma") return suite_sigma(*model, seed);
  if (name == "modulus") return suite_modulus(*model, seed);
  throw std::invalid_argument("unknown suite: " + name);
}

}  // namespace probmine::verify
