#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "probmine/classify.hpp"
#include "probmine/expand.hpp"
#include "probmine/model.hpp"
#include "probmine/modulus.hpp"
#include "probmine/printer.hpp"
#include "probmine/typecheck.hpp"

namespace probmine {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct NotPure : std::runtime_error {
  explicit NotPure(const std::string& s) : std::runtime_error("NotPure: " + s) {}
};
struct BadAlphaShape : std::runtime_error {
  explicit BadAlphaShape(const std::string& s) : std::runtime_error("BadAlphaShape: " + s) {}
};
struct FormulaClassViolation : std::runtime_error {
  explicit FormulaClassViolation(const std::string& s)
      : std::runtime_error("FormulaClassViolation: " + s) {}
};
struct ShapeOther : std::runtime_error {
  explicit ShapeOther(const std::string& s) : std::runtime_error("ShapeOther: " + s) {}
};
struct SideConditionUnmet : std::runtime_error {
  std::string which;
  explicit SideConditionUnmet(const std::string& w)
      : std::runtime_error("SideConditionUnmet: " + w), which(w) {}
};
struct RuleMismatch : std::runtime_error {
  explicit RuleMismatch(const std::string& s) : std::runtime_error("RuleMismatch: " + s) {}
};

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

namespace detail {

inline Type ev_seq_type() { return Type::arrow(Type::ev(), Type::nat()); }
inline ExprPtr up_const() { return mk_const("up", Type::arrow(ev_seq_type(), ev_seq_type())); }

inline std::string pick_fresh(const std::string& base, std::set<std::string>& used) {
  std::string n = used.count(base) ? fresh_name(base, used) : base;
  used.insert(n);
  return n;
}

inline std::set<std::string> all_names(const FormulaPtr& f) {
  // free and bound occurrences alike; conservative freshness pool
  std::set<std::string> out = free_vars(f);
  std::function<void(const FormulaPtr&)> go = [&](const FormulaPtr& g) {
    if (!g) return;
    switch (g->kind) {
      case Formula::Kind::Forall:
      case Formula::Kind::Exists:
      case Formula::Kind::BForall:
      case Formula::Kind::BExists:
        out.insert(g->name);
        go(g->lhs);
        break;
      case Formula::Kind::Not:
      case Formula::Kind::ProbGeq:
      case Formula::Kind::ProbLeq:
        go(g->lhs);
        break;
      case Formula::Kind::And:
      case Formula::Kind::Or:
      case Formula::Kind::Implies:
        go(g->lhs);
        go(g->rhs);
        break;
      default:
        break;
    }
  };
  go(f);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subadditivity statement: the lambda-tilde form of sum-bounded outer content
// ---------------------------------------------------------------------------

// Renders  all lamt:R(0). (lam >= sum_{n=0}^m lamt[n] -> ex n<=m. Pr[phi(n)] >= lamt[n]).
// The finite sum is expanded when m is a literal.
inline FormulaPtr sum_outer_geq(const FormulaPtr& phi, const std::string& n_name,
                                const ExprPtr& m_bound, const RealPtr& lam) {
  auto used = detail::all_names(phi);
  for (auto& v : free_vars(m_bound)) used.insert(v);
  std::string lamt = detail::pick_fresh("lamt", used);

  RealPtr total;
  if (m_bound->kind == Expr::Kind::NatLit) {
    for (std::uint64_t i = 0; i <= m_bound->nat; ++i) {
      RealPtr at = mk_seqat(lamt, mk_natlit(i));
      total = total ? mk_add(total, at) : at;
    }
  } else {
    total = mk_sum(n_name, m_bound, mk_seqat(lamt, mk_var(n_name, Type::nat())));
  }

  FormulaPtr guard = mk_atomcmp(lam, CmpOp::Ge, total);
  FormulaPtr each = mk_probgeq(phi, mk_seqat(lamt, mk_var(n_name, Type::nat())));
  FormulaPtr conclusion =
      m_bound->kind == Expr::Kind::NatLit && m_bound->nat == 0
          ? substitute(each, n_name, mk_natlit(0))
          : mk_bexists(n_name, Type::nat(), m_bound, each);
  return mk_forall(lamt, Type::arrow(Type::real(), Type::nat()),
                   mk_implies(guard, conclusion));
}

// ---------------------------------------------------------------------------
// Statement-form detection
// ---------------------------------------------------------------------------

enum class ProbShape { Form1, Form2, Form3, Other };

inline const char* to_string(ProbShape s) {
  switch (s) {
    case ProbShape::Form1: return "Form1";
    case ProbShape::Form2: return "Form2";
    case ProbShape::Form3: return "Form3";
    case ProbShape::Other: return "Other";
  }
  return "?";
}

struct ProbForm {
  ProbShape shape = ProbShape::Other;
  std::string outer_name;         // x
  Type outer_type;
  std::string inner_name;         // n : 0
  std::string error_name;         // m : 0 (Form3)
  FormulaPtr matrix;
  RealPtr lam;
  std::string diagnostic;
};

namespace detail {

inline bool is_nat_exists(const FormulaPtr& f) {
  return (f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::BExists) &&
         f->var_type == Type::nat();
}

// lam - 2^-m for the given error variable; returns the lam part on match
inline RealPtr match_error_margin(const RealPtr& r, const std::string& m_name) {
  if (r->kind != RealTerm::Kind::Sub) return nullptr;
  const RealPtr& rhs = r->r;
  if (rhs->kind != RealTerm::Kind::PowHalf) return nullptr;
  if (rhs->idx->kind != Expr::Kind::Var || rhs->idx->name != m_name) return nullptr;
  return r->l;
}

}  // namespace detail

inline ProbForm detect_form(const FormulaPtr& f) {
  ProbForm out;
  // Form1: Pr[ all x. ex n. matrix ] >= lam
  if (f->kind == Formula::Kind::ProbGeq && f->lhs->kind == Formula::Kind::Forall) {
    const FormulaPtr& body = f->lhs;
    if (detail::is_nat_exists(body->lhs) && body->lhs->kind == Formula::Kind::Exists) {
      out.shape = ProbShape::Form1;
      out.outer_name = body->name;
      out.outer_type = body->var_type;
      out.inner_name = body->lhs->name;
      out.matrix = body->lhs->lhs;
      out.lam = f->rl;
      return out;
    }
  }
  // Form2: all x. Pr[ ex n. matrix ] >= lam
  if (f->kind == Formula::Kind::Forall && f->lhs->kind == Formula::Kind::ProbGeq &&
      f->lhs->lhs->kind == Formula::Kind::Exists &&
      f->lhs->lhs->var_type == Type::nat()) {
    out.shape = ProbShape::Form2;
    out.outer_name = f->name;
    out.outer_type = f->var_type;
    out.inner_name = f->lhs->lhs->name;
    out.matrix = f->lhs->lhs->lhs;
    out.lam = f->lhs->rl;
    return out;
  }
  // Form3: all m:0. all x. ex n:0. Pr[ matrix ] >= lam - 2^-m
  if (f->kind == Formula::Kind::Forall && f->var_type == Type::nat() &&
      f->lhs->kind == Formula::Kind::Forall &&
      f->lhs->lhs->kind == Formula::Kind::Exists &&
      f->lhs->lhs->var_type == Type::nat() &&
      f->lhs->lhs->lhs->kind == Formula::Kind::ProbGeq) {
    const FormulaPtr& pr = f->lhs->lhs->lhs;
    RealPtr lam = detail::match_error_margin(pr->rl, f->name);
    if (lam) {
      out.shape = ProbShape::Form3;
      out.error_name = f->name;
      out.outer_name = f->lhs->name;
      out.outer_type = f->lhs->var_type;
      out.inner_name = f->lhs->lhs->name;
      out.matrix = pr->lhs;
      out.lam = lam;
      return out;
    }
    out.diagnostic = "innermost bound is not of the shape lam - 2^-m";
    return out;
  }
  out.diagnostic = "no Pr-prefix pattern matched";
  return out;
}

// ---------------------------------------------------------------------------
// Quantitative interpretation: the (+)-form bounded modulus statements
// ---------------------------------------------------------------------------

enum class ModulusSpecKind { PlusOneIntuitionistic, PlusOneClassical, PlusTwo, PlusThree };

inline const char* to_string(ModulusSpecKind k) {
  switch (k) {
    case ModulusSpecKind::PlusOneIntuitionistic: return "plus-one-intuitionistic";
    case ModulusSpecKind::PlusOneClassical: return "plus-one-classical";
    case ModulusSpecKind::PlusTwo: return "plus-two";
    case ModulusSpecKind::PlusThree: return "plus-three";
  }
  return "?";
}

struct ModulusSpec {
  ModulusSpecKind kind;
  FormulaPtr spec_formula;
  std::string majorant_note;
};

enum class InterpMode { Classical, Semiconstructive };

namespace detail {

// Shared outer structure: the quantifier prefix over x (and its majorant) plus
// the modulus application Phi(m, <anchor>). At type 0 the majorant collapses
// onto x itself; at pure degree-1 types the relation is pointwise <= after
// hat-erasure; at abstract sorts the pair (x*, x) is kept with a note.
struct OuterPlan {
  std::string phi_name, star_name;
  Type phi_type;
  ExprPtr anchor;                   // the argument Phi receives after m
  bool separate_star = false;       // quantify x* separately from x
  bool bounded_x = false;           // x quantified as x <= x* at the same type
  std::string note;
};

inline OuterPlan plan_outer(const std::string& x, const Type& tau, std::set<std::string>& used) {
  OuterPlan p;
  p.phi_name = pick_fresh("Phi", used);
  if (tau == Type::nat()) {
    p.anchor = mk_var(x, tau);
    p.phi_type = Type::arrow(Type::arrow(Type::nat(), tau), Type::nat());
    p.note = "at type 0 the majorant x* coincides with x";
    return p;
  }
  p.star_name = pick_fresh("xstar", used);
  Type h = hat_type(tau);
  p.anchor = mk_var(p.star_name, h);
  p.phi_type = Type::arrow(Type::arrow(Type::nat(), h), Type::nat());
  if (tau == h && is_pure_type(tau) && type_degree(tau) <= 1) {
    p.bounded_x = true;
    p.note = "x <= " + p.star_name + " reads the majorization relation pointwise at degree 1";
  } else {
    p.separate_star = true;
    p.note = "the intended restriction x majorized-by " + p.star_name +
             " is recorded here, not expressible in the object grammar at " + tau.to_string();
  }
  return p;
}

inline ExprPtr phi_app(const OuterPlan& p, const std::string& m_name) {
  return mk_app(mk_app(mk_var(p.phi_name, p.phi_type), mk_var(m_name, Type::nat())), p.anchor);
}

// wrap the body under the x-prefix dictated by the plan
inline FormulaPtr wrap_x(const OuterPlan& p, const std::string& x, const Type& tau,
                         FormulaPtr body) {
  if (p.bounded_x)
    body = mk_bforall(x, tau, mk_var(p.star_name, tau), std::move(body));
  else
    body = mk_forall(x, tau, std::move(body));
  if (p.separate_star || p.bounded_x)
    body = mk_forall(p.star_name, hat_type(tau), std::move(body));
  return body;
}

}  // namespace detail

inline ModulusSpec quantitative_interpretation(
    const ProbForm& pf, InterpMode mode,
    std::optional<MonotoneVerdict> mono_in_n = std::nullopt) {
  if (pf.shape == ProbShape::Other) throw ShapeOther(pf.diagnostic);
  auto used = detail::all_names(pf.matrix);
  used.insert(pf.outer_name);
  used.insert(pf.inner_name);
  for (auto& v : free_vars(pf.lam)) used.insert(v);

  std::string m_name = pf.shape == ProbShape::Form3 ? pf.error_name
                                                    : detail::pick_fresh("m", used);
  detail::OuterPlan plan = detail::plan_outer(pf.outer_name, pf.outer_type, used);
  RealPtr margin = mk_sub(pf.lam, mk_powhalf(mk_var(m_name, Type::nat())));
  ExprPtr bound = detail::phi_app(plan, m_name);

  ModulusSpec out;
  out.majorant_note = plan.note;

  switch (pf.shape) {
    case ProbShape::Form2: {
      // all m. all x-prefix. Pr[ ex n <= Phi(m, x*) . matrix ] >= lam - 2^-m
      out.kind = ModulusSpecKind::PlusTwo;
      FormulaPtr pr = mk_probgeq(mk_bexists(pf.inner_name, Type::nat(), bound, pf.matrix), margin);
      out.spec_formula = mk_forall(m_name, Type::nat(),
                                   detail::wrap_x(plan, pf.outer_name, pf.outer_type, pr));
      return out;
    }
    case ProbShape::Form3: {
      out.kind = ModulusSpecKind::PlusThree;
      if (mono_in_n && mono_in_n->direction == MonoDir::Monotone) {
        // direct witness: all m. all x-prefix. Pr[ matrix[n := Phi(m, x*)] ] >= lam - 2^-m
        FormulaPtr inst = substitute(pf.matrix, pf.inner_name, bound);
        FormulaPtr pr = mk_probgeq(inst, margin);
        out.spec_formula = mk_forall(m_name, Type::nat(),
                                     detail::wrap_x(plan, pf.outer_name, pf.outer_type, pr));
        out.majorant_note += "; matrix monotone in " + pf.inner_name +
                             ", so the modulus is a direct witness";
        return out;
      }
      // all m. all x-prefix. ex n <= Phi(m, x*). Pr[ matrix ] >= lam - 2^-m
      FormulaPtr body = mk_bexists(pf.inner_name, Type::nat(), bound,
                                   mk_probgeq(pf.matrix, margin));
      out.spec_formula = mk_forall(m_name, Type::nat(),
                                   detail::wrap_x(plan, pf.outer_name, pf.outer_type, body));
      return out;
    }
    case ProbShape::Form1: {
      if (mode == InterpMode::Semiconstructive) {
        // all m. Pr[ all x-prefix. ex n <= Phi(m, x*). matrix ] >= lam - 2^-m
        out.kind = ModulusSpecKind::PlusOneIntuitionistic;
        FormulaPtr inner = mk_bexists(pf.inner_name, Type::nat(), bound, pf.matrix);
        out.spec_formula = mk_forall(
            m_name, Type::nat(),
            mk_probgeq(detail::wrap_x(plan, pf.outer_name, pf.outer_type, inner), margin));
        return out;
      }
      // classical: rendered at type 0 outer variables only
      if (pf.outer_type != Type::nat())
        throw UnsupportedQuantifierType(
            "the classical Form1 interpretation is rendered at outer type 0 only");
      out.kind = ModulusSpecKind::PlusOneClassical;
      std::string cap = detail::pick_fresh("N", used);
      std::string xt = detail::pick_fresh("xt", used);
      Type nat1 = Type::arrow(Type::nat(), Type::nat());
      // all m. Pr[ ex N <= Phi(m). all x <= xt(N). ex n <= N. matrix ] >= lam - 2^-m
      ExprPtr phi0 = mk_app(mk_var(plan.phi_name, nat1), mk_var(m_name, Type::nat()));
      FormulaPtr body = mk_bexists(
          cap, Type::nat(), phi0,
          mk_bforall(pf.outer_name, Type::nat(),
                     mk_app(mk_var(xt, nat1), mk_var(cap, Type::nat())),
                     mk_bexists(pf.inner_name, Type::nat(), mk_var(cap, Type::nat()),
                                pf.matrix)));
      out.spec_formula = mk_forall(m_name, Type::nat(), mk_probgeq(body, margin));
      out.majorant_note = "N ranges below the modulus, " + xt +
                          " caps the x needed; the majorization reading is literal at type 0";
      return out;
    }
    default:
      throw ShapeOther(pf.diagnostic);
  }
}

// ---------------------------------------------------------------------------
// Semantic monotonicity oracle
// ---------------------------------------------------------------------------

inline MonotoneVerdict monotonicity_semantic(const FormulaPtr& f, const std::string& x,
                                             const ContentSpace& m, const EvalBounds& b) {
  TypeCtx ctx;
  typecheck_formula(f, ctx);
  std::vector<std::pair<std::string, Type>> others;
  for (auto& v : free_vars(f))
    if (v != x) others.push_back({v, ctx.at(v)});
  if (!ctx.count(x) || ctx.at(x) != Type::nat())
    return {MonoDir::Unknown, MonoEvidence::None, "semantic check needs a type-0 variable"};

  bool up_ok = true, down_ok = true;
  std::function<void(std::size_t, Env&)> sweep = [&](std::size_t i, Env& env) {
    if (!up_ok && !down_ok) return;
    if (i == others.size()) {
      std::vector<bool> vals;
      for (std::uint64_t v = 0; v <= b.nat_bound; ++v) {
        detail::ScopedBind bind(env, x, Value::nat(v));
        vals.push_back(eval_formula(f, m, b, env));
      }
      for (std::size_t v = 0; v + 1 < vals.size(); ++v) {
        if (vals[v] && !vals[v + 1]) up_ok = false;
        if (vals[v + 1] && !vals[v]) down_ok = false;
      }
      return;
    }
    std::size_t n = detail::domain_size(others[i].second, m, b, detail::NatRole::Quant);
    for (std::size_t j = 0; j < n; ++j) {
      detail::ScopedBind bind(env, others[i].first,
                              detail::value_at(others[i].second, j, m, b,
                                               detail::NatRole::Quant));
      sweep(i + 1, env);
    }
  };
  Env env;
  sweep(0, env);
  if (up_ok) return {MonoDir::Monotone, MonoEvidence::SemanticallyChecked, m.id};
  if (down_ok) return {MonoDir::AntiMonotone, MonoEvidence::SemanticallyChecked, m.id};
  return {MonoDir::Unknown, MonoEvidence::None, m.id};
}

// ---------------------------------------------------------------------------
// Prenexation rewriting with a principle ledger
// ---------------------------------------------------------------------------

struct Justification {
  std::vector<std::string> principles;  // multiset, kept sorted
  std::vector<std::pair<std::string, std::string>> rule_trace;  // (rule, position)

  void add(const std::string& rule, std::vector<std::string> ps) {
    for (auto& p : ps) principles.push_back(std::move(p));
    std::sort(principles.begin(), principles.end());
    rule_trace.emplace_back(rule, "root");
  }
  std::string to_string() const {
    std::string out = "{";
    for (std::size_t i = 0; i < principles.size(); ++i)
      out += (i ? ", " : "") + principles[i];
    return out + "}";
  }
};

struct SideEvidence {
  std::optional<MonotoneVerdict> mono;
  const ContentSpace* model = nullptr;  // enables semantic side checks
  EvalBounds bounds;
  ExprPtr measurable_witness;           // R12
  FormulaPtr weakened_to;               // R13: psi
  ExprPtr null_set;                     // R13: A0 with P(A0) = 0
};

struct RewriteResult {
  FormulaPtr formula;
  Justification justification;
};

namespace detail {

inline std::string mu_name(const FormulaPtr& ref) {
  auto used = all_names(ref);
  return used.count("mu") ? fresh_name("mu", used) : "mu";
}

// all mu:R. mu > 0 -> ex x:t. <node>(phi, combine(lam, mu))
inline FormulaPtr eps_form(const std::string& x, const Type& t, const FormulaPtr& phi,
                           const RealPtr& lam, bool is_leq) {
  std::string mu = mu_name(phi);
  RealPtr muv = mk_realvar(mu);
  RealPtr adjusted = is_leq ? mk_add(lam, muv) : mk_sub(lam, muv);
  FormulaPtr inner = is_leq ? mk_probleq(phi, adjusted) : mk_probgeq(phi, adjusted);
  return mk_forall(mu, Type::real(),
                   mk_implies(mk_atomcmp(muv, CmpOp::Gt, mk_ratlit(Rat(0))),
                              mk_exists(x, t, inner)));
}

// match  all mu:R. mu > 0 -> ex x:t. <node>(phi, lam +/- mu)
struct EpsMatch {
  std::string x;
  Type t;
  FormulaPtr phi;
  RealPtr lam;
};

inline std::optional<EpsMatch> match_eps(const FormulaPtr& f, bool is_leq) {
  if (f->kind != Formula::Kind::Forall || f->var_type != Type::real()) return std::nullopt;
  const std::string& mu = f->name;
  if (f->lhs->kind != Formula::Kind::Implies) return std::nullopt;
  const FormulaPtr& guard = f->lhs->lhs;
  if (guard->kind != Formula::Kind::AtomCmp || guard->op != CmpOp::Gt) return std::nullopt;
  if (guard->rl->kind != RealTerm::Kind::Var || guard->rl->name != mu) return std::nullopt;
  if (guard->rr->kind != RealTerm::Kind::RatLit || guard->rr->rat != Rat(0)) return std::nullopt;
  const FormulaPtr& ex = f->lhs->rhs;
  if (ex->kind != Formula::Kind::Exists) return std::nullopt;
  const FormulaPtr& pr = ex->lhs;
  if (pr->kind != (is_leq ? Formula::Kind::ProbLeq : Formula::Kind::ProbGeq)) return std::nullopt;
  RealTerm::Kind want = is_leq ? RealTerm::Kind::Add : RealTerm::Kind::Sub;
  if (pr->rl->kind != want) return std::nullopt;
  if (pr->rl->r->kind != RealTerm::Kind::Var || pr->rl->r->name != mu) return std::nullopt;
  return EpsMatch{ex->name, ex->var_type, pr->lhs, pr->rl->l};
}

inline void require_anti(const FormulaPtr& phi, const std::string& x, const SideEvidence& side,
                         bool want_anti) {
  MonotoneVerdict v;
  if (side.mono) {
    v = *side.mono;
  } else {
    v = monotonicity_syntactic(phi, x);
    if (v.direction == MonoDir::Unknown && side.model)
      v = monotonicity_semantic(phi, x, *side.model, side.bounds);
  }
  MonoDir want = want_anti ? MonoDir::AntiMonotone : MonoDir::Monotone;
  if (v.direction != want)
    throw SideConditionUnmet(want_anti ? "AntiMonotone" : "Monotone");
}

inline void require_class(const FormulaPtr& phi, FormulaClassValue want) {
  FormulaClassValue c = formula_class(phi).value;
  if (c == FormulaClassValue::QuantifierFree && want != FormulaClassValue::QuantifierFree)
    return;  // quantifier-free formulas belong to both restricted classes
  if (c != want)
    throw SideConditionUnmet(std::string("formula class ") + probmine::to_string(want));
}

inline void require_pure(const Type& t) {
  if (!is_pure_type(t)) throw SideConditionUnmet("pure type");
}

}  // namespace detail

inline RewriteResult prenex_rewrite(const FormulaPtr& f, const std::string& rule,
                                    const SideEvidence& side = {}) {
  RewriteResult out;
  auto done = [&](FormulaPtr g, std::vector<std::string> principles) {
    out.formula = std::move(g);
    out.justification.add(rule, std::move(principles));
    return out;
  };

  if (rule == "R1") {
    // Pr[ all x. phi ] >= lam  =>  all x. Pr[ phi ] >= lam
    if (f->kind != Formula::Kind::ProbGeq || f->lhs->kind != Formula::Kind::Forall)
      throw RuleMismatch("R1 expects Pr[ all x. phi ] >= lam");
    const FormulaPtr& q = f->lhs;
    return done(mk_forall(q->name, q->var_type, mk_probgeq(q->lhs, f->rl)), {});
  }
  if (rule == "R2") {
    // all mu > 0. ex x. Pr[ phi ] <= lam + mu  =>  Pr[ all x. phi ] <= lam
    auto m = detail::match_eps(f, true);
    if (!m) throw RuleMismatch("R2 expects all mu:R. mu > 0 -> ex x. Pr[phi] <= lam + mu");
    return done(mk_probleq(mk_forall(m->x, m->t, m->phi), m->lam), {});
  }
  if (rule == "R3") {
    // Pr[ ex x. phi ] <= lam  =>  all x. Pr[ phi ] <= lam
    if (f->kind != Formula::Kind::ProbLeq || f->lhs->kind != Formula::Kind::Exists)
      throw RuleMismatch("R3 expects Pr[ ex x. phi ] <= lam");
    const FormulaPtr& q = f->lhs;
    return done(mk_forall(q->name, q->var_type, mk_probleq(q->lhs, f->rl)), {});
  }
  if (rule == "R4") {
    // all mu > 0. ex x. Pr[ phi ] >= lam - mu  =>  Pr[ ex x. phi ] >= lam
    auto m = detail::match_eps(f, false);
    if (!m) throw RuleMismatch("R4 expects all mu:R. mu > 0 -> ex x. Pr[phi] >= lam - mu");
    return done(mk_probgeq(mk_exists(m->x, m->t, m->phi), m->lam), {});
  }
  if (rule == "R5") {
    // all x. Pr[ phi ] >= lam  =>  Pr[ all x. phi ] >= lam
    if (f->kind != Formula::Kind::Forall || f->lhs->kind != Formula::Kind::ProbGeq)
      throw RuleMismatch("R5 expects all x. Pr[ phi ] >= lam");
    const FormulaPtr& phi = f->lhs->lhs;
    detail::require_pure(f->var_type);
    detail::require_class(phi, FormulaClassValue::Universal);
    detail::require_anti(phi, f->name, side, true);
    return done(mk_probgeq(mk_forall(f->name, f->var_type, phi), f->lhs->rl),
                {"UB_Omega(" + f->var_type.to_string() + ")", "ClassicalLogic"});
  }
  if (rule == "R6") {
    // Pr[ all x. phi ] <= lam  =>  all mu > 0. ex x. Pr[ phi ] <= lam + mu
    if (f->kind != Formula::Kind::ProbLeq || f->lhs->kind != Formula::Kind::Forall)
      throw RuleMismatch("R6 expects Pr[ all x. phi ] <= lam");
    const FormulaPtr& q = f->lhs;
    detail::require_pure(q->var_type);
    detail::require_class(q->lhs, FormulaClassValue::Universal);
    detail::require_anti(q->lhs, q->name, side, true);
    return done(detail::eps_form(q->name, q->var_type, q->lhs, f->rl, true),
                {"UB_S(" + q->var_type.to_string() + ")", "ClassicalLogic"});
  }
  if (rule == "R7") {
    // all x. Pr[ phi ] <= lam  =>  Pr[ ex x. phi ] <= lam
    if (f->kind != Formula::Kind::Forall || f->lhs->kind != Formula::Kind::ProbLeq)
      throw RuleMismatch("R7 expects all x. Pr[ phi ] <= lam");
    const FormulaPtr& phi = f->lhs->lhs;
    detail::require_pure(f->var_type);
    detail::require_class(phi, FormulaClassValue::Existential);
    detail::require_anti(phi, f->name, side, false);
    return done(mk_probleq(mk_exists(f->name, f->var_type, phi), f->lhs->rl),
                {"UB_Omega(" + f->var_type.to_string() + ")", "ClassicalLogic"});
  }
  if (rule == "R8") {
    // Pr[ ex x. phi ] >= lam  =>  all mu > 0. ex x. Pr[ phi ] >= lam - mu
    if (f->kind != Formula::Kind::ProbGeq || f->lhs->kind != Formula::Kind::Exists)
      throw RuleMismatch("R8 expects Pr[ ex x. phi ] >= lam");
    const FormulaPtr& q = f->lhs;
    detail::require_pure(q->var_type);
    detail::require_class(q->lhs, FormulaClassValue::Existential);
    detail::require_anti(q->lhs, q->name, side, false);
    return done(detail::eps_form(q->name, q->var_type, q->lhs, f->rl, false),
                {"UB_S(" + q->var_type.to_string() + ")", "ClassicalLogic"});
  }
  if (rule == "R9") {
    // semiconstructive R6: arbitrary phi
    if (f->kind != Formula::Kind::ProbLeq || f->lhs->kind != Formula::Kind::Forall)
      throw RuleMismatch("R9 expects Pr[ all x. phi ] <= lam");
    const FormulaPtr& q = f->lhs;
    detail::require_pure(q->var_type);
    return done(detail::eps_form(q->name, q->var_type, q->lhs, f->rl, true),
                {"UB_S_full(" + q->var_type.to_string() + ")", "IP_forall"});
  }
  if (rule == "R10") {
    // semiconstructive R8: arbitrary phi
    if (f->kind != Formula::Kind::ProbGeq || f->lhs->kind != Formula::Kind::Exists)
      throw RuleMismatch("R10 expects Pr[ ex x. phi ] >= lam");
    const FormulaPtr& q = f->lhs;
    detail::require_pure(q->var_type);
    return done(detail::eps_form(q->name, q->var_type, q->lhs, f->rl, false),
                {"UB_S_full(" + q->var_type.to_string() + ")", "IP_forall"});
  }
  if (rule == "R11") {
    // all x:0. Pr[ phi0 ] >= lam  =>  Pr[ all x:0. phi0 ] >= lam, phi0 quantifier-free
    if (f->kind != Formula::Kind::Forall || f->var_type != Type::nat() ||
        f->lhs->kind != Formula::Kind::ProbGeq)
      throw RuleMismatch("R11 expects all x:0. Pr[ phi0 ] >= lam");
    const FormulaPtr& phi = f->lhs->lhs;
    detail::require_class(phi, FormulaClassValue::QuantifierFree);
    detail::require_anti(phi, f->name, side, true);
    return done(mk_probgeq(mk_forall(f->name, Type::nat(), phi), f->lhs->rl), {"CC0_Omega"});
  }
  if (rule == "R12") {
    // measurable collapse: Pr[ phi ] >=/<= lam  =>  Pr(A0) >=/<= lam
    if (f->kind != Formula::Kind::ProbGeq && f->kind != Formula::Kind::ProbLeq)
      throw RuleMismatch("R12 expects Pr[ phi ] >= lam or <= lam");
    if (!side.measurable_witness) throw SideConditionUnmet("measurability witness");
    if (!side.model) throw SideConditionUnmet("model for the measurability check");
    Env env;
    Value a0 = eval_expr(side.measurable_witness, *side.model, side.bounds, env);
    if (!side.model->in_algebra(a0.num))
      throw SideConditionUnmet("witness set is not in the algebra");
    std::uint64_t ts = truth_set(f->lhs, *side.model, side.bounds);
    if (ts != a0.num)
      throw SideConditionUnmet("witness set differs from the truth set of phi");
    CmpOp op = f->kind == Formula::Kind::ProbGeq ? CmpOp::Ge : CmpOp::Le;
    return done(mk_atomcmp(mk_prob(side.measurable_witness), op, f->rl), {});
  }
  if (rule == "R13") {
    // null-set weakening: Pr[ phi ] >= lam  =>  Pr[ psi ] >= lam
    if (f->kind != Formula::Kind::ProbGeq)
      throw RuleMismatch("R13 expects Pr[ phi ] >= lam");
    if (!side.weakened_to) throw SideConditionUnmet("weakening target psi");
    if (!side.null_set) throw SideConditionUnmet("null set A0");
    if (!side.model) throw SideConditionUnmet("model for the null-set check");
    Env env;
    Value a0 = eval_expr(side.null_set, *side.model, side.bounds, env);
    if (side.model->p(a0.num) != Rat(0)) throw SideConditionUnmet("P(A0) = 0");
    std::uint64_t phi_set = truth_set(f->lhs, *side.model, side.bounds);
    std::uint64_t psi_set = truth_set(side.weakened_to, *side.model, side.bounds);
    std::uint64_t outside = side.model->full() & ~a0.num;
    if ((phi_set & outside & ~psi_set) != 0)
      throw SideConditionUnmet("phi -> psi outside A0");
    return done(mk_probgeq(side.weakened_to, f->rl), {});
  }
  throw RuleMismatch("unknown rule " + rule);
}

// ---------------------------------------------------------------------------
// Schema instantiation: uniform boundedness and contra-collection
// ---------------------------------------------------------------------------

enum class SchemaSort { Omega, Ev };

inline const char* to_string(SchemaSort s) { return s == SchemaSort::Omega ? "Omega" : "S"; }

struct SchemaInstance {
  std::string principle;
  FormulaPtr rendered;
};

enum class UBMode { Restricted, Full };

namespace detail {

inline Type final_result(const Type& t) { return t.is_arrow() ? final_result(t.result()) : t; }

inline void check_betas(const std::vector<Type>& betas, SchemaSort sort) {
  Type want = sort == SchemaSort::Omega ? Type::omega() : Type::ev();
  for (const auto& b : betas)
    if (final_result(b) != want)
      throw TypeMismatch(want.to_string(), final_result(b).to_string(),
                         "schema parameter type (must end in the declared sort)");
}

}  // namespace detail

// phi_part has free variables k:0, x:alpha, z1..zj:betas, w:rho.
inline SchemaInstance instantiate_ub(const Type& rho, SchemaSort sort, const FormulaPtr& phi_part,
                                     const Type& alpha, const std::vector<Type>& betas,
                                     UBMode mode) {
  if (!is_pure_type(rho)) throw NotPure("rho must be a pure type, got " + rho.to_string());
  if (detail::final_result(alpha) != Type::nat())
    throw BadAlphaShape("alpha must end in sort 0, got " + alpha.to_string());
  detail::check_betas(betas, sort);
  if (mode == UBMode::Restricted) {
    FormulaClass c = formula_class(phi_part);
    if (c.value != FormulaClassValue::QuantifierFree &&
        c.value != FormulaClassValue::Existential)
      throw FormulaClassViolation("restricted mode needs an existential formula, got " +
                                  std::string(to_string(c.value)));
    for (const auto& q : c.type_report)
      if (!q.admissible)
        throw FormulaClassViolation("quantifier at inadmissible type " + q.type.to_string());
  }

  auto used = detail::all_names(phi_part);
  std::string y = detail::pick_fresh("y", used);
  std::string chi = detail::pick_fresh("chi", used);
  Type y_t = Type::arrow(alpha, Type::nat());
  Type chi_t = Type::arrow(rho, Type::nat());

  ExprPtr yk = mk_app(mk_var(y, y_t), mk_var("k", Type::nat()));
  ExprPtr min_x = mk_min(alpha, mk_var("x", alpha), yk);
  FormulaPtr phi_min = substitute(phi_part, "x", min_x);

  auto prefix = [&](FormulaPtr body) {
    for (std::size_t i = betas.size(); i-- > 0;)
      body = mk_forall("z" + std::to_string(i + 1), betas[i], std::move(body));
    body = mk_forall("x", alpha, std::move(body));
    return mk_forall("k", Type::nat(), std::move(body));
  };

  FormulaPtr premise = prefix(mk_exists("w", rho, phi_min));
  ExprPtr chik = mk_app(mk_var(chi, chi_t), mk_var("k", Type::nat()));
  FormulaPtr conclusion =
      mk_exists(chi, chi_t, prefix(mk_bexists("w", rho, chik, phi_min)));

  SchemaInstance out;
  out.principle = std::string("UB_") + (sort == SchemaSort::Omega ? "Omega" : "S") +
                  (mode == UBMode::Full ? "_full" : "") + "(" + rho.to_string() + ")";
  out.rendered = mk_forall(y, y_t, mk_implies(premise, conclusion));
  typecheck(out.rendered);
  return out;
}

// phi0 has free variables n:0 and z1..zj:betas.
inline SchemaInstance instantiate_cc(SchemaSort sort, const FormulaPtr& phi0,
                                     const std::vector<Type>& betas) {
  if (formula_class(phi0).value != FormulaClassValue::QuantifierFree)
    throw FormulaClassViolation("contra-collection needs a quantifier-free matrix");
  detail::check_betas(betas, sort);

  auto exs = [&](FormulaPtr body) {
    for (std::size_t i = betas.size(); i-- > 0;)
      body = mk_exists("z" + std::to_string(i + 1), betas[i], std::move(body));
    return body;
  };

  FormulaPtr premise = mk_forall(
      "k", Type::nat(),
      exs(mk_bforall("n", Type::nat(), mk_var("k", Type::nat()), phi0)));
  FormulaPtr conclusion = exs(mk_forall("n", Type::nat(), phi0));

  SchemaInstance out;
  out.principle = sort == SchemaSort::Omega ? "CC0_Omega" : "CC0_S";
  out.rendered = mk_implies(premise, conclusion);
  typecheck(out.rendered);
  return out;
}

// ---------------------------------------------------------------------------
// Sigma-additivity statement pair
// ---------------------------------------------------------------------------

// For A : Ev(0), returns
//   all l. Pr[ ex n. w in A n ] >= sum_{n=0}^{l} Pr((up A) n)
//   all k. ex l. Pr[ ex n. w in A n ] <= sum_{n=0}^{l} Pr((up A) n) + 2^-k
inline std::pair<FormulaPtr, FormulaPtr> sigma_additivity_statement(const ExprPtr& A) {
  TypeCtx ctx;
  Type t = typecheck_expr(A, ctx);
  if (t != detail::ev_seq_type())
    throw TypeMismatch("Ev(0)", t.to_string(), "sigma-additivity family");

  std::set<std::string> used = free_vars(A);
  used.insert(kSampleVar);
  std::string n = detail::pick_fresh("n", used);
  std::string l = detail::pick_fresh("l", used);
  std::string k = detail::pick_fresh("k", used);

  ExprPtr nv = mk_var(n, Type::nat());
  FormulaPtr event = mk_exists(
      n, Type::nat(), mk_atomin(mk_var(kSampleVar, Type::omega()), mk_app(A, nv)));
  RealPtr partial = mk_sum(n, mk_var(l, Type::nat()),
                           mk_prob(mk_app(mk_app(detail::up_const(), A), nv)));

  FormulaPtr lower = mk_forall(l, Type::nat(), mk_probgeq(event, partial));
  FormulaPtr upper = mk_forall(
      k, Type::nat(),
      mk_exists(l, Type::nat(),
                mk_probleq(event, mk_add(partial, mk_powhalf(mk_var(k, Type::nat()))))));
  return {lower, upper};
}

}  // namespace probmine
