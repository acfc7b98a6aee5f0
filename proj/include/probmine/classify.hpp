#pragma once

#include <optional>
#include <string>
#include <vector>

#include "probmine/ast.hpp"
#include "probmine/typecheck.hpp"

namespace probmine {

// ---------------------------------------------------------------------------
// Formula classification
// ---------------------------------------------------------------------------

enum class FormulaClassValue { QuantifierFree, Existential, Universal, General };

inline const char* to_string(FormulaClassValue v) {
  switch (v) {
    case FormulaClassValue::QuantifierFree: return "quantifier-free";
    case FormulaClassValue::Existential: return "existential";
    case FormulaClassValue::Universal: return "universal";
    case FormulaClassValue::General: return "general";
  }
  return "?";
}

struct QuantOccurrence {
  std::string quantifier;  // "all", "ex", "all<=", "ex<="
  Type type;
  bool small = false;
  bool admissible = false;
};

struct FormulaClass {
  FormulaClassValue value = FormulaClassValue::General;
  std::vector<QuantOccurrence> type_report;
};

namespace detail {

struct ClassFlags {
  bool qf, ex, univ;
};

inline ClassFlags class_flags(const FormulaPtr& f, std::vector<QuantOccurrence>& report) {
  auto record = [&](const char* q, const Type& t) {
    auto c = classify_type(t);
    report.push_back({q, t, c.is_small, c.is_admissible});
  };
  switch (f->kind) {
    case Formula::Kind::AtomNat:
    case Formula::Kind::AtomIn:
    case Formula::Kind::AtomCmp:
      return {true, true, true};
    case Formula::Kind::Not: {
      // negation is only admitted inside quantifier-free parts
      ClassFlags c = class_flags(f->lhs, report);
      return {c.qf, c.qf, c.qf};
    }
    case Formula::Kind::Implies: {
      ClassFlags a = class_flags(f->lhs, report);
      ClassFlags b = class_flags(f->rhs, report);
      bool qf = a.qf && b.qf;
      return {qf, qf, qf};
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      ClassFlags a = class_flags(f->lhs, report);
      ClassFlags b = class_flags(f->rhs, report);
      return {a.qf && b.qf, a.ex && b.ex, a.univ && b.univ};
    }
    case Formula::Kind::Forall: {
      record("all", f->var_type);
      ClassFlags c = class_flags(f->lhs, report);
      return {false, false, c.univ};
    }
    case Formula::Kind::Exists: {
      record("ex", f->var_type);
      ClassFlags c = class_flags(f->lhs, report);
      return {false, c.ex, false};
    }
    case Formula::Kind::BForall: {
      record("all<=", f->var_type);
      if (f->var_type == Type::nat()) return class_flags(f->lhs, report);
      ClassFlags c = class_flags(f->lhs, report);
      return {false, false, c.univ};
    }
    case Formula::Kind::BExists: {
      record("ex<=", f->var_type);
      if (f->var_type == Type::nat()) return class_flags(f->lhs, report);
      ClassFlags c = class_flags(f->lhs, report);
      return {false, c.ex, false};
    }
    case Formula::Kind::ProbGeq:
    case Formula::Kind::ProbLeq: {
      class_flags(f->lhs, report);
      return {false, false, false};
    }
  }
  return {false, false, false};
}

}  // namespace detail

inline FormulaClass formula_class(const FormulaPtr& f) {
  FormulaClass out;
  auto c = detail::class_flags(f, out.type_report);
  if (c.qf) out.value = FormulaClassValue::QuantifierFree;
  else if (c.ex) out.value = FormulaClassValue::Existential;
  else if (c.univ) out.value = FormulaClassValue::Universal;
  else out.value = FormulaClassValue::General;
  return out;
}

// ---------------------------------------------------------------------------
// De Morgan dual
// ---------------------------------------------------------------------------

inline FormulaPtr demorgan_dual(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::AtomNat:
      if (f->op == CmpOp::Eq) return mk_not(f);
      return mk_atomnat(f->a, cmp_negate(f->op), f->b);
    case Formula::Kind::AtomIn:
      return mk_not(f);
    case Formula::Kind::AtomCmp:
      if (f->op == CmpOp::Eq) return mk_not(f);
      return mk_atomcmp(f->rl, cmp_negate(f->op), f->rr);
    case Formula::Kind::Not:
      return f->lhs;
    case Formula::Kind::And:
      return mk_or(demorgan_dual(f->lhs), demorgan_dual(f->rhs));
    case Formula::Kind::Or:
      return mk_and(demorgan_dual(f->lhs), demorgan_dual(f->rhs));
    case Formula::Kind::Implies:
      // via the classical reading !a | b
      return mk_and(f->lhs, demorgan_dual(f->rhs));
    case Formula::Kind::Forall:
      return mk_exists(f->name, f->var_type, demorgan_dual(f->lhs));
    case Formula::Kind::Exists:
      return mk_forall(f->name, f->var_type, demorgan_dual(f->lhs));
    case Formula::Kind::BForall:
      return mk_bexists(f->name, f->var_type, f->b, demorgan_dual(f->lhs));
    case Formula::Kind::BExists:
      return mk_bforall(f->name, f->var_type, f->b, demorgan_dual(f->lhs));
    case Formula::Kind::ProbGeq:
    case Formula::Kind::ProbLeq:
      return mk_not(f);
  }
  throw std::logic_error("demorgan_dual: bad kind");
}

// ---------------------------------------------------------------------------
// Monotonicity verdicts
// ---------------------------------------------------------------------------

enum class MonoDir { Monotone, AntiMonotone, Unknown };
enum class MonoEvidence { Syntactic, Annotated, SemanticallyChecked, None };

struct MonotoneVerdict {
  MonoDir direction = MonoDir::Unknown;
  MonoEvidence evidence = MonoEvidence::None;
  std::string detail;  // syntactic rule name or model id
};

namespace detail {

enum class MonoLat { Mono, Anti, Const, Unknown };

inline MonoLat mono_join(MonoLat a, MonoLat b) {
  if (a == MonoLat::Const) return b;
  if (b == MonoLat::Const) return a;
  if (a == b) return a;
  return MonoLat::Unknown;
}

inline MonoLat mono_flip(MonoLat a) {
  if (a == MonoLat::Mono) return MonoLat::Anti;
  if (a == MonoLat::Anti) return MonoLat::Mono;
  return a;
}

// Closed syntactic rule list: widening-bounded-exists, widening-bounded-forall,
// positive comparison occurrence, congruence through conjunction/disjunction
// (bounded type-0 quantifiers count as finite conjunctions/disjunctions).
inline MonoLat mono_syn(const FormulaPtr& f, const std::string& x, std::string& rule) {
  if (!free_vars(f).count(x)) return MonoLat::Const;
  switch (f->kind) {
    case Formula::Kind::BExists: {
      bool bound_is_x = f->b->kind == Expr::Kind::Var && f->b->name == x;
      if (bound_is_x && f->name != x && !free_vars(f->lhs).count(x)) {
        rule = "widening-bounded-ex";
        return MonoLat::Mono;
      }
      if (f->name == x) return MonoLat::Unknown;
      if (free_vars(f->b).count(x)) return MonoLat::Unknown;
      if (f->var_type != Type::nat()) return MonoLat::Unknown;
      MonoLat c = mono_syn(f->lhs, x, rule);
      if (c != MonoLat::Unknown && rule.empty()) rule = "congruence";
      return c;
    }
    case Formula::Kind::BForall: {
      bool bound_is_x = f->b->kind == Expr::Kind::Var && f->b->name == x;
      if (bound_is_x && f->name != x && !free_vars(f->lhs).count(x)) {
        rule = "widening-bounded-all";
        return MonoLat::Anti;
      }
      if (f->name == x) return MonoLat::Unknown;
      if (free_vars(f->b).count(x)) return MonoLat::Unknown;
      if (f->var_type != Type::nat()) return MonoLat::Unknown;
      MonoLat c = mono_syn(f->lhs, x, rule);
      if (c != MonoLat::Unknown && rule.empty()) rule = "congruence";
      return c;
    }
    case Formula::Kind::AtomNat: {
      bool lx = f->a->kind == Expr::Kind::Var && f->a->name == x;
      bool rx = f->b->kind == Expr::Kind::Var && f->b->name == x;
      bool l_has = free_vars(f->a).count(x) > 0;
      bool r_has = free_vars(f->b).count(x) > 0;
      if (lx && !r_has && (f->op == CmpOp::Le || f->op == CmpOp::Lt)) {
        rule = "comparison";
        return MonoLat::Anti;
      }
      if (rx && !l_has && (f->op == CmpOp::Le || f->op == CmpOp::Lt)) {
        rule = "comparison";
        return MonoLat::Mono;
      }
      if (lx && !r_has && (f->op == CmpOp::Ge || f->op == CmpOp::Gt)) {
        rule = "comparison";
        return MonoLat::Mono;
      }
      if (rx && !l_has && (f->op == CmpOp::Ge || f->op == CmpOp::Gt)) {
        rule = "comparison";
        return MonoLat::Anti;
      }
      return MonoLat::Unknown;
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::string r1, r2;
      MonoLat a = mono_syn(f->lhs, x, r1);
      MonoLat b = mono_syn(f->rhs, x, r2);
      MonoLat j = mono_join(a, b);
      if (j != MonoLat::Unknown) rule = "congruence";
      return j;
    }
    case Formula::Kind::Not: {
      std::string r;
      MonoLat a = mono_syn(f->lhs, x, r);
      if (a != MonoLat::Unknown && a != MonoLat::Const) rule = "congruence";
      return mono_flip(a);
    }
    default:
      return MonoLat::Unknown;
  }
}

}  // namespace detail

// Syntactic/annotated monotonicity. The oracle-backed variant lives with the
// model evaluator (rewrite.hpp) since it needs a ContentSpace.
inline MonotoneVerdict monotonicity_syntactic(const FormulaPtr& f, const std::string& x,
                                              std::optional<MonoDir> hint = std::nullopt) {
  std::string rule;
  detail::MonoLat v = detail::mono_syn(f, x, rule);
  if (v == detail::MonoLat::Mono || v == detail::MonoLat::Const)
    return {MonoDir::Monotone, MonoEvidence::Syntactic, rule.empty() ? "constant" : rule};
  if (v == detail::MonoLat::Anti)
    return {MonoDir::AntiMonotone, MonoEvidence::Syntactic, rule};
  if (hint) return {*hint, MonoEvidence::Annotated, "annotation"};
  return {MonoDir::Unknown, MonoEvidence::None, ""};
}

}  // namespace probmine
