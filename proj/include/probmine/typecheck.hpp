#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "probmine/ast.hpp"

namespace probmine {

struct TypeMismatch : std::runtime_error {
  TypeMismatch(const std::string& expected, const std::string& found, const std::string& where)
      : std::runtime_error("TypeMismatch: expected " + expected + ", found " + found + " in " + where) {}
};

struct ArityError : std::runtime_error {
  explicit ArityError(const std::string& where)
      : std::runtime_error("ArityError: non-function applied in " + where) {}
};

using TypeCtx = std::map<std::string, Type>;

inline Type typecheck_expr(const ExprPtr& e, TypeCtx& ctx);
inline void typecheck_real(const RealPtr& t, TypeCtx& ctx);
inline void typecheck_formula(const FormulaPtr& f, TypeCtx& ctx);

inline Type typecheck_expr(const ExprPtr& e, TypeCtx& ctx) {
  switch (e->kind) {
    case Expr::Kind::Var: {
      auto it = ctx.find(e->name);
      if (it != ctx.end()) {
        if (it->second != e->var_type)
          throw TypeMismatch(it->second.to_string(), e->var_type.to_string(), "variable " + e->name);
      } else {
        ctx[e->name] = e->var_type;
      }
      if (e->var_type == Type::real() ||
          (e->var_type.is_arrow() && e->var_type.result() == Type::real()))
        throw TypeMismatch("a finite type", e->var_type.to_string(),
                           "variable " + e->name + " (real-sort variables live in real terms)");
      return e->var_type;
    }
    case Expr::Kind::Const:
      return e->var_type;
    case Expr::Kind::App: {
      Type f = typecheck_expr(e->a, ctx);
      Type x = typecheck_expr(e->b, ctx);
      if (!f.is_arrow()) throw ArityError("application of " + f.to_string());
      if (f.argument() != x)
        throw TypeMismatch(f.argument().to_string(), x.to_string(), "application argument");
      return f.result();
    }
    case Expr::Kind::Lam: {
      auto old = ctx.find(e->name) != ctx.end() ? std::optional<Type>(ctx[e->name]) : std::nullopt;
      ctx[e->name] = e->var_type;
      Type body = typecheck_expr(e->a, ctx);
      if (old) ctx[e->name] = *old; else ctx.erase(e->name);
      return Type::arrow(body, e->var_type);
    }
    case Expr::Kind::NatLit:
      return Type::nat();
    case Expr::Kind::Min: {
      Type a = typecheck_expr(e->a, ctx);
      Type b = typecheck_expr(e->b, ctx);
      if (a != e->var_type) throw TypeMismatch(e->var_type.to_string(), a.to_string(), "min");
      if (b != e->var_type) throw TypeMismatch(e->var_type.to_string(), b.to_string(), "min");
      return e->var_type;
    }
    case Expr::Kind::Union: {
      Type a = typecheck_expr(e->a, ctx);
      Type b = typecheck_expr(e->b, ctx);
      if (a != Type::ev()) throw TypeMismatch("Ev", a.to_string(), "union");
      if (b != Type::ev()) throw TypeMismatch("Ev", b.to_string(), "union");
      return Type::ev();
    }
    case Expr::Kind::Compl: {
      Type a = typecheck_expr(e->a, ctx);
      if (a != Type::ev()) throw TypeMismatch("Ev", a.to_string(), "complement");
      return Type::ev();
    }
    case Expr::Kind::Empty:
    case Expr::Kind::SetLit:
      return Type::ev();
  }
  throw std::logic_error("typecheck_expr: bad kind");
}

inline void typecheck_real(const RealPtr& t, TypeCtx& ctx) {
  switch (t->kind) {
    case RealTerm::Kind::RatLit:
      return;
    case RealTerm::Kind::Var: {
      auto it = ctx.find(t->name);
      if (it != ctx.end() && it->second != Type::real())
        throw TypeMismatch("R", it->second.to_string(), "real variable " + t->name);
      if (it == ctx.end()) ctx[t->name] = Type::real();
      return;
    }
    case RealTerm::Kind::SeqAt: {
      Type seq = Type::arrow(Type::real(), Type::nat());
      auto it = ctx.find(t->name);
      if (it != ctx.end() && it->second != seq)
        throw TypeMismatch("R(0)", it->second.to_string(), "real sequence " + t->name);
      if (it == ctx.end()) ctx[t->name] = seq;
      Type i = typecheck_expr(t->idx, ctx);
      if (i != Type::nat()) throw TypeMismatch("0", i.to_string(), "sequence index");
      return;
    }
    case RealTerm::Kind::Prob: {
      Type s = typecheck_expr(t->set, ctx);
      if (s != Type::ev()) throw TypeMismatch("Ev", s.to_string(), "Pr argument");
      return;
    }
    case RealTerm::Kind::Add:
    case RealTerm::Kind::Sub:
    case RealTerm::Kind::Min:
      typecheck_real(t->l, ctx);
      typecheck_real(t->r, ctx);
      return;
    case RealTerm::Kind::PowHalf: {
      Type i = typecheck_expr(t->idx, ctx);
      if (i != Type::nat()) throw TypeMismatch("0", i.to_string(), "2^- exponent");
      return;
    }
    case RealTerm::Kind::Sum: {
      Type u = typecheck_expr(t->idx, ctx);
      if (u != Type::nat()) throw TypeMismatch("0", u.to_string(), "sum upper bound");
      auto old = ctx.find(t->name) != ctx.end() ? std::optional<Type>(ctx[t->name]) : std::nullopt;
      ctx[t->name] = Type::nat();
      typecheck_real(t->l, ctx);
      if (old) ctx[t->name] = *old; else ctx.erase(t->name);
      return;
    }
  }
}

inline void typecheck_formula(const FormulaPtr& f, TypeCtx& ctx) {
  switch (f->kind) {
    case Formula::Kind::AtomNat: {
      Type a = typecheck_expr(f->a, ctx);
      Type b = typecheck_expr(f->b, ctx);
      if (a != Type::nat()) throw TypeMismatch("0", a.to_string(), "nat atom");
      if (b != Type::nat()) throw TypeMismatch("0", b.to_string(), "nat atom");
      return;
    }
    case Formula::Kind::AtomIn: {
      Type a = typecheck_expr(f->a, ctx);
      Type b = typecheck_expr(f->b, ctx);
      if (a != Type::omega()) throw TypeMismatch("Om", a.to_string(), "'in' left operand");
      if (b != Type::ev()) throw TypeMismatch("Ev", b.to_string(), "'in' right operand");
      return;
    }
    case Formula::Kind::AtomCmp:
      typecheck_real(f->rl, ctx);
      typecheck_real(f->rr, ctx);
      return;
    case Formula::Kind::Not:
      typecheck_formula(f->lhs, ctx);
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      typecheck_formula(f->lhs, ctx);
      typecheck_formula(f->rhs, ctx);
      return;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      auto old = ctx.find(f->name) != ctx.end() ? std::optional<Type>(ctx[f->name]) : std::nullopt;
      ctx[f->name] = f->var_type;
      typecheck_formula(f->lhs, ctx);
      if (old) ctx[f->name] = *old; else ctx.erase(f->name);
      return;
    }
    case Formula::Kind::BForall:
    case Formula::Kind::BExists: {
      Type b = typecheck_expr(f->b, ctx);
      if (b != f->var_type)
        throw TypeMismatch(f->var_type.to_string(), b.to_string(), "quantifier bound");
      auto old = ctx.find(f->name) != ctx.end() ? std::optional<Type>(ctx[f->name]) : std::nullopt;
      ctx[f->name] = f->var_type;
      typecheck_formula(f->lhs, ctx);
      if (old) ctx[f->name] = *old; else ctx.erase(f->name);
      return;
    }
    case Formula::Kind::ProbGeq:
    case Formula::Kind::ProbLeq: {
      typecheck_real(f->rl, ctx);
      auto old = ctx.find(kSampleVar) != ctx.end() ? std::optional<Type>(ctx[kSampleVar]) : std::nullopt;
      ctx[kSampleVar] = Type::omega();
      typecheck_formula(f->lhs, ctx);
      if (old) ctx[kSampleVar] = *old; else ctx.erase(kSampleVar);
      // The sample variable is the only free Om variable of the body.
      for (const auto& v : free_vars(f->lhs)) {
        if (v == kSampleVar) continue;
        auto it = ctx.find(v);
        if (it != ctx.end() && it->second == Type::omega())
          throw TypeMismatch("a non-sample sort", "Om",
                             "free variable " + v + " of a Pr[...] body");
      }
      return;
    }
  }
}

inline void typecheck(const FormulaPtr& f, TypeCtx ctx = {}) { typecheck_formula(f, ctx); }
inline Type typecheck(const ExprPtr& e, TypeCtx ctx = {}) { return typecheck_expr(e, ctx); }

// ---------------------------------------------------------------------------
// Capture-avoiding substitution
// ---------------------------------------------------------------------------

inline std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string cand = base + "'";
  for (int i = 0; i < 8 && avoid.count(cand); ++i) cand += "'";
  for (unsigned long k = 0; avoid.count(cand); ++k) cand = base + "_" + std::to_string(k);
  return cand;
}

inline ExprPtr subst_expr(const ExprPtr& e, const std::string& x, const ExprPtr& t);
inline RealPtr subst_real(const RealPtr& r, const std::string& x, const ExprPtr& t);
inline FormulaPtr substitute(const FormulaPtr& f, const std::string& x, const ExprPtr& t);

inline ExprPtr rename_expr_var(const ExprPtr& e, const std::string& from, const std::string& to,
                               const Type& ty) {
  return subst_expr(e, from, mk_var(to, ty));
}

inline ExprPtr subst_expr(const ExprPtr& e, const std::string& x, const ExprPtr& t) {
  switch (e->kind) {
    case Expr::Kind::Var:
      return e->name == x ? t : e;
    case Expr::Kind::Const:
    case Expr::Kind::NatLit:
    case Expr::Kind::Empty:
    case Expr::Kind::SetLit:
      return e;
    case Expr::Kind::App:
      return mk_app(subst_expr(e->a, x, t), subst_expr(e->b, x, t));
    case Expr::Kind::Union:
      return mk_union(subst_expr(e->a, x, t), subst_expr(e->b, x, t));
    case Expr::Kind::Min:
      return mk_min(e->var_type, subst_expr(e->a, x, t), subst_expr(e->b, x, t));
    case Expr::Kind::Compl:
      return mk_compl(subst_expr(e->a, x, t));
    case Expr::Kind::Lam: {
      if (e->name == x) return e;
      auto tf = free_vars(t);
      if (tf.count(e->name)) {
        auto avoid = tf;
        for (const auto& v : free_vars(e->a)) avoid.insert(v);
        avoid.insert(x);
        std::string nn = fresh_name(e->name, avoid);
        ExprPtr body = rename_expr_var(e->a, e->name, nn, e->var_type);
        return mk_lam(nn, e->var_type, subst_expr(body, x, t));
      }
      return mk_lam(e->name, e->var_type, subst_expr(e->a, x, t));
    }
  }
  throw std::logic_error("subst_expr: bad kind");
}

inline RealPtr subst_real(const RealPtr& r, const std::string& x, const ExprPtr& t) {
  switch (r->kind) {
    case RealTerm::Kind::RatLit:
    case RealTerm::Kind::Var:
      return r;
    case RealTerm::Kind::SeqAt:
      return mk_seqat(r->name, subst_expr(r->idx, x, t));
    case RealTerm::Kind::Prob:
      return mk_prob(subst_expr(r->set, x, t));
    case RealTerm::Kind::Add:
    case RealTerm::Kind::Sub:
    case RealTerm::Kind::Min:
      return mk_rbin(r->kind, subst_real(r->l, x, t), subst_real(r->r, x, t));
    case RealTerm::Kind::PowHalf:
      return mk_powhalf(subst_expr(r->idx, x, t));
    case RealTerm::Kind::Sum: {
      ExprPtr upto = subst_expr(r->idx, x, t);
      if (r->name == x) return mk_sum(r->name, upto, r->l);
      auto tf = free_vars(t);
      if (tf.count(r->name)) {
        auto avoid = tf;
        for (const auto& v : free_vars(r->l)) avoid.insert(v);
        avoid.insert(x);
        std::string nn = fresh_name(r->name, avoid);
        RealPtr body = subst_real(r->l, r->name, mk_var(nn, Type::nat()));
        return mk_sum(nn, upto, subst_real(body, x, t));
      }
      return mk_sum(r->name, upto, subst_real(r->l, x, t));
    }
  }
  throw std::logic_error("subst_real: bad kind");
}

inline FormulaPtr substitute(const FormulaPtr& f, const std::string& x, const ExprPtr& t) {
  switch (f->kind) {
    case Formula::Kind::AtomNat:
      return mk_atomnat(subst_expr(f->a, x, t), f->op, subst_expr(f->b, x, t));
    case Formula::Kind::AtomIn:
      return mk_atomin(subst_expr(f->a, x, t), subst_expr(f->b, x, t));
    case Formula::Kind::AtomCmp:
      return mk_atomcmp(subst_real(f->rl, x, t), f->op, subst_real(f->rr, x, t));
    case Formula::Kind::Not:
      return mk_not(substitute(f->lhs, x, t));
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return mk_bin(f->kind, substitute(f->lhs, x, t), substitute(f->rhs, x, t));
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      if (f->name == x) return f;
      auto tf = free_vars(t);
      if (tf.count(f->name)) {
        auto avoid = tf;
        for (const auto& v : free_vars(f->lhs)) avoid.insert(v);
        avoid.insert(x);
        std::string nn = fresh_name(f->name, avoid);
        FormulaPtr body = substitute(f->lhs, f->name, mk_var(nn, f->var_type));
        return mk_quant(f->kind, nn, f->var_type, substitute(body, x, t));
      }
      return mk_quant(f->kind, f->name, f->var_type, substitute(f->lhs, x, t));
    }
    case Formula::Kind::BForall:
    case Formula::Kind::BExists: {
      ExprPtr bound = subst_expr(f->b, x, t);
      if (f->name == x) return mk_bquant(f->kind, f->name, f->var_type, bound, f->lhs);
      auto tf = free_vars(t);
      if (tf.count(f->name)) {
        auto avoid = tf;
        for (const auto& v : free_vars(f->lhs)) avoid.insert(v);
        avoid.insert(x);
        std::string nn = fresh_name(f->name, avoid);
        FormulaPtr body = substitute(f->lhs, f->name, mk_var(nn, f->var_type));
        return mk_bquant(f->kind, nn, f->var_type, bound, substitute(body, x, t));
      }
      return mk_bquant(f->kind, f->name, f->var_type, bound, substitute(f->lhs, x, t));
    }
    case Formula::Kind::ProbGeq:
    case Formula::Kind::ProbLeq: {
      RealPtr lam = subst_real(f->rl, x, t);
      FormulaPtr body = f->lhs;
      if (x != kSampleVar) {
        // The sample variable is an implicit binder; t must not capture it.
        if (free_vars(t).count(kSampleVar))
          throw std::invalid_argument("substitute: term would capture the sample variable");
        body = substitute(f->lhs, x, t);
      }
      auto g = std::make_shared<Formula>();
      g->kind = f->kind;
      g->lhs = body;
      g->rl = lam;
      return g;
    }
  }
  throw std::logic_error("substitute: bad kind");
}

}  // namespace probmine
