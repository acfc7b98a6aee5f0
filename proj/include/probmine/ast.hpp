#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "probmine/rational.hpp"
#include "probmine/types.hpp"

namespace probmine {

struct Expr;
struct RealTerm;
struct Formula;
using ExprPtr = std::shared_ptr<const Expr>;
using RealPtr = std::shared_ptr<const RealTerm>;
using FormulaPtr = std::shared_ptr<const Formula>;

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

struct Expr {
  enum class Kind {
    Var,      // name, var_type
    Const,    // name, var_type (declared signature)
    App,      // a b
    Lam,      // name, var_type (bound var), a (body)
    NatLit,   // nat
    Min,      // min(a, b), var_type = operand type
    Union,    // a \/ b
    Compl,    // a^c
    Empty,    // empty set
    SetLit,   // {atoms...} literal subset of the sample space
  };

  Kind kind;
  std::string name;
  Type var_type;
  ExprPtr a, b;
  std::uint64_t nat = 0;
  std::vector<std::string> atoms;  // SetLit
};

inline ExprPtr mk_var(std::string name, Type t) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Var;
  e->name = std::move(name);
  e->var_type = std::move(t);
  return e;
}
inline ExprPtr mk_const(std::string name, Type t) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Const;
  e->name = std::move(name);
  e->var_type = std::move(t);
  return e;
}
inline ExprPtr mk_app(ExprPtr f, ExprPtr x) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::App;
  e->a = std::move(f);
  e->b = std::move(x);
  return e;
}
inline ExprPtr mk_lam(std::string v, Type t, ExprPtr body) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Lam;
  e->name = std::move(v);
  e->var_type = std::move(t);
  e->a = std::move(body);
  return e;
}
inline ExprPtr mk_natlit(std::uint64_t n) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::NatLit;
  e->nat = n;
  return e;
}
inline ExprPtr mk_min(Type t, ExprPtr x, ExprPtr y) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Min;
  e->var_type = std::move(t);
  e->a = std::move(x);
  e->b = std::move(y);
  return e;
}
inline ExprPtr mk_union(ExprPtr x, ExprPtr y) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Union;
  e->a = std::move(x);
  e->b = std::move(y);
  return e;
}
inline ExprPtr mk_compl(ExprPtr x) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Compl;
  e->a = std::move(x);
  return e;
}
inline ExprPtr mk_empty() {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Empty;
  return e;
}
inline ExprPtr mk_setlit(std::vector<std::string> atoms) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::SetLit;
  e->atoms = std::move(atoms);
  return e;
}

// ---------------------------------------------------------------------------
// Real-valued terms (exact rational sub-language)
// ---------------------------------------------------------------------------

struct RealTerm {
  enum class Kind {
    RatLit,   // rat
    Var,      // name ("lam" is the conventional free parameter)
    SeqAt,    // name[idx] for a real sequence variable of type R(0)
    Prob,     // Pr(set)
    Add,      // l + r
    Sub,      // l - r
    Min,      // min(l, r)
    PowHalf,  // 2^-idx
    Sum,      // sum(binder, upto, body) = body[binder:=0] + ... + body[binder:=upto]
  };

  Kind kind;
  Rat rat;
  std::string name;  // Var, SeqAt, Sum binder
  ExprPtr idx;       // SeqAt index, PowHalf exponent, Sum upper bound
  ExprPtr set;       // Prob
  RealPtr l, r;      // Add/Sub/Min; l is the Sum body
};

inline RealPtr mk_ratlit(Rat v) {
  auto t = std::make_shared<RealTerm>();
  t->kind = RealTerm::Kind::RatLit;
  t->rat = std::move(v);
  return t;
}
inline RealPtr mk_realvar(std::string name) {
  auto t = std::make_shared<RealTerm>();
  t->kind = RealTerm::Kind::Var;
  t->name = std::move(name);
  return t;
}
inline RealPtr mk_seqat(std::string name, ExprPtr idx) {
  auto t = std::make_shared<RealTerm>();
  t->kind = RealTerm::Kind::SeqAt;
  t->name = std::move(name);
  t->idx = std::move(idx);
  return t;
}
inline RealPtr mk_prob(ExprPtr set) {
  auto t = std::make_shared<RealTerm>();
  t->kind = RealTerm::Kind::Prob;
  t->set = std::move(set);
  return t;
}
inline RealPtr mk_rbin(RealTerm::Kind k, RealPtr l, RealPtr r) {
  auto t = std::make_shared<RealTerm>();
  t->kind = k;
  t->l = std::move(l);
  t->r = std::move(r);
  return t;
}
inline RealPtr mk_add(RealPtr l, RealPtr r) { return mk_rbin(RealTerm::Kind::Add, std::move(l), std::move(r)); }
inline RealPtr mk_sub(RealPtr l, RealPtr r) { return mk_rbin(RealTerm::Kind::Sub, std::move(l), std::move(r)); }
inline RealPtr mk_rmin(RealPtr l, RealPtr r) { return mk_rbin(RealTerm::Kind::Min, std::move(l), std::move(r)); }
inline RealPtr mk_powhalf(ExprPtr idx) {
  auto t = std::make_shared<RealTerm>();
  t->kind = RealTerm::Kind::PowHalf;
  t->idx = std::move(idx);
  return t;
}
inline RealPtr mk_sum(std::string binder, ExprPtr upto, RealPtr body) {
  auto t = std::make_shared<RealTerm>();
  t->kind = RealTerm::Kind::Sum;
  t->name = std::move(binder);
  t->idx = std::move(upto);
  t->l = std::move(body);
  return t;
}

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

enum class CmpOp { Lt, Le, Eq, Ge, Gt };

inline const char* cmp_to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

inline CmpOp cmp_negate(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Eq: return CmpOp::Eq;  // callers wrap =-atoms in Not instead
    case CmpOp::Ge: return CmpOp::Lt;
    case CmpOp::Gt: return CmpOp::Le;
  }
  return op;
}

struct Formula {
  enum class Kind {
    AtomNat,   // a op b at type 0 (op Eq prints =0)
    AtomIn,    // a in b, a:Om, b:Ev
    AtomCmp,   // rl op rr over real terms
    Not,
    And,
    Or,
    Implies,
    Forall,    // name, var_type, lhs
    Exists,
    BForall,   // name, var_type, bound, lhs
    BExists,
    ProbGeq,   // Pr[ lhs ] >= lam, implicit sample variable "w":Om
    ProbLeq,   // Pr[ lhs ] <= lam
  };

  Kind kind;
  CmpOp op = CmpOp::Eq;
  ExprPtr a, b;        // atom operands / quantifier bound (b)
  RealPtr rl, rr;      // AtomCmp operands; rl doubles as ProbGeq/ProbLeq lam
  std::string name;    // quantifier variable
  Type var_type;
  FormulaPtr lhs, rhs; // connective children / quantifier & Pr bodies (lhs)
};

inline FormulaPtr mk_atomnat(ExprPtr a, CmpOp op, ExprPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::AtomNat;
  f->op = op;
  f->a = std::move(a);
  f->b = std::move(b);
  return f;
}
inline FormulaPtr mk_atomin(ExprPtr w, ExprPtr set) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::AtomIn;
  f->a = std::move(w);
  f->b = std::move(set);
  return f;
}
inline FormulaPtr mk_atomcmp(RealPtr l, CmpOp op, RealPtr r) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::AtomCmp;
  f->op = op;
  f->rl = std::move(l);
  f->rr = std::move(r);
  return f;
}
inline FormulaPtr mk_not(FormulaPtr g) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Not;
  f->lhs = std::move(g);
  return f;
}
inline FormulaPtr mk_bin(Formula::Kind k, FormulaPtr l, FormulaPtr r) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}
inline FormulaPtr mk_and(FormulaPtr l, FormulaPtr r) { return mk_bin(Formula::Kind::And, std::move(l), std::move(r)); }
inline FormulaPtr mk_or(FormulaPtr l, FormulaPtr r) { return mk_bin(Formula::Kind::Or, std::move(l), std::move(r)); }
inline FormulaPtr mk_implies(FormulaPtr l, FormulaPtr r) { return mk_bin(Formula::Kind::Implies, std::move(l), std::move(r)); }
inline FormulaPtr mk_quant(Formula::Kind k, std::string v, Type t, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->name = std::move(v);
  f->var_type = std::move(t);
  f->lhs = std::move(body);
  return f;
}
inline FormulaPtr mk_forall(std::string v, Type t, FormulaPtr body) {
  return mk_quant(Formula::Kind::Forall, std::move(v), std::move(t), std::move(body));
}
inline FormulaPtr mk_exists(std::string v, Type t, FormulaPtr body) {
  return mk_quant(Formula::Kind::Exists, std::move(v), std::move(t), std::move(body));
}
inline FormulaPtr mk_bquant(Formula::Kind k, std::string v, Type t, ExprPtr bound, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->name = std::move(v);
  f->var_type = std::move(t);
  f->b = std::move(bound);
  f->lhs = std::move(body);
  return f;
}
inline FormulaPtr mk_bforall(std::string v, Type t, ExprPtr bound, FormulaPtr body) {
  return mk_bquant(Formula::Kind::BForall, std::move(v), std::move(t), std::move(bound), std::move(body));
}
inline FormulaPtr mk_bexists(std::string v, Type t, ExprPtr bound, FormulaPtr body) {
  return mk_bquant(Formula::Kind::BExists, std::move(v), std::move(t), std::move(bound), std::move(body));
}
inline FormulaPtr mk_probgeq(FormulaPtr body, RealPtr lam) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::ProbGeq;
  f->lhs = std::move(body);
  f->rl = std::move(lam);
  return f;
}
inline FormulaPtr mk_probleq(FormulaPtr body, RealPtr lam) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::ProbLeq;
  f->lhs = std::move(body);
  f->rl = std::move(lam);
  return f;
}

// The distinguished sample variable of the Pr[ ... ] abbreviation.
inline const std::string kSampleVar = "w";

// ---------------------------------------------------------------------------
// Structural equality
// ---------------------------------------------------------------------------

inline bool ast_equal(const ExprPtr& x, const ExprPtr& y);
inline bool ast_equal(const RealPtr& x, const RealPtr& y);
inline bool ast_equal(const FormulaPtr& x, const FormulaPtr& y);

inline bool ast_equal(const ExprPtr& x, const ExprPtr& y) {
  if (!x || !y) return !x && !y;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case Expr::Kind::Var:
    case Expr::Kind::Const:
      return x->name == y->name && x->var_type == y->var_type;
    case Expr::Kind::App:
    case Expr::Kind::Union:
      return ast_equal(x->a, y->a) && ast_equal(x->b, y->b);
    case Expr::Kind::Lam:
      return x->name == y->name && x->var_type == y->var_type && ast_equal(x->a, y->a);
    case Expr::Kind::NatLit:
      return x->nat == y->nat;
    case Expr::Kind::Min:
      return x->var_type == y->var_type && ast_equal(x->a, y->a) && ast_equal(x->b, y->b);
    case Expr::Kind::Compl:
      return ast_equal(x->a, y->a);
    case Expr::Kind::Empty:
      return true;
    case Expr::Kind::SetLit:
      return x->atoms == y->atoms;
  }
  return false;
}

inline bool ast_equal(const RealPtr& x, const RealPtr& y) {
  if (!x || !y) return !x && !y;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case RealTerm::Kind::RatLit:
      return x->rat == y->rat;
    case RealTerm::Kind::Var:
      return x->name == y->name;
    case RealTerm::Kind::SeqAt:
      return x->name == y->name && ast_equal(x->idx, y->idx);
    case RealTerm::Kind::Prob:
      return ast_equal(x->set, y->set);
    case RealTerm::Kind::Add:
    case RealTerm::Kind::Sub:
    case RealTerm::Kind::Min:
      return ast_equal(x->l, y->l) && ast_equal(x->r, y->r);
    case RealTerm::Kind::PowHalf:
      return ast_equal(x->idx, y->idx);
    case RealTerm::Kind::Sum:
      return x->name == y->name && ast_equal(x->idx, y->idx) && ast_equal(x->l, y->l);
  }
  return false;
}

inline bool ast_equal(const FormulaPtr& x, const FormulaPtr& y) {
  if (!x || !y) return !x && !y;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case Formula::Kind::AtomNat:
      return x->op == y->op && ast_equal(x->a, y->a) && ast_equal(x->b, y->b);
    case Formula::Kind::AtomIn:
      return ast_equal(x->a, y->a) && ast_equal(x->b, y->b);
    case Formula::Kind::AtomCmp:
      return x->op == y->op && ast_equal(x->rl, y->rl) && ast_equal(x->rr, y->rr);
    case Formula::Kind::Not:
      return ast_equal(x->lhs, y->lhs);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return ast_equal(x->lhs, y->lhs) && ast_equal(x->rhs, y->rhs);
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return x->name == y->name && x->var_type == y->var_type && ast_equal(x->lhs, y->lhs);
    case Formula::Kind::BForall:
    case Formula::Kind::BExists:
      return x->name == y->name && x->var_type == y->var_type && ast_equal(x->b, y->b) &&
             ast_equal(x->lhs, y->lhs);
    case Formula::Kind::ProbGeq:
    case Formula::Kind::ProbLeq:
      return ast_equal(x->lhs, y->lhs) && ast_equal(x->rl, y->rl);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Free variables
// ---------------------------------------------------------------------------

inline void free_vars(const ExprPtr& e, std::set<std::string>& bound, std::set<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case Expr::Kind::Var:
      if (!bound.count(e->name)) out.insert(e->name);
      break;
    case Expr::Kind::Const:
    case Expr::Kind::NatLit:
    case Expr::Kind::Empty:
    case Expr::Kind::SetLit:
      break;
    case Expr::Kind::App:
    case Expr::Kind::Union:
    case Expr::Kind::Min:
      free_vars(e->a, bound, out);
      free_vars(e->b, bound, out);
      break;
    case Expr::Kind::Compl:
      free_vars(e->a, bound, out);
      break;
    case Expr::Kind::Lam: {
      bool was = bound.count(e->name) > 0;
      bound.insert(e->name);
      free_vars(e->a, bound, out);
      if (!was) bound.erase(e->name);
      break;
    }
  }
}

inline void free_vars(const RealPtr& t, std::set<std::string>& bound, std::set<std::string>& out) {
  if (!t) return;
  switch (t->kind) {
    case RealTerm::Kind::RatLit:
      break;
    case RealTerm::Kind::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      break;
    case RealTerm::Kind::SeqAt:
      if (!bound.count(t->name)) out.insert(t->name);
      free_vars(t->idx, bound, out);
      break;
    case RealTerm::Kind::Prob:
      free_vars(t->set, bound, out);
      break;
    case RealTerm::Kind::Add:
    case RealTerm::Kind::Sub:
    case RealTerm::Kind::Min:
      free_vars(t->l, bound, out);
      free_vars(t->r, bound, out);
      break;
    case RealTerm::Kind::PowHalf:
      free_vars(t->idx, bound, out);
      break;
    case RealTerm::Kind::Sum: {
      free_vars(t->idx, bound, out);
      bool was = bound.count(t->name) > 0;
      bound.insert(t->name);
      free_vars(t->l, bound, out);
      if (!was) bound.erase(t->name);
      break;
    }
  }
}

inline void free_vars(const FormulaPtr& f, std::set<std::string>& bound, std::set<std::string>& out) {
  if (!f) return;
  switch (f->kind) {
    case Formula::Kind::AtomNat:
    case Formula::Kind::AtomIn:
      free_vars(f->a, bound, out);
      free_vars(f->b, bound, out);
      break;
    case Formula::Kind::AtomCmp:
      free_vars(f->rl, bound, out);
      free_vars(f->rr, bound, out);
      break;
    case Formula::Kind::Not:
      free_vars(f->lhs, bound, out);
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      free_vars(f->lhs, bound, out);
      free_vars(f->rhs, bound, out);
      break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      bool was = bound.count(f->name) > 0;
      bound.insert(f->name);
      free_vars(f->lhs, bound, out);
      if (!was) bound.erase(f->name);
      break;
    }
    case Formula::Kind::BForall:
    case Formula::Kind::BExists: {
      free_vars(f->b, bound, out);
      bool was = bound.count(f->name) > 0;
      bound.insert(f->name);
      free_vars(f->lhs, bound, out);
      if (!was) bound.erase(f->name);
      break;
    }
    case Formula::Kind::ProbGeq:
    case Formula::Kind::ProbLeq: {
      free_vars(f->rl, bound, out);
      bool was = bound.count(kSampleVar) > 0;
      bound.insert(kSampleVar);
      free_vars(f->lhs, bound, out);
      if (!was) bound.erase(kSampleVar);
      break;
    }
  }
}

template <class Node>
inline std::set<std::string> free_vars(const std::shared_ptr<const Node>& n) {
  std::set<std::string> bound, out;
  free_vars(n, bound, out);
  return out;
}

}  // namespace probmine
