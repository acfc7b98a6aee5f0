#pragma once

#include <set>
#include <sstream>
#include <string>

#include "probmine/ast.hpp"

namespace probmine {

// Canonical printer. Output is golden-file stable and reparses to a
// structurally identical AST. Free variables are printed with a type
// annotation (name:type); bound occurrences are printed bare.

namespace detail {

class Printer {
 public:
  std::string print(const FormulaPtr& f) {
    std::ostringstream os;
    formula(os, f, 0);
    return os.str();
  }
  std::string print(const ExprPtr& e) {
    std::ostringstream os;
    expr(os, e, 0);
    return os.str();
  }
  std::string print(const RealPtr& t) {
    std::ostringstream os;
    real(os, t, 0);
    return os.str();
  }

 private:
  std::set<std::string> bound_;

  struct Scope {
    Printer& p;
    std::string name;
    bool was;
    Scope(Printer& pr, const std::string& n) : p(pr), name(n) {
      was = p.bound_.count(n) > 0;
      p.bound_.insert(n);
    }
    ~Scope() {
      if (!was) p.bound_.erase(name);
    }
  };

  static const char* natop(CmpOp op) {
    switch (op) {
      case CmpOp::Lt: return "<0";
      case CmpOp::Le: return "<=0";
      case CmpOp::Eq: return "=0";
      case CmpOp::Ge: return ">=0";
      case CmpOp::Gt: return ">0";
    }
    return "?";
  }

  // Formula precedence: 0 implies, 1 or, 2 and, 3 unary, 4 atom.
  void formula(std::ostringstream& os, const FormulaPtr& f, int prec) {
    switch (f->kind) {
      case Formula::Kind::Implies: {
        bool par = prec > 0;
        if (par) os << "(";
        formula(os, f->lhs, 1);
        os << " -> ";
        formula(os, f->rhs, 0);
        if (par) os << ")";
        break;
      }
      case Formula::Kind::Or: {
        bool par = prec > 1;
        if (par) os << "(";
        formula(os, f->lhs, 1);
        os << " | ";
        formula(os, f->rhs, 2);
        if (par) os << ")";
        break;
      }
      case Formula::Kind::And: {
        bool par = prec > 2;
        if (par) os << "(";
        formula(os, f->lhs, 2);
        os << " & ";
        formula(os, f->rhs, 3);
        if (par) os << ")";
        break;
      }
      case Formula::Kind::Not: {
        bool par = prec > 3;
        if (par) os << "(";
        os << "!";
        formula(os, f->lhs, 4);
        if (par) os << ")";
        break;
      }
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        // The body extends maximally to the right, so a quantifier is
        // parenthesized except in tail position (prec 0).
        bool par = prec > 0;
        if (par) os << "(";
        os << (f->kind == Formula::Kind::Forall ? "all " : "ex ");
        os << f->name << ":" << f->var_type.to_string() << ". ";
        {
          Scope s(*this, f->name);
          formula(os, f->lhs, 0);
        }
        if (par) os << ")";
        break;
      }
      case Formula::Kind::BForall:
      case Formula::Kind::BExists: {
        bool par = prec > 0;
        if (par) os << "(";
        os << (f->kind == Formula::Kind::BForall ? "all " : "ex ");
        os << f->name << " <= ";
        expr(os, f->b, 3);
        os << " : " << f->var_type.to_string() << ". ";
        {
          Scope s(*this, f->name);
          formula(os, f->lhs, 0);
        }
        if (par) os << ")";
        break;
      }
      case Formula::Kind::AtomNat:
        expr(os, f->a, 3);
        os << " " << natop(f->op) << " ";
        expr(os, f->b, 3);
        break;
      case Formula::Kind::AtomIn:
        expr(os, f->a, 3);
        os << " in ";
        expr(os, f->b, 3);
        break;
      case Formula::Kind::AtomCmp:
        real(os, f->rl, 1);
        os << " " << cmp_to_string(f->op) << " ";
        real(os, f->rr, 1);
        break;
      case Formula::Kind::ProbGeq:
      case Formula::Kind::ProbLeq: {
        os << "Pr[ ";
        {
          Scope s(*this, kSampleVar);
          formula(os, f->lhs, 0);
        }
        os << " ] " << (f->kind == Formula::Kind::ProbGeq ? ">=" : "<=") << " ";
        real(os, f->rl, 1);
        break;
      }
    }
  }

  // Expr precedence: 0 union/lambda, 1 complement, 2 application, 3 primary.
  void expr(std::ostringstream& os, const ExprPtr& e, int prec) {
    switch (e->kind) {
      case Expr::Kind::Union: {
        bool par = prec > 0;
        if (par) os << "(";
        expr(os, e->a, 0);
        os << " \\/ ";
        expr(os, e->b, 1);
        if (par) os << ")";
        break;
      }
      case Expr::Kind::Lam: {
        bool par = prec > 0;
        if (par) os << "(";
        os << "\\" << e->name << ":" << e->var_type.to_string() << ". ";
        {
          Scope s(*this, e->name);
          expr(os, e->a, 0);
        }
        if (par) os << ")";
        break;
      }
      case Expr::Kind::Compl: {
        bool par = prec > 1;
        if (par) os << "(";
        expr(os, e->a, 1);
        os << "^c";
        if (par) os << ")";
        break;
      }
      case Expr::Kind::App: {
        bool par = prec > 2;
        if (par) os << "(";
        expr(os, e->a, 2);
        os << " ";
        expr(os, e->b, 3);
        if (par) os << ")";
        break;
      }
      case Expr::Kind::Var:
        os << e->name;
        if (!bound_.count(e->name)) os << ":" << e->var_type.to_string();
        break;
      case Expr::Kind::Const:
        os << e->name;
        break;
      case Expr::Kind::NatLit:
        os << e->nat;
        break;
      case Expr::Kind::Min:
        os << "min(";
        expr(os, e->a, 0);
        os << ", ";
        expr(os, e->b, 0);
        os << ")";
        break;
      case Expr::Kind::Empty:
        os << "empty";
        break;
      case Expr::Kind::SetLit: {
        os << "{";
        bool first = true;
        for (const auto& a : e->atoms) {
          if (!first) os << " ";
          os << a;
          first = false;
        }
        os << "}";
        break;
      }
    }
  }

  // Real precedence: 0 add/sub, 1 primary.
  void real(std::ostringstream& os, const RealPtr& t, int prec) {
    switch (t->kind) {
      case RealTerm::Kind::Add:
      case RealTerm::Kind::Sub: {
        bool par = prec > 0;
        if (par) os << "(";
        real(os, t->l, 0);
        os << (t->kind == RealTerm::Kind::Add ? " + " : " - ");
        real(os, t->r, 1);
        if (par) os << ")";
        break;
      }
      case RealTerm::Kind::RatLit:
        os << rat_to_string(t->rat);
        break;
      case RealTerm::Kind::Var:
        os << t->name;
        break;
      case RealTerm::Kind::SeqAt:
        os << t->name << "[";
        expr(os, t->idx, 0);
        os << "]";
        break;
      case RealTerm::Kind::Prob:
        os << "Pr(";
        expr(os, t->set, 0);
        os << ")";
        break;
      case RealTerm::Kind::Min:
        os << "min(";
        real(os, t->l, 0);
        os << ", ";
        real(os, t->r, 0);
        os << ")";
        break;
      case RealTerm::Kind::PowHalf:
        os << "2^-";
        expr(os, t->idx, 3);
        break;
      case RealTerm::Kind::Sum: {
        os << "sum(" << t->name << ", ";
        expr(os, t->idx, 0);
        os << ", ";
        {
          Scope s(*this, t->name);
          real(os, t->l, 0);
        }
        os << ")";
        break;
      }
    }
  }
};

}  // namespace detail

inline std::string print_formula(const FormulaPtr& f) { return detail::Printer{}.print(f); }
inline std::string print_expr(const ExprPtr& e) { return detail::Printer{}.print(e); }
inline std::string print_real(const RealPtr& t) { return detail::Printer{}.print(t); }

}  // namespace probmine
