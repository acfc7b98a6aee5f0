#pragma once

#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "probmine/ast.hpp"
#include "probmine/classify.hpp"
#include "probmine/typecheck.hpp"

namespace probmine {

struct UnsupportedNode : std::runtime_error {
  explicit UnsupportedNode(const std::string& what)
      : std::runtime_error("UnsupportedNode: " + what) {}
};

struct TypedVar {
  std::string name;
  Type type;
};

// ---------------------------------------------------------------------------
// Kuroda negative translation
// ---------------------------------------------------------------------------

namespace detail {

inline FormulaPtr kuroda_star(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::AtomNat:
    case Formula::Kind::AtomIn:
    case Formula::Kind::AtomCmp:
    case Formula::Kind::ProbGeq:
    case Formula::Kind::ProbLeq:
      return f;
    case Formula::Kind::Not:
      return mk_not(kuroda_star(f->lhs));
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return mk_bin(f->kind, kuroda_star(f->lhs), kuroda_star(f->rhs));
    case Formula::Kind::Exists:
      return mk_exists(f->name, f->var_type, kuroda_star(f->lhs));
    case Formula::Kind::BExists:
      return mk_bexists(f->name, f->var_type, f->b, kuroda_star(f->lhs));
    case Formula::Kind::Forall:
      return mk_forall(f->name, f->var_type, mk_not(mk_not(kuroda_star(f->lhs))));
    case Formula::Kind::BForall:
      return mk_bforall(f->name, f->var_type, f->b, mk_not(mk_not(kuroda_star(f->lhs))));
  }
  throw std::logic_error("kuroda: bad kind");
}

}  // namespace detail

inline FormulaPtr kuroda(const FormulaPtr& f) {
  return mk_not(mk_not(detail::kuroda_star(f)));
}

// ---------------------------------------------------------------------------
// Shared plumbing for Dialectica and modified realizability
// ---------------------------------------------------------------------------

namespace detail {

inline void collect_names(const FormulaPtr& f, std::set<std::string>& out);

inline void collect_names(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::Var || e->kind == Expr::Kind::Lam) out.insert(e->name);
  collect_names(e->a, out);
  collect_names(e->b, out);
}

inline void collect_names(const RealPtr& t, std::set<std::string>& out) {
  if (!t) return;
  if (t->kind == RealTerm::Kind::Var || t->kind == RealTerm::Kind::SeqAt ||
      t->kind == RealTerm::Kind::Sum)
    out.insert(t->name);
  collect_names(t->idx, out);
  collect_names(t->set, out);
  if (t->l) collect_names(t->l, out);
  if (t->r) collect_names(t->r, out);
}

inline void collect_names(const FormulaPtr& f, std::set<std::string>& out) {
  if (!f) return;
  if (!f->name.empty()) out.insert(f->name);
  collect_names(f->a, out);
  collect_names(f->b, out);
  collect_names(f->rl, out);
  collect_names(f->rr, out);
  collect_names(f->lhs, out);
  collect_names(f->rhs, out);
}

class NameGen {
 public:
  NameGen() = default;

  void seed(const std::set<std::string>& names) { used_.insert(names.begin(), names.end()); }

  std::string unique(const std::string& base) {
    if (!used_.count(base)) {
      used_.insert(base);
      return base;
    }
    std::string n = fresh_name(base, used_);
    used_.insert(n);
    return n;
  }

  static std::string capitalized(const std::string& s) {
    std::string r = s;
    if (!r.empty() && std::islower(static_cast<unsigned char>(r[0])))
      r[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(r[0])));
    return r;
  }

 private:
  std::set<std::string> used_;
};

inline Type curry_type(Type base, const std::vector<TypedVar>& deps) {
  for (auto it = deps.rbegin(); it != deps.rend(); ++it)
    base = Type::arrow(base, it->type);
  return base;
}

inline ExprPtr apply_var(const TypedVar& fn, const std::vector<TypedVar>& args) {
  ExprPtr e = mk_var(fn.name, fn.type);
  for (const auto& a : args) e = mk_app(e, mk_var(a.name, a.type));
  return e;
}

inline FormulaPtr absurd() { return mk_atomnat(mk_natlit(0), CmpOp::Eq, mk_natlit(1)); }

inline bool is_qf(const FormulaPtr& f) {
  return formula_class(f).value == FormulaClassValue::QuantifierFree;
}

inline FormulaPtr expand_bounded(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::AtomNat:
    case Formula::Kind::AtomIn:
    case Formula::Kind::AtomCmp:
      return f;
    case Formula::Kind::ProbGeq:
    case Formula::Kind::ProbLeq:
      throw UnsupportedNode("Pr[...] abbreviation; expand it first");
    case Formula::Kind::Not:
      return mk_not(expand_bounded(f->lhs));
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return mk_bin(f->kind, expand_bounded(f->lhs), expand_bounded(f->rhs));
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return mk_quant(f->kind, f->name, f->var_type, expand_bounded(f->lhs));
    case Formula::Kind::BForall: {
      if (f->var_type != Type::nat())
        throw UnsupportedNode("bounded quantifier at type " + f->var_type.to_string());
      FormulaPtr guard = mk_atomnat(mk_var(f->name, Type::nat()), CmpOp::Le, f->b);
      return mk_forall(f->name, f->var_type, mk_implies(guard, expand_bounded(f->lhs)));
    }
    case Formula::Kind::BExists: {
      if (f->var_type != Type::nat())
        throw UnsupportedNode("bounded quantifier at type " + f->var_type.to_string());
      FormulaPtr guard = mk_atomnat(mk_var(f->name, Type::nat()), CmpOp::Le, f->b);
      return mk_exists(f->name, f->var_type, mk_and(guard, expand_bounded(f->lhs)));
    }
  }
  throw std::logic_error("expand_bounded: bad kind");
}

// Rename binders so every bound variable of the formula is distinct from
// every other bound or free name; witness tuples then never clash.
inline FormulaPtr alpha_unique(const FormulaPtr& f, NameGen& gen) {
  switch (f->kind) {
    case Formula::Kind::AtomNat:
    case Formula::Kind::AtomIn:
    case Formula::Kind::AtomCmp:
      return f;
    case Formula::Kind::Not:
      return mk_not(alpha_unique(f->lhs, gen));
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return mk_bin(f->kind, alpha_unique(f->lhs, gen), alpha_unique(f->rhs, gen));
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      std::string n2 = gen.unique(f->name);
      FormulaPtr body = alpha_unique(f->lhs, gen);
      if (n2 != f->name) body = substitute(body, f->name, mk_var(n2, f->var_type));
      return mk_quant(f->kind, n2, f->var_type, body);
    }
    case Formula::Kind::BForall:
    case Formula::Kind::BExists: {
      std::string n2 = gen.unique(f->name);
      FormulaPtr body = alpha_unique(f->lhs, gen);
      if (n2 != f->name) body = substitute(body, f->name, mk_var(n2, f->var_type));
      return mk_bquant(f->kind, n2, f->var_type, f->b, body);
    }
    case Formula::Kind::ProbGeq:
    case Formula::Kind::ProbLeq:
      throw UnsupportedNode("Pr[...] abbreviation; expand it first");
  }
  throw std::logic_error("alpha_unique: bad kind");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dialectica
// ---------------------------------------------------------------------------

struct DialecticaForm {
  std::vector<TypedVar> exists_vars;
  std::vector<TypedVar> forall_vars;
  FormulaPtr matrix;
  FormulaPtr source;
};

namespace detail {

struct DiaResult {
  std::vector<TypedVar> ex, fa;
  FormulaPtr mat;
};

inline DiaResult dia(const FormulaPtr& f, NameGen& gen);

inline DiaResult dia_implies(const FormulaPtr& phi, const FormulaPtr& psi, NameGen& gen) {
  DiaResult A = dia(phi, gen);
  DiaResult B = dia(psi, gen);

  // witnesses U for psi's exists tuple, curried over A.ex
  std::vector<TypedVar> us;
  FormulaPtr bmat = B.mat;
  for (const auto& u : B.ex) {
    if (A.ex.empty()) {  // no currying: the alpha-unique name carries over
      us.push_back(u);
      continue;
    }
    Type t = curry_type(u.type, A.ex);
    TypedVar nu{gen.unique(NameGen::capitalized(u.name)), t};
    bmat = substitute(bmat, u.name, apply_var(nu, A.ex));
    us.push_back(nu);
  }
  // counter-witnesses Y for phi's forall tuple, curried over A.ex ++ B.fa
  std::vector<TypedVar> deps = A.ex;
  deps.insert(deps.end(), B.fa.begin(), B.fa.end());
  std::vector<TypedVar> ys;
  FormulaPtr amat = A.mat;
  for (const auto& y : A.fa) {
    if (deps.empty()) {
      ys.push_back(y);
      continue;
    }
    Type t = curry_type(y.type, deps);
    TypedVar ny{gen.unique(NameGen::capitalized(y.name)), t};
    amat = substitute(amat, y.name, apply_var(ny, deps));
    ys.push_back(ny);
  }

  DiaResult r;
  r.ex = us;
  r.ex.insert(r.ex.end(), ys.begin(), ys.end());
  r.fa = A.ex;
  r.fa.insert(r.fa.end(), B.fa.begin(), B.fa.end());
  r.mat = mk_implies(amat, bmat);
  return r;
}

inline DiaResult dia(const FormulaPtr& f, NameGen& gen) {
  if (is_qf(f)) return {{}, {}, f};
  switch (f->kind) {
    case Formula::Kind::Not:
      return dia_implies(f->lhs, absurd(), gen);
    case Formula::Kind::And: {
      DiaResult A = dia(f->lhs, gen);
      DiaResult B = dia(f->rhs, gen);
      DiaResult r;
      r.ex = A.ex;
      r.ex.insert(r.ex.end(), B.ex.begin(), B.ex.end());
      r.fa = A.fa;
      r.fa.insert(r.fa.end(), B.fa.begin(), B.fa.end());
      r.mat = mk_and(A.mat, B.mat);
      return r;
    }
    case Formula::Kind::Or: {
      DiaResult A = dia(f->lhs, gen);
      DiaResult B = dia(f->rhs, gen);
      TypedVar z{gen.unique("z"), Type::nat()};
      DiaResult r;
      r.ex.push_back(z);
      r.ex.insert(r.ex.end(), A.ex.begin(), A.ex.end());
      r.ex.insert(r.ex.end(), B.ex.begin(), B.ex.end());
      r.fa = A.fa;
      r.fa.insert(r.fa.end(), B.fa.begin(), B.fa.end());
      FormulaPtr zvar_is0 = mk_atomnat(mk_var(z.name, z.type), CmpOp::Eq, mk_natlit(0));
      FormulaPtr zvar_pos = mk_atomnat(mk_var(z.name, z.type), CmpOp::Gt, mk_natlit(0));
      r.mat = mk_and(mk_implies(zvar_is0, A.mat), mk_implies(zvar_pos, B.mat));
      return r;
    }
    case Formula::Kind::Implies:
      return dia_implies(f->lhs, f->rhs, gen);
    case Formula::Kind::Exists: {
      DiaResult A = dia(f->lhs, gen);
      DiaResult r;
      r.ex.push_back({f->name, f->var_type});
      r.ex.insert(r.ex.end(), A.ex.begin(), A.ex.end());
      r.fa = A.fa;
      r.mat = A.mat;
      return r;
    }
    case Formula::Kind::Forall: {
      DiaResult A = dia(f->lhs, gen);
      TypedVar zv{f->name, f->var_type};
      std::vector<TypedVar> deps{zv};
      DiaResult r;
      FormulaPtr mat = A.mat;
      for (const auto& xv : A.ex) {
        Type t = curry_type(xv.type, deps);
        TypedVar nx{gen.unique(NameGen::capitalized(xv.name)), t};
        mat = substitute(mat, xv.name, apply_var(nx, deps));
        r.ex.push_back(nx);
      }
      r.fa.push_back(zv);
      r.fa.insert(r.fa.end(), A.fa.begin(), A.fa.end());
      r.mat = mat;
      return r;
    }
    default:
      throw UnsupportedNode("dialectica on node kind");
  }
}

}  // namespace detail

inline DialecticaForm dialectica(const FormulaPtr& f) {
  FormulaPtr src = detail::expand_bounded(f);
  detail::NameGen gen;
  gen.seed(free_vars(src));
  src = detail::alpha_unique(src, gen);
  detail::DiaResult r = detail::dia(src, gen);
  return {r.ex, r.fa, r.mat, f};
}

inline FormulaPtr render(const DialecticaForm& d) {
  FormulaPtr out = d.matrix;
  for (auto it = d.forall_vars.rbegin(); it != d.forall_vars.rend(); ++it)
    out = mk_forall(it->name, it->type, out);
  for (auto it = d.exists_vars.rbegin(); it != d.exists_vars.rend(); ++it)
    out = mk_exists(it->name, it->type, out);
  return out;
}

// ---------------------------------------------------------------------------
// Modified realizability
// ---------------------------------------------------------------------------

struct MRForm {
  std::vector<TypedVar> witness_vars;
  FormulaPtr matrix;
  FormulaPtr source;
};

namespace detail {

struct MrResult {
  std::vector<TypedVar> wit;
  FormulaPtr mat;
};

inline MrResult mr(const FormulaPtr& f, NameGen& gen);

inline MrResult mr_implies(const FormulaPtr& phi, const FormulaPtr& psi, NameGen& gen) {
  MrResult A = mr(phi, gen);
  MrResult B = mr(psi, gen);
  std::vector<TypedVar> us;
  FormulaPtr bmat = B.mat;
  for (const auto& u : B.wit) {
    if (A.wit.empty()) {
      us.push_back(u);
      continue;
    }
    Type t = curry_type(u.type, A.wit);
    TypedVar nu{gen.unique(NameGen::capitalized(u.name)), t};
    bmat = substitute(bmat, u.name, apply_var(nu, A.wit));
    us.push_back(nu);
  }
  FormulaPtr mat = mk_implies(A.mat, bmat);
  for (auto it = A.wit.rbegin(); it != A.wit.rend(); ++it)
    mat = mk_forall(it->name, it->type, mat);
  return {us, mat};
}

inline MrResult mr(const FormulaPtr& f, NameGen& gen) {
  if (is_qf(f)) return {{}, f};
  switch (f->kind) {
    case Formula::Kind::Not:
      return mr_implies(f->lhs, absurd(), gen);
    case Formula::Kind::And: {
      MrResult A = mr(f->lhs, gen);
      MrResult B = mr(f->rhs, gen);
      MrResult r;
      r.wit = A.wit;
      r.wit.insert(r.wit.end(), B.wit.begin(), B.wit.end());
      r.mat = mk_and(A.mat, B.mat);
      return r;
    }
    case Formula::Kind::Or: {
      MrResult A = mr(f->lhs, gen);
      MrResult B = mr(f->rhs, gen);
      TypedVar z{gen.unique("z"), Type::nat()};
      MrResult r;
      r.wit.push_back(z);
      r.wit.insert(r.wit.end(), A.wit.begin(), A.wit.end());
      r.wit.insert(r.wit.end(), B.wit.begin(), B.wit.end());
      FormulaPtr z0 = mk_atomnat(mk_var(z.name, z.type), CmpOp::Eq, mk_natlit(0));
      FormulaPtr zpos = mk_atomnat(mk_var(z.name, z.type), CmpOp::Gt, mk_natlit(0));
      r.mat = mk_and(mk_implies(z0, A.mat), mk_implies(zpos, B.mat));
      return r;
    }
    case Formula::Kind::Implies:
      return mr_implies(f->lhs, f->rhs, gen);
    case Formula::Kind::Exists: {
      MrResult A = mr(f->lhs, gen);
      MrResult r;
      r.wit.push_back({f->name, f->var_type});
      r.wit.insert(r.wit.end(), A.wit.begin(), A.wit.end());
      r.mat = A.mat;
      return r;
    }
    case Formula::Kind::Forall: {
      MrResult A = mr(f->lhs, gen);
      TypedVar zv{f->name, f->var_type};
      std::vector<TypedVar> deps{zv};
      MrResult r;
      FormulaPtr mat = A.mat;
      for (const auto& xv : A.wit) {
        Type t = curry_type(xv.type, deps);
        TypedVar nx{gen.unique(NameGen::capitalized(xv.name)), t};
        mat = substitute(mat, xv.name, apply_var(nx, deps));
        r.wit.push_back(nx);
      }
      r.mat = mk_forall(zv.name, zv.type, mat);
      return r;
    }
    default:
      throw UnsupportedNode("modified realizability on node kind");
  }
}

}  // namespace detail

inline MRForm modified_realizability(const FormulaPtr& f) {
  FormulaPtr src = detail::expand_bounded(f);
  detail::NameGen gen;
  gen.seed(free_vars(src));
  src = detail::alpha_unique(src, gen);
  detail::MrResult r = detail::mr(src, gen);
  return {r.wit, r.mat, f};
}

inline FormulaPtr render(const MRForm& m) {
  FormulaPtr out = m.matrix;
  for (auto it = m.witness_vars.rbegin(); it != m.witness_vars.rend(); ++it)
    out = mk_exists(it->name, it->type, out);
  return out;
}

}  // namespace probmine
