#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "probmine/ast.hpp"
#include "probmine/expand.hpp"
#include "probmine/modulus.hpp"
#include "probmine/typecheck.hpp"

namespace probmine {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct NotAnAlgebra : std::runtime_error {
  explicit NotAnAlgebra(const std::string& s) : std::runtime_error("NotAnAlgebra: " + s) {}
};
struct NotAdditive : std::runtime_error {
  explicit NotAdditive(const std::string& s) : std::runtime_error("NotAdditive: " + s) {}
};
struct BoundsExceeded : std::runtime_error {
  explicit BoundsExceeded(const std::string& s) : std::runtime_error("BoundsExceeded: " + s) {}
};
struct UnsupportedQuantifierType : std::runtime_error {
  explicit UnsupportedQuantifierType(const std::string& s)
      : std::runtime_error("UnsupportedQuantifierType: " + s) {}
};
struct NotMeasurable : std::runtime_error {
  explicit NotMeasurable(const std::string& s) : std::runtime_error("NotMeasurable: " + s) {}
};
struct HorizonExceeded : std::runtime_error {
  explicit HorizonExceeded(const std::string& s) : std::runtime_error("HorizonExceeded: " + s) {}
};
struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& s) : std::runtime_error("ModelError: " + s) {}
};

// ---------------------------------------------------------------------------
// Finite content space: a finite sample space, a set algebra over it given as
// bitmasks, and an exact rational content on the algebra.
// ---------------------------------------------------------------------------

struct ContentSpace {
  std::string id = "model";
  std::vector<std::string> omega;        // atom names; atom i = bit i
  std::vector<std::uint64_t> algebra;    // sorted, duplicate-free masks
  std::map<std::uint64_t, Rat> prob;     // defined exactly on the algebra

  std::uint64_t full() const {
    return omega.size() == 64 ? ~0ull : ((1ull << omega.size()) - 1);
  }
  bool in_algebra(std::uint64_t mask) const {
    return std::binary_search(algebra.begin(), algebra.end(), mask);
  }
  std::size_t algebra_index(std::uint64_t mask) const {
    auto it = std::lower_bound(algebra.begin(), algebra.end(), mask);
    if (it == algebra.end() || *it != mask)
      throw NotMeasurable(id + ": set " + set_to_string(mask) + " is not in the algebra");
    return static_cast<std::size_t>(it - algebra.begin());
  }
  Rat p(std::uint64_t mask) const {
    auto it = prob.find(mask);
    if (it == prob.end())
      throw NotMeasurable(id + ": set " + set_to_string(mask) + " is not in the algebra");
    return it->second;
  }
  std::size_t atom_index(const std::string& name) const {
    for (std::size_t i = 0; i < omega.size(); ++i)
      if (omega[i] == name) return i;
    throw ModelError(id + ": unknown sample point '" + name + "'");
  }
  std::string set_to_string(std::uint64_t mask) const {
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < omega.size(); ++i)
      if (mask >> i & 1) {
        if (!first) out += " ";
        out += omega[i];
        first = false;
      }
    return out + "}";
  }

  void validate() const {
    if (omega.empty() || omega.size() > 16) throw ModelError(id + ": need 1..16 sample points");
    if (!in_algebra(0) || !in_algebra(full()))
      throw NotAnAlgebra(id + ": the empty set and the whole space must be present");
    for (auto a : algebra) {
      if (a & ~full()) throw ModelError(id + ": set outside the sample space");
      if (!in_algebra(full() & ~a))
        throw NotAnAlgebra(id + ": missing complement of " + set_to_string(a));
      for (auto b : algebra)
        if (!in_algebra(a | b))
          throw NotAnAlgebra(id + ": missing union of " + set_to_string(a) + " and " + set_to_string(b));
    }
    for (auto a : algebra)
      if (!prob.count(a)) throw NotAdditive(id + ": no probability for " + set_to_string(a));
    if (p(0) != Rat(0)) throw NotAdditive(id + ": P(empty) must be 0");
    if (p(full()) != Rat(1)) throw NotAdditive(id + ": P(omega) must be 1");
    for (auto a : algebra) {
      Rat pa = p(a);
      if (pa < Rat(0) || pa > Rat(1)) throw NotAdditive(id + ": probability out of [0,1]");
      for (auto b : algebra) {
        if (a & b) continue;
        if (p(a | b) != pa + p(b))
          throw NotAdditive(id + ": P(" + set_to_string(a) + " u " + set_to_string(b) +
                            ") != P(A) + P(B)");
      }
    }
  }

  static ContentSpace powerset(std::string id, std::vector<std::pair<std::string, Rat>> atoms) {
    ContentSpace m;
    m.id = std::move(id);
    std::vector<Rat> ap;
    for (auto& [n, r] : atoms) {
      m.omega.push_back(n);
      ap.push_back(r);
    }
    std::uint64_t n = 1ull << m.omega.size();
    for (std::uint64_t mask = 0; mask < n; ++mask) {
      m.algebra.push_back(mask);
      Rat s(0);
      for (std::size_t i = 0; i < ap.size(); ++i)
        if (mask >> i & 1) s += ap[i];
      m.prob[mask] = s;
    }
    m.validate();
    return m;
  }

  static ContentSpace subalgebra(std::string id, std::vector<std::string> atoms,
                                 std::vector<std::pair<std::vector<std::string>, Rat>> sets,
                                 std::vector<std::vector<std::string>> unmeasured = {}) {
    ContentSpace m;
    m.id = std::move(id);
    m.omega = std::move(atoms);
    auto add = [&](std::uint64_t mask, std::optional<Rat> r) {
      if (!std::count(m.algebra.begin(), m.algebra.end(), mask)) m.algebra.push_back(mask);
      if (r) m.prob[mask] = *r;
    };
    add(0, Rat(0));
    add(m.full(), Rat(1));
    for (auto& [names, r] : sets) {
      std::uint64_t mask = 0;
      for (auto& nm : names) mask |= 1ull << m.atom_index(nm);
      add(mask, r);
    }
    for (auto& names : unmeasured) {
      std::uint64_t mask = 0;
      for (auto& nm : names) mask |= 1ull << m.atom_index(nm);
      add(mask, std::nullopt);
    }
    // close under complement and union, deriving probabilities where possible
    bool changed = true;
    while (changed) {
      changed = false;
      auto snapshot = m.algebra;
      for (auto a : snapshot) {
        std::uint64_t ca = m.full() & ~a;
        if (!std::count(m.algebra.begin(), m.algebra.end(), ca)) {
          m.algebra.push_back(ca);
          changed = true;
        }
        if (m.prob.count(a) && !m.prob.count(ca)) {
          m.prob[ca] = Rat(1) - m.prob[a];
          changed = true;
        }
        for (auto b : snapshot) {
          std::uint64_t u = a | b;
          if (!std::count(m.algebra.begin(), m.algebra.end(), u)) {
            m.algebra.push_back(u);
            changed = true;
          }
          if (!(a & b) && m.prob.count(a) && m.prob.count(b) && !m.prob.count(u)) {
            m.prob[u] = m.prob[a] + m.prob[b];
            changed = true;
          }
        }
      }
    }
    std::sort(m.algebra.begin(), m.algebra.end());
    m.validate();
    return m;
  }
};

// ---------------------------------------------------------------------------
// Evaluation bounds
// ---------------------------------------------------------------------------

struct EvalBounds {
  std::uint64_t nat_bound = 3;             // quantified type-0 variables range over 0..nat_bound
  std::uint64_t fun_dom = 3, fun_ran = 3;  // type-0 positions inside arrow domains/ranges
  std::vector<Rat> grid = {Rat(0), Rat(1, 4), Rat(1, 2), Rat(3, 4), Rat(1)};
  std::size_t space_cap = 200000;          // largest enumerable quantifier domain
};

// The smallest strictly positive margin that separates any two distinct values
// expressible from the model's probabilities; adding it to the grid makes
// "for all mu > 0" statements exact on the finite model.
inline Rat mu_min(const ContentSpace& m) {
  long long l = 1;
  for (const auto& [mask, r] : m.prob) l = std::lcm(l, r.denominator());
  return Rat(1, 2 * l);
}

inline std::vector<Rat> model_grid(const ContentSpace& m, const EvalBounds& base = {}) {
  std::vector<Rat> g = base.grid;
  for (const auto& [mask, r] : m.prob) g.push_back(r);
  // the offset must be below the resolution of every grid point, not just of
  // the model's probabilities, so that lambda +/- mu comparisons stay exact
  long long l = 1;
  for (const auto& r : g) l = std::lcm(l, r.denominator());
  Rat mu = Rat(1, 2 * l);
  std::vector<Rat> withmu = g;
  for (const auto& r : g) {
    withmu.push_back(r + mu);
    if (r >= mu) withmu.push_back(r - mu);
  }
  withmu.push_back(mu);
  // probability thresholds live in [0,1]; points outside cannot be separated
  // by any representable mu and are dropped
  std::erase_if(withmu, [](const Rat& r) { return r < Rat(0) || r > Rat(1); });
  std::sort(withmu.begin(), withmu.end());
  withmu.erase(std::unique(withmu.begin(), withmu.end()), withmu.end());
  return withmu;
}

// ---------------------------------------------------------------------------
// Values and enumeration
// ---------------------------------------------------------------------------

struct Value {
  enum class Kind { Nat, Sample, Set, Real, Fun };
  Kind kind = Kind::Nat;
  std::uint64_t num = 0;  // Nat value / Sample atom index / Set mask
  Rat r;
  Type type;              // Fun only: the arrow type
  std::vector<Value> table;

  static Value nat(std::uint64_t n) { Value v; v.kind = Kind::Nat; v.num = n; return v; }
  static Value sample(std::uint64_t i) { Value v; v.kind = Kind::Sample; v.num = i; return v; }
  static Value set(std::uint64_t mask) { Value v; v.kind = Kind::Set; v.num = mask; return v; }
  static Value real(Rat x) { Value v; v.kind = Kind::Real; v.r = std::move(x); return v; }
  static Value fun(Type t, std::vector<Value> tab) {
    Value v; v.kind = Kind::Fun; v.type = std::move(t); v.table = std::move(tab); return v;
  }
};

using Env = std::map<std::string, Value>;

namespace detail {

enum class NatRole { Quant, FunArg, FunRes };

inline std::size_t domain_size(const Type& t, const ContentSpace& m, const EvalBounds& b,
                               NatRole role) {
  switch (t.kind()) {
    case Type::Kind::Nat:
      return static_cast<std::size_t>((role == NatRole::Quant   ? b.nat_bound
                                       : role == NatRole::FunArg ? b.fun_dom
                                                                 : b.fun_ran) + 1);
    case Type::Kind::Omega:
      return m.omega.size();
    case Type::Kind::Ev:
      return m.algebra.size();
    case Type::Kind::Real:
      return b.grid.size();
    case Type::Kind::Arrow: {
      std::size_t d = domain_size(t.argument(), m, b, NatRole::FunArg);
      std::size_t r = domain_size(t.result(), m, b, NatRole::FunRes);
      std::size_t total = 1;
      for (std::size_t i = 0; i < d; ++i) {
        if (total > b.space_cap / (r ? r : 1))
          throw BoundsExceeded("function space " + t.to_string() + " exceeds the cap");
        total *= r;
      }
      return total;
    }
  }
  throw std::logic_error("domain_size: bad kind");
}

inline Value value_at(const Type& t, std::size_t idx, const ContentSpace& m, const EvalBounds& b,
                      NatRole role) {
  switch (t.kind()) {
    case Type::Kind::Nat:
      return Value::nat(idx);
    case Type::Kind::Omega:
      return Value::sample(idx);
    case Type::Kind::Ev:
      return Value::set(m.algebra[idx]);
    case Type::Kind::Real:
      return Value::real(b.grid[idx]);
    case Type::Kind::Arrow: {
      std::size_t d = domain_size(t.argument(), m, b, NatRole::FunArg);
      std::size_t r = domain_size(t.result(), m, b, NatRole::FunRes);
      std::vector<Value> tab;
      tab.reserve(d);
      for (std::size_t i = 0; i < d; ++i) {
        tab.push_back(value_at(t.result(), idx % r, m, b, NatRole::FunRes));
        idx /= r;
      }
      return Value::fun(t, std::move(tab));
    }
  }
  throw std::logic_error("value_at: bad kind");
}

// Index of a value inside the enumeration of its type; for Nat/Sample this is
// just the number, which lets applications reach into larger env-supplied
// tables than the quantifier bounds would generate.
inline std::size_t raw_index(const Value& v, const ContentSpace& m, const EvalBounds& b) {
  switch (v.kind) {
    case Value::Kind::Nat:
    case Value::Kind::Sample:
      return static_cast<std::size_t>(v.num);
    case Value::Kind::Set:
      return m.algebra_index(v.num);
    case Value::Kind::Real: {
      for (std::size_t i = 0; i < b.grid.size(); ++i)
        if (b.grid[i] == v.r) return i;
      throw BoundsExceeded("real value off the evaluation grid");
    }
    case Value::Kind::Fun: {
      std::size_t d = domain_size(v.type.argument(), m, b, NatRole::FunArg);
      std::size_t r = domain_size(v.type.result(), m, b, NatRole::FunRes);
      if (v.table.size() != d)
        throw BoundsExceeded("higher-order argument with a non-canonical table");
      std::size_t idx = 0, base = 1;
      for (std::size_t i = 0; i < d; ++i) {
        std::size_t digit = raw_index(v.table[i], m, b);
        if (digit >= r) throw BoundsExceeded("higher-order argument outside the range bound");
        idx += digit * base;
        base *= r;
      }
      return idx;
    }
  }
  throw std::logic_error("raw_index: bad kind");
}

inline Type value_type(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Nat: return Type::nat();
    case Value::Kind::Sample: return Type::omega();
    case Value::Kind::Set: return Type::ev();
    case Value::Kind::Real: return Type::real();
    case Value::Kind::Fun: return v.type;
  }
  throw std::logic_error("value_type: bad kind");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Disjointification: B_n = A_n \ (A_0 u ... u A_{n-1})
// ---------------------------------------------------------------------------

inline std::vector<std::uint64_t> disjointify(const std::vector<std::uint64_t>& sets) {
  std::vector<std::uint64_t> out;
  std::uint64_t seen = 0;
  for (auto a : sets) {
    out.push_back(a & ~seen);
    seen |= a;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

inline Value eval_expr(const ExprPtr& e, const ContentSpace& m, const EvalBounds& b, Env& env);
inline Rat eval_real(const RealPtr& t, const ContentSpace& m, const EvalBounds& b, Env& env);
inline bool eval_formula(const FormulaPtr& f, const ContentSpace& m, const EvalBounds& b, Env& env);

namespace detail {

struct ScopedBind {
  Env& env;
  std::string name;
  std::optional<Value> old;
  ScopedBind(Env& e, std::string n, Value v) : env(e), name(std::move(n)) {
    auto it = env.find(name);
    if (it != env.end()) old = it->second;
    env[name] = std::move(v);
  }
  ~ScopedBind() {
    if (old) env[name] = *old; else env.erase(name);
  }
};

inline Value value_min(const Value& x, const Value& y) {
  if (x.kind == Value::Kind::Nat && y.kind == Value::Kind::Nat)
    return Value::nat(std::min(x.num, y.num));
  if (x.kind == Value::Kind::Fun && y.kind == Value::Kind::Fun &&
      x.table.size() == y.table.size()) {
    std::vector<Value> tab;
    for (std::size_t i = 0; i < x.table.size(); ++i)
      tab.push_back(value_min(x.table[i], y.table[i]));
    return Value::fun(x.type, std::move(tab));
  }
  throw UnsupportedQuantifierType("min at an unsupported value shape");
}

}  // namespace detail

inline Value eval_expr(const ExprPtr& e, const ContentSpace& m, const EvalBounds& b, Env& env) {
  switch (e->kind) {
    case Expr::Kind::Var: {
      auto it = env.find(e->name);
      if (it == env.end())
        throw ModelError("unbound variable '" + e->name + "' during evaluation");
      return it->second;
    }
    case Expr::Kind::Const:
      throw ModelError("constant '" + e->name + "' has no standalone value");
    case Expr::Kind::App: {
      if (e->a->kind == Expr::Kind::Const && e->a->name == "up") {
        Value fam = eval_expr(e->b, m, b, env);
        if (fam.kind != Value::Kind::Fun)
          throw ModelError("'up' expects a set family");
        std::vector<std::uint64_t> masks;
        for (auto& v : fam.table) masks.push_back(v.num);
        auto dj = disjointify(masks);
        std::vector<Value> tab;
        for (auto msk : dj) tab.push_back(Value::set(msk));
        return Value::fun(fam.type, std::move(tab));
      }
      Value f = eval_expr(e->a, m, b, env);
      Value x = eval_expr(e->b, m, b, env);
      if (f.kind != Value::Kind::Fun) throw ModelError("application of a non-function value");
      std::size_t idx = detail::raw_index(x, m, b);
      if (idx >= f.table.size())
        throw BoundsExceeded("application argument beyond the table (index " +
                             std::to_string(idx) + ", size " + std::to_string(f.table.size()) + ")");
      return f.table[idx];
    }
    case Expr::Kind::Lam: {
      std::size_t d = detail::domain_size(e->var_type, m, b, detail::NatRole::FunArg);
      std::vector<Value> tab;
      Type bodyty;
      for (std::size_t i = 0; i < d; ++i) {
        detail::ScopedBind bind(env, e->name,
                                detail::value_at(e->var_type, i, m, b, detail::NatRole::FunArg));
        Value v = eval_expr(e->a, m, b, env);
        if (i == 0) bodyty = detail::value_type(v);
        tab.push_back(std::move(v));
      }
      return Value::fun(Type::arrow(bodyty, e->var_type), std::move(tab));
    }
    case Expr::Kind::NatLit:
      return Value::nat(e->nat);
    case Expr::Kind::Min:
      return detail::value_min(eval_expr(e->a, m, b, env), eval_expr(e->b, m, b, env));
    case Expr::Kind::Union: {
      Value x = eval_expr(e->a, m, b, env);
      Value y = eval_expr(e->b, m, b, env);
      return Value::set(x.num | y.num);
    }
    case Expr::Kind::Compl: {
      Value x = eval_expr(e->a, m, b, env);
      return Value::set(m.full() & ~x.num);
    }
    case Expr::Kind::Empty:
      return Value::set(0);
    case Expr::Kind::SetLit: {
      std::uint64_t mask = 0;
      for (auto& a : e->atoms) mask |= 1ull << m.atom_index(a);
      return Value::set(mask);
    }
  }
  throw std::logic_error("eval_expr: bad kind");
}

inline Rat eval_real(const RealPtr& t, const ContentSpace& m, const EvalBounds& b, Env& env) {
  switch (t->kind) {
    case RealTerm::Kind::RatLit:
      return t->rat;
    case RealTerm::Kind::Var: {
      auto it = env.find(t->name);
      if (it == env.end())
        throw ModelError("unbound real variable '" + t->name + "' during evaluation");
      return it->second.r;
    }
    case RealTerm::Kind::SeqAt: {
      auto it = env.find(t->name);
      if (it == env.end())
        throw ModelError("unbound sequence '" + t->name + "' during evaluation");
      Value idx = eval_expr(t->idx, m, b, env);
      if (idx.num >= it->second.table.size())
        throw BoundsExceeded("sequence index beyond the table");
      return it->second.table[static_cast<std::size_t>(idx.num)].r;
    }
    case RealTerm::Kind::Prob: {
      Value s = eval_expr(t->set, m, b, env);
      return m.p(s.num);
    }
    case RealTerm::Kind::Add:
      return eval_real(t->l, m, b, env) + eval_real(t->r, m, b, env);
    case RealTerm::Kind::Sub:
      return eval_real(t->l, m, b, env) - eval_real(t->r, m, b, env);
    case RealTerm::Kind::Min:
      return std::min(eval_real(t->l, m, b, env), eval_real(t->r, m, b, env));
    case RealTerm::Kind::PowHalf: {
      Value idx = eval_expr(t->idx, m, b, env);
      return pow_half(static_cast<unsigned>(idx.num));
    }
    case RealTerm::Kind::Sum: {
      Value upto = eval_expr(t->idx, m, b, env);
      Rat acc(0);
      for (std::uint64_t i = 0; i <= upto.num; ++i) {
        detail::ScopedBind bind(env, t->name, Value::nat(i));
        acc += eval_real(t->l, m, b, env);
      }
      return acc;
    }
  }
  throw std::logic_error("eval_real: bad kind");
}

namespace detail {

inline bool cmp_holds(CmpOp op, const Rat& l, const Rat& r) {
  switch (op) {
    case CmpOp::Lt: return l < r;
    case CmpOp::Le: return l <= r;
    case CmpOp::Eq: return l == r;
    case CmpOp::Ge: return l >= r;
    case CmpOp::Gt: return l > r;
  }
  return false;
}

// Enumerate candidates for a bounded quantifier at an arrow type whose result
// sort is 0: every table pointwise below the bound's table.
inline bool bounded_fun_quant(bool is_forall, const FormulaPtr& f, const Value& bound,
                              const ContentSpace& m, const EvalBounds& b, Env& env) {
  if (f->var_type.result() != Type::nat() || bound.kind != Value::Kind::Fun)
    throw UnsupportedQuantifierType("bounded quantifier at " + f->var_type.to_string());
  std::size_t d = bound.table.size();
  std::size_t total = 1;
  for (auto& entry : bound.table) {
    if (entry.kind != Value::Kind::Nat)
      throw UnsupportedQuantifierType("bounded quantifier at " + f->var_type.to_string());
    std::size_t choices = static_cast<std::size_t>(entry.num) + 1;
    if (total > b.space_cap / choices)
      throw BoundsExceeded("bounded function quantifier exceeds the cap");
    total *= choices;
  }
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    std::vector<Value> tab;
    tab.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
      std::size_t choices = static_cast<std::size_t>(bound.table[i].num) + 1;
      tab.push_back(Value::nat(rest % choices));
      rest /= choices;
    }
    ScopedBind bind(env, f->name, Value::fun(f->var_type, std::move(tab)));
    bool v = eval_formula(f->lhs, m, b, env);
    if (is_forall && !v) return false;
    if (!is_forall && v) return true;
  }
  return is_forall;
}

}  // namespace detail

inline bool eval_formula(const FormulaPtr& f, const ContentSpace& m, const EvalBounds& b, Env& env) {
  switch (f->kind) {
    case Formula::Kind::AtomNat: {
      Value x = eval_expr(f->a, m, b, env);
      Value y = eval_expr(f->b, m, b, env);
      return detail::cmp_holds(f->op, Rat(static_cast<long long>(x.num)),
                               Rat(static_cast<long long>(y.num)));
    }
    case Formula::Kind::AtomIn: {
      Value w = eval_expr(f->a, m, b, env);
      Value s = eval_expr(f->b, m, b, env);
      return (s.num >> w.num & 1) != 0;
    }
    case Formula::Kind::AtomCmp:
      return detail::cmp_holds(f->op, eval_real(f->rl, m, b, env), eval_real(f->rr, m, b, env));
    case Formula::Kind::Not:
      return !eval_formula(f->lhs, m, b, env);
    case Formula::Kind::And:
      return eval_formula(f->lhs, m, b, env) && eval_formula(f->rhs, m, b, env);
    case Formula::Kind::Or:
      return eval_formula(f->lhs, m, b, env) || eval_formula(f->rhs, m, b, env);
    case Formula::Kind::Implies:
      return !eval_formula(f->lhs, m, b, env) || eval_formula(f->rhs, m, b, env);
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      bool is_forall = f->kind == Formula::Kind::Forall;
      std::size_t n = detail::domain_size(f->var_type, m, b, detail::NatRole::Quant);
      if (n > b.space_cap) throw BoundsExceeded("quantifier domain exceeds the cap");
      for (std::size_t i = 0; i < n; ++i) {
        detail::ScopedBind bind(env, f->name,
                                detail::value_at(f->var_type, i, m, b, detail::NatRole::Quant));
        bool v = eval_formula(f->lhs, m, b, env);
        if (is_forall && !v) return false;
        if (!is_forall && v) return true;
      }
      return is_forall;
    }
    case Formula::Kind::BForall:
    case Formula::Kind::BExists: {
      bool is_forall = f->kind == Formula::Kind::BForall;
      Value bound = eval_expr(f->b, m, b, env);
      if (f->var_type == Type::nat()) {
        if (bound.num > 1000000) throw BoundsExceeded("bounded quantifier range too large");
        for (std::uint64_t i = 0; i <= bound.num; ++i) {
          detail::ScopedBind bind(env, f->name, Value::nat(i));
          bool v = eval_formula(f->lhs, m, b, env);
          if (is_forall && !v) return false;
          if (!is_forall && v) return true;
        }
        return is_forall;
      }
      if (f->var_type.is_arrow())
        return detail::bounded_fun_quant(is_forall, f, bound, m, b, env);
      throw UnsupportedQuantifierType("bounded quantifier at " + f->var_type.to_string());
    }
    case Formula::Kind::ProbGeq:
      return eval_formula(detail::outer_expand_unchecked(f->lhs, f->rl), m, b, env);
    case Formula::Kind::ProbLeq:
      return eval_formula(detail::inner_expand_unchecked(f->lhs, f->rl), m, b, env);
  }
  throw std::logic_error("eval_formula: bad kind");
}

inline bool eval(const FormulaPtr& f, const ContentSpace& m, const EvalBounds& b = {}, Env env = {}) {
  return eval_formula(f, m, b, env);
}

// ---------------------------------------------------------------------------
// Outer and inner content of an arbitrary predicate on the sample space
// ---------------------------------------------------------------------------

// The subset of the sample space where phi holds with the sample variable
// bound to each atom in turn.
inline std::uint64_t truth_set(const FormulaPtr& phi, const ContentSpace& m, const EvalBounds& b,
                               Env env = {}) {
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < m.omega.size(); ++i) {
    detail::ScopedBind bind(env, kSampleVar, Value::sample(i));
    if (eval_formula(phi, m, b, env)) mask |= 1ull << i;
  }
  return mask;
}

struct Content {
  std::uint64_t set = 0;          // raw truth set
  std::uint64_t outer_set = 0;    // smallest-measure algebra superset
  std::uint64_t inner_set = 0;    // largest-measure algebra subset
  Rat outer, inner;
};

inline Content outer_inner_content(std::uint64_t mask, const ContentSpace& m) {
  Content c;
  c.set = mask;
  bool have_outer = false, have_inner = false;
  for (auto a : m.algebra) {
    if ((mask & ~a) == 0) {
      Rat pa = m.p(a);
      if (!have_outer || pa < c.outer) {
        c.outer = pa;
        c.outer_set = a;
        have_outer = true;
      }
    }
    if ((a & ~mask) == 0) {
      Rat pa = m.p(a);
      if (!have_inner || pa > c.inner) {
        c.inner = pa;
        c.inner_set = a;
        have_inner = true;
      }
    }
  }
  return c;  // full() and empty are always in the algebra, so both exist
}

inline Content outer_inner_content(const FormulaPtr& phi, const ContentSpace& m,
                                   const EvalBounds& b, Env env = {}) {
  return outer_inner_content(truth_set(phi, m, b, std::move(env)), m);
}

// ---------------------------------------------------------------------------
// Strong majorization at the hat types
// ---------------------------------------------------------------------------

inline bool majorizes(const Value& a, const Value& v, const Type& tau, const ContentSpace& m,
                      const EvalBounds& b) {
  switch (tau.kind()) {
    case Type::Kind::Nat:
      return a.num >= v.num;
    case Type::Kind::Omega:
      return a.num >= 1;
    case Type::Kind::Ev:
      return Rat(static_cast<long long>(a.num)) >= m.p(v.num);
    case Type::Kind::Real:
      throw UnsupportedQuantifierType("majorization at sort R");
    case Type::Kind::Arrow: {
      const Type& xi = tau.argument();
      const Type& rho = tau.result();
      Type hxi = hat_type(xi);
      std::size_t dh = detail::domain_size(hxi, m, b, detail::NatRole::FunArg);
      std::size_t dv = detail::domain_size(xi, m, b, detail::NatRole::FunArg);
      if (a.table.size() < dh || v.table.size() < dv)
        throw BoundsExceeded("majorization over a short table");
      for (std::size_t i = 0; i < dh; ++i) {
        Value ystar = detail::value_at(hxi, i, m, b, detail::NatRole::FunArg);
        for (std::size_t j = 0; j < dv; ++j) {
          Value y = detail::value_at(xi, j, m, b, detail::NatRole::FunArg);
          if (!majorizes(ystar, y, xi, m, b)) continue;
          if (!majorizes(a.table[i], v.table[j], rho, m, b)) return false;
        }
        for (std::size_t j = 0; j < dh; ++j) {
          Value y2 = detail::value_at(hxi, j, m, b, detail::NatRole::FunArg);
          if (!majorizes(ystar, y2, hxi, m, b)) continue;
          if (!majorizes(a.table[i], a.table[j], rho, m, b)) return false;
        }
      }
      return true;
    }
  }
  throw std::logic_error("majorizes: bad kind");
}

// ---------------------------------------------------------------------------
// Fluctuation counting
// ---------------------------------------------------------------------------

// Largest n with indices i1 < j1 <= i2 < j2 <= ... <= in < jn < N and
// |X_i - X_j| > 2^-k for every chosen pair.
inline std::uint64_t count_fluctuations(const std::vector<Rat>& xs, unsigned k, std::size_t horizon) {
  if (horizon > xs.size()) throw HorizonExceeded("horizon beyond the sequence length");
  if (horizon < 2) return 0;
  Rat thr = pow_half(k);
  std::vector<std::uint64_t> best_upto(horizon, 0);  // max chain with last j <= t
  for (std::size_t j = 1; j < horizon; ++j) {
    std::uint64_t here = 0;
    for (std::size_t i = 0; i < j; ++i) {
      Rat diff = xs[i] > xs[j] ? xs[i] - xs[j] : xs[j] - xs[i];
      if (diff > thr) here = std::max(here, 1 + best_upto[i]);
    }
    best_upto[j] = std::max(best_upto[j - 1], here);
  }
  return best_upto[horizon - 1];
}

// Straightforward recursive oracle (exponential; fine for short horizons).
inline std::uint64_t count_fluctuations_brute(const std::vector<Rat>& xs, unsigned k,
                                              std::size_t horizon) {
  if (horizon > xs.size()) throw HorizonExceeded("horizon beyond the sequence length");
  Rat thr = pow_half(k);
  std::function<std::uint64_t(std::size_t)> rec = [&](std::size_t min_i) -> std::uint64_t {
    std::uint64_t best = 0;
    for (std::size_t i = min_i; i < horizon; ++i)
      for (std::size_t j = i + 1; j < horizon; ++j) {
        Rat diff = xs[i] > xs[j] ? xs[i] - xs[j] : xs[j] - xs[i];
        if (diff > thr) best = std::max(best, 1 + rec(j));
      }
    return best;
  };
  return rec(0);
}

// ---------------------------------------------------------------------------
// Modulus checking against concrete event families / random variables
// ---------------------------------------------------------------------------

enum class ModulusKind {
  IOPointwise,
  IOUniform,
  RateAS,
  MetastableUniform,
  MetastablePointwise,
  Fluctuation,
};

inline std::string to_string(ModulusKind k) {
  switch (k) {
    case ModulusKind::IOPointwise: return "io-pointwise";
    case ModulusKind::IOUniform: return "io-uniform";
    case ModulusKind::RateAS: return "rate-as";
    case ModulusKind::MetastableUniform: return "metastable-uniform";
    case ModulusKind::MetastablePointwise: return "metastable-pointwise";
    case ModulusKind::Fluctuation: return "fluctuation";
  }
  return "?";
}

// A concrete process over the model: either an event family A_n (algebra sets)
// or a random-variable sequence X_n (one rational per sample point and index).
struct ProcessData {
  std::vector<std::uint64_t> sets;        // A_n as masks
  std::vector<std::vector<Rat>> xs;       // xs[n][atom]
  std::size_t length() const { return sets.empty() ? xs.size() : sets.size(); }
};

struct ModulusCheck {
  bool pass = true;
  std::string counterexample;
};

namespace detail {

inline bool window_cauchy(const ProcessData& d, std::size_t atom, std::size_t lo, std::size_t hi,
                          const Rat& thr) {
  for (std::size_t i = lo; i <= hi; ++i)
    for (std::size_t j = i + 1; j <= hi; ++j) {
      Rat diff = d.xs[i][atom] > d.xs[j][atom] ? d.xs[i][atom] - d.xs[j][atom]
                                               : d.xs[j][atom] - d.xs[i][atom];
      if (diff > thr) return false;
    }
  return true;
}

}  // namespace detail

inline ModulusCheck check_modulus(ModulusKind kind, const ModulusTable& phi,
                                  const ContentSpace& m, const ProcessData& data,
                                  const EvalBounds& b, unsigned m_max, unsigned k_max) {
  ModulusCheck out;
  std::size_t len = data.length();
  auto fail = [&](unsigned mm, unsigned kk, const std::string& extra) {
    out.pass = false;
    out.counterexample = "m=" + std::to_string(mm) + " k=" + std::to_string(kk) +
                         (extra.empty() ? "" : " " + extra);
  };
  auto need = [&](std::uint64_t n) {
    if (n >= len) throw HorizonExceeded("modulus value " + std::to_string(n) +
                                        " beyond data length " + std::to_string(len));
  };

  // the counterfunctions swept for the metastable kinds
  std::vector<std::vector<std::uint64_t>> gs;
  if (kind == ModulusKind::MetastableUniform || kind == ModulusKind::MetastablePointwise) {
    std::size_t d = static_cast<std::size_t>(b.fun_dom) + 1;
    std::size_t r = static_cast<std::size_t>(b.fun_ran) + 1;
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= r;
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rest = idx;
      std::vector<std::uint64_t> g(d);
      for (std::size_t i = 0; i < d; ++i) {
        g[i] = rest % r;
        rest /= r;
      }
      gs.push_back(std::move(g));
    }
  }

  for (unsigned mm = 0; mm <= m_max && out.pass; ++mm) {
    Rat target = Rat(1) - pow_half(mm);
    for (unsigned kk = 0; kk <= k_max && out.pass; ++kk) {
      Rat thr = pow_half(kk);
      switch (kind) {
        case ModulusKind::IOPointwise: {
          std::uint64_t n1 = phi.eval(mm, kk);
          need(n1);
          std::uint64_t u = 0;
          for (std::uint64_t i = kk; i <= n1; ++i) u |= data.sets[i];
          if (m.p(u) < target) fail(mm, kk, "P" + m.set_to_string(u) + "=" + rat_to_string(m.p(u)));
          break;
        }
        case ModulusKind::IOUniform: {
          std::uint64_t s = m.full();
          for (unsigned k2 = 0; k2 <= k_max; ++k2) {
            std::uint64_t n1 = phi.eval(mm, k2);
            need(n1);
            std::uint64_t u = 0;
            for (std::uint64_t i = k2; i <= n1; ++i) u |= data.sets[i];
            s &= u;
          }
          if (m.p(s) < target) fail(mm, kk, "P=" + rat_to_string(m.p(s)));
          kk = k_max;  // the intersection already covers every k
          break;
        }
        case ModulusKind::RateAS: {
          std::uint64_t n = phi.eval(mm, kk);
          need(n);
          std::uint64_t ev = 0;
          for (std::size_t a = 0; a < m.omega.size(); ++a)
            if (detail::window_cauchy(data, a, n, len - 1, thr)) ev |= 1ull << a;
          Content c = outer_inner_content(ev, m);
          if (c.outer < target) fail(mm, kk, "outer=" + rat_to_string(c.outer));
          break;
        }
        case ModulusKind::MetastableUniform:
        case ModulusKind::MetastablePointwise: {
          for (const auto& gtab : gs) {
            GFun g = [&](std::uint64_t x) {
              return gtab[static_cast<std::size_t>(std::min<std::uint64_t>(x, gtab.size() - 1))];
            };
            std::uint64_t bound = phi.eval(mm, kk, &g);
            std::uint64_t ev = 0;
            for (std::size_t a = 0; a < m.omega.size(); ++a) {
              bool ok = false;
              if (kind == ModulusKind::MetastableUniform) {
                std::uint64_t n = bound;
                need(n + g(n));
                ok = detail::window_cauchy(data, a, n, n + g(n), thr);
              } else {
                for (std::uint64_t n = 0; n <= bound && !ok; ++n) {
                  need(n + g(n));
                  ok = detail::window_cauchy(data, a, n, n + g(n), thr);
                }
              }
              if (ok) ev |= 1ull << a;
            }
            Content c = outer_inner_content(ev, m);
            if (c.outer < target) {
              std::string gdesc = "g=";
              for (std::size_t i = 0; i < gtab.size(); ++i)
                gdesc += (i ? "," : "") + std::to_string(gtab[i]);
              fail(mm, kk, gdesc);
              break;
            }
          }
          break;
        }
        case ModulusKind::Fluctuation: {
          std::uint64_t cap = phi.eval(mm, kk);
          std::uint64_t ev = 0;
          for (std::size_t a = 0; a < m.omega.size(); ++a) {
            std::vector<Rat> traj;
            for (std::size_t n = 0; n < len; ++n) traj.push_back(data.xs[n][a]);
            if (count_fluctuations(traj, kk, len) <= cap) ev |= 1ull << a;
          }
          Content c = outer_inner_content(ev, m);
          if (c.outer < target) fail(mm, kk, "outer=" + rat_to_string(c.outer));
          break;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model file loader
//
//   omega = a b c
//   algebra = powerset          (or one or more 'set {a b}' lines)
//   prob {a b} = 1/2
//   bounds nat=4 fun=3x3
// ---------------------------------------------------------------------------

struct LoadedModel {
  ContentSpace space;
  EvalBounds bounds;
};

inline LoadedModel load_model(std::istream& in, const std::string& id = "model") {
  std::vector<std::string> atoms;
  bool powerset = false;
  std::vector<std::vector<std::string>> sets;
  std::vector<std::pair<std::vector<std::string>, Rat>> probs;
  EvalBounds bounds;

  auto parse_atoms = [](std::istringstream& ss) {
    std::vector<std::string> names;
    std::string tok;
    while (ss >> tok) names.push_back(tok);
    return names;
  };
  auto parse_braced = [](std::string& rest) {
    auto l = rest.find('{');
    auto r = rest.find('}');
    if (l == std::string::npos || r == std::string::npos || r < l)
      throw ModelError("expected a {...} set literal in: " + rest);
    std::istringstream ss(rest.substr(l + 1, r - l - 1));
    std::vector<std::string> names;
    std::string tok;
    while (ss >> tok) names.push_back(tok);
    rest = rest.substr(r + 1);
    return names;
  };

  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ss(line);
    std::string head;
    if (!(ss >> head)) continue;
    if (head == "omega") {
      std::string eq;
      ss >> eq;
      atoms = parse_atoms(ss);
    } else if (head == "algebra") {
      std::string eq, what;
      ss >> eq >> what;
      if (what == "powerset") powerset = true;
      else throw ModelError("algebra must be 'powerset' or given via 'set {...}' lines");
    } else if (head == "set") {
      std::string rest;
      std::getline(ss, rest);
      sets.push_back(parse_braced(rest));
    } else if (head == "prob") {
      std::string rest;
      std::getline(ss, rest);
      auto names = parse_braced(rest);
      auto eq = rest.find('=');
      if (eq == std::string::npos) throw ModelError("prob line needs '= p/q'");
      std::string num = rest.substr(eq + 1);
      num.erase(0, num.find_first_not_of(" \t"));
      num.erase(num.find_last_not_of(" \t\r") + 1);
      probs.emplace_back(names, parse_rational(num));
    } else if (head == "bounds") {
      std::string tok;
      while (ss >> tok) {
        if (tok.rfind("nat=", 0) == 0) {
          bounds.nat_bound = std::stoull(tok.substr(4));
        } else if (tok.rfind("fun=", 0) == 0) {
          auto body = tok.substr(4);
          auto x = body.find('x');
          if (x == std::string::npos) throw ModelError("bounds fun=DxR expected");
          bounds.fun_dom = std::stoull(body.substr(0, x));
          bounds.fun_ran = std::stoull(body.substr(x + 1));
        } else {
          throw ModelError("unknown bounds entry: " + tok);
        }
      }
    } else {
      throw ModelError("unknown model line: " + line);
    }
  }
  if (atoms.empty()) throw ModelError("model file has no 'omega =' line");

  LoadedModel out;
  out.bounds = bounds;
  if (powerset) {
    std::map<std::string, Rat> ap;
    for (auto& [names, r] : probs) {
      if (names.size() != 1) throw ModelError("powerset models take atom probabilities only");
      ap[names[0]] = r;
    }
    std::vector<std::pair<std::string, Rat>> entries;
    for (auto& a : atoms) {
      if (!ap.count(a)) throw ModelError("missing probability for atom " + a);
      entries.emplace_back(a, ap[a]);
    }
    out.space = ContentSpace::powerset(id, std::move(entries));
  } else {
    std::vector<std::pair<std::vector<std::string>, Rat>> entries;
    for (auto& [names, r] : probs) entries.emplace_back(names, r);
    out.space = ContentSpace::subalgebra(id, atoms, entries, sets);
    // bare 'set' lines must end up in the closure with a derived probability
    for (auto& s : sets) {
      std::uint64_t mask = 0;
      for (auto& nm : s) mask |= 1ull << out.space.atom_index(nm);
      if (!out.space.in_algebra(mask))
        throw NotAnAlgebra(id + ": set " + out.space.set_to_string(mask) +
                           " has no derivable probability");
    }
  }
  out.bounds.grid = model_grid(out.space, out.bounds);
  return out;
}

inline LoadedModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file: " + path);
  auto slash = path.find_last_of('/');
  std::string id = slash == std::string::npos ? path : path.substr(slash + 1);
  return load_model(in, id);
}

}  // namespace probmine
