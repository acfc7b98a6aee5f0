#pragma once

#include <stdexcept>
#include <string>

#include "probmine/ast.hpp"
#include "probmine/classify.hpp"
#include "probmine/typecheck.hpp"

namespace probmine {

struct SampleVarMissing : std::runtime_error {
  SampleVarMissing()
      : std::runtime_error("SampleVarMissing: the sample variable '" + kSampleVar +
                           "' does not occur free in the Pr body") {}
};

namespace detail {

inline std::string fresh_set_name(const FormulaPtr& phi) {
  auto avoid = free_vars(phi);
  avoid.insert(kSampleVar);
  if (!avoid.count("A")) return "A";
  return fresh_name("A", avoid);
}

// Pr[ phi ] >= lam  expands to  all A:Ev. Pr(A) < lam -> ex w:Om. (w in A^c & phi)
inline FormulaPtr outer_expand_unchecked(const FormulaPtr& phi, const RealPtr& lam) {
  std::string A = fresh_set_name(phi);
  ExprPtr Av = mk_var(A, Type::ev());
  FormulaPtr guard = mk_atomcmp(mk_prob(Av), CmpOp::Lt, lam);
  FormulaPtr witness = mk_exists(
      kSampleVar, Type::omega(),
      mk_and(mk_atomin(mk_var(kSampleVar, Type::omega()), mk_compl(Av)), phi));
  return mk_forall(A, Type::ev(), mk_implies(guard, witness));
}

// Pr[ phi ] <= lam  expands to  all A:Ev. Pr(A) > lam -> ex w:Om. (w in A & dual(phi))
inline FormulaPtr inner_expand_unchecked(const FormulaPtr& phi, const RealPtr& lam) {
  FormulaPtr dual = demorgan_dual(phi);
  std::string A = fresh_set_name(dual);
  ExprPtr Av = mk_var(A, Type::ev());
  FormulaPtr guard = mk_atomcmp(mk_prob(Av), CmpOp::Gt, lam);
  FormulaPtr witness = mk_exists(
      kSampleVar, Type::omega(),
      mk_and(mk_atomin(mk_var(kSampleVar, Type::omega()), Av), dual));
  return mk_forall(A, Type::ev(), mk_implies(guard, witness));
}

}  // namespace detail

inline FormulaPtr outer_expand(const FormulaPtr& phi, const RealPtr& lam) {
  if (!free_vars(phi).count(kSampleVar)) throw SampleVarMissing();
  return detail::outer_expand_unchecked(phi, lam);
}

inline FormulaPtr inner_expand(const FormulaPtr& phi, const RealPtr& lam) {
  if (!free_vars(phi).count(kSampleVar)) throw SampleVarMissing();
  return detail::inner_expand_unchecked(phi, lam);
}

}  // namespace probmine
