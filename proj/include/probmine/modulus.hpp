#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace probmine {

struct DomainExceeded : std::runtime_error {
  explicit DomainExceeded(const std::string& s) : std::runtime_error("DomainExceeded: " + s) {}
};

// A tiny closed arithmetic language for symbolic moduli: constants, the
// variables m and x (x doubles as k), +, *, max, and application of the
// counterfunction g (metastable kinds only).
struct ModulusExpr {
  enum class Kind { Const, VarM, VarX, Add, Mul, Max, GApp };
  Kind kind;
  std::uint64_t value = 0;
  std::shared_ptr<const ModulusExpr> l, r;
};

using ModulusExprPtr = std::shared_ptr<const ModulusExpr>;

inline ModulusExprPtr mexpr_const(std::uint64_t v) {
  auto e = std::make_shared<ModulusExpr>();
  e->kind = ModulusExpr::Kind::Const;
  e->value = v;
  return e;
}
inline ModulusExprPtr mexpr_var(char which) {
  auto e = std::make_shared<ModulusExpr>();
  e->kind = which == 'm' ? ModulusExpr::Kind::VarM : ModulusExpr::Kind::VarX;
  return e;
}
inline ModulusExprPtr mexpr_node(ModulusExpr::Kind k, ModulusExprPtr l, ModulusExprPtr r) {
  auto e = std::make_shared<ModulusExpr>();
  e->kind = k;
  e->l = std::move(l);
  e->r = std::move(r);
  return e;
}

using GFun = std::function<std::uint64_t(std::uint64_t)>;

inline std::uint64_t mexpr_eval(const ModulusExprPtr& e, std::uint64_t m, std::uint64_t x,
                                const GFun* g = nullptr) {
  switch (e->kind) {
    case ModulusExpr::Kind::Const: return e->value;
    case ModulusExpr::Kind::VarM: return m;
    case ModulusExpr::Kind::VarX: return x;
    case ModulusExpr::Kind::Add: return mexpr_eval(e->l, m, x, g) + mexpr_eval(e->r, m, x, g);
    case ModulusExpr::Kind::Mul: return mexpr_eval(e->l, m, x, g) * mexpr_eval(e->r, m, x, g);
    case ModulusExpr::Kind::Max: {
      auto a = mexpr_eval(e->l, m, x, g);
      auto b = mexpr_eval(e->r, m, x, g);
      return a > b ? a : b;
    }
    case ModulusExpr::Kind::GApp: {
      if (!g) throw DomainExceeded("g not supplied to a modulus using g(...)");
      return (*g)(mexpr_eval(e->l, m, x, g));
    }
  }
  throw std::logic_error("mexpr_eval: bad kind");
}

inline ModulusExprPtr mexpr_subst_m(const ModulusExprPtr& e, const ModulusExprPtr& repl) {
  switch (e->kind) {
    case ModulusExpr::Kind::Const:
    case ModulusExpr::Kind::VarX:
      return e;
    case ModulusExpr::Kind::VarM:
      return repl;
    case ModulusExpr::Kind::GApp:
      return mexpr_node(ModulusExpr::Kind::GApp, mexpr_subst_m(e->l, repl), nullptr);
    default:
      return mexpr_node(e->kind, mexpr_subst_m(e->l, repl), mexpr_subst_m(e->r, repl));
  }
}

inline std::string mexpr_to_string(const ModulusExprPtr& e) {
  switch (e->kind) {
    case ModulusExpr::Kind::Const: return std::to_string(e->value);
    case ModulusExpr::Kind::VarM: return "m";
    case ModulusExpr::Kind::VarX: return "x";
    case ModulusExpr::Kind::Add:
      return "(" + mexpr_to_string(e->l) + " + " + mexpr_to_string(e->r) + ")";
    case ModulusExpr::Kind::Mul:
      return "(" + mexpr_to_string(e->l) + " * " + mexpr_to_string(e->r) + ")";
    case ModulusExpr::Kind::Max:
      return "max(" + mexpr_to_string(e->l) + ", " + mexpr_to_string(e->r) + ")";
    case ModulusExpr::Kind::GApp:
      return "g(" + mexpr_to_string(e->l) + ")";
  }
  return "?";
}

// grammar: sum := prod (('+') prod)* ; prod := atom ('*' atom)* ;
//          atom := number | m | x | k | max(sum, sum) | g(sum) | (sum)
inline ModulusExprPtr parse_modulus_expr(const std::string& s) {
  size_t i = 0;
  auto skip = [&] { while (i < s.size() && s[i] == ' ') ++i; };
  std::function<ModulusExprPtr()> sum, prod, atom;
  atom = [&]() -> ModulusExprPtr {
    skip();
    if (i >= s.size()) throw std::invalid_argument("modulus expr: unexpected end");
    if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      std::uint64_t v = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) v = v * 10 + (s[i++] - '0');
      return mexpr_const(v);
    }
    if (s.compare(i, 4, "max(") == 0) {
      i += 4;
      auto l = sum();
      skip();
      if (i >= s.size() || s[i] != ',') throw std::invalid_argument("modulus expr: ',' expected");
      ++i;
      auto r = sum();
      skip();
      if (i >= s.size() || s[i] != ')') throw std::invalid_argument("modulus expr: ')' expected");
      ++i;
      return mexpr_node(ModulusExpr::Kind::Max, l, r);
    }
    if (s.compare(i, 2, "g(") == 0) {
      i += 2;
      auto l = sum();
      skip();
      if (i >= s.size() || s[i] != ')') throw std::invalid_argument("modulus expr: ')' expected");
      ++i;
      return mexpr_node(ModulusExpr::Kind::GApp, l, nullptr);
    }
    if (s[i] == 'm') { ++i; return mexpr_var('m'); }
    if (s[i] == 'x' || s[i] == 'k') { ++i; return mexpr_var('x'); }
    if (s[i] == '(') {
      ++i;
      auto e = sum();
      skip();
      if (i >= s.size() || s[i] != ')') throw std::invalid_argument("modulus expr: ')' expected");
      ++i;
      return e;
    }
    throw std::invalid_argument("modulus expr: bad token at " + std::to_string(i));
  };
  prod = [&]() -> ModulusExprPtr {
    auto l = atom();
    skip();
    while (i < s.size() && s[i] == '*') {
      ++i;
      l = mexpr_node(ModulusExpr::Kind::Mul, l, atom());
      skip();
    }
    return l;
  };
  sum = [&]() -> ModulusExprPtr {
    auto l = prod();
    skip();
    while (i < s.size() && s[i] == '+') {
      ++i;
      l = mexpr_node(ModulusExpr::Kind::Add, l, prod());
      skip();
    }
    return l;
  };
  auto e = sum();
  skip();
  if (i != s.size()) throw std::invalid_argument("modulus expr: trailing input");
  return e;
}

// A modulus: either a finite lookup table Phi[m][x] or a closed expression.
struct ModulusTable {
  std::optional<std::vector<std::vector<std::uint64_t>>> table;
  ModulusExprPtr expr;

  static ModulusTable from_table(std::vector<std::vector<std::uint64_t>> t) {
    ModulusTable mt;
    mt.table = std::move(t);
    return mt;
  }
  static ModulusTable from_expr(ModulusExprPtr e) {
    ModulusTable mt;
    mt.expr = std::move(e);
    return mt;
  }

  std::uint64_t eval(std::uint64_t m, std::uint64_t x, const GFun* g = nullptr) const {
    if (table) {
      if (m >= table->size()) throw DomainExceeded("m=" + std::to_string(m));
      if (x >= (*table)[m].size()) throw DomainExceeded("x=" + std::to_string(x));
      return (*table)[m][x];
    }
    return mexpr_eval(expr, m, x, g);
  }

  std::string to_string() const {
    if (expr) return mexpr_to_string(expr);
    std::string out = "table";
    for (const auto& row : *table) {
      out += " [";
      for (size_t j = 0; j < row.size(); ++j) out += (j ? " " : "") + std::to_string(row[j]);
      out += "]";
    }
    return out;
  }
};

// Phi'(m, x) := Phi(m + x + 1, x).
inline ModulusTable transform_modulus_equiv(const ModulusTable& phi) {
  if (phi.expr) {
    auto mx1 = mexpr_node(ModulusExpr::Kind::Add, mexpr_node(ModulusExpr::Kind::Add, mexpr_var('m'), mexpr_var('x')), mexpr_const(1));
    return ModulusTable::from_expr(mexpr_subst_m(phi.expr, mx1));
  }
  const auto& t = *phi.table;
  std::vector<std::vector<std::uint64_t>> out;
  for (std::uint64_t m = 0;; ++m) {
    std::vector<std::uint64_t> row;
    for (std::uint64_t x = 0;; ++x) {
      if (m + x + 1 >= t.size()) break;
      if (x >= t[m + x + 1].size()) break;
      row.push_back(t[m + x + 1][x]);
    }
    if (row.empty()) break;
    out.push_back(std::move(row));
  }
  if (out.empty()) throw DomainExceeded("table too small for the transform");
  return ModulusTable::from_table(std::move(out));
}

}  // namespace probmine
