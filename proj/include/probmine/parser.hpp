#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "probmine/ast.hpp"

namespace probmine {

struct SyntaxError : std::runtime_error {
  size_t position;
  SyntaxError(size_t pos, const std::string& msg)
      : std::runtime_error("SyntaxError at " + std::to_string(pos) + ": " + msg), position(pos) {}
};

struct UnknownSort : std::runtime_error {
  explicit UnknownSort(const std::string& s) : std::runtime_error("UnknownSort: " + s) {}
};

struct UnboundVariable : std::runtime_error {
  explicit UnboundVariable(const std::string& s) : std::runtime_error("UnboundVariable: " + s) {}
};

namespace detail {

enum class Tok {
  Ident, Num,
  LParen, RParen, LBrack, RBrack, LBrace, RBrace,
  Dot, Comma, Colon, Slash, Plus, Minus,
  Bang, Amp, Bar, Arrow,
  Lt, Le, Eq, Ge, Gt,
  NatLt, NatLe, NatEq, NatGe, NatGt,
  Union, Backslash, Compl, PowHalf,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  size_t pos;
};

inline std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  size_t i = 0;
  auto push = [&](Tok k, std::string t, size_t p) { out.push_back({k, std::move(t), p}); };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    size_t p = i;
    if (c == '2' && i + 2 < s.size() && s[i + 1] == '^' && s[i + 2] == '-') {
      push(Tok::PowHalf, "2^-", p);
      i += 3;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      push(Tok::Num, s.substr(i, j - i), p);
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\'')) ++j;
      push(Tok::Ident, s.substr(i, j - i), p);
      i = j;
      continue;
    }
    auto nat_suffix = [&](size_t j) {
      // a contiguous `0` not followed by another ident/number char
      return j < s.size() && s[j] == '0' && (j + 1 >= s.size() || !(std::isalnum(static_cast<unsigned char>(s[j + 1])) || s[j + 1] == '/'));
    };
    switch (c) {
      case '(': push(Tok::LParen, "(", p); ++i; break;
      case ')': push(Tok::RParen, ")", p); ++i; break;
      case '[': push(Tok::LBrack, "[", p); ++i; break;
      case ']': push(Tok::RBrack, "]", p); ++i; break;
      case '{': push(Tok::LBrace, "{", p); ++i; break;
      case '}': push(Tok::RBrace, "}", p); ++i; break;
      case '.': push(Tok::Dot, ".", p); ++i; break;
      case ',': push(Tok::Comma, ",", p); ++i; break;
      case ':': push(Tok::Colon, ":", p); ++i; break;
      case '/': push(Tok::Slash, "/", p); ++i; break;
      case '+': push(Tok::Plus, "+", p); ++i; break;
      case '!': push(Tok::Bang, "!", p); ++i; break;
      case '&': push(Tok::Amp, "&", p); ++i; break;
      case '|': push(Tok::Bar, "|", p); ++i; break;
      case '-':
        if (i + 1 < s.size() && s[i + 1] == '>') {
          push(Tok::Arrow, "->", p);
          i += 2;
        } else {
          push(Tok::Minus, "-", p);
          ++i;
        }
        break;
      case '<':
        if (i + 1 < s.size() && s[i + 1] == '=') {
          if (nat_suffix(i + 2)) { push(Tok::NatLe, "<=0", p); i += 3; }
          else { push(Tok::Le, "<=", p); i += 2; }
        } else if (nat_suffix(i + 1)) { push(Tok::NatLt, "<0", p); i += 2; }
        else { push(Tok::Lt, "<", p); ++i; }
        break;
      case '>':
        if (i + 1 < s.size() && s[i + 1] == '=') {
          if (nat_suffix(i + 2)) { push(Tok::NatGe, ">=0", p); i += 3; }
          else { push(Tok::Ge, ">=", p); i += 2; }
        } else if (nat_suffix(i + 1)) { push(Tok::NatGt, ">0", p); i += 2; }
        else { push(Tok::Gt, ">", p); ++i; }
        break;
      case '=':
        if (nat_suffix(i + 1)) { push(Tok::NatEq, "=0", p); i += 2; }
        else { push(Tok::Eq, "=", p); ++i; }
        break;
      case '^':
        if (i + 1 < s.size() && s[i + 1] == 'c') { push(Tok::Compl, "^c", p); i += 2; }
        else throw SyntaxError(p, "stray '^'");
        break;
      case '\\':
        if (i + 1 < s.size() && s[i + 1] == '/') { push(Tok::Union, "\\/", p); i += 2; }
        else { push(Tok::Backslash, "\\", p); ++i; }
        break;
      default:
        throw SyntaxError(p, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

inline bool is_keyword(const std::string& s) {
  return s == "all" || s == "ex" || s == "in" || s == "Pr" || s == "min" || s == "sum" ||
         s == "empty" || s == "up";
}

class Parser {
 public:
  Parser(std::string text, std::map<std::string, Type> ctx)
      : text_(std::move(text)), toks_(lex(text_)), ctx_(std::move(ctx)) {}

  FormulaPtr parse_formula_all() {
    FormulaPtr f = formula();
    expect(Tok::End, "end of input");
    return f;
  }
  ExprPtr parse_expr_all() {
    ExprPtr e = expr();
    expect(Tok::End, "end of input");
    return e;
  }
  RealPtr parse_real_all() {
    RealPtr t = real();
    expect(Tok::End, "end of input");
    return t;
  }
  Type parse_type_all() {
    Type t = type();
    expect(Tok::End, "end of input");
    return t;
  }

 private:
  std::string text_;
  std::vector<Token> toks_;
  size_t pos_ = 0;
  bool suppress_annotation_ = false;
  std::map<std::string, Type> ctx_;

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(size_t k = 1) const {
    size_t i = pos_ + k;
    return toks_[i < toks_.size() ? i : toks_.size() - 1];
  }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_kw(const char* kw) const { return cur().kind == Tok::Ident && cur().text == kw; }
  Token take() { return toks_[pos_++]; }
  void expect(Tok k, const std::string& what) {
    if (!at(k)) throw SyntaxError(cur().pos, "expected " + what + ", found '" + cur().text + "'");
    ++pos_;
  }

  struct Binder {
    Parser& p;
    std::string name;
    std::optional<Type> prev;
    Binder(Parser& pr, const std::string& n, const Type& t) : p(pr), name(n) {
      auto it = p.ctx_.find(n);
      if (it != p.ctx_.end()) prev = it->second;
      p.ctx_[n] = t;
    }
    ~Binder() {
      if (prev) p.ctx_[name] = *prev;
      else p.ctx_.erase(name);
    }
  };

  Type type() {
    Type t = base_type();
    // A '(' after a type is only an argument-type suffix if its content
    // parses as a type; otherwise it belongs to the surrounding term
    // (e.g. an application argument after an annotated variable).
    while (at(Tok::LParen)) {
      size_t save = pos_;
      take();
      try {
        Type arg = type();
        expect(Tok::RParen, "')' in type");
        t = Type::arrow(t, arg);
      } catch (const std::runtime_error&) {
        pos_ = save;
        break;
      }
    }
    return t;
  }

  Type base_type() {
    if (at(Tok::Num) && cur().text == "0") {
      take();
      return Type::nat();
    }
    if (at(Tok::Ident)) {
      std::string s = take().text;
      if (s == "Om") return Type::omega();
      if (s == "Ev") return Type::ev();
      if (s == "R") return Type::real();
      throw UnknownSort(s);
    }
    throw SyntaxError(cur().pos, "expected a sort (0, Om, Ev, R)");
  }

  // formula := implication
  FormulaPtr formula() {
    FormulaPtr l = disjunction();
    if (at(Tok::Arrow)) {
      take();
      return mk_implies(std::move(l), formula());
    }
    return l;
  }

  FormulaPtr disjunction() {
    FormulaPtr l = conjunction();
    while (at(Tok::Bar)) {
      take();
      l = mk_or(std::move(l), conjunction());
    }
    return l;
  }

  FormulaPtr conjunction() {
    FormulaPtr l = unary();
    while (at(Tok::Amp)) {
      take();
      l = mk_and(std::move(l), unary());
    }
    return l;
  }

  FormulaPtr unary() {
    if (at(Tok::Bang)) {
      take();
      return mk_not(unary());
    }
    if (at_kw("all") || at_kw("ex")) return quantifier();
    return atom();
  }

  FormulaPtr quantifier() {
    bool is_all = cur().text == "all";
    take();
    if (!at(Tok::Ident) || is_keyword(cur().text))
      throw SyntaxError(cur().pos, "expected a variable after quantifier");
    std::string v = take().text;
    ExprPtr bound;
    if (at(Tok::Le)) {
      take();
      // An in-scope bare variable bound would greedily absorb the quantifier's
      // ': t' as an annotation; re-parse with annotation suppressed if the
      // first attempt does not leave a ':' behind.
      size_t save = pos_;
      bool ok = false;
      try {
        bound = expr_at(3);
        ok = at(Tok::Colon);
      } catch (const SyntaxError&) {
      } catch (const UnboundVariable&) {
      }
      if (!ok) {
        pos_ = save;
        suppress_annotation_ = true;
        try {
          bound = expr_at(3);
        } catch (...) {
          suppress_annotation_ = false;
          throw;
        }
        suppress_annotation_ = false;
      }
    }
    expect(Tok::Colon, "':' before quantifier type");
    Type t = type();
    expect(Tok::Dot, "'.' after quantifier type");
    FormulaPtr body;
    {
      Binder b(*this, v, t);
      body = formula();
    }
    if (bound) {
      return is_all ? mk_bforall(v, t, std::move(bound), std::move(body))
                    : mk_bexists(v, t, std::move(bound), std::move(body));
    }
    return is_all ? mk_forall(v, t, std::move(body)) : mk_exists(v, t, std::move(body));
  }

  FormulaPtr atom() {
    if (at_kw("Pr") && peek().kind == Tok::LBrack) return prob_abbrev();

    // Try a real comparison first; fall back to a nat/in atom; finally a
    // parenthesized formula.
    size_t save = pos_;
    std::optional<SyntaxError> best;
    auto keep = [&](const SyntaxError& e) {
      if (!best || e.position > best->position) best = e;
    };
    try {
      RealPtr l = real();
      CmpOp op;
      switch (cur().kind) {
        case Tok::Lt: op = CmpOp::Lt; break;
        case Tok::Le: op = CmpOp::Le; break;
        case Tok::Eq: op = CmpOp::Eq; break;
        case Tok::Ge: op = CmpOp::Ge; break;
        case Tok::Gt: op = CmpOp::Gt; break;
        default: throw SyntaxError(cur().pos, "expected a comparison operator");
      }
      take();
      RealPtr r = real();
      return mk_atomcmp(std::move(l), op, std::move(r));
    } catch (const SyntaxError& e) {
      keep(e);
      pos_ = save;
    } catch (const UnboundVariable&) {
      pos_ = save;
    }
    try {
      ExprPtr l = expr();
      CmpOp op;
      switch (cur().kind) {
        case Tok::NatLt: op = CmpOp::Lt; break;
        case Tok::NatLe: op = CmpOp::Le; break;
        case Tok::NatEq: op = CmpOp::Eq; break;
        case Tok::NatGe: op = CmpOp::Ge; break;
        case Tok::NatGt: op = CmpOp::Gt; break;
        default:
          if (at_kw("in")) {
            take();
            ExprPtr r = expr_at(3);
            return mk_atomin(std::move(l), std::move(r));
          }
          throw SyntaxError(cur().pos, "expected '=0', '<=0', '>=0', '<0', '>0' or 'in'");
      }
      take();
      ExprPtr r = expr_at(3);
      return mk_atomnat(std::move(l), op, std::move(r));
    } catch (const SyntaxError& e) {
      keep(e);
      pos_ = save;
    } catch (const UnboundVariable&) {
      pos_ = save;
    }
    if (at(Tok::LParen)) {
      try {
        take();
        FormulaPtr f = formula();
        expect(Tok::RParen, "')'");
        return f;
      } catch (const SyntaxError& e) {
        keep(e);
        pos_ = save;
      }
    }
    if (best) throw *best;
    throw SyntaxError(cur().pos, "expected an atom (term where formula expected?)");
  }

  FormulaPtr prob_abbrev() {
    take();  // Pr
    expect(Tok::LBrack, "'['");
    FormulaPtr body;
    {
      Binder b(*this, kSampleVar, Type::omega());
      body = formula();
    }
    expect(Tok::RBrack, "']'");
    bool geq;
    if (at(Tok::Ge)) geq = true;
    else if (at(Tok::Le)) geq = false;
    else throw SyntaxError(cur().pos, "expected '>=' or '<=' after Pr[...]");
    take();
    RealPtr lam = real();
    return geq ? mk_probgeq(std::move(body), std::move(lam))
               : mk_probleq(std::move(body), std::move(lam));
  }

  // expr precedence: 0 union/lambda, 1 complement, 2 application, 3 primary
  ExprPtr expr() { return expr_at(0); }

  ExprPtr expr_at(int prec) {
    if (prec <= 0 && at(Tok::Backslash)) return lambda();
    ExprPtr e = expr_compl();
    if (prec <= 0) {
      while (at(Tok::Union)) {
        take();
        e = mk_union(std::move(e), expr_compl());
      }
    }
    return e;
  }

  ExprPtr lambda() {
    take();  // backslash
    if (!at(Tok::Ident) || is_keyword(cur().text))
      throw SyntaxError(cur().pos, "expected a variable after '\\'");
    std::string v = take().text;
    expect(Tok::Colon, "':' in lambda");
    Type t = type();
    expect(Tok::Dot, "'.' in lambda");
    ExprPtr body;
    {
      Binder b(*this, v, t);
      body = expr();
    }
    return mk_lam(v, t, std::move(body));
  }

  ExprPtr expr_compl() {
    ExprPtr e = expr_app();
    while (at(Tok::Compl)) {
      take();
      e = mk_compl(std::move(e));
    }
    return e;
  }

  ExprPtr expr_app() {
    ExprPtr e = expr_primary();
    while (starts_primary()) e = mk_app(std::move(e), expr_primary());
    return e;
  }

  bool starts_primary() const {
    switch (cur().kind) {
      case Tok::Num:
      case Tok::LParen:
      case Tok::LBrace:
        return true;
      case Tok::Ident:
        return !is_keyword(cur().text) || cur().text == "min" || cur().text == "empty" ||
               cur().text == "up";
      default:
        return false;
    }
  }

  ExprPtr expr_primary() {
    bool no_annot = suppress_annotation_;
    suppress_annotation_ = false;
    if (at(Tok::Num)) {
      return mk_natlit(std::stoull(take().text));
    }
    if (at(Tok::LParen)) {
      take();
      ExprPtr e = expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (at(Tok::LBrace)) {
      take();
      std::vector<std::string> atoms;
      while (at(Tok::Ident)) atoms.push_back(take().text);
      expect(Tok::RBrace, "'}'");
      return mk_setlit(std::move(atoms));
    }
    if (at_kw("empty")) {
      take();
      return mk_empty();
    }
    if (at_kw("up")) {
      take();
      return mk_const("up", Type::arrow(Type::arrow(Type::ev(), Type::nat()),
                                        Type::arrow(Type::ev(), Type::nat())));
    }
    if (at_kw("min")) {
      take();
      expect(Tok::LParen, "'(' after min");
      ExprPtr a = expr();
      expect(Tok::Comma, "',' in min");
      ExprPtr b = expr();
      expect(Tok::RParen, "')' after min");
      return mk_min(Type::nat(), std::move(a), std::move(b));
    }
    if (at(Tok::Ident) && !is_keyword(cur().text)) {
      std::string name = take().text;
      if (!no_annot && at(Tok::Colon)) {
        take();
        Type t = type();
        return mk_var(name, t);
      }
      auto it = ctx_.find(name);
      if (it == ctx_.end()) throw UnboundVariable(name);
      return mk_var(name, it->second);
    }
    throw SyntaxError(cur().pos, "expected a term");
  }

  // real precedence: 0 add/sub, 1 primary
  RealPtr real() {
    RealPtr l = real_primary();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      bool add = take().kind == Tok::Plus;
      RealPtr r = real_primary();
      l = add ? mk_add(std::move(l), std::move(r)) : mk_sub(std::move(l), std::move(r));
    }
    return l;
  }

  RealPtr real_primary() {
    if (at(Tok::Minus) && peek().kind == Tok::Num) {
      take();
      Rat v = real_number();
      return mk_ratlit(-v);
    }
    if (at(Tok::Num)) return mk_ratlit(real_number());
    if (at(Tok::PowHalf)) {
      take();
      return mk_powhalf(expr_at(3));
    }
    if (at(Tok::LParen)) {
      take();
      RealPtr t = real();
      expect(Tok::RParen, "')'");
      return t;
    }
    if (at_kw("Pr")) {
      take();
      expect(Tok::LParen, "'(' after Pr");
      ExprPtr set = expr();
      expect(Tok::RParen, "')' after Pr");
      return mk_prob(std::move(set));
    }
    if (at_kw("min")) {
      take();
      expect(Tok::LParen, "'(' after min");
      RealPtr a = real();
      expect(Tok::Comma, "',' in min");
      RealPtr b = real();
      expect(Tok::RParen, "')' after min");
      return mk_rmin(std::move(a), std::move(b));
    }
    if (at_kw("sum")) {
      take();
      expect(Tok::LParen, "'(' after sum");
      if (!at(Tok::Ident) || is_keyword(cur().text))
        throw SyntaxError(cur().pos, "expected a binder variable in sum");
      std::string v = take().text;
      expect(Tok::Comma, "',' in sum");
      ExprPtr upto = expr();
      expect(Tok::Comma, "',' in sum");
      RealPtr body;
      {
        Binder b(*this, v, Type::nat());
        body = real();
      }
      expect(Tok::RParen, "')' after sum");
      return mk_sum(v, std::move(upto), std::move(body));
    }
    if (at(Tok::Ident) && !is_keyword(cur().text)) {
      std::string name = take().text;
      if (at(Tok::LBrack)) {
        take();
        ExprPtr idx = expr();
        expect(Tok::RBrack, "']'");
        return mk_seqat(name, std::move(idx));
      }
      return mk_realvar(name);
    }
    throw SyntaxError(cur().pos, "expected a real term");
  }

  Rat real_number() {
    long long p = std::stoll(take().text);
    if (at(Tok::Slash) && peek().kind == Tok::Num) {
      take();
      long long q = std::stoll(take().text);
      if (q == 0) throw SyntaxError(cur().pos, "zero denominator");
      return Rat(p, q);
    }
    return Rat(p);
  }
};

}  // namespace detail

inline FormulaPtr parse_formula(const std::string& text, std::map<std::string, Type> ctx = {}) {
  return detail::Parser(text, std::move(ctx)).parse_formula_all();
}
inline ExprPtr parse_expr(const std::string& text, std::map<std::string, Type> ctx = {}) {
  return detail::Parser(text, std::move(ctx)).parse_expr_all();
}
inline RealPtr parse_real(const std::string& text, std::map<std::string, Type> ctx = {}) {
  return detail::Parser(text, std::move(ctx)).parse_real_all();
}
inline Type parse_type(const std::string& text) {
  return detail::Parser(text, {}).parse_type_all();
}

}  // namespace probmine
