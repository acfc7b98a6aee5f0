#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace probmine {

// Finite types over the sorts 0 (naturals), Om (samples), Ev (events) and R
// (rational-valued reals, used only by the real-term sub-language).
// Arrow(res, arg) prints as res(arg): the type of functions from arg to res.
class Type {
 public:
  enum class Kind { Nat, Omega, Ev, Real, Arrow };

  Type() : kind_(Kind::Nat) {}
  static Type nat() { return Type(Kind::Nat); }
  static Type omega() { return Type(Kind::Omega); }
  static Type ev() { return Type(Kind::Ev); }
  static Type real() { return Type(Kind::Real); }
  static Type arrow(const Type& res, const Type& arg) {
    Type t(Kind::Arrow);
    t.res_ = std::make_shared<Type>(res);
    t.arg_ = std::make_shared<Type>(arg);
    return t;
  }

  Kind kind() const { return kind_; }
  bool is_arrow() const { return kind_ == Kind::Arrow; }
  bool is_base() const { return kind_ != Kind::Arrow; }
  const Type& result() const { return *res_; }
  const Type& argument() const { return *arg_; }

  bool operator==(const Type& o) const {
    if (kind_ != o.kind_) return false;
    if (kind_ != Kind::Arrow) return true;
    return *res_ == *o.res_ && *arg_ == *o.arg_;
  }
  bool operator!=(const Type& o) const { return !(*this == o); }

  std::string to_string() const {
    switch (kind_) {
      case Kind::Nat: return "0";
      case Kind::Omega: return "Om";
      case Kind::Ev: return "Ev";
      case Kind::Real: return "R";
      case Kind::Arrow: return res_->to_string() + "(" + arg_->to_string() + ")";
    }
    return "?";
  }

 private:
  explicit Type(Kind k) : kind_(k) {}
  Kind kind_;
  std::shared_ptr<Type> res_, arg_;
};

inline Type pure_type(unsigned n) {
  // 0 is the base sort; n+1 is the type of functions from n to 0.
  Type t = Type::nat();
  for (unsigned i = 0; i < n; ++i) t = Type::arrow(Type::nat(), t);
  return t;
}

inline Type hat_type(const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Nat:
    case Type::Kind::Omega:
    case Type::Kind::Ev:
      return Type::nat();
    case Type::Kind::Real:
      throw std::invalid_argument("hat_type: real sort has no hat image");
    case Type::Kind::Arrow:
      return Type::arrow(hat_type(t.result()), hat_type(t.argument()));
  }
  return Type::nat();
}

struct TypeClass {
  bool is_pure = false;
  unsigned degree = 0;
  bool is_small = false;
  bool is_admissible = false;
};

inline bool is_pure_type(const Type& t) {
  if (t.kind() == Type::Kind::Nat) return true;
  if (t.is_arrow()) return t.result() == Type::nat() && is_pure_type(t.argument());
  return false;
}

inline unsigned type_degree(const Type& t) {
  if (!t.is_arrow()) return 0;
  unsigned r = type_degree(t.result());
  unsigned a = type_degree(t.argument()) + 1;
  return r > a ? r : a;
}

inline bool is_small_type(const Type& t) {
  // small: sigma(0)...(0) with sigma in {0, Om, Ev}
  const Type* cur = &t;
  while (cur->is_arrow()) {
    if (cur->argument() != Type::nat()) return false;
    cur = &cur->result();
  }
  return cur->kind() == Type::Kind::Nat || cur->kind() == Type::Kind::Omega ||
         cur->kind() == Type::Kind::Ev;
}

inline bool is_admissible_type(const Type& t) {
  const Type* cur = &t;
  while (cur->is_arrow()) {
    if (!is_small_type(cur->argument())) return false;
    cur = &cur->result();
  }
  return true;
}

inline TypeClass classify_type(const Type& t) {
  return {is_pure_type(t), type_degree(t), is_small_type(t), is_admissible_type(t)};
}

}  // namespace probmine
