#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace probmine {

using Rat = boost::rational<long long>;

inline Rat rat(long long p, long long q = 1) { return Rat(p, q); }

inline Rat pow_half(unsigned m) {
  long long d = 1;
  if (m > 62) throw std::overflow_error("pow_half: exponent too large");
  d <<= m;
  return Rat(1, d);
}

inline std::string rat_to_string(const Rat& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

struct BadRational : std::runtime_error {
  explicit BadRational(const std::string& s) : std::runtime_error("BadRational: " + s) {}
};

inline Rat parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(std::stoll(s));
    long long p = std::stoll(s.substr(0, slash));
    long long q = std::stoll(s.substr(slash + 1));
    if (q == 0) throw BadRational(s);
    return Rat(p, q);
  } catch (const BadRational&) {
    throw;
  } catch (const std::exception&) {
    throw BadRational(s);
  }
}

}  // namespace probmine
