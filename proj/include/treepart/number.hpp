#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace treepart {

using Rational = mpq_class;

template <class Num>
struct num_traits;

template <>
struct num_traits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "float";
  static double eps() { return 1e-9; }
};

template <>
struct num_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "exact";
  static Rational eps() { return 0; }
};

// Brings a value into canonical form; rationals built from (p, q) are not reduced by gmp.
inline void normalize(double&) {}
inline void normalize(Rational& x) { x.canonicalize(); }

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.get_d(); }

inline std::string num_to_string(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline std::string num_to_string(const Rational& x) { return x.get_str(); }

// Tolerant equality: exact for rationals, relative eps for doubles.
inline bool near_eq(double a, double b) {
  return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
}
inline bool near_eq(const Rational& a, const Rational& b) { return a == b; }

inline bool near_le(double a, double b) { return a <= b || near_eq(a, b); }
inline bool near_le(const Rational& a, const Rational& b) { return a <= b; }

// Accepts integers, decimals with optional exponent, and p/q fractions.
inline Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty number");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rational p = parse_rational(s.substr(0, slash));
    Rational q = parse_rational(s.substr(slash + 1));
    if (q == 0) throw std::invalid_argument("zero denominator: " + s);
    Rational r = p / q;
    r.canonicalize();
    return r;
  }
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  std::string digits;
  long frac = 0;
  bool any = false, dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c >= '0' && c <= '9') {
      digits += c;
      any = true;
      if (dot) ++frac;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!any) throw std::invalid_argument("bad number: " + s);
  long ex = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') throw std::invalid_argument("bad number: " + s);
    ++i;
    std::size_t used = 0;
    try {
      ex = std::stol(s.substr(i), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number: " + s);
    }
    if (i + used != s.size()) throw std::invalid_argument("bad number: " + s);
  }
  ex -= frac;
  mpz_class m(digits, 10);
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(ex < 0 ? -ex : ex));
  Rational r = ex >= 0 ? Rational(m * p10) : Rational(m, p10);
  r.canonicalize();
  return neg ? Rational(-r) : r;
}

template <class Num>
Num parse_num(const std::string& s);

template <>
inline Rational parse_num<Rational>(const std::string& s) {
  return parse_rational(s);
}

template <>
inline double parse_num<double>(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    double q = parse_num<double>(s.substr(slash + 1));
    if (q == 0) throw std::invalid_argument("zero denominator: " + s);
    return parse_num<double>(s.substr(0, slash)) / q;
  }
  parse_rational(s);
  return std::strtod(s.c_str(), nullptr);
}

template <class Num>
Num from_double(double x) {
  return Num(x);
}

// Extended non-negative cost: a value or +infinity.
template <class Num>
struct Cost {
  Num v{0};
  bool inf = false;

  Cost() = default;
  Cost(const Num& x) : v(x) {}
  static Cost infinity() {
    Cost c;
    c.inf = true;
    return c;
  }

  bool is_inf() const { return inf; }
  double as_double() const {
    return inf ? std::numeric_limits<double>::infinity() : to_double(v);
  }

  friend bool operator==(const Cost& a, const Cost& b) {
    if (a.inf || b.inf) return a.inf == b.inf;
    return a.v == b.v;
  }
  friend bool operator<(const Cost& a, const Cost& b) {
    if (a.inf) return false;
    if (b.inf) return true;
    return a.v < b.v;
  }
  friend bool operator<=(const Cost& a, const Cost& b) { return !(b < a); }
  friend bool operator>(const Cost& a, const Cost& b) { return b < a; }
  friend bool operator>=(const Cost& a, const Cost& b) { return !(a < b); }
  friend bool operator!=(const Cost& a, const Cost& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const Cost& c) {
    return os << c.str();
  }
  std::string str() const { return inf ? std::string("inf") : num_to_string(v); }
};

template <class Num>
Cost<Num> cmax(const Cost<Num>& a, const Cost<Num>& b) {
  return a < b ? b : a;
}

template <class Num>
Cost<Num> cmin(const Cost<Num>& a, const Cost<Num>& b) {
  return b < a ? b : a;
}

template <class Num>
Cost<Num> parse_cost(const std::string& s) {
  if (s == "inf" || s == "+inf" || s == "infinity") return Cost<Num>::infinity();
  return Cost<Num>(parse_num<Num>(s));
}

}  // namespace treepart
