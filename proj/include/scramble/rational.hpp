#pragma once

#include <gmpxx.h>

#include <string>

#include "scramble/errors.hpp"

namespace scramble {

using Rational = mpq_class;

inline Rational parse_rational(const std::string& text) {
  Rational r;
  std::string s = text;
  if (s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
      s.find('E') != std::string::npos) {
    // Decimal literals are taken as the exact binary value of the double.
    try {
      r = Rational(std::stod(s));
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "bad number '" + text + "'");
    }
    return r;
  }
  if (r.set_str(s, 10) != 0) fail(ErrorCode::ParseError, "bad rational '" + text + "'");
  if (r.get_den() == 0) fail(ErrorCode::ParseError, "zero denominator in '" + text + "'");
  r.canonicalize();
  return r;
}

// num/den in lowest terms; the two-argument mpq constructor does not reduce.
template <class A, class B>
inline Rational ratio(const A& num, const B& den) {
  Rational r{mpz_class(num), mpz_class(den)};
  if (r.get_den() == 0) fail(ErrorCode::InvalidArgument, "zero denominator");
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(10); }

inline double to_double(const Rational& r) { return r.get_d(); }

inline Rational abs_value(const Rational& r) { return r < 0 ? Rational(-r) : r; }

// 2^{-k} as an exact rational.
inline Rational pow2_neg(int k) {
  mpz_class den = 1;
  den <<= static_cast<mp_bitcnt_t>(k);
  return Rational(mpz_class(1), den);
}

}  // namespace scramble
