#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scramble/errors.hpp"
#include "scramble/point.hpp"
#include "scramble/rational.hpp"
#include "scramble/word.hpp"

namespace scramble {

// beta is read as the exact binary value of the double. A positive precision
// budget widens it to [beta - budget, beta + budget] and digit emission then
// refuses to guess whenever the interval straddles a digit boundary.
struct BetaParams {
  double beta = 0.0;
  Rational beta_exact;
  int depth = 64;
  double precision_budget = 0.0;
  int b = 1;
  Word expansion_of_one;
  bool finite_expansion = false;

  int q() const { return b + 1; }
};

namespace detail {

inline mpz_class floor_q(const Rational& r) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return f;
}

// Greedy digits of x under an exact beta or a beta interval.
inline std::pair<Word, bool> greedy_digits(const Rational& x, const Rational& beta_lo,
                                           const Rational& beta_hi, int n) {
  Word digits;
  digits.reserve(static_cast<std::size_t>(std::max(n, 0)));
  Rational lo = x;
  Rational hi = x;
  bool terminated = false;
  for (int j = 0; j < n; ++j) {
    Rational ylo = beta_lo * lo;
    Rational yhi = beta_hi * hi;
    mpz_class dlo = floor_q(ylo);
    mpz_class dhi = floor_q(yhi);
    if (dlo != dhi)
      fail(ErrorCode::PrecisionExhausted,
           "digit " + std::to_string(j + 1) + " is not determined within the precision budget");
    if (!dlo.fits_sint_p() || dlo.get_si() > kMaxAlphabet)
      fail(ErrorCode::InvalidArgument, "digit exceeds the supported alphabet");
    digits.push_back(static_cast<Symbol>(dlo.get_si()));
    lo = ylo - Rational(dlo);
    hi = yhi - Rational(dhi);
    if (lo == 0 && hi == 0) terminated = true;
  }
  return {digits, terminated};
}

}  // namespace detail

inline BetaParams make_beta_params(double beta, int depth = 64, double precision_budget = 0.0) {
  if (!(beta > 1.0) || !std::isfinite(beta)) fail(ErrorCode::InvalidArgument, "beta must exceed 1");
  if (depth < 1) fail(ErrorCode::InvalidArgument, "beta digit depth must be positive");
  if (precision_budget < 0) fail(ErrorCode::InvalidArgument, "negative precision budget");
  BetaParams p;
  p.beta = beta;
  p.beta_exact = Rational(beta);
  p.depth = depth;
  p.precision_budget = precision_budget;
  const double fl = std::floor(beta);
  p.b = (fl == beta) ? static_cast<int>(beta) - 1 : static_cast<int>(fl);
  if (p.b + 1 > kMaxAlphabet) fail(ErrorCode::InvalidArgument, "beta too large for the alphabet");
  Rational lo = p.beta_exact - Rational(precision_budget);
  Rational hi = p.beta_exact + Rational(precision_budget);
  auto [digits, finite] = detail::greedy_digits(Rational(1), lo, hi, depth);
  p.expansion_of_one = std::move(digits);
  p.finite_expansion = finite;
  return p;
}

inline Word greedy_expansion(const Rational& x, const BetaParams& p, int n) {
  if (x < 0 || x > 1) fail(ErrorCode::InvalidArgument, "greedy expansion needs 0 <= x <= 1");
  if (n < 0) fail(ErrorCode::InvalidArgument, "negative digit count");
  Rational lo = p.beta_exact - Rational(p.precision_budget);
  Rational hi = p.beta_exact + Rational(p.precision_budget);
  return detail::greedy_digits(x, lo, hi, n).first;
}

inline Word greedy_expansion(double x, const BetaParams& p, int n) {
  return greedy_expansion(Rational(x), p, n);
}

struct ParryVerdict {
  bool admissible = true;
  bool boundary = false;  // some suffix tied with the expansion of 1 on the full overlap
};

inline ParryVerdict parry_check(const Word& w, const BetaParams& p) {
  for (Symbol s : w) {
    if (s > p.b) fail(ErrorCode::SymbolOutOfRange, "digit exceeds b=" + std::to_string(p.b));
  }
  ParryVerdict v;
  const std::size_t n = w.size();
  const auto& one = p.expansion_of_one;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t overlap = n - i;
    std::size_t k = 0;
    int cmp = 0;
    for (; k < overlap; ++k) {
      if (k >= one.size())
        fail(ErrorCode::DepthExceeded, "comparison needs more than " + std::to_string(one.size()) + " digits");
      if (w[i + k] != one[k]) {
        cmp = w[i + k] < one[k] ? -1 : 1;
        break;
      }
    }
    if (cmp > 0) {
      v.admissible = false;
      return v;
    }
    if (cmp == 0) v.boundary = true;
  }
  return v;
}

inline bool parry_admissible(const Word& w, const BetaParams& p) { return parry_check(w, p).admissible; }

// Decrements the digit at 1-based position j, zero-fills the rest of w and
// appends eta.
inline Word decrement_append(const Word& w, std::size_t j, const Word& eta, const BetaParams& p) {
  if (j < 1 || j > w.size()) fail(ErrorCode::InvalidArgument, "position out of range");
  if (w[j - 1] == 0) fail(ErrorCode::CannotDecrement, "digit at position " + std::to_string(j) + " is 0");
  if (!parry_admissible(w, p)) fail(ErrorCode::InvalidArgument, "w is not admissible");
  if (!parry_admissible(eta, p)) fail(ErrorCode::InvalidArgument, "eta is not admissible");
  Word out(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(j));
  out.back() = static_cast<Symbol>(out.back() - 1);
  out.resize(w.size(), 0);
  out.insert(out.end(), eta.begin(), eta.end());
  if (!parry_admissible(out, p)) throw std::logic_error("decrement_append produced an inadmissible word");
  return out;
}

struct ReachResult {
  LazyPoint eta;
  Index shift = 0;
};

// Finds eta in the cylinder [u] with sigma^k eta = omega.
inline ReachResult reach_target(const LazyPoint& omega, const Word& u, const BetaParams& p) {
  if (omega.q() != p.q()) fail(ErrorCode::AlphabetMismatch, "omega alphabet differs from the beta alphabet");
  if (u.empty()) return {omega, 0};
  if (!parry_admissible(u, p)) fail(ErrorCode::NoRepresentative, "cylinder word is not admissible");
  const Word head = omega.prefix(static_cast<Index>(u.size()));
  if (head == u) return {omega, 0};
  Word probe = u;
  for (int m = 1; m <= p.depth; ++m) {
    probe.push_back(1);
    if (parry_admissible(probe, p)) {
      probe.back() = 0;  // u 0^m
      Piece lead;
      lead.start = 0;
      lead.end = static_cast<Index>(probe.size());
      lead.kind = PieceKind::Literal;
      lead.literal = probe;
      Piece rest;
      rest.start = lead.end;
      rest.end = kUnbounded;
      rest.kind = PieceKind::Source;
      rest.source = omega.plan_ptr();
      rest.source_offset = 0;
      LazyPoint eta = LazyPoint::glued({lead, rest}, p.q());
      const Word check = eta.prefix(std::min<Index>(lead.end + p.depth / 2, p.depth));
      if (!parry_admissible(check, p))
        fail(ErrorCode::NoRepresentative, "omega does not fit behind the cylinder representative");
      return {eta, lead.end};
    }
    probe.back() = 0;
  }
  fail(ErrorCode::NoRepresentative, "no representative strictly below the expansion of 1 within depth");
}

}  // namespace scramble
