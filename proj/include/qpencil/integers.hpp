#pragma once

// Exact scalars and the shared number-theory helpers: arbitrary-precision
// integers and rationals (GMP), vector gcds, p-adic valuations, deterministic
// primality, and prime ranges.

#include <gmpxx.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qpencil/errors.hpp"

namespace qpencil {

using Int = mpz_class;
using Rat = mpq_class;
using Quad = std::array<Int, 4>;

inline Int abs_int(const Int& v) {
  Int r;
  mpz_abs(r.get_mpz_t(), v.get_mpz_t());
  return r;
}

inline Int pow_int(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

// Exact quotient; the caller guarantees divisibility.
inline Int div_exact(const Int& n, const Int& d) {
  if (d == 0) throw argument_error("div_exact: zero divisor");
  Int r;
  mpz_divexact(r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  return r;
}

template <class It>
Int gcd_range(It first, It last) {
  Int g = 0;
  for (It it = first; it != last; ++it)
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), it->get_mpz_t());
  return g;
}

// gcd of a nonempty list, taken over absolute values; all-zero input gives 0.
inline Int gcd_vec(const std::vector<Int>& values) {
  if (values.empty()) throw argument_error("gcd_vec: empty input");
  return gcd_range(values.begin(), values.end());
}

// Outcome of a p-adic valuation. v_p(0) is infinite and must stay
// distinguishable from every finite exponent, so this is a sum type rather
// than a sentinel integer.
struct Valuation {
  bool infinite = false;
  unsigned long exponent = 0;

  static Valuation of(unsigned long e) { return Valuation{false, e}; }
  static Valuation infinity() { return Valuation{true, 0}; }

  bool at_least(unsigned long e) const { return infinite || exponent >= e; }
  friend bool operator==(const Valuation&, const Valuation&) = default;
};

// Largest e with base^e | n, for any base >= 2 (not only primes).
inline Valuation valuation(const Int& n, const Int& base) {
  if (base < 2) throw argument_error("valuation: base must be at least 2");
  if (n == 0) return Valuation::infinity();
  Int reduced;
  mp_bitcnt_t e =
      mpz_remove(reduced.get_mpz_t(), n.get_mpz_t(), base.get_mpz_t());
  return Valuation::of(static_cast<unsigned long>(e));
}

namespace detail {

inline const std::array<unsigned, 13>& mr_bases() {
  static const std::array<unsigned, 13> bases = {2,  3,  5,  7,  11, 13, 17,
                                                 19, 23, 29, 31, 37, 41};
  return bases;
}

// Largest bound below which the first 13 prime bases are a proven
// deterministic witness set (Sorenson-Webster).
inline const Int& mr_proven_limit() {
  static const Int limit("3317044064679887385961981");
  return limit;
}

inline bool mr_witness_composite(const Int& n, unsigned long a, const Int& d,
                                 unsigned long s) {
  Int x, base(a);
  mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == n - 1) return false;
  for (unsigned long i = 1; i < s; ++i) {
    mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
    if (x == n - 1) return false;
  }
  return true;
}

}  // namespace detail

// Deterministic primality. Within the proven witness range this is exact;
// larger inputs are refused rather than answered probabilistically.
inline bool is_prime(const Int& n) {
  if (n < 2) return false;
  for (unsigned p : detail::mr_bases())
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return n == p;
  if (n >= detail::mr_proven_limit())
    throw unsupported_error(
        "is_prime: input exceeds the deterministic witness range " +
        detail::mr_proven_limit().get_str());
  static const Int two = 2;
  Int d = n - 1;
  unsigned long s = mpz_remove(d.get_mpz_t(), d.get_mpz_t(), two.get_mpz_t());
  for (unsigned a : detail::mr_bases())
    if (detail::mr_witness_composite(n, a, d, s)) return false;
  return true;
}

// Smallest certified prime strictly greater than n. mpz_nextprime never skips
// a true prime (probabilistic tests have no false negatives), so certifying
// each candidate with is_prime keeps the scan deterministic.
inline Int next_prime_above(const Int& n) {
  Int p = n < 1 ? Int(1) : n;
  while (true) {
    mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
    if (is_prime(p)) return p;
  }
}

// All primes in the half-open interval (lo, hi], ascending.
inline std::vector<Int> primes_in(const Int& lo, const Int& hi) {
  if (lo < 1) throw argument_error("primes_in: lower endpoint must be >= 1");
  if (hi < lo) throw argument_error("primes_in: empty-range endpoints must satisfy lo <= hi");
  std::vector<Int> out;
  Int p = lo;
  while (true) {
    p = next_prime_above(p);
    if (p > hi) break;
    out.push_back(p);
  }
  return out;
}

// log |n| for nonzero n, via mantissa/exponent split so huge integers are fine.
inline double log_int_abs(const Int& n) {
  if (n == 0) throw argument_error("log_int_abs: zero input");
  signed long e = 0;
  double m = mpz_get_d_2exp(&e, n.get_mpz_t());
  return std::log(std::fabs(m)) + static_cast<double>(e) * 0.6931471805599453094;
}

inline double log_rat_abs(const Rat& q) {
  if (q == 0) throw argument_error("log_rat_abs: zero input");
  return log_int_abs(Int(q.get_num())) - log_int_abs(Int(q.get_den()));
}

}  // namespace qpencil
