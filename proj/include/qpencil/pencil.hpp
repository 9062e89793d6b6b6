#pragma once

// The diagonal-pencil model. A pencil stores the coefficient quadruples of
//   q = a0 x0^2 + a1 x1^2 + a2 x2^2 + a3 x3^2,
//   r = b0 x0^2 + b1 x1^2 + b2 x2^2 + b3 x3^2;
// the curve q = r = 0 in P^3 depends only on the rational row span of (a, b).
// This header covers the coefficient minors (a Pluecker sixtuple), the
// Grassmannian height, primitivity and saturation, nonsingularity, good and
// bad reduction, and the Jacobian's binary-quartic / Weierstrass data.

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "qpencil/errors.hpp"
#include "qpencil/integers.hpp"
#include "qpencil/matrix.hpp"

namespace qpencil {

// Index order used for every sixtuple in this library.
inline constexpr std::array<std::pair<int, int>, 6> minor_pairs = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

struct DiagonalPencil {
  Quad a{};
  Quad b{};
  friend bool operator==(const DiagonalPencil&, const DiagonalPencil&) = default;
};

struct PluckerSixtuple {
  std::array<Int, 6> d{};  // d_ij in minor_pairs order
  Int content;             // gcd of the |d_ij|
  Int height;              // max |d_ij| / content
};

inline PluckerSixtuple plucker(const DiagonalPencil& c) {
  PluckerSixtuple s;
  Int maxabs = 0;
  for (std::size_t m = 0; m < 6; ++m) {
    auto [i, j] = minor_pairs[m];
    s.d[m] = c.a[i] * c.b[j] - c.a[j] * c.b[i];
    Int v = abs_int(s.d[m]);
    if (v > maxabs) maxabs = v;
  }
  if (maxabs == 0)
    throw degenerate_pencil_error(
        "plucker: coefficient rows are proportional, the pencil has no curve");
  s.content = gcd_range(s.d.begin(), s.d.end());
  s.height = div_exact(maxabs, s.content);
  return s;
}

inline Int height(const DiagonalPencil& c) { return plucker(c).height; }

// A pencil is primitive when the gcd of its six coefficient minors is 1,
// equivalently when the row lattice spanned by (a, b) is saturated in Z^4.
inline bool is_primitive(const DiagonalPencil& c) {
  return plucker(c).content == 1;
}

// Saturation of the row lattice; same curve, minor gcd 1, canonical basis.
inline DiagonalPencil primitive_reduce(const DiagonalPencil& c) {
  auto [u, v] = hnf_rank2(c.a, c.b);
  return DiagonalPencil{u, v};
}

// Nonsingular over Q iff no coefficient minor vanishes.
inline bool is_nonsingular(const DiagonalPencil& c) {
  PluckerSixtuple s = plucker(c);
  return std::all_of(s.d.begin(), s.d.end(),
                     [](const Int& v) { return v != 0; });
}

// Coordinate relabeling that moves the lexicographically first pair of
// maximal absolute minor to positions (2, 3); perm[m] is the original
// coordinate displayed at position m.
inline std::array<int, 4> max_minor_permutation(const DiagonalPencil& c) {
  PluckerSixtuple s = plucker(c);
  std::size_t best = 0;
  Int best_abs = abs_int(s.d[0]);
  for (std::size_t m = 1; m < 6; ++m) {
    Int v = abs_int(s.d[m]);
    if (v > best_abs) {
      best = m;
      best_abs = v;
    }
  }
  auto [i, j] = minor_pairs[best];
  std::array<int, 4> perm{};
  int pos = 0;
  for (int t = 0; t < 4; ++t)
    if (t != i && t != j) perm[pos++] = t;
  perm[2] = i;
  perm[3] = j;
  return perm;
}

inline DiagonalPencil apply_permutation(const DiagonalPencil& c,
                                        const std::array<int, 4>& perm) {
  DiagonalPencil out;
  for (int m = 0; m < 4; ++m) {
    out.a[m] = c.a[perm[m]];
    out.b[m] = c.b[perm[m]];
  }
  return out;
}

struct WeierstrassModel {
  std::array<Int, 5> quartic{};  // (e4, e3, e2, e1, e0), coefficients of
                                 // prod_i (a_i lambda + b_i mu) in lambda
  Int i_invariant;
  Int j_invariant;
  Int a4;    // y^2 = x^3 + a4 x + a6 with a4 = -27 I
  Int a6;    //                          a6 = -27 J
  Rat disc;  // (prod_{i<j} d_ij)^2 / 256
};

namespace detail {

inline Int sixtuple_product(const PluckerSixtuple& s) {
  Int p = 1;
  for (const Int& d : s.d) p *= d;
  return p;
}

}  // namespace detail

// Binary quartic of the pencil, its invariants I and J, and the short
// Weierstrass model of the Jacobian. Requires a nonsingular pencil.
inline WeierstrassModel weierstrass(const DiagonalPencil& c) {
  PluckerSixtuple s = plucker(c);
  for (const Int& d : s.d)
    if (d == 0)
      throw singular_pencil_error(
          "weierstrass: a coefficient minor vanishes, the curve is singular");

  WeierstrassModel w;
  for (unsigned mask = 0; mask < 16; ++mask) {
    Int term = 1;
    int deg = 0;
    for (int i = 0; i < 4; ++i) {
      if (mask & (1u << i)) {
        term *= c.a[i];
        ++deg;
      } else {
        term *= c.b[i];
      }
    }
    w.quartic[4 - deg] += term;
  }
  const Int& e4 = w.quartic[0];
  const Int& e3 = w.quartic[1];
  const Int& e2 = w.quartic[2];
  const Int& e1 = w.quartic[3];
  const Int& e0 = w.quartic[4];
  w.i_invariant = 12 * e4 * e0 - 3 * e3 * e1 + e2 * e2;
  w.j_invariant = 72 * e4 * e2 * e0 + 9 * e3 * e2 * e1 - 27 * e4 * e1 * e1 -
                  27 * e3 * e3 * e0 - 2 * e2 * e2 * e2;
  w.a4 = -27 * w.i_invariant;
  w.a6 = -27 * w.j_invariant;

  Int prod = detail::sixtuple_product(s);
  Int lhs = 4 * w.i_invariant * w.i_invariant * w.i_invariant -
            w.j_invariant * w.j_invariant;
  if (lhs != 27 * prod * prod)
    throw theorem_violation_error(
        "weierstrass: 4I^3 - J^2 != 27 (prod d_ij)^2");

  w.disc = Rat(prod * prod, Int(256));
  w.disc.canonicalize();
  return w;
}

// Exact rational discriminant (prod d_ij)^2 / 256 of the quartic; positive
// for every nonsingular pencil.
inline Rat discriminant(const DiagonalPencil& c) { return weierstrass(c).disc; }

namespace detail {

inline bool is_good_prime_for(const PluckerSixtuple& reduced, const Int& p) {
  if (p < 3 || !is_prime(p)) return false;
  for (const Int& d : reduced.d)
    if (mpz_divisible_p(d.get_mpz_t(), p.get_mpz_t())) return false;
  return true;
}

}  // namespace detail

// Good reduction: p odd and p does not divide any minor of the primitive
// reduction. 2 is always bad.
inline bool is_good_prime(const DiagonalPencil& c, const Int& p) {
  return detail::is_good_prime_for(plucker(primitive_reduce(c)), p);
}

// Ascending good primes up to and including limit. For a singular pencil the
// zero minor kills every candidate, so the list is empty.
inline std::vector<Int> good_primes(const DiagonalPencil& c, const Int& limit) {
  PluckerSixtuple s = plucker(primitive_reduce(c));
  std::vector<Int> out;
  for (const Int& p : primes_in(1, limit < 1 ? Int(1) : limit))
    if (detail::is_good_prime_for(s, p)) out.push_back(p);
  return out;
}

struct RankEstimate {
  double value = 0.0;
  // Whether the slope honours the c > 1/(2 log 2) constraint the growth
  // theory needs; reported, not enforced.
  bool c_ok = false;
};

// Heuristic rank proxy c * log|D| + c0 used by the bound tables; never a
// computed Mordell-Weil rank.
inline RankEstimate rank_estimate(const Rat& disc, double c, double c0) {
  RankEstimate r;
  r.c_ok = c > 1.0 / (2.0 * std::log(2.0));
  Rat a = abs(disc);
  r.value = (a > 1) ? c * log_rat_abs(a) + c0 : c0;
  return r;
}

}  // namespace qpencil
