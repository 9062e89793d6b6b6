#pragma once

// The determinant method on a nonsingular pencil: the dimension of the
// degree-2k piece of the coordinate ring, the distinguished 8k-monomial
// basis, evaluation matrices at rational points, the Hadamard size
// certificate, the two exact divisibility certificates (prime powers from a
// shared congruence class, height powers from the Grassmann expansion), the
// Vandermonde factor, auxiliary vanishing forms, and the arithmetic helpers
// around the choice of auxiliary prime.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpencil/errors.hpp"
#include "qpencil/integers.hpp"
#include "qpencil/matrix.hpp"
#include "qpencil/pencil.hpp"
#include "qpencil/points.hpp"

namespace qpencil {

namespace detail {

inline unsigned long binom3(long n) {
  // C(n, 3) with the usual convention of 0 for n < 3.
  if (n < 3) return 0;
  return static_cast<unsigned long>(n) * (n - 1) * (n - 2) / 6;
}

}  // namespace detail

// Dimension of the degree-k piece of the homogeneous coordinate ring of a
// nonsingular (2,2) intersection, via the Koszul alternating sum
//   C(k+3,3) - 2 C(k+1,3) + C(k-1,3).
// The value equals 4k for every k >= 1.
inline unsigned long dim_coordinate_ring(unsigned long k) {
  if (k < 1) throw argument_error("dim_coordinate_ring: k must be >= 1");
  long n = static_cast<long>(k);
  return detail::binom3(n + 3) - 2 * detail::binom3(n + 1) +
         detail::binom3(n - 1);
}

// Exponent quadruples of the distinguished monomial section basis in degree
// 2k: every monomial has x2- and x3-exponent at most 1, listed in the eight
// display groups {1, x2, x3, x2 x3} x {even, odd} in x1.
inline std::vector<std::array<unsigned, 4>> degree2k_basis_exponents(
    unsigned k) {
  if (k < 1) throw argument_error("degree2k_basis_exponents: k must be >= 1");
  std::vector<std::array<unsigned, 4>> out;
  out.reserve(8 * k);
  struct Group {
    unsigned e2, e3, q_parity;
  };
  const Group groups[8] = {{0, 0, 0}, {0, 0, 1}, {1, 0, 0}, {1, 0, 1},
                           {0, 1, 0}, {0, 1, 1}, {1, 1, 0}, {1, 1, 1}};
  for (const Group& g : groups) {
    const unsigned deg = 2 * k - g.e2 - g.e3;
    long p0 = static_cast<long>(deg) - static_cast<long>(g.q_parity);
    for (long p = p0; p >= 0; p -= 2) {
      unsigned q = deg - static_cast<unsigned>(p);
      out.push_back({static_cast<unsigned>(p), q, g.e2, g.e3});
    }
  }
  if (out.size() != 8 * k)
    throw theorem_violation_error(
        "degree2k_basis_exponents: group sizes do not sum to 8k");
  return out;
}

// The basis together with the coordinate relabeling that realises it: the
// exponents live in permuted coordinates, with the lexicographically first
// maximal minor moved to positions (2, 3).
struct MonomialBasis {
  unsigned k = 0;
  std::array<int, 4> perm{0, 1, 2, 3};
  std::vector<std::array<unsigned, 4>> exponents;
};

inline MonomialBasis basis_s2k(const DiagonalPencil& c, unsigned k) {
  if (!is_nonsingular(c))
    throw singular_pencil_error(
        "basis_s2k: the section basis needs a nonsingular pencil");
  MonomialBasis b;
  b.k = k;
  b.perm = max_minor_permutation(c);
  b.exponents = degree2k_basis_exponents(k);
  return b;
}

namespace detail {

// All exponent quadruples of total degree d, lexicographic.
inline std::vector<std::array<unsigned, 4>> monomials_of_degree(unsigned d) {
  std::vector<std::array<unsigned, 4>> out;
  for (unsigned e0 = 0; e0 <= d; ++e0)
    for (unsigned e1 = 0; e0 + e1 <= d; ++e1)
      for (unsigned e2 = 0; e0 + e1 + e2 <= d; ++e2)
        out.push_back({e0, e1, e2, d - e0 - e1 - e2});
  return out;
}

}  // namespace detail

// Check that the 8k basis monomials stay independent modulo the degree-2k
// piece of the ideal (q, r): the rank of the ideal rows must grow by exactly
// 8k when the basis rows are stacked on top.
inline bool verify_basis_independence(const DiagonalPencil& c, unsigned k,
                                      const std::array<int, 4>& perm) {
  if (k < 1) throw argument_error("verify_basis_independence: k must be >= 1");
  DiagonalPencil pc = apply_permutation(c, perm);
  auto cols = detail::monomials_of_degree(2 * k);
  std::map<std::array<unsigned, 4>, std::size_t> col_of;
  for (std::size_t j = 0; j < cols.size(); ++j) col_of[cols[j]] = j;

  auto mult = detail::monomials_of_degree(2 * k - 2);
  IntMatrix ideal(2 * mult.size(), cols.size());
  for (std::size_t m = 0; m < mult.size(); ++m) {
    for (int i = 0; i < 4; ++i) {
      std::array<unsigned, 4> e = mult[m];
      e[i] += 2;
      std::size_t j = col_of.at(e);
      ideal(2 * m, j) += pc.a[i];
      ideal(2 * m + 1, j) += pc.b[i];
    }
  }
  std::size_t rank_ideal = rank_exact(ideal);

  auto basis = degree2k_basis_exponents(k);
  IntMatrix stacked(ideal.rows() + basis.size(), cols.size());
  for (std::size_t i = 0; i < ideal.rows(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) stacked(i, j) = ideal(i, j);
  for (std::size_t r = 0; r < basis.size(); ++r)
    stacked(ideal.rows() + r, col_of.at(basis[r])) = 1;
  std::size_t rank_stacked = rank_exact(stacked);

  return rank_stacked - rank_ideal == basis.size();
}

inline bool verify_basis_independence(const DiagonalPencil& c, unsigned k) {
  return verify_basis_independence(c, k, max_minor_permutation(c));
}

struct EvalMatrix {
  DiagonalPencil pencil;
  MonomialBasis basis;
  std::vector<ProjectivePoint> points;
  IntMatrix entries;
  bool has_duplicate_points = false;
};

// Evaluation matrix M[i][j] = (basis monomial j)(point i), in the permuted
// coordinates of the basis. Entry (i, j) is bounded by H(P_i)^{2k}.
inline EvalMatrix eval_matrix(const DiagonalPencil& c,
                              const std::vector<ProjectivePoint>& pts,
                              unsigned k) {
  if (pts.empty())
    throw argument_error("eval_matrix: need at least one point");
  for (const ProjectivePoint& pt : pts)
    if (!on_curve(c, pt.x))
      throw argument_error("eval_matrix: a supplied point is not on the curve");
  MonomialBasis basis = basis_s2k(c, k);
  IntMatrix m(pts.size(), basis.exponents.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Quad x;
    for (int t = 0; t < 4; ++t) x[t] = pts[i].x[basis.perm[t]];
    for (std::size_t j = 0; j < basis.exponents.size(); ++j) {
      Int v = 1;
      for (int t = 0; t < 4; ++t)
        if (basis.exponents[j][t] != 0)
          v *= pow_int(x[t], basis.exponents[j][t]);
      m(i, j) = v;
    }
  }
  bool dup = false;
  std::vector<ProjectivePoint> sorted = pts;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (sorted[i] == sorted[i + 1]) dup = true;
  return EvalMatrix{c, std::move(basis), pts, std::move(m), dup};
}

// |det M| <= (8k)^{4k} B^{16 k^2} for a full 8k x 8k evaluation matrix at
// points of height <= B. Returns whether the bound holds (it always must).
inline bool hadamard_certificate(const EvalMatrix& m, const Int& B) {
  const unsigned k = m.basis.k;
  if (m.entries.rows() != 8 * k || m.entries.cols() != 8 * k)
    throw argument_error("hadamard_certificate: matrix must be 8k x 8k");
  for (const ProjectivePoint& pt : m.points)
    if (pt.height > B)
      throw argument_error(
          "hadamard_certificate: a point exceeds the stated height bound");
  Int det = abs_int(det_exact(m.entries));
  Int bound = pow_int(Int(8 * k), 4 * k) * pow_int(B, 16ul * k * k);
  return det <= bound;
}

struct DivisibilityCertificate {
  std::string kind;  // "class" or "height"
  Int base;          // the prime p, or the height H(C)
  unsigned long required = 0;
  Valuation observed;
  Int det;  // witness determinant: the minimising minor, or the full det
  bool verified = false;
};

namespace detail {

inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t r = idx.size();
  std::size_t i = r;
  while (i > 0) {
    --i;
    if (idx[i] != i + n - r) {
      ++idx[i];
      for (std::size_t j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace detail

// Certificate that every E x E minor of an evaluation matrix whose rows all
// reduce to one point of C(F_p) has p-adic valuation >= E(E-1)/2. The
// observed valuation is the minimum over all column choices (infinite when
// every minor vanishes).
inline DivisibilityCertificate class_divisibility(const EvalMatrix& m,
                                                  const Int& p) {
  const std::size_t E = m.entries.rows();
  const std::size_t cols = m.entries.cols();
  if (E > cols)
    throw argument_error(
        "class_divisibility: more rows than basis monomials; pass at most 8k "
        "same-class points");
  FpPoint cls = reduce_mod_p(m.pencil, m.points.at(0), p);
  for (const ProjectivePoint& pt : m.points)
    if (!(reduce_mod_p(m.pencil, pt, p) == cls))
      throw argument_error(
          "class_divisibility: rows reduce to different points mod p");

  DivisibilityCertificate cert;
  cert.kind = "class";
  cert.base = p;
  cert.required = static_cast<unsigned long>(E) * (E - 1) / 2;

  {
    // C(cols, E) submatrices of size E x E; refuse absurd workloads.
    double combos = 1.0;
    for (std::size_t i = 0; i < E; ++i)
      combos *= static_cast<double>(cols - i) / static_cast<double>(i + 1);
    if (combos * static_cast<double>(E * E * E) > 5e8)
      throw resource_error(
          "class_divisibility: too many minors to scan; pass fewer rows");
  }

  std::vector<std::size_t> rows(E);
  for (std::size_t i = 0; i < E; ++i) rows[i] = i;
  std::vector<std::size_t> pick(E);
  for (std::size_t i = 0; i < E; ++i) pick[i] = i;
  std::optional<unsigned long> min_val;
  Int min_det = 0;
  while (true) {
    Int d = det_exact(m.entries.submatrix(rows, pick));
    if (d != 0) {
      Valuation v = valuation(d, p);
      if (!min_val || v.exponent < *min_val) {
        min_val = v.exponent;
        min_det = d;
      }
    }
    if (!detail::next_combination(pick, cols)) break;
  }
  if (min_val) {
    cert.observed = Valuation::of(*min_val);
    cert.det = min_det;
  } else {
    cert.observed = Valuation::infinity();
    cert.det = 0;
  }
  cert.verified = cert.observed.at_least(cert.required);
  if (!cert.verified)
    throw theorem_violation_error(
        "class_divisibility: observed valuation below E(E-1)/2");
  return cert;
}

// Certificate that H(C)^{4k^2-4k+1} divides det M for a full 8k x 8k
// evaluation matrix on a primitive nonsingular pencil.
inline DivisibilityCertificate height_divisibility(
    const DiagonalPencil& c, const std::vector<ProjectivePoint>& pts,
    unsigned k) {
  if (!is_primitive(c))
    throw argument_error("height_divisibility: pencil must be primitive");
  if (pts.size() != 8ul * k)
    throw argument_error("height_divisibility: need exactly 8k points");
  EvalMatrix m = eval_matrix(c, pts, k);
  DivisibilityCertificate cert;
  cert.kind = "height";
  cert.base = height(c);
  cert.required = 4ul * k * k - 4ul * k + 1;
  cert.det = det_exact(m.entries);
  if (cert.det == 0 || cert.base == 1)
    cert.observed = Valuation::infinity();
  else
    cert.observed = valuation(cert.det, cert.base);
  cert.verified = cert.observed.at_least(cert.required);
  if (!cert.verified)
    throw theorem_violation_error(
        "height_divisibility: determinant misses the required height power");
  return cert;
}

// prod_{i<j} (alpha_i beta_j - alpha_j beta_i), the generalised Vandermonde
// factor of a same-class determinant expansion.
inline Int vandermonde_product(const std::vector<Int>& alpha,
                               const std::vector<Int>& beta) {
  if (alpha.size() != beta.size())
    throw argument_error("vandermonde_product: length mismatch");
  Int prod = 1;
  for (std::size_t i = 0; i < alpha.size(); ++i)
    for (std::size_t j = i + 1; j < alpha.size(); ++j)
      prod *= alpha[i] * beta[j] - alpha[j] * beta[i];
  return prod;
}

// Exact threshold comparison
//   p > 2 B^{4k/(8k-1)} / H^{(4k^2-4k+1)/(4k(8k-1))}
// cross-multiplied into integer powers:
//   p^{4k(8k-1)} H^{4k^2-4k+1} > 2^{4k(8k-1)} B^{16k^2}.
inline bool prime_exceeds_threshold(const Int& p, unsigned k, const Int& B,
                                    const Int& H) {
  if (k < 1 || p < 1 || B < 1 || H < 1)
    throw argument_error("prime_exceeds_threshold: need k, p, B, H >= 1");
  const unsigned long e = 4ul * k * (8ul * k - 1);
  const unsigned long n = 4ul * k * k - 4ul * k + 1;
  return pow_int(p, e) * pow_int(H, n) > pow_int(Int(2), e) * pow_int(B, 16ul * k * k);
}

// Smallest good prime strictly above the determinant-method threshold. The
// default curve_height = 1 keeps the curve-independent (weakest, hence
// always sufficient) threshold; pass height(c) for the sharp one.
inline Int choose_prime(const DiagonalPencil& c, unsigned k, const Int& B,
                        const Int& curve_height = Int(1)) {
  if (k < 1 || B < 1)
    throw argument_error("choose_prime: need k >= 1 and B >= 1");
  PluckerSixtuple reduced = plucker(primitive_reduce(c));
  Int p = 2;
  while (true) {
    p = next_prime_above(p);
    if (!prime_exceeds_threshold(p, k, B, curve_height)) continue;
    if (detail::is_good_prime_for(reduced, p)) return p;
  }
}

// Points of C(Q) in one residue class lie on a curve of degree 8k cut by an
// auxiliary form, so each class holds at most 8k of them.
inline unsigned long bezout_class_bound(unsigned k) {
  if (k < 1) throw argument_error("bezout_class_bound: k must be >= 1");
  return 8ul * k;
}

// Determinant-method bound n_p * 8k on N(B), at the auxiliary prime chosen
// for (B, k).
inline Int dm_upper_bound(const DiagonalPencil& c, const Int& B, unsigned k) {
  Int p = choose_prime(c, k, B);
  std::uint64_t np = count_points_mod_p(c, p);
  return Int(static_cast<unsigned long>(np)) * Int(8ul * k);
}

struct AuxiliaryForm {
  MonomialBasis basis;
  std::vector<Int> coefficients;  // content 1, first nonzero positive
};

namespace detail {

inline Int evaluate_in_basis(const MonomialBasis& basis,
                             const std::vector<Int>& coeffs, const Quad& x) {
  Quad y;
  for (int t = 0; t < 4; ++t) y[t] = x[basis.perm[t]];
  Int total = 0;
  for (std::size_t j = 0; j < basis.exponents.size(); ++j) {
    if (coeffs[j] == 0) continue;
    Int v = coeffs[j];
    for (int t = 0; t < 4; ++t)
      if (basis.exponents[j][t] != 0) v *= pow_int(y[t], basis.exponents[j][t]);
    total += v;
  }
  return total;
}

}  // namespace detail

// A nonzero form in the 8k-monomial basis vanishing at all supplied points,
// or nullopt when the evaluation matrix already has full column rank. Any
// list of at most 8k - 1 points yields a form.
inline std::optional<AuxiliaryForm> auxiliary_form(
    const DiagonalPencil& c, const std::vector<ProjectivePoint>& pts,
    unsigned k) {
  if (pts.empty()) {
    MonomialBasis basis = basis_s2k(c, k);
    std::vector<Int> coeffs(basis.exponents.size(), 0);
    coeffs[0] = 1;
    return AuxiliaryForm{std::move(basis), std::move(coeffs)};
  }
  EvalMatrix m = eval_matrix(c, pts, k);
  auto v = rational_kernel_vector(m.entries);
  if (!v) return std::nullopt;
  for (const ProjectivePoint& pt : pts)
    if (detail::evaluate_in_basis(m.basis, *v, pt.x) != 0)
      throw theorem_violation_error(
          "auxiliary_form: kernel form fails to vanish at an input point");
  return AuxiliaryForm{std::move(m.basis), std::move(*v)};
}

// s = 4 (m^2 a + b), defined only under 1/a + m^2/b < 4; checked exactly as
// b + m^2 a < 4 a b.
inline Int s_formula(unsigned long a, unsigned long b, unsigned long m) {
  if (a < 1 || b < 1 || m < 1)
    throw argument_error("s_formula: need a, b, m >= 1");
  Int ia(a), ib(b), im(m);
  if (!(ib + im * im * ia < 4 * ia * ib))
    throw constraint_error("s_formula: constraint 1/a + m^2/b < 4 fails");
  return 4 * (im * im * ia + ib);
}

}  // namespace qpencil
