#pragma once

// Exact integer linear algebra: Bareiss (fraction-free) determinants and
// ranks, canonical rational kernel vectors, saturated integer kernel bases,
// and rank-2 lattice saturation in Hermite normal form.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "qpencil/errors.hpp"
#include "qpencil/integers.hpp"

namespace qpencil {

class IntMatrix {
 public:
  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {
    if (rows == 0 || cols == 0)
      throw argument_error("IntMatrix: dimensions must be positive");
  }

  static IntMatrix from_rows(const std::vector<std::vector<Int>>& rows) {
    if (rows.empty() || rows.front().empty())
      throw argument_error("IntMatrix: dimensions must be positive");
    IntMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_)
        throw argument_error("IntMatrix: ragged row lengths");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Int& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Int& operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < cols_; ++c)
      std::swap((*this)(i, c), (*this)(j, c));
  }

  IntMatrix submatrix(const std::vector<std::size_t>& row_idx,
                      const std::vector<std::size_t>& col_idx) const {
    IntMatrix s(row_idx.size(), col_idx.size());
    for (std::size_t i = 0; i < row_idx.size(); ++i)
      for (std::size_t j = 0; j < col_idx.size(); ++j)
        s(i, j) = (*this)(row_idx[i], col_idx[j]);
    return s;
  }

  friend bool operator==(const IntMatrix& x, const IntMatrix& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<Int> a_;
};

// Bareiss one-step elimination: every division is exact by construction.
inline Int det_exact(IntMatrix m) {
  if (m.rows() != m.cols())
    throw argument_error("det_exact: matrix must be square");
  const std::size_t n = m.rows();
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t pivot = k;
    while (pivot < n && m(pivot, k) == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != k) {
      m.swap_rows(pivot, k);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Int t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        m(i, j) = div_exact(t, prev);
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  Int d = m(n - 1, n - 1);
  return sign == 1 ? d : Int(-d);
}

// Fraction-free elimination with column skipping; a skipped column behaves as
// if swapped to the end, so the Bareiss divisions stay exact.
inline std::size_t rank_exact(IntMatrix m) {
  const std::size_t R = m.rows(), C = m.cols();
  Int prev = 1;
  std::size_t row = 0;
  for (std::size_t col = 0; col < C && row < R; ++col) {
    std::size_t pivot = row;
    while (pivot < R && m(pivot, col) == 0) ++pivot;
    if (pivot == R) continue;
    if (pivot != row) m.swap_rows(pivot, row);
    for (std::size_t i = row + 1; i < R; ++i) {
      for (std::size_t j = col + 1; j < C; ++j) {
        Int t = m(i, j) * m(row, col) - m(i, col) * m(row, j);
        m(i, j) = div_exact(t, prev);
      }
      m(i, col) = 0;
    }
    prev = m(row, col);
    ++row;
  }
  return row;
}

namespace detail {

// Scale a rational vector to the canonical integer representative:
// content 1, first nonzero entry positive.
inline std::vector<Int> canonical_integer_vector(const std::vector<Rat>& v) {
  Int lcm = 1;
  for (const Rat& q : v)
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den().get_mpz_t());
  std::vector<Int> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rat scaled = v[i] * Rat(lcm);
    w[i] = Int(scaled.get_num());  // denominator is 1 after scaling
  }
  Int g = gcd_range(w.begin(), w.end());
  if (g == 0) throw argument_error("canonical_integer_vector: zero vector");
  for (Int& x : w) x = div_exact(x, g);
  for (const Int& x : w) {
    if (x == 0) continue;
    if (x < 0)
      for (Int& y : w) y = -y;
    break;
  }
  return w;
}

}  // namespace detail

// One canonical nonzero integer kernel vector (Gauss-Jordan over Q, free
// variable at the first non-pivot column), or nullopt at full column rank.
// The result has content 1 and positive first nonzero entry, and satisfies
// m * v = 0 exactly.
inline std::optional<std::vector<Int>> rational_kernel_vector(
    const IntMatrix& m) {
  const std::size_t R = m.rows(), C = m.cols();
  std::vector<std::vector<Rat>> a(R, std::vector<Rat>(C));
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) a[i][j] = Rat(m(i, j));

  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < C && row < R; ++col) {
    std::size_t pr = row;
    while (pr < R && a[pr][col] == 0) ++pr;
    if (pr == R) continue;
    std::swap(a[pr], a[row]);
    Rat inv = a[row][col];
    for (std::size_t j = col; j < C; ++j) a[row][j] /= inv;
    for (std::size_t i = 0; i < R; ++i) {
      if (i == row || a[i][col] == 0) continue;
      Rat f = a[i][col];
      for (std::size_t j = col; j < C; ++j) a[i][j] -= f * a[row][j];
    }
    pivot_col.push_back(col);
    ++row;
  }
  if (pivot_col.size() == C) return std::nullopt;

  std::vector<bool> is_pivot(C, false);
  for (std::size_t c : pivot_col) is_pivot[c] = true;
  std::size_t free_col = 0;
  while (is_pivot[free_col]) ++free_col;

  std::vector<Rat> v(C, Rat(0));
  v[free_col] = 1;
  for (std::size_t r = 0; r < pivot_col.size(); ++r)
    v[pivot_col[r]] = -a[r][free_col];
  return detail::canonical_integer_vector(v);
}

// Basis of the saturated integer kernel {x in Z^C : m x = 0}, computed by
// column reduction with a tracked unimodular transform. The returned vectors
// span the full rational kernel intersected with Z^C.
inline std::vector<std::vector<Int>> kernel_lattice(const IntMatrix& m) {
  const std::size_t R = m.rows(), C = m.cols();
  std::vector<std::vector<Int>> a(R, std::vector<Int>(C));
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) a[i][j] = m(i, j);
  // ucols[j] is the j-th column of the accumulated transform U; the working
  // matrix always equals  m * U.
  std::vector<std::vector<Int>> ucols(C, std::vector<Int>(C, 0));
  for (std::size_t j = 0; j < C; ++j) ucols[j][j] = 1;

  auto col_swap = [&](std::size_t x, std::size_t y) {
    if (x == y) return;
    for (std::size_t i = 0; i < R; ++i) std::swap(a[i][x], a[i][y]);
    std::swap(ucols[x], ucols[y]);
  };

  std::size_t col = 0;
  for (std::size_t row = 0; row < R && col < C; ++row) {
    std::size_t j0 = col;
    while (j0 < C && a[row][j0] == 0) ++j0;
    if (j0 == C) continue;
    col_swap(j0, col);
    for (std::size_t j = col + 1; j < C; ++j) {
      if (a[row][j] == 0) continue;
      Int g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(),
                 a[row][col].get_mpz_t(), a[row][j].get_mpz_t());
      Int p = div_exact(a[row][col], g);
      Int q = div_exact(a[row][j], g);
      for (std::size_t i = 0; i < R; ++i) {
        Int nc = s * a[i][col] + t * a[i][j];
        Int nj = p * a[i][j] - q * a[i][col];
        a[i][col] = nc;
        a[i][j] = nj;
      }
      for (std::size_t i = 0; i < C; ++i) {
        Int nc = s * ucols[col][i] + t * ucols[j][i];
        Int nj = p * ucols[j][i] - q * ucols[col][i];
        ucols[col][i] = nc;
        ucols[j][i] = nj;
      }
    }
    ++col;
  }

  std::vector<std::vector<Int>> kernel;
  kernel.reserve(C - col);
  for (std::size_t j = col; j < C; ++j) kernel.push_back(ucols[j]);
  return kernel;
}

namespace detail {

inline std::array<Int, 6> minors2x4(const Quad& r0, const Quad& r1) {
  std::array<Int, 6> d;
  std::size_t m = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) d[m++] = r0[i] * r1[j] - r0[j] * r1[i];
  return d;
}

}  // namespace detail

// Saturation of the rank-2 lattice spanned by two quadruples, returned as the
// unique basis in row Hermite normal form. The output always has the gcd of
// its six 2x2 minors equal to 1.
inline std::pair<Quad, Quad> hnf_rank2(const Quad& r0, const Quad& r1) {
  {
    auto d = detail::minors2x4(r0, r1);
    bool independent = false;
    for (const Int& x : d)
      if (x != 0) independent = true;
    if (!independent)
      throw degenerate_pencil_error("hnf_rank2: rows are Q-proportional");
  }

  // Saturate by taking the integer kernel twice.
  IntMatrix m(2, 4);
  for (int j = 0; j < 4; ++j) {
    m(0, j) = r0[j];
    m(1, j) = r1[j];
  }
  auto k1 = kernel_lattice(m);
  IntMatrix m2(k1.size(), 4);
  for (std::size_t i = 0; i < k1.size(); ++i)
    for (int j = 0; j < 4; ++j) m2(i, j) = k1[i][j];
  auto k2 = kernel_lattice(m2);
  if (k2.size() != 2)
    throw theorem_violation_error("hnf_rank2: saturation is not rank 2");

  Quad u{k2[0][0], k2[0][1], k2[0][2], k2[0][3]};
  Quad v{k2[1][0], k2[1][1], k2[1][2], k2[1][3]};

  // Row HNF: positive pivots, zero below, reduced above.
  int c0 = 0;
  while (u[c0] == 0 && v[c0] == 0) ++c0;
  if (u[c0] == 0) std::swap(u, v);
  if (v[c0] != 0) {
    Int g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), u[c0].get_mpz_t(),
               v[c0].get_mpz_t());
    Int p = div_exact(u[c0], g);
    Int q = div_exact(v[c0], g);
    Quad nu, nv;
    for (int j = 0; j < 4; ++j) {
      nu[j] = s * u[j] + t * v[j];
      nv[j] = p * v[j] - q * u[j];
    }
    u = nu;
    v = nv;
  }
  if (u[c0] < 0)
    for (Int& x : u) x = -x;
  int c1 = c0 + 1;
  while (c1 < 4 && v[c1] == 0) ++c1;
  if (c1 == 4) throw theorem_violation_error("hnf_rank2: lost rank during HNF");
  if (v[c1] < 0)
    for (Int& x : v) x = -x;
  Int f;
  mpz_fdiv_q(f.get_mpz_t(), u[c1].get_mpz_t(), v[c1].get_mpz_t());
  if (f != 0)
    for (int j = 0; j < 4; ++j) u[j] -= f * v[j];

  auto d = detail::minors2x4(u, v);
  if (gcd_range(d.begin(), d.end()) != 1)
    throw theorem_violation_error("hnf_rank2: saturated basis has minor gcd > 1");
  return {u, v};
}

}  // namespace qpencil
