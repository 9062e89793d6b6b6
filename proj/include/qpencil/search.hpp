#pragma once

// Deterministic coefficient-box searches for primitive nonsingular pencils
// with many small rational points. Two strategies:
//
//  * unit-point: both coefficient rows orthogonal to (1,1,1,1), so the curve
//    passes through the all-ones point and carries its whole sign class
//    (eight points of height 1) for free;
//  * two-orbit: rows orthogonal to (1,1,1,1) and to a second square vector
//    (Q0^2, .., Q3^2); the saturated orthogonal lattice pins down at most one
//    pencil per Q, and the curve carries two sign classes of points.
//
// Scans run in a fixed lexicographic order and stop at max_results, so the
// output is reproducible; the worker count never changes it.

#include <algorithm>
#include <cstdint>
#include <set>
#include <thread>
#include <vector>

#include "qpencil/errors.hpp"
#include "qpencil/integers.hpp"
#include "qpencil/matrix.hpp"
#include "qpencil/pencil.hpp"
#include "qpencil/points.hpp"

namespace qpencil {

struct SearchOptions {
  long box = 10;               // coefficients scanned in [-box, box]
  Int B = 20;                  // height bound for the point enumeration
  std::size_t min_points = 8;  // keep curves with at least this many points
  std::size_t max_results = 10;
  unsigned workers = 1;
  EnumerateOptions enum_opts{};
};

struct SearchResult {
  DiagonalPencil pencil;
  PluckerSixtuple sixtuple;
  std::vector<ProjectivePoint> points;
};

namespace detail {

using SixKey = std::array<long long, 6>;

// Canonical dedup key: sixtuple divided by content, first nonzero positive.
inline bool sixtuple_key(const long long (&d)[6], SixKey& key) {
  long long g = 0;
  for (long long v : d) g = std::gcd(g, v < 0 ? -v : v);
  if (g == 0) return false;
  int lead = -1;
  for (int i = 0; i < 6; ++i) {
    key[i] = d[i] / g;
    if (lead < 0 && key[i] != 0) lead = i;
  }
  if (key[lead] < 0)
    for (auto& v : key) v = -v;
  return true;
}

// Rows with entries in [-box, box], zero coordinate sum, gcd 1, positive
// leading entry (the sign of a row never changes the curve), lexicographic.
inline std::vector<std::array<long, 4>> unit_orthogonal_rows(long box) {
  std::vector<std::array<long, 4>> rows;
  for (long a0 = -box; a0 <= box; ++a0)
    for (long a1 = -box; a1 <= box; ++a1)
      for (long a2 = -box; a2 <= box; ++a2) {
        long a3 = -(a0 + a1 + a2);
        if (a3 < -box || a3 > box) continue;
        long g = std::gcd(std::gcd(std::abs(a0), std::abs(a1)),
                          std::gcd(std::abs(a2), std::abs(a3)));
        if (g != 1) continue;
        long lead = a0 != 0 ? a0 : a1 != 0 ? a1 : a2 != 0 ? a2 : a3;
        if (lead < 0) continue;
        rows.push_back({a0, a1, a2, a3});
      }
  return rows;
}

inline DiagonalPencil pencil_of_rows(const std::array<long, 4>& a,
                                     const std::array<long, 4>& b) {
  DiagonalPencil c;
  for (int i = 0; i < 4; ++i) {
    c.a[i] = Int(a[i]);
    c.b[i] = Int(b[i]);
  }
  return c;
}

inline Int norm2(const Quad& v) {
  Int s = 0;
  for (const Int& x : v) s += x * x;
  return s;
}

// Lagrange-Gauss reduction of a rank-2 lattice basis: returns the basis with
// the two shortest achievable rows, deterministically sign- and
// order-normalised (first nonzero entry of each row positive; shorter row
// first, lexicographic tie-break).
inline std::pair<Quad, Quad> gauss_reduce(Quad u, Quad v) {
  auto dot = [](const Quad& x, const Quad& y) {
    Int s = 0;
    for (int i = 0; i < 4; ++i) s += x[i] * y[i];
    return s;
  };
  if (norm2(v) < norm2(u)) std::swap(u, v);
  while (true) {
    // m = nearest integer to dot(u,v)/|u|^2
    Int n = dot(u, v), d = norm2(u), m;
    Int num = 2 * n + d;
    mpz_fdiv_q(m.get_mpz_t(), num.get_mpz_t(), Int(2 * d).get_mpz_t());
    if (m != 0)
      for (int i = 0; i < 4; ++i) v[i] -= m * u[i];
    if (norm2(v) < norm2(u))
      std::swap(u, v);
    else
      break;
  }
  auto fix_sign = [](Quad& w) {
    for (const Int& x : w) {
      if (x == 0) continue;
      if (x < 0)
        for (Int& y : w) y = -y;
      break;
    }
  };
  fix_sign(u);
  fix_sign(v);
  if (norm2(v) < norm2(u) ||
      (norm2(v) == norm2(u) && compare_quads(v, u) < 0))
    std::swap(u, v);
  return {u, v};
}

struct RowPairScan {
  const std::vector<std::array<long, 4>>& rows;
  const SearchOptions& opt;

  // Scan every (a, b) pair with a before b in row order; dedupe on the
  // reduced sixtuple; keep curves with enough points. Candidates that pass
  // the cheap filters are enumerated in fixed-size batches; batches may fan
  // out across workers, but results are always appended in candidate order,
  // so the worker count cannot change the output.
  std::vector<SearchResult> run() const {
    std::set<SixKey> seen;
    std::vector<SearchResult> results;
    const unsigned workers =
        opt.workers == 0 ? 1 : std::min<unsigned>(opt.workers, 32);
    const std::size_t batch = std::max<std::size_t>(16, 4 * workers);

    std::vector<std::pair<std::size_t, std::size_t>> pending;
    auto flush = [&]() -> bool {
      std::vector<std::vector<ProjectivePoint>> pts(pending.size());
      if (workers <= 1 || pending.size() <= 1) {
        for (std::size_t t = 0; t < pending.size(); ++t)
          pts[t] = enumerate_points(
              pencil_of_rows(rows[pending[t].first], rows[pending[t].second]),
              opt.B, opt.enum_opts);
      } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (unsigned w = 0; w < workers; ++w)
          pool.emplace_back([&, w] {
            try {
              for (std::size_t t = w; t < pending.size(); t += workers)
                pts[t] = enumerate_points(
                    pencil_of_rows(rows[pending[t].first],
                                   rows[pending[t].second]),
                    opt.B, opt.enum_opts);
            } catch (...) {
              errors[w] = std::current_exception();
            }
          });
        for (auto& th : pool) th.join();
        for (const auto& e : errors)
          if (e) std::rethrow_exception(e);
      }
      for (std::size_t t = 0; t < pending.size(); ++t) {
        if (pts[t].size() < opt.min_points) continue;
        DiagonalPencil c =
            pencil_of_rows(rows[pending[t].first], rows[pending[t].second]);
        results.push_back(SearchResult{c, plucker(c), std::move(pts[t])});
        if (results.size() >= opt.max_results) return true;
      }
      pending.clear();
      return false;
    };

    for (std::size_t ia = 0; ia + 1 < rows.size(); ++ia) {
      for (std::size_t ib = ia + 1; ib < rows.size(); ++ib) {
        const auto& a = rows[ia];
        const auto& b = rows[ib];
        long long d[6];
        int m = 0;
        bool singular = false;
        for (int i = 0; i < 4 && !singular; ++i)
          for (int j = i + 1; j < 4; ++j) {
            d[m] = static_cast<long long>(a[i]) * b[j] -
                   static_cast<long long>(a[j]) * b[i];
            if (d[m] == 0) {
              singular = true;
              break;
            }
            ++m;
          }
        if (singular) continue;
        long long g = 0;
        for (long long v : d) g = std::gcd(g, v < 0 ? -v : v);
        if (g != 1) continue;  // primitive pencils only
        SixKey key;
        sixtuple_key(d, key);
        if (!seen.insert(key).second) continue;
        pending.emplace_back(ia, ib);
        if (pending.size() >= batch && flush()) return results;
      }
    }
    flush();
    return results;
  }
};

}  // namespace detail

// Strategy 1: scan pencils through the all-ones point.
inline std::vector<SearchResult> search_unit_point(const SearchOptions& opt) {
  if (opt.box < 1 || opt.box > 10000)
    throw argument_error("search_unit_point: box must be in [1, 10000]");
  auto rows = detail::unit_orthogonal_rows(opt.box);
  detail::RowPairScan scan{rows, opt};
  return scan.run();
}

// Strategy 2: scan second orbits Q in [1, qmax]^4; each Q yields at most one
// saturated pencil through (1,1,1,1) and (Q0,Q1,Q2,Q3).
inline std::vector<SearchResult> search_two_orbit(const SearchOptions& opt,
                                                  long qmax = 6) {
  if (opt.box < 1 || qmax < 2)
    throw argument_error("search_two_orbit: need box >= 1 and qmax >= 2");
  std::set<detail::SixKey> seen;
  std::vector<SearchResult> results;
  for (long q0 = 1; q0 <= qmax; ++q0)
    for (long q1 = 1; q1 <= qmax; ++q1)
      for (long q2 = 1; q2 <= qmax; ++q2)
        for (long q3 = 1; q3 <= qmax; ++q3) {
          if (q0 == q1 && q1 == q2 && q2 == q3) continue;
          IntMatrix m(2, 4);
          for (int i = 0; i < 4; ++i) m(0, i) = 1;
          m(1, 0) = Int(q0) * q0;
          m(1, 1) = Int(q1) * q1;
          m(1, 2) = Int(q2) * q2;
          m(1, 3) = Int(q3) * q3;
          auto kernel = kernel_lattice(m);
          if (kernel.size() != 2) continue;
          // The saturated kernel basis is canonicalised by lattice reduction
          // rather than HNF: the reduced rows are the shortest available, so
          // a curve is only rejected by the box filter when no small model
          // exists at all.
          auto [u, v] = detail::gauss_reduce(
              Quad{kernel[0][0], kernel[0][1], kernel[0][2], kernel[0][3]},
              Quad{kernel[1][0], kernel[1][1], kernel[1][2], kernel[1][3]});
          DiagonalPencil c{u, v};
          bool in_box = true;
          for (int i = 0; i < 4; ++i)
            if (abs_int(c.a[i]) > opt.box || abs_int(c.b[i]) > opt.box)
              in_box = false;
          if (!in_box || !is_nonsingular(c)) continue;
          PluckerSixtuple s = plucker(c);
          long long d[6];
          for (int i = 0; i < 6; ++i) d[i] = s.d[i].get_si();
          detail::SixKey key;
          if (!detail::sixtuple_key(d, key) || !seen.insert(key).second)
            continue;
          auto pts = enumerate_points(c, opt.B, opt.enum_opts);
          if (pts.size() < opt.min_points) continue;
          results.push_back(SearchResult{c, s, std::move(pts)});
          if (results.size() >= opt.max_results) return results;
        }
  return results;
}

}  // namespace qpencil
