#pragma once

// Bound-formula evaluators (shape values, implied constants set to 1), the
// certified Mertens-type prime-sum check, the dichotomy exponent algebra,
// and the comparison tables that join bounds with empirical counts.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qpencil/errors.hpp"
#include "qpencil/integers.hpp"
#include "qpencil/pencil.hpp"
#include "qpencil/points.hpp"

namespace qpencil {

namespace detail {

inline void require_bound_domain(const Int& B) {
  if (B < 3)
    throw constraint_error(
        "bound evaluators are defined for B >= 3 (log log B must exist)");
}

}  // namespace detail

// m^r (B^{1/(2m^2)} + m^2) log B.
inline double thm11_bound(const Int& B, double r, unsigned m) {
  detail::require_bound_domain(B);
  if (m < 1) throw argument_error("thm11_bound: m must be >= 1");
  if (r < 0) throw argument_error("thm11_bound: r must be >= 0");
  const double lb = log_int_abs(B);
  const double m2 = static_cast<double>(m) * m;
  return std::pow(m, r) * (std::exp(lb / (2.0 * m2)) + m2) * lb;
}

// (log B)^{2 + r/2}.
inline double cor12_bound(const Int& B, double r) {
  detail::require_bound_domain(B);
  if (r < 0) throw argument_error("cor12_bound: r must be >= 0");
  return std::pow(log_int_abs(B), 2.0 + r / 2.0);
}

// B^{1/2+eps} / H^{1/8} + log B + 1.
inline double thm31_bound(const Int& B, const Int& H, double eps) {
  detail::require_bound_domain(B);
  if (H < 1) throw argument_error("thm31_bound: H must be >= 1");
  if (eps <= 0) throw constraint_error("thm31_bound: eps must be positive");
  const double lb = log_int_abs(B);
  const double lh = H == 1 ? 0.0 : log_int_abs(H);
  return std::exp((0.5 + eps) * lb - 0.125 * lh) + lb + 1.0;
}

// 2^r B^{1/8} log B.
inline double eq13_bound(const Int& B, double r) {
  detail::require_bound_domain(B);
  if (r < 0) throw argument_error("eq13_bound: r must be >= 0");
  const double lb = log_int_abs(B);
  return std::pow(2.0, r) * std::exp(lb / 8.0) * lb;
}

// H^{6+eps} B^{1/8} log B.
inline double eq14_bound(const Int& B, const Int& H, double eps) {
  detail::require_bound_domain(B);
  if (H < 1) throw argument_error("eq14_bound: H must be >= 1");
  if (eps <= 0) throw constraint_error("eq14_bound: eps must be positive");
  const double lb = log_int_abs(B);
  const double lh = H == 1 ? 0.0 : log_int_abs(H);
  return std::exp((6.0 + eps) * lh + lb / 8.0) * lb;
}

// B^{1/2 - delta}, defined for 0 < delta < 3/392.
inline double thm13_bound(const Int& B, double delta) {
  detail::require_bound_domain(B);
  if (!(delta > 0.0) || !(delta < 3.0 / 392.0))
    throw constraint_error("thm13_bound: delta must lie in (0, 3/392)");
  return std::exp((0.5 - delta) * log_int_abs(B));
}

// The exponent bookkeeping behind the dichotomy: inserting the crossing
// height H* = B^{3/49} into B^{1/2}/H^{1/8} loses exactly 3/392 from the
// exponent, i.e. 1/2 - (3/49)(1/8) = 193/392 = 1/2 - 3/392, exactly.
inline bool thm13_exponent_identity() {
  Rat crossing(3, 49);
  Rat lost = crossing * Rat(1, 8);
  Rat lhs = Rat(1, 2) - lost;
  return lost == Rat(3, 392) && lhs == Rat(193, 392);
}

// Crossing height H* = B^{3/49} where the small-height and large-height
// regimes of the dichotomy exchange roles.
inline double dichotomy_crossing(const Int& B) {
  if (B < 2) throw constraint_error("dichotomy_crossing: B must be >= 2");
  if (!thm13_exponent_identity())
    throw theorem_violation_error("dichotomy_crossing: exponent identity broke");
  return std::exp(log_int_abs(B) * 3.0 / 49.0);
}

// Independent numeric determination of the same crossing: bisect the log-H
// value where the main exponents of the two regimes meet,
//   6h + (log B)/8 = (log B)/2 - h/8.
inline double dichotomy_crossing_numeric(const Int& B) {
  if (B < 2)
    throw constraint_error("dichotomy_crossing_numeric: B must be >= 2");
  const double lb = log_int_abs(B);
  auto gap = [lb](double h) { return 6.0 * h + lb / 8.0 - (lb / 2.0 - h / 8.0); };
  double lo = 0.0, hi = lb;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (gap(mid) > 0 ? hi : lo) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

namespace detail {

// Directed-rounding helpers: every floating step is nudged outward by two
// ulps, which dominates the < 1 ulp error of the underlying operation.
inline double round_up(double x) {
  double y = std::nextafter(x, std::numeric_limits<double>::infinity());
  return std::nextafter(y, std::numeric_limits<double>::infinity());
}
inline double round_down(double x) {
  double y = std::nextafter(x, -std::numeric_limits<double>::infinity());
  return std::nextafter(y, -std::numeric_limits<double>::infinity());
}

inline double log_int_up(const Int& n) {
  signed long e = 0;
  double m = mpz_get_d_2exp(&e, n.get_mpz_t());
  const double ln2_hi = std::nextafter(0.6931471805599453094, 2.0);
  return round_up(round_up(std::log(m)) +
                  round_up(static_cast<double>(e) * ln2_hi));
}

inline double log_int_down(const Int& n) {
  signed long e = 0;
  double m = mpz_get_d_2exp(&e, n.get_mpz_t());
  const double ln2_lo = std::nextafter(0.6931471805599453094, 0.0);
  return round_down(round_down(std::log(m)) +
                    round_down(static_cast<double>(e) * ln2_lo));
}

inline const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    const std::uint32_t limit = 1000000;
    std::vector<bool> sieve(limit + 1, true);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 2; i <= limit; ++i) {
      if (!sieve[i]) continue;
      out.push_back(i);
      for (std::uint64_t j = static_cast<std::uint64_t>(i) * i; j <= limit;
           j += i)
        sieve[j] = false;
    }
    return out;
  }();
  return primes;
}

// Distinct prime factors by trial division to 10^6 plus a certified
// primality test on the cofactor. A composite cofactor cannot be certified
// and is refused.
inline std::vector<Int> distinct_prime_factors(const Int& n_in) {
  Int n = abs_int(n_in);
  std::vector<Int> factors;
  if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 63) {
    std::uint64_t v = 0;
    {
      Int tmp = n;
      for (int i = 0; tmp != 0; ++i) {
        v |= static_cast<std::uint64_t>(mpz_get_ui(tmp.get_mpz_t()) &
                                        0xffffffffull)
             << (32 * i);
        tmp >>= 32;
      }
    }
    for (std::uint32_t p : small_primes()) {
      if (static_cast<std::uint64_t>(p) * p > v) break;
      if (v % p == 0) {
        factors.push_back(Int(static_cast<unsigned long>(p)));
        while (v % p == 0) v /= p;
      }
    }
    if (v > 1) {
      Int cof(static_cast<unsigned long>(v));
      if (!is_prime(cof))
        throw unsupported_error(
            "distinct_prime_factors: composite cofactor beyond the trial "
            "division range");
      factors.push_back(cof);
    }
    return factors;
  }
  for (std::uint32_t p : small_primes()) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      factors.push_back(Int(static_cast<unsigned long>(p)));
      while (mpz_divisible_ui_p(n.get_mpz_t(), p))
        mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
    }
    if (n == 1) break;
  }
  if (n > 1) {
    if (!is_prime(n))
      throw unsupported_error(
          "distinct_prime_factors: composite cofactor beyond the trial "
          "division range");
    factors.push_back(n);
  }
  return factors;
}

}  // namespace detail

// Certified check of  sum_{p | Pi} (log p)/p <= log log Pi + 2  for Pi > 1.
// The left side is accumulated with upward rounding, the right side with
// downward rounding, so a true verdict is a certificate.
inline bool mertens_check(const Int& big_pi) {
  if (big_pi <= 1)
    throw constraint_error("mertens_check: the input must be > 1");
  auto factors = detail::distinct_prime_factors(big_pi);
  double left = 0.0;
  for (const Int& p : factors) {
    double lp = detail::log_int_up(p);
    // Denominator rounded down so the quotient is an upper bound.
    double pd = detail::round_down(p.get_d());
    left = detail::round_up(left + detail::round_up(lp / pd));
  }
  double ll = detail::log_int_down(big_pi);  // positive for every Pi >= 2
  double right = detail::round_down(detail::round_down(std::log(ll)) + 2.0);
  return left <= right;
}

struct BoundParams {
  unsigned m = 2;
  double eps = 0.01;
  double delta = 0.005;
  double rank_c = 0.722;
  double rank_c0 = 0.0;
  std::optional<double> rank;  // a user-supplied rank overrides the estimate
  bool with_enumeration = true;
  unsigned workers = 1;
  EnumerateOptions enum_opts{};
};

struct BoundReport {
  std::string curve;
  Int B;
  Int H;
  Rat abs_disc;
  std::string rank_source;  // "user" or "estimate"
  double rank_value = 0.0;
  bool rank_c_ok = true;
  // Bound columns are absent when B < 3 (outside the evaluators' domain).
  std::optional<double> thm11, cor12, eq13, eq14, thm31, thm13;
  std::optional<std::size_t> nb;
  // (bound name, N(B)/bound) pairs in fixed column order; only when nb and
  // the bound are both present.
  std::vector<std::pair<std::string, double>> ratios;
};

inline std::string curve_label(const DiagonalPencil& c) {
  std::string s = "a=(";
  for (int i = 0; i < 4; ++i) s += (i ? " " : "") + c.a[i].get_str();
  s += ") b=(";
  for (int i = 0; i < 4; ++i) s += (i ? " " : "") + c.b[i].get_str();
  s += ")";
  return s;
}

// One report row per height bound. Rows are independent, so they may be
// computed across workers; the output order is always the input order.
inline std::vector<BoundReport> bound_table(const DiagonalPencil& c,
                                            const std::vector<Int>& Bs,
                                            const BoundParams& prm = {}) {
  if (Bs.empty()) throw argument_error("bound_table: no height bounds given");
  for (const Int& B : Bs)
    if (B < 1) throw argument_error("bound_table: every B must be >= 1");
  WeierstrassModel w = weierstrass(c);
  const Int H = height(c);
  const Rat absD = abs(w.disc);
  double rank_value;
  std::string rank_source;
  bool c_ok = true;
  if (prm.rank) {
    if (*prm.rank < 0) throw argument_error("bound_table: rank must be >= 0");
    rank_value = *prm.rank;
    rank_source = "user";
  } else {
    RankEstimate est = rank_estimate(w.disc, prm.rank_c, prm.rank_c0);
    rank_value = est.value;
    rank_source = "estimate";
    c_ok = est.c_ok;
  }

  std::vector<BoundReport> out(Bs.size());
  auto fill = [&](std::size_t i) {
    const Int& B = Bs[i];
    BoundReport r;
    r.curve = curve_label(c);
    r.B = B;
    r.H = H;
    r.abs_disc = absD;
    r.rank_source = rank_source;
    r.rank_value = rank_value;
    r.rank_c_ok = c_ok;
    if (B >= 3) {
      r.thm11 = thm11_bound(B, rank_value, prm.m);
      r.cor12 = cor12_bound(B, rank_value);
      r.eq13 = eq13_bound(B, rank_value);
      r.eq14 = eq14_bound(B, H, prm.eps);
      r.thm31 = thm31_bound(B, H, prm.eps);
      r.thm13 = thm13_bound(B, prm.delta);
    }
    if (prm.with_enumeration) {
      r.nb = count_points(c, B, prm.enum_opts);
      auto ratio = [&](const char* name, const std::optional<double>& bound) {
        if (bound && *bound > 0)
          r.ratios.emplace_back(name, static_cast<double>(*r.nb) / *bound);
      };
      ratio("thm11", r.thm11);
      ratio("cor12", r.cor12);
      ratio("eq13", r.eq13);
      ratio("eq14", r.eq14);
      ratio("thm31", r.thm31);
      ratio("thm13", r.thm13);
    }
    out[i] = std::move(r);
  };

  unsigned workers = prm.workers == 0 ? 1 : std::min<unsigned>(prm.workers, 16);
  if (workers <= 1 || Bs.size() <= 1) {
    for (std::size_t i = 0; i < Bs.size(); ++i) fill(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned wk = 0; wk < workers; ++wk)
      pool.emplace_back([&, wk] {
        try {
          for (std::size_t i = wk; i < Bs.size(); i += workers) fill(i);
        } catch (...) {
          errors[wk] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace qpencil
