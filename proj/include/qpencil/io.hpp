#pragma once

// Serialization boundary: curve input parsing, JSON/CSV/text report
// rendering, locale-proof number formatting, and the mapping from exception
// classes to process exit codes. Everything here is deterministic: two runs
// over the same data produce identical bytes.

#include <cctype>
#include <charconv>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpencil/bounds.hpp"
#include "qpencil/detmethod.hpp"
#include "qpencil/errors.hpp"
#include "qpencil/integers.hpp"
#include "qpencil/pencil.hpp"
#include "qpencil/points.hpp"
#include "qpencil/search.hpp"

namespace qpencil {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form, independent of locale.
inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt_rat(const Rat& q) {
  return Rat(q).get_str();  // canonical "n" or "n/d"
}

// Exit codes: 1 degenerate pencil, 2 singular pencil, 3 bad prime,
// 4 resource limit, 5 violated theorem guard, 10 anything else.
inline int cli_exit_code(const std::exception& e) {
  if (dynamic_cast<const degenerate_pencil_error*>(&e)) return 1;
  if (dynamic_cast<const singular_pencil_error*>(&e)) return 2;
  if (dynamic_cast<const bad_prime_error*>(&e)) return 3;
  if (dynamic_cast<const resource_error*>(&e)) return 4;
  if (dynamic_cast<const theorem_violation_error*>(&e)) return 5;
  return 10;
}

namespace io_detail {

inline Int int_from_json(const Json& v, const char* where) {
  if (v.is_number_integer()) {
    long long x = v.get<long long>();
    Int r;
    mpz_set_si(r.get_mpz_t(), static_cast<long>(x));
    return r;
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    Int r;
    if (mpz_set_str(r.get_mpz_t(), s.c_str(), 10) != 0)
      throw argument_error(std::string(where) + ": not a decimal integer: " + s);
    return r;
  }
  if (v.is_number_float())
    throw argument_error(std::string(where) +
                         ": quote integers beyond 2^63 as decimal strings");
  throw argument_error(std::string(where) +
                       ": coefficients must be integers or decimal strings");
}

inline Quad quad_from_json(const Json& arr, const char* where) {
  if (!arr.is_array() || arr.size() != 4)
    throw argument_error(std::string(where) + ": expected an array of 4 integers");
  Quad q;
  for (int i = 0; i < 4; ++i) q[i] = int_from_json(arr[i], where);
  return q;
}

}  // namespace io_detail

// Accepts {"a": [..4 ints..], "b": [..4 ints..]}; coefficients may be JSON
// integers or decimal strings (for values beyond 2^63).
inline DiagonalPencil parse_curve_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw argument_error(std::string("curve JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("a") || !j.contains("b"))
    throw argument_error("curve JSON: expected an object with keys \"a\" and \"b\"");
  return DiagonalPencil{io_detail::quad_from_json(j["a"], "curve JSON a"),
                        io_detail::quad_from_json(j["b"], "curve JSON b")};
}

// Comma-separated list of 4 integers, e.g. "1,-1,-1,1".
inline Quad parse_quad_list(const std::string& text, const char* where) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 4)
    throw argument_error(std::string(where) + ": expected 4 comma-separated integers");
  Quad q;
  for (int i = 0; i < 4; ++i) {
    if (parts[i].empty() ||
        mpz_set_str(q[i].get_mpz_t(), parts[i].c_str(), 10) != 0)
      throw argument_error(std::string(where) + ": not an integer: " + parts[i]);
  }
  return q;
}

inline Json json_of_quad(const Quad& q) {
  Json arr = Json::array();
  for (const Int& v : q) arr.push_back(v.get_str());
  return arr;
}

inline Json json_of_int_list(const std::vector<Int>& v) {
  Json arr = Json::array();
  for (const Int& x : v) arr.push_back(x.get_str());
  return arr;
}

inline Json json_of_point(const ProjectivePoint& p) {
  Json j = Json::object();
  j["x"] = json_of_quad(p.x);
  j["height"] = p.height.get_str();
  return j;
}

inline Json json_of_points(const std::vector<ProjectivePoint>& pts) {
  Json arr = Json::array();
  for (const auto& p : pts) arr.push_back(json_of_point(p));
  return arr;
}

// CSV with header x0,x1,x2,x3,height and LF line endings.
inline std::string csv_of_points(const std::vector<ProjectivePoint>& pts) {
  std::string out = "x0,x1,x2,x3,height\n";
  for (const auto& p : pts) {
    for (int i = 0; i < 4; ++i) {
      out += p.x[i].get_str();
      out += ',';
    }
    out += p.height.get_str();
    out += '\n';
  }
  return out;
}

// Full curve report: sixtuple data, primitivity, nonsingularity, and (when
// nonsingular) the quartic, invariants, discriminant, bad primes, and the
// heuristic rank estimate.
inline Json analyze_report(const DiagonalPencil& c, double rank_c = 0.722,
                           double rank_c0 = 0.0) {
  Json j = Json::object();
  j["curve"] = Json::object();
  j["curve"]["a"] = json_of_quad(c.a);
  j["curve"]["b"] = json_of_quad(c.b);
  PluckerSixtuple s = plucker(c);
  Json d = Json::array();
  for (const Int& v : s.d) d.push_back(v.get_str());
  j["sixtuple"] = d;
  j["content"] = s.content.get_str();
  j["height"] = s.height.get_str();
  j["primitive"] = (s.content == 1);
  const bool ns = is_nonsingular(c);
  j["nonsingular"] = ns;
  if (!ns) {
    j["quartic"] = nullptr;
    j["i_invariant"] = nullptr;
    j["j_invariant"] = nullptr;
    j["a4"] = nullptr;
    j["a6"] = nullptr;
    j["disc"] = nullptr;
    j["bad_primes"] = nullptr;
    j["rank_estimate"] = nullptr;
    return j;
  }
  WeierstrassModel w = weierstrass(c);
  Json quartic = Json::array();
  for (const Int& e : w.quartic) quartic.push_back(e.get_str());
  j["quartic"] = quartic;
  j["i_invariant"] = w.i_invariant.get_str();
  j["j_invariant"] = w.j_invariant.get_str();
  j["a4"] = w.a4.get_str();
  j["a6"] = w.a6.get_str();
  j["disc"] = fmt_rat(w.disc);

  PluckerSixtuple rs = plucker(primitive_reduce(c));
  Int prod = 1;
  for (const Int& v : rs.d) prod *= v;
  Json bad = Json::array();
  bad.push_back("2");
  try {
    for (const Int& p : detail::distinct_prime_factors(prod))
      if (p != 2) bad.push_back(p.get_str());
    j["bad_primes"] = bad;
  } catch (const unsupported_error&) {
    j["bad_primes"] = nullptr;  // minor product resists certified factoring
  }
  RankEstimate est = rank_estimate(w.disc, rank_c, rank_c0);
  j["rank_estimate"] = Json::object();
  j["rank_estimate"]["value"] = est.value;
  j["rank_estimate"]["c"] = rank_c;
  j["rank_estimate"]["c0"] = rank_c0;
  j["rank_estimate"]["c_ok"] = est.c_ok;
  return j;
}

inline Json json_of_valuation(const Valuation& v) {
  if (v.infinite) return Json("infinity");
  return Json(v.exponent);
}

inline Json json_of_certificate(const DivisibilityCertificate& cert) {
  Json j = Json::object();
  j["kind"] = cert.kind;
  j["base"] = cert.base.get_str();
  j["required"] = cert.required;
  j["observed"] = json_of_valuation(cert.observed);
  j["det"] = cert.det.get_str();
  j["verified"] = cert.verified;
  return j;
}

inline Json json_of_search_result(const SearchResult& r) {
  Json j = Json::object();
  j["a"] = json_of_quad(r.pencil.a);
  j["b"] = json_of_quad(r.pencil.b);
  Json d = Json::array();
  for (const Int& v : r.sixtuple.d) d.push_back(v.get_str());
  j["sixtuple"] = d;
  j["height"] = r.sixtuple.height.get_str();
  j["n_points"] = r.points.size();
  return j;
}

// Fixed column order; bound cells are empty when B < 3, the NB cell is empty
// when enumeration was skipped.
inline std::string csv_of_bound_reports(const std::vector<BoundReport>& rows) {
  std::string out =
      "curve,B,H,absD,rank_source,thm11,cor12,eq13,eq14,thm31,thm13,NB\n";
  auto cell = [](const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string();
  };
  for (const BoundReport& r : rows) {
    out += r.curve;
    out += ',';
    out += r.B.get_str();
    out += ',';
    out += r.H.get_str();
    out += ',';
    out += fmt_rat(r.abs_disc);
    out += ',';
    out += r.rank_source;
    out += ',';
    out += cell(r.thm11);
    out += ',';
    out += cell(r.cor12);
    out += ',';
    out += cell(r.eq13);
    out += ',';
    out += cell(r.eq14);
    out += ',';
    out += cell(r.thm31);
    out += ',';
    out += cell(r.thm13);
    out += ',';
    out += r.nb ? std::to_string(*r.nb) : std::string();
    out += '\n';
  }
  return out;
}

inline Json json_of_bound_reports(const std::vector<BoundReport>& rows) {
  Json arr = Json::array();
  for (const BoundReport& r : rows) {
    Json j = Json::object();
    j["curve"] = r.curve;
    j["B"] = r.B.get_str();
    j["H"] = r.H.get_str();
    j["absD"] = fmt_rat(r.abs_disc);
    j["rank_source"] = r.rank_source;
    j["rank"] = r.rank_value;
    j["rank_c_ok"] = r.rank_c_ok;
    auto put = [&](const char* name, const std::optional<double>& v) {
      if (v)
        j[name] = *v;
      else
        j[name] = nullptr;
    };
    put("thm11", r.thm11);
    put("cor12", r.cor12);
    put("eq13", r.eq13);
    put("eq14", r.eq14);
    put("thm31", r.thm31);
    put("thm13", r.thm13);
    if (r.nb)
      j["NB"] = *r.nb;
    else
      j["NB"] = nullptr;
    Json ratios = Json::object();
    for (const auto& [name, value] : r.ratios) ratios[name] = value;
    j["ratios"] = ratios;
    arr.push_back(j);
  }
  return arr;
}

}  // namespace qpencil
