// Command-line front end. Subcommands: analyze, enumerate, fpcount,
// detverify, auxform, bounds, search. Every output format is byte-stable
// across runs and worker counts.
//
// Exit codes: 0 ok, 1 degenerate pencil, 2 singular pencil, 3 bad prime,
// 4 resource limit, 5 violated theorem guard, 10 usage or argument error
// (CLI11 option-parsing errors keep their own codes above 100).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpencil/qpencil.hpp"

namespace {

using namespace qpencil;

struct CurveArgs {
  std::string a_list, b_list, file;
};

void add_curve_options(CLI::App* cmd, CurveArgs& args) {
  auto* a = cmd->add_option("--a", args.a_list,
                            "first diagonal form, 4 comma-separated integers");
  auto* b = cmd->add_option("--b", args.b_list,
                            "second diagonal form, 4 comma-separated integers");
  auto* f = cmd->add_option("--curve", args.file,
                            "JSON file with {\"a\": [...], \"b\": [...]}");
  a->needs(b);
  b->needs(a);
  f->excludes(a);
  f->excludes(b);
}

DiagonalPencil curve_from_args(const CurveArgs& args) {
  if (!args.file.empty()) {
    std::ifstream in(args.file);
    if (!in) throw argument_error("cannot open curve file: " + args.file);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_curve_json(buf.str());
  }
  if (args.a_list.empty() || args.b_list.empty())
    throw argument_error("a curve is required: --a/--b or --curve");
  return DiagonalPencil{parse_quad_list(args.a_list, "--a"),
                        parse_quad_list(args.b_list, "--b")};
}

std::uint64_t memory_budget_from_env(std::uint64_t fallback) {
  const char* env = std::getenv("QPENCIL_MEMORY_BUDGET");
  if (!env || !*env) return fallback;
  char* end = nullptr;
  unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || v == 0)
    throw argument_error("QPENCIL_MEMORY_BUDGET must be a positive byte count");
  return v;
}

Int parse_int_arg(const std::string& s, const char* what) {
  Int v;
  if (s.empty() || mpz_set_str(v.get_mpz_t(), s.c_str(), 10) != 0)
    throw argument_error(std::string(what) + ": not an integer: " + s);
  return v;
}

std::vector<Int> parse_int_list_arg(const std::string& s, const char* what) {
  std::vector<Int> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(parse_int_arg(cur, what));
      cur.clear();
    }
  };
  for (char ch : s) {
    if (ch == ',')
      flush();
    else if (!std::isspace(static_cast<unsigned char>(ch)))
      cur += ch;
  }
  flush();
  if (out.empty()) throw argument_error(std::string(what) + ": empty list");
  return out;
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

std::string monomial_string(const MonomialBasis& basis, std::size_t j) {
  static const char* names[4] = {"x0", "x1", "x2", "x3"};
  std::string s;
  for (int t = 0; t < 4; ++t) {
    unsigned e = basis.exponents[j][t];
    if (e == 0) continue;
    if (!s.empty()) s += "*";
    s += names[basis.perm[t]];
    if (e > 1) s += "^" + std::to_string(e);
  }
  return s.empty() ? "1" : s;
}

int cmd_analyze(const CurveArgs& cargs, const std::string& format,
                double rank_c, double rank_c0) {
  DiagonalPencil c = curve_from_args(cargs);
  Json rep = analyze_report(c, rank_c, rank_c0);
  if (format == "json") {
    emit(rep);
    return 0;
  }
  std::cout << "curve:       " << curve_label(c) << "\n";
  std::cout << "sixtuple:    (";
  PluckerSixtuple s = plucker(c);
  for (int i = 0; i < 6; ++i)
    std::cout << (i ? ", " : "") << s.d[i].get_str();
  std::cout << ")\n";
  std::cout << "content:     " << s.content.get_str() << "\n";
  std::cout << "height:      " << s.height.get_str() << "\n";
  std::cout << "primitive:   " << (s.content == 1 ? "yes" : "no") << "\n";
  bool ns = is_nonsingular(c);
  std::cout << "nonsingular: " << (ns ? "yes" : "no") << "\n";
  if (!ns) return 0;
  WeierstrassModel w = weierstrass(c);
  std::cout << "quartic:     (";
  for (int i = 0; i < 5; ++i)
    std::cout << (i ? ", " : "") << w.quartic[i].get_str();
  std::cout << ")\n";
  std::cout << "I:           " << w.i_invariant.get_str() << "\n";
  std::cout << "J:           " << w.j_invariant.get_str() << "\n";
  std::cout << "model:       y^2 = x^3 + (" << w.a4.get_str() << ")x + ("
            << w.a6.get_str() << ")\n";
  std::cout << "disc:        " << fmt_rat(w.disc) << "\n";
  std::cout << "bad primes:  ";
  if (rep["bad_primes"].is_null()) {
    std::cout << "(not fully factored)\n";
  } else {
    bool first = true;
    for (const auto& p : rep["bad_primes"]) {
      std::cout << (first ? "" : ", ") << p.get<std::string>();
      first = false;
    }
    std::cout << "\n";
  }
  RankEstimate est = rank_estimate(w.disc, rank_c, rank_c0);
  std::cout << "rank est:    " << fmt_double(est.value)
            << (est.c_ok ? "" : "  (warning: c <= 1/(2 log 2))") << "\n";
  return 0;
}

int cmd_enumerate(const CurveArgs& cargs, const std::string& format,
                  const std::string& b_arg, const EnumerateOptions& opts) {
  DiagonalPencil c = curve_from_args(cargs);
  Int B = parse_int_arg(b_arg, "--B");
  auto pts = enumerate_points(c, B, opts);
  if (format == "json") {
    Json j = Json::object();
    j["B"] = B.get_str();
    j["count"] = pts.size();
    j["points"] = json_of_points(pts);
    emit(j);
  } else if (format == "csv") {
    std::cout << csv_of_points(pts);
  } else {
    for (const auto& p : pts) {
      for (int i = 0; i < 4; ++i)
        std::cout << (i ? " " : "") << p.x[i].get_str();
      std::cout << "\n";
    }
    std::cout << "count: " << pts.size() << "\n";
  }
  return 0;
}

int cmd_fpcount(const CurveArgs& cargs, const std::string& format,
                const std::string& p_arg) {
  DiagonalPencil c = curve_from_args(cargs);
  Int p = parse_int_arg(p_arg, "--p");
  std::uint64_t np = count_points_mod_p(c, p);
  std::uint64_t wc = weierstrass_count_mod_p(c, p);
  bool hasse = hasse_check(Int(static_cast<unsigned long>(np)), p);
  if (np != wc)
    throw theorem_violation_error(
        "fpcount: curve and Weierstrass counts disagree at p = " + p.get_str());
  if (format == "json") {
    Json j = Json::object();
    j["p"] = p.get_str();
    j["count"] = np;
    j["weierstrass_count"] = wc;
    j["hasse_ok"] = hasse;
    emit(j);
  } else {
    std::cout << "p:                  " << p.get_str() << "\n";
    std::cout << "count:              " << np << "\n";
    std::cout << "weierstrass count:  " << wc << "\n";
    std::cout << "hasse window:       " << (hasse ? "ok" : "violated") << "\n";
  }
  return 0;
}

int cmd_detverify(const CurveArgs& cargs, const std::string& format,
                  unsigned k, const std::string& b_arg,
                  const std::vector<std::string>& class_primes,
                  const EnumerateOptions& opts) {
  DiagonalPencil c = curve_from_args(cargs);
  Int B = parse_int_arg(b_arg, "--B");
  auto pts = enumerate_points(c, B, opts);
  const std::size_t need = 8ul * k;
  if (pts.size() < need)
    throw argument_error("detverify: only " + std::to_string(pts.size()) +
                         " points of height <= " + B.get_str() +
                         ", need 8k = " + std::to_string(need));
  std::vector<ProjectivePoint> rows(pts.begin(), pts.begin() + need);
  EvalMatrix m = eval_matrix(c, rows, k);
  Int det = det_exact(m.entries);
  bool hadamard = hadamard_certificate(m, B);
  DivisibilityCertificate hcert = height_divisibility(c, rows, k);

  Json j = Json::object();
  j["k"] = k;
  j["B"] = B.get_str();
  j["points_used"] = need;
  j["points_available"] = pts.size();
  j["det"] = det.get_str();
  j["hadamard_ok"] = hadamard;
  j["height_certificate"] = json_of_certificate(hcert);
  Json classes = Json::array();
  for (const std::string& ps : class_primes) {
    Int p = parse_int_arg(ps, "--class-prime");
    ClassPartition part = partition_classes(c, pts, p);
    for (const auto& [cls, members] : part.classes) {
      if (members.size() < 2) continue;
      std::vector<ProjectivePoint> sub(
          members.begin(),
          members.begin() + std::min<std::size_t>(members.size(), need));
      EvalMatrix cm = eval_matrix(c, sub, k);
      DivisibilityCertificate cert = class_divisibility(cm, p);
      Json e = json_of_certificate(cert);
      e["class_size"] = members.size();
      Json rep = Json::array();
      for (auto v : cls.coords) rep.push_back(v);
      e["class_point"] = rep;
      classes.push_back(e);
    }
  }
  j["class_certificates"] = classes;

  if (format == "json") {
    emit(j);
  } else {
    std::cout << "k: " << k << "  B: " << B.get_str() << "\n";
    std::cout << "points: " << need << " of " << pts.size() << " available\n";
    std::cout << "det M: " << det.get_str() << "\n";
    std::cout << "hadamard: " << (hadamard ? "ok" : "VIOLATED") << "\n";
    auto show = [](const DivisibilityCertificate& cert) {
      std::string obs = cert.observed.infinite
                            ? std::string("infinity")
                            : std::to_string(cert.observed.exponent);
      return "base " + cert.base.get_str() + ", required " +
             std::to_string(cert.required) + ", observed " + obs + ", " +
             (cert.verified ? "ok" : "VIOLATED");
    };
    std::cout << "height divisibility: " << show(hcert) << "\n";
    for (const auto& e : classes)
      std::cout << "class divisibility (p=" << e["base"].get<std::string>()
                << ", size " << e["class_size"] << "): required "
                << e["required"] << ", observed " << e["observed"].dump()
                << "\n";
  }
  return 0;
}

int cmd_auxform(const CurveArgs& cargs, const std::string& format, unsigned k,
                const std::string& b_arg, long max_points,
                const EnumerateOptions& opts) {
  DiagonalPencil c = curve_from_args(cargs);
  Int B = parse_int_arg(b_arg, "--B");
  auto pts = enumerate_points(c, B, opts);
  std::size_t take = pts.size();
  if (max_points >= 0)
    take = std::min<std::size_t>(take, static_cast<std::size_t>(max_points));
  std::vector<ProjectivePoint> used(pts.begin(), pts.begin() + take);
  auto form = auxiliary_form(c, used, k);

  Json j = Json::object();
  j["k"] = k;
  j["B"] = B.get_str();
  j["points_used"] = take;
  if (!form) {
    j["full_rank"] = true;
    j["form"] = nullptr;
  } else {
    j["full_rank"] = false;
    Json terms = Json::array();
    for (std::size_t t = 0; t < form->coefficients.size(); ++t) {
      if (form->coefficients[t] == 0) continue;
      Json term = Json::object();
      term["coefficient"] = form->coefficients[t].get_str();
      term["monomial"] = monomial_string(form->basis, t);
      terms.push_back(term);
    }
    j["form"] = terms;
  }
  if (format == "json") {
    emit(j);
    return 0;
  }
  std::cout << "k: " << k << "  B: " << B.get_str() << "  points: " << take
            << "\n";
  if (!form) {
    std::cout << "evaluation matrix has full column rank, no auxiliary form\n";
    return 0;
  }
  std::cout << "auxiliary form:";
  bool first = true;
  for (std::size_t t = 0; t < form->coefficients.size(); ++t) {
    if (form->coefficients[t] == 0) continue;
    std::cout << (first ? " " : " + ") << "(" << form->coefficients[t].get_str()
              << ")*" << monomial_string(form->basis, t);
    first = false;
  }
  std::cout << "\n";
  return 0;
}

int cmd_bounds(const CurveArgs& cargs, const std::string& format,
               const std::string& b_list, BoundParams prm) {
  DiagonalPencil c = curve_from_args(cargs);
  std::vector<Int> Bs = parse_int_list_arg(b_list, "--B");
  auto rows = bound_table(c, Bs, prm);
  if (format == "json")
    emit(json_of_bound_reports(rows));
  else
    std::cout << csv_of_bound_reports(rows);
  return 0;
}

int cmd_search(const std::string& format, const std::string& strategy,
               const SearchOptions& opts, long qmax) {
  std::vector<SearchResult> results;
  if (strategy == "two-orbit")
    results = search_two_orbit(opts, qmax);
  else
    results = search_unit_point(opts);
  if (format == "json") {
    Json arr = Json::array();
    for (const auto& r : results) arr.push_back(json_of_search_result(r));
    emit(arr);
  } else {
    for (const auto& r : results) {
      std::cout << curve_label(r.pencil)
                << "  H=" << r.sixtuple.height.get_str()
                << "  points=" << r.points.size() << "\n";
    }
    std::cout << "curves: " << results.size() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact arithmetic for pencils of two diagonal quadrics in P^3"};
  app.require_subcommand(1);

  std::string format = "text";
  unsigned workers = 1;
  std::string budget_arg;

  CurveArgs an_curve, en_curve, fp_curve, dv_curve, ax_curve, bd_curve;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "text, json or csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    cmd->add_option("--workers", workers, "worker thread count")
        ->check(CLI::Range(1u, 64u));
    cmd->add_option("--memory-budget", budget_arg,
                    "enumeration memory budget in bytes");
  };

  double rank_c = 0.722, rank_c0 = 0.0;
  auto* analyze = app.add_subcommand("analyze", "curve invariants and reduction data");
  add_curve_options(analyze, an_curve);
  add_common(analyze);
  analyze->add_option("--rank-c", rank_c, "rank estimate slope");
  analyze->add_option("--rank-c0", rank_c0, "rank estimate offset");

  std::string en_B = "20";
  auto* enumerate = app.add_subcommand("enumerate", "rational points up to height B");
  add_curve_options(enumerate, en_curve);
  add_common(enumerate);
  enumerate->add_option("--B", en_B, "height bound")->required();

  std::string fp_p;
  auto* fpcount = app.add_subcommand("fpcount", "point count over F_p at a good prime");
  add_curve_options(fpcount, fp_curve);
  add_common(fpcount);
  fpcount->add_option("--p", fp_p, "good odd prime")->required();

  unsigned dv_k = 1;
  std::string dv_B = "20";
  std::vector<std::string> dv_class_primes;
  auto* detverify = app.add_subcommand(
      "detverify", "evaluation-matrix determinant and divisibility certificates");
  add_curve_options(detverify, dv_curve);
  add_common(detverify);
  detverify->add_option("--k", dv_k, "half-degree parameter")->check(CLI::Range(1u, 8u));
  detverify->add_option("--B", dv_B, "height bound for gathering points");
  detverify->add_option("--class-prime", dv_class_primes,
                        "also certify congruence classes mod this prime (repeatable)");

  unsigned ax_k = 1;
  std::string ax_B = "20";
  long ax_points = -1;
  auto* auxform = app.add_subcommand("auxform", "auxiliary form vanishing at small points");
  add_curve_options(auxform, ax_curve);
  add_common(auxform);
  auxform->add_option("--k", ax_k, "half-degree parameter")->check(CLI::Range(1u, 8u));
  auxform->add_option("--B", ax_B, "height bound for gathering points");
  auxform->add_option("--points", ax_points, "use at most this many points");

  std::string bd_B = "10,100,1000";
  BoundParams bd_prm;
  bool bd_no_enum = false;
  double bd_rank = -1.0;
  auto* bounds = app.add_subcommand("bounds", "bound table joined with empirical counts");
  add_curve_options(bounds, bd_curve);
  add_common(bounds);
  bounds->add_option("--B", bd_B, "comma-separated height bounds");
  bounds->add_option("--m", bd_prm.m, "parameter m of the main bound");
  bounds->add_option("--eps", bd_prm.eps, "epsilon for the height-aware bounds");
  bounds->add_option("--delta", bd_prm.delta, "delta for the dichotomy bound");
  bounds->add_option("--rank", bd_rank, "use this rank instead of the estimate");
  bounds->add_option("--rank-c", bd_prm.rank_c, "rank estimate slope");
  bounds->add_option("--rank-c0", bd_prm.rank_c0, "rank estimate offset");
  bounds->add_flag("--no-enumerate", bd_no_enum, "skip the N(B) column");

  SearchOptions so;
  std::string s_strategy = "unit-point";
  long s_qmax = 6;
  std::string s_B = "20";
  unsigned long s_min_points = 8, s_max_results = 10;
  auto* search = app.add_subcommand("search", "scan coefficient boxes for point-rich curves");
  add_common(search);
  search->add_option("--strategy", s_strategy, "unit-point or two-orbit")
      ->check(CLI::IsMember({"unit-point", "two-orbit"}));
  search->add_option("--box", so.box, "coefficient box half-width");
  search->add_option("--B", s_B, "height bound for counting points");
  search->add_option("--min-points", s_min_points, "minimum point count to keep");
  search->add_option("--max-results", s_max_results, "stop after this many curves");
  search->add_option("--qmax", s_qmax, "two-orbit: second orbit entries in [1, qmax]");

  CLI11_PARSE(app, argc, argv);

  try {
    EnumerateOptions eopts;
    eopts.workers = workers;
    eopts.memory_budget = memory_budget_from_env(eopts.memory_budget);
    if (!budget_arg.empty()) {
      Int b = parse_int_arg(budget_arg, "--memory-budget");
      if (b < 1 || !b.fits_ulong_p())
        throw argument_error("--memory-budget: out of range");
      eopts.memory_budget = b.get_ui();
    }

    if (analyze->parsed())
      return cmd_analyze(an_curve, format, rank_c, rank_c0);
    if (enumerate->parsed())
      return cmd_enumerate(en_curve, format, en_B, eopts);
    if (fpcount->parsed()) return cmd_fpcount(fp_curve, format, fp_p);
    if (detverify->parsed())
      return cmd_detverify(dv_curve, format, dv_k, dv_B, dv_class_primes, eopts);
    if (auxform->parsed())
      return cmd_auxform(ax_curve, format, ax_k, ax_B, ax_points, eopts);
    if (bounds->parsed()) {
      bd_prm.with_enumeration = !bd_no_enum;
      bd_prm.workers = workers;
      bd_prm.enum_opts = eopts;
      if (bd_rank >= 0) bd_prm.rank = bd_rank;
      return cmd_bounds(bd_curve, format, bd_B, bd_prm);
    }
    if (search->parsed()) {
      so.B = parse_int_arg(s_B, "--B");
      so.min_points = s_min_points;
      so.max_results = s_max_results;
      so.workers = workers;
      so.enum_opts = eopts;
      return cmd_search(format, s_strategy, so, s_qmax);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qpencil::cli_exit_code(e);
  }
  return 0;
}
