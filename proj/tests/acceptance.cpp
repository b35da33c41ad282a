// Acceptance run: prints one PASS/FAIL line per criterion; details go to acceptance_report.json.
#include "hm/chernweil.hpp"
#include "hm/io.hpp"
#include "oracles.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

using namespace hm;

namespace {

json report = json::object();
int failures = 0;
bool record_goldens = false;

double dd(const Real& x) { return static_cast<double>(x); }

std::string fmt(double x, int prec = 3) {
  std::ostringstream os;
  os << std::setprecision(prec) << x;
  return os.str();
}

void line(int id, const std::string& name, bool ok, double secs, double limit, const std::string& detail) {
  bool in_time = secs <= limit;
  if (!ok || !in_time) ++failures;
  std::cout << (ok && in_time ? "PASS" : "FAIL") << "  C" << std::setw(2) << std::left << id << std::right << " "
            << name << " | " << detail << " | " << fmt(secs, 3) << " s (limit " << limit << " s)"
            << (in_time ? "" : " TIME EXCEEDED") << std::endl;
}

template <class F>
double timed(F&& f) {
  Stopwatch sw;
  f();
  return sw.seconds();
}

// ---- 1: weight filtration vs flag search ----
void c1() {
  bool ok = true;
  int cases = 0;
  double t = timed([&] {
    std::mt19937_64 rng(101);
    for (int d = 1; d <= 6; ++d)
      for (auto& parts : oracle::partitions(d)) {
        MatQ N = nilpotent_from_partition(parts);
        MatQ g = oracle::random_unimodular(d, rng);
        N = g * N * *inverse(g);
        auto W = weight_filtration(N);
        auto sols = oracle::brute_force_weight_filtrations(N);
        ++cases;
        if (sols.size() != 1 || sols[0] != W) ok = false;
        // both defining properties, checked directly
        if (!verify_weight_filtration(N, W)) ok = false;
      }
  });
  report["C1"] = {{"cases", cases}, {"all_equal", ok}};
  line(1, "weight filtration = flag-search oracle", ok, t, 10, std::to_string(cases) + " Jordan types, d<=6");
}

// ---- 2: cone invariance ----
std::vector<MatQ> random_cone(std::mt19937_64& rng) {
  // direct sum of tensor products of sl2 representations, total dim <= 8, conjugated
  int ngen = 2 + static_cast<int>(rng() % 2);
  std::vector<std::vector<MatQ>> blocks(ngen);
  int dim = 0;
  while (true) {
    std::vector<int> sizes(ngen);
    int prod = 1;
    for (auto& s : sizes) {
      s = 1 + static_cast<int>(rng() % 3);
      prod *= s;
    }
    if (dim + prod > 8) {
      if (dim == 0) continue;
      break;
    }
    if (dim == 0 && prod == 1) continue;  // first block must carry a nonzero nilpotent
    dim += prod;
    for (int g = 0; g < ngen; ++g) {
      MatQ m = MatQ::identity(1);
      for (int k = 0; k < ngen; ++k) m = kron(m, k == g ? jordan_block(sizes[k]) : MatQ::identity(sizes[k]));
      m *= QI(Q(1 + static_cast<long>(rng() % 4), 1 + static_cast<long>(rng() % 3)));
      blocks[g].push_back(m);
    }
    if (rng() % 3 == 0) break;
  }
  MatQ P = oracle::random_unimodular(dim, rng), Pi = *inverse(P);
  std::vector<MatQ> cone;
  for (auto& b : blocks) cone.push_back(P * block_diag(b) * Pi);
  return cone;
}

void c2() {
  bool ok = true;
  int combos = 0;
  double t = timed([&] {
    std::mt19937_64 rng(202);
    for (int c = 0; c < 20; ++c) {
      auto cone = random_cone(rng);
      auto r = cone_filtration_invariance(cone, 100, 1000 + c);
      combos += r.trials;
      if (!r.invariant) ok = false;
      // W at the barycentre satisfies both defining properties
      if (!verify_weight_filtration(cone[0] + cone[1] + (cone.size() > 2 ? cone[2] : MatQ(cone[0].r, cone[0].c)), r.W))
        ok = false;
    }
  });
  report["C2"] = {{"cones", 20}, {"combinations", combos}, {"invariant", ok}};
  line(2, "cone invariance of W", ok, t, 30, std::to_string(combos) + " positive rational combinations over 20 cones");
}

// ---- 3: Deligne delta ----
MixedHodgeStructure direct_sum(const MixedHodgeStructure& a, const MixedHodgeStructure& b) {
  int n = a.n + b.n;
  auto pad = [&](const SubQ& s, int off) {
    std::vector<VecQ> out;
    for (auto& v : s.vectors()) {
      VecQ w(n, QI(0));
      for (size_t i = 0; i < v.size(); ++i) w[off + i] = v[i];
      out.push_back(w);
    }
    return out;
  };
  auto sum_filt = [&](const FiltQ& x, const FiltQ& y, Direction d) {
    FiltQ f(d, n);
    int lo = std::min(x.lo(), y.lo()) - 1, hi = std::max(x.hi(), y.hi()) + 1;
    for (int l = lo; l <= hi; ++l) {
      auto v = pad(x.get(l), 0), w = pad(y.get(l), a.n);
      v.insert(v.end(), w.begin(), w.end());
      f.set(l, SubQ::span(v, n));
    }
    return f;
  };
  MixedHodgeStructure m;
  m.n = n;
  m.conj_op = block_diag({a.conj_op, b.conj_op});
  m.W = sum_filt(a.W, b.W, Direction::Increasing);
  m.F = sum_filt(a.F, b.F, Direction::Decreasing);
  return m;
}

MixedHodgeStructure perturbed_rank2(const Q& r) {
  MixedHodgeStructure m;
  m.n = 2;
  m.conj_op = MatQ::identity(2);
  m.W = FiltQ(Direction::Increasing, 2);
  m.W.set(-1, SubQ::zero(2));
  m.W.set(0, SubQ::span({{QI(1), QI(0)}}, 2));
  m.W.set(1, SubQ::span({{QI(1), QI(0)}}, 2));
  m.W.set(2, SubQ::full(2));
  m.F = FiltQ(Direction::Decreasing, 2);
  m.F.set(0, SubQ::full(2));
  m.F.set(1, SubQ::span({{QI(Q(0), r), QI(1)}}, 2));
  m.F.set(2, SubQ::zero(2));
  return m;
}

void c3() {
  bool ok = true;
  int split_cases = 0, twisted_cases = 0;
  double t = timed([&] {
    std::mt19937_64 rng(303);
    std::vector<std::map<std::pair<int, int>, int>> shapes{
        {{{0, 0}, 1}, {{1, 1}, 1}},
        {{{0, 0}, 1}, {{1, 0}, 1}, {{0, 1}, 1}, {{1, 1}, 1}},
        {{{0, 0}, 1}, {{1, 0}, 1}, {{0, 1}, 1}, {{1, 1}, 1}, {{2, 1}, 1}, {{1, 2}, 1}},
        {{{0, 0}, 1}, {{1, 1}, 2}, {{2, 2}, 1}},
        {{{1, 0}, 1}, {{0, 1}, 1}, {{2, 1}, 1}, {{1, 2}, 1}}};
    auto check_twist = [&](const MixedHodgeStructure& m) {
      auto ds = compute_delta(m);
      if (!ds.delta) return false;
      MixedHodgeStructure tw = m;
      tw.F = twist_filtration(m.F, *ds.delta);
      return is_real_split(tw, deligne_bigrading(tw));
    };
    for (int k = 0; k < 10; ++k) {
      // R-split: delta = 0
      auto s = oracle::random_split_mhs(shapes[k % shapes.size()], rng);
      ++split_cases;
      if (!compute_delta(s.m).delta->is_zero()) ok = false;
      // planted twist
      auto m = s.m;
      m.F = twist_filtration(s.m.F, oracle::random_real_lm1m1(s, rng) * QI(-1));
      ++twisted_cases;
      if (!check_twist(m)) ok = false;
    }
    for (int k = 0; k < 15; ++k) {
      Q r(static_cast<long>(rng() % 19) - 9, 1 + static_cast<long>(rng() % 5));
      auto m = perturbed_rank2(r);
      ++twisted_cases;
      if (!check_twist(m)) ok = false;
      if (sgn(r) == 0) ok = ok && compute_delta(m).delta->is_zero();
    }
    for (int k = 0; k < 15; ++k) {
      Q r1(1 + static_cast<long>(rng() % 7), 1 + static_cast<long>(rng() % 3));
      auto s = oracle::random_split_mhs(shapes[k % 2], rng);
      auto m = direct_sum(perturbed_rank2(r1), s.m);
      ++twisted_cases;
      if (!check_twist(m)) ok = false;
    }
  });
  report["C3"] = {{"split", split_cases}, {"non_split", twisted_cases}, {"ok", ok}};
  line(3, "Deligne delta makes (W, e^{-i delta}F) R-split", ok, t, 10,
       std::to_string(split_cases + twisted_cases) + " MHS (" + std::to_string(split_cases) + " R-split with delta=0)");
}

// ---- 4: norm growth ----
void c4() {
  bool ok = true;
  std::vector<double> fits;
  double t = timed([&] {
    auto c = elliptic_cone();
    RaySpec ray;
    ray.e0 = 2;
    ray.e1 = 6;
    auto a = norm_growth_exponents(c, {QI(1), QI(0)}, ray), b = norm_growth_exponents(c, {QI(0), QI(1)}, ray);
    fits = {a.fitted_t[0], b.fitted_t[0]};
    ok = std::abs(a.fitted_t[0] + 0.5) < 1e-3 && std::abs(b.fitted_t[0] - 0.5) < 1e-3;
    auto p = product_elliptic_cone();
    for (int i = 0; i < 4; ++i) {
      VecQ v(4, QI(0));
      v[i] = QI(1);
      auto r = norm_growth_exponents(p, v, ray);
      for (size_t j = 0; j < r.fitted_t.size(); ++j) {
        fits.push_back(r.fitted_t[j]);
        if (std::abs(r.fitted_t[j] - r.predicted_t[j]) >= 1e-2) ok = false;
      }
    }
  });
  report["C4"] = {{"fitted", fits}, {"ok", ok}};
  line(4, "norm growth exponents", ok, t, 30,
       "elliptic " + fmt(fits[0], 6) + ", " + fmt(fits[1], 6) + "; product a=2 within 1e-2");
}

// ---- 5: cone cover ----
void c5() {
  long failures5 = 0, n = 0;
  std::map<std::string, long> visits;
  double t = timed([&] {
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> U(0, 1);
    // K_j > K_{j+1}^a with K_{a+1} = 1
    std::vector<std::vector<double>> Ks{{5}, {30, 5}, {1e7, 200, 5}, {1e50, 2e12, 1000, 5}};
    for (; n < 100000; ++n) {
      int a = 1 + static_cast<int>(n % 4);
      auto& K = Ks[a - 1];
      // log-uniform scales reaching past K_1 so that every region is visited
      double span = 1.3 * std::log(K[0]) / a + 2;
      std::vector<double> y(a);
      y[a - 1] = std::exp(U(rng) * span * a);
      for (int j = a - 2; j >= 0; --j) y[j] = y[j + 1] * std::exp(U(rng) * span);
      try {
        auto r = classify_cone_region(y, K);
        if (!region_contains(r, y, K)) ++failures5;
        ++visits[std::to_string(a) + ":" + (r.base ? std::string("base") : std::to_string(r.j))];
      } catch (...) {
        ++failures5;
      }
    }
  });
  report["C5"] = {{"points", n}, {"failures", failures5}, {"regions_visited", visits}};
  line(5, "cone cover classification", failures5 == 0, t, 10,
       std::to_string(n) + " ordered points, a<=4, " + std::to_string(visits.size()) + " (a, region) classes, failures " +
           std::to_string(failures5));
}

// ---- 6: modular rationality ----
void c6() {
  double lim = 0;
  RationalityVerdict v;
  double t = timed([&] {
    PrecisionGuard pg(128);
    auto r = integrate_regularized(geometry_form(upper_half_plane(), "c1-hodge:1"), modular_domain(),
                                   {0.05, 0.025, 0.0125});
    lim = dd(r.limit);
    v = rationality_detect(lim);
  });
  bool ok = std::abs(lim - 1.0 / 12) < 1e-4 && v.rational && v.nearest == Q(1, 12);
  report["C6"] = {{"value", lim}, {"nearest", to_string(v.nearest)}, {"residual", v.residual}};
  line(6, "modular integral of c1 = 1/12", ok, t, 60,
       "value " + fmt(lim, 12) + ", verdict " + to_string(v.nearest) + " (residual " + fmt(v.residual, 2) + ")");
}

// ---- 7: quintic monodromy ----
const PeriodEngine& quintic() {
  static PeriodEngine e(load_family("mirror_quintic"));
  return e;
}

void c7() {
  bool ok = false;
  std::string detail;
  double t = timed([&] {
    PrecisionGuard pg(256);
    auto lcs = monodromy_matrix(quintic(), "LCS");
    auto con = monodromy_matrix(quintic(), "conifold");
    MatQ U = lcs.T_int - MatQ::identity(4);
    bool nil = mat_pow(U, 4).is_zero() && !mat_pow(U, 3).is_zero();
    MatQ Uc = con.T_int - MatQ::identity(4);
    ok = lcs.residual < 1e-8 && nil && rank(Uc) == 1 && con.residual < 1e-8;
    detail = "LCS residual " + fmt(lcs.residual, 2) + ", (T-I)^4=0 and (T-I)^3!=0: " + (nil ? "yes" : "no") +
             ", conifold rank(T-I) " + std::to_string(rank(Uc));
    report["C7"] = {{"lcs_T", to_json(lcs.T_int)}, {"conifold_T", to_json(con.T_int)}, {"lcs_residual", lcs.residual},
                    {"conifold_residual", con.residual}};
  });
  line(7, "quintic monodromy", ok, t, 300, detail);
}

// ---- 8, 9: metric identities and inequalities on grids ----
std::vector<Cx> quintic_grid() { return grid_points(parse_grid("annulus:1e-4,0.45,40,40")); }

void c8() {
  double m_second = 0, m_lemma = 0, yuk = 0;
  size_t pts = 0;
  double t = timed([&] {
    PrecisionGuard pg(256);
    auto src = family_chart(quintic());
    auto grid = quintic_grid();
    pts = grid.size();
    auto gps = evaluate_points(src, grid);
    for (auto& gp : gps) {
      if (!gp.ok) {
        m_second = m_lemma = INFINITY;
        continue;
      }
      m_second = std::max(m_second, dd(abs(gp.h_second - gp.omega_H_good) / gp.omega_H_good));
      m_lemma = std::max(m_lemma, dd(abs(gp.R_lemma - gp.R_direct) / abs(gp.R_direct)));
    }
    Cx f = yukawa_canonical(src.jets(Cx(Real(1e-12)), 3));
    yuk = dd(abs(f - Cx(5)));
  });
  bool ok = m_second < 1e-6 && m_lemma < 1e-6 && yuk < 1e-6;
  report["C8"] = {{"points", pts}, {"max_rel_hodge", m_second}, {"max_rel_curvature_identity", m_lemma},
                  {"yukawa_deviation", yuk}};
  line(8, "quintic metric identities", ok, t, 600,
       std::to_string(pts) + " pts: omega_H vs second-order formula " + fmt(m_second, 2) +
           ", curvature identity " + fmt(m_lemma, 2) + ", |F(0)-5| " + fmt(yuk, 2));
}

void c9() {
  InequalityReport el, q;
  double t = timed([&] {
    PrecisionGuard pg(128);
    el = chern_inequality_check(upper_half_plane(), grid_points(parse_grid("rect:-0.5,0.5,0.05,20,40,40")));
    q = chern_inequality_check(family_chart(quintic()), quintic_grid());
  });
  // elliptic: |c1(WP)| = 2 omega_H exactly; allow rounding on the equality
  bool ok = el.max_uio <= 2.0 + 1e-12 && el.max_plk <= 2.0 + 1e-12 && q.holds() && q.max_uio <= 2.0 &&
            q.max_plk <= 2.0;
  for (double s : el.max_sdf) ok = ok && s <= 2.0 + 1e-12;
  for (double s : q.max_sdf) ok = ok && s <= 2.0;
  double sdf = 0;
  for (double s : q.max_sdf) sdf = std::max(sdf, s);
  report["C9"] = {{"elliptic", json::parse(el.to_json())}, {"quintic", json::parse(q.to_json())}};
  line(9, "Chern-form inequalities on grids", ok, t, 120,
       "elliptic uio " + fmt(el.max_uio, 15) + ", quintic uio " + fmt(q.max_uio, 4) + " sdf " + fmt(sdf, 4) +
           " plk " + fmt(q.max_plk, 4) + " (bound 2)");
}

// ---- 10: regularized integrals on the quintic ----
std::string golden_path() { return std::string(HM_GOLDEN_DIR) + "/quintic_integrals.json"; }

void c10() {
  std::vector<double> eps{0.1, 0.05, 0.02};
  std::vector<double> eps_ext{0.1, 0.05, 0.02, 0.01, 0.005, 0.0025, 0.00125};
  json golden;
  bool ok_mono = true, ok_err = true, ok_ext = true;
  std::string errs, ext;
  RationalityVerdict verdict, verdict_ext;
  FluxIndexReport flux;
  L1Report l1;
  double t = timed([&] {
    PrecisionGuard pg(256);
    auto& e = quintic();
    auto src = family_chart(e);
    auto dom = chart_domain(src, &e);
    auto cache = std::make_shared<GeomCache>();
    auto c1 = integrate_regularized(geometry_form(src, "c1-wp", 1, cache), dom, eps);
    flux = flux_vacua_index(src, dom, eps);
    l1 = hodge_curvature_l1(src, dom, eps);
    verdict = rationality_detect(dd(c1.limit), 100);
    std::vector<std::pair<std::string, const RegularizedIntegral*>> rows{
        {"c1-wp", &c1}, {"flux", &flux.index}, {"abs-c1-h", &l1.l1}};
    for (auto& [name, r] : rows) {
      double rel = r->error / std::abs(dd(r->limit));
      ok_mono = ok_mono && r->monotone;
      ok_err = ok_err && rel < 1e-3;
      errs += name + " " + fmt(rel, 2) + " ";
      golden[name] = json::parse(r->to_json());
    }
    golden["omega-h"] = json::parse(flux.hodge_volume.to_json());
    // the same three integrals with the eps table refined towards 0
    auto cache2 = std::make_shared<GeomCache>();
    for (auto name : {"c1-wp", "flux", "abs-c1-h"}) {
      auto r = integrate_regularized(geometry_form(src, name, 1, cache2), dom, eps_ext);
      double rel = r.error / std::abs(dd(r.limit));
      ok_ext = ok_ext && r.monotone && rel < 1e-3;
      ext += std::string(name) + " " + fmt(dd(r.limit), 7) + " (" + fmt(rel, 2) + ") ";
      if (std::string(name) == "c1-wp") verdict_ext = rationality_detect(dd(r.limit), 100);
      golden[std::string(name) + "/refined"] = json::parse(r.to_json());
    }
  });
  // goldens: recorded once, reproduced bit-identically afterwards
  std::string gtext = golden.dump(1) + "\n", gstate;
  if (record_goldens) {
    std::filesystem::create_directories(HM_GOLDEN_DIR);
    write_atomic(golden_path(), gtext);
    gstate = "recorded";
  } else if (!std::filesystem::exists(golden_path())) {
    gstate = "missing";
  } else {
    gstate = read_text(golden_path()) == gtext ? "bit-identical" : "DIFFERENT";
  }
  bool ok_claims = verdict.max_den == 100 && flux.finite && flux.bounded_by_volume &&
                   boost::multiprecision::isfinite(l1.l1.limit) && l1.uniformly_bounded;
  bool ok_gold = gstate == "bit-identical" || gstate == "recorded";
  report["C10"] = golden;
  report["C10_summary"] = {{"monotone", ok_mono},
                           {"error_below_1e-3", ok_err},
                           {"refined_error_below_1e-3", ok_ext},
                           {"rationality", json::parse(verdict.to_json())},
                           {"rationality_refined", json::parse(verdict_ext.to_json())},
                           {"flux_finite", flux.finite},
                           {"flux_bounded_by_2_hodge_volume", flux.bounded_by_volume},
                           {"flux_index", dd(flux.index.limit)},
                           {"hodge_volume", dd(flux.hodge_volume.limit)},
                           {"l1", dd(l1.l1.limit)},
                           {"goldens", gstate}};
  line(10, "regularized integrals on the quintic", ok_mono && ok_err && ok_claims && ok_gold, t, 1800,
       std::string("monotone ") + (ok_mono ? "yes" : "no") + "; rel. error (eps .1,.05,.02): " + errs +
           (ok_err ? "" : "[exceeds 1e-3]") + "; refined eps to 1/800: " + ext + "; rationality " +
           to_string(verdict.nearest) + " (" + (verdict.rational ? "rational" : "not detected") + "), refined " + to_string(verdict_ext.nearest) + " (" +
           (verdict_ext.rational ? "rational" : "not detected") + "); flux " +
           fmt(dd(flux.index.limit), 6) + " <= 2*" + fmt(dd(flux.hodge_volume.limit), 6) + ": " +
           (flux.bounded_by_volume ? "yes" : "no") + "; L1 " + fmt(dd(l1.l1.limit), 6) + "; goldens " + gstate);
}

// ---- 11: cut-off contract ----
void c11() {
  bool items = true, uniform = true, profiles = true;
  double ratio = 0, diff_mod = 0, diff_q = 0, bar_q = 0;
  double t = timed([&] {
    PrecisionGuard pg(128);
    std::vector<double> eps{0.1, 0.05, 0.02};
    for (int profile : {1, 2}) {
      std::vector<double> sups;
      for (double e : eps) {
        auto c = make_cutoff(e, profile);
        double sup = 0;
        // chart samples on rays through the support annulus and beyond
        for (int k = 0; k <= 600; ++k) {
          Real u = Real(e) * Real(0.25 + 2.0 * k / 600);
          Real r = boost::multiprecision::exp(-1 / u);
          for (double ph : {0.3, 2.1, 4.4}) {
            Cx s(r * cos(Real(ph)), r * sin(Real(ph)));
            Real rho = c.rho(s);
            if (rho < 0 || rho > 1) items = false;                              // 0 <= rho <= 1
            if (u <= Real(e) && rho != 0) items = false;                         // vanishes near the divisor
            if (u >= Real(2 * e) && (rho != 1 || c.ddbar_rho(s) != 0)) items = false;  // identically 1 outside
            sup = std::max(sup, std::abs(dd(c.ddbar_rho(s))));
          }
        }
        sups.push_back(sup);
      }
      // support of d rho shrinks: area of e^{-1/eps} <= |s| <= e^{-1/(2 eps)}
      for (size_t i = 1; i < eps.size(); ++i)
        if (!(std::exp(-1 / eps[i]) < std::exp(-1 / eps[i - 1]))) items = false;
      double r = *std::max_element(sups.begin(), sups.end()) / *std::min_element(sups.begin(), sups.end());
      ratio = std::max(ratio, r);
      uniform = uniform && r <= 1.5;
    }
    // profile independence: modular oracle integral and the quintic c1(omega_WP)
    auto uhp = upper_half_plane();
    std::vector<double> me{0.05, 0.025, 0.0125};
    auto m1 = integrate_regularized(geometry_form(uhp, "c1-hodge:1"), modular_domain(), me, true, 1);
    auto m2 = integrate_regularized(geometry_form(uhp, "c1-hodge:1"), modular_domain(), me, true, 2);
    diff_mod = std::abs(dd(m1.limit - m2.limit));
    profiles = diff_mod <= m1.error + m2.error + 1e-12;
    auto& e = quintic();
    auto src = family_chart(e);
    auto dom = chart_domain(src, &e);
    auto cache = std::make_shared<GeomCache>();
    auto q1 = integrate_regularized(geometry_form(src, "c1-wp", 1, cache), dom, eps, true, 1);
    auto q2 = integrate_regularized(geometry_form(src, "c1-wp", 1, cache), dom, eps, true, 2);
    diff_q = std::abs(dd(q1.limit - q2.limit));
    bar_q = q1.error + q2.error;
    profiles = profiles && diff_q <= bar_q;
  });
  report["C11"] = {{"items", items}, {"sup_ratio", ratio}, {"modular_profile_difference", diff_mod},
                   {"quintic_profile_difference", diff_q}, {"quintic_combined_error", bar_q}};
  line(11, "cut-off contract", items && uniform && profiles, t, 120,
       std::string("items (1)-(4) ") + (items ? "hold" : "FAIL") + ", sup ratio " + fmt(ratio, 4) +
           ", profiles: modular diff " + fmt(diff_mod, 2) + ", quintic diff " + fmt(diff_q, 2) + " vs bars " +
           fmt(bar_q, 2));
}

// ---- 12: Poincare boundedness ----
void c12() {
  PoincareReport h, w, ds;
  double t = timed([&] {
    PrecisionGuard pg(128);
    auto& e = quintic();
    auto src = family_chart(e);
    double scale = dd(to_real(e.family().chart_scale));
    auto wrap = [](TopForm f) {
      return [f](const std::vector<Cx>& p) {
        auto v = f.coef(p);
        return std::vector<Cx>(v.begin(), v.end());
      };
    };
    h = poincare_bounded_check(wrap(geometry_form(src, "omega-h")), "two-form", 1e-4, 3, scale);
    w = poincare_bounded_check(wrap(geometry_form(src, "omega-wp")), "two-form", 1e-4, 3, scale);
    ds = poincare_bounded_check(
        [](const std::vector<Cx>& p) {
          std::vector<Cx> o;
          for (auto& x : p) o.push_back(Cx(1) / x);
          return o;
        },
        "one-form-s", 1e-4, 3);
  });
  bool ok = h.bounded && w.bounded && !ds.bounded && h.monotone && w.monotone && ds.monotone;
  report["C12"] = {{"omega_h", json::parse(h.to_json())}, {"omega_wp", json::parse(w.to_json())},
                   {"ds_over_s", json::parse(ds.to_json())}};
  auto sups = [](const PoincareReport& r) {
    std::string s;
    for (double x : r.sup) s += (s.empty() ? "" : "/") + fmt(x, 4);
    return s;
  };
  line(12, "Poincare-boundedness checker", ok, t, 120,
       "omega_H " + sups(h) + (h.bounded ? " bounded" : " unbounded") + ", omega_WP " + sups(w) +
           (w.bounded ? " bounded" : " unbounded") + ", ds/s growth " + fmt(ds.growth, 3) +
           (ds.bounded ? " bounded" : " unbounded"));
}

}  // namespace

int main(int argc, char** argv) {
  std::string only, report_path = "acceptance_report.json";
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--record-goldens")) record_goldens = true;
    else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = argv[++i];
    else if (!std::strcmp(argv[i], "--report") && i + 1 < argc) report_path = argv[++i];
  }
  std::vector<std::pair<std::string, void (*)()>> all{{"1", c1}, {"2", c2},  {"3", c3},   {"4", c4},
                                                       {"5", c5}, {"6", c6},  {"7", c7},   {"8", c8},
                                                       {"9", c9}, {"10", c10}, {"11", c11}, {"12", c12}};
  for (auto& [id, f] : all) {
    if (!only.empty() && ("," + only + ",").find("," + id + ",") == std::string::npos) continue;
    try {
      f();
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL  C" << id << " raised: " << e.what() << std::endl;
    }
  }
  std::ofstream(report_path) << report.dump(1) << "\n";
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : "all criteria passed") << std::endl;
  return failures ? 1 : 0;
}
