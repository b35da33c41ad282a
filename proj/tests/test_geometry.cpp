#include "doctest.h"
#include "hm/geometry.hpp"

#include <cmath>

using namespace hm;

namespace {

const PeriodEngine& quintic() {
  static PeriodEngine e(load_family("mirror_quintic"));
  return e;
}

double d(const Real& x) { return static_cast<double>(x); }
double reld(const Real& a, const Real& b) { return d(boost::multiprecision::abs(a - b) / boost::multiprecision::abs(b)); }

Cx cx(double a, double b = 0) { return Cx(Real(a), Real(b)); }

}  // namespace

TEST_CASE("upper half plane: Poincare metric closed forms") {
  PrecisionGuard pg(256);
  auto src = upper_half_plane();
  for (auto tau : {cx(0.3, 1.7), cx(-2, 0.05), cx(10, 40)}) {
    auto gp = geometry_at(src, tau);
    REQUIRE(gp.ok);
    Real y = tau.im;
    // oracle: Q = 2y, g = 1/(4y^2), R = 2 g^2
    CHECK(reld(gp.Q, 2 * y) < 1e-60);
    CHECK(reld(gp.g, 1 / (4 * y * y)) < 1e-60);
    CHECK(reld(gp.R_direct, 2 * gp.g * gp.g) < 1e-60);
    CHECK(reld(gp.R_jet, 2 * gp.g * gp.g) < 1e-60);
    CHECK(reld(gp.R_lemma, 2 * gp.g * gp.g) < 1e-60);
    CHECK(std::abs(d(gp.hol_sec) + 2) < 1e-60);
    CHECK(reld(gp.h_second, gp.g) < 1e-60);
    CHECK(reld(gp.h_five, gp.g) < 1e-60);
    // H^{1,0} curvature is -g (top piece), second fundamental term absent
    CHECK(reld(gp.Rp[1], -gp.g) < 1e-60);
    CHECK(gp.Rp_second[1] == 0);
    CHECK(reld(gp.Rp_line[1], gp.Rp[1]) < 1e-60);
    // equality case |c1(WP)| = 2 h
    CHECK(std::abs(d(boost::multiprecision::abs(gp.c1_wp) / gp.h_second) - 2) < 1e-30);
    CHECK(gp.iol_defect < 1e-60);
  }
  CHECK_FALSE(geometry_at(src, cx(0, -1)).ok);
}

TEST_CASE("coordinate rescaling transforms g and R as tensors") {
  PrecisionGuard pg(256);
  auto src = upper_half_plane();
  auto r2 = rescaled(src, cx(2));
  Cx w = cx(0.4, 0.9);
  auto a = geometry_at(src, w), b = geometry_at(r2, w * Real(2));
  CHECK(reld(b.g, a.g / 4) < 1e-8);
  CHECK(reld(b.R_direct, a.R_direct / 16) < 1e-8);
  CHECK(std::abs(d(b.hol_sec - a.hol_sec)) < 1e-8);

  auto& e = quintic();
  auto qs = family_chart(e);
  auto qr = rescaled(qs, cx(0, 3));
  Cx s = cx(0.01, 0.02);
  auto c = geometry_at(qs, s), f = geometry_at(qr, s * cx(0, 3));
  CHECK(reld(f.g, c.g / 9) < 1e-8);
  CHECK(reld(f.R_direct, c.R_direct / 81) < 1e-8);
  CHECK(reld(f.h_second, c.h_second / 9) < 1e-8);
}

TEST_CASE("gauge change of Omega leaves the geometry unchanged") {
  PrecisionGuard pg(256);
  auto qs = family_chart(quintic());
  // f(w) = exp(w) (1 + w^2 / 3)
  auto fexp = [](const Cx& w, int order) {
    std::vector<Cx> e(order + 1), p(order + 1, Cx(0)), out(order + 1, Cx(0));
    Cx ew = exp(w);
    Real fac(1);
    for (int k = 0; k <= order; ++k) {
      if (k > 0) fac *= Real(k);
      e[k] = ew / Cx(fac);
    }
    p[0] = Cx(1) + w * w / Cx(Real(3));
    if (order >= 1) p[1] = Cx(Real(2)) * w / Cx(Real(3));
    if (order >= 2) p[2] = Cx(Real(1)) / Cx(Real(3));
    for (int a = 0; a <= order; ++a)
      for (int b = 0; b <= a; ++b) out[a] += e[b] * p[a - b];
    return out;
  };
  auto gs = regauged(qs, fexp);
  for (auto s : {cx(0.02), cx(-0.1, 0.2), cx(0.003, -0.001)}) {
    auto a = geometry_at(qs, s), b = geometry_at(gs, s);
    REQUIRE(a.ok);
    REQUIRE(b.ok);
    CHECK(reld(b.g, a.g) < 1e-10);
    CHECK(reld(b.R_direct, a.R_direct) < 1e-10);
    CHECK(reld(b.h_second, a.h_second) < 1e-10);
    for (int p = 0; p <= 3; ++p) CHECK(d(boost::multiprecision::abs(b.Rp[p] - a.Rp[p]) / a.h_second) < 1e-10);
  }
}

TEST_CASE("quintic: curvature routes, Hodge metric identities, bounds") {
  PrecisionGuard pg(256);
  auto qs = family_chart(quintic());
  for (auto s : {cx(1e-3), cx(0.05, 0.05), cx(-0.3), cx(0.2, -0.35), cx(0.45, 0.1)}) {
    auto gp = geometry_at(qs, s);
    REQUIRE(gp.ok);
    CHECK(gp.g > 0);
    CHECK(gp.has_yukawa);
    CHECK(reld(gp.R_yukawa, gp.R_direct) < 1e-6);
    CHECK(reld(gp.R_jet, gp.R_direct) < 1e-6);
    CHECK(reld(gp.R_lemma, gp.R_direct) < 1e-6);
    CHECK(reld(gp.g_quot, gp.g) < 1e-6);
    for (int j = 0; j <= 3; ++j) CHECK(reld(gp.N[j], gp.N_det[j]) < 1e-30);
    CHECK(reld(gp.h_second, gp.omega_H_good) < 1e-6);
    CHECK(reld(gp.h_five, gp.omega_H_good) < 1e-6);
    CHECK(gp.iol_defect < 1e-30);
    CHECK(gp.nabla_defect < 1e-30);
    for (int p = 0; p <= 3; ++p) {
      CHECK(reld(gp.Rp_line[p], gp.Rp[p]) < 1e-6);
      CHECK(d(boost::multiprecision::abs(gp.Rp[p]) / gp.h_second) <= 2.0);
    }
    CHECK(gp.Rp_second[3] == 0);
    CHECK(reld(gp.Rp[3], -gp.g) < 1e-30);
    CHECK(d(boost::multiprecision::abs(gp.c1_wp) / gp.omega_H_good) <= 2.0);
    // finite differences of log Q
    Real h = Real(1e-4 * qs.dist(s));
    CHECK(reld(fd_metric(qs, s, h), gp.g) < 1e-6);
  }
}

TEST_CASE("quintic near large complex structure: g_tt ~ (3/4) y^-2") {
  PrecisionGuard pg(256);
  auto qs = family_chart(quintic());
  const double twopi = 2 * M_PI;
  auto gtt = [&](double y) {
    // y = -log|z| / 2 pi with z = s / 5^5
    Real s = 3125 * boost::multiprecision::exp(Real(-twopi * y));
    auto gp = geometry_at(qs, Cx(s));
    REQUIRE(gp.ok);
    // t = log z / 2 pi i, |ds/dt|^2 = 4 pi^2 |s|^2
    return d(gp.g * s * s) * twopi * twopi;
  };
  double y1 = 10, y2 = 20;
  double slope = std::log(gtt(y2) / gtt(y1)) / std::log(y2 / y1);
  CHECK(std::abs(slope + 2) < 1e-2);
  CHECK(std::abs(gtt(y2) * y2 * y2 - 0.75) < 1e-2);
  // 3/(4y^2) is three times the Poincare metric, so K -> -2/3
  auto gp = geometry_at(qs, cx(1e-40));
  CHECK(std::abs(d(gp.hol_sec) + 2.0 / 3) < 2e-3);
}

TEST_CASE("quintic Yukawa coupling: LCS limit, conifold pole, isotropy") {
  PrecisionGuard pg(256);
  auto& e = quintic();
  auto qs = family_chart(e);
  auto p = qs.jets(cx(1e-9), 3);
  Cx f = yukawa_canonical(p);
  CHECK(std::abs(d(f.re) - 5) < 1e-6);
  CHECK(std::abs(d(f.im)) < 1e-6);

  auto near = [&](double dd) { return d(abs(geometry_at(qs, cx(1 - dd)).F_raw)); };
  double slope = std::log(near(1e-5) / near(1e-4)) / std::log(0.1);
  CHECK(std::abs(slope + 1) < 1e-2);

  std::vector<Cx> pts{cx(0.01), cx(0.1, 0.2), cx(-0.4)};
  auto fld = yukawa_coupling(qs, pts);
  CHECK(fld.flagged.empty());
  for (auto& row : fld.values) {
    CHECK(row[fld.col("S01_rel")] < 1e-9);
    CHECK(row[fld.col("S02_rel")] < 1e-9);
    CHECK(row[fld.col("holomorphy_defect")] < 1e-6);
  }
}

TEST_CASE("field operations on grids") {
  PrecisionGuard pg(128);
  auto qs = family_chart(quintic());
  auto pts = grid_points(parse_grid("annulus:0.01,0.4,3,4"));
  CHECK(pts.size() == 12);
  auto m = wp_metric(qs, pts, 2);
  CHECK(m.flagged.empty());
  for (auto& row : m.values) {
    CHECK(row[m.col("rel_fd")] < 1e-6);
    CHECK(row[m.col("rel_quotient")] < 1e-6);
  }
  auto c = wp_curvature(qs, pts, "yukawa", 2);
  for (auto& row : c.values) CHECK(row[c.col("rel_other")] < 1e-6);
  auto hb = hodge_bundle_curvature(qs, pts, 2, 1, 2);
  CHECK(hb.max_of("plk_ratio") <= 2.0);
  auto gh = generalized_hodge_metric(qs, pts, 3);
  CHECK(gh.max_of("rel_chern_sum") < 1e-6);
  CHECK_THROWS_AS(generalized_hodge_metric(qs, pts, 2), InputError);
  CHECK_THROWS_AS(wp_curvature(upper_half_plane(), pts, "yukawa"), InputError);
  CHECK_THROWS_AS(parse_grid("disc:1,2"), InputError);
  auto rect = grid_points(parse_grid("rect:-0.5,0.5,1,2,3,2"));
  CHECK(rect.size() == 6);
  auto el = hodge_metric_cy3(qs, pts);
  CHECK(el.max_of("rel_second") < 1e-6);
  CHECK(m.to_csv().find("re,im,g") == 0);
  CHECK(m.to_json().find("\"quantity\": \"wp_metric\"") != std::string::npos);
}
