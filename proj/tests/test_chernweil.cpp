#include "doctest.h"
#include "hm/chernweil.hpp"

#include <cmath>
#include <random>

using namespace hm;

namespace {

const PeriodEngine& quintic() {
  static PeriodEngine e(load_family("mirror_quintic"));
  return e;
}

double d(const Real& x) { return static_cast<double>(x); }

std::vector<Cx> as_cx(const std::vector<Real>& v) { return std::vector<Cx>(v.begin(), v.end()); }

}  // namespace

TEST_CASE("cut-off family: support, range and coframe bounds") {
  PrecisionGuard pg(128);
  for (int profile : {1, 2}) {
    std::vector<double> sup_dd, sup_d;
    for (double eps : {0.1, 0.05, 0.02}) {
      auto c = make_cutoff(eps, profile);
      // zero up to u = eps, one from u = 2 eps
      for (double u : {eps / 4, eps / 2, eps}) CHECK(d(c.rho_u(Real(u))[0]) == 0);
      for (double u : {2 * eps, 3 * eps, 0.9}) CHECK(d(c.rho_u(Real(u))[0]) == 1);
      Real s_in = boost::multiprecision::exp(Real(-2 / eps));  // u = eps / 2
      CHECK(c.rho(Cx(s_in)) == 0);
      double mx = 0, mxd = 0;
      for (int k = 0; k <= 400; ++k) {
        Real u = Real(eps) * (1 + Real(k) / 400);
        auto r = c.rho_u(u);
        // range
        CHECK(r[0] >= 0);
        CHECK(r[0] <= 1);
        Cx s(boost::multiprecision::exp(-1 / u));
        mx = std::max(mx, std::abs(d(c.ddbar_rho(s))));
        mxd = std::max(mxd, d(abs(c.d_rho(s))));
      }
      sup_dd.push_back(mx);
      sup_d.push_back(mxd);
      // derivatives agree with central differences
      Real u0 = Real(1.37 * eps), h = Real(1e-12);
      auto r0 = c.rho_u(u0);
      Real fd1 = (c.rho_u(u0 + h)[0] - c.rho_u(u0 - h)[0]) / (2 * h);
      Real fd2 = (c.rho_u(u0 + h)[1] - c.rho_u(u0 - h)[1]) / (2 * h);
      CHECK(d(abs(fd1 - r0[1]) / abs(r0[1])) < 1e-8);
      CHECK(d(abs(fd2 - r0[2]) / abs(r0[2])) < 1e-8);
      // d rho vanishes off the support annulus
      CHECK(d(abs(c.d_rho(Cx(boost::multiprecision::exp(Real(-1 / (2.5 * eps)))))) ) == 0);
      CHECK(c.ddbar_rho(Cx(boost::multiprecision::exp(Real(-1 / (0.5 * eps))))) == 0);
    }
    // coframe bound uniform in eps
    double lo = *std::min_element(sup_dd.begin(), sup_dd.end()), hi = *std::max_element(sup_dd.begin(), sup_dd.end());
    CHECK(hi <= 1.5 * lo);
    CHECK(hi < 1e3);
    double lo1 = *std::min_element(sup_d.begin(), sup_d.end()), hi1 = *std::max_element(sup_d.begin(), sup_d.end());
    CHECK(hi1 <= 1.5 * lo1);
  }
  // Euclidean area of the support of d rho, pi (e^{-1/eps} - e^{-2/eps}), decreases to 0
  double prev = 1;
  for (double eps : {0.1, 0.05, 0.02}) {
    double area = M_PI * (std::exp(-1 / eps) - std::exp(-2 / eps));
    CHECK(area < prev);
    prev = area;
  }
  CHECK(prev < 1e-20);
  CHECK_THROWS_AS(make_cutoff(0.8, 1, 0.5), InputError);
  CHECK_THROWS_AS(make_cutoff(0.1, 3), InputError);
  CHECK_THROWS_AS(make_cutoff(-0.1), InputError);
}

TEST_CASE("modular fundamental domain: c1 of the 2y-metric integrates to 1/12") {
  PrecisionGuard pg(128);
  auto uhp = upper_half_plane();
  std::vector<double> eps{0.05, 0.025, 0.0125};
  Real limits[2];
  for (int profile : {1, 2}) {
    auto r = integrate_regularized(geometry_form(uhp, "c1-hodge:1"), modular_domain(), eps, true, profile);
    // oracle: hyperbolic area pi/3 times 1/(4 pi)
    CHECK(std::abs(d(r.limit) - 1.0 / 12) < 1e-4);
    CHECK(r.monotone);
    CHECK(r.converged);
    CHECK(r.error < 1e-10);
    limits[profile - 1] = r.limit;
    auto v = rationality_detect(d(r.limit));
    CHECK(v.rational);
    CHECK(v.nearest == Q(1, 12));
  }
  CHECK(std::abs(d(limits[0] - limits[1])) < 1e-10);
  auto z = integrate_regularized(geometry_form(uhp, "zero"), modular_domain(), eps);
  for (auto& row : z.table) CHECK(row.value == 0);
  CHECK(z.limit == 0);
  CHECK_THROWS_AS(integrate_regularized(geometry_form(uhp, "zero"), modular_domain(), {0.02, 0.05}), InputError);
  CHECK_THROWS_AS(integrate_regularized(geometry_form(uhp, "zero"), modular_domain(), {0.1}), InputError);
}

TEST_CASE("regularized integration is additive and monotone under abs") {
  PrecisionGuard pg(128);
  auto uhp = upper_half_plane();
  auto f1 = geometry_form(uhp, "omega-wp"), f2 = geometry_form(uhp, "c1-wp");
  TopForm sum{"sum", [&](const std::vector<Cx>& p) {
                auto a = f1.coef(p), b = f2.coef(p);
                for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
                return a;
              }};
  std::vector<double> eps{0.05, 0.025, 0.0125};
  auto a = integrate_regularized(f1, modular_domain(), eps), b = integrate_regularized(f2, modular_domain(), eps),
       c = integrate_regularized(sum, modular_domain(), eps);
  for (size_t i = 0; i < eps.size(); ++i) {
    CHECK(d(abs(c.table[i].value - a.table[i].value - b.table[i].value)) < 1e-30);
    CHECK(abs(b.table[i].value) <= b.table[i].abs_value);
  }
  // c1 of the tangent line is -2 omega for the Poincare metric: -1/6
  CHECK(std::abs(d(b.limit) + 1.0 / 6) < 1e-8);
}

TEST_CASE("chern_form on rank-1 bundles") {
  PrecisionGuard pg(256);
  auto uhp = upper_half_plane();
  std::vector<Cx> pts{Cx(Real(0.1), Real(0.8)), Cx(Real(-0.4), Real(2.5))};
  auto c1 = chern_form(line_curvature(uhp, pts, "hodge-line"), 1);
  CHECK(c1.p == 1);
  CHECK(c1.warnings.empty());
  for (size_t i = 0; i < pts.size(); ++i) {
    double y = d(pts[i].im);
    // coefficient of (i/2pi) dtau ^ dtaubar is 1/(4 y^2), i.e. (1/4pi) y^-2 dx ^ dy
    CHECK(std::abs(c1.field.values[i][0] - 1 / (4 * y * y)) < 1e-14);
  }
  // flat metric
  CurvatureField flat;
  flat.points = {{0, 1}};
  flat.R = {Mat<Cx>(1, 1)};
  CHECK(chern_form(flat, 1).field.values[0][0] == 0);
  auto c0 = chern_form(flat, 0);
  CHECK(c0.field.values[0][0] == 1);
  auto c2 = chern_form(flat, 2);
  CHECK_FALSE(c2.warnings.empty());
  CHECK(c2.field.values[0][0] == 0);

  // quintic tangent line: curvature of the metric vs the Ricci form from the jet route
  auto qs = family_chart(quintic());
  std::vector<Cx> qp{Cx(Real(0.01)), Cx(Real(0.2), Real(-0.1))};
  auto ct = chern_form(line_curvature(qs, qp, "tangent"), 1);
  for (size_t i = 0; i < qp.size(); ++i) {
    auto gp = geometry_at(qs, qp[i]);
    CHECK(std::abs(ct.field.values[i][0] - d(-gp.R_jet / gp.g)) < 1e-10 * std::abs(ct.field.values[i][0]));
  }

  // step halving: -Delta log h / 4 converges to the c1 coefficient at second order
  Cx w(Real(0.3), Real(1.1));
  auto gp = geometry_at(uhp, w);
  double e1 = d(abs(fd_metric(uhp, w, Real(1e-2)) - gp.g)), e2 = d(abs(fd_metric(uhp, w, Real(5e-3)) - gp.g));
  CHECK(e1 / e2 == doctest::Approx(4).epsilon(0.01));
}

TEST_CASE("invariant polynomials are conjugation invariant") {
  PrecisionGuard pg(128);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  auto rnd = [&](int n) {
    Mat<Cx> m(n, n);
    for (auto& x : m.a) x = Cx(Real(U(rng)), Real(U(rng)));
    return m;
  };
  auto f = InvariantPolynomial::parse("c1^2 - 2 c2 + 1/3 c1 c3 - c4");
  auto tr2 = InvariantPolynomial::parse("c1^2-2*c2");
  for (int trial = 0; trial < 20; ++trial) {
    auto A = rnd(4), g = rnd(4);
    auto gi = inverse(g);
    REQUIRE(gi.has_value());
    auto B = g * A * *gi;
    Cx a = f.eval(A), b = f.eval(B);
    CHECK(Field<Cx>::mag(a - b) < 1e-10 * std::max(1.0, Field<Cx>::mag(a)));
    // c1^2 - 2 c2 = tr(A^2)
    auto A2 = A * A;
    Cx t(0);
    for (int i = 0; i < 4; ++i) t += A2(i, i);
    CHECK(Field<Cx>::mag(tr2.eval(A) - t) < 1e-25);
  }
  auto c = elementary_symmetric(Mat<Cx>::identity(3));
  CHECK(d(c[0].re) == doctest::Approx(3));
  CHECK(d(c[1].re) == doctest::Approx(3));
  CHECK(d(c[2].re) == doctest::Approx(1));
  CHECK_THROWS_AS(InvariantPolynomial::parse("c0"), InputError);
  CHECK_THROWS_AS(InvariantPolynomial::parse("x1"), InputError);
}

TEST_CASE("rationality detection") {
  auto a = rationality_detect(0.0833331, 60, 1e-3);
  CHECK(a.rational);
  CHECK(a.nearest == Q(1, 12));
  CHECK(a.residual == doctest::Approx(std::abs(0.0833331 - 1.0 / 12)).epsilon(1e-9));
  auto b = rationality_detect(0.3183099, 50, 1e-6);
  CHECK_FALSE(b.rational);
  CHECK(b.nearest.get_den() <= 50);
  auto c = rationality_detect(-2.5);
  CHECK(c.nearest == Q(-5, 2));
  CHECK(c.residual == 0);
  auto e = rationality_detect(M_PI, 1000, 1e-3);
  CHECK(e.nearest == Q(355, 113));
  CHECK_THROWS_AS(rationality_detect(NAN), InputError);
}

TEST_CASE("Chern number inequalities pointwise") {
  PrecisionGuard pg(128);
  auto uhp = upper_half_plane();
  std::vector<Cx> pts;
  for (double x : {-0.4, 0.0, 0.3})
    for (double y : {0.2, 1.0, 7.0}) pts.emplace_back(Real(x), Real(y));
  auto el = chern_inequality_check(uhp, pts);
  CHECK(el.holds());
  CHECK(el.max_sdf[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(el.max_sdf[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(el.max_uio == doctest::Approx(2.0).epsilon(1e-12));
  auto qs = family_chart(quintic());
  auto q = chern_inequality_check(qs, grid_points(parse_grid("annulus:1e-6,0.45,5,6")));
  CHECK(q.holds());
  CHECK(q.max_uio <= 2.0);
  CHECK(q.max_plk <= 2.0);
  CHECK(max_ratio({Real(0), Real(0)}, {Real(1), Real(2)}) == 0);
}

TEST_CASE("flux integrand toy and radial log mass") {
  PrecisionGuard pg(128);
  // constant curvature with R = -g^2: det(g (1 - 1)) = 0
  for (double g : {0.1, 1.0, 13.0}) CHECK(flux_integrand(Real(g), -Real(g) * Real(g)) == 0);
  for (double eps : {0.1, 0.05, 0.02, 0.001}) CHECK(poincare_log_mass(eps) == doctest::Approx(2 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("Poincare boundedness checker") {
  PrecisionGuard pg(128);
  auto one = [](const std::vector<Cx>& p) { return std::vector<Cx>(p.size(), Cx(1)); };
  auto inv = [](const std::vector<Cx>& p) {
    std::vector<Cx> o;
    for (auto& x : p) o.push_back(Cx(1) / x);
    return o;
  };
  auto dw = poincare_bounded_check(one, "regular", 1e-2, 4);
  CHECK(dw.bounded);
  auto dss = poincare_bounded_check(inv, "one-form-s", 1e-2, 4);
  CHECK_FALSE(dss.bounded);
  CHECK(dss.monotone);
  CHECK(dss.growth == doctest::Approx(1).epsilon(0.1));
  auto qs = family_chart(quintic());
  for (auto name : {"omega-h", "omega-wp"}) {
    auto f = geometry_form(qs, name);
    auto rep = poincare_bounded_check([&](const std::vector<Cx>& p) { return as_cx(f.coef(p)); }, "two-form", 1e-4,
                                      6, 3125);
    CHECK(rep.bounded);
    CHECK(rep.monotone);
  }
  CHECK_THROWS_AS(poincare_bounded_check(one, "three-form", 1e-2, 4), InputError);
}

TEST_CASE("quintic regularized integrals: tables, bounds, L1") {
  PrecisionGuard pg(128);
  auto& e = quintic();
  auto qs = family_chart(e);
  auto dom = chart_domain(qs, &e);
  dom.angular = 16;
  dom.gauss = 8;
  std::vector<double> eps{0.1, 0.05, 0.02};
  auto cache = std::make_shared<GeomCache>();
  auto c1 = integrate_regularized(geometry_form(qs, "c1-wp", 1, cache), dom, eps);
  CHECK(c1.monotone);
  CHECK(c1.table.size() == 3);
  auto fl = flux_vacua_index(qs, dom, eps);
  CHECK(fl.index.monotone);
  CHECK(boost::multiprecision::isfinite(fl.index.limit));
  CHECK(fl.bounded_by_volume);
  CHECK(fl.hodge_volume.limit > 0);
  auto l1 = hodge_curvature_l1(qs, dom, eps);
  CHECK(l1.l1.monotone);
  CHECK(l1.l1.limit > 0);
  CHECK(l1.uniformly_bounded);
  // additivity across forms sharing the same nodes
  auto wp = integrate_regularized(geometry_form(qs, "omega-wp", 1, cache), dom, eps);
  auto flux = integrate_regularized(geometry_form(qs, "flux", 1, cache), dom, eps);
  for (size_t i = 0; i < eps.size(); ++i)
    CHECK(d(abs(flux.table[i].value - (c1.table[i].value - wp.table[i].value))) < 1e-25);
}
