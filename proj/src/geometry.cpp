#include "hm/geometry.hpp"
#include "hm/hodge.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

namespace hm {

namespace {

Vec<Cx> conj_vec(const Vec<Cx>& v) {
  Vec<Cx> r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = conj(v[i]);
  return r;
}

Vec<Cx> axpy(const Vec<Cx>& y, const Cx& a, const Vec<Cx>& x) {
  Vec<Cx> r = y;
  for (size_t i = 0; i < r.size(); ++i) r[i] += a * x[i];
  return r;
}

Real vnorm(const Vec<Cx>& v) {
  Real s(0);
  for (auto& x : v) s += norm2(x);
  return boost::multiprecision::sqrt(s);
}

Jet jet_det(std::vector<std::vector<Jet>> m) {
  int k = static_cast<int>(m.size());
  Jet det = Jet::constant(Cx(1), m[0][0].A, m[0][0].B);
  for (int c = 0; c < k; ++c) {
    det = det * m[c][c];
    Jet inv = jet_inv(m[c][c]);
    for (int r = c + 1; r < k; ++r) {
      Jet f = m[r][c] * inv;
      for (int j = c; j < k; ++j) m[r][j] = m[r][j] - f * m[c][j];
    }
  }
  return det;
}

// solve m x = b with jet entries, no pivoting (leading minors are Gram determinants)
std::vector<Jet> jet_solve(std::vector<std::vector<Jet>> m, std::vector<Jet> b) {
  int k = static_cast<int>(m.size());
  for (int c = 0; c < k; ++c) {
    Jet inv = jet_inv(m[c][c]);
    for (int r = c + 1; r < k; ++r) {
      Jet f = m[r][c] * inv;
      for (int j = c; j < k; ++j) m[r][j] = m[r][j] - f * m[c][j];
      b[r] = b[r] - f * b[c];
    }
  }
  std::vector<Jet> x(k);
  for (int r = k - 1; r >= 0; --r) {
    Jet s = b[r];
    for (int j = r + 1; j < k; ++j) s = s - m[r][j] * x[j];
    x[r] = s / m[r][r];
  }
  return x;
}

double to_d(const Real& x) { return static_cast<double>(x); }

}  // namespace

JetSource family_chart(const PeriodEngine& e) {
  JetSource s;
  const auto& f = e.family();
  s.chart = f.name + " chart s = " + to_string(f.chart_scale) + " z, |s| <= " + to_string(f.chart_radius);
  s.weight = f.weight;
  s.S = f.S;
  s.engine = &e;
  s.punctured = true;
  s.jets = [&e](const Cx& w, int order) { return chart_jets(e, w, order); };
  Real c = to_real(f.chart_scale);
  s.dist = [&e, c](const Cx& w) {
    return e.distance_to_singular(w / Cx(c)) * static_cast<double>(c);
  };
  return s;
}

JetSource upper_half_plane() {
  JetSource s;
  s.chart = "upper half plane, coordinate tau, Pi = (tau, 1)";
  s.weight = 1;
  s.S = MatQ(2, 2);
  s.S(0, 1) = QI(-1);
  s.S(1, 0) = QI(1);
  s.jets = [](const Cx& w, int order) {
    std::vector<Vec<Cx>> p(order + 1, Vec<Cx>(2, Cx(0)));
    p[0] = {w, Cx(1)};
    if (order >= 1) p[1] = {Cx(1), Cx(0)};
    return p;
  };
  s.dist = [](const Cx& w) { return static_cast<double>(w.im); };
  return s;
}

JetSource rescaled(const JetSource& src, const Cx& lambda) {
  JetSource s = src;
  s.chart = src.chart + ", rescaled by " + to_string(lambda, 6);
  auto inner = src.jets;
  s.jets = [inner, lambda](const Cx& w, int order) {
    auto p = inner(w / lambda, order);
    Cx f(1);
    Cx il = Cx(1) / lambda;
    for (int a = 0; a <= order; ++a) {
      for (auto& x : p[a]) x = x * f;
      f = f * il;
    }
    return p;
  };
  auto d = src.dist;
  double lm = static_cast<double>(abs(lambda));
  s.dist = [d, lambda, lm](const Cx& w) { return d(w / lambda) * lm; };
  return s;
}

JetSource regauged(const JetSource& src, std::function<std::vector<Cx>(const Cx& w, int order)> f) {
  JetSource s = src;
  s.chart = src.chart + ", regauged";
  auto inner = src.jets;
  s.jets = [inner, f](const Cx& w, int order) {
    auto p = inner(w, order);
    auto fc = f(w, order);
    std::vector<Vec<Cx>> q(order + 1, Vec<Cx>(p[0].size(), Cx(0)));
    for (int a = 0; a <= order; ++a)
      for (int b = 0; b <= a; ++b) q[a] = axpy(q[a], fc[b], p[a - b]);
    return q;
  };
  return s;
}

GeomPoint geometry_at(const JetSource& src, const Cx& w) {
  int n = src.weight;
  int r = src.S.r;
  if (r != n + 1) throw InputError("geometry needs a local system of rank weight+1 (all Hodge numbers 1)");
  int K = n + 1;
  auto p = src.jets(w, K);
  GeomPoint gp;
  gp.w = w;
  Cx in = i_pow<Cx>(n);
  auto H = [&](const Vec<Cx>& a, const Vec<Cx>& b) { return in * pairing(src.S, a, conj_vec(b)); };

  Jet Qj(K, K);
  for (int a = 0; a <= K; ++a)
    for (int b = 0; b <= K; ++b) Qj(a, b) = H(p[a], p[b]);
  gp.Q = Qj.value().re;
  if (gp.Q <= 0) {
    gp.ok = false;
    gp.flag = "i^n S(Pi, conj Pi) is not positive";
    return gp;
  }

  // metric and curvature from log Q
  Jet lq = jet_log(Qj.truncated(2, 2));
  Jet gj = Cx(-1) * lq.dz().dzb();
  gp.g = gj.value().re;
  Jet lg = jet_log(gj);
  gp.R_jet = gp.g * lg.ddbar().re;

  // E(i,j) = d^i dbar^j Q as (1,1) jets
  std::vector<std::vector<Jet>> E(n + 1, std::vector<Jet>(n + 1));
  {
    std::vector<Jet> rows(n + 1);
    Jet x = Qj;
    for (int i = 0; i <= n; ++i) {
      Jet y = x;
      for (int j = 0; j <= n; ++j) {
        E[i][j] = y.truncated(1, 1);
        if (j < n) y = y.dzb();
      }
      if (i < n) x = x.dz();
    }
  }
  // Gram determinants and Hodge norms N_j = (-1)^j D_{j+1} / D_j
  std::vector<Jet> D(n + 2);
  D[0] = Jet::constant(Cx(1), 1, 1);
  for (int k = 1; k <= n + 1; ++k) {
    std::vector<std::vector<Jet>> m(k, std::vector<Jet>(k));
    for (int i = 0; i < k; ++i)
      for (int l = 0; l < k; ++l) m[i][l] = E[i][l];
    D[k] = jet_det(m);
  }
  std::vector<Jet> Nj(n + 1);
  for (int j = 0; j <= n; ++j) {
    Nj[j] = D[j + 1] / D[j];
    if (j % 2) Nj[j] = Cx(-1) * Nj[j];
    gp.N_det.push_back(Nj[j].value().re);
    if (Nj[j].value().re <= 0) {
      gp.ok = false;
      gp.flag = "Hodge norm of the H^{" + std::to_string(n - j) + "," + std::to_string(j) + "} frame is not positive";
      return gp;
    }
  }
  std::vector<Real> lnN(n + 1);
  for (int j = 0; j <= n; ++j) lnN[j] = jet_log(Nj[j]).ddbar().re;

  Jet hj = Jet::constant(Cx(0), 1, 1);
  for (int j = 0; j < n; ++j) hj = hj + Nj[j + 1] / Nj[j];
  gp.h_second = hj.value().re;
  gp.c1_H = -jet_log(hj).ddbar().re;
  gp.h_five = 0;
  for (int pp = 1; pp <= n; ++pp) gp.h_five += Real(pp) * -lnN[n - pp];
  gp.R_lemma = gp.g * gp.g + gp.g * lnN[1];

  // Gram-Schmidt frame GS_j = d^j Pi - sum_k x_k d^k Pi, with jets of the coefficients
  std::vector<Vec<Cx>> dPi(K + 1);
  {
    Real f(1);
    for (int k = 0; k <= K; ++k) {
      if (k > 0) f *= Real(k);
      dPi[k] = p[k];
      for (auto& x : dPi[k]) x = x * f;
    }
  }
  std::vector<Vec<Cx>> GS(n + 1), dGS(n + 1), dbGS(n + 1);
  for (int j = 0; j <= n; ++j) {
    Vec<Cx> v = dPi[j], dv = dPi[j + 1], dbv(r, Cx(0));
    if (j > 0) {
      std::vector<std::vector<Jet>> m(j, std::vector<Jet>(j));
      std::vector<Jet> b(j);
      for (int i = 0; i < j; ++i) {
        for (int k = 0; k < j; ++k) m[i][k] = E[k][i];
        b[i] = E[j][i];
      }
      auto x = jet_solve(m, b);
      for (int k = 0; k < j; ++k) {
        v = axpy(v, -x[k].value(), dPi[k]);
        dv = axpy(dv, -x[k](1, 0), dPi[k]);
        dv = axpy(dv, -x[k].value(), dPi[k + 1]);
        dbv = axpy(dbv, -x[k](0, 1), dPi[k]);
      }
    }
    GS[j] = v;
    dGS[j] = dv;
    dbGS[j] = dbv;
  }
  for (int j = 0; j <= n; ++j) {
    Real nj = H(GS[j], GS[j]).re;
    if (j % 2) nj = -nj;
    gp.N.push_back(nj);
  }
  gp.g_quot = gp.N[1] / gp.N[0];
  gp.R_direct = 2 * gp.g * gp.g - (n >= 2 ? gp.N[2] / gp.N[0] : Real(0));

  gp.Rp.assign(n + 1, Real(0));
  gp.Rp_first = gp.Rp_second = gp.Rp_line = gp.Rp;
  gp.nabla_defect = 0;
  for (int j = 0; j <= n; ++j) {
    int pp = n - j;
    Real first(0), second(0);
    if (j < n) {
      Cx c = H(dGS[j], GS[j + 1]);
      first = norm2(c) / gp.N[j + 1];
      Real coef = static_cast<double>(abs(c / H(GS[j + 1], GS[j + 1]) - Cx(1)));
      gp.nabla_defect = std::max(gp.nabla_defect, coef);
    }
    if (j > 0) {
      Cx c = H(dbGS[j], GS[j - 1]);
      second = norm2(c) / gp.N[j - 1];
    }
    gp.Rp_first[pp] = -first / gp.N[j];
    gp.Rp_second[pp] = second / gp.N[j];
    gp.Rp[pp] = gp.Rp_first[pp] + gp.Rp_second[pp];
    gp.Rp_line[pp] = lnN[j];
  }
  // dbar of the H^{n-1,1} frame is g Omega
  {
    Vec<Cx> diff = axpy(dbGS[1], Cx(-gp.g), GS[0]);
    gp.iol_defect = vnorm(diff) / (gp.g * vnorm(GS[0]));
  }

  if (n == 3) {
    gp.has_yukawa = true;
    gp.F_raw = pairing(src.S, dPi[0], dPi[3]);
    gp.R_yukawa = 2 * gp.g * gp.g - norm2(gp.F_raw) / (gp.g * gp.Q * gp.Q);
    gp.omega_H_good = 4 * gp.g - gp.R_direct / gp.g;
  }
  gp.hol_sec = -gp.R_direct / (gp.g * gp.g);
  gp.c1_wp = -gp.R_direct / gp.g;
  gp.flux = -gp.R_direct / gp.g - gp.g;
  if (gp.g <= 0) {
    gp.ok = false;
    gp.flag = "Weil-Petersson metric is not positive";
  }
  return gp;
}

std::vector<GeomPoint> evaluate_points(const JetSource& src, const std::vector<Cx>& pts, int jobs) {
  std::vector<GeomPoint> out(pts.size());
  auto work = [&](size_t i) {
    try {
      out[i] = geometry_at(src, pts[i]);
    } catch (const std::exception& e) {
      out[i] = GeomPoint{};
      out[i].w = pts[i];
      out[i].ok = false;
      out[i].flag = e.what();
    }
  };
  if (jobs <= 1 || pts.size() < 2) {
    for (size_t i = 0; i < pts.size(); ++i) work(i);
    return out;
  }
  unsigned bits = precision_bits();
  std::atomic<size_t> next{0};
  std::vector<std::thread> th;
  for (int t = 0; t < jobs; ++t)
    th.emplace_back([&, bits] {
      PrecisionGuard pg(bits);
      for (size_t i; (i = next.fetch_add(1)) < pts.size();) work(i);
    });
  for (auto& t : th) t.join();
  return out;
}

Real fd_metric(const JetSource& src, const Cx& w, const Real& h) {
  Cx in = i_pow<Cx>(src.weight);
  auto lq = [&](const Cx& z) {
    auto p = src.jets(z, 0);
    return boost::multiprecision::log((in * pairing(src.S, p[0], conj_vec(p[0]))).re);
  };
  Real c = lq(w);
  Real s = lq(w + Cx(h)) + lq(w - Cx(h)) + lq(w + Cx(Real(0), h)) + lq(w - Cx(Real(0), h)) - 4 * c;
  return -s / (4 * h * h);
}

Cx yukawa_canonical(const std::vector<Vec<Cx>>& p) {
  // t = X1/X0 in the gauge X0 = 1; F transforms as a cubic differential
  const Cx &x0 = p[0][0], &x1 = p[0][1], &dx0 = p[1][0], &dx1 = p[1][1];
  Cx dt = (x0 * dx1 - x1 * dx0) / (x0 * x0);
  // raw coupling in the chart coordinate: S(Pi, d^3 Pi) with d^3 Pi = 6 p_3
  int r = static_cast<int>(p[0].size());
  MatQ S(r, r);
  for (int i = 0; i < r / 2; ++i) {
    S(i, i + r / 2) = QI(1);
    S(i + r / 2, i) = QI(-1);
  }
  Vec<Cx> d3 = p[3];
  for (auto& x : d3) x = x * Real(6);
  Cx F = pairing(S, p[0], d3);
  return F / (x0 * x0 * dt * dt * dt);
}

GridSpec parse_grid(const std::string& spec) {
  GridSpec g;
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw InputError("grid spec must look like annulus:r0,r1,nr,nphi or rect:x0,x1,y0,y1,nx,ny");
  g.kind = spec.substr(0, colon);
  std::vector<double> v;
  std::stringstream ss(spec.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  if (g.kind == "annulus") {
    if (v.size() != 4) throw InputError("annulus grid needs r0,r1,nr,nphi");
    g.a0 = v[0];
    g.a1 = v[1];
    g.na = static_cast<int>(v[2]);
    g.nb = static_cast<int>(v[3]);
  } else if (g.kind == "rect") {
    if (v.size() != 6) throw InputError("rect grid needs x0,x1,y0,y1,nx,ny");
    g.a0 = v[0];
    g.a1 = v[1];
    g.b0 = v[2];
    g.b1 = v[3];
    g.na = static_cast<int>(v[4]);
    g.nb = static_cast<int>(v[5]);
  } else {
    throw InputError("unknown grid kind " + g.kind);
  }
  if (g.na < 1 || g.nb < 1) throw InputError("grid sizes must be positive");
  return g;
}

std::vector<Cx> grid_points(const GridSpec& g) {
  std::vector<Cx> pts;
  if (g.kind == "annulus") {
    if (!(g.a0 > 0 && g.a1 >= g.a0)) throw InputError("annulus radii must satisfy 0 < r0 <= r1");
    for (int i = 0; i < g.na; ++i) {
      double t = g.na == 1 ? 0.5 : static_cast<double>(i) / (g.na - 1);
      Real rad = boost::multiprecision::exp(Real(std::log(g.a0) * (1 - t) + std::log(g.a1) * t));
      for (int j = 0; j < g.nb; ++j) {
        Real th = 2 * pi_r() * (Real(j) + Real(0.5)) / g.nb;
        pts.emplace_back(rad * boost::multiprecision::cos(th), rad * boost::multiprecision::sin(th));
      }
    }
  } else {
    for (int i = 0; i < g.na; ++i)
      for (int j = 0; j < g.nb; ++j) {
        double tx = g.na == 1 ? 0.5 : static_cast<double>(i) / (g.na - 1);
        double ty = g.nb == 1 ? 0.5 : static_cast<double>(j) / (g.nb - 1);
        pts.emplace_back(Real(g.a0 + (g.a1 - g.a0) * tx), Real(g.b0 + (g.b1 - g.b0) * ty));
      }
  }
  return pts;
}

int FieldOnGrid::col(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  throw InputError("no column " + name);
}

double FieldOnGrid::max_of(const std::string& name) const {
  int c = col(name);
  double m = -std::numeric_limits<double>::infinity();
  for (auto& row : values)
    if (std::isfinite(row[c])) m = std::max(m, row[c]);
  return m;
}

std::string FieldOnGrid::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "re,im";
  for (auto& c : columns) os << ',' << c;
  os << '\n';
  for (size_t i = 0; i < points.size(); ++i) {
    os << points[i].real() << ',' << points[i].imag();
    for (double v : values[i]) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

std::string FieldOnGrid::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = "hodge-moduli/field/1";
  j["quantity"] = quantity;
  j["chart"] = chart;
  j["conventions"] = meta;
  j["columns"] = columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (size_t i = 0; i < points.size(); ++i) {
    nlohmann::ordered_json r = {points[i].real(), points[i].imag()};
    for (double v : values[i]) r.push_back(std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json());
    rows.push_back(r);
  }
  j["rows"] = rows;
  j["flagged"] = flagged;
  return j.dump(1);
}

std::map<std::string, std::string> geometry_conventions() {
  return {
      {"forms", "coefficient c stands for (i/2pi) c dw^dwbar = (c/pi) dx^dy in the chart coordinate w"},
      {"weil_sign", "Q = i^n S(Pi, conj Pi) > 0"},
      {"curvature", "R = R_{w wbar w wbar} = g d dbar log g; holomorphic sectional curvature K = -R/g^2"},
      {"hodge_bundle_curvature", "R_p = -|nabla Omega_p|^2/|Omega_p|^2 + |dbar Omega_p|^2/|Omega_p|^2 = d dbar log |Omega_p|^2; c1 = -R_p"},
      {"c1_wp", "-R/g (first Chern form of the tangent line with the WP metric)"},
  };
}

namespace {

FieldOnGrid make_field(const JetSource& src, const std::string& quantity, const std::vector<GeomPoint>& gps,
                       const std::vector<std::string>& cols,
                       const std::function<std::vector<double>(const GeomPoint&)>& row) {
  FieldOnGrid f;
  f.chart = src.chart;
  f.quantity = quantity;
  f.columns = cols;
  f.meta = geometry_conventions();
  f.meta["precision_bits"] = std::to_string(precision_bits());
  for (size_t i = 0; i < gps.size(); ++i) {
    f.points.push_back(to_cd(gps[i].w));
    if (!gps[i].ok) {
      f.flagged.push_back(static_cast<int>(i));
      f.values.emplace_back(cols.size(), std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    f.values.push_back(row(gps[i]));
  }
  return f;
}

double rel(const Real& a, const Real& b) {
  Real d = boost::multiprecision::abs(a - b);
  Real s = boost::multiprecision::abs(b);
  return s == 0 ? to_d(d) : to_d(d / s);
}

}  // namespace

FieldOnGrid wp_metric(const JetSource& src, const std::vector<Cx>& pts, int jobs) {
  auto gps = evaluate_points(src, pts, jobs);
  auto f = make_field(src, "wp_metric", gps, {"g", "g_quotient", "rel_quotient", "g_fd", "rel_fd", "rel_fd_half"},
                      [&](const GeomPoint& gp) {
                        Real h = Real(1e-4 * src.dist(gp.w));
                        Real fd = fd_metric(src, gp.w, h);
                        Real fd2 = fd_metric(src, gp.w, h / 2);
                        return std::vector<double>{to_d(gp.g), to_d(gp.g_quot), rel(gp.g_quot, gp.g), to_d(fd),
                                                   rel(fd, gp.g), rel(fd2, gp.g)};
                      });
  for (size_t i = 0; i < gps.size(); ++i)
    if (gps[i].ok && gps[i].g <= 0) f.flagged.push_back(static_cast<int>(i));
  return f;
}

FieldOnGrid wp_curvature(const JetSource& src, const std::vector<Cx>& pts, const std::string& mode, int jobs) {
  if (mode != "direct" && mode != "yukawa") throw InputError("curvature mode must be direct or yukawa");
  if (mode == "yukawa" && src.weight != 3) throw InputError("yukawa mode requires a weight-3 family");
  auto gps = evaluate_points(src, pts, jobs);
  return make_field(src, "wp_curvature_" + mode, gps,
                    {"g", "R", "K", "R_other", "rel_other", "R_jet", "rel_jet", "R_lemma", "rel_lemma"},
                    [&](const GeomPoint& gp) {
                      const Real& R = mode == "direct" ? gp.R_direct : gp.R_yukawa;
                      Real other = src.weight == 3 ? (mode == "direct" ? gp.R_yukawa : gp.R_direct) : gp.R_direct;
                      return std::vector<double>{to_d(gp.g),          to_d(R),
                                                 to_d(-R / (gp.g * gp.g)), to_d(other),
                                                 rel(other, R),      to_d(gp.R_jet),
                                                 rel(gp.R_jet, R),   to_d(gp.R_lemma),
                                                 rel(gp.R_lemma, R)};
                    });
}

FieldOnGrid yukawa_coupling(const JetSource& src, const std::vector<Cx>& pts, int jobs) {
  if (src.weight != 3) throw InputError("the Yukawa coupling needs a weight-3 family");
  (void)jobs;
  FieldOnGrid f;
  f.chart = src.chart;
  f.quantity = "yukawa";
  f.columns = {"F_re", "F_im", "abs_F", "F_can_re", "F_can_im", "S01_rel", "S02_rel", "holomorphy_defect"};
  f.meta = geometry_conventions();
  f.meta["yukawa"] = "F = S(Pi, d^3 Pi) in the chart coordinate; canonical: F / X0^2 (dw/dt)^3 with t = X1/X0";
  for (auto& w : pts) {
    f.points.push_back(to_cd(w));
    try {
      auto p = src.jets(w, 3);
      auto raw = [&](const std::vector<Vec<Cx>>& q) {
        Vec<Cx> d3 = q[3];
        for (auto& x : d3) x = x * Real(6);
        return pairing(src.S, q[0], d3);
      };
      Cx F = raw(p);
      Cx Fc = yukawa_canonical(p);
      Real n0 = vnorm(p[0]);
      double s01 = to_d(abs(pairing(src.S, p[0], p[1])) / (n0 * vnorm(p[1])));
      Vec<Cx> d2 = p[2];
      for (auto& x : d2) x = x * Real(2);
      double s02 = to_d(abs(pairing(src.S, p[0], d2)) / (n0 * vnorm(d2)));
      Real h = Real(1e-6 * src.dist(w));
      Cx a = raw(src.jets(w + Cx(h), 3)), b = raw(src.jets(w - Cx(h), 3));
      Cx c = raw(src.jets(w + Cx(Real(0), h), 3)), d = raw(src.jets(w - Cx(Real(0), h), 3));
      Cx dbar = (a - b + Cx(Real(0), Real(1)) * (c - d)) / Cx(4 * h);
      double defect = to_d(abs(dbar) * Real(src.dist(w)) / abs(F));
      f.values.push_back({to_d(F.re), to_d(F.im), to_d(abs(F)), to_d(Fc.re), to_d(Fc.im), s01, s02, defect});
    } catch (const std::exception&) {
      f.flagged.push_back(static_cast<int>(f.points.size() - 1));
      f.values.emplace_back(f.columns.size(), std::numeric_limits<double>::quiet_NaN());
    }
  }
  return f;
}

FieldOnGrid hodge_metric_cy3(const JetSource& src, const std::vector<Cx>& pts, int jobs) {
  if (src.weight != 3) throw InputError("hodge_metric_cy3 needs a weight-3 family");
  auto gps = evaluate_points(src, pts, jobs);
  auto f = make_field(src, "hodge_metric_cy3", gps, {"omega_H", "g", "ric", "h_second", "rel_second"},
                      [&](const GeomPoint& gp) {
                        return std::vector<double>{to_d(gp.omega_H_good), to_d(gp.g), to_d(gp.c1_wp),
                                                   to_d(gp.h_second), rel(gp.h_second, gp.omega_H_good)};
                      });
  f.meta["relation"] = "omega_H = (m+3) omega_WP + Ric(omega_WP) with m = 1";
  for (size_t i = 0; i < gps.size(); ++i)
    if (gps[i].ok && gps[i].omega_H_good <= 0) f.flagged.push_back(static_cast<int>(i));
  return f;
}

FieldOnGrid generalized_hodge_metric(const JetSource& src, const std::vector<Cx>& pts, int k, int jobs) {
  if (k != src.weight)
    throw InputError("only k = weight is available: the family carries the single local system H^n");
  auto gps = evaluate_points(src, pts, jobs);
  return make_field(src, "generalized_hodge_metric", gps, {"h", "h_chern_sum", "rel_chern_sum", "c1_h"},
                    [&](const GeomPoint& gp) {
                      return std::vector<double>{to_d(gp.h_second), to_d(gp.h_five), rel(gp.h_five, gp.h_second),
                                                 to_d(gp.c1_H)};
                    });
}

FieldOnGrid hodge_bundle_curvature(const JetSource& src, const std::vector<Cx>& pts, int p, int q, int jobs) {
  if (p < 0 || q < 0 || p + q != src.weight) throw InputError("need p + q = weight with p, q >= 0");
  auto gps = evaluate_points(src, pts, jobs);
  return make_field(src, "hodge_bundle_curvature", gps,
                    {"R_p", "first_term", "second_term", "R_line", "rel_line", "h", "plk_ratio"},
                    [&](const GeomPoint& gp) {
                      Real R = gp.Rp[p];
                      return std::vector<double>{to_d(R),
                                                 to_d(gp.Rp_first[p]),
                                                 to_d(gp.Rp_second[p]),
                                                 to_d(gp.Rp_line[p]),
                                                 rel(gp.Rp_line[p], R),
                                                 to_d(gp.h_second),
                                                 to_d(boost::multiprecision::abs(R) / gp.h_second)};
                    });
}

}  // namespace hm
