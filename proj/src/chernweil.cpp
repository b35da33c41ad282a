#include "hm/chernweil.hpp"
#include "hm/hodge.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>

namespace hm {

namespace {

using boost::multiprecision::abs;
using boost::multiprecision::exp;
using boost::multiprecision::log;

double to_d(const Real& x) { return static_cast<double>(x); }

// value with first and second derivative
struct D2 {
  Real v, d, dd;
};
D2 operator+(const D2& a, const D2& b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
D2 operator*(const D2& a, const D2& b) { return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2 * a.d * b.d + a.v * b.dd}; }
D2 inv(const D2& a) {
  Real i = 1 / a.v;
  return {i, -a.d * i * i, (2 * a.d * a.d * i - a.dd) * i * i};
}
D2 dexp(const D2& a) {
  Real e = exp(a.v);
  return {e, e * a.d, e * (a.dd + a.d * a.d)};
}

D2 psi(const D2& t, int profile) {
  if (t.v <= 0) return {Real(0), Real(0), Real(0)};
  D2 f;
  if (profile == 1) {
    Real i = 1 / t.v;  // f = -1/t
    f = {-i, t.d * i * i, (t.dd - 2 * t.d * t.d * i) * i * i};
  } else {
    Real i = 1 / t.v;  // f = -1/t^2
    Real i2 = i * i;
    f = {-i2, 2 * t.d * i2 * i, (2 * t.dd - 6 * t.d * t.d * i) * i2 * i};
  }
  return dexp(f);
}

D2 eta_d2(const Real& t, int profile) {
  if (t <= 0) return {Real(1), Real(0), Real(0)};
  if (t >= 1) return {Real(0), Real(0), Real(0)};
  D2 A = psi({1 - t, Real(-1), Real(0)}, profile);
  D2 B = psi({t, Real(1), Real(0)}, profile);
  return A * inv(A + B);
}

struct GL {
  std::vector<Real> x, w;  // on [-1, 1]
};

const GL& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<std::pair<int, unsigned>, GL> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_pair(n, precision_bits());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  GL g;
  Real eps = boost::multiprecision::pow(Real(2), -static_cast<int>(precision_bits()) + 8);
  for (int i = 0; i < n; ++i) {
    Real x = boost::multiprecision::cos(pi_r() * (i + Real(0.75)) / (n + Real(0.5)));
    Real dp;
    for (int it2 = 0; it2 < 100; ++it2) {
      Real p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      Real dx = p1 / dp;
      x -= dx;
      if (abs(dx) < eps) break;
    }
    Real p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1);
    g.x.push_back(x);
    g.w.push_back(2 / ((1 - x * x) * dp * dp));
  }
  return cache.emplace(key, std::move(g)).first->second;
}

// nodes and weights of a composite Gauss rule on [a, b]
void panel_nodes(const Real& a, const Real& b, int gauss, int sub, std::vector<Real>& x, std::vector<Real>& w) {
  const GL& g = gauss_legendre(gauss);
  for (int k = 0; k < sub; ++k) {
    Real lo = a + (b - a) * k / sub, hi = a + (b - a) * (k + 1) / sub;
    Real h = (hi - lo) / 2, m = (hi + lo) / 2;
    for (int i = 0; i < gauss; ++i) {
      x.push_back(m + h * g.x[i]);
      w.push_back(h * g.w[i]);
    }
  }
}

Real pairwise_sum(const std::vector<Real>& v, size_t lo, size_t hi) {
  if (hi - lo <= 8) {
    Real s(0);
    for (size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}
Real pairwise_sum(const std::vector<Real>& v) { return pairwise_sum(v, 0, v.size()); }

std::string num(const Real& x) { return to_string(x, 20); }

nlohmann::ordered_json table_json(const RegularizedIntegral& r) {
  nlohmann::ordered_json j;
  j["form"] = r.form;
  j["profile"] = r.profile;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (auto& row : r.table) rows.push_back({{"eps", row.eps}, {"value", num(row.value)}, {"abs_value", num(row.abs_value)}});
  j["table"] = rows;
  j["extrapolated"] = r.extrapolated;
  j["limit"] = num(r.limit);
  j["error_estimate"] = r.error;
  if (r.table.size() > 3) {
    j["leading3_limit"] = num(r.head_limit);
    j["leading3_error_estimate"] = r.head_error;
  }
  j["abs_integral"] = num(r.abs_integral);
  j["monotone"] = r.monotone;
  j["converged"] = r.converged;
  if (!r.flag.empty()) j["flag"] = r.flag;
  j["evaluations"] = r.evaluations;
  return j;
}

}  // namespace

// ---- forms ----

FormField chern_form(const CurvatureField& curv, int alpha) {
  FormField f;
  f.field.chart = curv.chart;
  f.field.quantity = "chern_form_c" + std::to_string(alpha);
  f.field.columns = {"coef"};
  f.field.points = curv.points;
  f.field.meta = geometry_conventions();
  if (curv.base_dim != 1) throw InputError("chern forms are assembled only on one-dimensional charts");
  if (alpha < 0) throw InputError("alpha must be non-negative");
  int rank = curv.R.empty() ? 0 : curv.R[0].r;
  f.p = f.q = alpha;
  bool zero = false;
  if (alpha > rank) {
    f.warnings.push_back("alpha exceeds the rank: c_alpha = 0");
    zero = true;
  } else if (alpha > curv.base_dim) {
    f.warnings.push_back("degree 2 alpha exceeds the real dimension of the base: c_alpha = 0");
    zero = true;
  }
  for (auto& R : curv.R) {
    double v = 0;
    if (!zero) {
      if (alpha == 0) {
        v = 1;
      } else {
        // c_1 = (i/2pi)(-1) tr R, coefficient of (i/2pi) dw ^ dwbar
        Cx t(0);
        for (int i = 0; i < R.r; ++i) t += R(i, i);
        v = -to_d(t.re);
      }
    }
    f.field.values.push_back({v});
  }
  return f;
}

CurvatureField line_curvature(const JetSource& src, const std::vector<Cx>& pts, const std::string& bundle, int jobs) {
  CurvatureField c;
  c.chart = src.chart;
  auto gps = evaluate_points(src, pts, jobs);
  int p = -1;
  if (bundle.rfind("hodge:", 0) == 0) {
    p = std::stoi(bundle.substr(6));
    if (p < 0 || p > src.weight) throw InputError("hodge bundle index out of range");
  } else if (bundle == "hodge-line") {
    p = src.weight;
  } else if (bundle != "tangent") {
    throw InputError("unknown bundle " + bundle + " (tangent, hodge-line, hodge:<p>)");
  }
  for (auto& gp : gps) {
    if (!gp.ok) throw DomainError("geometry failed at a grid point: " + gp.flag);
    c.points.push_back(to_cd(gp.w));
    Mat<Cx> R(1, 1);
    R(0, 0) = p < 0 ? Cx(gp.R_direct / gp.g) : Cx(gp.Rp[p]);
    c.R.push_back(R);
  }
  return c;
}

std::vector<Cx> elementary_symmetric(const Mat<Cx>& A) {
  int n = A.r;
  std::vector<Cx> p(n + 1, Cx(0)), e(n + 1, Cx(0));
  Mat<Cx> P = Mat<Cx>::identity(n);
  for (int k = 1; k <= n; ++k) {
    P = P * A;
    for (int i = 0; i < n; ++i) p[k] += P(i, i);
  }
  e[0] = Cx(1);
  for (int k = 1; k <= n; ++k) {
    Cx s(0);
    for (int i = 1; i <= k; ++i) {
      Cx t = e[k - i] * p[i];
      s = (i % 2) ? s + t : s - t;
    }
    e[k] = s / Cx(Real(k));
  }
  return std::vector<Cx>(e.begin() + 1, e.end());
}

Cx InvariantPolynomial::eval(const Mat<Cx>& A) const {
  auto c = elementary_symmetric(A);
  Cx total(0);
  for (auto& t : terms) {
    Cx v(to_real(t.coef));
    for (size_t i = 0; i < t.exps.size(); ++i) {
      if (t.exps[i] == 0) continue;
      Cx ci = i < c.size() ? c[i] : Cx(0);
      v = v * pow_int(ci, t.exps[i]);
    }
    total += v;
  }
  return total;
}

InvariantPolynomial InvariantPolynomial::parse(const std::string& s) {
  InvariantPolynomial poly;
  std::string str;
  for (char ch : s)
    if (ch != ' ' && ch != '*') str += ch;
  if (str.empty()) throw InputError("empty invariant polynomial");
  size_t i = 0;
  while (i < str.size()) {
    int sign = 1;
    if (str[i] == '+' || str[i] == '-') {
      sign = str[i] == '-' ? -1 : 1;
      ++i;
    }
    size_t j = i;
    while (j < str.size() && (std::isdigit(static_cast<unsigned char>(str[j])) || str[j] == '/')) ++j;
    Term t;
    t.coef = j > i ? parse_rational(str.substr(i, j - i)) : Q(1);
    t.coef *= sign;
    i = j;
    while (i < str.size() && str[i] == 'c') {
      size_t k = i + 1;
      while (k < str.size() && std::isdigit(static_cast<unsigned char>(str[k]))) ++k;
      if (k == i + 1) throw InputError("expected an index after c in " + s);
      int idx = std::stoi(str.substr(i + 1, k - i - 1));
      if (idx < 1) throw InputError("Chern polynomial indices start at 1");
      int e = 1;
      i = k;
      if (i < str.size() && str[i] == '^') {
        size_t m = i + 1;
        while (m < str.size() && std::isdigit(static_cast<unsigned char>(str[m]))) ++m;
        if (m == i + 1) throw InputError("expected an exponent in " + s);
        e = std::stoi(str.substr(i + 1, m - i - 1));
        i = m;
      }
      if (static_cast<int>(t.exps.size()) < idx) t.exps.resize(idx, 0);
      t.exps[idx - 1] += e;
    }
    if (i < str.size() && str[i] != '+' && str[i] != '-') throw InputError("cannot parse invariant polynomial " + s);
    poly.terms.push_back(t);
  }
  return poly;
}

// ---- cut-off ----

Real CutoffFamily::eta(const Real& t) const { return eta_d2(t, profile).v; }

std::array<Real, 3> CutoffFamily::rho_u(const Real& u) const {
  Real e(eps);
  D2 h = eta_d2((u - e) / e, profile);
  return {1 - h.v, -h.d / e, -h.dd / (e * e)};
}

namespace {
Real u_of(const Cx& s) {
  Real r = abs(s);
  if (!(r > 0) || r >= 1) throw InputError("cut-off evaluated outside the punctured unit disc");
  return -1 / log(r);
}
}  // namespace

Real CutoffFamily::rho(const Cx& s) const { return rho_u(u_of(s))[0]; }

Cx CutoffFamily::d_rho(const Cx& s) const {
  Real u = u_of(s);
  auto r = rho_u(u);
  return Cx(-r[1] * u / 2);
}

Real CutoffFamily::ddbar_rho(const Cx& s) const {
  Real u = u_of(s);
  auto r = rho_u(u);
  return (r[2] * u * u + 2 * u * r[1]) / 4;
}

CutoffFamily make_cutoff(double eps, int profile, double chart_radius) {
  if (profile != 1 && profile != 2) throw InputError("cut-off profile must be 1 or 2");
  if (!(eps > 0)) throw InputError("eps must be positive");
  if (!(chart_radius > 0 && chart_radius < 1)) throw InputError("chart radius must lie in (0, 1)");
  double umax = -1 / std::log(chart_radius);
  if (2 * eps >= umax) throw InputError("eps too large for the chart: 2 eps must stay below 1/log(1/radius)");
  CutoffFamily c;
  c.eps = eps;
  c.profile = profile;
  return c;
}

// ---- forms from the geometry engine ----

Real flux_integrand(const Real& g, const Real& R) { return -R / g - g; }

TopForm geometry_form(const JetSource& src, const std::string& name, int jobs, std::shared_ptr<GeomCache> cache) {
  std::function<Real(const GeomPoint&)> f;
  if (name == "zero") {
    return {name, [](const std::vector<Cx>& pts) { return std::vector<Real>(pts.size(), Real(0)); }};
  } else if (name == "omega-wp") {
    f = [](const GeomPoint& gp) { return gp.g; };
  } else if (name == "c1-wp") {
    f = [](const GeomPoint& gp) { return gp.c1_wp; };
  } else if (name == "omega-h") {
    f = [](const GeomPoint& gp) { return gp.has_yukawa ? gp.omega_H_good : gp.h_second; };
  } else if (name == "c1-h") {
    f = [](const GeomPoint& gp) { return gp.c1_H; };
  } else if (name == "abs-c1-h") {
    f = [](const GeomPoint& gp) { return abs(gp.c1_H); };
  } else if (name == "flux") {
    if (src.weight != 3) throw InputError("the flux integrand needs a weight-3 family");
    f = [](const GeomPoint& gp) { return flux_integrand(gp.g, gp.R_direct); };
  } else if (name.rfind("c1-hodge:", 0) == 0) {
    int p = std::stoi(name.substr(9));
    if (p < 0 || p > src.weight) throw InputError("hodge bundle index out of range");
    f = [p](const GeomPoint& gp) { return -gp.Rp[p]; };
  } else {
    throw InputError("unknown form " + name +
                     " (zero, omega-wp, c1-wp, omega-h, c1-h, abs-c1-h, flux, c1-hodge:<p>)");
  }
  JetSource s = src;
  if (!cache) cache = std::make_shared<GeomCache>();
  return {name, [s, f, jobs, cache](const std::vector<Cx>& pts) {
            bool same = cache->pts.size() == pts.size();
            for (size_t i = 0; same && i < pts.size(); ++i)
              same = cache->pts[i].re == pts[i].re && cache->pts[i].im == pts[i].im;
            if (!same) {
              cache->gps = evaluate_points(s, pts, jobs);
              cache->pts = pts;
            }
            const auto& gps = cache->gps;
            std::vector<Real> out;
            out.reserve(gps.size());
            for (auto& gp : gps) {
              if (!gp.ok) throw DomainError("geometry failed at " + to_string(gp.w, 8) + ": " + gp.flag);
              out.push_back(f(gp));
            }
            return out;
          }};
}

IntegrationDomain chart_domain(const JetSource& src, const PeriodEngine* e) {
  IntegrationDomain d;
  d.kind = IntegrationDomain::PuncturedDisc;
  if (e) d.radius = to_d(to_real(e->family().chart_radius));
  (void)src;
  return d;
}

IntegrationDomain modular_domain() {
  IntegrationDomain d;
  d.kind = IntegrationDomain::ModularFundamental;
  d.angular = 32;
  d.gauss = 16;
  d.subpanels = 2;
  return d;
}

// ---- regularized integration ----

Real richardson(const std::vector<double>& eps, const std::vector<Real>& vals) {
  Real L(0);
  for (size_t i = 0; i < eps.size(); ++i) {
    Real c(1);
    for (size_t j = 0; j < eps.size(); ++j)
      if (j != i) c *= Real(eps[j]) / (Real(eps[j]) - Real(eps[i]));
    L += c * vals[i];
  }
  return L;
}

RegularizedIntegral integrate_regularized(const TopForm& form, const IntegrationDomain& dom,
                                          const std::vector<double>& eps_seq, bool extrapolate, int profile) {
  if (eps_seq.empty()) throw InputError("empty eps sequence");
  for (size_t i = 1; i < eps_seq.size(); ++i)
    if (!(eps_seq[i] < eps_seq[i - 1])) throw InputError("eps sequence must be strictly decreasing");
  if (extrapolate && eps_seq.size() < 2) throw InputError("extrapolation needs at least two eps values");

  std::vector<CutoffFamily> cuts;
  double umax_fixed = dom.kind == IntegrationDomain::PuncturedDisc ? -1 / std::log(dom.radius) : 0;
  for (double e : eps_seq) {
    if (dom.kind == IntegrationDomain::PuncturedDisc) {
      cuts.push_back(make_cutoff(e, profile, dom.radius));
    } else {
      if (2 * e >= 1 / (2 * M_PI)) throw InputError("eps too large for the modular domain (2 eps < 1/2pi)");
      CutoffFamily c;
      c.eps = e;
      c.profile = profile;
      cuts.push_back(c);
    }
  }
  double emin = eps_seq.back();

  // nodes in (u, angle or x) with measure weights for (i/2pi) dw ^ dwbar = (1/pi) dx dy
  std::vector<Real> U, W;
  std::vector<Cx> P;
  auto u_breaks = [&](double umax) {
    std::vector<double> b{umax};
    for (double e : eps_seq)
      for (double v : {e, 2 * e})
        if (v < umax) b.push_back(v);
    if (dom.kind == IntegrationDomain::PuncturedDisc)
      for (double v : {0.2, 0.4, 0.8})
        if (v > emin && v < umax) b.push_back(v);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  };
  if (dom.kind == IntegrationDomain::PuncturedDisc) {
    auto b = u_breaks(umax_fixed);
    std::vector<Real> ux, uw;
    for (size_t k = 0; k + 1 < b.size(); ++k) panel_nodes(Real(b[k]), Real(b[k + 1]), dom.gauss, dom.subpanels, ux, uw);
    Real two_pi = 2 * pi_r();
    for (size_t i = 0; i < ux.size(); ++i) {
      Real r = exp(-1 / ux[i]);
      Real base = uw[i] * (two_pi / dom.angular) / pi_r() * r * r / (ux[i] * ux[i]);
      for (int j = 0; j < dom.angular; ++j) {
        Real ph = two_pi * (j + Real(0.5)) / dom.angular;
        P.emplace_back(r * boost::multiprecision::cos(ph), r * boost::multiprecision::sin(ph));
        U.push_back(ux[i]);
        W.push_back(base);
      }
    }
  } else {
    std::vector<Real> xx, xw;
    panel_nodes(Real(-0.5), Real(0.5), dom.angular, 1, xx, xw);
    Real two_pi = 2 * pi_r();
    for (size_t a = 0; a < xx.size(); ++a) {
      Real umaxr = 1 / (two_pi * boost::multiprecision::sqrt(1 - xx[a] * xx[a]));
      auto b = u_breaks(to_d(umaxr));
      std::vector<Real> ux, uw;
      for (size_t k = 0; k + 1 < b.size(); ++k) {
        Real hi = k + 2 == b.size() ? umaxr : Real(b[k + 1]);
        panel_nodes(Real(b[k]), hi, dom.gauss, dom.subpanels, ux, uw);
      }
      for (size_t i = 0; i < ux.size(); ++i) {
        P.emplace_back(xx[a], 1 / (two_pi * ux[i]));
        U.push_back(ux[i]);
        W.push_back(xw[a] * uw[i] / (pi_r() * two_pi * ux[i] * ux[i]));
      }
    }
  }

  std::vector<Real> coef = form.coef(P);
  RegularizedIntegral res;
  res.form = form.name;
  res.profile = profile;
  res.evaluations = P.size();
  std::vector<Real> vals, avals;
  for (auto& c : cuts) {
    std::vector<Real> t(P.size()), ta(P.size());
    for (size_t i = 0; i < P.size(); ++i) {
      Real rho = U[i] < Real(c.eps) ? Real(0) : c.rho_u(U[i])[0];
      t[i] = rho * W[i] * coef[i];
      ta[i] = abs(t[i]);
    }
    EpsRow row{c.eps, pairwise_sum(t), pairwise_sum(ta)};
    vals.push_back(row.value);
    avals.push_back(row.abs_value);
    res.table.push_back(row);
  }
  size_t n = vals.size();
  // extrapolate through the three smallest eps; the 2-point value on the smallest two gives the error
  auto tail = [&](const std::vector<Real>& v, size_t k) {
    std::vector<double> e(eps_seq.end() - k, eps_seq.end());
    std::vector<Real> t(v.end() - k, v.end());
    return richardson(e, t);
  };
  if (extrapolate) {
    res.extrapolated = true;
    size_t k = std::min<size_t>(3, n);
    res.limit = tail(vals, k);
    res.abs_integral = tail(avals, k);
    res.error = k >= 3 ? to_d(abs(res.limit - tail(vals, 2))) : to_d(abs(vals[n - 1] - vals[n - 2]));
    if (n > 3) {
      std::vector<double> e3(eps_seq.begin(), eps_seq.begin() + 3), e2(eps_seq.begin() + 1, eps_seq.begin() + 3);
      std::vector<Real> v3(vals.begin(), vals.begin() + 3), v2(vals.begin() + 1, vals.begin() + 3);
      res.head_limit = richardson(e3, v3);
      res.head_error = to_d(abs(res.head_limit - richardson(e2, v2)));
    } else {
      res.head_limit = res.limit;
      res.head_error = res.error;
    }
  } else {
    res.limit = vals.back();
    res.abs_integral = avals.back();
    res.error = n >= 2 ? to_d(abs(vals[n - 1] - vals[n - 2])) : 0;
    res.head_limit = res.limit;
    res.head_error = res.error;
  }
  int up = 0, down = 0;
  for (size_t i = 1; i < n; ++i) {
    if (vals[i] > vals[i - 1]) ++up;
    if (vals[i] < vals[i - 1]) ++down;
  }
  res.monotone = up == 0 || down == 0;
  if (n >= 3) {
    Real d1 = abs(vals[n - 2] - vals[n - 3]), d2 = abs(vals[n - 1] - vals[n - 2]);
    if (d2 > d1 * (1 + Real(1e-12)) && d2 > Real(1e-40)) res.converged = false;
  }
  if (!res.converged) res.flag = "successive differences grow: no convergence as eps -> 0";
  if (!res.monotone && res.flag.empty()) res.flag = "eps table is not monotone";
  return res;
}

std::string RegularizedIntegral::to_csv() const {
  std::ostringstream os;
  os << "eps,value,abs_value\n";
  for (auto& r : table) os << r.eps << ',' << num(r.value) << ',' << num(r.abs_value) << '\n';
  os << "limit," << num(limit) << ',' << num(abs_integral) << '\n';
  return os.str();
}

std::string RegularizedIntegral::to_json() const { return table_json(*this).dump(1); }

// ---- Poincare boundedness ----

PoincareReport poincare_bounded_check(const std::function<std::vector<Cx>(const std::vector<Cx>&)>& coef,
                                      const std::string& kind, double r_hi, int decades, double scale, int radial,
                                      int angular) {
  if (kind != "two-form" && kind != "one-form-s" && kind != "regular")
    throw InputError("coefficient kind must be two-form, one-form-s or regular");
  if (!(r_hi > 0 && r_hi < 1)) throw InputError("annuli must lie in the punctured unit disc");
  if (!(scale > 0)) throw InputError("coordinate scale must be positive");
  if (decades < 2) throw InputError("need at least two annuli");
  PoincareReport rep;
  std::vector<double> Lmid;
  for (int k = 0; k < decades; ++k) {
    double e = std::log10(r_hi), hi = std::pow(10.0, e - k), lo = std::pow(10.0, e - k - 1);
    std::vector<Cx> pts;
    for (int i = 0; i < radial; ++i) {
      double r = lo * std::pow(10.0, radial == 1 ? 0.5 : static_cast<double>(i) / (radial - 1));
      for (int j = 0; j < angular; ++j) {
        double ph = 2 * M_PI * (j + 0.5) / angular;
        pts.push_back(from_cd(std::polar(r, ph)) * Real(scale));
      }
    }
    auto c = coef(pts);
    Real sup(0);
    for (size_t i = 0; i < pts.size(); ++i) {
      Real r = abs(pts[i]);
      Real lx = log(r / Real(scale));
      Real f = abs(c[i]);
      if (kind == "two-form") f *= r * r * lx * lx;
      if (kind == "one-form-s") f *= r * abs(lx);
      sup = std::max(sup, f);
    }
    rep.decade_hi.push_back(hi);
    rep.decade_lo.push_back(lo);
    rep.sup.push_back(to_d(sup));
    Lmid.push_back(-std::log(std::sqrt(hi * lo)));
  }
  int up = 0, down = 0;
  for (size_t i = 1; i < rep.sup.size(); ++i) {
    if (rep.sup[i] > rep.sup[i - 1]) ++up;
    if (rep.sup[i] < rep.sup[i - 1]) ++down;
  }
  rep.monotone = up == 0 || down == 0;
  // growth over the innermost three annuli
  size_t k0 = rep.sup.size() >= 3 ? rep.sup.size() - 3 : 0;
  double s0 = rep.sup[k0], s1 = rep.sup.back();
  if (s0 > 0 && s1 > 0)
    rep.growth = std::log(s1 / s0) / std::log(Lmid.back() / Lmid[k0]);
  else
    rep.growth = s1 > 0 ? INFINITY : 0;
  rep.bounded = std::isfinite(s1) && rep.growth < 0.5;
  return rep;
}

std::string PoincareReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = "hodge-moduli/pbound/1";
  j["coframe"] = "ds/(s log|s|), dw";
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (size_t i = 0; i < sup.size(); ++i) rows.push_back({{"r_max", decade_hi[i]}, {"r_min", decade_lo[i]}, {"sup", sup[i]}});
  j["annuli"] = rows;
  j["growth_exponent"] = growth;
  j["monotone"] = monotone;
  j["bounded"] = bounded;
  return j.dump(1);
}

// ---- rationality ----

RationalityVerdict rationality_detect(double value, long max_den, double tol) {
  if (!std::isfinite(value)) throw InputError("rationality_detect needs a finite value");
  if (max_den < 1) throw InputError("max_den must be positive");
  RationalityVerdict v;
  v.value = value;
  v.max_den = max_den;
  v.tol = tol;
  Q x(value);  // exact binary value
  // continued fraction convergents h/k
  mpz_class h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  Q rem = x;
  Q best;
  bool have = false;
  for (int it = 0; it < 200; ++it) {
    mpz_class a = rem.get_num() / rem.get_den();
    if (rem < 0 && a * rem.get_den() != rem.get_num()) a -= 1;  // floor
    mpz_class h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (k2 > max_den) {
      // largest semiconvergent with denominator in range
      mpz_class t = (mpz_class(max_den) - k0) / k1;
      Q conv(h1, k1);
      conv.canonicalize();
      best = conv;
      if (t > 0) {
        Q semi(t * h1 + h0, t * k1 + k0);
        semi.canonicalize();
        if (abs(semi - x) < abs(conv - x)) best = semi;
      }
      have = true;
      break;
    }
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    Q frac = rem - Q(a);
    if (frac == 0) {
      best = Q(h1, k1);
      best.canonicalize();
      have = true;
      break;
    }
    rem = 1 / frac;
  }
  if (!have) {
    best = Q(h1, k1);
    best.canonicalize();
  }
  v.nearest = best;
  v.residual = std::abs(value - best.get_d());
  v.rational = v.residual < tol;
  return v;
}

std::string RationalityVerdict::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = "hodge-moduli/rationality/1";
  std::ostringstream os;
  os << std::setprecision(17) << value;
  j["value"] = os.str();
  j["nearest"] = to_string(nearest);
  j["residual"] = residual;
  j["max_den"] = max_den;
  j["tol"] = tol;
  j["verdict"] = rational ? "rational" : "not-detected";
  return j.dump(1);
}

// ---- inequalities ----

double max_ratio(const std::vector<Real>& c, const std::vector<Real>& omega) {
  if (c.size() != omega.size()) throw InputError("size mismatch");
  Real m(0);
  for (size_t i = 0; i < c.size(); ++i) {
    if (!(omega[i] > 0)) throw DomainError("reference metric is not positive");
    m = std::max(m, abs(c[i]) / omega[i]);
  }
  return to_d(m);
}

InequalityReport chern_inequality_check(const JetSource& src, const std::vector<Cx>& pts, int jobs) {
  auto gps = evaluate_points(src, pts, jobs);
  InequalityReport rep;
  int n = src.weight;
  rep.max_sdf.assign(n + 1, 0.0);
  Real two(2), slack(1e-30);
  for (auto& gp : gps) {
    if (!gp.ok) throw DomainError("geometry failed at a grid point: " + gp.flag);
    ++rep.points;
    Real omega_h = gp.has_yukawa ? gp.omega_H_good : gp.h_second;
    Real uio = abs(gp.c1_wp) / omega_h;
    bool bad = uio > two + slack;
    rep.max_uio = std::max(rep.max_uio, to_d(uio));
    for (int p = 0; p <= n; ++p) {
      Real r = abs(gp.Rp[p]) / gp.h_second;
      rep.max_sdf[p] = std::max(rep.max_sdf[p], to_d(r));
      rep.max_plk = std::max(rep.max_plk, to_d(r));
      if (r > two + slack) bad = true;
    }
    if (bad) rep.violations.push_back(to_cd(gp.w));
  }
  return rep;
}

std::string InequalityReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = "hodge-moduli/inequalities/1";
  j["points"] = points;
  j["max_ratio_c1_wp_over_omega_h"] = max_uio;
  j["max_ratio_c1_hodge_over_omega_ph"] = max_sdf;
  j["max_ratio_Rp_over_h"] = max_plk;
  j["bound"] = 2;
  nlohmann::ordered_json v = nlohmann::ordered_json::array();
  for (auto& p : violations) v.push_back({p.real(), p.imag()});
  j["violations"] = v;
  j["holds"] = holds();
  return j.dump(1);
}

// ---- flux index and L1 ----

FluxIndexReport flux_vacua_index(const JetSource& src, const IntegrationDomain& dom, const std::vector<double>& eps_seq,
                                 int profile, int jobs) {
  FluxIndexReport rep;
  auto cache = std::make_shared<GeomCache>();
  rep.index = integrate_regularized(geometry_form(src, "flux", jobs, cache), dom, eps_seq, true, profile);
  rep.hodge_volume = integrate_regularized(geometry_form(src, "omega-h", jobs, cache), dom, eps_seq, true, profile);
  rep.finite = rep.index.converged && boost::multiprecision::isfinite(rep.index.limit);
  rep.bounded_by_volume = abs(rep.index.limit) <= 2 * rep.hodge_volume.limit;
  return rep;
}

std::string FluxIndexReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = "hodge-moduli/flux-index/1";
  j["integrand"] = "det(-R_WP - omega_WP) = (-R/g - g) (i/2pi) ds^dsbar; bare integral, no normalizing constant";
  j["index"] = table_json(index);
  j["hodge_volume"] = table_json(hodge_volume);
  j["finite"] = finite;
  j["bounded_by_2_hodge_volume"] = bounded_by_volume;
  return j.dump(1);
}

double poincare_log_mass(double eps) {
  // omega_P = (i/2pi) ds^dsbar / (|s|^2 log^2|s|); with t = log|s| the integrand is 2 dt / (-t)
  std::vector<Real> x, w;
  panel_nodes(Real(-1 / eps), Real(-1 / (2 * eps)), 24, 4, x, w);
  Real s(0);
  for (size_t i = 0; i < x.size(); ++i) s += w[i] * 2 / (-x[i]);
  return to_d(s);
}

L1Report hodge_curvature_l1(const JetSource& src, const IntegrationDomain& dom, const std::vector<double>& eps_seq,
                            int profile, int jobs) {
  L1Report rep;
  rep.l1 = integrate_regularized(geometry_form(src, "abs-c1-h", jobs), dom, eps_seq, true, profile);
  rep.eps = eps_seq;
  double lo = INFINITY, hi = 0;
  for (double e : eps_seq) {
    double m = poincare_log_mass(e);
    rep.poincare_log_mass.push_back(m);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  rep.uniformly_bounded = std::isfinite(hi) && hi - lo <= 1e-9 * hi;
  return rep;
}

std::string L1Report::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = "hodge-moduli/l1/1";
  j["l1"] = table_json(l1);
  j["eps"] = eps;
  j["poincare_log_mass"] = poincare_log_mass;
  j["uniformly_bounded"] = uniformly_bounded;
  return j.dump(1);
}

}  // namespace hm
