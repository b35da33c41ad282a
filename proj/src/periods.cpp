#include "hm/periods.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#ifndef HM_DATA_DIR
#define HM_DATA_DIR "data"
#endif

namespace hm {

using json = nlohmann::json;

namespace {

Q json_rational(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Q(v.get<long>());
  if (v.is_number()) return Q(v.get<double>());
  throw InputError("expected a rational number, got " + v.dump());
}

// Stirling numbers of the second kind S(j, k) for j, k <= n
std::vector<std::vector<Q>> stirling2(int n) {
  std::vector<std::vector<Q>> s(n + 1, std::vector<Q>(n + 1, Q(0)));
  s[0][0] = 1;
  for (int j = 1; j <= n; ++j)
    for (int k = 1; k <= j; ++k) s[j][k] = s[j - 1][k - 1] + Q(k) * s[j - 1][k];
  return s;
}

// signed Stirling numbers of the first kind: x(x-1)...(x-a+1) = sum_j s(a,j) x^j
std::vector<std::vector<long long>> stirling1(int n) {
  std::vector<std::vector<long long>> s(n + 1, std::vector<long long>(n + 1, 0));
  s[0][0] = 1;
  for (int a = 1; a <= n; ++a)
    for (int j = 1; j <= a; ++j) s[a][j] = s[a - 1][j - 1] - static_cast<long long>(a - 1) * s[a - 1][j];
  return s;
}

Q binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Q(b);
}

Q poly_eval(const std::vector<Q>& p, const Q& x) {
  Q r = 0;
  for (size_t i = p.size(); i-- > 0;) r = r * x + p[i];
  return r;
}

// coefficients of p(x0 + w) in w
template <class T>
std::vector<T> poly_shift(const std::vector<Q>& p, const T& x0) {
  int d = static_cast<int>(p.size());
  std::vector<T> out(d, T(0));
  for (int i = 0; i < d; ++i) {
    T acc(0);
    T pw(1);
    for (int j = i; j < d; ++j) {
      T c;
      if constexpr (std::is_same_v<T, Q>)
        c = p[j] * binom(j, i);
      else
        c = Cx(to_real(p[j] * binom(j, i)));
      acc += c * pw;
      pw = pw * x0;
    }
    out[i] = acc;
  }
  return out;
}

// truncated power series in epsilon with r terms
using ESeries = std::vector<Q>;

ESeries emul(const ESeries& a, const ESeries& b) {
  ESeries c(a.size(), Q(0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (sgn(a[i]) == 0) continue;
    for (size_t j = 0; i + j < a.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

ESeries einv(const ESeries& a) {
  if (sgn(a[0]) == 0) throw InputError("indicial polynomial vanishes at a positive integer");
  ESeries b(a.size(), Q(0));
  b[0] = 1 / a[0];
  for (size_t n = 1; n < a.size(); ++n) {
    Q s = 0;
    for (size_t k = 1; k <= n; ++k) s += a[k] * b[n - k];
    b[n] = -s / a[0];
  }
  return b;
}

// polynomial q(theta) evaluated at x0 + eps as a series
ESeries poly_at(const std::vector<Q>& q, const Q& x0, int r) {
  auto sh = poly_shift<Q>(q, x0);
  ESeries e(r, Q(0));
  for (int i = 0; i < r && i < static_cast<int>(sh.size()); ++i) e[i] = sh[i];
  return e;
}

Cx two_pi_i() { return Cx(Real(0), 2 * pi_r()); }

Real ffact(int m, int k) {
  // (m+1)(m+2)...(m+k)
  Real r(1);
  for (int i = 1; i <= k; ++i) r *= Real(m + i);
  return r;
}

}  // namespace

std::vector<Q> PeriodFamily::z_coeff(int i) const {
  std::vector<Q> q(pf.size(), Q(0));
  for (size_t j = 0; j < pf.size(); ++j)
    if (i < static_cast<int>(pf[j].size())) q[j] = pf[j][i];
  return q;
}

int PeriodFamily::z_degree() const {
  int d = 0;
  for (auto& p : pf) d = std::max(d, static_cast<int>(p.size()) - 1);
  return d;
}

PeriodFamily parse_family(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw InputError(std::string("family file is not valid JSON: ") + e.what());
  }
  PeriodFamily f;
  try {
    f.name = j.at("name").get<std::string>();
    f.weight = j.at("weight").get<int>();
    f.rank = j.at("rank").get<int>();
    for (auto& row : j.at("pf_operator")) {
      std::vector<Q> p;
      for (auto& c : row) p.push_back(json_rational(c));
      f.pf.push_back(p);
    }
    auto& S = j.at("polarization");
    f.S = MatQ(f.rank, f.rank);
    for (int a = 0; a < f.rank; ++a)
      for (int b = 0; b < f.rank; ++b) f.S(a, b) = QI(json_rational(S.at(a).at(b)));
    if (j.contains("integral_basis")) {
      for (auto& row : j.at("integral_basis")) {
        std::vector<BasisCoeff> r;
        for (auto& c : row) {
          BasisCoeff bc;
          if (c.contains("rat")) bc.rat = json_rational(c["rat"]);
          if (c.contains("log2_pii")) bc.log2_pii = json_rational(c["log2_pii"]);
          if (c.contains("zeta3_over_2pii_cubed")) bc.zeta3c = json_rational(c["zeta3_over_2pii_cubed"]);
          r.push_back(bc);
        }
        f.basis.push_back(r);
      }
    } else {
      for (int a = 0; a < f.rank; ++a) {
        std::vector<BasisCoeff> r(f.rank);
        r[a].rat = 1;
        f.basis.push_back(r);
      }
    }
    for (auto& s : j.at("singular_points")) {
      SingularPoint sp;
      std::string z = s.at("z").is_string() ? s.at("z").get<std::string>() : s.at("z").dump();
      if (z == "inf" || z == "infinity")
        sp.at_infinity = true;
      else
        sp.z = parse_rational(z);
      sp.label = s.value("label", "other");
      f.singular.push_back(sp);
    }
    if (j.contains("yukawa_normalization")) {
      auto& y = j["yukawa_normalization"];
      f.yukawa_kind = y.value("kind", "none");
      if (y.contains("lcs_limit")) f.yukawa_limit = json_rational(y["lcs_limit"]);
    }
    f.base_point = json_rational(j.at("base_point"));
    if (j.contains("chart")) {
      auto& c = j["chart"];
      if (c.contains("scale")) f.chart_scale = json_rational(c["scale"]);
      if (c.contains("radius")) f.chart_radius = json_rational(c["radius"]);
    }
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(std::string("malformed family file: ") + e.what());
  }
  if (static_cast<int>(f.pf.size()) != f.rank + 1)
    throw InputError("PF operator order must equal the rank of the local system");
  if (static_cast<int>(f.basis.size()) != f.rank) throw InputError("integral basis must have rank rows");
  for (auto& r : f.basis)
    if (static_cast<int>(r.size()) != f.rank) throw InputError("integral basis rows must have rank entries");
  // singular points must be roots of the leading coefficient z^r P_r(z)
  for (auto& sp : f.singular) {
    if (sp.at_infinity || sgn(sp.z) == 0) continue;
    if (sgn(poly_eval(f.pf[f.rank], sp.z)) != 0)
      throw InputError("singular point " + to_string(sp.z) + " is not a root of the leading coefficient");
  }
  return f;
}

std::string family_data_dir() {
  if (const char* e = std::getenv("HODGE_MODULI_DATA")) return e;
  return HM_DATA_DIR;
}

PeriodFamily load_family(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  fs::path p(name_or_path);
  if (!fs::exists(p)) {
    fs::path cand = fs::path(family_data_dir()) / "families" / (name_or_path + ".json");
    if (!fs::exists(cand)) throw InputError("unknown family: " + name_or_path);
    p = cand;
  }
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_family(ss.str());
}

// ---------------------------------------------------------------------------------------------
// exact local series

namespace {

bool is_mum_at_zero(const PeriodFamily& f) {
  auto q0 = f.z_coeff(0);
  for (int j = 0; j < f.rank; ++j)
    if (sgn(q0[j]) != 0) return false;
  return sgn(q0[f.rank]) != 0;
}

// h[m][n] = [eps^m] a_n(eps)
std::vector<std::vector<Q>> frobenius_exact(const PeriodFamily& f, int nterms) {
  int r = f.rank;
  int dz = f.z_degree();
  std::vector<std::vector<Q>> Qi(dz + 1);
  for (int i = 0; i <= dz; ++i) Qi[i] = f.z_coeff(i);
  std::vector<ESeries> a(nterms, ESeries(r, Q(0)));
  a[0][0] = 1;
  for (int n = 1; n < nterms; ++n) {
    ESeries rhs(r, Q(0));
    for (int i = 1; i <= dz && i <= n; ++i) {
      auto t = emul(poly_at(Qi[i], Q(n - i), r), a[n - i]);
      for (int k = 0; k < r; ++k) rhs[k] -= t[k];
    }
    a[n] = emul(rhs, einv(poly_at(Qi[0], Q(n), r)));
  }
  std::vector<std::vector<Q>> h(r, std::vector<Q>(nterms));
  for (int m = 0; m < r; ++m)
    for (int n = 0; n < nterms; ++n) h[m][n] = a[n][m];
  return h;
}

// ODE in the form sum_k A_k(z) (d/dz)^k y = 0
std::vector<std::vector<Q>> derivative_form(const PeriodFamily& f) {
  int r = f.rank;
  auto S2 = stirling2(r);
  std::vector<std::vector<Q>> A(r + 1);
  int dz = f.z_degree();
  for (int k = 0; k <= r; ++k) {
    std::vector<Q> p(dz + 1 + k, Q(0));
    for (int j = k; j <= r; ++j)
      for (size_t i = 0; i < f.pf[j].size(); ++i) p[i + k] += S2[j][k] * f.pf[j][i];
    A[k] = p;
  }
  return A;
}

// generic Taylor recurrence at center x0 for coefficients in T (Q or Cx)
template <class T>
std::vector<T> taylor_recurrence(const std::vector<std::vector<T>>& a, int r, std::vector<T> c, int N) {
  c.resize(std::max<int>(N, r), T(0));
  T lead = a[r][0];
  for (int m = 0; m + r < N; ++m) {
    T s(0);
    for (int k = 0; k <= r; ++k)
      for (int i = 0; i < static_cast<int>(a[k].size()); ++i) {
        if (k == r && i == 0) continue;
        if (m - i < 0) break;
        int idx = m - i + k;
        if constexpr (std::is_same_v<T, Q>) {
          Q ff = 1;
          for (int t = 1; t <= k; ++t) ff *= (m - i + t);
          s += a[k][i] * ff * c[idx];
        } else {
          s += a[k][i] * c[idx] * ffact(m - i, k);
        }
      }
    if constexpr (std::is_same_v<T, Q>) {
      Q ff = 1;
      for (int t = 1; t <= r; ++t) ff *= (m + t);
      c[m + r] = -s / (lead * ff);
    } else {
      c[m + r] = -s / (lead * ffact(m, r));
    }
  }
  c.resize(N);
  return c;
}

}  // namespace

LocalBasis pf_series_solution(const PeriodFamily& f, const Q& center, int nterms) {
  if (nterms < 1) throw InputError("nterms must be at least 1");
  LocalBasis b;
  b.center = center;
  b.nterms = nterms;
  auto A = derivative_form(f);
  Q lead = poly_eval(A[f.rank], center);
  if (sgn(lead) != 0) {
    b.logarithmic = false;
    std::vector<std::vector<Q>> a(f.rank + 1);
    for (int k = 0; k <= f.rank; ++k) a[k] = poly_shift<Q>(A[k], center);
    for (int k = 0; k < f.rank; ++k) {
      std::vector<Q> c(f.rank, Q(0));
      c[k] = 1;
      b.h.push_back(taylor_recurrence<Q>(a, f.rank, c, nterms));
    }
    return b;
  }
  if (sgn(center) != 0)
    throw InputError("unsupported: series expansion at a singular point other than a MUM point at z=0");
  if (!is_mum_at_zero(f))
    throw InputError("unsupported: the point z=0 is not maximally unipotent for this operator");
  b.logarithmic = true;
  b.h = frobenius_exact(f, nterms);
  return b;
}

int series_residual_index(const PeriodFamily& f, const LocalBasis& b, int k) {
  int N = b.nterms;
  if (!b.logarithmic) {
    auto A = derivative_form(f);
    std::vector<std::vector<Q>> a(f.rank + 1);
    for (int j = 0; j <= f.rank; ++j) a[j] = poly_shift<Q>(A[j], b.center);
    const auto& c = b.h[k];
    // coefficient of w^m in sum_j A_j D^j y uses c up to m + r
    for (int m = 0; m + f.rank < N; ++m) {
      Q s = 0;
      for (int j = 0; j <= f.rank; ++j)
        for (int i = 0; i < static_cast<int>(a[j].size()) && i <= m; ++i) {
          Q ff = 1;
          for (int t = 1; t <= j; ++t) ff *= (m - i + t);
          s += a[j][i] * ff * c[m - i + j];
        }
      if (sgn(s) != 0) return m;
    }
    return -1;
  }
  // coefficient of log^i/i! z^n
  for (int n = 0; n < N; ++n)
    for (int i = 0; i <= k; ++i) {
      Q s = 0;
      for (int j = 0; j <= f.rank; ++j)
        for (int t = 0; t < static_cast<int>(f.pf[j].size()) && t <= n; ++t) {
          if (sgn(f.pf[j][t]) == 0) continue;
          for (int e = 0; e <= j && e <= k - i; ++e) {
            Q pw = 1;
            for (int u = 0; u < j - e; ++u) pw *= (n - t);
            s += f.pf[j][t] * binom(j, e) * pw * b.h[k - i - e][n - t];
          }
        }
      if (sgn(s) != 0) return n;
    }
  return -1;
}

// ---------------------------------------------------------------------------------------------
// numerical engine

struct PeriodEngine::FrobCache {
  unsigned bits = 0;
  int nterms = 0;
  std::vector<std::vector<Cx>> hhat;  // h[m][n] / (2 pi i)^m
  Mat<Cx> B;
};

PeriodEngine::PeriodEngine(PeriodFamily f) : fam_(std::move(f)) {
  A_ = derivative_form(fam_);
  if (!is_mum_at_zero(fam_)) throw InputError("family must have a maximally unipotent point at z=0");
}

std::shared_ptr<PeriodEngine::FrobCache> PeriodEngine::frob_cache(int nterms) const {
  std::lock_guard<std::mutex> lk(mu_);
  if (cache_ && cache_->bits == precision_bits() && cache_->nterms >= nterms) return cache_;
  auto c = std::make_shared<FrobCache>();
  c->bits = precision_bits();
  c->nterms = std::max(nterms, cache_ ? cache_->nterms : 0);
  auto h = frobenius_exact(fam_, c->nterms);
  int r = fam_.rank;
  Cx tpi = two_pi_i();
  Cx scale(1);
  c->hhat.resize(r);
  for (int m = 0; m < r; ++m) {
    c->hhat[m].resize(c->nterms);
    Cx inv = Cx(1) / scale;
    for (int n = 0; n < c->nterms; ++n) c->hhat[m][n] = inv * to_real(h[m][n]);
    scale *= tpi;
  }
  c->B = Mat<Cx>(r, r);
  Cx l2pii = Cx(log2_r()) / Cx(Real(0), pi_r());
  Cx z3 = Cx(zeta3_r()) / pow_int(tpi, 3);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      auto& bc = fam_.basis[a][b];
      c->B(a, b) = Cx(to_real(bc.rat)) + l2pii * to_real(bc.log2_pii) + z3 * to_real(bc.zeta3c);
    }
  cache_ = c;
  return c;
}

Mat<Cx> PeriodEngine::basis_matrix() const { return frob_cache(8)->B; }

bool PeriodEngine::in_frobenius_region(const Cx& z) const {
  Real s = abs(z) * to_real(fam_.chart_scale);
  return s <= Real(fam_.chart_radius.get_d() * (1 + 1e-12)) && s > 0;
}

double PeriodEngine::distance_to_singular(const Cx& z) const {
  double d = 1e300;
  for (auto& sp : fam_.singular) {
    if (sp.at_infinity) continue;
    d = std::min(d, static_cast<double>(abs(z - Cx(to_real(sp.z)))));
  }
  return d;
}

Mat<Cx> PeriodEngine::frobenius_jets(const Cx& z, int D) const {
  int r = fam_.rank;
  Real s = abs(z) * to_real(fam_.chart_scale);
  if (!(s > 0) || s >= Real(0.95)) throw InputError("Frobenius series used outside its disc");
  double log2s = static_cast<double>(boost::multiprecision::log2(s));
  double need = (precision_bits() + 30.0 + 4.0 * D) / -log2s;
  int N = static_cast<int>(need * 1.1) + 20;
  auto fc = frob_cache(N);
  Cx tpi = two_pi_i();
  Cx kappa = Cx(1) / tpi;
  Cx L = log(z) / tpi;
  // T[m][d] = theta^d hhat_m(z)
  std::vector<std::vector<Cx>> T(r, std::vector<Cx>(D + 1, Cx(0)));
  Cx zn(1);
  for (int n = 0; n < N; ++n) {
    Real np(1);
    for (int d = 0; d <= D; ++d) {
      for (int m = 0; m < r; ++m) T[m][d] += fc->hhat[m][n] * zn * np;
      np *= Real(n);
    }
    zn *= z;
  }
  // Lp[i] = L^i / i!, kp[e] = kappa^e
  std::vector<Cx> Lp(r + 1, Cx(1)), kp(D + 1, Cx(1));
  for (int i = 1; i <= r; ++i) Lp[i] = Lp[i - 1] * L / Cx(Real(i));
  for (int e = 1; e <= D; ++e) kp[e] = kp[e - 1] * kappa;
  // theta^d f_k
  Mat<Cx> th(r, D + 1);
  for (int k = 0; k < r; ++k)
    for (int d = 0; d <= D; ++d) {
      Cx acc(0);
      for (int i = 0; i <= k; ++i)
        for (int e = 0; e <= std::min(d, i); ++e)
          acc += to_real(binom(d, e)) * kp[e] * Lp[i - e] * T[k - i][d - e];
      th(k, d) = acc;
    }
  // z^a (d/dz)^a = sum_j s(a,j) theta^j
  auto s1 = stirling1(D);
  Mat<Cx> out(r, D + 1);
  Cx zinv = Cx(1) / z, zp(1);
  for (int a = 0; a <= D; ++a) {
    for (int k = 0; k < r; ++k) {
      Cx acc(0);
      for (int j = 0; j <= a; ++j)
        if (s1[a][j]) acc += th(k, j) * Real(static_cast<double>(s1[a][j]));
      out(k, a) = acc * zp;
    }
    zp *= zinv;
  }
  return out;
}

Mat<Cx> PeriodEngine::integral_jets(const Cx& z, int D) const {
  auto F = frobenius_jets(z, D);
  return frob_cache(8)->B * F;
}

std::vector<Cx> PeriodEngine::taylor_coeffs(const Cx& z0, const Vec<Cx>& derivs, int N) const {
  int r = fam_.rank;
  std::vector<std::vector<Cx>> a(r + 1);
  for (int k = 0; k <= r; ++k) a[k] = poly_shift<Cx>(A_[k], z0);
  if (Field<Cx>::mag(a[r][0]) < 1e-60) throw InputError("Taylor expansion at a singular point");
  std::vector<Cx> c(r);
  Real fact(1);
  for (int k = 0; k < r; ++k) {
    if (k > 0) fact *= Real(k);
    c[k] = derivs[k] / Cx(fact);
  }
  return taylor_recurrence<Cx>(a, r, c, N);
}

namespace {

Vec<Cx> eval_derivs(const std::vector<Cx>& c, const Cx& h, int D) {
  int N = static_cast<int>(c.size());
  Vec<Cx> out(D + 1, Cx(0));
  // y^{(a)}(h) = sum_m m!/(m-a)! c_m h^{m-a}, Horner per a
  for (int a = 0; a <= D; ++a) {
    Cx acc(0);
    for (int m = N - 1; m >= a; --m) {
      Real f(1);
      for (int t = 0; t < a; ++t) f *= Real(m - t);
      acc = acc * h + c[m] * f;
    }
    out[a] = acc;
  }
  return out;
}

}  // namespace

Mat<Cx> PeriodEngine::transport(const std::vector<Cx>& path, Mat<Cx> data, double step_ratio) const {
  int r = fam_.rank;
  if (data.c < r) throw InputError("transport needs derivative data up to order rank-1");
  double margin = 1e-12;
  for (size_t seg = 0; seg + 1 < path.size(); ++seg) {
    Cx z = path[seg];
    Cx target = path[seg + 1];
    while (true) {
      Cx rem = target - z;
      double remd = static_cast<double>(abs(rem));
      if (remd <= 1e-300) break;
      double dist = distance_to_singular(z);
      if (dist < margin) throw InputError("path too close to a singular point");
      double step = step_ratio * dist;
      Cx h = remd <= step ? rem : rem * Real(step / remd);
      double ratio = std::min(remd, step) / dist;
      int N = static_cast<int>((precision_bits() + 40.0) / -std::log2(ratio)) + 40;
      Mat<Cx> nd(data.r, r);
      for (int row = 0; row < data.r; ++row) {
        auto c = taylor_coeffs(z, data.row(row), N);
        auto d = eval_derivs(c, h, r - 1);
        for (int a = 0; a < r; ++a) nd(row, a) = d[a];
      }
      data = nd;
      z = remd <= step ? target : z + h;
      if (remd <= step) break;
    }
  }
  return data;
}

Mat<Cx> PeriodEngine::extend_jets(const Cx& z, const Mat<Cx>& data, int D) const {
  Mat<Cx> out(data.r, D + 1);
  for (int row = 0; row < data.r; ++row) {
    auto c = taylor_coeffs(z, data.row(row), D + 1);
    Real f(1);
    for (int a = 0; a <= D; ++a) {
      if (a > 0) f *= Real(a);
      out(row, a) = c[a] * f;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------------------------

namespace {

double mat_diff(const Mat<Cx>& a, const Mat<Cx>& b) {
  double m = 0;
  for (size_t k = 0; k < a.a.size(); ++k) m = std::max(m, Field<Cx>::mag(a.a[k] - b.a[k]));
  return m;
}

// column-wise relative difference (derivative columns live on different scales)
double rel_diff(const Mat<Cx>& a, const Mat<Cx>& b) {
  double worst = 0;
  for (int j = 0; j < a.c; ++j) {
    double scale = 0, d = 0;
    for (int i = 0; i < a.r; ++i) {
      scale = std::max(scale, Field<Cx>::mag(a(i, j)));
      d = std::max(d, Field<Cx>::mag(a(i, j) - b(i, j)));
    }
    if (scale > 0) worst = std::max(worst, d / scale);
  }
  return worst;
}

Mat<Cx> frame_matrix(const PeriodFrame& f, int cols) {
  int r = static_cast<int>(f.d[0].size());
  Mat<Cx> m(r, cols);
  for (int a = 0; a < cols; ++a)
    for (int i = 0; i < r; ++i) m(i, a) = f.d[a][i];
  return m;
}

PeriodFrame to_frame(const Cx& z, const Mat<Cx>& m) {
  PeriodFrame f;
  f.z = z;
  f.bits = precision_bits();
  for (int a = 0; a < m.c; ++a) f.d.push_back(m.col(a));
  return f;
}

}  // namespace

ContinuationResult analytic_continuation(const PeriodEngine& e, const std::vector<Cx>& path, const PeriodFrame& start) {
  int r = e.family().rank;
  if (start.order() < r - 1) throw InputError("initial frame needs derivatives up to order rank-1");
  if (path.size() < 2) throw InputError("path needs at least two points");
  if (static_cast<double>(abs(path.front() - start.z)) > 1e-30) throw InputError("path must start at the frame point");
  for (auto& p : path)
    if (e.distance_to_singular(p) < 1e-12) throw InputError("path vertex is singular");
  Mat<Cx> d0 = frame_matrix(start, r);
  auto a = e.transport(path, d0, 0.5);
  auto b = e.transport(path, d0, 0.25);
  ContinuationResult res;
  res.halving_change = rel_diff(a, b);
  res.frame = to_frame(path.back(), b);
  res.frame.err = res.halving_change + start.err;
  for (size_t s = 0; s + 1 < path.size(); ++s) res.hops += 1;
  return res;
}

Cx pairing(const MatQ& S, const Vec<Cx>& a, const Vec<Cx>& b) {
  Cx s(0);
  for (int i = 0; i < S.r; ++i)
    for (int j = 0; j < S.c; ++j) {
      const QI& q = S(i, j);
      if (q.is_zero()) continue;
      s += to_cx(q) * a[i] * b[j];
    }
  return s;
}

MonodromyResult monodromy_from_matrix(const Mat<Cx>& T, const MatQ& S, const std::string& loop) {
  MonodromyResult res;
  res.loop = loop;
  res.T = T;
  int r = T.r;
  res.T_int = MatQ(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      const Cx& v = T(i, j);
      long k = std::lround(static_cast<double>(v.re));
      res.T_int(i, j) = QI(k);
      res.residual = std::max(res.residual, Field<Cx>::mag(v - Cx(Real(k))));
    }
  Mat<Cx> Sc = to_cx(S);
  res.symplectic_residual = mat_diff(T.transpose() * Sc * T, Sc);
  res.symplectic_exact = (res.T_int.transpose() * S * res.T_int) == S;
  MatQ U = res.T_int - MatQ::identity(r);
  res.nilpotency = nilpotency_index(U);
  res.unipotent = res.nilpotency >= 0;
  res.rank_N = rank(U);
  if (res.unipotent) res.N = log_unipotent(res.T_int);
  return res;
}

MonodromyResult monodromy_matrix(const PeriodEngine& e, const std::string& point, int vertices) {
  const auto& f = e.family();
  const SingularPoint* sp = nullptr;
  for (auto& s : f.singular)
    if (!s.at_infinity && (s.label == point || to_string(s.z) == point)) sp = &s;
  if (!sp) throw InputError("no finite singular point labelled " + point);
  Cx p(to_real(sp->z));
  Cx b(to_real(f.base_point));
  Real rho = abs(b - p);
  for (auto& s : f.singular) {
    if (&s == sp || s.at_infinity) continue;
    if (static_cast<double>(abs(Cx(to_real(s.z)) - p)) <= static_cast<double>(rho) * 1.05)
      throw InputError("loop through the base point would enclose or touch another singular point");
  }
  // counterclockwise polygon around p through b
  Real th0 = boost::multiprecision::atan2((b - p).im, (b - p).re);
  std::vector<Cx> path{b};
  for (int k = 1; k < vertices; ++k) {
    Real th = th0 + 2 * pi_r() * k / vertices;
    path.push_back(p + Cx(rho * boost::multiprecision::cos(th), rho * boost::multiprecision::sin(th)));
  }
  path.push_back(b);
  int r = f.rank;
  Mat<Cx> phi = e.integral_jets(b, r - 1);
  auto a = e.transport(path, phi, 0.5);
  auto a2 = e.transport(path, phi, 0.25);
  auto inv = inverse(phi);
  if (!inv) throw DegeneracyError("period Wronskian is singular at the base point");
  Mat<Cx> T = a2 * *inv;
  auto res = monodromy_from_matrix(T, f.S, "loop around " + sp->label + " (z=" + to_string(sp->z) + ") from z=" +
                                              to_string(f.base_point));
  res.halving_change = mat_diff(a * *inv, T);
  return res;
}

// ---------------------------------------------------------------------------------------------

namespace {

std::string cache_key(const PeriodEngine& e, const Cx& z, int order) {
  std::ostringstream os;
  os << e.family().name << '|' << to_string(z, 40) << '|' << precision_bits() << '|' << order;
  return os.str();
}

std::optional<PeriodFrame> cache_get(const std::string& key) {
  const char* dir = std::getenv("HODGE_MODULI_CACHE");
  if (!dir || !*dir) return std::nullopt;
  auto p = std::filesystem::path(dir) / (std::to_string(std::hash<std::string>{}(key)) + ".json");
  std::ifstream in(p);
  if (!in) return std::nullopt;
  try {
    json j = json::parse(in);
    if (j.at("key").get<std::string>() != key) return std::nullopt;
    PeriodFrame f;
    f.bits = j.at("bits").get<unsigned>();
    f.err = j.at("err").get<double>();
    f.z = Cx(Real(j.at("z")[0].get<std::string>()), Real(j.at("z")[1].get<std::string>()));
    for (auto& col : j.at("d")) {
      Vec<Cx> v;
      for (auto& x : col) v.emplace_back(Real(x[0].get<std::string>()), Real(x[1].get<std::string>()));
      f.d.push_back(v);
    }
    return f;
  } catch (...) {
    return std::nullopt;
  }
}

void cache_put(const std::string& key, const PeriodFrame& f) {
  const char* dir = std::getenv("HODGE_MODULI_CACHE");
  if (!dir || !*dir) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  int digits = static_cast<int>(f.bits * 0.30103) + 5;
  json j;
  j["key"] = key;
  j["bits"] = f.bits;
  j["err"] = f.err;
  j["z"] = {f.z.re.str(digits), f.z.im.str(digits)};
  j["d"] = json::array();
  for (auto& col : f.d) {
    json c = json::array();
    for (auto& x : col) c.push_back({x.re.str(digits), x.im.str(digits)});
    j["d"].push_back(c);
  }
  auto p = std::filesystem::path(dir) / (std::to_string(std::hash<std::string>{}(key)) + ".json");
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    out << j.dump();
  }
  std::filesystem::rename(tmp, p, ec);
}

}  // namespace

namespace {

double segment_clearance(const PeriodEngine& e, const Cx& a, const Cx& b) {
  double best = 1e300;
  for (int k = 0; k <= 64; ++k) {
    Cx p = a + (b - a) * Real(k / 64.0);
    best = std::min(best, e.distance_to_singular(p));
  }
  return best;
}

}  // namespace

// straight segment when it keeps clear of the singular points, otherwise a two-segment
// detour through the upper half plane first, then the lower one
std::vector<Cx> default_path(const PeriodEngine& e, const Cx& b, const Cx& z) {
  double need = 0.2 * std::min(e.distance_to_singular(b), e.distance_to_singular(z));
  if (segment_clearance(e, b, z) >= need) return {b, z};
  Real len = abs(z - b);
  for (double t : {0.5, 1.0, -0.5, -1.0, 2.0, -2.0}) {
    Cx w = (b + z) * Real(0.5) + Cx(Real(0), len * Real(t));
    if (segment_clearance(e, b, w) >= need && segment_clearance(e, w, z) >= need) return {b, w, z};
  }
  throw InputError("no clear default path to the requested point; pass an explicit path");
}

PeriodFrame period_frame(const PeriodEngine& e, const Cx& z, int order) {
  const auto& f = e.family();
  if (order < 0) throw InputError("order must be non-negative");
  double dsing = e.distance_to_singular(z);
  if ((z.re == 0 && z.im == 0) || (!e.in_frobenius_region(z) && dsing < 1e-14))
    throw InputError("period frame requested at a singular point");
  int D = std::max(order, f.rank - 1);
  Mat<Cx> m;
  double err = 0;
  if (e.in_frobenius_region(z)) {
    m = e.integral_jets(z, D);
  } else {
    std::string key = cache_key(e, z, order);
    if (auto c = cache_get(key)) return *c;
    Cx b(to_real(f.base_point));
    PeriodFrame start = to_frame(b, e.integral_jets(b, f.rank - 1));
    auto res = analytic_continuation(e, default_path(e, b, z), start);
    m = e.extend_jets(z, frame_matrix(res.frame, f.rank), D);
    err = res.halving_change;
    PeriodFrame out = to_frame(z, m);
    out.d.resize(order + 1);
    out.err = err;
    cache_put(key, out);
    return out;
  }
  PeriodFrame out = to_frame(z, m);
  out.d.resize(order + 1);
  out.err = err;
  return out;
}

double transversality_defect(const PeriodEngine& e, const PeriodFrame& fr) {
  const auto& f = e.family();
  double worst = 0;
  auto nrm = [](const Vec<Cx>& v) {
    double s = 0;
    for (auto& x : v) s += std::pow(Field<Cx>::mag(x), 2);
    return std::sqrt(s);
  };
  for (int a = 0; a <= fr.order(); ++a)
    for (int b = 0; b <= fr.order(); ++b) {
      if (a + b >= f.weight) continue;
      double v = Field<Cx>::mag(pairing(f.S, fr.d[a], fr.d[b])) / (nrm(fr.d[a]) * nrm(fr.d[b]));
      worst = std::max(worst, v);
    }
  return worst;
}

std::vector<Vec<Cx>> chart_jets(const PeriodEngine& e, const Cx& s, int order) {
  Real c = to_real(e.family().chart_scale);
  auto fr = period_frame(e, s / Cx(c), order);
  std::vector<Vec<Cx>> p;
  Real scale(1);
  for (int a = 0; a <= order; ++a) {
    if (a > 0) scale *= c * Real(a);
    Vec<Cx> v = fr.d[a];
    for (auto& x : v) x = x / Cx(scale);
    p.push_back(v);
  }
  return p;
}

}  // namespace hm
