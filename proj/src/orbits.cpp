#include "hm/orbits.hpp"
#include "hm/models.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace hm {

namespace {

MatQ exp_sum(const std::vector<MatQ>& N, const std::vector<QI>& z) {
  if (z.size() != N.size()) throw InputError("number of coordinates differs from number of nilpotents");
  MatQ s(N[0].r, N[0].c);
  for (size_t j = 0; j < N.size(); ++j) s += N[j] * z[j];
  return exp_nilpotent(s);
}

Subspace<Cx> to_cx_sub(const SubQ& s) {
  std::vector<Vec<Cx>> vs;
  for (auto& v : s.vectors()) {
    Vec<Cx> w;
    for (auto& x : v) w.push_back(to_cx(x));
    vs.push_back(w);
  }
  return Subspace<Cx>::span(vs, s.ambient());
}

Q exact(double d) { return Q(d); }

}  // namespace

ConeValidation validate_cone(const NilpotentCone& c) {
  ConeValidation r;
  for (size_t i = 0; i < c.N.size(); ++i) {
    for (size_t j = i + 1; j < c.N.size(); ++j)
      if (!commute(c.N[i], c.N[j])) {
        r.commuting = false;
        r.notes.push_back("N" + std::to_string(i + 1) + " and N" + std::to_string(j + 1) + " do not commute");
      }
    if (nilpotency_index(c.N[i]) < 0) {
      r.commuting = false;
      r.notes.push_back("N" + std::to_string(i + 1) + " is not nilpotent");
    }
    for (int p = c.F.lo() - 1; p <= c.F.hi() + 1; ++p)
      if (!c.F.get(p - 1).contains(image(c.N[i], c.F.get(p)))) {
        r.horizontal = false;
        r.notes.push_back("N" + std::to_string(i + 1) + " F^" + std::to_string(p) + " not in F^" + std::to_string(p - 1));
      }
    // S(N a, b) + S(a, N b) = 0  <=>  N^T G + G N = 0
    if (!(c.N[i].transpose() * c.S.gram + c.S.gram * c.N[i]).is_zero()) {
      r.infinitesimal_isometry = false;
      r.notes.push_back("N" + std::to_string(i + 1) + " is not infinitesimally S-orthogonal");
    }
  }
  return r;
}

FiltQ orbit_point_exact(const NilpotentCone& c, const std::vector<QI>& z) {
  MatQ g = exp_sum(c.N, z);
  FiltQ out(Direction::Decreasing, c.n);
  for (auto& [p, s] : c.F.pieces()) out.set(p, image(g, s));
  return out;
}

Filtration<Cx> orbit_point(const NilpotentCone& c, const std::vector<Cx>& z) {
  if (z.size() != c.N.size()) throw InputError("number of coordinates differs from number of nilpotents");
  Mat<Cx> s(c.n, c.n);
  for (size_t j = 0; j < c.N.size(); ++j) s += to_cx(c.N[j]) * z[j];
  Mat<Cx> g = exp_nilpotent(s);
  Filtration<Cx> out(Direction::Decreasing, c.n);
  for (auto& [p, sub] : c.F.pieces()) out.set(p, image(g, to_cx_sub(sub)));
  return out;
}

SL2Triple jacobson_morozov(const MatQ& X) {
  int n = X.r;
  int d = nilpotency_index(X);
  if (X.r != X.c || d < 0) throw InputError("Jacobson-Morozov needs a nilpotent matrix");
  std::vector<MatQ> P{MatQ::identity(n)};
  for (int k = 1; k <= d + 1; ++k) P.push_back(P.back() * X);
  // chain tops of length k: complement of ker X^{k-1} + X ker X^{k+1} inside ker X^k
  std::vector<VecQ> cols;
  std::vector<int> hval;
  std::vector<std::pair<int, int>> ycoef;  // (column index of f_{j-1}, j(k-j))
  std::vector<QI> yval;
  for (int k = d; k >= 1; --k) {
    SubQ Kk = kernel(P[k]);
    SubQ A = sum(kernel(P[k - 1]), image(X, kernel(P[k + 1])));
    for (auto& v : complement_in(A, Kk).vectors()) {
      VecQ f = v;
      for (int j = 0; j < k; ++j) {
        cols.push_back(f);
        hval.push_back(2 * j - k + 1);
        yval.push_back(QI(static_cast<long>(j) * (k - j)));
        f = X * f;
      }
    }
  }
  if (static_cast<int>(cols.size()) != n) throw std::logic_error("Jordan chains do not form a basis");
  MatQ B = MatQ::from_cols(cols, n);
  auto Bi = inverse(B);
  if (!Bi) throw std::logic_error("Jordan chains are dependent");
  MatQ Hd(n, n), Yd(n, n);
  for (int i = 0; i < n; ++i) {
    Hd(i, i) = QI(hval[i]);
    if (!yval[i].is_zero()) Yd(i - 1, i) = yval[i];  // Y f_j = j(k-j) f_{j-1}
  }
  SL2Triple t{X, B * Yd * *Bi, B * Hd * *Bi};
  if (commutator(t.H, t.X) != t.X * QI(2) || commutator(t.H, t.Y) != t.Y * QI(-2) || commutator(t.X, t.Y) != t.H)
    throw std::logic_error("sl2 relations fail");
  return t;
}

RegionCoords region_coordinates(const std::vector<double>& y, const std::vector<int>& I) {
  int a = static_cast<int>(y.size());
  if (I.empty() || I.back() != a) throw InputError("index set must end with a");
  RegionCoords rc;
  rc.I = I;
  int prev = 0;
  for (size_t al = 0; al < I.size(); ++al) {
    int i = I[al];
    rc.t.push_back(al + 1 < I.size() ? y[i - 1] / y[I[al + 1] - 1] : y[a - 1]);
    std::vector<std::pair<int, double>> u;
    for (int j = prev + 1; j < i; ++j) u.push_back({j, y[j - 1] / y[i - 1]});
    rc.u.push_back(u);
    prev = i;
  }
  return rc;
}

bool in_region(const std::vector<double>& y, const std::vector<int>& I, double K, double L) {
  auto rc = region_coordinates(y, I);
  for (double t : rc.t)
    if (!(t > L)) return false;
  for (auto& ua : rc.u)
    for (auto& [j, u] : ua)
      if (u < 1 || u > K) return false;
  return true;
}

Mat<Cx> grading_operator(const NilpotentCone& c, const std::vector<int>& I, const std::vector<double>& y) {
  if (y.size() != c.N.size()) throw InputError("y has the wrong length");
  auto rc = region_coordinates(y, I);
  Mat<Cx> M(c.n, c.n);
  MatQ Ysum(c.n, c.n);
  for (size_t al = 0; al < I.size(); ++al) {
    MatQ Xa = c.N[I[al] - 1];
    for (auto& [j, u] : rc.u[al]) Xa += c.N[j - 1] * QI(exact(u));
    SL2Triple tr;
    try {
      tr = jacobson_morozov(Xa);
    } catch (const InputError&) {
      throw InputError("X_alpha is not nilpotent");
    }
    Ysum += tr.H;
    Real half_log = boost::multiprecision::log(Real(rc.t[al])) / 2;
    M += to_cx(Ysum) * Cx(half_log);
  }
  return mat_exp(M);
}

RegionClass classify_cone_region(const std::vector<double>& y, const std::vector<double>& K) {
  int a = static_cast<int>(y.size());
  if (static_cast<int>(K.size()) != a) throw InputError("need K_1..K_a");
  auto Kat = [&](int j) { return j == a + 1 ? 1.0 : K[j - 1]; };
  for (int j = 1; j <= a; ++j)
    if (!(Kat(j) > std::pow(Kat(j + 1), a)) || !(Kat(j) >= Kat(j + 1)))
      throw InputError("K sequence violates K_j > K_{j+1}^a");
  for (int j = 0; j < a; ++j) {
    if (!(y[j] > 0)) throw InputError("y must be positive");
    if (j + 1 < a && y[j] < y[j + 1]) throw InputError("y must be ordered y_1 >= ... >= y_a");
  }
  RegionClass r;
  if (y[a - 1] <= Kat(1) + 1) {
    r.base = true;
    return r;
  }
  std::vector<double> xi(a);
  for (int j = 0; j + 1 < a; ++j) xi[j] = y[j] / y[j + 1];
  xi[a - 1] = y[a - 1];
  for (int l = 2; l <= a + 1; ++l) {
    bool free = true;
    for (double x : xi)
      if (x > Kat(l) && x <= Kat(l - 1)) free = false;
    if (!free) continue;
    for (int j = 1; j <= a; ++j)
      if (xi[j - 1] > Kat(l - 1)) r.I.push_back(j);
    r.j = l - 1;
    r.coords = region_coordinates(y, r.I);
    return r;
  }
  throw std::logic_error("cone region classification failed");
}

bool region_contains(const RegionClass& r, const std::vector<double>& y, const std::vector<double>& K) {
  int a = static_cast<int>(y.size());
  if (r.base) return y[a - 1] <= K[0] + 1;
  double Kj = K[r.j - 1], Kn = r.j == a ? 1.0 : K[r.j];
  return in_region(y, r.I, std::pow(Kn, a), Kj);
}

OrbitFrame default_frame(const NilpotentCone& c) {
  OrbitFrame f{MatQ(c.n, c.n)};
  MatQ sum(c.n, c.n);
  for (auto& n : c.N) sum += n;
  MixedHodgeStructure m;
  m.n = c.n;
  m.conj_op = c.conj_op;
  m.W = shifted_weight_filtration(sum, c.weight);
  m.F = c.F;
  try {
    auto d = compute_delta(m);
    f.delta = *d.delta;
  } catch (const StructuralError&) {
  }
  return f;
}

MatQ orbit_group_element(const NilpotentCone& c, const OrbitFrame& f, const std::vector<QI>& z) {
  return exp_nilpotent(f.delta * QI(Q(0), Q(1))) * exp_sum(c.N, z);
}

PureHodgeStructure<QI> orbit_hodge_structure(const NilpotentCone& c, const OrbitFrame& f, const std::vector<QI>& z) {
  MatQ g = orbit_group_element(c, f, z);
  PureHodgeStructure<QI> hs;
  hs.weight = c.weight;
  hs.n = c.n;
  hs.conj_op = c.conj_op;
  hs.S = c.S;
  hs.F = FiltQ(Direction::Decreasing, c.n);
  for (auto& [p, s] : c.F.pieces()) hs.F.set(p, image(g, s));
  return hs;
}

Q hodge_norm_sq(const NilpotentCone& c, const OrbitFrame& f, const VecQ& v, const std::vector<QI>& z) {
  auto hs = orbit_hodge_structure(c, f, z);
  HRReport<QI> hr;
  try {
    hr = verify_hodge_riemann(hs);
  } catch (const StructuralError&) {
    throw DomainError("orbit point is not a Hodge structure");
  }
  if (!hr.relation1 || !hr.relation2) throw DomainError("orbit point violates the Hodge-Riemann relations");
  MatQ C = weil_operator(hs);
  QI val = c.S(C * v, hs.conj(v));
  if (!val.is_real()) throw std::logic_error("Hodge norm is not real");
  return val.re;
}

double hodge_norm(const NilpotentCone& c, const OrbitFrame& f, const VecQ& v, const std::vector<double>& x,
                  const std::vector<double>& y) {
  std::vector<QI> z;
  for (size_t j = 0; j < y.size(); ++j) z.push_back(QI(exact(x.empty() ? 0.0 : x[j]), exact(y[j])));
  return std::sqrt(hodge_norm_sq(c, f, v, z).get_d());
}

std::vector<int> multi_weight(const NilpotentCone& c, const VecQ& v) {
  if (vec_is_zero(v)) throw InputError("zero vector has no weight");
  std::vector<int> l;
  MatQ s(c.n, c.n);
  for (auto& n : c.N) {
    s += n;
    auto W = weight_filtration(s);
    int k = W.lo() - 1;
    while (!W.get(k).contains(v)) ++k;
    l.push_back(k);
  }
  return l;
}

GrowthReport norm_growth_exponents(const NilpotentCone& c, const VecQ& v, const RaySpec& ray) {
  int a = static_cast<int>(c.N.size());
  GrowthReport rep;
  rep.l = multi_weight(c, v);
  // Gr(v) != 0 in the multigraded sense
  {
    std::vector<FiltQ> Ws;
    MatQ s(c.n, c.n);
    for (auto& n : c.N) {
      s += n;
      Ws.push_back(weight_filtration(s));
    }
    SubQ lower = SubQ::zero(c.n);
    for (int j = 0; j < a; ++j) {
      SubQ piece = Ws[j].get(rep.l[j] - 1);
      for (int i = 0; i < a; ++i)
        if (i != j) piece = intersect(piece, Ws[i].get(rep.l[i]));
      lower = sum(lower, piece);
    }
    if (lower.contains(v)) throw InputError("v has vanishing multigraded component; no growth law applies");
  }
  for (int li : rep.l) rep.predicted_t.push_back(li / 2.0);
  OrbitFrame f = default_frame(c);
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  double lo = ray.e1 - ray.fit_decades;
  int npts = ray.per_decade * ray.fit_decades;
  std::vector<double> powers = a == 1 ? std::vector<double>{1.0} : ray.ray_powers;
  for (double q : powers)
    for (int k = 0; k <= npts; ++k) {
      double ya = std::pow(10.0, lo + static_cast<double>(k) / ray.per_decade);
      std::vector<double> y(a);
      for (int j = 1; j <= a; ++j) y[j - 1] = std::pow(ya, 1 + (a - j) * (q - 1));
      double nv = hodge_norm(c, f, v, {}, y);
      std::vector<double> row{1.0};
      for (int al = 0; al < a; ++al) row.push_back(std::log(al + 1 < a ? y[al] / y[al + 1] : y[a - 1]));
      rows.push_back(row);
      rhs.push_back(std::log(nv));
    }
  int m = static_cast<int>(rows.size());
  Eigen::MatrixXd A(m, a + 1);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= a; ++j) A(i, j) = rows[i][j];
    b(i) = rhs[i];
  }
  Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
  for (int al = 0; al < a; ++al) rep.fitted_t.push_back(sol(al + 1));
  for (int j = 0; j < a; ++j) rep.fitted_y.push_back(rep.fitted_t[j] - (j > 0 ? rep.fitted_t[j - 1] : 0.0));
  rep.samples = m;
  rep.rms = std::sqrt((A * sol - b).squaredNorm() / m);
  return rep;
}

NilpotentCone elliptic_cone() {
  auto m = elliptic_limit_mhs();
  NilpotentCone c;
  c.n = 2;
  c.weight = 1;
  c.conj_op = m.conj_op;
  c.N = m.nilpotents;
  c.F = m.F;
  c.S = *m.S;
  return c;
}

NilpotentCone product_elliptic_cone() {
  auto e = elliptic_cone();
  MatQ I2 = MatQ::identity(2);
  NilpotentCone c;
  c.n = 4;
  c.weight = 2;
  c.conj_op = MatQ::identity(4);
  c.N = {kron(e.N[0], I2), kron(I2, e.N[0])};
  c.S.gram = kron(e.S.gram, e.S.gram);
  c.S.parity = BilinearForm<QI>::Parity::Symmetric;
  c.F = FiltQ(Direction::Decreasing, 4);
  for (int p = 0; p <= 3; ++p) {
    std::vector<VecQ> vs;
    for (int a = 0; a <= 1; ++a)
      for (int b = 0; b <= 1; ++b)
        if (a + b >= p)
          for (auto& u : e.F.get(a).vectors())
            for (auto& w : e.F.get(b).vectors()) {
              VecQ t(4);
              for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) t[2 * i + j] = u[i] * w[j];
              vs.push_back(t);
            }
    c.F.set(p, SubQ::span(vs, 4));
  }
  return c;
}

}  // namespace hm
