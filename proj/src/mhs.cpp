#include "hm/mhs.hpp"

#include <random>

namespace hm {

namespace {

std::vector<MatQ> powers(const MatQ& N, int upto) {
  std::vector<MatQ> p{MatQ::identity(N.r)};
  for (int i = 1; i <= upto; ++i) p.push_back(p.back() * N);
  return p;
}

int checked_nilpotency(const MatQ& N) {
  if (N.r != N.c) throw InputError("nilpotent operator must be square");
  int d = nilpotency_index(N);
  if (d < 0) throw InputError("operator is not nilpotent");
  return d;
}

VecQ combine(const SubQ& V, const VecQ& x) {
  VecQ v(V.ambient(), QI(0));
  for (int i = 0; i < V.dim(); ++i)
    for (int j = 0; j < V.ambient(); ++j) v[j] += x[i] * V.basis()(i, j);
  return v;
}

}  // namespace

bool commute(const MatQ& a, const MatQ& b) { return commutator(a, b).is_zero(); }

MatQ restrict_to(const MatQ& N, const SubQ& V) {
  MatQ r(V.dim(), V.dim());
  auto vs = V.vectors();
  for (int i = 0; i < V.dim(); ++i) {
    auto c = V.coords(N * vs[i]);
    for (int j = 0; j < V.dim(); ++j) r(j, i) = c[j];
  }
  return r;
}

MatQ induced_on_quotient(const MatQ& N, const SubQ& A, const SubQ& C) {
  MatQ r(C.dim(), C.dim());
  auto cs = C.vectors();
  for (int i = 0; i < C.dim(); ++i) {
    auto p = project_along(N * cs[i], C, A);
    auto c = C.coords(p);
    for (int j = 0; j < C.dim(); ++j) r(j, i) = c[j];
  }
  return r;
}

SubQ from_coords(const SubQ& coords, const SubQ& V) {
  std::vector<VecQ> out;
  for (auto& x : coords.vectors()) out.push_back(combine(V, x));
  return SubQ::span(out, V.ambient());
}

FiltQ weight_filtration(const MatQ& N) {
  int n = N.r;
  int d = checked_nilpotency(N);
  // N^j vanishes for j >= d, so only the first d + 1 kernels and images matter
  auto P = powers(N, d + 1);
  std::vector<SubQ> kers, ims;
  for (int i = 0; i <= d; ++i) {
    kers.push_back(kernel(P[i]));
    ims.push_back(image(P[i]));
  }
  auto ker = [&](int i) -> const SubQ& { return kers[std::min(i, d)]; };
  auto im = [&](int j) -> const SubQ& { return ims[std::min(j, d)]; };
  FiltQ W(Direction::Increasing, n);
  int top = std::max(d - 1, 0);
  for (int l = -top - 1; l <= top; ++l) {
    SubQ acc = SubQ::zero(n);
    for (int j = std::max(0, -l); j < d; ++j) {
      int e = l + j + 1;
      if (e < 1) continue;
      acc = sum(acc, intersect(ker(e), im(j)));
    }
    W.set(l, acc);
  }
  std::string why;
  if (!verify_weight_filtration(N, W, 0, &why))
    throw std::logic_error("weight filtration failed its defining properties: " + why);
  return W;
}

FiltQ shifted_weight_filtration(const MatQ& N, int k) { return weight_filtration(N).shifted(-k); }

bool verify_weight_filtration(const MatQ& N, const FiltQ& W, int center, std::string* why) {
  int n = N.r;
  int lo = W.lo() - 2, hi = W.hi() + 2;
  for (int l = lo; l <= hi; ++l) {
    if (!W.get(l - 2).contains(image(N, W.get(l)))) {
      if (why) *why = "N(W_" + std::to_string(l) + ") not inside W_" + std::to_string(l - 2);
      return false;
    }
  }
  if (W.get(lo).dim() != 0 || W.get(hi).dim() != n) {
    if (why) *why = "filtration does not exhaust";
    return false;
  }
  MatQ Np = MatQ::identity(n);
  for (int l = 0; center + l <= hi; ++l) {
    auto top = W.get(center + l), topm = W.get(center + l - 1);
    auto bot = W.get(center - l), botm = W.get(center - l - 1);
    int dtop = top.dim() - topm.dim(), dbot = bot.dim() - botm.dim();
    if (dtop != dbot) {
      if (why) *why = "Gr dimensions differ at l=" + std::to_string(l);
      return false;
    }
    auto k = intersect(preimage(Np, botm), top);
    if (k != topm) {
      if (why) *why = "N^" + std::to_string(l) + " not injective on Gr_" + std::to_string(center + l);
      return false;
    }
    Np = Np * N;
  }
  return true;
}

std::optional<FiltQ> relative_weight_filtration(const MatQ& N, const FiltQ& W0in) {
  int n = N.r;
  int d = checked_nilpotency(N);
  FiltQ W0 = W0in.normalized();
  for (int l = W0.lo() - 1; l <= W0.hi() + 1; ++l)
    if (!W0.get(l).contains(image(N, W0.get(l)))) throw InputError("N does not preserve W0");

  int mlo = W0.lo() - d - 2, mhi = W0.hi() + d + 2;
  std::map<int, SubQ> M;
  for (int m = mlo; m <= mhi; ++m) M[m] = SubQ::zero(n);

  for (int k = W0.lo(); k <= W0.hi(); ++k) {
    SubQ A = W0.get(k - 1), B = W0.get(k);
    if (A.dim() == B.dim()) continue;
    SubQ C = complement_in(A, B);
    MatQ Ngr = induced_on_quotient(N, A, C);
    FiltQ Wgr = weight_filtration(Ngr);
    int dg = std::max(nilpotency_index(Ngr), 1);
    auto Pg = powers(Ngr, dg + 1);
    auto Pn = powers(N, dg + 1);
    std::map<int, SubQ> Mn = M;
    for (int l = 0; l < dg; ++l) {
      SubQ kerl = kernel(Pg[l + 1]);
      SubQ hiK = intersect(kerl, Wgr.get(l)), loK = intersect(kerl, Wgr.get(l - 1));
      SubQ prim = complement_in(loK, hiK);
      for (auto& x : prim.vectors()) {
        VecQ v = combine(C, x);
        VecQ u = Pn[l + 1] * v;
        if (!A.contains(u)) throw std::logic_error("relative weight: primitive lift leaves W0_{k-1}");
        const SubQ& target = M[std::max(mlo, k - l - 2)];
        int na = A.dim(), nt = target.dim();
        VecQ vt = v;
        if (na + nt > 0) {
          MatQ sys(n, na + nt);
          auto av = A.vectors();
          for (int i = 0; i < na; ++i) {
            auto col = Pn[l + 1] * av[i];
            for (int r = 0; r < n; ++r) sys(r, i) = col[r];
          }
          for (int i = 0; i < nt; ++i)
            for (int r = 0; r < n; ++r) sys(r, na + i) = -target.basis()(i, r);
          VecQ rhs(n);
          for (int r = 0; r < n; ++r) rhs[r] = -u[r];
          auto sol = solve(sys, rhs);
          if (!sol) return std::nullopt;
          for (int i = 0; i < na; ++i)
            for (int r = 0; r < n; ++r) vt[r] += (*sol)[i] * av[i][r];
        } else if (!vec_is_zero(u)) {
          return std::nullopt;
        }
        VecQ cur = vt;
        for (int j = 0; j <= l; ++j) {
          int w = k + l - 2 * j;
          for (int m = std::max(w, mlo); m <= mhi; ++m) Mn[m] = sum(Mn[m], SubQ::span({cur}, n));
          cur = N * cur;
        }
      }
    }
    M = Mn;
  }
  FiltQ out(Direction::Increasing, n);
  for (auto& [m, s] : M) out.set(m, s);
  out = out.normalized();
  if (out.get(mhi).dim() != n) return std::nullopt;
  if (!verify_relative_weight_filtration(N, W0, out)) return std::nullopt;
  return out;
}

bool verify_relative_weight_filtration(const MatQ& N, const FiltQ& W0in, const FiltQ& M, std::string* why) {
  int n = N.r;
  FiltQ W0 = W0in.normalized();
  for (int l = M.lo() - 2; l <= M.hi() + 2; ++l)
    if (!M.get(l - 2).contains(image(N, M.get(l)))) {
      if (why) *why = "N(M_l) not in M_{l-2}";
      return false;
    }
  for (int j = W0.lo(); j <= W0.hi(); ++j) {
    SubQ A = W0.get(j - 1), B = W0.get(j);
    if (A.dim() == B.dim()) continue;
    SubQ C = complement_in(A, B);
    MatQ Ngr = induced_on_quotient(N, A, C);
    FiltQ expect = weight_filtration(Ngr).shifted(-j);
    FiltQ induced(Direction::Increasing, C.dim());
    for (int m = M.lo() - 1; m <= M.hi() + 1; ++m) {
      std::vector<VecQ> cs;
      for (auto& v : intersect(M.get(m), B).vectors()) cs.push_back(C.coords(project_along(v, C, A)));
      induced.set(m, SubQ::span(cs, C.dim()));
    }
    if (induced.normalized() != expect) {
      if (why) *why = "induced filtration on Gr_" + std::to_string(j) + " is not the shifted weight filtration";
      return false;
    }
  }
  (void)n;
  return true;
}

ConeReport cone_filtration_invariance(const std::vector<MatQ>& cone, int trials, std::uint64_t seed) {
  if (cone.empty()) throw InputError("empty cone");
  for (auto& a : cone) checked_nilpotency(a);
  for (size_t i = 0; i < cone.size(); ++i)
    for (size_t j = i + 1; j < cone.size(); ++j)
      if (!commute(cone[i], cone[j])) throw InputError("cone elements do not commute");
  std::mt19937_64 rng(seed);
  auto combo = [&](const std::vector<QI>& lam) {
    MatQ s(cone[0].r, cone[0].c);
    for (size_t i = 0; i < cone.size(); ++i) s += cone[i] * lam[i];
    return s;
  };
  ConeReport rep;
  std::vector<QI> ones(cone.size(), QI(1));
  rep.W = weight_filtration(combo(ones));
  for (int t = 0; t < trials; ++t) {
    std::vector<QI> lam;
    for (size_t i = 0; i < cone.size(); ++i) {
      long num = 1 + static_cast<long>(rng() % 50), den = 1 + static_cast<long>(rng() % 13);
      lam.push_back(QI(Q(num, den)));
    }
    ++rep.trials;
    if (weight_filtration(combo(lam)) != rep.W) {
      rep.invariant = false;
      rep.first_discrepancy = lam;
      break;
    }
  }
  return rep;
}

std::map<int, PrimitivePiece> primitive_decomposition(const FiltQ& W, const MatQ& N, int center) {
  std::string why;
  if (!verify_weight_filtration(N, W, center, &why)) throw InputError("W inconsistent with N: " + why);
  int n = N.r;
  std::map<int, PrimitivePiece> out;
  int lo = W.lo(), hi = W.hi();
  for (int l = lo; l <= hi + 1; ++l) {
    PrimitivePiece pp;
    SubQ Cl = graded_piece(W, l);
    if (l >= center) {
      int e = l - center;
      pp.P = intersect(Cl, preimage(mat_pow(N, e + 1), W.get(2 * center - l - 3)));
    } else {
      pp.P = SubQ::zero(n);
    }
    out[l] = pp;
  }
  for (auto& [l, pp] : out) {
    SubQ Cl = graded_piece(W, l);
    int total = 0;
    std::vector<VecQ> all;
    for (int j = 0; l + 2 * j <= hi + 1; ++j) {
      auto it = out.find(l + 2 * j);
      if (it == out.end()) break;
      MatQ Nj = mat_pow(N, j);
      std::vector<VecQ> vs;
      for (auto& p : it->second.P.vectors()) vs.push_back(project_along(Nj * p, Cl, W.get(l - 1)));
      SubQ piece = SubQ::span(vs, n);
      pp.lefschetz.push_back(piece);
      total += piece.dim();
      for (auto& v : piece.vectors()) all.push_back(v);
    }
    int rk = all.empty() ? 0 : rank(MatQ::from_rows(all, n));
    if (total != Cl.dim() || rk != Cl.dim())
      throw StructuralError("Lefschetz decomposition does not reassemble Gr_" + std::to_string(l));
  }
  return out;
}

InducedHS induced_on_graded(const MixedHodgeStructure& m, int l) {
  InducedHS r;
  r.l = l;
  SubQ C = graded_piece(m.W, l), Wm = m.W.get(l - 1), Wl = m.W.get(l);
  r.complement = C;
  int s = C.dim();
  auto cs = C.vectors();
  auto coords = [&](const VecQ& v) { return C.coords(project_along(v, C, Wm)); };
  PureHodgeStructure<QI> hs;
  hs.weight = l;
  hs.n = s;
  hs.conj_op = MatQ(s, s);
  for (int i = 0; i < s; ++i) {
    auto c = coords(m.conj(cs[i]));
    for (int j = 0; j < s; ++j) hs.conj_op(j, i) = c[j];
  }
  hs.F = FiltQ(Direction::Decreasing, s);
  for (int p = m.F.lo() - 1; p <= m.F.hi() + 1; ++p) {
    std::vector<VecQ> vs;
    for (auto& v : intersect(m.F.get(p), Wl).vectors()) vs.push_back(coords(v));
    hs.F.set(p, SubQ::span(vs, s));
  }
  hs.S.gram = MatQ(s, s);
  hs.S.parity = (l % 2 == 0) ? BilinearForm<QI>::Parity::Symmetric : BilinearForm<QI>::Parity::Skew;
  r.hs = hs;
  return r;
}

MHSCheck check_mhs(const MixedHodgeStructure& m) {
  MHSCheck c;
  for (int l = m.W.lo(); l <= m.W.hi(); ++l)
    if (m.conj(m.W.get(l)) != m.W.get(l)) {
      c.ok = false;
      c.failures.push_back("W_" + std::to_string(l) + " is not defined over R");
    }
  for (int l = m.W.lo(); l <= m.W.hi() + 1; ++l) {
    auto ind = induced_on_graded(m, l);
    if (ind.hs.n == 0) continue;
    try {
      decompose(ind.hs);
    } catch (const StructuralError&) {
      c.ok = false;
      c.failures.push_back("F does not induce a Hodge structure of weight " + std::to_string(l) + " on Gr_" +
                           std::to_string(l));
    }
  }
  return c;
}

PolarizedReport verify_polarized_mhs(const MixedHodgeStructure& m, const MatQ& N, int k) {
  PolarizedReport rep;
  int n = m.n;
  FiltQ Wk = shifted_weight_filtration(N, k);
  if (Wk.normalized() != m.W.normalized()) {
    rep.weight_ok = false;
    rep.notes.push_back("W is not W(N,k)");
  }
  auto mc = check_mhs(m);
  if (!mc.ok) {
    rep.mhs_ok = false;
    for (auto& f : mc.failures) rep.notes.push_back(f);
  }
  for (int p = m.F.lo() - 1; p <= m.F.hi() + 1; ++p)
    if (!m.F.get(p - 1).contains(image(N, m.F.get(p)))) {
      rep.horizontal_ok = false;
      rep.notes.push_back("N(F^" + std::to_string(p) + ") not inside F^" + std::to_string(p - 1));
    }
  if (!m.S) {
    rep.positivity_ok = false;
    rep.notes.push_back("no polarization supplied");
    return rep;
  }
  if (!rep.weight_ok || !rep.mhs_ok) return rep;
  auto prim = primitive_decomposition(m.W, N, k);
  for (auto& [l, pp] : prim) {
    if (l < k || pp.P.dim() == 0) continue;
    SubQ C = graded_piece(m.W, l), Wm = m.W.get(l - 1), Wl = m.W.get(l);
    const SubQ& P = pp.P;
    int s = P.dim();
    auto ps = P.vectors();
    auto pcoords = [&](const VecQ& v) { return P.coords(project_along(v, C, Wm)); };
    PureHodgeStructure<QI> hs;
    hs.weight = l;
    hs.n = s;
    hs.conj_op = MatQ(s, s);
    for (int i = 0; i < s; ++i) {
      auto c = pcoords(m.conj(ps[i]));
      for (int j = 0; j < s; ++j) hs.conj_op(j, i) = c[j];
    }
    hs.F = FiltQ(Direction::Decreasing, s);
    for (int p = m.F.lo() - 1; p <= m.F.hi() + 1; ++p) {
      std::vector<VecQ> vs;
      for (auto& v : intersect(m.F.get(p), Wl).vectors()) vs.push_back(project_along(v, C, Wm));
      SubQ fp = intersect(SubQ::span(vs, n), P);
      std::vector<VecQ> cs;
      for (auto& v : fp.vectors()) cs.push_back(P.coords(v));
      hs.F.set(p, SubQ::span(cs, s));
    }
    MatQ Nl = mat_pow(N, l - k);
    hs.S.gram = MatQ(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) hs.S.gram(i, j) = (*m.S)(ps[i], Nl * ps[j]);
    hs.S.parity = (l % 2 == 0) ? BilinearForm<QI>::Parity::Symmetric : BilinearForm<QI>::Parity::Skew;
    try {
      auto hr = verify_hodge_riemann(hs);
      if (!hr.relation1 || !hr.relation2) {
        rep.positivity_ok = false;
        rep.notes.push_back("S_" + std::to_string(l) + " does not polarize P_" + std::to_string(l));
        if (hr.witness && !rep.witness) rep.witness = combine(P, *hr.witness);
      }
    } catch (const StructuralError& e) {
      rep.positivity_ok = false;
      rep.notes.push_back(std::string("primitive piece: ") + e.what());
    }
  }
  return rep;
}

DeligneSplitting deligne_bigrading(const MixedHodgeStructure& m) {
  int n = m.n;
  auto mc = check_mhs(m);
  if (!mc.ok) throw StructuralError("(W,F) is not a mixed Hodge structure: " + mc.failures.front());
  DeligneSplitting ds;
  int wlo = m.W.lo(), whi = m.W.hi();
  int plo = m.F.lo() - 1, phi = m.F.hi() + 1;
  std::vector<VecQ> all;
  for (int p = plo; p <= phi; ++p)
    for (int q = plo; q <= phi; ++q) {
      int l = p + q;
      if (l < wlo || l > whi) continue;
      SubQ Wl = m.W.get(l);
      SubQ inner = intersect(m.conj(m.F.get(q)), Wl);
      for (int j = 1; q - j >= plo - 1; ++j) inner = sum(inner, intersect(m.conj(m.F.get(q - j)), m.W.get(l - j - 1)));
      SubQ ipq = intersect(intersect(m.F.get(p), Wl), inner);
      if (ipq.dim() == 0) continue;
      ds.I[{p, q}] = ipq;
      for (auto& v : ipq.vectors()) all.push_back(v);
    }
  if (static_cast<int>(all.size()) != n || rank(MatQ::from_rows(all, n)) != n)
    throw StructuralError("bigrading does not decompose H");
  for (int l = wlo; l <= whi; ++l) {
    SubQ acc = SubQ::zero(n);
    for (auto& [pq, s] : ds.I)
      if (pq.first + pq.second <= l) acc = sum(acc, s);
    if (acc != m.W.get(l)) throw StructuralError("bigrading does not reproduce W");
  }
  for (int p = plo; p <= phi; ++p) {
    SubQ acc = SubQ::zero(n);
    for (auto& [pq, s] : ds.I)
      if (pq.first >= p) acc = sum(acc, s);
    if (acc != m.F.get(p)) throw StructuralError("bigrading does not reproduce F");
  }
  return ds;
}

bool is_real_split(const MixedHodgeStructure& m, const DeligneSplitting& d) {
  for (auto& [pq, s] : d.I) {
    auto it = d.I.find({pq.second, pq.first});
    if (it == d.I.end() || m.conj(s) != it->second) return false;
  }
  return true;
}

FiltQ twist_filtration(const FiltQ& F, const MatQ& delta) {
  MatQ X = delta * QI(Q(0), Q(-1));
  MatQ g = exp_nilpotent(X);
  FiltQ out(F.direction(), F.ambient());
  for (auto& [p, s] : F.pieces()) out.set(p, image(g, s));
  return out;
}

DeligneSplitting compute_delta(const MixedHodgeStructure& m) {
  int n = m.n;
  DeligneSplitting ds = deligne_bigrading(m);
  std::vector<VecQ> cols;
  std::vector<int> w, pl, ql;
  for (auto& [pq, s] : ds.I)
    for (auto& v : s.vectors()) {
      cols.push_back(v);
      w.push_back(pq.first + pq.second);
      pl.push_back(pq.first);
      ql.push_back(pq.second);
    }
  MatQ P = MatQ::from_cols(cols, n);
  MatQ Pi = *inverse(P);
  MatQ D(n, n);
  for (int i = 0; i < n; ++i) D(i, i) = QI(w[i]);
  MatQ Y = P * D * Pi;
  MatQ Ybar = conj_matrix(m.conj_op, Y);
  int span = *std::max_element(w.begin(), w.end()) - *std::min_element(w.begin(), w.end());
  MatQ X(n, n);
  for (int deg = 1; deg <= span; ++deg) {
    MatQ g = exp_nilpotent(X);
    MatQ R = g * Y * *inverse(g) - Ybar;
    MatQ Rp = Pi * R * P;
    MatQ dX(n, n);
    bool any = false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (w[i] - w[j] == -deg && !Rp(i, j).is_zero()) {
          dX(i, j) = -Rp(i, j) / QI(deg);
          any = true;
        }
    if (any) X += P * dX * Pi;
  }
  MatQ g = exp_nilpotent(X);
  if (g * Y * *inverse(g) != Ybar) throw std::logic_error("compute_delta: splitting equation not solved");
  MatQ delta = X * QI(Q(0), Q(1, 2));
  if (conj_matrix(m.conj_op, delta) != delta) throw std::logic_error("compute_delta: delta is not real");
  MatQ dp = Pi * delta * P;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!dp(i, j).is_zero() && !(pl[i] <= pl[j] - 1 && ql[i] <= ql[j] - 1))
        throw std::logic_error("compute_delta: delta not in L^{-1,-1}");
  MixedHodgeStructure tw = m;
  tw.F = twist_filtration(m.F, delta);
  if (!is_real_split(tw, deligne_bigrading(tw)))
    throw std::logic_error("compute_delta: twisted structure is not split over R");
  ds.delta = delta;
  return ds;
}

}  // namespace hm
