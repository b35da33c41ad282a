#pragma once

#include "hm/subspace.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>

namespace hm {

struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// working precision too low for the requested tolerance
struct PrecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// point outside the period domain (positivity fails)
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// i^e for integer e
template <class T>
T i_pow(int e) {
  e = ((e % 4) + 4) % 4;
  if constexpr (std::is_same_v<T, QI>) {
    static const QI v[4] = {QI(1), QI(Q(0), Q(1)), QI(-1), QI(Q(0), Q(-1))};
    return v[e];
  } else {
    static const int re[4] = {1, 0, -1, 0}, im[4] = {0, 1, 0, -1};
    return T(Real(re[e]), Real(im[e]));
  }
}

template <class T>
Vec<T> apply_conj(const Mat<T>& conj_op, const Vec<T>& v) {
  Vec<T> w(v.size());
  for (size_t i = 0; i < v.size(); ++i) w[i] = Field<T>::conj(v[i]);
  return conj_op * w;
}

template <class T>
Mat<T> conj_matrix(const Mat<T>& conj_op, const Mat<T>& x) {
  // conj(X) v = conj(X conj(v)), so conj(X) = C Xbar C^{-1}
  auto ci = inverse(conj_op);
  if (!ci) throw InputError("conjugation operator not invertible");
  return conj_op * x.conjugate() * *ci;
}

template <class T>
struct PureHodgeStructure {
  int weight = 0;
  int n = 0;
  Mat<T> conj_op;          // conj(v) = conj_op * vbar
  Filtration<T> F;         // decreasing
  BilinearForm<T> S;

  Vec<T> conj(const Vec<T>& v) const { return apply_conj(conj_op, v); }
  Subspace<T> conj(const Subspace<T>& s) const { return s.conjugate(conj_op); }
};

template <class T>
using HodgeDecomposition = std::map<std::pair<int, int>, Subspace<T>>;

template <class T>
HodgeDecomposition<T> decompose(const PureHodgeStructure<T>& hs) {
  HodgeDecomposition<T> d;
  std::vector<Vec<T>> all;
  int k = hs.weight;
  for (int p = std::min(0, k); p <= std::max(0, k); ++p) {
    int q = k - p;
    auto hpq = intersect(hs.F.get(p), hs.conj(hs.F.get(q)));
    d[{p, q}] = hpq;
    for (auto& v : hpq.vectors()) all.push_back(v);
  }
  // F^p and conj F^{k-p+1} must be opposed; otherwise the pieces do not fill H
  int total = 0;
  for (auto& [pq, s] : d) total += s.dim();
  if (total != hs.n || rank(Mat<T>::from_rows(all, hs.n)) != hs.n)
    throw StructuralError("filtration is not opposed to its conjugate; Hodge pieces do not span H");
  return d;
}

template <class T>
struct HRReport {
  bool relation1 = true;
  bool relation2 = true;
  std::vector<std::string> notes;
  std::optional<Vec<T>> witness;           // vector violating positivity or orthogonality
  std::optional<std::pair<int, int>> witness_type;
};

// Hermitian Gram matrix positivity through an LDL* elimination; returns the index of the
// first non-positive pivot and the corresponding coefficient vector.
template <class T>
std::optional<Vec<T>> hermitian_nonpositive_witness(const Mat<T>& m, double float_tol = 1e-12) {
  int n = m.r;
  Mat<T> a = m;
  Mat<T> L = Mat<T>::identity(n);
  for (int k = 0; k < n; ++k) {
    T d = a(k, k);
    bool nonpos;
    if constexpr (std::is_same_v<T, QI>) {
      nonpos = sgn(d.re) <= 0;
    } else {
      nonpos = static_cast<double>(d.re) <= float_tol * std::max(1.0, max_mag(m));
    }
    if (nonpos) {
      // v = (L^*)^{-1} e_k  so that v^* M v = d_k
      Mat<T> Ls = L.transpose().conjugate();
      Vec<T> e(n, T(0));
      e[k] = T(1);
      auto v = solve(Ls, e);
      return *v;
    }
    for (int i = k + 1; i < n; ++i) {
      T f = a(i, k) / d;
      L(i, k) = f;
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return std::nullopt;
}

template <class T>
HRReport<T> verify_hodge_riemann(const PureHodgeStructure<T>& hs) {
  HRReport<T> rep;
  auto d = decompose(hs);
  int k = hs.weight;
  for (auto& [pq, a] : d)
    for (auto& [pq2, b] : d) {
      if (pq2.first == k - pq.first) continue;
      for (auto& u : a.vectors())
        for (auto& v : b.vectors()) {
          if (!Field<T>::is_zero(hs.S(u, v)) &&
              (Field<T>::exact || Field<T>::mag(hs.S(u, v)) > 1e-20)) {
            rep.relation1 = false;
            if (!rep.witness) {
              rep.witness = u;
              rep.witness_type = pq;
            }
          }
        }
    }
  for (auto& [pq, a] : d) {
    if (a.dim() == 0) continue;
    T ph = i_pow<T>(pq.first - pq.second);
    auto vs = a.vectors();
    Mat<T> g(a.dim(), a.dim());
    for (int i = 0; i < a.dim(); ++i)
      for (int j = 0; j < a.dim(); ++j) g(i, j) = ph * hs.S(vs[i], hs.conj(vs[j]));
    auto w = hermitian_nonpositive_witness(g);
    if (w) {
      rep.relation2 = false;
      Vec<T> phi(hs.n, T(0));
      for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < hs.n; ++j) phi[j] += Field<T>::conj((*w)[i]) * vs[i][j];
      rep.notes.push_back("positivity fails on H^{" + std::to_string(pq.first) + "," +
                          std::to_string(pq.second) + "}");
      if (!rep.witness || rep.relation1) {
        rep.witness = phi;
        rep.witness_type = pq;
      }
    }
  }
  return rep;
}

template <class T>
Mat<T> weil_operator(const PureHodgeStructure<T>& hs) {
  auto d = decompose(hs);
  std::vector<Vec<T>> cols;
  std::vector<T> eig;
  for (auto& [pq, s] : d)
    for (auto& v : s.vectors()) {
      cols.push_back(v);
      eig.push_back(i_pow<T>(pq.first - pq.second));
    }
  Mat<T> P = Mat<T>::from_cols(cols, hs.n);
  Mat<T> D(hs.n, hs.n);
  for (int i = 0; i < hs.n; ++i) D(i, i) = eig[i];
  return P * D * *inverse(P);
}

template <class T>
T hodge_inner_product(const PureHodgeStructure<T>& hs, int p, int q, const Vec<T>& v, const Vec<T>& w) {
  if (!(p < q)) throw InputError("hodge_inner_product requires p < q");
  auto Fp = hs.F.get(p), Fq = hs.F.get(q);
  if (!Fp.contains(v) || !Fp.contains(w)) throw InputError("vectors must lie in F^p");
  // target: F^p intersected with conj F^{k-q+1}; the S-orthogonality to F^q cuts it out
  auto target = intersect(Fp, hs.conj(hs.F.get(hs.weight - q + 1)));
  if (target.dim() + Fq.dim() != Fp.dim()) throw DegeneracyError("S restricted to F^p/F^q is degenerate");
  Mat<T> C = weil_operator(hs);
  Vec<T> cv = C * v;
  Vec<T> pv = project_along(cv, target, Fq);
  return hs.S(pv, hs.conj(w));
}

}  // namespace hm
