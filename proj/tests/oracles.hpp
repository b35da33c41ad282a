#pragma once
// Independent reference constructions used by the unit and acceptance tests.

#include "hm/models.hpp"

#include <functional>
#include <random>

namespace oracle {

using namespace hm;

// All subspaces reachable from ker N^i ∩ im N^j under sums and intersections.
inline std::vector<SubQ> kernel_image_lattice(const MatQ& N) {
  int n = N.r;
  std::vector<SubQ> gens;
  MatQ Pi = MatQ::identity(n);
  std::vector<MatQ> P{Pi};
  for (int i = 1; i <= n; ++i) P.push_back(P.back() * N);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) gens.push_back(intersect(kernel(P[i]), image(P[j])));
  std::vector<SubQ> lat;
  auto add = [&](const SubQ& s) {
    for (auto& t : lat)
      if (t == s) return false;
    lat.push_back(s);
    return true;
  };
  for (auto& g : gens) add(g);
  bool grew = true;
  while (grew) {
    grew = false;
    size_t m = lat.size();
    for (size_t a = 0; a < m; ++a)
      for (size_t b = a + 1; b < m; ++b) {
        grew |= add(sum(lat[a], lat[b]));
        grew |= add(intersect(lat[a], lat[b]));
      }
  }
  return lat;
}

// Every increasing flag W_{-d..d} drawn from the lattice satisfying the two defining properties.
inline std::vector<FiltQ> brute_force_weight_filtrations(const MatQ& N) {
  int n = N.r;
  int d = std::max(nilpotency_index(N), 1);
  auto lat = kernel_image_lattice(N);
  std::vector<FiltQ> found;
  std::vector<SubQ> chain;  // chain[i] = W_{i-d}
  std::function<void()> rec = [&]() {
    int l = static_cast<int>(chain.size()) - d;
    if (l > d) {
      if (chain.back().dim() != n || chain.front().dim() != 0) return;
      FiltQ W(Direction::Increasing, n);
      for (int i = 0; i < static_cast<int>(chain.size()); ++i) W.set(i - d, chain[i]);
      found.push_back(W);
      return;
    }
    for (auto& s : lat) {
      if (!chain.empty() && !s.contains(chain.back())) continue;
      if (chain.size() >= 2 && !chain[chain.size() - 2].contains(image(N, s))) continue;
      if (l > 0) {
        // N^l : Gr_l -> Gr_{-l} must be an isomorphism
        auto at = [&](int k) { return k < -d ? SubQ::zero(n) : (k == l ? s : chain[k + d]); };
        SubQ top = s, topm = at(l - 1), bot = at(-l), botm = at(-l - 1);
        if (top.dim() - topm.dim() != bot.dim() - botm.dim()) continue;
        if (intersect(preimage(mat_pow(N, l), botm), top) != topm) continue;
        if (!bot.contains(image(mat_pow(N, l), top))) continue;
      }
      chain.push_back(s);
      rec();
      chain.pop_back();
    }
  };
  rec();
  return found;
}

inline std::vector<std::vector<int>> partitions(int n, int maxpart = -1) {
  if (maxpart < 0) maxpart = n;
  if (n == 0) return {{}};
  std::vector<std::vector<int>> out;
  for (int p = std::min(n, maxpart); p >= 1; --p)
    for (auto rest : partitions(n - p, p)) {
      rest.insert(rest.begin(), p);
      out.push_back(rest);
    }
  return out;
}

// random invertible rational matrix (unit lower times unit upper triangular)
inline MatQ random_unimodular(int n, std::mt19937_64& rng) {
  MatQ L = MatQ::identity(n), U = MatQ::identity(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      L(i, j) = QI(static_cast<long>(rng() % 7) - 3);
      U(j, i) = QI(static_cast<long>(rng() % 5) - 2);
    }
  return L * U;
}

inline QI random_gauss(std::mt19937_64& rng, int range = 4) {
  auto r = [&]() { return Q(static_cast<long>(rng() % (2 * range + 1)) - range, 1 + static_cast<long>(rng() % 3)); };
  return QI(r(), r());
}

struct SplitMHS {
  MixedHodgeStructure m;
  std::map<std::pair<int, int>, SubQ> I;
  MatQ P;  // columns: bigrading basis
  std::vector<std::pair<int, int>> labels;
};

// R-split MHS with standard conjugation and prescribed h^{p,q} (must be symmetric).
inline SplitMHS random_split_mhs(const std::map<std::pair<int, int>, int>& h, std::mt19937_64& rng) {
  int n = 0;
  for (auto& [pq, d] : h) n += d;
  for (;;) {
    std::vector<VecQ> cols;
    std::vector<std::pair<int, int>> lab;
    std::map<std::pair<int, int>, std::vector<VecQ>> vecs;
    for (auto& [pq, d] : h) {
      auto [p, q] = pq;
      if (p > q) continue;
      for (int k = 0; k < d; ++k) {
        VecQ v(n);
        for (auto& x : v) x = random_gauss(rng);
        if (p == q) {
          for (auto& x : v) x = QI(x.re);
          vecs[pq].push_back(v);
        } else {
          vecs[pq].push_back(v);
          VecQ w(n);
          for (int i = 0; i < n; ++i) w[i] = conj(v[i]);
          vecs[{q, p}].push_back(w);
        }
      }
    }
    for (auto& [pq, vs] : vecs)
      for (auto& v : vs) {
        cols.push_back(v);
        lab.push_back(pq);
      }
    MatQ P = MatQ::from_cols(cols, n);
    if (rank(P) != n) continue;
    SplitMHS s;
    s.P = P;
    s.labels = lab;
    s.m.n = n;
    s.m.conj_op = MatQ::identity(n);
    s.m.W = FiltQ(Direction::Increasing, n);
    s.m.F = FiltQ(Direction::Decreasing, n);
    int lo = 1 << 20, hi = -(1 << 20), plo = 1 << 20, phi = -(1 << 20);
    for (auto& [pq, vs] : vecs) {
      s.I[pq] = SubQ::span(vs, n);
      lo = std::min(lo, pq.first + pq.second);
      hi = std::max(hi, pq.first + pq.second);
      plo = std::min(plo, pq.first);
      phi = std::max(phi, pq.first);
    }
    for (int l = lo - 1; l <= hi; ++l) {
      std::vector<VecQ> acc;
      for (auto& [pq, vs] : vecs)
        if (pq.first + pq.second <= l) acc.insert(acc.end(), vs.begin(), vs.end());
      s.m.W.set(l, SubQ::span(acc, n));
    }
    for (int p = plo; p <= phi + 1; ++p) {
      std::vector<VecQ> acc;
      for (auto& [pq, vs] : vecs)
        if (pq.first >= p) acc.insert(acc.end(), vs.begin(), vs.end());
      s.m.F.set(p, SubQ::span(acc, n));
    }
    return s;
  }
}

// random real element of L^{-1,-1} for the bigrading of a split MHS
inline MatQ random_real_lm1m1(const SplitMHS& s, std::mt19937_64& rng) {
  int n = s.m.n;
  MatQ D(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (s.labels[i].first <= s.labels[j].first - 1 && s.labels[i].second <= s.labels[j].second - 1)
        D(i, j) = random_gauss(rng, 2);
  MatQ X = s.P * D * *inverse(s.P);
  // real part: (X + conj X)/2 stays in L^{-1,-1} since the bigrading is conjugation symmetric
  MatQ R = X + X.conjugate();
  R *= QI(Q(1, 2));
  return R;
}

}  // namespace oracle
