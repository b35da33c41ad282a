#pragma once

#include "hm/mhs.hpp"

namespace hm {

// J e_{i+1} = e_i
inline MatQ jordan_block(int n) {
  MatQ j(n, n);
  for (int i = 0; i + 1 < n; ++i) j(i, i + 1) = QI(1);
  return j;
}

inline MatQ block_diag(const std::vector<MatQ>& blocks) {
  int n = 0;
  for (auto& b : blocks) n += b.r;
  MatQ m(n, n);
  int o = 0;
  for (auto& b : blocks) {
    for (int i = 0; i < b.r; ++i)
      for (int j = 0; j < b.c; ++j) m(o + i, o + j) = b(i, j);
    o += b.r;
  }
  return m;
}

inline MatQ kron(const MatQ& a, const MatQ& b) {
  MatQ m(a.r * b.r, a.c * b.c);
  for (int i = 0; i < a.r; ++i)
    for (int j = 0; j < a.c; ++j)
      for (int k = 0; k < b.r; ++k)
        for (int l = 0; l < b.c; ++l) m(i * b.r + k, j * b.c + l) = a(i, j) * b(k, l);
  return m;
}

inline MatQ nilpotent_from_partition(const std::vector<int>& parts) {
  std::vector<MatQ> bl;
  for (int p : parts) bl.push_back(jordan_block(p));
  return block_diag(bl);
}

// The weight-1 limit structure of the elliptic family: N e2 = e1, F^1 = span(e2), S(e1,e2) = -1.
inline MixedHodgeStructure elliptic_limit_mhs() {
  MixedHodgeStructure m;
  m.n = 2;
  m.conj_op = MatQ::identity(2);
  MatQ N = jordan_block(2);
  m.W = shifted_weight_filtration(N, 1);
  m.F = FiltQ(Direction::Decreasing, 2);
  m.F.set(0, SubQ::full(2));
  m.F.set(1, SubQ::span({{QI(0), QI(1)}}, 2));
  BilinearForm<QI> S;
  S.gram = MatQ::from_rows({{QI(0), QI(-1)}, {QI(1), QI(0)}});
  S.parity = BilinearForm<QI>::Parity::Skew;
  m.S = S;
  m.nilpotents = {N};
  return m;
}

}  // namespace hm
