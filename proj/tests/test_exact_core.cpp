#include "doctest.h"
#include "hm/models.hpp"
#include "oracles.hpp"

using namespace hm;

static VecQ v2(long a, long b) { return {QI(a), QI(b)}; }

TEST_CASE("subspace algebra on small examples") {
  auto e1 = SubQ::span({v2(1, 0)}, 2), e2 = SubQ::span({v2(0, 1)}, 2);
  CHECK(sum(e1, e2) == SubQ::full(2));
  CHECK(kernel(jordan_block(2)) == e1);
  auto a = SubQ::span({v2(1, 1)}, 2), b = SubQ::span({v2(1, -1)}, 2);
  CHECK(intersect(a, b).dim() == 0);
  CHECK_THROWS(sum(e1, SubQ::full(3)));
}

TEST_CASE("dimension formula and canonical form on random inputs") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 40; ++t) {
    int n = 2 + static_cast<int>(rng() % 4);
    auto rnd = [&](int k) {
      std::vector<VecQ> vs;
      for (int i = 0; i < k; ++i) {
        VecQ v(n);
        for (auto& x : v) x = oracle::random_gauss(rng, 2);
        vs.push_back(v);
      }
      return SubQ::span(vs, n);
    };
    auto A = rnd(static_cast<int>(rng() % (n + 1))), B = rnd(static_cast<int>(rng() % (n + 1)));
    CHECK(sum(A, B).dim() + intersect(A, B).dim() == A.dim() + B.dim());
    CHECK(SubQ::span(A.vectors(), n) == A);  // idempotent canonicalization
    CHECK(sum(A, B) == sum(B, A));
  }
}

TEST_CASE("graded pieces") {
  FiltQ W(Direction::Increasing, 2);
  W.set(-1, SubQ::zero(2));
  W.set(0, SubQ::span({v2(1, 0)}, 2));
  W.set(1, SubQ::full(2));
  CHECK(graded_piece(W, 0).dim() == 1);
  CHECK(graded_piece(W, 1).dim() == 1);

  auto W3 = weight_filtration(jordan_block(3));
  std::vector<int> dims;
  int total = 0;
  for (int l = -2; l <= 2; ++l) {
    dims.push_back(graded_piece(W3, l).dim());
    total += dims.back();
  }
  CHECK(dims == std::vector<int>{1, 0, 1, 0, 1});
  CHECK(total == 3);

  FiltQ c(Direction::Increasing, 3);
  c.set(0, SubQ::full(3));
  int nonzero = 0;
  for (int l = -3; l <= 3; ++l) nonzero += graded_piece(c, l).dim() > 0;
  CHECK(nonzero == 1);
}

TEST_CASE("bilinear form parity") {
  BilinearForm<QI> S;
  S.gram = MatQ::from_rows({{QI(0), QI(-1)}, {QI(1), QI(0)}});
  S.parity = BilinearForm<QI>::Parity::Skew;
  CHECK(S.parity_ok());
  S.parity = BilinearForm<QI>::Parity::Symmetric;
  CHECK_FALSE(S.parity_ok());
  CHECK(S.nondegenerate());
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/6") == Q(1, 2));
  CHECK(parse_rational("-0.25") == Q(-1, 4));
  CHECK(parse_rational("1e-2") == Q(1, 100));
}
