#pragma once

#include "hm/scalar.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

namespace hm {

template <class T>
using Vec = std::vector<T>;

template <class T>
struct Mat {
  int r = 0, c = 0;
  std::vector<T> a;

  Mat() = default;
  Mat(int rows, int cols) : r(rows), c(cols), a(static_cast<size_t>(rows) * cols, T(0)) {}

  T& operator()(int i, int j) { return a[static_cast<size_t>(i) * c + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<size_t>(i) * c + j]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  static Mat from_rows(const std::vector<Vec<T>>& rows, int cols = -1) {
    int nc = cols >= 0 ? cols : (rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    Mat m(static_cast<int>(rows.size()), nc);
    for (int i = 0; i < m.r; ++i)
      for (int j = 0; j < nc; ++j) m(i, j) = rows[i][j];
    return m;
  }

  static Mat from_cols(const std::vector<Vec<T>>& cols, int rows = -1) {
    int nr = rows >= 0 ? rows : (cols.empty() ? 0 : static_cast<int>(cols[0].size()));
    Mat m(nr, static_cast<int>(cols.size()));
    for (int j = 0; j < m.c; ++j)
      for (int i = 0; i < nr; ++i) m(i, j) = cols[j][i];
    return m;
  }

  Vec<T> row(int i) const { return Vec<T>(a.begin() + static_cast<long>(i) * c, a.begin() + static_cast<long>(i + 1) * c); }
  Vec<T> col(int j) const {
    Vec<T> v(r);
    for (int i = 0; i < r; ++i) v[i] = (*this)(i, j);
    return v;
  }

  Mat transpose() const {
    Mat t(c, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Mat conjugate() const {
    Mat t(r, c);
    for (size_t k = 0; k < a.size(); ++k) t.a[k] = Field<T>::conj(a[k]);
    return t;
  }

  bool is_zero() const {
    for (auto& x : a)
      if (!Field<T>::is_zero(x)) return false;
    return true;
  }

  Mat& operator+=(const Mat& o) {
    for (size_t k = 0; k < a.size(); ++k) a[k] += o.a[k];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    for (size_t k = 0; k < a.size(); ++k) a[k] -= o.a[k];
    return *this;
  }
  Mat& operator*=(const T& s) {
    for (auto& x : a) x *= s;
    return *this;
  }
};

template <class T>
Mat<T> operator+(Mat<T> x, const Mat<T>& y) { return x += y; }
template <class T>
Mat<T> operator-(Mat<T> x, const Mat<T>& y) { return x -= y; }
template <class T>
Mat<T> operator*(Mat<T> x, const T& s) { return x *= s; }
template <class T>
Mat<T> operator*(const T& s, Mat<T> x) { return x *= s; }

template <class T>
Mat<T> operator*(const Mat<T>& x, const Mat<T>& y) {
  if (x.c != y.r) throw std::invalid_argument("matrix product: dimension mismatch");
  Mat<T> z(x.r, y.c);
  for (int i = 0; i < x.r; ++i)
    for (int k = 0; k < x.c; ++k) {
      const T& xik = x(i, k);
      if (Field<T>::exact && Field<T>::is_zero(xik)) continue;
      for (int j = 0; j < y.c; ++j) z(i, j) += xik * y(k, j);
    }
  return z;
}

template <class T>
Vec<T> operator*(const Mat<T>& x, const Vec<T>& v) {
  if (x.c != static_cast<int>(v.size())) throw std::invalid_argument("matrix-vector: dimension mismatch");
  Vec<T> z(x.r, T(0));
  for (int i = 0; i < x.r; ++i)
    for (int k = 0; k < x.c; ++k) z[i] += x(i, k) * v[k];
  return z;
}

template <class T>
bool operator==(const Mat<T>& x, const Mat<T>& y) {
  if (x.r != y.r || x.c != y.c) return false;
  return (x - y).is_zero();
}

template <class T>
Mat<T> commutator(const Mat<T>& x, const Mat<T>& y) { return x * y - y * x; }

template <class T>
Mat<T> mat_pow(const Mat<T>& x, int k) {
  Mat<T> r = Mat<T>::identity(x.r);
  for (int i = 0; i < k; ++i) r = r * x;
  return r;
}

template <class T>
double max_mag(const Mat<T>& m) {
  double s = 0;
  for (auto& x : m.a) s = std::max(s, Field<T>::mag(x));
  return s;
}

template <class T>
bool vec_is_zero(const Vec<T>& v) {
  for (auto& x : v)
    if (!Field<T>::is_zero(x)) return false;
  return true;
}

// Reduced row echelon form in place; returns pivot columns (left to right).
// Float matrices use partial pivoting with a threshold relative to the entry scale.
template <class T>
std::vector<int> rref(Mat<T>& m) {
  std::vector<int> piv;
  double thr = 0;
  if (!Field<T>::exact) thr = float_zero_tol() * std::max(1.0, max_mag(m));
  int row = 0;
  for (int col = 0; col < m.c && row < m.r; ++col) {
    int best = -1;
    if (Field<T>::exact) {
      for (int i = row; i < m.r; ++i)
        if (!Field<T>::is_zero(m(i, col))) {
          best = i;
          break;
        }
    } else {
      double bm = thr;
      for (int i = row; i < m.r; ++i) {
        double v = Field<T>::mag(m(i, col));
        if (v > bm) {
          bm = v;
          best = i;
        }
      }
    }
    if (best < 0) {
      if (!Field<T>::exact)
        for (int i = row; i < m.r; ++i) m(i, col) = T(0);
      continue;
    }
    if (best != row)
      for (int j = 0; j < m.c; ++j) std::swap(m(best, j), m(row, j));
    T inv = T(1) / m(row, col);
    for (int j = col; j < m.c; ++j) m(row, j) *= inv;
    m(row, col) = T(1);
    for (int i = 0; i < m.r; ++i) {
      if (i == row) continue;
      T f = m(i, col);
      if (Field<T>::exact && Field<T>::is_zero(f)) continue;
      for (int j = col; j < m.c; ++j) m(i, j) -= f * m(row, j);
      m(i, col) = T(0);
    }
    piv.push_back(col);
    ++row;
  }
  return piv;
}

template <class T>
int rank(Mat<T> m) { return static_cast<int>(rref(m).size()); }

// Basis of the null space {x : m x = 0}, returned as vectors.
template <class T>
std::vector<Vec<T>> null_space(Mat<T> m) {
  auto piv = rref(m);
  std::vector<bool> is_piv(m.c, false);
  for (int p : piv) is_piv[p] = true;
  std::vector<Vec<T>> out;
  for (int f = 0; f < m.c; ++f) {
    if (is_piv[f]) continue;
    Vec<T> v(m.c, T(0));
    v[f] = T(1);
    for (size_t k = 0; k < piv.size(); ++k) v[piv[k]] = -m(static_cast<int>(k), f);
    out.push_back(v);
  }
  return out;
}

// Solve m x = b; nullopt if inconsistent.
template <class T>
std::optional<Vec<T>> solve(const Mat<T>& m, const Vec<T>& b) {
  Mat<T> aug(m.r, m.c + 1);
  for (int i = 0; i < m.r; ++i) {
    for (int j = 0; j < m.c; ++j) aug(i, j) = m(i, j);
    aug(i, m.c) = b[i];
  }
  auto piv = rref(aug);
  if (!piv.empty() && piv.back() == m.c) return std::nullopt;
  Vec<T> x(m.c, T(0));
  for (size_t k = 0; k < piv.size(); ++k) x[piv[k]] = aug(static_cast<int>(k), m.c);
  return x;
}

template <class T>
std::optional<Mat<T>> inverse(const Mat<T>& m) {
  if (m.r != m.c) return std::nullopt;
  int n = m.r;
  Mat<T> aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = T(1);
  }
  auto piv = rref(aug);
  if (static_cast<int>(piv.size()) < n || piv[n - 1] != n - 1) return std::nullopt;
  Mat<T> inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

template <class T>
T determinant(Mat<T> m) {
  int n = m.r;
  T det(1);
  for (int col = 0; col < n; ++col) {
    int best = -1;
    double bm = -1;
    for (int i = col; i < n; ++i) {
      if (Field<T>::exact) {
        if (!Field<T>::is_zero(m(i, col))) {
          best = i;
          break;
        }
      } else if (Field<T>::mag(m(i, col)) > bm) {
        bm = Field<T>::mag(m(i, col));
        best = i;
      }
    }
    if (best < 0 || Field<T>::is_zero(m(best, col))) return T(0);
    if (best != col) {
      for (int j = 0; j < n; ++j) std::swap(m(best, j), m(col, j));
      det = -det;
    }
    det *= m(col, col);
    for (int i = col + 1; i < n; ++i) {
      T f = m(i, col) / m(col, col);
      for (int j = col; j < n; ++j) m(i, j) -= f * m(col, j);
    }
  }
  return det;
}

// Index d with x^d = 0, or -1 if x is not nilpotent.
template <class T>
int nilpotency_index(const Mat<T>& x) {
  Mat<T> p = Mat<T>::identity(x.r);
  for (int d = 0; d <= x.r; ++d) {
    if (p.is_zero()) return d;
    p = p * x;
  }
  return p.is_zero() ? x.r + 1 : -1;
}

// exp of a nilpotent matrix (terminating series)
template <class T>
Mat<T> exp_nilpotent(const Mat<T>& x) {
  Mat<T> r = Mat<T>::identity(x.r), term = Mat<T>::identity(x.r);
  for (int k = 1; k <= x.r; ++k) {
    term = term * x;
    term *= T(1) / T(k);
    if (Field<T>::exact && term.is_zero()) break;
    r += term;
  }
  return r;
}

// log of a unipotent matrix (terminating series)
template <class T>
Mat<T> log_unipotent(const Mat<T>& t) {
  Mat<T> n = t - Mat<T>::identity(t.r);
  Mat<T> r(t.r, t.r), p = Mat<T>::identity(t.r);
  for (int k = 1; k <= t.r; ++k) {
    p = p * n;
    if (Field<T>::exact && p.is_zero()) break;
    Mat<T> term = p;
    term *= T(k % 2 ? 1 : -1) / T(k);
    r += term;
  }
  return r;
}

Mat<Cx> to_cx(const Mat<QI>& m);
// scaling and squaring Taylor exponential at the working precision
Mat<Cx> mat_exp(const Mat<Cx>& x);

}  // namespace hm
