#pragma once

#include "hm/matrix.hpp"

#include <map>
#include <string>

namespace hm {

// Subspace of T^n stored as a reduced row echelon basis (rows).
template <class T>
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(int n) : n_(n), basis_(0, n) {}

  static Subspace zero(int n) { return Subspace(n); }
  static Subspace full(int n) { return span(rows_of(Mat<T>::identity(n)), n); }

  static Subspace span(const std::vector<Vec<T>>& vecs, int n) {
    Subspace s(n);
    if (vecs.empty()) return s;
    Mat<T> m = Mat<T>::from_rows(vecs, n);
    auto piv = rref(m);
    s.basis_ = Mat<T>(static_cast<int>(piv.size()), n);
    for (int i = 0; i < s.basis_.r; ++i)
      for (int j = 0; j < n; ++j) s.basis_(i, j) = m(i, j);
    s.pivots_ = piv;
    return s;
  }

  static std::vector<Vec<T>> rows_of(const Mat<T>& m) {
    std::vector<Vec<T>> v;
    for (int i = 0; i < m.r; ++i) v.push_back(m.row(i));
    return v;
  }

  int ambient() const { return n_; }
  int dim() const { return basis_.r; }
  const Mat<T>& basis() const { return basis_; }
  std::vector<Vec<T>> vectors() const { return rows_of(basis_); }
  const std::vector<int>& pivots() const { return pivots_; }

  bool contains(const Vec<T>& v) const {
    if (static_cast<int>(v.size()) != n_) throw std::invalid_argument("contains: dimension mismatch");
    auto vs = vectors();
    vs.push_back(v);
    return rank(Mat<T>::from_rows(vs, n_)) == dim();
  }

  bool contains(const Subspace& o) const {
    check(o);
    if (o.dim() > dim()) return false;
    return sum(*this, o).dim() == dim();
  }

  bool operator==(const Subspace& o) const {
    if (n_ != o.n_ || dim() != o.dim()) return false;
    if (Field<T>::exact) return basis_ == o.basis_;
    return contains(o);
  }
  bool operator!=(const Subspace& o) const { return !(*this == o); }

  void check(const Subspace& o) const {
    if (n_ != o.n_) throw std::invalid_argument("subspace: ambient dimension mismatch");
  }

  friend Subspace sum(const Subspace& a, const Subspace& b) {
    a.check(b);
    auto v = a.vectors();
    for (auto& w : b.vectors()) v.push_back(w);
    return span(v, a.n_);
  }

  friend Subspace intersect(const Subspace& a, const Subspace& b) {
    a.check(b);
    int n = a.n_;
    if (a.dim() == 0 || b.dim() == 0) return Subspace(n);
    // solve x A - y B = 0 over row combinations
    Mat<T> m(n, a.dim() + b.dim());
    for (int i = 0; i < a.dim(); ++i)
      for (int j = 0; j < n; ++j) m(j, i) = a.basis_(i, j);
    for (int i = 0; i < b.dim(); ++i)
      for (int j = 0; j < n; ++j) m(j, a.dim() + i) = -b.basis_(i, j);
    std::vector<Vec<T>> out;
    for (auto& k : null_space(m)) {
      Vec<T> v(n, T(0));
      for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < n; ++j) v[j] += k[i] * a.basis_(i, j);
      out.push_back(v);
    }
    return span(out, n);
  }

  // coordinates of v in this basis (v must lie in the subspace)
  Vec<T> coords(const Vec<T>& v) const {
    auto x = solve(basis_.transpose(), v);
    if (!x) throw std::invalid_argument("coords: vector not in subspace");
    return *x;
  }

  Subspace conjugate(const Mat<T>& conj_op) const {
    std::vector<Vec<T>> out;
    for (auto& v : vectors()) {
      Vec<T> w(v.size());
      for (size_t i = 0; i < v.size(); ++i) w[i] = Field<T>::conj(v[i]);
      out.push_back(conj_op * w);
    }
    return span(out, n_);
  }

 private:
  int n_ = 0;
  Mat<T> basis_;
  std::vector<int> pivots_;
};

template <class T>
Subspace<T> image(const Mat<T>& m, const Subspace<T>& s) {
  if (m.c != s.ambient()) throw std::invalid_argument("image: dimension mismatch");
  std::vector<Vec<T>> out;
  for (auto& v : s.vectors()) out.push_back(m * v);
  return Subspace<T>::span(out, m.r);
}

template <class T>
Subspace<T> image(const Mat<T>& m) { return image(m, Subspace<T>::full(m.c)); }

template <class T>
Subspace<T> kernel(const Mat<T>& m) { return Subspace<T>::span(null_space(m), m.c); }

// {v : m v in s}
template <class T>
Subspace<T> preimage(const Mat<T>& m, const Subspace<T>& s) {
  if (m.r != s.ambient()) throw std::invalid_argument("preimage: dimension mismatch");
  // v in preimage iff m v is orthogonal to an annihilator of s; use [m | -basis^T] kernel
  int k = s.dim();
  Mat<T> big(m.r, m.c + k);
  for (int i = 0; i < m.r; ++i) {
    for (int j = 0; j < m.c; ++j) big(i, j) = m(i, j);
    for (int j = 0; j < k; ++j) big(i, m.c + j) = -s.basis()(j, i);
  }
  std::vector<Vec<T>> out;
  for (auto& x : null_space(big)) out.push_back(Vec<T>(x.begin(), x.begin() + m.c));
  return Subspace<T>::span(out, m.c);
}

// Complement of a inside b, orthogonal for the standard Hermitian coordinate pairing.
template <class T>
Subspace<T> complement_in(const Subspace<T>& a, const Subspace<T>& b) {
  if (!b.contains(a)) throw std::invalid_argument("complement_in: not a subspace");
  int n = b.ambient();
  if (a.dim() == 0) return b;
  // x in b with <x, a_i> = 0: x = sum c_k b_k, sum_k c_k <b_k, a_i> = 0
  Mat<T> m(a.dim(), b.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int k = 0; k < b.dim(); ++k) {
      T s(0);
      for (int j = 0; j < n; ++j) s += b.basis()(k, j) * Field<T>::conj(a.basis()(i, j));
      m(i, k) = s;
    }
  std::vector<Vec<T>> out;
  for (auto& cvec : null_space(m)) {
    Vec<T> v(n, T(0));
    for (int k = 0; k < b.dim(); ++k)
      for (int j = 0; j < n; ++j) v[j] += cvec[k] * b.basis()(k, j);
    out.push_back(v);
  }
  return Subspace<T>::span(out, n);
}

// Projection of v onto `target` along `other`, where target + other is direct and contains v.
template <class T>
Vec<T> project_along(const Vec<T>& v, const Subspace<T>& target, const Subspace<T>& other) {
  int n = target.ambient();
  Mat<T> m(n, target.dim() + other.dim());
  for (int i = 0; i < target.dim(); ++i)
    for (int j = 0; j < n; ++j) m(j, i) = target.basis()(i, j);
  for (int i = 0; i < other.dim(); ++i)
    for (int j = 0; j < n; ++j) m(j, target.dim() + i) = other.basis()(i, j);
  auto x = solve(m, v);
  if (!x) throw std::invalid_argument("project_along: vector outside the direct sum");
  Vec<T> out(n, T(0));
  for (int i = 0; i < target.dim(); ++i)
    for (int j = 0; j < n; ++j) out[j] += (*x)[i] * target.basis()(i, j);
  return out;
}

enum class Direction { Increasing, Decreasing };

// Filtration with explicitly stored pieces on [lo, hi]; outside the range it is {0} or H.
template <class T>
class Filtration {
 public:
  Filtration() = default;
  Filtration(Direction d, int n) : dir_(d), n_(n) {}

  Direction direction() const { return dir_; }
  int ambient() const { return n_; }

  void set(int l, const Subspace<T>& s) {
    if (s.ambient() != n_) throw std::invalid_argument("filtration: ambient mismatch");
    pieces_[l] = s;
  }

  Subspace<T> get(int l) const {
    if (pieces_.empty()) return Subspace<T>::full(n_);
    int lo = pieces_.begin()->first, hi = pieces_.rbegin()->first;
    if (dir_ == Direction::Increasing) {
      if (l < lo) return Subspace<T>::zero(n_);
      if (l > hi) return Subspace<T>::full(n_);
    } else {
      if (l < lo) return Subspace<T>::full(n_);
      if (l > hi) return Subspace<T>::zero(n_);
    }
    auto it = pieces_.find(l);
    if (it != pieces_.end()) return it->second;
    // fill gaps by the nearest lower-index stored piece (increasing) / higher (decreasing)
    if (dir_ == Direction::Increasing) {
      auto jt = pieces_.upper_bound(l);
      --jt;
      return jt->second;
    }
    auto jt = pieces_.lower_bound(l);
    return jt->second;
  }

  int lo() const { return pieces_.empty() ? 0 : pieces_.begin()->first; }
  int hi() const { return pieces_.empty() ? 0 : pieces_.rbegin()->first; }
  const std::map<int, Subspace<T>>& pieces() const { return pieces_; }

  // nested, and the stored range reaches {0} and H at its ends
  bool valid(std::string* why = nullptr) const {
    for (int l = lo(); l < hi(); ++l) {
      auto a = get(l), b = get(l + 1);
      bool ok = dir_ == Direction::Increasing ? b.contains(a) : a.contains(b);
      if (!ok) {
        if (why) *why = "not nested at index " + std::to_string(l);
        return false;
      }
    }
    return true;
  }

  // indices where the dimension changes (increasing: dim W_l > dim W_{l-1})
  std::vector<int> jumps() const {
    std::vector<int> j;
    for (int l = lo() - 1; l <= hi() + 1; ++l) {
      int d0 = get(l).dim(), d1 = dir_ == Direction::Increasing ? get(l - 1).dim() : get(l + 1).dim();
      if (d0 != d1) j.push_back(l);
    }
    return j;
  }

  Filtration shifted(int k) const {
    Filtration f(dir_, n_);
    for (auto& [l, s] : pieces_) f.set(l - k, s);
    return f;
  }

  bool operator==(const Filtration& o) const {
    if (dir_ != o.dir_ || n_ != o.n_) return false;
    int a = std::min(lo(), o.lo()) - 1, b = std::max(hi(), o.hi()) + 1;
    for (int l = a; l <= b; ++l)
      if (get(l) != o.get(l)) return false;
    return true;
  }
  bool operator!=(const Filtration& o) const { return !(*this == o); }

  // drop redundant entries so the stored range is tight
  Filtration normalized() const {
    Filtration f(dir_, n_);
    if (pieces_.empty()) return f;
    int a = lo(), b = hi();
    if (dir_ == Direction::Increasing) {
      while (a < b && get(a).dim() == 0 && get(a + 1).dim() == 0) ++a;
      while (b > a && get(b - 1).dim() == n_) --b;
    } else {
      while (a < b && get(a + 1).dim() == n_) ++a;
      while (b > a && get(b).dim() == 0 && get(b - 1).dim() == 0) --b;
    }
    for (int l = a; l <= b; ++l) f.set(l, get(l));
    return f;
  }

  Filtration conjugate(const Mat<T>& conj_op) const {
    Filtration f(dir_, n_);
    for (auto& [l, s] : pieces_) f.set(l, s.conjugate(conj_op));
    return f;
  }

 private:
  Direction dir_ = Direction::Increasing;
  int n_ = 0;
  std::map<int, Subspace<T>> pieces_;
};

// Gr_l: complement of W_{l-1} in W_l (increasing) or of F^{l+1} in F^l (decreasing)
template <class T>
Subspace<T> graded_piece(const Filtration<T>& f, int l) {
  if (f.direction() == Direction::Increasing) return complement_in(f.get(l - 1), f.get(l));
  return complement_in(f.get(l + 1), f.get(l));
}

template <class T>
struct BilinearForm {
  enum class Parity { Symmetric, Skew };
  Mat<T> gram;
  Parity parity = Parity::Skew;

  T operator()(const Vec<T>& v, const Vec<T>& w) const {
    T s(0);
    for (int i = 0; i < gram.r; ++i) {
      if (Field<T>::exact && Field<T>::is_zero(v[i])) continue;
      for (int j = 0; j < gram.c; ++j) s += v[i] * gram(i, j) * w[j];
    }
    return s;
  }

  bool parity_ok() const {
    Mat<T> t = gram.transpose();
    if (parity == Parity::Symmetric) return t == gram;
    Mat<T> neg = gram;
    neg *= T(-1);
    return t == neg;
  }
  bool nondegenerate() const { return rank(gram) == gram.r; }
  int dim() const { return gram.r; }
};

}  // namespace hm
