#pragma once

#include "hm/scalar.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace hm {

// Truncated Taylor data f(z + w) = sum c(a,b) w^a wbar^b, valid for a <= A, b <= B.
// w and wbar are treated as independent variables, so c(1,1) is d dbar f.
struct Jet {
  int A = 0, B = 0;
  std::vector<Cx> c;

  Jet() : c(1, Cx(0)) {}
  Jet(int a, int b) : A(a), B(b), c(static_cast<size_t>(a + 1) * (b + 1), Cx(0)) {}
  static Jet constant(const Cx& v, int a, int b) {
    Jet j(a, b);
    j(0, 0) = v;
    return j;
  }

  Cx& operator()(int a, int b) { return c[static_cast<size_t>(a) * (B + 1) + b]; }
  const Cx& operator()(int a, int b) const { return c[static_cast<size_t>(a) * (B + 1) + b]; }
  const Cx& value() const { return c[0]; }

  Jet truncated(int a, int b) const {
    a = std::min(a, A);
    b = std::min(b, B);
    Jet j(a, b);
    for (int i = 0; i <= a; ++i)
      for (int k = 0; k <= b; ++k) j(i, k) = (*this)(i, k);
    return j;
  }
  // d/dw: valid orders drop by one in w
  Jet dz() const {
    if (A == 0) throw std::logic_error("jet has no w-derivative data left");
    Jet j(A - 1, B);
    for (int i = 0; i < A; ++i)
      for (int k = 0; k <= B; ++k) j(i, k) = (*this)(i + 1, k) * Real(i + 1);
    return j;
  }
  Jet dzb() const {
    if (B == 0) throw std::logic_error("jet has no wbar-derivative data left");
    Jet j(A, B - 1);
    for (int i = 0; i <= A; ++i)
      for (int k = 0; k < B; ++k) j(i, k) = (*this)(i, k + 1) * Real(k + 1);
    return j;
  }
  // d dbar at the base point
  Cx ddbar() const { return (*this)(1, 1); }
};

inline Jet operator+(const Jet& x, const Jet& y) {
  Jet r(std::min(x.A, y.A), std::min(x.B, y.B));
  for (int i = 0; i <= r.A; ++i)
    for (int k = 0; k <= r.B; ++k) r(i, k) = x(i, k) + y(i, k);
  return r;
}
inline Jet operator-(const Jet& x, const Jet& y) {
  Jet r(std::min(x.A, y.A), std::min(x.B, y.B));
  for (int i = 0; i <= r.A; ++i)
    for (int k = 0; k <= r.B; ++k) r(i, k) = x(i, k) - y(i, k);
  return r;
}
inline Jet operator*(const Jet& x, const Jet& y) {
  Jet r(std::min(x.A, y.A), std::min(x.B, y.B));
  for (int i = 0; i <= r.A; ++i)
    for (int k = 0; k <= r.B; ++k) {
      const Cx& xv = x(i, k);
      if (xv.re == 0 && xv.im == 0) continue;
      for (int i2 = 0; i + i2 <= r.A; ++i2)
        for (int k2 = 0; k + k2 <= r.B; ++k2) r(i + i2, k + k2) += xv * y(i2, k2);
    }
  return r;
}
inline Jet operator*(const Cx& s, Jet x) {
  for (auto& v : x.c) v *= s;
  return x;
}
inline Jet operator*(Jet x, const Cx& s) { return s * x; }

// 1/x and log|x| through the expansion around the base value
inline Jet jet_inv(const Jet& x) {
  Cx x0 = x.value();
  Jet u = (Cx(1) / x0) * x;
  u(0, 0) = Cx(0);
  Jet r = Jet::constant(Cx(1), x.A, x.B), term = r;
  for (int k = 1; k <= x.A + x.B; ++k) {
    term = term * u;
    r = (k % 2) ? r - term : r + term;
  }
  return (Cx(1) / x0) * r;
}

inline Jet operator/(const Jet& x, const Jet& y) { return x * jet_inv(y); }

// log of the modulus of the base value; derivatives are those of log x
inline Jet jet_log(const Jet& x) {
  Cx x0 = x.value();
  Jet u = (Cx(1) / x0) * x;
  u(0, 0) = Cx(0);
  Jet r(x.A, x.B), term = Jet::constant(Cx(1), x.A, x.B);
  for (int k = 1; k <= x.A + x.B; ++k) {
    term = term * u;
    Cx coef = Cx(Real(k % 2 ? 1 : -1)) / Cx(Real(k));
    r = r + coef * term;
  }
  r(0, 0) = Cx(boost::multiprecision::log(abs(x0)));
  return r;
}

}  // namespace hm
