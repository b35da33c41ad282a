#pragma once

#include <gmpxx.h>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <complex>
#include <string>

namespace hm {

using Q = mpq_class;
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

Q parse_rational(const std::string& s);
std::string to_string(const Q& q);

// Gaussian rational a + b i
struct QI {
  Q re, im;

  QI() : re(0), im(0) {}
  QI(long v) : re(v), im(0) {}
  QI(int v) : re(v), im(0) {}
  QI(const Q& r) : re(r), im(0) {}
  QI(const Q& r, const Q& i) : re(r), im(i) {}

  QI& operator+=(const QI& o) { re += o.re; im += o.im; return *this; }
  QI& operator-=(const QI& o) { re -= o.re; im -= o.im; return *this; }
  QI& operator*=(const QI& o) {
    Q r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = r;
    return *this;
  }
  QI& operator/=(const QI& o) {
    Q d = o.re * o.re + o.im * o.im;
    Q r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = r;
    return *this;
  }
  QI operator-() const { return QI(-re, -im); }
  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }
};

inline QI operator+(QI a, const QI& b) { return a += b; }
inline QI operator-(QI a, const QI& b) { return a -= b; }
inline QI operator*(QI a, const QI& b) { return a *= b; }
inline QI operator/(QI a, const QI& b) { return a /= b; }
inline bool operator==(const QI& a, const QI& b) { return a.re == b.re && a.im == b.im; }
inline bool operator!=(const QI& a, const QI& b) { return !(a == b); }
inline QI conj(const QI& a) { return QI(a.re, -a.im); }
inline const QI I_unit() { return QI(Q(0), Q(1)); }
std::string to_string(const QI& q);

// Complex number over runtime-precision mpfr reals
struct Cx {
  Real re, im;

  Cx() : re(0), im(0) {}
  Cx(double r) : re(r), im(0) {}
  Cx(int r) : re(r), im(0) {}
  Cx(const Real& r) : re(r), im(0) {}
  Cx(const Real& r, const Real& i) : re(r), im(i) {}

  Cx& operator+=(const Cx& o) { re += o.re; im += o.im; return *this; }
  Cx& operator-=(const Cx& o) { re -= o.re; im -= o.im; return *this; }
  Cx& operator*=(const Cx& o) {
    Real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = r;
    return *this;
  }
  Cx& operator*=(const Real& s) { re *= s; im *= s; return *this; }
  Cx& operator/=(const Cx& o) {
    Real d = o.re * o.re + o.im * o.im;
    Real r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = r;
    return *this;
  }
  Cx operator-() const { return Cx(-re, -im); }
};

inline Cx operator+(Cx a, const Cx& b) { return a += b; }
inline Cx operator-(Cx a, const Cx& b) { return a -= b; }
inline Cx operator*(Cx a, const Cx& b) { return a *= b; }
inline Cx operator*(Cx a, const Real& s) { return a *= s; }
inline Cx operator*(const Real& s, Cx a) { return a *= s; }
inline Cx operator/(Cx a, const Cx& b) { return a /= b; }
inline Cx conj(const Cx& a) { return Cx(a.re, -a.im); }
inline Real norm2(const Cx& a) { return a.re * a.re + a.im * a.im; }
inline Real abs(const Cx& a) { return boost::multiprecision::sqrt(norm2(a)); }
Cx exp(const Cx& a);
Cx log(const Cx& a);
Cx pow_int(Cx a, long n);
inline std::complex<double> to_cd(const Cx& a) {
  return {static_cast<double>(a.re), static_cast<double>(a.im)};
}
inline Cx from_cd(std::complex<double> c) { return Cx(Real(c.real()), Real(c.imag())); }
Cx to_cx(const QI& q);
Real to_real(const Q& q);
// decimal string with the given number of significant digits
std::string to_string(const Real& x, int digits = 20);
std::string to_string(const Cx& z, int digits = 20);

// precision handling: bits -> mpfr default precision, guarded per scope
void set_precision_bits(unsigned bits);
unsigned precision_bits();

class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned bits) : old_(precision_bits()) { set_precision_bits(bits); }
  ~PrecisionGuard() { set_precision_bits(old_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned old_;
};

Real pi_r();
Real zeta3_r();
Real log2_r();

// Field traits used by the generic linear algebra
template <class T>
struct Field;

template <>
struct Field<QI> {
  static constexpr bool exact = true;
  static bool is_zero(const QI& a) { return a.is_zero(); }
  static QI conj(const QI& a) { return hm::conj(a); }
  static double mag(const QI& a) { return std::abs(a.re.get_d()) + std::abs(a.im.get_d()); }
};

template <>
struct Field<Cx> {
  static constexpr bool exact = false;
  static bool is_zero(const Cx& a);
  static Cx conj(const Cx& a) { return hm::conj(a); }
  static double mag(const Cx& a) {
    return std::hypot(static_cast<double>(a.re), static_cast<double>(a.im));
  }
};

// Absolute threshold under which float entries count as zero in eliminations.
void set_float_zero_tol(double tol);
double float_zero_tol();

}  // namespace hm
