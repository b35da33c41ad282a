#include "hm/scalar.hpp"

#include <stdexcept>

namespace hm {

namespace {
unsigned g_bits = 256;
double g_zero_tol = 1e-40;
}  // namespace

Q parse_rational(const std::string& s) {
  std::string t;
  for (char c : s)
    if (c != ' ' && c != '+') t.push_back(c);
  if (t.empty()) throw std::invalid_argument("empty rational");
  // allow decimal notation such as "0.25" or "-1.5e-3"
  if (t.find('.') != std::string::npos || t.find('e') != std::string::npos ||
      t.find('E') != std::string::npos) {
    size_t epos = t.find_first_of("eE");
    std::string mant = t.substr(0, epos);
    long ex = epos == std::string::npos ? 0 : std::stol(t.substr(epos + 1));
    bool neg = !mant.empty() && mant[0] == '-';
    if (neg) mant = mant.substr(1);
    size_t dot = mant.find('.');
    std::string digits = mant;
    if (dot != std::string::npos) {
      digits = mant.substr(0, dot) + mant.substr(dot + 1);
      ex -= static_cast<long>(mant.size() - dot - 1);
    }
    if (digits.empty()) digits = "0";
    mpz_class num(digits, 10), den(1);
    mpz_class ten(10);
    mpz_class p;
    mpz_pow_ui(p.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(ex < 0 ? -ex : ex));
    if (ex >= 0)
      num *= p;
    else
      den = p;
    Q r(num, den);
    r.canonicalize();
    return neg ? Q(-r) : r;
  }
  Q r;
  if (r.set_str(t, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  r.canonicalize();
  return r;
}

std::string to_string(const Q& q) { return q.get_str(); }

std::string to_string(const QI& q) {
  if (q.is_real()) return q.re.get_str();
  return q.re.get_str() + (sgn(q.im) < 0 ? "-" : "+") + Q(abs(q.im)).get_str() + "i";
}

void set_precision_bits(unsigned bits) {
  if (bits < 64) bits = 64;
  g_bits = bits;
  // digits10 from bits, with a small margin
  unsigned d10 = static_cast<unsigned>(bits * 0.30103) + 1;
  Real::default_precision(d10);
}

unsigned precision_bits() { return g_bits; }

void set_float_zero_tol(double tol) { g_zero_tol = tol; }
double float_zero_tol() { return g_zero_tol; }

bool Field<Cx>::is_zero(const Cx& a) { return mag(a) <= g_zero_tol; }

Cx exp(const Cx& a) {
  Real m = boost::multiprecision::exp(a.re);
  return Cx(m * boost::multiprecision::cos(a.im), m * boost::multiprecision::sin(a.im));
}

Cx log(const Cx& a) {
  return Cx(boost::multiprecision::log(abs(a)), boost::multiprecision::atan2(a.im, a.re));
}

Cx pow_int(Cx a, long n) {
  if (n < 0) return Cx(1) / pow_int(a, -n);
  Cx r(1);
  while (n) {
    if (n & 1) r *= a;
    a *= a;
    n >>= 1;
  }
  return r;
}

Cx to_cx(const QI& q) {
  Real re(q.re.get_num().get_str()), im(q.im.get_num().get_str());
  re /= Real(q.re.get_den().get_str());
  im /= Real(q.im.get_den().get_str());
  return Cx(re, im);
}

Real to_real(const Q& q) {
  Real n(q.get_num().get_str());
  return n / Real(q.get_den().get_str());
}

std::string to_string(const Real& x, int digits) { return x.str(digits, std::ios_base::scientific); }

std::string to_string(const Cx& z, int digits) {
  std::string im = to_string(z.im, digits);
  return to_string(z.re, digits) + (im[0] == '-' ? "" : "+") + im + "i";
}

Real pi_r() {
  Real r;
  mpfr_const_pi(r.backend().data(), MPFR_RNDN);
  return r;
}

Real zeta3_r() {
  Real r;
  mpfr_zeta_ui(r.backend().data(), 3, MPFR_RNDN);
  return r;
}

Real log2_r() { return boost::multiprecision::log(Real(2)); }

}  // namespace hm
