#include "hm/matrix.hpp"

namespace hm {

Mat<Cx> to_cx(const Mat<QI>& m) {
  Mat<Cx> out(m.r, m.c);
  for (size_t k = 0; k < m.a.size(); ++k) out.a[k] = to_cx(m.a[k]);
  return out;
}

}  // namespace hm

namespace hm {

Mat<Cx> mat_exp(const Mat<Cx>& x) {
  int n = x.r;
  double nrm = 0;
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < n; ++j) s += Field<Cx>::mag(x(i, j));
    nrm = std::max(nrm, s);
  }
  int sq = nrm > 0.5 ? static_cast<int>(std::ceil(std::log2(nrm / 0.5))) : 0;
  Mat<Cx> a = x;
  a *= Cx(Real(std::ldexp(1.0, -sq)));
  Mat<Cx> r = Mat<Cx>::identity(n), term = Mat<Cx>::identity(n);
  // ||a|| <= 1/2: 2^-k / k! below the working precision after enough terms
  int terms = static_cast<int>(precision_bits() / 2) + 8;
  for (int k = 1; k <= terms; ++k) {
    term = term * a;
    term *= Cx(Real(1) / Real(k));
    r += term;
  }
  for (int i = 0; i < sq; ++i) r = r * r;
  return r;
}

}  // namespace hm
