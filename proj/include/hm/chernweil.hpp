#pragma once

#include "hm/geometry.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace hm {

// ---- forms and invariant polynomials ----

// Form on a one-dimensional chart: bidegree (0,0) or (1,1). For (1,1) the coefficient c
// stands for (i/2pi) c dw ^ dwbar.
struct FormField {
  int p = 0, q = 0;
  FieldOnGrid field;  // column "coef"
  std::vector<std::string> warnings;
};

// Pointwise matrix-valued curvature: entry (a,b) is the coefficient of dw ^ dwbar in R_a^b.
struct CurvatureField {
  std::string chart;
  std::vector<std::complex<double>> points;
  std::vector<Mat<Cx>> R;
  int base_dim = 1;  // complex dimension m of the base
};

// Chern form c_alpha = (i/2pi)^alpha (-1)^alpha / alpha! sum sgn(tau) R ^ ... R.
// On a curve only alpha = 0, 1 can be nonzero.
FormField chern_form(const CurvatureField& curv, int alpha);
// rank-1 curvature d dbar log h from the geometry engine
CurvatureField line_curvature(const JetSource& src, const std::vector<Cx>& pts, const std::string& bundle, int jobs = 1);

// elementary symmetric polynomials c_1..c_d of a matrix (coefficients of det(1 + t A))
std::vector<Cx> elementary_symmetric(const Mat<Cx>& A);

// polynomial in c_1..c_d: sum coef * prod c_i^{e_i}
struct InvariantPolynomial {
  struct Term {
    Q coef;
    std::vector<int> exps;  // exponent of c_1, c_2, ...
  };
  std::vector<Term> terms;
  Cx eval(const Mat<Cx>& A) const;
  static InvariantPolynomial parse(const std::string& s);  // e.g. "c1^2 - 2 c2"
};

// ---- cut-off functions ----

// u = 1 / log(1/|s|); rho(u) = 1 - eta((u - eps) / eps)
struct CutoffFamily {
  double eps = 0.1;
  int profile = 1;  // 1: psi = exp(-1/t), 2: psi = exp(-1/t^2)
  Real eta(const Real& t) const;
  // rho and its first two derivatives in u
  std::array<Real, 3> rho_u(const Real& u) const;
  Real rho(const Cx& s) const;
  // coefficients in the Poincare coframe theta = ds / (s log|s|)
  Cx d_rho(const Cx& s) const;       // d rho = c theta
  Real ddbar_rho(const Cx& s) const;  // d dbar rho = c theta ^ thetabar
};
CutoffFamily make_cutoff(double eps, int profile = 1, double chart_radius = 0.5);

// ---- regularized integration ----

// Coefficient of (i/2pi) dw ^ dwbar on a batch of chart points.
struct TopForm {
  std::string name;
  std::function<std::vector<Real>(const std::vector<Cx>& pts)> coef;
};

// Named forms on a geometry source: zero, omega-wp, c1-wp, omega-h, c1-h, abs-c1-h,
// flux, c1-hodge:<p> (first Chern form of H^{p,n-p}).
// Forms built with the same cache reuse the geometry of the previous batch of points.
struct GeomCache {
  std::vector<Cx> pts;
  std::vector<GeomPoint> gps;
};
TopForm geometry_form(const JetSource& src, const std::string& name, int jobs = 1,
                      std::shared_ptr<GeomCache> cache = nullptr);
// flux integrand det(-R - omega) for m = 1 with the engine's sign of R
Real flux_integrand(const Real& g, const Real& R);

struct IntegrationDomain {
  enum Kind { PuncturedDisc, ModularFundamental } kind = PuncturedDisc;
  double radius = 0.5;  // PuncturedDisc: |s| <= radius, puncture at 0
  int angular = 32;     // trapezoid points in the angle (or Gauss nodes in x)
  int gauss = 10;       // Gauss-Legendre nodes per panel
  int subpanels = 1;    // panels per breakpoint interval
};
IntegrationDomain chart_domain(const JetSource& src, const PeriodEngine* e);
IntegrationDomain modular_domain();

struct EpsRow {
  double eps;
  Real value;
  Real abs_value;  // integral of |form| with the same cut-off
};

struct RegularizedIntegral {
  std::string form;
  int profile = 1;
  std::vector<EpsRow> table;
  Real limit;
  // extrapolation through the three smallest eps; error = |3-point - 2-point| on those
  double error = 0;
  // the same using only the three largest eps (differs when the table was refined further)
  Real head_limit;
  double head_error = 0;
  bool extrapolated = false;
  bool monotone = false;
  bool converged = true;
  std::string flag;
  Real abs_integral;  // extrapolated integral of |form|
  size_t evaluations = 0;
  std::string to_csv() const;
  std::string to_json() const;
};

RegularizedIntegral integrate_regularized(const TopForm& form, const IntegrationDomain& dom,
                                          const std::vector<double>& eps_seq, bool extrapolate = true,
                                          int profile = 1);
// polynomial extrapolation to eps = 0 through all table entries
Real richardson(const std::vector<double>& eps, const std::vector<Real>& vals);

// ---- Poincare boundedness ----

struct PoincareReport {
  std::vector<double> decade_hi, decade_lo;  // annulus decade_lo[k] <= |s| <= decade_hi[k]
  std::vector<double> sup;
  double growth = 0;  // d log sup / d log log(1/|x|) over the innermost three annuli
  bool bounded = false;
  bool monotone = false;
  std::string to_json() const;
};

// coef is given in the chart coordinate s; the coframe uses x = s / scale (annuli are in |x|).
// kind: "two-form" (coefficient of ds ^ dsbar), "one-form-s" (coefficient of ds),
// "regular" (coefficient of dw in a non-punctured direction)
PoincareReport poincare_bounded_check(const std::function<std::vector<Cx>(const std::vector<Cx>&)>& coef,
                                      const std::string& kind, double r_hi, int decades, double scale = 1,
                                      int radial = 4, int angular = 12);

// ---- rationality ----

struct RationalityVerdict {
  double value = 0;
  Q nearest;
  double residual = 0;
  long max_den = 100;
  double tol = 1e-3;
  bool rational = false;
  std::string to_json() const;
};
RationalityVerdict rationality_detect(double value, long max_den = 100, double tol = 1e-3);

// ---- inequality reports ----

struct InequalityReport {
  double max_uio = 0;                // max |c1(omega_WP)| / omega_H
  std::vector<double> max_sdf;       // per p: max |c1(H^{p,n-p})| / omega_PH
  double max_plk = 0;                // max |R_p| / h over p
  std::vector<std::complex<double>> violations;
  size_t points = 0;
  bool holds() const { return violations.empty(); }
  std::string to_json() const;
};
InequalityReport chern_inequality_check(const JetSource& src, const std::vector<Cx>& pts, int jobs = 1);
// ratio report for given coefficient arrays |c| / omega
double max_ratio(const std::vector<Real>& c, const std::vector<Real>& omega);

struct FluxIndexReport {
  RegularizedIntegral index;
  RegularizedIntegral hodge_volume;
  bool finite = false;
  bool bounded_by_volume = false;  // |index| <= 2 * volume
  std::string to_json() const;
};
FluxIndexReport flux_vacua_index(const JetSource& src, const IntegrationDomain& dom, const std::vector<double>& eps_seq,
                                 int profile = 1, int jobs = 1);

struct L1Report {
  RegularizedIntegral l1;
  std::vector<double> eps;
  std::vector<double> poincare_log_mass;  // integral of log(1/|s|) omega_P over the support annulus
  bool uniformly_bounded = false;
  std::string to_json() const;
};
L1Report hodge_curvature_l1(const JetSource& src, const IntegrationDomain& dom, const std::vector<double>& eps_seq,
                            int profile = 1, int jobs = 1);
// integral of log(1/|s|) omega_P over e^{-1/eps} <= |s| <= e^{-1/(2 eps)}, by quadrature in |s|
double poincare_log_mass(double eps);

}  // namespace hm
