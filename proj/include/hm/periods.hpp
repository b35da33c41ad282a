#pragma once

#include "hm/mhs.hpp"

#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace hm {

struct SingularPoint {
  bool at_infinity = false;
  Q z;
  std::string label;  // LCS, conifold, other
};

// rat + log2_pii * log(2)/(pi i) + zeta3c * zeta(3)/(2 pi i)^3
struct BasisCoeff {
  Q rat, log2_pii, zeta3c;
};

struct PeriodFamily {
  std::string name;
  int weight = 0;
  int rank = 0;
  std::vector<std::vector<Q>> pf;  // pf[j][i] = coefficient of z^i theta^j
  MatQ S;                          // polarization in the integral basis
  std::vector<std::vector<BasisCoeff>> basis;  // integral basis over the Frobenius basis at 0
  std::vector<SingularPoint> singular;
  std::string yukawa_kind = "none";
  Q yukawa_limit;
  Q base_point;
  Q chart_scale = 1;  // chart coordinate s = chart_scale * z
  Q chart_radius = Q(1, 2);

  // polynomial in z multiplying theta^j
  const std::vector<Q>& theta_coeff(int j) const { return pf[j]; }
  // Q_i(theta) = sum_j pf[j][i] theta^j
  std::vector<Q> z_coeff(int i) const;
  int z_degree() const;
};

PeriodFamily parse_family(const std::string& json_text);
// a bare name is looked up in the shipped data directory (override with HODGE_MODULI_DATA)
PeriodFamily load_family(const std::string& name_or_path);
std::string family_data_dir();

// Local solution basis around a center. For a MUM center the k-th solution is
// sum_{i<=k} log(z - c)^i / i! * h[k-i](z - c); at a regular center the k-th solution
// has Taylor data y^{(j)}(c) = j! delta_{jk} and h[k] is its coefficient list.
struct LocalBasis {
  Q center;
  bool logarithmic = false;
  int nterms = 0;
  std::vector<std::vector<Q>> h;
};
LocalBasis pf_series_solution(const PeriodFamily& f, const Q& center, int nterms);
// Coefficients (up to z^{nterms-1}) of the operator applied to a truncated MUM/regular solution;
// all should vanish exactly. Returns the first non-vanishing index or -1.
int series_residual_index(const PeriodFamily& f, const LocalBasis& b, int k);

struct PeriodFrame {
  Cx z;                    // coordinate z of the family file
  std::vector<Vec<Cx>> d;  // d[a] = a-th z-derivative of the period vector, integral basis
  unsigned bits = 0;
  double err = 0;  // estimated relative error
  int order() const { return static_cast<int>(d.size()) - 1; }
};

// Numerical engine with caches at the current working precision.
class PeriodEngine {
 public:
  explicit PeriodEngine(PeriodFamily f);
  const PeriodFamily& family() const { return fam_; }

  // rows: Frobenius solutions f_0..f_{r-1}; columns: z-derivatives 0..D; needs |s| < 1
  Mat<Cx> frobenius_jets(const Cx& z, int D) const;
  // rows: integral periods; columns: z-derivatives 0..D (Frobenius region only)
  Mat<Cx> integral_jets(const Cx& z, int D) const;
  Mat<Cx> basis_matrix() const;

  // Taylor data (c_m, m < N) at z0 of the solution with given derivative data
  std::vector<Cx> taylor_coeffs(const Cx& z0, const Vec<Cx>& derivs, int N) const;
  // transport derivative data (rows = solutions, r columns) along a polyline
  Mat<Cx> transport(const std::vector<Cx>& path, Mat<Cx> data, double step_ratio = 0.5) const;
  // derivatives 0..D at z from derivative data 0..r-1
  Mat<Cx> extend_jets(const Cx& z, const Mat<Cx>& data, int D) const;

  double distance_to_singular(const Cx& z) const;
  bool in_frobenius_region(const Cx& z) const;

 private:
  struct FrobCache;
  PeriodFamily fam_;
  std::vector<std::vector<Q>> A_;  // z^k D^k form: A_[k] polynomial coefficients
  mutable std::mutex mu_;
  mutable std::shared_ptr<FrobCache> cache_;
  std::shared_ptr<FrobCache> frob_cache(int nterms) const;
};

struct ContinuationResult {
  PeriodFrame frame;
  double halving_change = 0;  // relative change between step ratios 1/2 and 1/4, per derivative order
  int hops = 0;
};
// start.d must hold derivatives 0..rank-1
ContinuationResult analytic_continuation(const PeriodEngine& e, const std::vector<Cx>& path, const PeriodFrame& start);

struct MonodromyResult {
  std::string loop;
  Mat<Cx> T;
  MatQ T_int;
  double residual = 0;         // max |T - T_int|
  double symplectic_residual = 0;  // max |T^t S T - S| before rounding
  bool symplectic_exact = false;
  bool unipotent = false;
  int nilpotency = -1;  // d with (T_int - I)^d = 0
  int rank_N = 0;      // rank of T_int - I
  MatQ N;              // log T_int when unipotent
  double halving_change = 0;
};
// loop around the singular point with the given label (or its z value as a string)
MonodromyResult monodromy_matrix(const PeriodEngine& e, const std::string& point, int vertices = 24);
MonodromyResult monodromy_from_matrix(const Mat<Cx>& T, const MatQ& S, const std::string& loop);

// Periods and derivatives 0..order at z. Inside the Frobenius chart the principal branch of
// log z is used; elsewhere the frame is continued from the base point along default_path.
PeriodFrame period_frame(const PeriodEngine& e, const Cx& z, int order);
std::vector<Cx> default_path(const PeriodEngine& e, const Cx& from, const Cx& to);
// max over a + b < weight of |S(d^a Pi, d^b Pi)| relative to the norms
double transversality_defect(const PeriodEngine& e, const PeriodFrame& fr);

// Jets in the chart coordinate s: p[a] = (d/ds)^a Pi / a!
std::vector<Vec<Cx>> chart_jets(const PeriodEngine& e, const Cx& s, int order);

Cx pairing(const MatQ& S, const Vec<Cx>& a, const Vec<Cx>& b);

}  // namespace hm
