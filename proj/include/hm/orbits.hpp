#pragma once

#include "hm/mhs.hpp"

namespace hm {

struct NilpotentCone {
  int n = 0;
  int weight = 0;
  MatQ conj_op;
  std::vector<MatQ> N;
  FiltQ F;  // limit filtration
  BilinearForm<QI> S;
};

struct ConeValidation {
  bool commuting = true, horizontal = true, infinitesimal_isometry = true;
  std::vector<std::string> notes;
  bool ok() const { return commuting && horizontal && infinitesimal_isometry; }
};
ConeValidation validate_cone(const NilpotentCone& c);

// exp(sum z_j N_j) F, exact for Gaussian rational z
FiltQ orbit_point_exact(const NilpotentCone& c, const std::vector<QI>& z);
Filtration<Cx> orbit_point(const NilpotentCone& c, const std::vector<Cx>& z);

struct SL2Triple {
  MatQ X, Y, H;  // [H,X] = 2X, [H,Y] = -2Y, [X,Y] = H
};
SL2Triple jacobson_morozov(const MatQ& X);

// t_alpha, u_alpha^j for an index set I (1-based, ending in a)
struct RegionCoords {
  std::vector<int> I;
  std::vector<double> t;
  std::vector<std::vector<std::pair<int, double>>> u;  // per alpha: (j, u_alpha^j)
};
RegionCoords region_coordinates(const std::vector<double>& y, const std::vector<int>& I);
bool in_region(const std::vector<double>& y, const std::vector<int>& I, double K, double L);

Mat<Cx> grading_operator(const NilpotentCone& c, const std::vector<int>& I, const std::vector<double>& y);

struct RegionClass {
  bool base = false;
  int j = 0;
  std::vector<int> I;
  RegionCoords coords;
};
// K_seq = (K_1, ..., K_a) with K_j > K_{j+1}^a and K_{a+1} = 1
RegionClass classify_cone_region(const std::vector<double>& y, const std::vector<double>& K_seq);
// membership test used to certify a classification
bool region_contains(const RegionClass& r, const std::vector<double>& y, const std::vector<double>& K_seq);

struct OrbitFrame {
  MatQ delta;  // gamma = exp(i delta) exp(sum z_j N_j)
};
OrbitFrame default_frame(const NilpotentCone& c);
MatQ orbit_group_element(const NilpotentCone& c, const OrbitFrame& f, const std::vector<QI>& z);
PureHodgeStructure<QI> orbit_hodge_structure(const NilpotentCone& c, const OrbitFrame& f, const std::vector<QI>& z);

// S(C v, conj v) at gamma(z) F; exact
Q hodge_norm_sq(const NilpotentCone& c, const OrbitFrame& f, const VecQ& v, const std::vector<QI>& z);
// z_j = x_j + i y_j with doubles converted exactly to rationals
double hodge_norm(const NilpotentCone& c, const OrbitFrame& f, const VecQ& v, const std::vector<double>& x,
                  const std::vector<double>& y);

struct RaySpec {
  double e0 = 2, e1 = 6;  // log10 range of y_a
  int per_decade = 20;
  int fit_decades = 3;
  std::vector<double> ray_powers{1.5, 2.0, 3.0};  // several-variable rays: y_j = y_a^{1+(a-j)(q-1)}
};

struct GrowthReport {
  std::vector<int> l;               // v in W^{(j)}_{l_j}, W^{(j)} = W(N_1 + ... + N_j)
  std::vector<double> predicted_t;  // l_j / 2, exponents of t_j
  std::vector<double> fitted_t;
  std::vector<double> fitted_y;  // same fit expressed in y_1, ..., y_a
  int samples = 0;
  double rms = 0;
};
GrowthReport norm_growth_exponents(const NilpotentCone& c, const VecQ& v, const RaySpec& ray = {});

// weight indices of v for the filtrations W(N_1 + ... + N_j)
std::vector<int> multi_weight(const NilpotentCone& c, const VecQ& v);

NilpotentCone elliptic_cone();
// H1 ⊗ H2 of two elliptic limits, N1 = N ⊗ 1, N2 = 1 ⊗ N
NilpotentCone product_elliptic_cone();

}  // namespace hm
