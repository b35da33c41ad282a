#pragma once

#include "hm/jets.hpp"
#include "hm/periods.hpp"

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace hm {

// Period data in one chart coordinate w: jets(w, K)[a] = (d/dw)^a Pi / a!, a = 0..K.
struct JetSource {
  std::string chart;
  int weight = 0;
  MatQ S;
  std::function<std::vector<Vec<Cx>>(const Cx& w, int order)> jets;
  std::function<double(const Cx& w)> dist;  // distance to the nearest singular point (inf if none)
  bool punctured = false;                   // puncture at w = 0
  const PeriodEngine* engine = nullptr;
};

// chart coordinate s = scale * z of the family file
JetSource family_chart(const PeriodEngine& e);
// tau in the upper half plane with Pi = (tau, 1) and S(e1, e2) = -1
JetSource upper_half_plane();
// new coordinate w' = lambda * w
JetSource rescaled(const JetSource& src, const Cx& lambda);
// Pi -> f Pi with f given by its Taylor coefficients at w
JetSource regauged(const JetSource& src, std::function<std::vector<Cx>(const Cx& w, int order)> f);

// Everything below is the coefficient of (i/2pi) dw ^ dwbar (forms) or the
// component in the w coordinate (tensors). Curvature R is R_{w wbar w wbar} with the sign
// R = g * d dbar log g (Poincare metric: R = 2 g^2); the holomorphic sectional curvature
// is K = -R / g^2.
struct GeomPoint {
  Cx w;
  bool ok = true;
  std::string flag;
  Real Q;       // i^n S(Pi, conj Pi)
  Real g;       // -d dbar log Q
  Real g_quot;  // -(nabla Omega, conj nabla Omega) / Q
  Real R_direct, R_jet, R_lemma, R_yukawa;
  bool has_yukawa = false;
  Cx F_raw;  // S(Pi, d^3 Pi)
  Real hol_sec;
  Real h_second, h_five, omega_H_good;  // omega_H_good only for weight 3
  Real c1_wp, c1_H, flux;
  std::vector<Real> N;  // positive Hodge norms of the Gram-Schmidt frame, index j = 0..n
  std::vector<Real> N_det;  // the same from Gram determinants
  std::vector<Real> Rp, Rp_first, Rp_second, Rp_line;  // index p = 0..n
  Real iol_defect, nabla_defect;
};

GeomPoint geometry_at(const JetSource& src, const Cx& w);
std::vector<GeomPoint> evaluate_points(const JetSource& src, const std::vector<Cx>& pts, int jobs = 1);

// -Delta log Q / 4 with the 4-point cross stencil, step h
Real fd_metric(const JetSource& src, const Cx& w, const Real& h);

Cx yukawa_canonical(const std::vector<Vec<Cx>>& p);

struct GridSpec {
  std::string kind = "annulus";  // annulus: radii a0..a1 (log spaced, na), angles nb; rect: [a0,a1]x[b0,b1]
  double a0 = 0, a1 = 0, b0 = 0, b1 = 0;
  int na = 0, nb = 0;
};
GridSpec parse_grid(const std::string& spec);
std::vector<Cx> grid_points(const GridSpec& g);

struct FieldOnGrid {
  std::string chart;
  std::string quantity;
  std::vector<std::complex<double>> points;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;
  std::vector<int> flagged;
  std::map<std::string, std::string> meta;
  int col(const std::string& name) const;
  double max_of(const std::string& name) const;
  std::string to_csv() const;
  std::string to_json() const;
};

std::map<std::string, std::string> geometry_conventions();

FieldOnGrid wp_metric(const JetSource& src, const std::vector<Cx>& pts, int jobs = 1);
// mode: direct or yukawa
FieldOnGrid wp_curvature(const JetSource& src, const std::vector<Cx>& pts, const std::string& mode, int jobs = 1);
FieldOnGrid yukawa_coupling(const JetSource& src, const std::vector<Cx>& pts, int jobs = 1);
FieldOnGrid hodge_metric_cy3(const JetSource& src, const std::vector<Cx>& pts, int jobs = 1);
FieldOnGrid generalized_hodge_metric(const JetSource& src, const std::vector<Cx>& pts, int k, int jobs = 1);
FieldOnGrid hodge_bundle_curvature(const JetSource& src, const std::vector<Cx>& pts, int p, int q, int jobs = 1);

}  // namespace hm
