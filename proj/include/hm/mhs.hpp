#pragma once

#include "hm/hodge.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hm {

using MatQ = Mat<QI>;
using VecQ = Vec<QI>;
using SubQ = Subspace<QI>;
using FiltQ = Filtration<QI>;

// Monodromy weight filtration of N centered at 0.
FiltQ weight_filtration(const MatQ& N);
// centered at k: W_l(N,k) = W_{l-k}(N), so W_l = 0 for l < 0
FiltQ shifted_weight_filtration(const MatQ& N, int k);
// Checks N W_l in W_{l-2} and N^l : Gr_{c+l} -> Gr_{c-l} iso for l >= 0.
bool verify_weight_filtration(const MatQ& N, const FiltQ& W, int center = 0, std::string* why = nullptr);

std::optional<FiltQ> relative_weight_filtration(const MatQ& N, const FiltQ& W0);
bool verify_relative_weight_filtration(const MatQ& N, const FiltQ& W0, const FiltQ& M, std::string* why = nullptr);

struct ConeReport {
  bool invariant = true;
  int trials = 0;
  std::vector<QI> first_discrepancy;  // coefficients giving a different filtration
  FiltQ W;
};
ConeReport cone_filtration_invariance(const std::vector<MatQ>& cone, int trials, std::uint64_t seed = 1);

struct PrimitivePiece {
  SubQ P;                     // primitive subspace (inside the graded complement)
  std::vector<SubQ> lefschetz;  // N^j P_{l+2j} projected to Gr_l, j = 0,1,...
};
// keyed by l; center gives the weight around which W is symmetric
std::map<int, PrimitivePiece> primitive_decomposition(const FiltQ& W, const MatQ& N, int center = 0);

struct MixedHodgeStructure {
  int n = 0;
  MatQ conj_op;
  FiltQ W;  // increasing
  FiltQ F;  // decreasing
  std::optional<BilinearForm<QI>> S;
  std::vector<MatQ> nilpotents;

  VecQ conj(const VecQ& v) const { return apply_conj(conj_op, v); }
  SubQ conj(const SubQ& s) const { return s.conjugate(conj_op); }
};

// Pure Hodge structure induced on a subquotient, in coordinates of a chosen basis.
struct InducedHS {
  int l = 0;
  SubQ complement;  // ambient representatives of Gr_l
  PureHodgeStructure<QI> hs;
};
InducedHS induced_on_graded(const MixedHodgeStructure& m, int l);

struct MHSCheck {
  bool ok = true;
  std::vector<std::string> failures;
};
MHSCheck check_mhs(const MixedHodgeStructure& m);

struct PolarizedReport {
  bool weight_ok = true;
  bool mhs_ok = true;
  bool horizontal_ok = true;
  bool positivity_ok = true;
  std::vector<std::string> notes;
  std::optional<VecQ> witness;
  bool ok() const { return weight_ok && mhs_ok && horizontal_ok && positivity_ok; }
};
PolarizedReport verify_polarized_mhs(const MixedHodgeStructure& m, const MatQ& N, int k);

struct DeligneSplitting {
  std::map<std::pair<int, int>, SubQ> I;
  std::optional<MatQ> delta;
};
DeligneSplitting deligne_bigrading(const MixedHodgeStructure& m);
bool is_real_split(const MixedHodgeStructure& m, const DeligneSplitting& d);
DeligneSplitting compute_delta(const MixedHodgeStructure& m);
// e^{-i delta} F
FiltQ twist_filtration(const FiltQ& F, const MatQ& delta);

bool commute(const MatQ& a, const MatQ& b);
// restriction of N to a subspace invariant under it, in coordinates of the subspace basis
MatQ restrict_to(const MatQ& N, const SubQ& V);
// induced map on the quotient B / A represented by complement C, in coordinates of C
MatQ induced_on_quotient(const MatQ& N, const SubQ& A, const SubQ& C);
// lift coordinate subspace back to ambient through the basis of V
SubQ from_coords(const SubQ& coords, const SubQ& V);

}  // namespace hm
