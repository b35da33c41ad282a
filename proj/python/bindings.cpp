#include "hm/chernweil.hpp"
#include "hm/geometry.hpp"
#include "hm/io.hpp"
#include "hm/mhs.hpp"
#include "hm/orbits.hpp"
#include "hm/periods.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <memory>

namespace py = pybind11;
using namespace hm;

namespace {

// structured values cross the boundary as JSON text; the Python layer parses them
std::string dump(const json& j) { return j.dump(); }

const PeriodEngine& engine(const std::string& name) {
  static std::map<std::string, std::unique_ptr<PeriodEngine>> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, std::make_unique<PeriodEngine>(load_family(name))).first;
  return *it->second;
}

bool is_uhp(const std::string& n) { return n == "upper-half-plane" || n == "uhp" || n == "elliptic"; }

std::string weight_filtration_json(const std::string& matrix, int center) {
  auto N = matq_from_json(json::parse(matrix));
  if (N.r != N.c) throw InputError("nilpotent must be square");
  auto W = shifted_weight_filtration(N, center);
  json j;
  j["center"] = center;
  j["W"] = to_json(W);
  j["verified"] = verify_weight_filtration(N, W, center);
  return dump(j);
}

std::string verify_hodge_json(const std::string& text) {
  auto hs = hodge_from_json(json::parse(text));
  json j;
  j["weight"] = hs.weight;
  j["dimension"] = hs.n;
  try {
    auto rep = verify_hodge_riemann(hs);
    j["opposed"] = true;
    j["relation1"] = rep.relation1;
    j["relation2"] = rep.relation2;
    j["notes"] = rep.notes;
    j["polarized"] = rep.relation1 && rep.relation2;
  } catch (const StructuralError& e) {
    j["opposed"] = false;
    j["polarized"] = false;
    j["notes"] = {e.what()};
  }
  return dump(j);
}

std::string check_mhs_json(const std::string& text) {
  auto m = mhs_from_json(json::parse(text));
  auto c = check_mhs(m);
  json j;
  j["mhs"] = c.ok;
  j["failures"] = c.failures;
  return dump(j);
}

py::dict classify_region(const std::vector<double>& y, const std::vector<double>& K) {
  auto r = classify_cone_region(y, K);
  py::dict d;
  d["base"] = r.base;
  d["j"] = r.j;
  d["I"] = r.I;
  d["t"] = r.coords.t;
  d["certified"] = region_contains(r, y, K);
  return d;
}

std::string rationality_json(double value, long max_den, double tol) {
  return rationality_detect(value, max_den, tol).to_json();
}

std::string monodromy_json(const std::string& family, const std::string& point, int vertices, unsigned bits) {
  PrecisionGuard pg(bits);
  auto m = monodromy_matrix(engine(family), point, vertices);
  json j;
  j["loop"] = m.loop;
  j["T_int"] = to_json(m.T_int);
  j["rounding_residual"] = m.residual;
  j["unipotent"] = m.unipotent;
  j["nilpotency"] = m.nilpotency;
  j["rank_T_minus_I"] = m.rank_N;
  if (m.unipotent) j["N"] = to_json(m.N);
  return dump(j);
}

std::string integrate_json(const std::string& family, const std::string& form, std::vector<double> eps, int profile,
                           bool extrapolate, unsigned bits) {
  PrecisionGuard pg(bits);
  bool uhp = is_uhp(family);
  JetSource src = uhp ? upper_half_plane() : family_chart(engine(family));
  auto dom = uhp ? modular_domain() : chart_domain(src, src.engine);
  if (eps.empty()) eps = uhp ? std::vector<double>{0.05, 0.025, 0.0125} : std::vector<double>{0.1, 0.05, 0.02};
  return integrate_regularized(geometry_form(src, form), dom, eps, extrapolate, profile).to_json();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "exact Hodge structures, nilpotent orbits and period geometry";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<StructuralError>(m, "StructuralError", PyExc_RuntimeError);
  py::register_exception<DegeneracyError>(m, "DegeneracyError", PyExc_RuntimeError);
  py::register_exception<PrecisionError>(m, "PrecisionError", PyExc_ArithmeticError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const json::exception& e) {
      PyErr_SetString(PyExc_ValueError, (std::string("malformed JSON: ") + e.what()).c_str());
    }
  });

  m.def("weight_filtration", &weight_filtration_json, py::arg("matrix"), py::arg("center") = 0);
  m.def("verify_hodge", &verify_hodge_json, py::arg("structure"));
  m.def("check_mhs", &check_mhs_json, py::arg("structure"));
  m.def("classify_cone_region", &classify_region, py::arg("y"), py::arg("K"));
  m.def("rationality", &rationality_json, py::arg("value"), py::arg("max_den") = 100, py::arg("tol") = 1e-3);
  m.def("monodromy", &monodromy_json, py::arg("family") = "mirror_quintic", py::arg("point") = "LCS",
        py::arg("vertices") = 24, py::arg("precision") = 256, py::call_guard<py::gil_scoped_release>());
  m.def("integrate", &integrate_json, py::arg("family"), py::arg("form"), py::arg("eps") = std::vector<double>{},
        py::arg("profile") = 1, py::arg("extrapolate") = true, py::arg("precision") = 256,
        py::call_guard<py::gil_scoped_release>());
  m.def("poincare_log_mass", &poincare_log_mass, py::arg("eps"));
  m.def("versions", [] { return dump(library_versions()); });
}
