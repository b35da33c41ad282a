#include "hm/chernweil.hpp"
#include "hm/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>

using namespace hm;
namespace fs = std::filesystem;

namespace {

constexpr int EXIT_OK = 0, EXIT_ERROR = 1, EXIT_NEGATIVE = 2;

struct Ctx {
  unsigned precision = 256;
  std::optional<double> tol;
  int jobs = 1;
  std::string out;
  std::string format;
  RunManifest man;
  Stopwatch clock;

  double tol_or(double d) const { return tol ? *tol : d; }
};

Ctx ctx;

// Relative paths that do not exist are looked up under the shipped data directory.
std::string resolve_input(const std::string& p) {
  if (p == "-" || fs::exists(p)) return p;
  fs::path alt = fs::path(family_data_dir()) / p;
  if (fs::exists(alt)) return alt.string();
  alt = fs::path(family_data_dir()) / "examples" / p;
  if (fs::exists(alt)) return alt.string();
  return p;
}

json load_json(const std::string& p) {
  if (p == "-") {
    std::string text((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw InputError(std::string("malformed JSON on stdin: ") + e.what());
    }
  }
  return read_json_file(resolve_input(p));
}

std::string csv_cell(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string q = "\"";
  for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void flatten(const json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    for (auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, os);
  } else if (j.is_array() && !j.empty() && (j[0].is_object() || j[0].is_array())) {
    for (size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), os);
  } else {
    os << csv_cell(prefix) << ',' << csv_cell(j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

// Writes the payload in the requested format; csv falls back to key,value rows.
int emit(json payload, const std::string& csv, int code, const std::string& default_format = "json") {
  std::string fmt = ctx.format.empty() ? default_format : ctx.format;
  ctx.man.timings["total_seconds"] = ctx.clock.seconds();
  std::string content;
  if (fmt == "json") {
    payload["manifest"] = ctx.man.stable();
    content = payload.dump(1) + "\n";
  } else if (!csv.empty()) {
    content = csv;
  } else {
    std::ostringstream os;
    os << "key,value\n";
    flatten(payload, "", os);
    content = os.str();
  }
  if (ctx.out.empty()) {
    std::cout << content << std::flush;
  } else {
    write_atomic(ctx.out, content);
    json m = ctx.man.full();
    m["output"] = fs::path(ctx.out).filename().string();
    write_atomic(ctx.out + ".manifest.json", m.dump(1) + "\n");
  }
  return code;
}

json parse_payload(const std::string& s) { return json::parse(s); }

// ---- shared sources ----

const PeriodEngine& engine(const std::string& name) {
  static std::map<std::string, std::unique_ptr<PeriodEngine>> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    std::string p = name;
    if (!fs::exists(p) && fs::exists(resolve_input(p))) p = resolve_input(p);
    it = cache.emplace(name, std::make_unique<PeriodEngine>(load_family(p))).first;
  }
  return *it->second;
}

bool is_uhp(const std::string& name) { return name == "upper-half-plane" || name == "uhp" || name == "elliptic"; }

JetSource source(const std::string& name) {
  if (is_uhp(name)) return upper_half_plane();
  return family_chart(engine(name));
}

std::vector<Cx> points_from(const std::string& grid, const std::string& pts) {
  if (!pts.empty()) {
    std::vector<Cx> v;
    std::stringstream ss(pts);
    std::string item;
    while (std::getline(ss, item, ';'))
      if (!item.empty()) v.push_back(parse_complex(item));
    if (v.empty()) throw InputError("no points given");
    return v;
  }
  if (grid.empty()) throw InputError("give --grid or --points");
  return grid_points(parse_grid(grid));
}

json hodge_numbers(const HodgeDecomposition<QI>& d) {
  json h;
  for (auto& [pq, s] : d) h[std::to_string(pq.first) + "," + std::to_string(pq.second)] = s.dim();
  return h;
}

void add_conventions() {
  for (auto& [k, v] : geometry_conventions()) ctx.man.conventions[k] = v;
  ctx.man.conventions["exact_scalars"] = "rationals as \"p/q\", Gaussian rationals as {re, im}";
  ctx.man.conventions["jordan_block"] = "J e_{i+1} = e_i";
}

// ---- hodge ----

int cmd_hodge_verify(const std::string& file) {
  auto hs = hodge_from_json(load_json(file));
  json j;
  j["schema"] = "hodge-moduli/hr-report/1";
  j["weight"] = hs.weight;
  j["dimension"] = hs.n;
  try {
    auto d = decompose(hs);
    auto rep = verify_hodge_riemann(hs);
    j["opposed"] = true;
    j["hodge_numbers"] = hodge_numbers(d);
    j["relation1"] = rep.relation1;
    j["relation2"] = rep.relation2;
    j["notes"] = rep.notes;
    if (rep.witness) j["witness"] = to_json(*rep.witness);
    if (rep.witness_type) j["witness_type"] = {rep.witness_type->first, rep.witness_type->second};
    j["polarized"] = rep.relation1 && rep.relation2;
    return emit(j, "", j["polarized"].get<bool>() ? EXIT_OK : EXIT_NEGATIVE);
  } catch (const StructuralError& e) {
    j["opposed"] = false;
    j["polarized"] = false;
    j["notes"] = {e.what()};
    return emit(j, "", EXIT_NEGATIVE);
  }
}

int cmd_hodge_decompose(const std::string& file) {
  auto hs = hodge_from_json(load_json(file));
  auto d = decompose(hs);
  json j;
  j["schema"] = "hodge-moduli/hodge-decomposition/1";
  j["weight"] = hs.weight;
  j["hodge_numbers"] = hodge_numbers(d);
  json pieces = json::array();
  std::ostringstream csv;
  csv << "p,q,dim\n";
  for (auto& [pq, s] : d) {
    pieces.push_back(json{{"p", pq.first}, {"q", pq.second}, {"dim", s.dim()}, {"basis", to_json(s)}});
    csv << pq.first << ',' << pq.second << ',' << s.dim() << '\n';
  }
  j["pieces"] = pieces;
  return emit(j, csv.str(), EXIT_OK);
}

int cmd_hodge_weil(const std::string& file) {
  auto hs = hodge_from_json(load_json(file));
  json j;
  j["schema"] = "hodge-moduli/weil-operator/1";
  j["C"] = to_json(weil_operator(hs));
  return emit(j, "", EXIT_OK);
}

int cmd_hodge_inner(const std::string& file, int p, int q, const std::string& v, const std::string& w) {
  auto hs = hodge_from_json(load_json(file));
  auto vv = vecq_from_json(json::parse(v), hs.n), ww = vecq_from_json(json::parse(w), hs.n);
  json j;
  j["schema"] = "hodge-moduli/hodge-inner/1";
  j["p"] = p;
  j["q"] = q;
  j["value"] = to_json(hodge_inner_product(hs, p, q, vv, ww));
  return emit(j, "", EXIT_OK);
}

// ---- mhs ----

int cmd_mhs_weightfilt(const std::string& file, std::optional<int> center) {
  MatQ N = matq_from_json(load_json(file));
  if (N.r != N.c) throw InputError("nilpotent must be square");
  FiltQ W = center ? shifted_weight_filtration(N, *center) : weight_filtration(N);
  std::string why;
  bool ok = verify_weight_filtration(N, W, center.value_or(0), &why);
  json j;
  j["schema"] = "hodge-moduli/weight-filtration/1";
  j["center"] = center.value_or(0);
  j["W"] = to_json(W);
  j["verified"] = ok;
  if (!ok) j["failure"] = why;
  std::ostringstream csv;
  csv << "l,dim\n";
  for (int l = W.lo(); l <= W.hi(); ++l) csv << l << ',' << W.get(l).dim() << '\n';
  return emit(j, csv.str(), ok ? EXIT_OK : EXIT_ERROR);
}

int cmd_mhs_relative(const std::string& nfile, const std::string& wfile) {
  MatQ N = matq_from_json(load_json(nfile));
  json wj = load_json(wfile);
  const json& wf = wj.is_object() && wj.contains("W") ? wj["W"] : wj;
  FiltQ W0 = filtration_from_json(wf, Direction::Increasing, N.r);
  auto M = relative_weight_filtration(N, W0);
  json j;
  j["schema"] = "hodge-moduli/relative-weight-filtration/1";
  j["exists"] = M.has_value();
  if (M) {
    std::string why;
    j["M"] = to_json(*M);
    j["verified"] = verify_relative_weight_filtration(N, W0, *M, &why);
  }
  return emit(j, "", M ? EXIT_OK : EXIT_NEGATIVE);
}

int cmd_mhs_verify(const std::string& file, std::optional<int> k) {
  json in = load_json(file);
  auto m = mhs_from_json(in);
  auto chk = check_mhs(m);
  json j;
  j["schema"] = "hodge-moduli/mhs-report/1";
  j["mhs"] = chk.ok;
  j["failures"] = chk.failures;
  bool ok = chk.ok;
  if (!m.nilpotents.empty() && m.S) {
    int kk = k ? *k : in.value("weight", 0);
    auto pr = verify_polarized_mhs(m, m.nilpotents[0], kk);
    j["polarized"] = {{"k", kk},
                      {"weight_filtration", pr.weight_ok},
                      {"mhs", pr.mhs_ok},
                      {"horizontal", pr.horizontal_ok},
                      {"positivity", pr.positivity_ok},
                      {"notes", pr.notes}};
    if (pr.witness) j["polarized"]["witness"] = to_json(*pr.witness);
    ok = ok && pr.ok();
  }
  return emit(j, "", ok ? EXIT_OK : EXIT_NEGATIVE);
}

int cmd_mhs_delta(const std::string& file) {
  auto m = mhs_from_json(load_json(file));
  auto chk = check_mhs(m);
  if (!chk.ok) throw StructuralError("input is not a mixed Hodge structure: " + chk.failures.front());
  auto ds = compute_delta(m);
  MixedHodgeStructure tw = m;
  tw.F = twist_filtration(m.F, *ds.delta);
  auto split = deligne_bigrading(tw);
  json j;
  j["schema"] = "hodge-moduli/deligne-delta/1";
  j["delta"] = to_json(*ds.delta);
  json I;
  for (auto& [pq, s] : ds.I) I[std::to_string(pq.first) + "," + std::to_string(pq.second)] = s.dim();
  j["bigrading_dims"] = I;
  j["twisted_real_split"] = is_real_split(tw, split);
  return emit(j, "", EXIT_OK);
}

int cmd_mhs_cone(const std::string& file, int trials, std::uint64_t seed) {
  json in = load_json(file);
  if (!in.contains("N")) throw InputError("cone file needs \"N\"");
  std::vector<MatQ> cone;
  for (auto& N : in["N"]) cone.push_back(matq_from_json(N));
  auto rep = cone_filtration_invariance(cone, trials, seed);
  json j;
  j["schema"] = "hodge-moduli/cone-invariance/1";
  j["trials"] = rep.trials;
  j["invariant"] = rep.invariant;
  j["W"] = to_json(rep.W);
  if (!rep.invariant) {
    json c = json::array();
    for (auto& x : rep.first_discrepancy) c.push_back(to_json(x));
    j["first_discrepancy"] = c;
  }
  return emit(j, "", rep.invariant ? EXIT_OK : EXIT_NEGATIVE);
}

// ---- orbit ----

NilpotentCone load_cone(const std::string& name) {
  if (name == "elliptic") return elliptic_cone();
  if (name == "product") return product_elliptic_cone();
  return cone_from_json(load_json(name));
}

int cmd_orbit_validate(const std::string& cone) {
  auto c = load_cone(cone);
  auto v = validate_cone(c);
  json j;
  j["schema"] = "hodge-moduli/cone-validation/1";
  j["commuting"] = v.commuting;
  j["horizontal"] = v.horizontal;
  j["infinitesimal_isometry"] = v.infinitesimal_isometry;
  j["notes"] = v.notes;
  return emit(j, "", v.ok() ? EXIT_OK : EXIT_NEGATIVE);
}

int cmd_orbit_norms(const std::string& cone, const std::string& vec, const std::vector<double>& range, int per_decade,
                    int fit_decades) {
  auto c = load_cone(cone);
  auto v = vecq_from_json(json::parse(vec), c.n);
  RaySpec ray;
  if (range.size() == 2) {
    ray.e0 = range[0];
    ray.e1 = range[1];
  } else if (!range.empty()) {
    throw InputError("--range takes two log10 exponents");
  }
  ray.per_decade = per_decade;
  ray.fit_decades = fit_decades;
  auto r = norm_growth_exponents(c, v, ray);
  json j;
  j["schema"] = "hodge-moduli/norm-growth/1";
  j["weights"] = r.l;
  j["predicted_t_exponents"] = r.predicted_t;
  j["fitted_t_exponents"] = r.fitted_t;
  j["fitted_y_exponents"] = r.fitted_y;
  j["samples"] = r.samples;
  j["rms"] = r.rms;
  std::ostringstream csv;
  csv << "j,weight,predicted,fitted_t,fitted_y\n";
  for (size_t i = 0; i < r.l.size(); ++i)
    csv << i + 1 << ',' << r.l[i] << ',' << r.predicted_t[i] << ',' << std::setprecision(12) << r.fitted_t[i] << ','
        << r.fitted_y[i] << '\n';
  return emit(j, csv.str(), EXIT_OK);
}

int cmd_orbit_region(const std::vector<double>& y, const std::vector<double>& K) {
  auto r = classify_cone_region(y, K);
  json j;
  j["schema"] = "hodge-moduli/region/1";
  j["base"] = r.base;
  j["j"] = r.j;
  j["I"] = r.I;
  j["t"] = r.coords.t;
  j["certified"] = region_contains(r, y, K);
  return emit(j, "", j["certified"].get<bool>() ? EXIT_OK : EXIT_ERROR);
}

int cmd_orbit_point(const std::string& cone, const std::string& zs) {
  auto c = load_cone(cone);
  std::vector<QI> z;
  for (auto& x : json::parse(zs)) z.push_back(qi_from_json(x));
  if (z.size() != c.N.size()) throw InputError("need one coordinate per nilpotent");
  auto F = orbit_point_exact(c, z);
  auto hs = orbit_hodge_structure(c, default_frame(c), z);
  json j;
  j["schema"] = "hodge-moduli/orbit-point/1";
  j["F"] = to_json(F);
  try {
    auto rep = verify_hodge_riemann(hs);
    j["relation1"] = rep.relation1;
    j["relation2"] = rep.relation2;
    j["in_period_domain"] = rep.relation1 && rep.relation2;
  } catch (const StructuralError& e) {
    j["in_period_domain"] = false;
    j["notes"] = e.what();
  }
  return emit(j, "", j["in_period_domain"].get<bool>() ? EXIT_OK : EXIT_NEGATIVE);
}

int cmd_orbit_sl2(const std::string& file) {
  MatQ N = matq_from_json(load_json(file));
  auto t = jacobson_morozov(N);
  json j;
  j["schema"] = "hodge-moduli/sl2-triple/1";
  j["X"] = to_json(t.X);
  j["Y"] = to_json(t.Y);
  j["H"] = to_json(t.H);
  return emit(j, "", EXIT_OK);
}

// ---- family ----

int cmd_family_solve(const std::string& fam, int nterms, const std::string& center) {
  auto& e = engine(fam);
  auto b = pf_series_solution(e.family(), parse_rational(center), nterms);
  json j;
  j["schema"] = "hodge-moduli/series-solution/1";
  j["family"] = e.family().name;
  j["center"] = to_string(b.center);
  j["logarithmic"] = b.logarithmic;
  j["nterms"] = b.nterms;
  json h = json::array();
  std::ostringstream csv;
  csv << "k,m,coefficient\n";
  bool exact = true;
  for (size_t k = 0; k < b.h.size(); ++k) {
    json row = json::array();
    for (size_t m = 0; m < b.h[k].size(); ++m) {
      row.push_back(to_string(b.h[k][m]));
      csv << k << ',' << m << ',' << to_string(b.h[k][m]) << '\n';
    }
    h.push_back(row);
    if (series_residual_index(e.family(), b, static_cast<int>(k)) >= 0) exact = false;
  }
  j["h"] = h;
  j["operator_residual_zero"] = exact;
  return emit(j, csv.str(), exact ? EXIT_OK : EXIT_ERROR);
}

json monodromy_json(const MonodromyResult& m) {
  json j;
  j["loop"] = m.loop;
  j["T_int"] = to_json(m.T_int);
  j["T"] = to_json(m.T, 20);
  j["rounding_residual"] = m.residual;
  j["symplectic_residual"] = m.symplectic_residual;
  j["symplectic_exact"] = m.symplectic_exact;
  j["unipotent"] = m.unipotent;
  j["nilpotency"] = m.nilpotency;
  j["rank_T_minus_I"] = m.rank_N;
  if (m.unipotent) j["N"] = to_json(m.N);
  j["halving_change"] = m.halving_change;
  return j;
}

int cmd_family_monodromy(const std::string& fam, const std::string& point, int vertices) {
  auto& e = engine(fam);
  auto m = monodromy_matrix(e, point, vertices);
  double tol = ctx.tol_or(1e-8);
  if (m.residual > tol)
    throw PrecisionError("monodromy entries are " + std::to_string(m.residual) +
                         " from integers; raise --precision or --nterms");
  json j = monodromy_json(m);
  j["schema"] = "hodge-moduli/monodromy/1";
  j["family"] = e.family().name;
  return emit(j, "", EXIT_OK);
}

std::string cache_key(const std::string& s) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << std::hash<std::string>{}(s);
  return os.str();
}

int cmd_family_frame(const std::string& fam, const std::string& zs, int order, const std::string& path) {
  auto& e = engine(fam);
  Cx z = parse_complex(zs);
  std::string key = e.family().name + "|" + zs + "|" + std::to_string(order) + "|" + path + "|" +
                    std::to_string(ctx.precision);
  const char* cdir = std::getenv("HODGE_MODULI_CACHE");
  fs::path cfile;
  if (cdir && *cdir) {
    cfile = fs::path(cdir) / ("frame-" + cache_key(key) + ".json");
    if (fs::exists(cfile)) {
      json j = read_json_file(cfile.string());
      if (j.value("key", "") == key) {
        j.erase("key");
        ctx.man.timings["cache"] = "hit";
        return emit(j, "", EXIT_OK);
      }
    }
  }
  PeriodFrame fr;
  if (path.empty()) {
    fr = period_frame(e, z, order);
  } else {
    std::vector<Cx> pts;
    std::stringstream ss(path);
    std::string item;
    while (std::getline(ss, item, ';'))
      if (!item.empty()) pts.push_back(parse_complex(item));
    if (pts.size() < 2) throw InputError("--path needs at least two points separated by ';'");
    if (static_cast<double>(abs(pts.back() - z)) > 1e-30) pts.push_back(z);
    int r = e.family().rank;
    auto start = period_frame(e, pts.front(), r - 1);
    auto cr = analytic_continuation(e, pts, start);
    Mat<Cx> data(r, r);
    for (int a = 0; a < r; ++a)
      for (int i = 0; i < r; ++i) data(i, a) = cr.frame.d[a][i];
    auto jets = e.extend_jets(z, data, std::max(order, r - 1));
    fr.z = z;
    fr.d.resize(order + 1);
    for (int a = 0; a <= order; ++a) {
      fr.d[a].resize(r);
      for (int i = 0; i < r; ++i) fr.d[a][i] = jets(i, a);
    }
    fr.err = cr.halving_change;
  }
  double tol = ctx.tol_or(std::pow(10.0, -static_cast<double>(ctx.precision) * 0.30103 / 2));
  if (fr.err > tol)
    throw PrecisionError("estimated relative error " + std::to_string(fr.err) + " exceeds --tol; raise --precision");
  json j;
  j["schema"] = "hodge-moduli/period-frame/1";
  j["family"] = e.family().name;
  j["z"] = to_json(z);
  j["error_estimate"] = fr.err;
  j["transversality_defect"] = transversality_defect(e, fr);
  json d = json::array();
  std::ostringstream csv;
  csv << "order,index,re,im\n";
  for (size_t a = 0; a < fr.d.size(); ++a) {
    json row = json::array();
    for (size_t i = 0; i < fr.d[a].size(); ++i) {
      row.push_back(to_json(fr.d[a][i]));
      csv << a << ',' << i << ',' << to_string(fr.d[a][i].re, 30) << ',' << to_string(fr.d[a][i].im, 30) << '\n';
    }
    d.push_back(row);
  }
  j["derivatives"] = d;
  if (!cfile.empty() && (ctx.format.empty() || ctx.format == "json")) {
    json c = j;
    c["key"] = key;
    write_atomic(cfile.string(), c.dump(1));
  }
  return emit(j, csv.str(), EXIT_OK);
}

// ---- geom ----

int emit_field(const FieldOnGrid& f, int code = EXIT_OK) {
  json j = parse_payload(f.to_json());
  return emit(j, f.to_csv(), code, "csv");
}

struct GeomArgs {
  std::string family = "mirror_quintic", grid, points, mode = "direct", bundle = "tangent";
  int k = -1, p = -1, q = -1, alpha = 1;
};

int cmd_geom(const std::string& what, const GeomArgs& a) {
  auto src = source(a.family);
  auto pts = points_from(a.grid, a.points);
  if (what == "metric") return emit_field(wp_metric(src, pts, ctx.jobs));
  if (what == "curvature") return emit_field(wp_curvature(src, pts, a.mode, ctx.jobs));
  if (what == "yukawa") return emit_field(yukawa_coupling(src, pts, ctx.jobs));
  if (what == "hodge-metric") return emit_field(hodge_metric_cy3(src, pts, ctx.jobs));
  if (what == "generalized") return emit_field(generalized_hodge_metric(src, pts, a.k < 0 ? src.weight : a.k, ctx.jobs));
  if (what == "bundle") {
    int p = a.p < 0 ? src.weight : a.p;
    int q = a.q < 0 ? src.weight - p : a.q;
    return emit_field(hodge_bundle_curvature(src, pts, p, q, ctx.jobs));
  }
  if (what == "chern") {
    auto f = chern_form(line_curvature(src, pts, a.bundle, ctx.jobs), a.alpha);
    json j = parse_payload(f.field.to_json());
    j["bidegree"] = {f.p, f.q};
    j["warnings"] = f.warnings;
    return emit(j, f.field.to_csv(), EXIT_OK, "csv");
  }
  if (what == "inequalities") {
    auto r = chern_inequality_check(src, pts, ctx.jobs);
    return emit(parse_payload(r.to_json()), "", r.holds() ? EXIT_OK : EXIT_NEGATIVE);
  }
  throw InputError("unknown geometry quantity: " + what);
}

// ---- cw ----

struct CwArgs {
  std::string family = "mirror_quintic", form = "c1-wp", domain, eps, value;
  bool extrapolate = false;
  int profile = 1, angular = 0, gauss = 0, subpanels = 0, annuli = 3;
  long max_den = 100;
  double r_hi = 1e-4;
};

std::string domain_kind(const CwArgs& a) {
  return a.domain.empty() ? (is_uhp(a.family) ? "modular" : "chart") : a.domain;
}

// the modular cusp region needs 2 eps < 1/2pi
std::vector<double> eps_for(const CwArgs& a) {
  if (!a.eps.empty()) return eps_for(a);
  if (domain_kind(a) == "modular") return {0.05, 0.025, 0.0125};
  return {0.1, 0.05, 0.02};
}

IntegrationDomain domain_for(const CwArgs& a, const JetSource& src) {
  IntegrationDomain d;
  std::string kind = domain_kind(a);
  if (kind == "modular") {
    if (!is_uhp(a.family)) throw InputError("the modular domain needs --family upper-half-plane");
    d = modular_domain();
  } else if (kind == "chart") {
    if (is_uhp(a.family)) throw InputError("the upper half plane has no punctured chart disc");
    d = chart_domain(src, src.engine);
  } else {
    throw InputError("domain must be chart or modular");
  }
  if (a.angular > 0) d.angular = a.angular;
  if (a.gauss > 0) d.gauss = a.gauss;
  if (a.subpanels > 0) d.subpanels = a.subpanels;
  return d;
}

int cmd_cw_integrate(const CwArgs& a) {
  auto src = source(a.family);
  auto dom = domain_for(a, src);
  auto eps = eps_for(a);
  auto r = integrate_regularized(geometry_form(src, a.form, ctx.jobs), dom, eps, a.extrapolate, a.profile);
  json j = parse_payload(r.to_json());
  j["schema"] = "hodge-moduli/regularized-integral/1";
  j["family"] = a.family;
  return emit(j, r.to_csv(), EXIT_OK, "csv");
}

double value_from_stdin() {
  std::string text((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
  auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw InputError("no value given and stdin is empty");
  if (text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw InputError(std::string("malformed JSON on stdin: ") + e.what());
    }
    for (auto key : {"limit", "value"})
      if (j.contains(key)) {
        auto& v = j[key];
        return v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>();
      }
    throw InputError("stdin JSON has no \"limit\" or \"value\"");
  }
  std::stringstream ss(text);
  std::string line;
  std::optional<double> single;
  int lines = 0;
  while (std::getline(ss, line)) {
    if (line.rfind("limit,", 0) == 0) return parse_doubles(line.substr(6, line.find(',', 6) - 6)).at(0);
    if (!line.empty()) {
      ++lines;
      try {
        single = std::stod(line);
      } catch (...) {
      }
    }
  }
  if (lines == 1 && single) return *single;
  throw InputError("stdin holds neither an integration table nor a number");
}

int cmd_cw_rationality(const CwArgs& a) {
  double v;
  if (!a.value.empty()) {
    auto d = parse_doubles(a.value);
    if (d.size() != 1) throw InputError("--value takes one number");
    v = d[0];
  } else {
    v = value_from_stdin();
  }
  auto r = rationality_detect(v, a.max_den, ctx.tol_or(1e-3));
  return emit(parse_payload(r.to_json()), "", r.rational ? EXIT_OK : EXIT_NEGATIVE);
}

int cmd_cw_vacua(const CwArgs& a) {
  auto src = source(a.family);
  auto dom = domain_for(a, src);
  auto r = flux_vacua_index(src, dom, eps_for(a), a.profile, ctx.jobs);
  json j = parse_payload(r.to_json());
  j["family"] = a.family;
  return emit(j, "", r.finite && r.bounded_by_volume ? EXIT_OK : EXIT_NEGATIVE);
}

int cmd_cw_l1(const CwArgs& a) {
  auto src = source(a.family);
  auto dom = domain_for(a, src);
  auto r = hodge_curvature_l1(src, dom, eps_for(a), a.profile, ctx.jobs);
  json j = parse_payload(r.to_json());
  j["family"] = a.family;
  return emit(j, "", r.uniformly_bounded ? EXIT_OK : EXIT_NEGATIVE);
}

int cmd_cw_pbound(const CwArgs& a) {
  if (a.annuli < 3) throw InputError("--annuli must be at least 3");
  std::function<std::vector<Cx>(const std::vector<Cx>&)> coef;
  std::string kind = "two-form";
  double scale = 1;
  if (a.form == "ds/s") {
    kind = "one-form-s";
    coef = [](const std::vector<Cx>& p) {
      std::vector<Cx> o;
      for (auto& x : p) o.push_back(Cx(1) / x);
      return o;
    };
  } else if (a.form == "dw") {
    kind = "regular";
    coef = [](const std::vector<Cx>& p) { return std::vector<Cx>(p.size(), Cx(1)); };
  } else {
    if (is_uhp(a.family)) throw InputError("pbound needs a family with a punctured chart");
    auto src = source(a.family);
    scale = to_real(src.engine->family().chart_scale).convert_to<double>();
    auto f = geometry_form(src, a.form, ctx.jobs);
    coef = [f](const std::vector<Cx>& p) {
      auto v = f.coef(p);
      return std::vector<Cx>(v.begin(), v.end());
    };
  }
  auto r = poincare_bounded_check(coef, kind, a.r_hi, a.annuli, scale);
  json j = parse_payload(r.to_json());
  j["form"] = a.form;
  j["coordinate_scale"] = scale;
  return emit(j, "", r.bounded ? EXIT_OK : EXIT_NEGATIVE);
}

const std::set<std::string> kCommands{"hodge", "mhs", "orbit", "family", "geom", "cw"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hodge structures, period maps and Chern-Weil integrals on moduli spaces"};
  app.require_subcommand(1);
  app.add_option("--precision", ctx.precision, "working precision in bits")->default_val(256)->check(CLI::Range(32u, 65536u));
  app.add_option("--tol", ctx.tol, "tolerance (command specific default)");
  app.add_option("--jobs", ctx.jobs, "worker threads for grid computations")->default_val(1)->check(CLI::Range(1, 256));
  app.add_option("--out", ctx.out, "output file (written atomically, manifest alongside)");
  app.add_option("--format", ctx.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::function<int()> action;
  auto sub = [&](CLI::App* parent, const std::string& name, const std::string& help) {
    auto* s = parent->add_subcommand(name, help);
    s->fallthrough();
    return s;
  };

  // hodge
  auto* hodge = sub(&app, "hodge", "pure polarized Hodge structures");
  hodge->require_subcommand(1);
  static std::string file, file2, vec, vec2, zs, path, center = "0", point = "LCS";
  static int p_arg = 0, q_arg = 1, trials = 100, nterms = 40, order = 3, vertices = 24, per_decade = 20, fit_decades = 3;
  static std::optional<int> center_i;
  static std::uint64_t seed = 1;
  static std::vector<double> range, yv, Kv;
  auto* hv = sub(hodge, "verify", "check both Hodge-Riemann relations");
  hv->add_option("file", file)->required();
  hv->callback([&] { action = [] { return cmd_hodge_verify(file); }; });
  auto* hd = sub(hodge, "decompose", "Hodge decomposition H^{p,q}");
  hd->add_option("file", file)->required();
  hd->callback([&] { action = [] { return cmd_hodge_decompose(file); }; });
  auto* hw = sub(hodge, "weil", "Weil operator");
  hw->add_option("file", file)->required();
  hw->callback([&] { action = [] { return cmd_hodge_weil(file); }; });
  auto* hi = sub(hodge, "inner", "Hodge inner product on F^p/F^q");
  hi->add_option("file", file)->required();
  hi->add_option("--p", p_arg)->required();
  hi->add_option("--q", q_arg)->required();
  hi->add_option("--v", vec)->required();
  hi->add_option("--w", vec2)->required();
  hi->callback([&] { action = [] { return cmd_hodge_inner(file, p_arg, q_arg, vec, vec2); }; });

  // mhs
  auto* mhs = sub(&app, "mhs", "weight filtrations and mixed Hodge structures");
  mhs->require_subcommand(1);
  auto* mw = sub(mhs, "weightfilt", "monodromy weight filtration W(N)");
  mw->add_option("--matrix", file, "JSON matrix of the nilpotent")->required();
  mw->add_option("--center", center_i);
  mw->callback([&] { action = [] { return cmd_mhs_weightfilt(file, center_i); }; });
  auto* mr = sub(mhs, "relative", "relative weight filtration W(N, W0)");
  mr->add_option("--matrix", file)->required();
  mr->add_option("--w0", file2)->required();
  mr->callback([&] { action = [] { return cmd_mhs_relative(file, file2); }; });
  auto* mv = sub(mhs, "verify", "check the MHS conditions (and polarization when N, S are given)");
  mv->add_option("file", file)->required();
  mv->add_option("--k", center_i, "weight of the polarization");
  mv->callback([&] { action = [] { return cmd_mhs_verify(file, center_i); }; });
  auto* md = sub(mhs, "delta", "Deligne splitting and delta");
  md->add_option("file", file)->required();
  md->callback([&] { action = [] { return cmd_mhs_delta(file); }; });
  auto* mc = sub(mhs, "cone", "independence of W(N) on the point of a cone");
  mc->add_option("file", file)->required();
  mc->add_option("--trials", trials)->default_val(100);
  mc->add_option("--seed", seed)->default_val(1);
  mc->callback([&] { action = [] { return cmd_mhs_cone(file, trials, seed); }; });

  // orbit
  auto* orbit = sub(&app, "orbit", "nilpotent orbits");
  orbit->require_subcommand(1);
  auto* ov = sub(orbit, "validate", "commuting, horizontal, isometric");
  ov->add_option("--cone", file, "cone file, or elliptic / product")->required();
  ov->callback([&] { action = [] { return cmd_orbit_validate(file); }; });
  auto* on = sub(orbit, "norms", "Hodge norm growth exponents along rays");
  on->add_option("--cone", file)->required();
  on->add_option("--vector", vec, "JSON vector")->required();
  on->add_option("--range", range, "log10 range of y, e.g. 2,6")->delimiter(',');
  on->add_option("--per-decade", per_decade)->default_val(20);
  on->add_option("--fit-decades", fit_decades)->default_val(3);
  on->callback([&] { action = [] { return cmd_orbit_norms(file, vec, range, per_decade, fit_decades); }; });
  auto* og = sub(orbit, "region", "classify a point of the cone into a region");
  og->add_option("--y", yv)->required()->delimiter(',');
  og->add_option("--K", Kv)->required()->delimiter(',');
  og->callback([&] { action = [] { return cmd_orbit_region(yv, Kv); }; });
  auto* op = sub(orbit, "point", "exp(sum z_j N_j) F at exact z");
  op->add_option("--cone", file)->required();
  op->add_option("--z", zs, "JSON list of Gaussian rationals")->required();
  op->callback([&] { action = [] { return cmd_orbit_point(file, zs); }; });
  auto* os2 = sub(orbit, "sl2", "Jacobson-Morozov triple");
  os2->add_option("--matrix", file)->required();
  os2->callback([&] { action = [] { return cmd_orbit_sl2(file); }; });

  // family
  static std::string fam = "mirror_quintic";
  auto* family = sub(&app, "family", "Picard-Fuchs period engine");
  family->require_subcommand(1);
  auto* fs1 = sub(family, "solve", "exact series solutions at a point");
  fs1->add_option("--family", fam)->default_val("mirror_quintic");
  fs1->add_option("--nterms", nterms)->default_val(40);
  fs1->add_option("--center", center)->default_val("0");
  fs1->callback([&] { action = [] { return cmd_family_solve(fam, nterms, center); }; });
  auto* fm = sub(family, "monodromy", "monodromy around a singular point");
  fm->add_option("--family", fam)->default_val("mirror_quintic");
  fm->add_option("--point", point, "label (LCS, conifold) or z value")->default_val("LCS");
  fm->add_option("--vertices", vertices)->default_val(24);
  fm->callback([&] { action = [] { return cmd_family_monodromy(fam, point, vertices); }; });
  auto* ff = sub(family, "frame", "period vector and derivatives");
  ff->add_option("--family", fam)->default_val("mirror_quintic");
  ff->add_option("--z", zs)->required();
  ff->add_option("--order", order)->default_val(3);
  ff->add_option("--path", path, "polyline 'z0;z1;...' for continuation");
  ff->callback([&] { action = [] { return cmd_family_frame(fam, zs, order, path); }; });

  // geom
  static GeomArgs ga;
  auto* geom = sub(&app, "geom", "Weil-Petersson and Hodge metrics on grids");
  geom->require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> geom_cmds{
      {"metric", "Weil-Petersson metric g"},
      {"curvature", "curvature R and K = -R/g^2, with cross-checks"},
      {"yukawa", "Yukawa coupling in the canonical gauge"},
      {"hodge-metric", "Hodge metric of the CY3 family"},
      {"generalized", "generalized Hodge metric of level k"},
      {"bundle", "curvature of the Hodge line bundle H^{p,q}, p + q = weight"},
      {"chern", "Chern form of a line bundle"},
      {"inequalities", "Chern-form inequalities against the WP form"}};
  for (auto& [what, help] : geom_cmds) {
    auto* g = sub(geom, what, help);
    g->add_option("--family", ga.family, "family name/file or upper-half-plane")->default_val("mirror_quintic");
    g->add_option("--grid", ga.grid, "annulus:r0,r1,nr,nphi or rect:x0,x1,y0,y1,nx,ny");
    g->add_option("--points", ga.points, "points 'a+bi;c+di'");
    if (what == "curvature") g->add_option("--mode", ga.mode)->check(CLI::IsMember({"direct", "yukawa"}));
    if (what == "generalized") g->add_option("--k", ga.k);
    if (what == "bundle") {
      g->add_option("--p", ga.p);
      g->add_option("--q", ga.q);
    }
    if (what == "chern") {
      g->add_option("--bundle", ga.bundle, "tangent, hodge-line or hodge:<p>");
      g->add_option("--alpha", ga.alpha);
    }
    g->callback([&, w = what] { action = [w] { return cmd_geom(w, ga); }; });
  }

  // cw
  static CwArgs ca;
  auto* cw = sub(&app, "cw", "Chern-Weil forms, regularized integrals and verdicts");
  cw->require_subcommand(1);
  auto add_integration = [&](CLI::App* c) {
    c->add_option("--family", ca.family)->default_val("mirror_quintic");
    c->add_option("--eps", ca.eps, "default 0.1,0.05,0.02 (chart) or 0.05,0.025,0.0125 (modular)");
    c->add_option("--profile", ca.profile)->default_val(1)->check(CLI::IsMember({1, 2}));
    c->add_option("--domain", ca.domain, "chart or modular");
    c->add_option("--angular", ca.angular);
    c->add_option("--gauss", ca.gauss);
    c->add_option("--subpanels", ca.subpanels);
  };
  auto* ci = sub(cw, "integrate", "cut-off regularized integral with its eps table");
  add_integration(ci);
  ci->add_option("--form", ca.form, "zero, omega-wp, c1-wp, omega-h, c1-h, abs-c1-h, flux, c1-hodge:<p>")->required();
  ci->add_flag("--extrapolate", ca.extrapolate);
  ci->callback([&] { action = [] { return cmd_cw_integrate(ca); }; });
  auto* cr = sub(cw, "rationality", "nearest rational with bounded denominator");
  cr->add_option("--value", ca.value, "value; read from stdin when absent");
  cr->add_option("--max-den", ca.max_den)->default_val(100);
  cr->callback([&] { action = [] { return cmd_cw_rationality(ca); }; });
  auto* cv = sub(cw, "vacua-index", "flux vacua index and Hodge volume");
  add_integration(cv);
  cv->callback([&] { action = [] { return cmd_cw_vacua(ca); }; });
  auto* cl = sub(cw, "l1", "L1 norm of c1 of the Hodge metric");
  add_integration(cl);
  cl->callback([&] { action = [] { return cmd_cw_l1(ca); }; });
  auto* cp = sub(cw, "pbound", "Poincare boundedness near the puncture");
  cp->add_option("--family", ca.family)->default_val("mirror_quintic");
  cp->add_option("--form", ca.form, "a named form, ds/s or dw")->required();
  cp->add_option("--annuli", ca.annuli)->default_val(3);
  cp->add_option("--r-hi", ca.r_hi, "outer radius in the natural coordinate")->default_val(1e-4);
  cp->callback([&] { action = [] { return cmd_cw_pbound(ca); }; });

  if (argc >= 2) {
    std::string first = argv[1];
    if (first.rfind("-", 0) != 0 && !kCommands.count(first)) {
      std::cerr << "error: unknown command '" << first << "' (expected hodge, mhs, orbit, family, geom or cw)\n";
      return EXIT_ERROR;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: bad arguments: " << e.what() << "\n";
    return EXIT_ERROR;
  }
  ctx.man.arguments.assign(argv + 1, argv + argc);
  for (auto* s = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front(); s;
       s = s->get_subcommands().empty() ? nullptr : s->get_subcommands().front())
    ctx.man.command += (ctx.man.command.empty() ? "" : " ") + s->get_name();
  ctx.man.precision = ctx.precision;
  ctx.man.versions = library_versions();
  add_conventions();
  if (!action) {
    std::cerr << "error: unknown command\n";
    return EXIT_ERROR;
  }
  try {
    PrecisionGuard pg(ctx.precision);
    return action();
  } catch (const PrecisionError& e) {
    std::cerr << "error: precision exhausted: " << e.what() << "\n";
  } catch (const InputError& e) {
    std::cerr << "error: invalid input: " << e.what() << "\n";
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON argument: " << e.what() << "\n";
  } catch (const StructuralError& e) {
    std::cerr << "error: structural failure: " << e.what() << "\n";
  } catch (const DegeneracyError& e) {
    std::cerr << "error: degenerate input: " << e.what() << "\n";
  } catch (const DomainError& e) {
    std::cerr << "error: outside the period domain: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return EXIT_ERROR;
}
