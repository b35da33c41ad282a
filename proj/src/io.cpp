#include "hm/io.hpp"

#include <boost/version.hpp>
#include <Eigen/Core>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace hm {

Q q_from_json(const json& j) {
  if (j.is_number_integer()) return Q(j.get<long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_float()) {
    double d = j.get<double>();
    if (d == std::floor(d) && std::abs(d) < 1e15) return Q(static_cast<long>(d));
    throw InputError("non-integer numbers must be written as \"p/q\" strings: " + j.dump());
  }
  throw InputError("expected a rational, got " + j.dump());
}

QI qi_from_json(const json& j) {
  if (j.is_object()) {
    Q re = j.contains("re") ? q_from_json(j["re"]) : Q(0);
    Q im = j.contains("im") ? q_from_json(j["im"]) : Q(0);
    return QI(re, im);
  }
  return QI(q_from_json(j));
}

json to_json(const Q& q) { return to_string(q); }

json to_json(const QI& q) {
  if (q.is_real()) return to_string(q.re);
  return json{{"re", to_string(q.re)}, {"im", to_string(q.im)}};
}

json to_json(const Cx& z, int digits) { return json{{"re", to_string(z.re, digits)}, {"im", to_string(z.im, digits)}}; }

MatQ matq_from_json(const json& j) {
  const json& a = j.is_object() && j.contains("matrix") ? j["matrix"] : j;
  if (!a.is_array() || a.empty() || !a[0].is_array()) throw InputError("matrix must be a non-empty array of rows");
  int r = static_cast<int>(a.size()), c = static_cast<int>(a[0].size());
  MatQ m(r, c);
  for (int i = 0; i < r; ++i) {
    if (!a[i].is_array() || static_cast<int>(a[i].size()) != c) throw InputError("matrix rows have unequal length");
    for (int k = 0; k < c; ++k) m(i, k) = qi_from_json(a[i][k]);
  }
  return m;
}

VecQ vecq_from_json(const json& j, int n) {
  if (!j.is_array()) throw InputError("vector must be an array");
  if (n >= 0 && static_cast<int>(j.size()) != n)
    throw InputError("vector has length " + std::to_string(j.size()) + ", expected " + std::to_string(n));
  VecQ v;
  for (auto& x : j) v.push_back(qi_from_json(x));
  return v;
}

json to_json(const MatQ& m) {
  json a = json::array();
  for (int i = 0; i < m.r; ++i) {
    json row = json::array();
    for (int k = 0; k < m.c; ++k) row.push_back(to_json(m(i, k)));
    a.push_back(row);
  }
  return a;
}

json to_json(const VecQ& v) {
  json a = json::array();
  for (auto& x : v) a.push_back(to_json(x));
  return a;
}

json to_json(const Mat<Cx>& m, int digits) {
  json a = json::array();
  for (int i = 0; i < m.r; ++i) {
    json row = json::array();
    for (int k = 0; k < m.c; ++k) row.push_back(to_json(m(i, k), digits));
    a.push_back(row);
  }
  return a;
}

json to_json(const SubQ& s) {
  json b = json::array();
  for (auto& v : s.vectors()) b.push_back(to_json(v));
  return b;
}

static SubQ subspace_from_json(const json& b, int n) {
  if (b.is_string() && b.get<std::string>() == "full") return SubQ::full(n);
  if (!b.is_array()) throw InputError("subspace basis must be an array of vectors or \"full\"");
  std::vector<VecQ> vs;
  for (auto& v : b) vs.push_back(vecq_from_json(v, n));
  return SubQ::span(vs, n);
}

FiltQ filtration_from_json(const json& j, Direction d, int n) {
  FiltQ f(d, n);
  if (j.is_array()) {
    for (auto& e : j) {
      if (!e.is_object() || !e.contains("index") || !e.contains("basis"))
        throw InputError("filtration entries need \"index\" and \"basis\"");
      f.set(e["index"].get<int>(), subspace_from_json(e["basis"], n));
    }
  } else if (j.is_object()) {
    for (auto& [k, v] : j.items()) {
      int l;
      try {
        l = std::stoi(k);
      } catch (...) {
        throw InputError("filtration index is not an integer: " + k);
      }
      f.set(l, subspace_from_json(v, n));
    }
  } else {
    throw InputError("filtration must be an array or an object");
  }
  std::string why;
  if (!f.valid(&why)) throw InputError("filtration is not nested: " + why);
  return f;
}

json to_json(const FiltQ& f) {
  json j;
  j["direction"] = f.direction() == Direction::Increasing ? "increasing" : "decreasing";
  json pieces = json::array();
  for (auto& [l, s] : f.pieces()) pieces.push_back(json{{"index", l}, {"dim", s.dim()}, {"basis", to_json(s)}});
  j["pieces"] = pieces;
  j["jumps"] = f.jumps();
  return j;
}

BilinearForm<QI> form_from_json(const json& j, int weight) {
  BilinearForm<QI> S;
  if (j.is_object() && j.contains("gram")) {
    S.gram = matq_from_json(j["gram"]);
    std::string p = j.value("parity", weight % 2 ? "skew" : "symmetric");
    if (p == "skew")
      S.parity = BilinearForm<QI>::Parity::Skew;
    else if (p == "symmetric")
      S.parity = BilinearForm<QI>::Parity::Symmetric;
    else
      throw InputError("parity must be skew or symmetric");
  } else {
    S.gram = matq_from_json(j);
    S.parity = weight % 2 ? BilinearForm<QI>::Parity::Skew : BilinearForm<QI>::Parity::Symmetric;
  }
  if (S.gram.r != S.gram.c) throw InputError("S must be square");
  if (!S.parity_ok()) throw InputError("S does not have the parity (-1)^weight");
  return S;
}

static int dimension_of(const json& j) {
  if (!j.contains("dimension")) throw InputError("missing \"dimension\"");
  int n = j["dimension"].get<int>();
  if (n <= 0) throw InputError("dimension must be positive");
  return n;
}

static MatQ conj_of(const json& j, int n) {
  if (!j.contains("conjugation")) return MatQ::identity(n);
  MatQ c = matq_from_json(j["conjugation"]);
  if (c.r != n || c.c != n) throw InputError("conjugation matrix has the wrong size");
  return c;
}

PureHodgeStructure<QI> hodge_from_json(const json& j) {
  PureHodgeStructure<QI> hs;
  hs.n = dimension_of(j);
  if (!j.contains("weight")) throw InputError("missing \"weight\"");
  hs.weight = j["weight"].get<int>();
  hs.conj_op = conj_of(j, hs.n);
  if (!j.contains("F")) throw InputError("missing \"F\"");
  hs.F = filtration_from_json(j["F"], Direction::Decreasing, hs.n);
  if (!j.contains("S")) throw InputError("missing \"S\"");
  hs.S = form_from_json(j["S"], hs.weight);
  if (hs.S.gram.r != hs.n) throw InputError("S has the wrong size");
  return hs;
}

MixedHodgeStructure mhs_from_json(const json& j) {
  MixedHodgeStructure m;
  m.n = dimension_of(j);
  m.conj_op = conj_of(j, m.n);
  if (!j.contains("W") || !j.contains("F")) throw InputError("MHS file needs \"W\" and \"F\"");
  m.W = filtration_from_json(j["W"], Direction::Increasing, m.n);
  m.F = filtration_from_json(j["F"], Direction::Decreasing, m.n);
  if (j.contains("S")) {
    m.S = form_from_json(j["S"], j.value("weight", 1));
    if (m.S->gram.r != m.n) throw InputError("S has the wrong size");
  }
  if (j.contains("nilpotents"))
    for (auto& N : j["nilpotents"]) {
      m.nilpotents.push_back(matq_from_json(N));
      if (m.nilpotents.back().r != m.n || m.nilpotents.back().c != m.n) throw InputError("nilpotent has the wrong size");
    }
  return m;
}

NilpotentCone cone_from_json(const json& j) {
  NilpotentCone c;
  c.n = dimension_of(j);
  if (!j.contains("weight")) throw InputError("missing \"weight\"");
  c.weight = j["weight"].get<int>();
  c.conj_op = conj_of(j, c.n);
  if (!j.contains("N") || !j["N"].is_array() || j["N"].empty()) throw InputError("cone needs a non-empty \"N\" list");
  for (auto& N : j["N"]) {
    c.N.push_back(matq_from_json(N));
    if (c.N.back().r != c.n || c.N.back().c != c.n) throw InputError("nilpotent has the wrong size");
  }
  if (!j.contains("F") || !j.contains("S")) throw InputError("cone needs \"F\" and \"S\"");
  c.F = filtration_from_json(j["F"], Direction::Decreasing, c.n);
  c.S = form_from_json(j["S"], c.weight);
  if (c.S.gram.r != c.n) throw InputError("S has the wrong size");
  return c;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::string& path) {
  std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in " + path + ": " + e.what());
  }
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  if (!fs::exists(dir)) fs::create_directories(dir);
  fs::path tmp = dir / ("." + target.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw InputError("cannot move output into place: " + path);
  }
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    size_t pos;
    double v;
    try {
      v = std::stod(item, &pos);
    } catch (...) {
      throw InputError("not a number: " + item);
    }
    if (pos != item.size()) throw InputError("not a number: " + item);
    out.push_back(v);
  }
  return out;
}

Cx parse_complex(const std::string& s0) {
  std::string s;
  for (char ch : s0)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw InputError("empty complex number");
  auto real_of = [&](const std::string& t) {
    if (t.empty() || t == "+") return Real(1);
    if (t == "-") return Real(-1);
    size_t pos;
    try {
      std::stod(t, &pos);
    } catch (...) {
      throw InputError("not a complex number: " + s0);
    }
    if (pos != t.size()) throw InputError("not a complex number: " + s0);
    return Real(t.c_str());  // full-precision decimal parse
  };
  auto comma = s.find(',');
  if (comma != std::string::npos) return Cx(real_of(s.substr(0, comma)), real_of(s.substr(comma + 1)));
  if (s.back() != 'i' && s.back() != 'j') return Cx(real_of(s));
  std::string body = s.substr(0, s.size() - 1);
  // split at the last sign that is not part of an exponent
  size_t split = std::string::npos;
  for (size_t k = body.size(); k-- > 1;)
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  if (split == std::string::npos) return Cx(Real(0), real_of(body));
  return Cx(real_of(body.substr(0, split)), real_of(body.substr(split)));
}

json RunManifest::stable() const {
  json j;
  j["command"] = command;
  j["arguments"] = arguments;
  j["precision"] = precision;
  j["conventions"] = conventions;
  j["versions"] = versions;
  return j;
}

json RunManifest::full() const {
  json j = stable();
  j["timings"] = timings;
  return j;
}

json library_versions() {
  json v;
  v["hodge_moduli"] = "0.1.0";
  v["gmp"] = gmp_version;
  v["mpfr"] = MPFR_VERSION_STRING;
  v["boost"] = std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
               std::to_string(BOOST_VERSION % 100);
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                       "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  return v;
}

}  // namespace hm
