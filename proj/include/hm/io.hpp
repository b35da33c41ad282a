#pragma once

#include "hm/orbits.hpp"

#include <json.hpp>

#include <chrono>
#include <string>
#include <vector>

namespace hm {

using json = nlohmann::ordered_json;

// Exact scalars: integers, "p/q" strings, or {"re": .., "im": ..}.
Q q_from_json(const json& j);
QI qi_from_json(const json& j);
json to_json(const Q& q);
json to_json(const QI& q);
json to_json(const Cx& z, int digits = 30);

MatQ matq_from_json(const json& j);  // array of rows
VecQ vecq_from_json(const json& j, int n = -1);
json to_json(const MatQ& m);
json to_json(const VecQ& v);
json to_json(const Mat<Cx>& m, int digits = 30);

// Filtration pieces as [{"index": l, "basis": [[...], ...]}, ...] or {"l": [[...]], ...};
// "basis": "full" stands for the whole space.
FiltQ filtration_from_json(const json& j, Direction d, int n);
json to_json(const FiltQ& f);
json to_json(const SubQ& s);

BilinearForm<QI> form_from_json(const json& j, int weight);

// {weight, dimension, conjugation?, F, S}
PureHodgeStructure<QI> hodge_from_json(const json& j);
// {dimension, conjugation?, W, F, S?, nilpotents?}
MixedHodgeStructure mhs_from_json(const json& j);
// {dimension, weight, conjugation?, N: [...], F, S}
NilpotentCone cone_from_json(const json& j);

json read_json_file(const std::string& path);
std::string read_text(const std::string& path);
// write to a temporary sibling and rename over the target
void write_atomic(const std::string& path, const std::string& content);

// comma-separated numbers; complex points as "re+imi", "re,im" pairs separated by ';'
std::vector<double> parse_doubles(const std::string& s);
Cx parse_complex(const std::string& s);

struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  unsigned precision = 256;
  json conventions = json::object();
  json versions = json::object();
  json timings = json::object();
  // without timings: safe to embed in deterministic outputs
  json stable() const;
  json full() const;
};
json library_versions();

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace hm
