#include "quadest/benchlib.hpp"

#include <cstdlib>
#include <fstream>

#include "json.hpp"
#include "quadest/error.hpp"

namespace quadest {

namespace {

const char* const kManifests[] = {"table_1d.json", "table_2d.json", "table_3d.json", "table_4d.json"};

BenchmarkEntry parse_entry(const nlohmann::json& j) {
  BenchmarkEntry e;
  e.name = j.at("name").get<std::string>();
  try {
    e.source = j.at("source").get<std::string>();
    e.dimension = j.at("dimension").get<int>();
    e.expression = j.at("expression").get<std::string>();
    const auto& bounds = j.at("bounds");
    if (static_cast<int>(bounds.size()) != e.dimension) throw ValidationError("bounds do not match dimension");
    Eigen::VectorXd lo(e.dimension), hi(e.dimension);
    for (int i = 0; i < e.dimension; ++i) {
      lo[i] = bounds[i].at(0).get<double>();
      hi[i] = bounds[i].at(1).get<double>();
    }
    e.box = BoxDomain(lo, hi);
    if (j.contains("parameters")) {
      for (const auto& [k, v] : j.at("parameters").items()) e.parameters[k] = v.get<double>();
    }
    e.f = Expression::parse(e.expression, e.dimension, e.parameters);
    if (j.contains("x0")) {
      const auto v = j.at("x0").get<std::vector<double>>();
      if (static_cast<int>(v.size()) != e.dimension) throw ValidationError("x0 does not match dimension");
      e.x0 = Eigen::Map<const Eigen::VectorXd>(v.data(), e.dimension);
    }
    if (j.contains("constraints")) {
      for (const auto& row : j.at("constraints")) {
        const auto v = row.get<std::vector<double>>();
        if (static_cast<int>(v.size()) != e.dimension + 1) throw ValidationError("constraint has the wrong length");
        Halfspace h{Eigen::Map<const Eigen::VectorXd>(v.data(), e.dimension), v.back()};
        validate(h);
        e.constraints.push_back(std::move(h));
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError("entry '" + e.name + "': " + ex.what());
  } catch (const Error& ex) {
    throw ValidationError("entry '" + e.name + "': " + ex.what());
  }
  return e;
}

}  // namespace

std::filesystem::path corpus_dir() {
  if (const char* env = std::getenv("QUADEST_CORPUS_DIR"); env && *env) return env;
  return QUADEST_DEFAULT_CORPUS_DIR;
}

std::vector<BenchmarkEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(path.string() + ": " + ex.what());
  }
  if (!doc.is_array()) throw ValidationError(path.string() + ": expected an array of entries");
  std::vector<BenchmarkEntry> out;
  for (const auto& j : doc) out.push_back(parse_entry(j));
  return out;
}

std::vector<BenchmarkEntry> load_corpus() { return load_corpus(corpus_dir()); }

std::vector<BenchmarkEntry> load_corpus(const std::filesystem::path& dir) {
  std::vector<BenchmarkEntry> out;
  for (const char* file : kManifests) {
    auto part = load_manifest(dir / file);
    for (auto& e : part) out.push_back(std::move(e));
  }
  return out;
}

std::vector<BenchmarkEntry> pathological_set() { return load_manifest(corpus_dir() / "pathological.json"); }

BenchmarkEntry illustrative_example() {
  auto v = load_manifest(corpus_dir() / "illustrative.json");
  if (v.size() != 1) throw ValidationError("illustrative manifest must hold one entry");
  return std::move(v.front());
}

BenchmarkEntry find_entry(std::string_view name) {
  for (auto& e : load_corpus()) {
    if (e.name == name) return std::move(e);
  }
  for (auto& e : pathological_set()) {
    if (e.name == name) return std::move(e);
  }
  BenchmarkEntry ill = illustrative_example();
  if (ill.name == name) return ill;
  throw ValidationError("unknown benchmark entry '" + std::string(name) + "'");
}

}  // namespace quadest
