#include "pdprox/manifest.hpp"

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace pdprox {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ParseError("manifest field '" + field + "': " + what);
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open manifest: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("manifest " + path.string() + ": " + e.what());
  }
}

const json& require(const json& j, const std::string& field,
                    const std::string& prefix) {
  auto it = j.find(field);
  if (it == j.end()) fail(prefix.empty() ? field : prefix + "." + field, "missing");
  return *it;
}

double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

double extended_number_at(const json& j, const std::string& field) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    fail(field, "expected a number or \"inf\"/\"-inf\"");
  }
  return number_at(j, field);
}

VectorXd vector_at(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a non-empty array");
  VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Index>(i)] = extended_number_at(j[i], field);
  }
  return v;
}

/// Scalar broadcasts to a constant vector of length dim.
VectorXd vector_or_fill(const json& j, Index dim, const std::string& field) {
  if (j.is_array()) {
    VectorXd v = vector_at(j, field);
    if (dim > 0 && v.size() != dim) fail(field, "wrong length");
    return v;
  }
  if (dim <= 0) fail(field, "cannot broadcast a scalar without a known dimension");
  return VectorXd::Constant(dim, extended_number_at(j, field));
}

Index dim_of(const json& j, Index dim_hint, const std::string& field) {
  if (auto it = j.find("dim"); it != j.end()) {
    const double d = number_at(*it, field + ".dim");
    if (d < 1) fail(field + ".dim", "must be >= 1");
    return static_cast<Index>(d);
  }
  if (dim_hint > 0) return dim_hint;
  fail(field, "needs an explicit \"dim\"");
}

ProxPtr parse_prox(const json& j, Index dim_hint, const std::string& field) {
  if (!j.is_object()) fail(field, "expected an object");
  const auto family = require(j, "family", field);
  if (!family.is_string()) fail(field + ".family", "expected a string");
  const std::string name = family.get<std::string>();

  if (name == "zero") {
    return std::make_shared<ZeroFunction>(dim_of(j, dim_hint, field));
  }
  if (name == "linear") {
    return std::make_shared<LinearFunction>(
        vector_or_fill(require(j, "c", field), dim_hint, field + ".c"));
  }
  if (name == "quadratic") {
    const double rho = number_at(require(j, "rho", field), field + ".rho");
    VectorXd a = j.contains("a")
                     ? vector_or_fill(j["a"], dim_hint, field + ".a")
                     : VectorXd::Zero(dim_of(j, dim_hint, field));
    return std::make_shared<QuadraticFunction>(rho, std::move(a));
  }
  if (name == "l1") {
    const double w = number_at(require(j, "weight", field), field + ".weight");
    return std::make_shared<L1Norm>(dim_of(j, dim_hint, field), w);
  }
  if (name == "box") {
    VectorXd lo = vector_or_fill(require(j, "lo", field), dim_hint, field + ".lo");
    VectorXd hi = vector_or_fill(require(j, "hi", field), lo.size(), field + ".hi");
    return std::make_shared<BoxIndicator>(std::move(lo), std::move(hi));
  }
  if (name == "nonneg") {
    return std::make_shared<BoxIndicator>(
        BoxIndicator::nonnegative(dim_of(j, dim_hint, field)));
  }
  if (name == "point") {
    return std::make_shared<PointIndicator>(
        vector_or_fill(require(j, "a", field), dim_hint, field + ".a"));
  }
  if (name == "sum") {
    const auto& blocks = require(j, "blocks", field);
    if (!blocks.is_array() || blocks.empty()) {
      fail(field + ".blocks", "expected a non-empty array");
    }
    std::vector<ProxPtr> parts;
    for (size_t i = 0; i < blocks.size(); ++i) {
      // Blocks must size themselves ("dim" or vector parameters).
      parts.push_back(parse_prox(blocks[i], 0,
                                 field + ".blocks[" + std::to_string(i) + "]"));
    }
    return std::make_shared<SeparableSum>(std::move(parts));
  }
  if (name == "strongly_convex") {
    const double rho = number_at(require(j, "rho", field), field + ".rho");
    ProxPtr inner =
        parse_prox(require(j, "inner", field), dim_hint, field + ".inner");
    return std::make_shared<StronglyConvexified>(std::move(inner), rho);
  }
  fail(field + ".family", "unknown family '" + name + "'");
}

SmoothPtr parse_smooth(const json& j, Index dim, const std::string& field) {
  if (!j.is_object()) fail(field, "expected an object");
  const auto family = require(j, "family", field);
  const std::string name = family.get<std::string>();
  if (name == "linear") {
    return std::make_shared<LinearSmoothTerm>(
        vector_or_fill(require(j, "c", field), dim, field + ".c"));
  }
  if (name == "quadratic") {
    const double rho = number_at(require(j, "rho", field), field + ".rho");
    VectorXd a = j.contains("a") ? vector_or_fill(j["a"], dim, field + ".a")
                                 : VectorXd::Zero(dim);
    return std::make_shared<QuadraticSmoothTerm>(rho, std::move(a));
  }
  fail(field + ".family", "unknown smooth family '" + name + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const json& j, const std::string& field) {
  if (!j.is_string()) fail(field, "expected a file path string");
  std::filesystem::path p = j.get<std::string>();
  return p.is_absolute() ? p : base / p;
}

ConstrainedProblem problem_from_json(const json& j,
                                     const std::filesystem::path& base) {
  // Check all required fields before touching the filesystem, so a missing
  // field is reported as such even when file paths are also wrong.
  const json& a_field = require(j, "A", "");
  const json& b_field = require(j, "b", "");
  require(j, "g", "");
  MapPtr a = read_map_file(resolve(base, a_field, "A"));
  VectorXd b = read_vector_file(resolve(base, b_field, "b"));
  if (b.size() != a->rows()) {
    fail("b", "has length " + std::to_string(b.size()) + " but A has " +
                  std::to_string(a->rows()) + " rows");
  }
  ProxPtr g = parse_prox(require(j, "g", ""), a->cols(), "g");
  if (g->dim() != a->cols()) {
    fail("g", "has dimension " + std::to_string(g->dim()) + " but A has " +
                  std::to_string(a->cols()) + " columns");
  }
  SmoothPtr h;
  if (j.contains("h")) h = parse_smooth(j["h"], a->cols(), "h");
  ConstrainedProblem p(std::move(a), std::move(b), std::move(g), std::move(h));
  if (j.contains("fstar")) p.set_fstar(number_at(j["fstar"], "fstar"));
  return p;
}

ConsensusProblem consensus_from_json(const json& j,
                                     const std::filesystem::path& base) {
  ConsensusProblem cp;
  cp.graph = Graph::from_file(resolve(base, require(j, "graph", ""), "graph"));
  const auto& list = require(j, "g_i", "");
  if (!list.is_array()) fail("g_i", "expected an array");
  for (size_t i = 0; i < list.size(); ++i) {
    cp.node_objectives.push_back(parse_prox(
        list[i], cp.graph.block_dim, "g_i[" + std::to_string(i) + "]"));
  }
  try {
    cp.validate();
  } catch (const ConfigRejected& e) {
    throw ParseError(std::string("consensus manifest: ") + e.what());
  }
  return cp;
}

}  // namespace

ConstrainedProblem parse_problem_manifest(const std::filesystem::path& path) {
  return problem_from_json(load_json(path), path.parent_path());
}

ConsensusProblem parse_consensus_manifest(const std::filesystem::path& path) {
  return consensus_from_json(load_json(path), path.parent_path());
}

std::variant<ConstrainedProblem, ConsensusProblem> parse_manifest(
    const std::filesystem::path& path) {
  const json j = load_json(path);
  if (j.contains("graph")) {
    return consensus_from_json(j, path.parent_path());
  }
  return problem_from_json(j, path.parent_path());
}

}  // namespace pdprox
