#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "pdprox/manifest.hpp"

using namespace pdprox;
namespace fs = std::filesystem;

namespace {

fs::path fixture_dir() {
  const char* env = std::getenv("PDPROX_FIXTURES");
  REQUIRE(env != nullptr);
  return fs::path(env);
}

fs::path write_temp(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / "pdprox_manifest_test";
  fs::create_directories(dir);
  const fs::path file = dir / name;
  std::ofstream out(file);
  out << body;
  return file;
}

}  // namespace

TEST_CASE("canonical manifest parses to the 1-D fixture") {
  const auto p = parse_problem_manifest(fixture_dir() / "canonical.json");
  CHECK(p.dim() == 1);
  CHECK(p.codim() == 1);
  CHECK(p.f_value(VectorXd::Constant(1, 1.0)) == 0.0);
  CHECK(p.g().value(VectorXd::Constant(1, 2.0)) == doctest::Approx(2.0));
  CHECK(p.gamma() == 1.0);
}

TEST_CASE("lasso manifest: sparse matrix, l1 objective") {
  const auto p = parse_problem_manifest(fixture_dir() / "lasso.json");
  CHECK(p.codim() == 15);
  CHECK(p.dim() == 10);
  CHECK(p.gamma() == 0.0);
}

TEST_CASE("manifest with a smooth term and explicit fstar") {
  const auto p = parse_problem_manifest(fixture_dir() / "smooth.json");
  CHECK(p.has_h());
  CHECK(p.h().beta() == doctest::Approx(0.5));
  CHECK(p.fstar_cached());
  CHECK(p.fstar() == 0.0);
}

TEST_CASE("consensus manifest for the 5-node path") {
  const auto cp = parse_consensus_manifest(fixture_dir() / "consensus_p5.json");
  CHECK(cp.graph.node_count == 5);
  CHECK(cp.graph.block_dim == 1);
  CHECK(cp.node_objectives.size() == 5);
  CHECK(cp.node_objectives[2]->value(VectorXd::Constant(1, 3.0)) == 0.0);
}

TEST_CASE("parse_manifest dispatches on the graph field") {
  auto either = parse_manifest(fixture_dir() / "canonical.json");
  CHECK(std::holds_alternative<ConstrainedProblem>(either));
  auto consensus = parse_manifest(fixture_dir() / "consensus_p5.json");
  CHECK(std::holds_alternative<ConsensusProblem>(consensus));
}

TEST_CASE("missing fields are named in the error") {
  write_temp("A.txt", "1 1\n2\n");
  const auto file = write_temp("missing_b.json", R"({
    "A": "A.txt",
    "g": {"family": "zero", "dim": 1}
  })");
  try {
    parse_problem_manifest(file);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("'b'") != std::string::npos);
  }
}

TEST_CASE("unknown family is named with its field path") {
  write_temp("A.txt", "1 1\n2\n");
  write_temp("b.txt", "2\n");
  const auto file = write_temp("bad_family.json", R"({
    "A": "A.txt",
    "b": "b.txt",
    "g": {"family": "mystery"}
  })");
  try {
    parse_problem_manifest(file);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string what = e.what();
    CHECK(what.find("g.family") != std::string::npos);
    CHECK(what.find("mystery") != std::string::npos);
  }
}

TEST_CASE("dimension mismatch between g and A is rejected") {
  write_temp("A.txt", "1 1\n2\n");
  write_temp("b.txt", "2\n");
  const auto file = write_temp("bad_dim.json", R"({
    "A": "A.txt",
    "b": "b.txt",
    "g": {"family": "l1", "weight": 1.0, "dim": 3}
  })");
  CHECK_THROWS_AS(parse_problem_manifest(file), ParseError);
}

TEST_CASE("sum and strongly_convex families parse") {
  write_temp("A2.txt", "1 3\n1 2 3\n");
  write_temp("b1.txt", "1\n");
  const auto file = write_temp("composite.json", R"({
    "A": "A2.txt",
    "b": "b1.txt",
    "g": {"family": "sum", "blocks": [
      {"family": "l1", "weight": 0.5, "dim": 2},
      {"family": "strongly_convex", "rho": 2.0,
       "inner": {"family": "nonneg", "dim": 1}}
    ]}
  })");
  const auto p = parse_problem_manifest(file);
  CHECK(p.dim() == 3);
  CHECK(p.g().strong_convexity() == 0.0);  // min(0, 2)
  VectorXd x(3);
  x << 1.0, -1.0, 2.0;
  CHECK(p.g().value(x) == doctest::Approx(1.0 + 0.5 * 2.0 * 4.0));
}
