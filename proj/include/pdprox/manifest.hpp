#pragma once

#include <filesystem>
#include <variant>

#include "pdprox/graph.hpp"
#include "pdprox/problem.hpp"

namespace pdprox {

/// Problem manifest (JSON):
///   {
///     "A": "matrix.mtx" | "matrix.txt",
///     "b": "vector.txt",
///     "g": { "family": ..., ... },
///     "h": { "family": "linear"|"quadratic", ..., "beta": optional },
///     "fstar": optional number
///   }
/// Consensus manifest:
///   { "graph": "graph.txt", "g_i": [ { "family": ... }, ... ] }
///
/// g families: zero, linear {c}, quadratic {rho, a?}, l1 {weight},
/// box {lo, hi}, nonneg, point {a}, sum {blocks: [...]},
/// strongly_convex {rho, inner: {...}}.  Vector-valued parameters are JSON
/// arrays; lo/hi may be scalars (broadcast) and "inf"/"-inf".
/// Relative file paths resolve against the manifest's directory.
ConstrainedProblem parse_problem_manifest(const std::filesystem::path& path);
ConsensusProblem parse_consensus_manifest(const std::filesystem::path& path);

/// Dispatches on the presence of a "graph" field.
std::variant<ConstrainedProblem, ConsensusProblem> parse_manifest(
    const std::filesystem::path& path);

}  // namespace pdprox
