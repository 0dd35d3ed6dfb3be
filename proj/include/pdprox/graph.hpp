#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "pdprox/linear_map.hpp"
#include "pdprox/prox.hpp"
#include "pdprox/solvers.hpp"

namespace pdprox {

/// Connected simple graph of computing nodes, each carrying a block of
/// dimension block_dim.
struct Graph {
  int node_count = 0;
  int block_dim = 1;
  std::vector<LaplacianMap::Edge> edges;

  /// Text format: first line "n d", then one "i j [w]" line per edge,
  /// 0-indexed, weights positive (default 1).
  static Graph from_file(const std::filesystem::path& path);

  bool connected() const;

  /// Throws ConfigRejected unless the graph is simple and connected.
  void validate() const;
};

/// Laplacian of a validated graph as a blockwise map on R^{n*d}.  Rejects
/// disconnected graphs: their Laplacian kernel is larger than the consensus
/// subspace, so Lx = 0 no longer characterizes x_1 = ... = x_n.
std::shared_ptr<const LaplacianMap> laplacian(const Graph& graph);

/// min sum_i g_i(x_i)  s.t.  x_1 = ... = x_n.
struct ConsensusProblem {
  Graph graph;
  std::vector<ProxPtr> node_objectives;  // one per node, each on R^d

  void validate() const;
};

/// max_i || x_i - mean(x) || over the node blocks.
double consensus_gap(const VectorXd& x, int node_count, int block_dim);

struct ConsensusResult {
  Trace trace;
  long comm_count = 0;  // Laplacian applications of the algorithm itself
  long iterations = 0;
  VectorXd x_final;
  VectorXd s_final;
};

/// One-communication primal scheme on the constraint sqrt(L) x = 0,
/// realized through L only:
///   x <- prox_{tau g}(x - lambda L(x + k s));  s <- (x_next + k s)/(k+1).
/// Stepsize condition tau sigma ||L|| < 1.  Stops early once the consensus
/// gap of x falls to stop_gap (when positive).
ConsensusResult run_consensus(const ConsensusProblem& cp, double lambda,
                              double tau, long max_iters, long record_every = 1,
                              double stop_gap = 0.0);

/// Baseline: standard PDHG on the constraint L x = 0.  Two communications
/// per iteration (L xbar and L y); condition tau sigma ||L||^2 < 1.
ConsensusResult run_consensus_pdhg_baseline(const ConsensusProblem& cp,
                                            double lambda, double tau,
                                            long max_iters,
                                            long record_every = 1,
                                            double stop_gap = 0.0);

}  // namespace pdprox
