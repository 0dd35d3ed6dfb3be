#include "pdprox/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

namespace pdprox {

Graph Graph::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file: " + path.string());
  Graph g;
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(path.string() + ": empty graph file");
  }
  {
    std::istringstream header(line);
    if (!(header >> g.node_count >> g.block_dim) || g.node_count < 1 ||
        g.block_dim < 1) {
      throw ParseError(path.string() + ": expected first line 'n d'");
    }
  }
  while (std::getline(in, line)) {
    std::istringstream row(line);
    int i = 0;
    int j = 0;
    if (!(row >> i >> j)) {
      if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      throw ParseError(path.string() + ": bad edge line '" + line + "'");
    }
    double w = 1.0;
    row >> w;
    g.edges.push_back({i, j, w});
  }
  g.validate();
  return g;
}

bool Graph::connected() const {
  std::vector<std::vector<int>> adj(node_count);
  for (const auto& e : edges) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  std::vector<bool> seen(node_count, false);
  std::vector<int> stack = {0};
  seen[0] = true;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == node_count;
}

void Graph::validate() const {
  if (node_count < 1 || block_dim < 1) {
    throw ConfigRejected("graph needs node_count >= 1 and block_dim >= 1");
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= node_count || e.j >= node_count) {
      throw ConfigRejected("graph edge endpoint out of range");
    }
    if (e.i == e.j) throw ConfigRejected("graph must be simple: self-loop found");
    if (e.weight <= 0.0) throw ConfigRejected("edge weights must be positive");
    auto key = std::minmax(e.i, e.j);
    if (!seen.insert(key).second) {
      throw ConfigRejected("graph must be simple: duplicate edge found");
    }
  }
  if (!connected()) {
    throw ConfigRejected(
        "graph is disconnected: Lx = 0 does not characterize consensus");
  }
}

std::shared_ptr<const LaplacianMap> laplacian(const Graph& graph) {
  graph.validate();
  return std::make_shared<LaplacianMap>(graph.node_count, graph.block_dim,
                                        graph.edges);
}

void ConsensusProblem::validate() const {
  graph.validate();
  if (node_objectives.size() != static_cast<size_t>(graph.node_count)) {
    throw ConfigRejected("need one objective per graph node");
  }
  for (const auto& g : node_objectives) {
    if (!g || g->dim() != graph.block_dim) {
      throw ConfigRejected("node objectives must act on R^block_dim");
    }
  }
}

double consensus_gap(const VectorXd& x, int node_count, int block_dim) {
  if (x.size() != static_cast<Index>(node_count) * block_dim) {
    throw DimensionError("consensus_gap: x has wrong length");
  }
  VectorXd mean = VectorXd::Zero(block_dim);
  for (int v = 0; v < node_count; ++v) {
    mean += x.segment(static_cast<Index>(v) * block_dim, block_dim);
  }
  mean /= static_cast<double>(node_count);
  double gap = 0.0;
  for (int v = 0; v < node_count; ++v) {
    gap = std::max(
        gap,
        (x.segment(static_cast<Index>(v) * block_dim, block_dim) - mean).norm());
  }
  return gap;
}

namespace {

struct ConsensusSetup {
  std::shared_ptr<const LaplacianMap> lap;
  ProxPtr g;
  double norm;
};

ConsensusSetup setup(const ConsensusProblem& cp) {
  cp.validate();
  auto lap = laplacian(cp.graph);
  auto g = std::make_shared<SeparableSum>(cp.node_objectives);
  const double norm = estimate_operator_norm(*lap).value;
  return {std::move(lap), std::move(g), norm};
}

/// Records one trace row.  f is the scheme's own constraint penalty
/// (0.5 <Ls, s> for the one-communication scheme, 0.5 ||Ls||^2 for the
/// baseline); diagnostic L applications are not communications.
struct ConsensusRecorder {
  Trace& trace;
  const ConsensusProblem& cp;
  const LaplacianMap& lap;
  const ProxFunction& g;
  bool quadratic_penalty;  // baseline: f = 0.5 ||Lx||^2
  long record_every;
  long max_iters;

  void operator()(long k, const VectorXd& x, const VectorXd& s, double dx,
                  bool force = false) {
    if (!force && k != 0 && k != max_iters &&
        (record_every <= 0 || k % record_every != 0)) {
      return;
    }
    const auto f_of = [&](const VectorXd& v) {
      const VectorXd lv = lap.apply(v);
      return quadratic_penalty ? 0.5 * lv.squaredNorm() : 0.5 * v.dot(lv);
    };
    const double fs = f_of(s);
    trace.k.push_back(k);
    trace.f_x.push_back(f_of(x));
    trace.f_s.push_back(fs);
    trace.g_s.push_back(g.value(s));
    trace.F_k_s.push_back(g.value(s) +
                          trace.sigma * static_cast<double>(k) * fs);
    trace.residual_s.push_back(std::sqrt(2.0 * fs));
    trace.dx_norm.push_back(dx);
    trace.fgap_s.push_back(fs);  // f_* = 0 by construction
    trace.weight.push_back(trace.sigma * static_cast<double>(k));
    trace.consensus_gap.push_back(
        consensus_gap(x, cp.graph.node_count, cp.graph.block_dim));
  }
};

}  // namespace

ConsensusResult run_consensus(const ConsensusProblem& cp, double lambda,
                              double tau, long max_iters, long record_every,
                              double stop_gap) {
  if (lambda <= 0.0 || tau <= 0.0) {
    throw ConfigRejected("consensus stepsizes must be positive");
  }
  auto [lap, g, norm] = setup(cp);
  // The constraint map is sqrt(L), so the basic condition tau sigma
  // ||sqrt(L)||^2 < 1 reads lambda ||L|| < 1.
  if (!(lambda * norm < 1.0)) {
    throw ConfigRejected("stepsize condition tau*sigma*||L|| < 1 violated");
  }

  ConsensusResult out;
  out.trace.variant = Variant::primal;
  out.trace.tau = tau;
  out.trace.sigma = lambda / tau;
  out.trace.lambda = lambda;
  out.trace.f_star = 0.0;
  ConsensusRecorder record{out.trace, cp,          *lap, *g,
                           false,     record_every, max_iters};

  VectorXd x = VectorXd::Zero(lap->cols());
  VectorXd s = x;
  record(0, x, s, 0.0);
  for (long k = 0; k < max_iters; ++k) {
    const VectorXd lz = lap->apply(x + static_cast<double>(k) * s);
    ++out.comm_count;  // the single communication of this scheme
    const VectorXd x_next = g->prox(tau, x - lambda * lz);
    s = (x_next + static_cast<double>(k) * s) / static_cast<double>(k + 1);
    const double dx = (x_next - x).norm();
    x = x_next;
    out.iterations = k + 1;
    const bool stop =
        stop_gap > 0.0 &&
        consensus_gap(x, cp.graph.node_count, cp.graph.block_dim) <= stop_gap;
    record(k + 1, x, s, dx, /*force=*/stop);
    if (stop) break;
  }
  out.x_final = std::move(x);
  out.s_final = std::move(s);
  return out;
}

ConsensusResult run_consensus_pdhg_baseline(const ConsensusProblem& cp,
                                            double lambda, double tau,
                                            long max_iters, long record_every,
                                            double stop_gap) {
  if (lambda <= 0.0 || tau <= 0.0) {
    throw ConfigRejected("consensus stepsizes must be positive");
  }
  auto [lap, g, norm] = setup(cp);
  if (!(lambda * norm * norm < 1.0)) {
    throw ConfigRejected("stepsize condition tau*sigma*||L||^2 < 1 violated");
  }
  const double sigma = lambda / tau;

  ConsensusResult out;
  out.trace.variant = Variant::pdhg;
  out.trace.tau = tau;
  out.trace.sigma = sigma;
  out.trace.lambda = lambda;
  out.trace.f_star = 0.0;
  ConsensusRecorder record{out.trace, cp,          *lap, *g,
                           true,      record_every, max_iters};

  VectorXd x = VectorXd::Zero(lap->cols());
  VectorXd x_prev = x;
  VectorXd y = VectorXd::Zero(lap->cols());
  VectorXd s = x;
  record(0, x, s, 0.0);
  for (long k = 0; k < max_iters; ++k) {
    y += sigma * lap->apply(2.0 * x - x_prev);
    ++out.comm_count;
    const VectorXd x_next = g->prox(tau, x - tau * lap->apply(y));
    ++out.comm_count;
    s = (x_next + static_cast<double>(k) * s) / static_cast<double>(k + 1);
    const double dx = (x_next - x).norm();
    x_prev = x;
    x = x_next;
    out.iterations = k + 1;
    const bool stop =
        stop_gap > 0.0 &&
        consensus_gap(x, cp.graph.node_count, cp.graph.block_dim) <= stop_gap;
    record(k + 1, x, s, dx, /*force=*/stop);
    if (stop) break;
  }
  out.x_final = std::move(x);
  out.s_final = std::move(s);
  return out;
}

}  // namespace pdprox
