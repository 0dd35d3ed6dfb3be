#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <json.hpp>

#include "pdprox/diagnostics.hpp"
#include "pdprox/graph.hpp"
#include "pdprox/manifest.hpp"
#include "pdprox/oracle.hpp"
#include "pdprox/solvers.hpp"

namespace {

using namespace pdprox;

struct StepSizeArgs {
  std::optional<double> tau;
  std::optional<double> sigma;
  std::optional<double> lambda;
  double safety = 0.99;

  void attach(CLI::App* cmd) {
    cmd->add_option("--tau", tau, "Primal stepsize tau");
    cmd->add_option("--sigma", sigma, "Dual stepsize sigma");
    cmd->add_option("--lambda", lambda, "Product tau*sigma");
    cmd->add_option("--safety", safety,
                    "Safety factor for derived stepsizes (default 0.99)");
  }

  /// Resolves explicit options against the variant defaults.
  StepSizes resolve(Variant v, const ConstrainedProblem& p, double norm) const {
    if (tau && sigma) {
      StepSizes ss = StepSizes::from_tau_sigma(*tau, *sigma, safety);
      if (lambda && std::abs(*lambda - ss.lambda) > 1e-12 * ss.lambda) {
        throw ConfigRejected("--lambda contradicts --tau and --sigma");
      }
      return ss;
    }
    if (lambda && tau) {
      return StepSizes::from_tau_sigma(*tau, *lambda / *tau, safety);
    }
    if (lambda && sigma) {
      return StepSizes::from_tau_sigma(*lambda / *sigma, *sigma, safety);
    }
    if (lambda) return StepSizes::from_lambda(*lambda, safety);
    if (tau || sigma) {
      throw ConfigRejected("give --lambda, --tau with --sigma, or neither");
    }
    return default_step_sizes(v, p, norm, safety);
  }
};

nlohmann::json vector_to_json(const VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
}

int run_solve(const std::string& manifest, const std::string& variant_name_arg,
              const StepSizeArgs& sizes, long max_iters, long record_every,
              const std::string& x0_path, unsigned seed, double tau0,
              const std::string& out) {
  const Variant v = variant_from_name(variant_name_arg);
  ConstrainedProblem p = parse_problem_manifest(manifest);
  const double norm = estimate_operator_norm(p.A(), 1e-6, 5000, seed).value;

  RunOptions opt;
  opt.max_iters = max_iters;
  opt.record_every = record_every;
  opt.seed = seed;
  opt.tau0 = tau0;
  opt.norm_estimate = norm;
  if (!x0_path.empty()) opt.x0 = read_vector_file(x0_path);

  const StepSizes ss = sizes.resolve(v, p, norm);
  const Trace trace = run(v, p, ss, opt);
  if (!out.empty()) write_trace_csv(out, trace);

  std::printf("variant=%s iters=%ld tau=%.6g sigma=%.6g lambda=%.6g\n",
              std::string(variant_name(v)).c_str(), max_iters, ss.tau, ss.sigma,
              ss.lambda);
  std::printf("final: k=%ld F_k_s=%.10g residual_s=%.10g g_s=%.10g\n",
              trace.k.back(), trace.F_k_s.back(), trace.residual_s.back(),
              trace.g_s.back());
  return 0;
}

int run_audit(const std::string& trace_path, const std::string& manifest,
              int theorem, const StepSizeArgs& sizes, double tau0,
              const std::string& x0_path, const std::string& out) {
  ConstrainedProblem p = parse_problem_manifest(manifest);
  const Trace trace = read_trace_csv(trace_path);
  const double norm = estimate_operator_norm(p.A()).value;

  const VectorXd x0 =
      x0_path.empty() ? VectorXd::Zero(p.dim()) : read_vector_file(x0_path);
  const auto kkt = oracle::certify(p);
  const Certificates cert = make_certificates(kkt, p, x0);

  std::vector<AuditRow> rows;
  if (theorem == 1) {
    const StepSizes ss = sizes.resolve(Variant::primal, p, norm);
    rows = audit_theorem1(trace, cert, ss);
  } else if (theorem == 2) {
    const StepSizes ss = sizes.resolve(Variant::accel, p, norm);
    rows = audit_theorem2(trace, cert, ss.lambda, tau0, p.gamma());
  } else {
    throw ConfigRejected("--theorem must be 1 or 2");
  }
  if (!out.empty()) write_audit_csv(out, rows);
  std::printf("audited %zu inequalities, all satisfied: %s\n", rows.size(),
              all_satisfied(rows) ? "true" : "false");
  return 0;
}

int run_consensus_cmd(const std::string& manifest, const std::string& graph_path,
                      const std::string& variant, std::optional<double> lambda,
                      std::optional<double> tau, long max_iters,
                      long record_every, double stop_gap,
                      const std::string& out) {
  ConsensusProblem cp = parse_consensus_manifest(manifest);
  if (!graph_path.empty()) {
    cp.graph = Graph::from_file(graph_path);
    cp.validate();
  }
  const double norm = estimate_operator_norm(*laplacian(cp.graph)).value;

  ConsensusResult res;
  if (variant == "primal") {
    const double l = lambda ? *lambda : (norm > 0.0 ? 0.99 / norm : 1.0);
    const double t = tau ? *tau : std::sqrt(l);
    res = run_consensus(cp, l, t, max_iters, record_every, stop_gap);
  } else if (variant == "pdhg") {
    const double l = lambda ? *lambda : (norm > 0.0 ? 0.99 / (norm * norm) : 1.0);
    const double t = tau ? *tau : std::sqrt(l);
    res = run_consensus_pdhg_baseline(cp, l, t, max_iters, record_every,
                                      stop_gap);
  } else {
    throw ConfigRejected("--variant must be primal or pdhg");
  }
  if (!out.empty()) write_trace_csv(out, res.trace);
  std::printf("variant=%s iterations=%ld communications=%ld gap=%.10g\n",
              variant.c_str(), res.iterations, res.comm_count,
              res.trace.consensus_gap.back());
  return 0;
}

int run_oracle(const std::string& manifest, const std::string& mode, double rho,
               double tol, const std::string& out) {
  ConstrainedProblem p = parse_problem_manifest(manifest);
  nlohmann::json j;
  if (mode == "lsq") {
    const auto sol = oracle::solve_least_squares(p.A(), p.b(), tol);
    j["x_ls"] = vector_to_json(sol.x);
    j["f_star"] = sol.f_star;
    j["iterations"] = sol.iterations;
  } else if (mode == "kkt") {
    const auto sol = oracle::certify(p, tol);
    j["x_star"] = vector_to_json(sol.x);
    j["u_star"] = vector_to_json(sol.u);
    j["g_star"] = sol.g_star;
    j["D_y"] = sol.d_y;
  } else if (mode == "penalized") {
    if (rho <= 0.0) throw ConfigRejected("--rho must be positive for penalized");
    const VectorXd xhat = oracle::solve_penalized(p, rho, tol);
    j["x_hat"] = vector_to_json(xhat);
    j["objective"] = p.g().value(xhat) +
                     0.5 * rho * (p.A().apply(xhat) - p.b()).squaredNorm();
  } else {
    throw ConfigRejected("--mode must be lsq, kkt, or penalized");
  }
  if (!out.empty()) {
    write_json(out, j);
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"primal-form PDHG solver for linearly constrained problems"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Run a solver variant on a manifest");
  std::string manifest, variant = "primal", x0_path, out;
  StepSizeArgs sizes;
  long max_iters = 1000, record_every = 1;
  unsigned seed = 42;
  double tau0 = 1.0;
  solve->add_option("--manifest", manifest, "Problem manifest (JSON)")->required();
  solve->add_option("--variant", variant,
                    "pdhg|primal|dualspace|smooth|condat-vu|gram|accel|"
                    "accel-pdhg|tseng");
  sizes.attach(solve);
  solve->add_option("--max-iters", max_iters, "Iteration count");
  solve->add_option("--record-every", record_every, "Trace record stride");
  solve->add_option("--x0", x0_path, "Start vector file (default zeros)");
  solve->add_option("--seed", seed, "Seed for the norm-estimation start vector");
  solve->add_option("--tau0", tau0, "Accelerated schedule tau_0");
  solve->add_option("--out", out, "Trace CSV output path");

  // audit
  auto* audit = app.add_subcommand("audit", "Check theorem bounds for a trace");
  std::string audit_trace, audit_manifest, audit_x0, audit_out;
  StepSizeArgs audit_sizes;
  int theorem = 1;
  double audit_tau0 = 1.0;
  audit->add_option("--trace", audit_trace, "Trace CSV from solve")->required();
  audit->add_option("--manifest", audit_manifest, "Problem manifest")->required();
  audit->add_option("--theorem", theorem, "1 or 2");
  audit_sizes.attach(audit);
  audit->add_option("--tau0", audit_tau0, "Accelerated schedule tau_0");
  audit->add_option("--x0", audit_x0, "Start vector used by the run");
  audit->add_option("--out", audit_out, "Audit CSV output path");

  // consensus
  auto* cons = app.add_subcommand("consensus", "Decentralized consensus run");
  std::string cons_manifest, cons_graph, cons_variant = "primal", cons_out;
  std::optional<double> cons_lambda, cons_tau;
  long cons_iters = 100000, cons_record = 100;
  double stop_gap = 0.0;
  cons->add_option("--manifest", cons_manifest, "Consensus manifest (JSON)")
      ->required();
  cons->add_option("--graph", cons_graph, "Override the manifest's graph file");
  cons->add_option("--variant", cons_variant, "primal|pdhg");
  cons->add_option("--lambda", cons_lambda, "tau*sigma (default 0.99/||L||)");
  cons->add_option("--tau", cons_tau, "Primal stepsize");
  cons->add_option("--max-iters", cons_iters, "Iteration cap");
  cons->add_option("--record-every", cons_record, "Trace record stride");
  cons->add_option("--stop-gap", stop_gap, "Stop once the consensus gap drops here");
  cons->add_option("--out", cons_out, "Trace CSV output path");

  // oracle
  auto* orc = app.add_subcommand("oracle", "Reference computations");
  std::string orc_manifest, mode = "lsq", orc_out;
  double rho = 0.0, orc_tol = 1e-10;
  orc->add_option("--manifest", orc_manifest, "Problem manifest")->required();
  orc->add_option("--mode", mode, "lsq|kkt|penalized");
  orc->add_option("--rho", rho, "Penalty parameter for penalized mode");
  orc->add_option("--tol", orc_tol, "Oracle tolerance");
  orc->add_option("--out", orc_out, "JSON output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      return run_solve(manifest, variant, sizes, max_iters, record_every,
                       x0_path, seed, tau0, out);
    }
    if (*audit) {
      return run_audit(audit_trace, audit_manifest, theorem, audit_sizes,
                       audit_tau0, audit_x0, audit_out);
    }
    if (*cons) {
      return run_consensus_cmd(cons_manifest, cons_graph, cons_variant,
                               cons_lambda, cons_tau, cons_iters, cons_record,
                               stop_gap, cons_out);
    }
    if (*orc) {
      return run_oracle(orc_manifest, mode, rho, orc_tol, orc_out);
    }
  } catch (const ConfigRejected& e) {
    std::cerr << "configuration rejected: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
