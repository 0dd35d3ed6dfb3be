#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdprox/problem.hpp"

namespace pdprox {

enum class Variant {
  pdhg,        // primal-dual recursion with extrapolation
  primal,      // entirely primal form, iterate-equivalent to pdhg
  dualspace,   // primal form tracked through Ax (cheaper when m << n)
  smooth,      // primal form with an extra smooth term h
  condat_vu,   // primal-dual form with the smooth term
  gram,        // pdhg on the normal equations A'Ax = A'b
  accel,       // accelerated primal form (g strongly convex)
  accel_pdhg,  // accelerated primal-dual form
  tseng,       // Tseng's composite scheme with h := f, as a baseline
};

std::string_view variant_name(Variant v);
Variant variant_from_name(std::string_view name);

struct StepSizes {
  double tau = 1.0;
  double sigma = 1.0;
  double lambda = 1.0;  // tau * sigma
  double safety = 0.99;

  static StepSizes from_tau_sigma(double tau, double sigma, double safety = 0.99);
  /// tau = sigma = sqrt(lambda).
  static StepSizes from_lambda(double lambda, double safety = 0.99);
};

/// Admissible default stepsizes derived from a norm estimate:
/// lambda = safety / ||A||^2 (gram: / ||A||^4; smooth: shrunk so that
/// tau sigma ||A||^2 < 1 - tau beta), tau = sigma = sqrt(lambda).
StepSizes default_step_sizes(Variant v, const ConstrainedProblem& p,
                             double norm_estimate, double safety = 0.99);

/// Throws ConfigRejected naming the violated inequality.  norm_estimate is
/// the operator norm of A (estimated or exact).
void validate_step_sizes(Variant v, const ConstrainedProblem& p,
                         const StepSizes& ss, double norm_estimate);

// ---------------------------------------------------------------------------
// Iteration states.  Step functions are pure: state in, state out.

struct PDHGState {
  long k = 0;
  VectorXd x;
  VectorXd x_prev;  // for the extrapolation 2x^k - x^{k-1}
  VectorXd y;       // R^m, or R^n for the gram variant
};

struct PrimalState {
  long k = 0;
  VectorXd x;
  VectorXd s;  // running average, s^0 = x^0
};

struct DualSpaceState {
  long k = 0;
  VectorXd x;        // R^n
  VectorXd image_x;  // A x^k in R^m
  VectorXd image_s;  // A s^k in R^m
};

struct AccelState {
  long k = 0;
  VectorXd x;
  VectorXd s;
  double tau = 1.0;        // tau_k
  double sigma = 1.0;      // sigma_k = lambda / tau_k
  double sigma_sum = 1.0;  // Sigma_k = sigma_0 + ... + sigma_k
  double sigma_sum_prev = 0.0;  // Sigma_{k-1}, zero at k = 0
};

struct AccelPDHGState {
  long k = 0;
  VectorXd x;
  VectorXd x_prev;
  VectorXd y;
  double tau = 1.0;
  double tau_prev = 1.0;  // theta_k = tau_k / tau_{k-1}
  double sigma = 1.0;
  double sigma_sum = 1.0;
  double sigma_sum_prev = 0.0;
};

struct TsengState {
  long k = 0;
  VectorXd x;
  VectorXd s;
};

PDHGState make_pdhg_state(const ConstrainedProblem& p, const VectorXd& x0);
PDHGState make_gram_state(const ConstrainedProblem& p, const VectorXd& x0);
PrimalState make_primal_state(const VectorXd& x0);
DualSpaceState make_dualspace_state(const ConstrainedProblem& p, const VectorXd& x0);
AccelState make_accel_state(const VectorXd& x0, double tau0, double lambda);
AccelPDHGState make_accel_pdhg_state(const ConstrainedProblem& p,
                                     const VectorXd& x0, double tau0,
                                     double lambda);
TsengState make_tseng_state(const VectorXd& x0);

/// y <- y + sigma (A(2x - x_prev) - b); x <- prox_{tau g}(x - tau A'y).
PDHGState step_pdhg(const PDHGState& st, const ConstrainedProblem& p,
                    const StepSizes& ss);

/// x <- prox_{tau g}(x - lambda A'(A(x + k s) - (k+1) b));
/// s <- (x_next + k s) / (k+1).  One apply of A and one of A' per step.
PrimalState step_primal(const PrimalState& st, const ConstrainedProblem& p,
                        const StepSizes& ss);

/// Same recursion tracked through image_x = Ax and image_s = As.
DualSpaceState step_primal_dualspace(const DualSpaceState& st,
                                     const ConstrainedProblem& p,
                                     const StepSizes& ss);

/// step_primal with the extra -tau grad h(x^k) inside the prox argument.
PrimalState step_primal_smooth(const PrimalState& st, const ConstrainedProblem& p,
                               const StepSizes& ss);

/// y <- y + sigma (A(2x - x_prev) - b);
/// x <- prox_{tau g}(x - tau (A'y + grad h(x))).
PDHGState step_condat_vu(const PDHGState& st, const ConstrainedProblem& p,
                         const StepSizes& ss);

/// PDHG on A'Ax = A'b; y lives in R^n and the stepsize condition tightens to
/// tau sigma ||A||^4 < 1.
PDHGState step_pdhg_gram(const PDHGState& st, const ConstrainedProblem& p,
                         const StepSizes& ss);

struct ScheduleStep {
  double tau;
  double sigma;
  double theta;
};

/// tau_k = tau_{k-1} / sqrt(1 + tau_{k-1}); sigma_k = lambda / tau_k;
/// theta_k = tau_k / tau_{k-1}.
ScheduleStep accel_schedule_next(double tau_prev, double lambda);

/// Accelerated primal form.  Requires g strongly convex; a modulus gamma != 1
/// is handled by rescaling g to g/gamma inside the prox call.
AccelState step_accelerated(const AccelState& st, const ConstrainedProblem& p,
                            double lambda);

/// Accelerated primal-dual form with extrapolation
/// xbar = x + theta_k (x - x_prev).
AccelPDHGState step_accelerated_pdhg(const AccelPDHGState& st,
                                     const ConstrainedProblem& p, double lambda);

/// Tseng's scheme with h := f, theta_k = 2/(k+2), prox step lambda/theta_k.
TsengState step_tseng(const TsengState& st, const ConstrainedProblem& p,
                      double lambda);

// ---------------------------------------------------------------------------
// Trace-recording driver.

struct Trace {
  Variant variant = Variant::primal;
  double tau = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  double tau0 = 1.0;
  double f_star = 0.0;

  std::vector<long> k;
  std::vector<double> f_x;
  std::vector<double> f_s;
  std::vector<double> g_s;
  std::vector<double> F_k_s;       // g(s) + weight * (f(s) - f_*)
  std::vector<double> residual_s;  // ||A s - b||
  std::vector<double> dx_norm;     // ||x^k - x^{k-1}||, 0 at k = 0

  // Extra in-memory series (not part of the CSV contract).
  std::vector<double> fgap_s;   // f(s) - f_* via the distance identity
  std::vector<double> weight;   // sigma * k, or Sigma_{k-1} for accel runs
  std::vector<double> consensus_gap;  // consensus runs only

  std::vector<VectorXd> x_snapshots;
  std::vector<VectorXd> s_snapshots;

  size_t size() const { return k.size(); }
};

struct RunOptions {
  long max_iters = 1000;
  long record_every = 1;
  bool record_snapshots = false;
  std::optional<VectorXd> x0;  // zeros when absent
  double tau0 = 1.0;           // accelerated schedule start
  unsigned seed = 42;          // norm-estimation start vector
  std::optional<double> norm_estimate;  // skip estimation when given
};

/// Validates the variant's stepsize invariant, ensures f_* is cached, then
/// iterates the chosen step function, recording every record_every steps
/// (plus k = 0 and the final iterate).  Deterministic given its inputs.
Trace run(Variant v, ConstrainedProblem& p, const StepSizes& ss,
          const RunOptions& opt = {});

/// CSV with header k,f_x,f_s,g_s,F_k_s,residual_s,dx_norm at 17 significant
/// digits, so re-reading reproduces the doubles bit for bit.
void write_trace_csv(const std::filesystem::path& path, const Trace& trace);
Trace read_trace_csv(const std::filesystem::path& path);

}  // namespace pdprox
