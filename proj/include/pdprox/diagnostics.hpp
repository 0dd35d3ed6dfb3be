#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pdprox/oracle.hpp"
#include "pdprox/problem.hpp"
#include "pdprox/solvers.hpp"

namespace pdprox {

/// Oracle-derived constants entering the closed-form bounds.
struct Certificates {
  double d_x = 0.0;     // ||x^0 - xbar|| for an oracle solution xbar
  double d_y = 0.0;     // ||A u*|| for an oracle multiplier u*
  double g_star = 0.0;  // optimal value of g over argmin f
  double f_star = 0.0;
};

Certificates make_certificates(const oracle::KktSolution& kkt,
                               const ConstrainedProblem& p, const VectorXd& x0);

/// Per-iteration bounds of the basic scheme, all of the form c / k.
struct BoundSet {
  double penalty_upper;  // F_k(s^k) - g_*  <=  D_x^2 / (2 tau k)
  double penalty_lower;  // F_k(s^k) - g_*  >= -D_y^2 / (2 sigma k)
  double feas_upper;     // sqrt(2 (f(s^k)-f_*))  <=  (D_y + sqrt(D_y^2 + sigma D_x^2/tau)) / (sigma k)
  double obj_lower;      // g(s^k) - g_*  >= -(D_y^2 + D_y sqrt(...)) / (sigma k)
  double obj_upper;      // g(s^k) - g_*  <=  D_x^2 / (2 tau k)
};

BoundSet theorem1_bounds(const Certificates& cert, const StepSizes& ss, long k);

/// Per-iteration bounds of the accelerated scheme.
struct AccelBoundSet {
  double penalty_upper;  // F_k(s^k) - g_*  <=  lambda D_x^2 / (2 Sigma_{k-1})
  double penalty_lower;  // F_k(s^k) - g_*  >= -D_y^2 / (2 Sigma_{k-1})
  double fgap_upper;     // f(s^k) - f_*  <=  ((D_y + sqrt(D_y^2 + lambda D_x^2)) / (sqrt(2) Sigma_{k-1}))^2
  double dist_upper;     // ||x^k - xbar||  <=  sqrt((tau_k / sigma_k)(lambda D_x^2 + D_y^2))
};

AccelBoundSet theorem2_bounds(const Certificates& cert, double lambda,
                              double sigma_sum_prev, double tau_k,
                              double sigma_k);

/// F_k(x) = g(x) + sigma k (f(x) - f_*).  Requires f_* cached.
double penalty_value(const ConstrainedProblem& p, double sigma, long k,
                     const VectorXd& x);

/// Accelerated penalty: g(x) + Sigma_{k-1} (f(x) - f_*).
double penalty_value_accel(const ConstrainedProblem& p, double sigma_sum_prev,
                           const VectorXd& x);

/// |g(x) - g_*| <= eps and ||Ax - b|| <= eps.
bool epsilon_check(const ConstrainedProblem& p, double g_star, const VectorXd& x,
                   double eps);

/// g(x) - g_* >= -D_y sqrt(2 f_gap); returns the right-hand side.
double dual_lower_estimate(const Certificates& cert, double f_gap);

enum class TraceColumn { f_x, f_s, g_s, F_k_s, residual_s, dx_norm, fgap_s };

/// Least-squares slope of log(value) against log(k) over records with
/// k >= k_min and positive values.  k_min < 0 selects the default window
/// (last half of the records, k >= 100).  Nonpositive values are dropped;
/// throws when fewer than 10 records remain.
double rate_fit(const Trace& trace, TraceColumn column, long k_min = -1);

/// Checks, at every consecutive pair of a snapshot trace,
///   1/(2 tau) ||x^{k+1}-xbar||^2 + (k+1)(F_{k+1}(s^{k+1}) - g_*)
///     <= 1/(2 tau) ||x^k-xbar||^2 + k (F_k(s^k) - g_*) + slack.
/// When a_norm is given the strengthened form is checked, adding
/// (1 - lambda ||A||^2)/(2 tau) ||x^{k+1}-x^k||^2 + sigma (f(x^k) - f_*)
/// to the left-hand side.  xbar must be an oracle solution (g_* = g(xbar)).
bool lyapunov_check(const Trace& trace, const ConstrainedProblem& p,
                    const StepSizes& ss, const VectorXd& xbar,
                    double slack = 1e-8,
                    std::optional<double> a_norm = std::nullopt);

// ---------------------------------------------------------------------------
// Bound audits against measured traces.

struct AuditRow {
  long k = 0;
  std::string quantity;
  double measured = 0.0;
  double bound = 0.0;
  bool lower_bound = false;  // satisfied means measured >= bound
  bool satisfied = false;
};

/// Every Theorem-1 inequality at every recorded k >= 1, with slack
/// slack_abs + slack_per_k * k.
std::vector<AuditRow> audit_theorem1(const Trace& trace, const Certificates& cert,
                                     const StepSizes& ss,
                                     double slack_abs = 1e-8,
                                     double slack_per_k = 1e-10);

/// Theorem-2 inequalities: Sigma_{k-1}-scaled penalty bounds (constants
/// lambda D_x^2/2 and -D_y^2/2) and the feasibility-gap bound.  gamma != 1 is
/// handled by normalizing g and D_y.  The schedule is reconstructed from
/// (tau0, lambda).
std::vector<AuditRow> audit_theorem2(const Trace& trace, const Certificates& cert,
                                     double lambda, double tau0, double gamma,
                                     double slack_abs = 1e-8);

bool all_satisfied(const std::vector<AuditRow>& rows);

/// CSV: k, quantity, measured, bound, satisfied.
void write_audit_csv(const std::filesystem::path& path,
                     const std::vector<AuditRow>& rows);

}  // namespace pdprox
