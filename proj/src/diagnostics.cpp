#include "pdprox/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace pdprox {

Certificates make_certificates(const oracle::KktSolution& kkt,
                               const ConstrainedProblem& p, const VectorXd& x0) {
  return {(x0 - kkt.x).norm(), kkt.d_y, kkt.g_star, p.fstar()};
}

BoundSet theorem1_bounds(const Certificates& cert, const StepSizes& ss, long k) {
  if (k < 1) throw DimensionError("theorem1_bounds: k must be >= 1");
  const double kd = static_cast<double>(k);
  const double dx2 = cert.d_x * cert.d_x;
  const double dy2 = cert.d_y * cert.d_y;
  const double root = std::sqrt(dy2 + ss.sigma * dx2 / ss.tau);
  BoundSet b;
  b.penalty_upper = dx2 / (2.0 * ss.tau * kd);
  b.penalty_lower = -dy2 / (2.0 * ss.sigma * kd);
  b.feas_upper = (cert.d_y + root) / (ss.sigma * kd);
  b.obj_lower = -(dy2 + cert.d_y * root) / (ss.sigma * kd);
  b.obj_upper = dx2 / (2.0 * ss.tau * kd);
  return b;
}

AccelBoundSet theorem2_bounds(const Certificates& cert, double lambda,
                              double sigma_sum_prev, double tau_k,
                              double sigma_k) {
  if (sigma_sum_prev <= 0.0) {
    throw DimensionError("theorem2_bounds: Sigma_{k-1} must be positive");
  }
  const double dx2 = cert.d_x * cert.d_x;
  const double dy2 = cert.d_y * cert.d_y;
  const double c = (cert.d_y + std::sqrt(dy2 + lambda * dx2)) /
                   (std::sqrt(2.0) * sigma_sum_prev);
  AccelBoundSet b;
  b.penalty_upper = lambda * dx2 / (2.0 * sigma_sum_prev);
  b.penalty_lower = -dy2 / (2.0 * sigma_sum_prev);
  b.fgap_upper = c * c;
  b.dist_upper = std::sqrt((tau_k / sigma_k) * (lambda * dx2 + dy2));
  return b;
}

double penalty_value(const ConstrainedProblem& p, double sigma, long k,
                     const VectorXd& x) {
  const double gx = p.g().value(x);
  if (std::isinf(gx)) return gx;
  return gx + sigma * static_cast<double>(k) * p.f_gap(x);
}

double penalty_value_accel(const ConstrainedProblem& p, double sigma_sum_prev,
                           const VectorXd& x) {
  const double gx = p.g().value(x);
  if (std::isinf(gx)) return gx;
  return gx + sigma_sum_prev * p.f_gap(x);
}

bool epsilon_check(const ConstrainedProblem& p, double g_star, const VectorXd& x,
                   double eps) {
  return std::abs(p.g().value(x) - g_star) <= eps &&
         (p.A().apply(x) - p.b()).norm() <= eps;
}

double dual_lower_estimate(const Certificates& cert, double f_gap) {
  if (f_gap < 0.0) throw DimensionError("dual_lower_estimate: f_gap must be >= 0");
  return -cert.d_y * std::sqrt(2.0 * f_gap);
}

namespace {

const std::vector<double>& column_series(const Trace& t, TraceColumn c) {
  switch (c) {
    case TraceColumn::f_x: return t.f_x;
    case TraceColumn::f_s: return t.f_s;
    case TraceColumn::g_s: return t.g_s;
    case TraceColumn::F_k_s: return t.F_k_s;
    case TraceColumn::residual_s: return t.residual_s;
    case TraceColumn::dx_norm: return t.dx_norm;
    case TraceColumn::fgap_s: return t.fgap_s;
  }
  throw DimensionError("unknown trace column");
}

}  // namespace

double rate_fit(const Trace& trace, TraceColumn column, long k_min) {
  const auto& values = column_series(trace, column);
  if (values.size() != trace.k.size()) {
    throw DimensionError("rate_fit: column not recorded in this trace");
  }
  long k_min_eff = k_min;
  if (k_min < 0) {
    const size_t mid = trace.size() / 2;
    k_min_eff = std::max<long>(100, mid < trace.size() ? trace.k[mid] : 0);
  }
  size_t eligible = 0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  size_t used = 0;
  for (size_t i = 0; i < trace.size(); ++i) {
    if (trace.k[i] < std::max<long>(k_min_eff, 1)) continue;
    ++eligible;
    if (!(values[i] > 0.0)) continue;  // dropped per contract
    const double lx = std::log(static_cast<double>(trace.k[i]));
    const double ly = std::log(values[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++used;
  }
  if (eligible < 10) {
    throw DimensionError("rate_fit: need at least 10 records with k >= k_min");
  }
  if (used < 2) {
    throw ConvergenceError("rate_fit: window has no positive values to fit", 0.0);
  }
  const double n = static_cast<double>(used);
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) {
    throw ConvergenceError("rate_fit: degenerate window", 0.0);
  }
  return (n * sxy - sx * sy) / denom;
}

bool lyapunov_check(const Trace& trace, const ConstrainedProblem& p,
                    const StepSizes& ss, const VectorXd& xbar, double slack,
                    std::optional<double> a_norm) {
  if (trace.x_snapshots.size() != trace.size() ||
      trace.s_snapshots.size() != trace.size()) {
    throw DimensionError("lyapunov_check: trace has no per-step snapshots");
  }
  const double g_star = p.g().value(xbar);
  const double beta_hat =
      a_norm ? (1.0 - ss.lambda * (*a_norm) * (*a_norm)) / (2.0 * ss.tau) : 0.0;

  const auto side = [&](size_t i) {
    const double k = static_cast<double>(trace.k[i]);
    const double penalty =
        penalty_value(p, ss.sigma, trace.k[i], trace.s_snapshots[i]);
    return (trace.x_snapshots[i] - xbar).squaredNorm() / (2.0 * ss.tau) +
           k * (penalty - g_star);
  };

  for (size_t i = 0; i + 1 < trace.size(); ++i) {
    if (trace.k[i + 1] != trace.k[i] + 1) {
      throw DimensionError("lyapunov_check: snapshots must be recorded every step");
    }
    double lhs = side(i + 1);
    if (a_norm) {
      lhs += beta_hat *
                 (trace.x_snapshots[i + 1] - trace.x_snapshots[i]).squaredNorm() +
             ss.sigma * p.f_gap(trace.x_snapshots[i]);
    }
    if (lhs > side(i) + slack) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Audits.

namespace {

double trace_fgap(const Trace& trace, const Certificates& cert, size_t i) {
  if (!trace.fgap_s.empty()) return trace.fgap_s[i];
  return trace.f_s[i] - cert.f_star;
}

AuditRow upper(long k, std::string quantity, double measured, double bound,
               double slack) {
  return {k, std::move(quantity), measured, bound, false,
          measured <= bound + slack};
}

AuditRow lower(long k, std::string quantity, double measured, double bound,
               double slack) {
  return {k, std::move(quantity), measured, bound, true,
          measured >= bound - slack};
}

}  // namespace

std::vector<AuditRow> audit_theorem1(const Trace& trace, const Certificates& cert,
                                     const StepSizes& ss, double slack_abs,
                                     double slack_per_k) {
  std::vector<AuditRow> rows;
  for (size_t i = 0; i < trace.size(); ++i) {
    const long k = trace.k[i];
    if (k < 1) continue;
    const double slack = slack_abs + slack_per_k * static_cast<double>(k);
    const BoundSet b = theorem1_bounds(cert, ss, k);
    const double fgap = trace_fgap(trace, cert, i);
    const double penalty_gap =
        trace.g_s[i] - cert.g_star + ss.sigma * static_cast<double>(k) * fgap;
    const double obj_gap = trace.g_s[i] - cert.g_star;
    const double feas = std::sqrt(2.0 * std::max(fgap, 0.0));
    rows.push_back(upper(k, "penalty_upper", penalty_gap, b.penalty_upper, slack));
    rows.push_back(lower(k, "penalty_lower", penalty_gap, b.penalty_lower, slack));
    rows.push_back(upper(k, "feas", feas, b.feas_upper, slack));
    rows.push_back(upper(k, "obj_upper", obj_gap, b.obj_upper, slack));
    rows.push_back(lower(k, "obj_lower", obj_gap, b.obj_lower, slack));
  }
  return rows;
}

std::vector<AuditRow> audit_theorem2(const Trace& trace, const Certificates& cert,
                                     double lambda, double tau0, double gamma,
                                     double slack_abs) {
  if (gamma <= 0.0) throw DimensionError("audit_theorem2: gamma must be positive");
  Certificates norm_cert = cert;
  norm_cert.d_y = cert.d_y / gamma;
  norm_cert.g_star = cert.g_star / gamma;

  const double dx2 = norm_cert.d_x * norm_cert.d_x;
  const double dy2 = norm_cert.d_y * norm_cert.d_y;

  std::vector<AuditRow> rows;
  // Reconstruct the schedule: sigma_sum_prev(k) = Sigma_{k-1}.
  double tau = tau0;
  double sigma = lambda / tau0;
  double sigma_sum = sigma;       // Sigma_k at k = 0
  double sigma_sum_prev = 0.0;    // Sigma_{-1}
  long schedule_k = 0;
  for (size_t i = 0; i < trace.size(); ++i) {
    const long k = trace.k[i];
    if (k < 1) continue;
    while (schedule_k < k) {
      const ScheduleStep s = accel_schedule_next(tau, lambda);
      tau = s.tau;
      sigma = s.sigma;
      sigma_sum_prev = sigma_sum;
      sigma_sum += sigma;
      ++schedule_k;
    }
    const double fgap = trace_fgap(trace, cert, i);
    const double penalty_gap_scaled =
        sigma_sum_prev *
        ((trace.g_s[i] - cert.g_star) / gamma + sigma_sum_prev * fgap);
    const AccelBoundSet b =
        theorem2_bounds(norm_cert, lambda, sigma_sum_prev, tau, sigma);
    rows.push_back(upper(k, "penalty_scaled_upper", penalty_gap_scaled,
                         lambda * dx2 / 2.0, slack_abs));
    rows.push_back(lower(k, "penalty_scaled_lower", penalty_gap_scaled,
                         -dy2 / 2.0, slack_abs));
    rows.push_back(upper(k, "fgap", fgap, b.fgap_upper, slack_abs));
  }
  return rows;
}

bool all_satisfied(const std::vector<AuditRow>& rows) {
  return std::all_of(rows.begin(), rows.end(),
                     [](const AuditRow& r) { return r.satisfied; });
}

void write_audit_csv(const std::filesystem::path& path,
                     const std::vector<AuditRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path.string());
  out << "k,quantity,measured,bound,satisfied\n";
  char buf[32];
  const auto cell = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << ',' << buf;
  };
  for (const auto& r : rows) {
    out << r.k << ',' << r.quantity;
    cell(r.measured);
    cell(r.bound);
    out << ',' << (r.satisfied ? "true" : "false") << '\n';
  }
}

}  // namespace pdprox
