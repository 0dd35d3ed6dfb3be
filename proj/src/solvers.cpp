#include "pdprox/solvers.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

namespace pdprox {

namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 9> kVariantNames = {{
    {Variant::pdhg, "pdhg"},
    {Variant::primal, "primal"},
    {Variant::dualspace, "dualspace"},
    {Variant::smooth, "smooth"},
    {Variant::condat_vu, "condat-vu"},
    {Variant::gram, "gram"},
    {Variant::accel, "accel"},
    {Variant::accel_pdhg, "accel-pdhg"},
    {Variant::tseng, "tseng"},
}};

}  // namespace

std::string_view variant_name(Variant v) {
  for (const auto& [variant, name] : kVariantNames) {
    if (variant == v) return name;
  }
  return "?";
}

Variant variant_from_name(std::string_view name) {
  for (const auto& [variant, candidate] : kVariantNames) {
    if (candidate == name) return variant;
  }
  throw ConfigRejected("unknown variant: " + std::string(name));
}

StepSizes StepSizes::from_tau_sigma(double tau, double sigma, double safety) {
  if (tau <= 0.0 || sigma <= 0.0) {
    throw ConfigRejected("stepsizes tau and sigma must be positive");
  }
  return {tau, sigma, tau * sigma, safety};
}

StepSizes StepSizes::from_lambda(double lambda, double safety) {
  if (lambda <= 0.0) {
    throw ConfigRejected("stepsize lambda must be positive");
  }
  const double root = std::sqrt(lambda);
  return {root, root, lambda, safety};
}

StepSizes default_step_sizes(Variant v, const ConstrainedProblem& p,
                             double norm_estimate, double safety) {
  if (norm_estimate < 0.0 || safety <= 0.0 || safety >= 1.0) {
    throw ConfigRejected("default_step_sizes: need norm >= 0 and safety in (0,1)");
  }
  if (norm_estimate == 0.0) {
    return StepSizes::from_lambda(1.0, safety);  // any lambda is admissible
  }
  const double nu2 = norm_estimate * norm_estimate;
  switch (v) {
    case Variant::gram:
      return StepSizes::from_lambda(safety / (nu2 * nu2), safety);
    case Variant::smooth:
    case Variant::condat_vu: {
      const double beta = p.has_h() ? p.h().beta() : 0.0;
      // Largest t = tau = sigma with t^2 nu^2 + t beta = 1, then shrink.
      const double t =
          (-beta + std::sqrt(beta * beta + 4.0 * nu2)) / (2.0 * nu2);
      const double root = safety * t;
      return {root, root, root * root, safety};
    }
    default:
      return StepSizes::from_lambda(safety / nu2, safety);
  }
}

void validate_step_sizes(Variant v, const ConstrainedProblem& p,
                         const StepSizes& ss, double norm_estimate) {
  if (ss.tau <= 0.0 || ss.sigma <= 0.0 || ss.lambda <= 0.0) {
    throw ConfigRejected("stepsizes must be positive");
  }
  const double nu = norm_estimate;
  const double nu2 = nu * nu;
  switch (v) {
    case Variant::pdhg:
    case Variant::primal:
    case Variant::dualspace:
    case Variant::tseng:
      if (!(ss.lambda * nu2 < 1.0)) {
        throw ConfigRejected("stepsize condition tau*sigma*||A||^2 < 1 violated (lambda*||A||^2 = " +
                             std::to_string(ss.lambda * nu2) + ")");
      }
      break;
    case Variant::gram:
      if (!(ss.lambda * nu2 * nu2 < 1.0)) {
        throw ConfigRejected("stepsize condition tau*sigma*||A||^4 < 1 violated (lambda*||A||^4 = " +
                             std::to_string(ss.lambda * nu2 * nu2) + ")");
      }
      break;
    case Variant::smooth:
    case Variant::condat_vu: {
      if (!p.has_h()) {
        throw ConfigRejected(std::string(variant_name(v)) +
                             " requires a smooth term h");
      }
      const double beta = p.h().beta();
      if (!(ss.lambda * nu2 < 1.0 - ss.tau * beta)) {
        throw ConfigRejected(
            "stepsize condition tau*sigma*||A||^2 < 1 - tau*beta violated");
      }
      break;
    }
    case Variant::accel:
    case Variant::accel_pdhg: {
      const double gamma = p.gamma();
      if (!(gamma > 0.0) || std::isinf(gamma)) {
        throw ConfigRejected(
            "accelerated scheme requires g strongly convex with finite gamma > 0");
      }
      if (!(ss.lambda * nu2 <= 1.0)) {
        throw ConfigRejected("stepsize condition lambda*||A||^2 <= 1 violated");
      }
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// State construction.

namespace {

void check_x0(const ConstrainedProblem& p, const VectorXd& x0) {
  if (x0.size() != p.dim()) {
    throw DimensionError("x0 has length " + std::to_string(x0.size()) +
                         ", expected " + std::to_string(p.dim()));
  }
}

}  // namespace

PDHGState make_pdhg_state(const ConstrainedProblem& p, const VectorXd& x0) {
  check_x0(p, x0);
  return {0, x0, x0, VectorXd::Zero(p.codim())};
}

PDHGState make_gram_state(const ConstrainedProblem& p, const VectorXd& x0) {
  check_x0(p, x0);
  return {0, x0, x0, VectorXd::Zero(p.dim())};
}

PrimalState make_primal_state(const VectorXd& x0) { return {0, x0, x0}; }

DualSpaceState make_dualspace_state(const ConstrainedProblem& p,
                                    const VectorXd& x0) {
  check_x0(p, x0);
  VectorXd image = p.A().apply(x0);
  return {0, x0, image, image};
}

AccelState make_accel_state(const VectorXd& x0, double tau0, double lambda) {
  if (tau0 <= 0.0 || lambda <= 0.0) {
    throw ConfigRejected("accelerated schedule needs tau0 > 0 and lambda > 0");
  }
  const double sigma0 = lambda / tau0;
  return {0, x0, x0, tau0, sigma0, sigma0, 0.0};
}

AccelPDHGState make_accel_pdhg_state(const ConstrainedProblem& p,
                                     const VectorXd& x0, double tau0,
                                     double lambda) {
  check_x0(p, x0);
  if (tau0 <= 0.0 || lambda <= 0.0) {
    throw ConfigRejected("accelerated schedule needs tau0 > 0 and lambda > 0");
  }
  const double sigma0 = lambda / tau0;
  return {0,    x0,     x0, VectorXd::Zero(p.codim()),
          tau0, tau0,   sigma0, sigma0, 0.0};
}

TsengState make_tseng_state(const VectorXd& x0) { return {0, x0, x0}; }

// ---------------------------------------------------------------------------
// Steps.

PDHGState step_pdhg(const PDHGState& st, const ConstrainedProblem& p,
                    const StepSizes& ss) {
  const VectorXd xbar = 2.0 * st.x - st.x_prev;
  PDHGState next;
  next.k = st.k + 1;
  next.y = st.y + ss.sigma * (p.A().apply(xbar) - p.b());
  next.x = p.g().prox(ss.tau, st.x - ss.tau * p.A().apply_adjoint(next.y));
  next.x_prev = st.x;
  return next;
}

PrimalState step_primal(const PrimalState& st, const ConstrainedProblem& p,
                        const StepSizes& ss) {
  const double k = static_cast<double>(st.k);
  // (k+1) grad f(z^k) with z^k = (x + k s)/(k+1), expanded so that only one
  // apply of A and one of A' are needed and the b offset stays exact.
  const VectorXd grad =
      p.A().apply_adjoint(p.A().apply(st.x + k * st.s) - (k + 1.0) * p.b());
  PrimalState next;
  next.k = st.k + 1;
  next.x = p.g().prox(ss.tau, st.x - ss.lambda * grad);
  next.s = (next.x + k * st.s) / (k + 1.0);
  return next;
}

DualSpaceState step_primal_dualspace(const DualSpaceState& st,
                                     const ConstrainedProblem& p,
                                     const StepSizes& ss) {
  const double k = static_cast<double>(st.k);
  DualSpaceState next;
  next.k = st.k + 1;
  next.x = p.g().prox(
      ss.tau, st.x - ss.lambda * p.A().apply_adjoint(st.image_x + k * st.image_s -
                                                     (k + 1.0) * p.b()));
  next.image_x = p.A().apply(next.x);
  next.image_s = (next.image_x + k * st.image_s) / (k + 1.0);
  return next;
}

PrimalState step_primal_smooth(const PrimalState& st, const ConstrainedProblem& p,
                               const StepSizes& ss) {
  const SmoothTerm& h = p.h();  // throws ConfigRejected when absent
  const double k = static_cast<double>(st.k);
  const VectorXd grad =
      p.A().apply_adjoint(p.A().apply(st.x + k * st.s) - (k + 1.0) * p.b());
  PrimalState next;
  next.k = st.k + 1;
  next.x = p.g().prox(ss.tau,
                      st.x - ss.tau * h.gradient(st.x) - ss.lambda * grad);
  next.s = (next.x + k * st.s) / (k + 1.0);
  return next;
}

PDHGState step_condat_vu(const PDHGState& st, const ConstrainedProblem& p,
                         const StepSizes& ss) {
  const SmoothTerm& h = p.h();
  const VectorXd xbar = 2.0 * st.x - st.x_prev;
  PDHGState next;
  next.k = st.k + 1;
  next.y = st.y + ss.sigma * (p.A().apply(xbar) - p.b());
  next.x = p.g().prox(
      ss.tau,
      st.x - ss.tau * (p.A().apply_adjoint(next.y) + h.gradient(st.x)));
  next.x_prev = st.x;
  return next;
}

PDHGState step_pdhg_gram(const PDHGState& st, const ConstrainedProblem& p,
                         const StepSizes& ss) {
  const auto gram = [&](const VectorXd& v) {
    return p.A().apply_adjoint(p.A().apply(v));
  };
  const VectorXd xbar = 2.0 * st.x - st.x_prev;
  const VectorXd atb = p.A().apply_adjoint(p.b());
  PDHGState next;
  next.k = st.k + 1;
  next.y = st.y + ss.sigma * (gram(xbar) - atb);
  next.x = p.g().prox(ss.tau, st.x - ss.tau * gram(next.y));
  next.x_prev = st.x;
  return next;
}

ScheduleStep accel_schedule_next(double tau_prev, double lambda) {
  if (tau_prev <= 0.0 || lambda <= 0.0) {
    throw ConfigRejected("accel_schedule_next: tau_prev and lambda must be positive");
  }
  const double tau = tau_prev / std::sqrt(1.0 + tau_prev);
  return {tau, lambda / tau, tau / tau_prev};
}

namespace {

double accel_prox_scale(const ConstrainedProblem& p) {
  const double gamma = p.gamma();
  if (!(gamma > 0.0) || std::isinf(gamma)) {
    throw ConfigRejected(
        "accelerated scheme requires g strongly convex with finite gamma > 0");
  }
  return gamma;
}

}  // namespace

AccelState step_accelerated(const AccelState& st, const ConstrainedProblem& p,
                            double lambda) {
  const double gamma = accel_prox_scale(p);
  // tau_k Sigma_k grad f(z^k) with z^k = (sigma_k x + Sigma_{k-1} s)/Sigma_k.
  const VectorXd grad = p.A().apply_adjoint(
      p.A().apply(st.sigma * st.x + st.sigma_sum_prev * st.s) -
      st.sigma_sum * p.b());
  AccelState next;
  next.k = st.k + 1;
  next.x = p.g().prox(st.tau / gamma, st.x - st.tau * grad);
  next.s = (st.sigma * next.x + st.sigma_sum_prev * st.s) / st.sigma_sum;
  const ScheduleStep sched = accel_schedule_next(st.tau, lambda);
  next.tau = sched.tau;
  next.sigma = sched.sigma;
  next.sigma_sum_prev = st.sigma_sum;
  next.sigma_sum = st.sigma_sum + sched.sigma;
  return next;
}

AccelPDHGState step_accelerated_pdhg(const AccelPDHGState& st,
                                     const ConstrainedProblem& p,
                                     double lambda) {
  const double gamma = accel_prox_scale(p);
  const double theta = st.tau / st.tau_prev;
  const VectorXd xbar = st.x + theta * (st.x - st.x_prev);
  AccelPDHGState next;
  next.k = st.k + 1;
  next.y = st.y + st.sigma * (p.A().apply(xbar) - p.b());
  next.x = p.g().prox(st.tau / gamma,
                      st.x - st.tau * p.A().apply_adjoint(next.y));
  next.x_prev = st.x;
  const ScheduleStep sched = accel_schedule_next(st.tau, lambda);
  next.tau = sched.tau;
  next.tau_prev = st.tau;
  next.sigma = sched.sigma;
  next.sigma_sum_prev = st.sigma_sum;
  next.sigma_sum = st.sigma_sum + sched.sigma;
  return next;
}

TsengState step_tseng(const TsengState& st, const ConstrainedProblem& p,
                      double lambda) {
  const double theta = 2.0 / (static_cast<double>(st.k) + 2.0);
  const VectorXd z = theta * st.x + (1.0 - theta) * st.s;
  const double step = lambda / theta;
  TsengState next;
  next.k = st.k + 1;
  next.x = p.g().prox(step, st.x - step * p.f_grad(z));
  next.s = theta * next.x + (1.0 - theta) * st.s;
  return next;
}

// ---------------------------------------------------------------------------
// Driver.

namespace {

class Recorder {
 public:
  Recorder(Trace& trace, ConstrainedProblem& p, const RunOptions& opt)
      : trace_(trace), p_(p), opt_(opt) {}

  void operator()(long k, const VectorXd& x, const VectorXd& s, double dx,
                  double weight) {
    if (k != 0 && k != opt_.max_iters &&
        (opt_.record_every <= 0 || k % opt_.record_every != 0)) {
      return;
    }
    trace_.k.push_back(k);
    trace_.f_x.push_back(p_.f_value(x));
    trace_.f_s.push_back(p_.f_value(s));
    const double gs = p_.g().value(s);
    const double gap = p_.f_gap(s);
    trace_.g_s.push_back(gs);
    trace_.fgap_s.push_back(gap);
    trace_.F_k_s.push_back(gs + weight * gap);
    trace_.residual_s.push_back((p_.A().apply(s) - p_.b()).norm());
    trace_.dx_norm.push_back(dx);
    trace_.weight.push_back(weight);
    if (opt_.record_snapshots) {
      trace_.x_snapshots.push_back(x);
      trace_.s_snapshots.push_back(s);
    }
  }

 private:
  Trace& trace_;
  ConstrainedProblem& p_;
  const RunOptions& opt_;
};

}  // namespace

Trace run(Variant v, ConstrainedProblem& p, const StepSizes& ss,
          const RunOptions& opt) {
  if (opt.max_iters < 0) throw ConfigRejected("max_iters must be nonnegative");
  const double nu =
      opt.norm_estimate
          ? *opt.norm_estimate
          : estimate_operator_norm(p.A(), 1e-6, 5000, opt.seed).value;
  validate_step_sizes(v, p, ss, nu);
  p.compute_fstar(1e-10);

  const VectorXd x0 = opt.x0 ? *opt.x0 : VectorXd::Zero(p.dim());
  check_x0(p, x0);

  Trace trace;
  trace.variant = v;
  trace.tau = ss.tau;
  trace.sigma = ss.sigma;
  trace.lambda = ss.lambda;
  trace.tau0 = opt.tau0;
  trace.f_star = p.fstar();
  Recorder record(trace, p, opt);

  switch (v) {
    case Variant::pdhg:
    case Variant::condat_vu:
    case Variant::gram: {
      PDHGState st = v == Variant::gram ? make_gram_state(p, x0)
                                        : make_pdhg_state(p, x0);
      VectorXd s = x0;  // shadow average for the trace
      record(0, st.x, s, 0.0, 0.0);
      for (long i = 0; i < opt.max_iters; ++i) {
        PDHGState next = v == Variant::pdhg ? step_pdhg(st, p, ss)
                         : v == Variant::condat_vu ? step_condat_vu(st, p, ss)
                                                   : step_pdhg_gram(st, p, ss);
        s = (next.x + static_cast<double>(st.k) * s) /
            static_cast<double>(st.k + 1);
        record(next.k, next.x, s, (next.x - st.x).norm(),
               ss.sigma * static_cast<double>(next.k));
        st = std::move(next);
      }
      break;
    }
    case Variant::primal:
    case Variant::smooth: {
      PrimalState st = make_primal_state(x0);
      record(0, st.x, st.s, 0.0, 0.0);
      for (long i = 0; i < opt.max_iters; ++i) {
        PrimalState next = v == Variant::primal ? step_primal(st, p, ss)
                                                : step_primal_smooth(st, p, ss);
        record(next.k, next.x, next.s, (next.x - st.x).norm(),
               ss.sigma * static_cast<double>(next.k));
        st = std::move(next);
      }
      break;
    }
    case Variant::dualspace: {
      DualSpaceState st = make_dualspace_state(p, x0);
      VectorXd s = x0;  // shadow primal average, for the trace only
      record(0, st.x, s, 0.0, 0.0);
      for (long i = 0; i < opt.max_iters; ++i) {
        DualSpaceState next = step_primal_dualspace(st, p, ss);
        s = (next.x + static_cast<double>(st.k) * s) /
            static_cast<double>(st.k + 1);
        record(next.k, next.x, s, (next.x - st.x).norm(),
               ss.sigma * static_cast<double>(next.k));
        st = std::move(next);
      }
      break;
    }
    case Variant::accel: {
      AccelState st = make_accel_state(x0, opt.tau0, ss.lambda);
      record(0, st.x, st.s, 0.0, 0.0);
      for (long i = 0; i < opt.max_iters; ++i) {
        AccelState next = step_accelerated(st, p, ss.lambda);
        record(next.k, next.x, next.s, (next.x - st.x).norm(),
               st.sigma_sum);  // Sigma_k of the step = Sigma_{k'-1} at k' = k+1
        st = std::move(next);
      }
      break;
    }
    case Variant::accel_pdhg: {
      AccelPDHGState st = make_accel_pdhg_state(p, x0, opt.tau0, ss.lambda);
      VectorXd s = x0;
      record(0, st.x, s, 0.0, 0.0);
      for (long i = 0; i < opt.max_iters; ++i) {
        AccelPDHGState next = step_accelerated_pdhg(st, p, ss.lambda);
        s = (st.sigma * next.x + st.sigma_sum_prev * s) / st.sigma_sum;
        record(next.k, next.x, s, (next.x - st.x).norm(), st.sigma_sum);
        st = std::move(next);
      }
      break;
    }
    case Variant::tseng: {
      TsengState st = make_tseng_state(x0);
      record(0, st.x, st.s, 0.0, 0.0);
      for (long i = 0; i < opt.max_iters; ++i) {
        TsengState next = step_tseng(st, p, ss.lambda);
        record(next.k, next.x, next.s, (next.x - st.x).norm(),
               ss.sigma * static_cast<double>(next.k));
        st = std::move(next);
      }
      break;
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// CSV.

void write_trace_csv(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path.string());
  out << "k,f_x,f_s,g_s,F_k_s,residual_s,dx_norm\n";
  char buf[32];
  const auto cell = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << ',' << buf;
  };
  for (size_t i = 0; i < trace.size(); ++i) {
    out << trace.k[i];
    cell(trace.f_x[i]);
    cell(trace.f_s[i]);
    cell(trace.g_s[i]);
    cell(trace.F_k_s[i]);
    cell(trace.residual_s[i]);
    cell(trace.dx_norm[i]);
    out << '\n';
  }
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trace: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "k,f_x,f_s,g_s,F_k_s,residual_s,dx_norm") {
    throw ParseError(path.string() + ": unexpected trace header");
  }
  Trace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::array<double, 6> values{};
    if (!std::getline(row, cell, ',')) {
      throw ParseError(path.string() + ": bad trace row");
    }
    trace.k.push_back(std::stol(cell));
    for (double& v : values) {
      if (!std::getline(row, cell, ',')) {
        throw ParseError(path.string() + ": bad trace row");
      }
      v = std::stod(cell);
    }
    trace.f_x.push_back(values[0]);
    trace.f_s.push_back(values[1]);
    trace.g_s.push_back(values[2]);
    trace.F_k_s.push_back(values[3]);
    trace.residual_s.push_back(values[4]);
    trace.dx_norm.push_back(values[5]);
  }
  return trace;
}

}  // namespace pdprox
