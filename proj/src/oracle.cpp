#include "pdprox/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace pdprox {
namespace oracle {

MatrixXd materialize(const LinearMap& a) {
  MatrixXd m(a.rows(), a.cols());
  VectorXd e = VectorXd::Zero(a.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    e[j] = 1.0;
    m.col(j) = a.apply(e);
    e[j] = 0.0;
  }
  return m;
}

double operator_norm_dense(const LinearMap& a) {
  const MatrixXd m = materialize(a);
  return m.jacobiSvd().singularValues()(0);
}

LeastSquaresSolution solve_least_squares(const LinearMap& a, const VectorXd& b,
                                         double tol, long max_iters) {
  if (b.size() != a.rows()) {
    throw DimensionError("solve_least_squares: b has wrong length");
  }
  if (tol <= 0.0) {
    throw DimensionError("solve_least_squares: tol must be positive");
  }

  if (a.cols() <= 50) {
    const MatrixXd m = materialize(a);
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(m);
    VectorXd x = cod.solve(b);
    return {x, 0.5 * (m * x - b).squaredNorm(), 0};
  }

  // Conjugate gradient on A'Ax = A'b.
  const VectorXd atb = a.apply_adjoint(b);
  const double stop = tol * (1.0 + atb.norm());
  VectorXd x = VectorXd::Zero(a.cols());
  VectorXd r = atb;  // A'b - A'Ax with x = 0
  VectorXd d = r;
  double rr = r.squaredNorm();
  long it = 0;
  while (std::sqrt(rr) > stop) {
    if (++it > max_iters) {
      throw ConvergenceError(
          "solve_least_squares: CG did not reach tolerance; residual " +
              std::to_string(std::sqrt(rr)),
          std::sqrt(rr));
    }
    const VectorXd ad = a.apply_adjoint(a.apply(d));
    const double dad = d.dot(ad);
    if (dad <= 0.0) break;  // numerically null direction; current x is optimal
    const double alpha = rr / dad;
    x += alpha * d;
    r -= alpha * ad;
    const double rr_next = r.squaredNorm();
    d = r + (rr_next / rr) * d;
    rr = rr_next;
  }
  return {x, 0.5 * (a.apply(x) - b).squaredNorm(), it};
}

KktSolution solve_qp_kkt(const MatrixXd& q, const VectorXd& c,
                         const LinearMap& a, const VectorXd& b, double tol) {
  const Index n = a.cols();
  if (q.rows() != n || q.cols() != n || c.size() != n) {
    throw DimensionError("solve_qp_kkt: Q or c has wrong shape");
  }
  if (n > 50) {
    throw DimensionError("solve_qp_kkt: dense oracle is limited to n <= 50");
  }

  const MatrixXd am = materialize(a);
  const MatrixXd gram = am.transpose() * am;
  const VectorXd atb = am.transpose() * b;

  //   [ Q     A'A ] [x]   [ -c  ]
  //   [ A'A    0  ] [u] = [ A'b ]
  MatrixXd kkt(2 * n, 2 * n);
  kkt << q, gram, gram, MatrixXd::Zero(n, n);
  VectorXd rhs(2 * n);
  rhs << -c, atb;

  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(kkt);
  const VectorXd sol = cod.solve(rhs);
  const VectorXd x = sol.head(n);
  const VectorXd u = sol.tail(n);

  const double scale = 1.0 + rhs.norm();
  if ((q * x + c + gram * u).norm() > tol * scale ||
      (gram * x - atb).norm() > tol * scale) {
    throw ConvergenceError(
        "solve_qp_kkt: KKT system has no accurate solution (no certificate)",
        (kkt * sol - rhs).norm());
  }

  KktSolution out;
  out.x = x;
  out.u = u;
  out.g_star = 0.5 * x.dot(q * x) + c.dot(x);
  out.d_y = (am * u).norm();
  return out;
}

namespace {

VectorXd penalized_from(const ConstrainedProblem& p, double rho, double tol,
                        long max_iters, VectorXd x) {
  const double norm = operator_norm_dense(p.A());
  if (norm == 0.0) {
    // Penalty term is constant; minimize g alone.
    return p.g().prox(1e12, VectorXd::Zero(p.dim()));
  }
  const double eta = 0.99 / (rho * norm * norm);
  for (long it = 0; it < max_iters; ++it) {
    const VectorXd grad = rho * p.A().apply_adjoint(p.A().apply(x) - p.b());
    VectorXd x_next = p.g().prox(eta, x - eta * grad);
    const double move = (x_next - x).norm();
    x = std::move(x_next);
    if (move <= tol) return x;
  }
  throw ConvergenceError("solve_penalized: iteration cap exceeded", tol);
}

}  // namespace

VectorXd solve_penalized(const ConstrainedProblem& p, double rho, double tol,
                         long max_iters) {
  if (rho <= 0.0) throw DimensionError("solve_penalized: rho must be positive");
  return penalized_from(p, rho, tol, max_iters, VectorXd::Zero(p.dim()));
}

VectorXd reference_solution(const ConstrainedProblem& p, double tol) {
  VectorXd x = VectorXd::Zero(p.dim());
  for (double rho : {1e2, 1e4, 1e6, 1e8}) {
    x = penalized_from(p, rho, tol, 10000000, std::move(x));
  }
  return x;
}

KktSolution certify_quadratic(ConstrainedProblem& p, double tol) {
  const auto form = p.g().quadratic_form();
  if (!form) {
    throw ConvergenceError("certify_quadratic: g has no quadratic form", 0.0);
  }
  p.compute_fstar(std::min(tol, 1e-10));
  KktSolution sol = solve_qp_kkt(form->quadratic, form->linear, p.A(), p.b(), tol);
  sol.g_star += form->constant;
  return sol;
}

KktSolution certify_singleton(ConstrainedProblem& p, double tol) {
  if (p.dim() > 50) {
    throw DimensionError("certify_singleton: dense oracle is limited to n <= 50");
  }
  p.compute_fstar(std::min(tol, 1e-10));
  const VectorXd& x_star = p.least_squares_point();
  const auto v = p.g().subgradient(x_star);
  if (!v) {
    throw ConvergenceError(
        "certify_singleton: no subgradient available for this g", 0.0);
  }
  const MatrixXd am = materialize(p.A());
  const MatrixXd gram = am.transpose() * am;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(gram);
  if (cod.rank() < p.dim()) {
    throw ConvergenceError(
        "certify_singleton: argmin f is not a single point (A'A singular)", 0.0);
  }
  KktSolution sol;
  sol.x = x_star;
  sol.u = cod.solve(-*v);
  if ((gram * sol.u + *v).norm() > tol * (1.0 + v->norm())) {
    throw ConvergenceError("certify_singleton: multiplier solve is inaccurate",
                           (gram * sol.u + *v).norm());
  }
  sol.g_star = p.g().value(x_star);
  sol.d_y = (am * sol.u).norm();
  return sol;
}

KktSolution certify(ConstrainedProblem& p, double tol) {
  if (p.g().quadratic_form()) return certify_quadratic(p, tol);
  return certify_singleton(p, tol);
}

bool check_three_point_identity(const LinearMap& a, const VectorXd& b,
                                const VectorXd& u, const VectorXd& v,
                                double tol) {
  const auto ls = solve_least_squares(a, b, 1e-13);
  const double f_star = ls.f_star;
  const auto f = [&](const VectorXd& x) {
    return 0.5 * (a.apply(x) - b).squaredNorm();
  };
  const VectorXd grad_u = a.apply_adjoint(a.apply(u) - b);
  const double lhs = grad_u.dot(ls.x - v);
  const double rhs =
      2.0 * f_star - f(u) - f(v) + 0.5 * a.apply(u - v).squaredNorm();
  return std::abs(lhs - rhs) <= tol * (1.0 + std::abs(rhs));
}

}  // namespace oracle
}  // namespace pdprox
