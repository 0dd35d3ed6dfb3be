#pragma once

#include <Eigen/Core>

#include "pdprox/linear_map.hpp"
#include "pdprox/problem.hpp"

namespace pdprox {
namespace oracle {

/// Reference computations used to certify solver output.  These are built
/// and trusted before any solver is; they must stay independent of the
/// iteration schemes they check.

struct LeastSquaresSolution {
  VectorXd x;
  double f_star = 0.0;
  long iterations = 0;
};

/// min_x 0.5 ||Ax - b||^2.  Dense complete-orthogonal solve when n <= 50
/// (handles rank deficiency with the minimum-norm solution), conjugate
/// gradient on the normal equations otherwise.  Stops when
/// ||A'(Ax - b)|| <= tol * (1 + ||A'b||).
LeastSquaresSolution solve_least_squares(const LinearMap& a, const VectorXd& b,
                                         double tol = 1e-12,
                                         long max_iters = 100000);

struct KktSolution {
  VectorXd x;        // minimizer of g over { x : A'Ax = A'b }
  VectorXd u;        // multiplier: Qx + c + A'Au = 0
  double g_star = 0.0;
  double d_y = 0.0;  // ||Au||, the dual certificate scale
};

/// Solves min 0.5 x'Qx + c'x  s.t.  A'Ax = A'b for SPD Q by a dense solve of
/// the KKT system.  A rank-deficient A'A is handled with the minimum-norm
/// multiplier (Au, hence d_y, is unique whenever a multiplier exists).
/// Throws ConvergenceError when no accurate KKT solution exists.
KktSolution solve_qp_kkt(const MatrixXd& q, const VectorXd& c,
                         const LinearMap& a, const VectorXd& b,
                         double tol = 1e-10);

/// min_x g(x) + (rho/2) ||Ax - b||^2 by proximal gradient with step
/// 0.99 / (rho ||A||^2), run until ||x_next - x|| <= tol.
VectorXd solve_penalized(const ConstrainedProblem& p, double rho, double tol,
                         long max_iters = 10000000);

/// High-accuracy reference solution for non-quadratic g: penalized solves
/// with rho in {1e2, 1e4, 1e6, 1e8}, warm-started.
VectorXd reference_solution(const ConstrainedProblem& p, double tol = 1e-10);

/// Certificate via the KKT oracle; g must expose a quadratic form.  Caches
/// f_* on the problem.
KktSolution certify_quadratic(ConstrainedProblem& p, double tol = 1e-10);

/// Certificate when argmin f is a single point (A'A invertible): x* is the
/// least-squares point and u* solves A'A u = -v for a subgradient v of g at
/// x*.  Works for any g with a nameable subgradient (l1, quadratic, ...).
KktSolution certify_singleton(ConstrainedProblem& p, double tol = 1e-10);

/// Quadratic path when available, singleton path otherwise.
KktSolution certify(ConstrainedProblem& p, double tol = 1e-10);

/// With xb = argmin f it holds, for all u, v:
///   <grad f(u), xb - v> = 2 f_* - f(u) - f(v) + 0.5 ||A(u - v)||^2.
/// Returns true iff the two sides agree within tol * (1 + |rhs|).
bool check_three_point_identity(const LinearMap& a, const VectorXd& b,
                                const VectorXd& u, const VectorXd& v,
                                double tol = 1e-10);

/// Applies the map to basis vectors.  Desk scale only.
MatrixXd materialize(const LinearMap& a);

/// Exact operator norm by dense decomposition.  Desk scale only.
double operator_norm_dense(const LinearMap& a);

}  // namespace oracle
}  // namespace pdprox
