#include "pdprox/problem.hpp"

#include "pdprox/oracle.hpp"

namespace pdprox {

ConstrainedProblem::ConstrainedProblem(MapPtr a, VectorXd b, ProxPtr g, SmoothPtr h)
    : a_(std::move(a)), b_(std::move(b)), g_(std::move(g)), h_(std::move(h)) {
  if (!a_ || !g_) {
    throw DimensionError("ConstrainedProblem: A and g are required");
  }
  if (b_.size() != a_->rows()) {
    throw DimensionError("ConstrainedProblem: b has length " +
                         std::to_string(b_.size()) + ", expected " +
                         std::to_string(a_->rows()));
  }
  if (g_->dim() != a_->cols()) {
    throw DimensionError("ConstrainedProblem: g has dimension " +
                         std::to_string(g_->dim()) + ", expected " +
                         std::to_string(a_->cols()));
  }
}

const SmoothTerm& ConstrainedProblem::h() const {
  if (!h_) throw ConfigRejected("problem has no smooth term h");
  return *h_;
}

double ConstrainedProblem::compute_fstar(double tol) {
  if (fstar_) return *fstar_;
  if (tol <= 0.0) throw DimensionError("compute_fstar: tol must be positive");
  auto ls = oracle::solve_least_squares(*a_, b_, tol);
  x_ls_ = std::move(ls.x);
  const double residual = (a_->apply(*x_ls_) - b_).norm();
  fstar_ = residual <= tol ? 0.0 : ls.f_star;
  return *fstar_;
}

double ConstrainedProblem::fstar() const {
  if (!fstar_) {
    throw DimensionError("fstar: call compute_fstar first");
  }
  return *fstar_;
}

const VectorXd& ConstrainedProblem::least_squares_point() const {
  if (!x_ls_) {
    throw DimensionError("least_squares_point: call compute_fstar first");
  }
  return *x_ls_;
}

double ConstrainedProblem::f_gap(const VectorXd& x) const {
  if (x_ls_) {
    return 0.5 * a_->apply(x - *x_ls_).squaredNorm();
  }
  return f_value(x) - fstar();
}

void ConstrainedProblem::set_fstar(double fstar) {
  if (fstar < 0.0) throw DimensionError("set_fstar: f_* must be nonnegative");
  fstar_ = fstar;
  x_ls_.reset();
}

}  // namespace pdprox
