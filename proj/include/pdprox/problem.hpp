#pragma once

#include <memory>
#include <optional>
#include <utility>

#include "pdprox/linear_map.hpp"
#include "pdprox/prox.hpp"

namespace pdprox {

/// Convex differentiable term with a beta-Lipschitz gradient.
class SmoothTerm {
 public:
  virtual ~SmoothTerm() = default;
  virtual double value(const VectorXd& x) const = 0;
  virtual VectorXd gradient(const VectorXd& x) const = 0;
  virtual double beta() const = 0;
};

using SmoothPtr = std::shared_ptr<const SmoothTerm>;

/// h(x) = <c, x>, beta = 0.
class LinearSmoothTerm final : public SmoothTerm {
 public:
  explicit LinearSmoothTerm(VectorXd c) : c_(std::move(c)) {}
  double value(const VectorXd& x) const override { return c_.dot(x); }
  VectorXd gradient(const VectorXd&) const override { return c_; }
  double beta() const override { return 0.0; }

 private:
  VectorXd c_;
};

/// h(x) = (rho/2) ||x - a||^2, beta = rho.
class QuadraticSmoothTerm final : public SmoothTerm {
 public:
  QuadraticSmoothTerm(double rho, VectorXd a) : rho_(rho), a_(std::move(a)) {
    if (rho <= 0.0) {
      throw DimensionError("QuadraticSmoothTerm: rho must be positive");
    }
  }
  double value(const VectorXd& x) const override {
    return 0.5 * rho_ * (x - a_).squaredNorm();
  }
  VectorXd gradient(const VectorXd& x) const override { return rho_ * (x - a_); }
  double beta() const override { return rho_; }

 private:
  double rho_;
  VectorXd a_;
};

/// min g(x) (+ h(x))  s.t.  x in argmin f,  with f(x) = 0.5 ||Ax - b||^2.
///
/// f_* and the least-squares point are computed once by the oracle and
/// cached; everything else is immutable.
class ConstrainedProblem {
 public:
  ConstrainedProblem(MapPtr a, VectorXd b, ProxPtr g, SmoothPtr h = nullptr);

  const LinearMap& A() const { return *a_; }
  const MapPtr& A_ptr() const { return a_; }
  const VectorXd& b() const { return b_; }
  const ProxFunction& g() const { return *g_; }
  const ProxPtr& g_ptr() const { return g_; }
  bool has_h() const { return h_ != nullptr; }
  const SmoothTerm& h() const;
  Index dim() const { return a_->cols(); }
  Index codim() const { return a_->rows(); }

  /// Strong-convexity modulus of g.
  double gamma() const { return g_->strong_convexity(); }

  double f_value(const VectorXd& x) const {
    return 0.5 * (a_->apply(x) - b_).squaredNorm();
  }

  /// grad f(x) = A'(Ax - b).
  VectorXd f_grad(const VectorXd& x) const {
    return a_->apply_adjoint(a_->apply(x) - b_);
  }

  /// Computes f_* = min f by least squares, caches it together with the
  /// minimizer, and returns it.  Snaps to exactly 0 when the residual
  /// certifies feasibility within tol.  Subsequent calls return the cache.
  double compute_fstar(double tol = 1e-10);

  bool fstar_cached() const { return fstar_.has_value(); }
  double fstar() const;
  const VectorXd& least_squares_point() const;

  /// f(x) - f_*, evaluated as 0.5 ||A(x - x_ls)||^2, which is exact for a
  /// quadratic f and avoids cancellation when f_* > 0.
  double f_gap(const VectorXd& x) const;

  /// Pre-set f_* (e.g. from a manifest).  Leaves the minimizer unset, so
  /// f_gap falls back to f(x) - f_*.
  void set_fstar(double fstar);

 private:
  MapPtr a_;
  VectorXd b_;
  ProxPtr g_;
  SmoothPtr h_;
  std::optional<double> fstar_;
  std::optional<VectorXd> x_ls_;
};

}  // namespace pdprox
