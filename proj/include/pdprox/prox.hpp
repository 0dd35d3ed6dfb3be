#pragma once

#include <Eigen/Core>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "pdprox/errors.hpp"

namespace pdprox {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// g as 0.5 x'Qx + c'x + constant, when g happens to be quadratic.  Used by
/// the KKT oracle to produce reference solutions and dual certificates.
struct QuadraticForm {
  MatrixXd quadratic;
  VectorXd linear;
  double constant = 0.0;
};

/// A proper lsc convex function with an exact proximal operator.
/// Instances are immutable; all operations are re-entrant.
class ProxFunction {
 public:
  virtual ~ProxFunction() = default;

  Index dim() const { return dim_; }

  /// Extended-real function value; +inf outside the domain of indicators.
  double value(const VectorXd& x) const {
    check_dim(x);
    return do_value(x);
  }

  /// argmin_u { step * g(u) + 0.5 ||u - z||^2 }, in closed form.
  VectorXd prox(double step, const VectorXd& z) const {
    if (step <= 0.0) {
      throw DimensionError("prox: step must be positive");
    }
    check_dim(z);
    return do_prox(step, z);
  }

  /// Strong-convexity modulus gamma >= 0; +inf for the single-point
  /// indicator (which the accelerated scheme rejects).
  virtual double strong_convexity() const { return 0.0; }

  /// Present when g is quadratic (enables KKT certificates).
  virtual std::optional<QuadraticForm> quadratic_form() const { return std::nullopt; }

  /// Some element of the subdifferential at x, for the families where one is
  /// cheap to name.  Used to build dual certificates when argmin f is a
  /// single point.
  virtual std::optional<VectorXd> subgradient(const VectorXd& x) const {
    (void)x;
    return std::nullopt;
  }

 protected:
  explicit ProxFunction(Index dim) : dim_(dim) {
    if (dim < 1) throw DimensionError("ProxFunction: dimension must be positive");
  }

  void check_dim(const VectorXd& x) const {
    if (x.size() != dim_) {
      throw DimensionError("ProxFunction: expected vector of length " +
                           std::to_string(dim_) + ", got " +
                           std::to_string(x.size()));
    }
  }

  virtual double do_value(const VectorXd& x) const = 0;
  virtual VectorXd do_prox(double step, const VectorXd& z) const = 0;

 private:
  Index dim_;
};

using ProxPtr = std::shared_ptr<const ProxFunction>;

/// g = 0.
class ZeroFunction final : public ProxFunction {
 public:
  explicit ZeroFunction(Index dim) : ProxFunction(dim) {}

  std::optional<VectorXd> subgradient(const VectorXd&) const override {
    return VectorXd::Zero(dim());
  }

 private:
  double do_value(const VectorXd&) const override { return 0.0; }
  VectorXd do_prox(double, const VectorXd& z) const override { return z; }
};

/// g(x) = <c, x>.
class LinearFunction final : public ProxFunction {
 public:
  explicit LinearFunction(VectorXd c) : ProxFunction(c.size()), c_(std::move(c)) {}

  std::optional<QuadraticForm> quadratic_form() const override {
    return QuadraticForm{MatrixXd::Zero(dim(), dim()), c_, 0.0};
  }
  std::optional<VectorXd> subgradient(const VectorXd&) const override { return c_; }

 private:
  double do_value(const VectorXd& x) const override { return c_.dot(x); }
  VectorXd do_prox(double step, const VectorXd& z) const override {
    return z - step * c_;
  }

  VectorXd c_;
};

/// g(x) = (rho/2) ||x - a||^2, strongly convex with modulus rho.
class QuadraticFunction final : public ProxFunction {
 public:
  QuadraticFunction(double rho, VectorXd a)
      : ProxFunction(a.size()), rho_(rho), a_(std::move(a)) {
    if (rho <= 0.0) throw DimensionError("QuadraticFunction: rho must be positive");
  }

  double strong_convexity() const override { return rho_; }

  std::optional<QuadraticForm> quadratic_form() const override {
    return QuadraticForm{rho_ * MatrixXd::Identity(dim(), dim()), -rho_ * a_,
                         0.5 * rho_ * a_.squaredNorm()};
  }
  std::optional<VectorXd> subgradient(const VectorXd& x) const override {
    return rho_ * (x - a_);
  }

 private:
  double do_value(const VectorXd& x) const override {
    return 0.5 * rho_ * (x - a_).squaredNorm();
  }
  VectorXd do_prox(double step, const VectorXd& z) const override {
    return (z + step * rho_ * a_) / (1.0 + step * rho_);
  }

  double rho_;
  VectorXd a_;
};

/// g(x) = w ||x||_1; prox is the soft threshold at w * step.
class L1Norm final : public ProxFunction {
 public:
  L1Norm(Index dim, double weight) : ProxFunction(dim), weight_(weight) {
    if (weight <= 0.0) throw DimensionError("L1Norm: weight must be positive");
  }

  std::optional<VectorXd> subgradient(const VectorXd& x) const override {
    VectorXd v(x.size());
    for (Index i = 0; i < x.size(); ++i) {
      v[i] = x[i] > 0.0 ? weight_ : (x[i] < 0.0 ? -weight_ : 0.0);
    }
    return v;
  }

 private:
  double do_value(const VectorXd& x) const override {
    return weight_ * x.lpNorm<1>();
  }
  VectorXd do_prox(double step, const VectorXd& z) const override {
    const double t = weight_ * step;
    VectorXd out(z.size());
    for (Index i = 0; i < z.size(); ++i) {
      out[i] = z[i] > t ? z[i] - t : (z[i] < -t ? z[i] + t : 0.0);
    }
    return out;
  }

  double weight_;
};

/// Indicator of the box [lo, hi] (componentwise, entries may be +-inf).
class BoxIndicator final : public ProxFunction {
 public:
  BoxIndicator(VectorXd lo, VectorXd hi)
      : ProxFunction(lo.size()), lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != hi_.size() || (lo_.array() > hi_.array()).any()) {
      throw DimensionError("BoxIndicator: need lo <= hi of equal length");
    }
  }

  static BoxIndicator nonnegative(Index dim) {
    return BoxIndicator(VectorXd::Zero(dim), VectorXd::Constant(dim, kInf));
  }

 private:
  double do_value(const VectorXd& x) const override {
    return (x.array() < lo_.array()).any() || (x.array() > hi_.array()).any()
               ? kInf
               : 0.0;
  }
  VectorXd do_prox(double, const VectorXd& z) const override {
    return z.cwiseMax(lo_).cwiseMin(hi_);
  }

  VectorXd lo_;
  VectorXd hi_;
};

/// Indicator of the single point {a}.  No finite strong-convexity modulus;
/// the accelerated scheme rejects it.
class PointIndicator final : public ProxFunction {
 public:
  explicit PointIndicator(VectorXd a) : ProxFunction(a.size()), a_(std::move(a)) {}

  double strong_convexity() const override { return kInf; }

 private:
  double do_value(const VectorXd& x) const override {
    // Tolerate roundoff from averaging sequences of prox outputs.
    const double tol = 1e-12 * (1.0 + a_.lpNorm<Eigen::Infinity>());
    return (x - a_).lpNorm<Eigen::Infinity>() <= tol ? 0.0 : kInf;
  }
  VectorXd do_prox(double, const VectorXd&) const override { return a_; }

  VectorXd a_;
};

/// Separable sum g(x) = sum_i g_i(x_i) over consecutive blocks.
class SeparableSum final : public ProxFunction {
 public:
  explicit SeparableSum(std::vector<ProxPtr> parts);

  double strong_convexity() const override { return gamma_; }
  std::optional<QuadraticForm> quadratic_form() const override;
  std::optional<VectorXd> subgradient(const VectorXd& x) const override;
  const std::vector<ProxPtr>& parts() const { return parts_; }

 private:
  double do_value(const VectorXd& x) const override;
  VectorXd do_prox(double step, const VectorXd& z) const override;

  static Index total_dim(const std::vector<ProxPtr>& parts);

  std::vector<ProxPtr> parts_;
  std::vector<Index> offsets_;
  double gamma_ = 0.0;
};

/// g(x) + (rho/2) ||x||^2; the prox reduces to the prox of g at a shrunken
/// step: prox_{t(g + rho/2||.||^2)}(z) = prox_{t' g}(z / (1 + t rho)) with
/// t' = t / (1 + t rho).
class StronglyConvexified final : public ProxFunction {
 public:
  StronglyConvexified(ProxPtr inner, double rho)
      : ProxFunction(inner->dim()), inner_(std::move(inner)), rho_(rho) {
    if (rho <= 0.0) throw DimensionError("StronglyConvexified: rho must be positive");
  }

  double strong_convexity() const override {
    return rho_ + inner_->strong_convexity();
  }

  std::optional<QuadraticForm> quadratic_form() const override {
    auto q = inner_->quadratic_form();
    if (!q) return std::nullopt;
    q->quadratic += rho_ * MatrixXd::Identity(dim(), dim());
    return q;
  }

  std::optional<VectorXd> subgradient(const VectorXd& x) const override {
    auto v = inner_->subgradient(x);
    if (!v) return std::nullopt;
    return *v + rho_ * x;
  }

 private:
  double do_value(const VectorXd& x) const override {
    return inner_->value(x) + 0.5 * rho_ * x.squaredNorm();
  }
  VectorXd do_prox(double step, const VectorXd& z) const override {
    const double shrink = 1.0 + step * rho_;
    return inner_->prox(step / shrink, z / shrink);
  }

  ProxPtr inner_;
  double rho_;
};

/// Checks the variational characterization of the prox: with xb = prox(g,
/// step, z), every probe x in dom g must satisfy
///   <xb - z, x - xb> >= step (g(xb) - g(x)) + step*gamma/2 ||xb - x||^2 - tol.
/// Probes with g(x) = +inf are skipped.
bool check_prox_inequality(const ProxFunction& g, double step, const VectorXd& z,
                           const std::vector<VectorXd>& probes,
                           double tol = 1e-9);

}  // namespace pdprox
