#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pdprox/diagnostics.hpp"
#include "pdprox/oracle.hpp"
#include "pdprox/problem.hpp"
#include "pdprox/solvers.hpp"

namespace testsupport {

using namespace pdprox;

inline VectorXd randn_vector(Index n, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

inline MatrixXd randn_matrix(Index m, Index n, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd a(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = gauss(rng);
  }
  return a;
}

inline MapPtr random_dense_map(Index m, Index n, std::mt19937& rng) {
  return std::make_shared<DenseMap>(randn_matrix(m, n, rng));
}

/// A = [2], b = (2), g = 0.5 x^2: the 1-D fixture used throughout.
inline ConstrainedProblem canonical_problem() {
  auto a = std::make_shared<DenseMap>(MatrixXd::Constant(1, 1, 2.0));
  auto g = std::make_shared<QuadraticFunction>(1.0, VectorXd::Zero(1));
  return ConstrainedProblem(a, VectorXd::Constant(1, 2.0), g);
}

enum class GFamily { quadratic, l1, box, strongly_convex_l1 };

inline ProxPtr make_g(GFamily family, Index n, std::mt19937& rng) {
  switch (family) {
    case GFamily::quadratic:
      return std::make_shared<QuadraticFunction>(1.0, randn_vector(n, rng));
    case GFamily::l1:
      return std::make_shared<L1Norm>(n, 0.5);
    case GFamily::box:
      return std::make_shared<BoxIndicator>(VectorXd::Constant(n, -1.0),
                                            VectorXd::Constant(n, 1.0));
    case GFamily::strongly_convex_l1:
      return std::make_shared<StronglyConvexified>(
          std::make_shared<L1Norm>(n, 0.5), 1.0);
  }
  return nullptr;
}

/// Random dense problem; when consistent, b = A x_true.
inline ConstrainedProblem random_problem(Index m, Index n, GFamily family,
                                         std::mt19937& rng,
                                         bool consistent = false) {
  MatrixXd a = randn_matrix(m, n, rng);
  VectorXd b = consistent ? VectorXd(a * randn_vector(n, rng))
                          : randn_vector(m, rng);
  return ConstrainedProblem(std::make_shared<DenseMap>(std::move(a)),
                            std::move(b), make_g(family, n, rng));
}

/// Quadratic-g problem with oracle certificates: g = sum of blocks
/// (rho_i/2)||x_i - a_i||^2 with mixed moduli.
struct CertifiedInstance {
  ConstrainedProblem problem;
  oracle::KktSolution kkt;
  VectorXd x0;
  Certificates cert;
};

inline CertifiedInstance certified_quadratic(Index m, Index n, std::mt19937& rng,
                                             bool consistent,
                                             double rho_scale = 1.0) {
  MatrixXd a = randn_matrix(m, n, rng);
  VectorXd b = consistent ? VectorXd(a * randn_vector(n, rng))
                          : randn_vector(m, rng);
  const VectorXd center = randn_vector(n, rng);
  auto g = std::make_shared<QuadraticFunction>(rho_scale, center);

  CertifiedInstance out{
      ConstrainedProblem(std::make_shared<DenseMap>(std::move(a)), std::move(b),
                         g),
      {}, VectorXd::Zero(n), {}};
  out.problem.compute_fstar(1e-12);
  const auto form = g->quadratic_form().value();
  out.kkt = oracle::solve_qp_kkt(form.quadratic, form.linear, out.problem.A(),
                                 out.problem.b());
  out.kkt.g_star += form.constant;
  out.x0 = randn_vector(n, rng);
  out.cert = make_certificates(out.kkt, out.problem, out.x0);
  return out;
}

/// Wraps a map and counts apply / apply_adjoint calls.
class CountingMap final : public LinearMap {
 public:
  explicit CountingMap(MapPtr inner)
      : LinearMap(inner->rows(), inner->cols()), inner_(std::move(inner)) {}

  bool symmetric_psd() const override { return inner_->symmetric_psd(); }
  mutable long applies = 0;
  mutable long adjoint_applies = 0;

 private:
  VectorXd do_apply(const VectorXd& x) const override {
    ++applies;
    return inner_->apply(x);
  }
  VectorXd do_apply_adjoint(const VectorXd& y) const override {
    ++adjoint_applies;
    return inner_->apply_adjoint(y);
  }

  MapPtr inner_;
};

}  // namespace testsupport
