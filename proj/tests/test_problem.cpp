#include <doctest.h>

#include <cmath>
#include <random>

#include "pdprox/oracle.hpp"
#include "pdprox/problem.hpp"
#include "support.hpp"

using namespace pdprox;
using testsupport::canonical_problem;
using testsupport::randn_vector;

namespace {

VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

/// A = (1,1)^T (2x1), b = (0,2): inconsistent with f_* = 1 at x = 1.
ConstrainedProblem tall_inconsistent() {
  MatrixXd a(2, 1);
  a << 1.0, 1.0;
  return ConstrainedProblem(std::make_shared<DenseMap>(a), vec({0.0, 2.0}),
                            std::make_shared<QuadraticFunction>(1.0, VectorXd::Zero(1)));
}

}  // namespace

TEST_CASE("f values") {
  auto p = canonical_problem();
  CHECK(p.f_value(vec({1.0})) == 0.0);
  CHECK(p.f_value(vec({0.0})) == doctest::Approx(2.0).epsilon(1e-15));

  auto q = tall_inconsistent();
  CHECK(q.f_value(vec({1.0})) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("f gradient") {
  auto p = canonical_problem();
  CHECK(p.f_grad(vec({0.0}))[0] == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(p.f_grad(vec({1.0})).norm() == 0.0);  // Ax = b

  auto q = tall_inconsistent();
  CHECK(q.f_grad(vec({1.0})).norm() <= 1e-15);  // least-squares point
}

TEST_CASE("gradient matches central differences") {
  std::mt19937 rng(43);
  auto p = testsupport::random_problem(6, 9, testsupport::GFamily::quadratic, rng);
  for (int trial = 0; trial < 20; ++trial) {
    const VectorXd x = 3.0 * randn_vector(9, rng);
    const VectorXd grad = p.f_grad(x);
    const double step = 1e-5 * (1.0 + x.norm());
    for (Index i = 0; i < x.size(); ++i) {
      VectorXd e = VectorXd::Zero(9);
      e[i] = step;
      const double fd = (p.f_value(x + e) - p.f_value(x - e)) / (2.0 * step);
      CHECK(std::abs(fd - grad[i]) <= 1e-6 * (1.0 + std::abs(grad[i])));
    }
  }
}

TEST_CASE("compute_fstar") {
  auto p = canonical_problem();
  CHECK(p.compute_fstar() == 0.0);
  CHECK(p.fstar_cached());
  CHECK(p.least_squares_point()[0] == doctest::Approx(1.0).epsilon(1e-12));

  auto q = tall_inconsistent();
  CHECK(q.compute_fstar() == doctest::Approx(1.0).epsilon(1e-12));

  auto zero = ConstrainedProblem(std::make_shared<DenseMap>(MatrixXd::Zero(1, 1)),
                                 vec({1.0}),
                                 std::make_shared<ZeroFunction>(1));
  CHECK(zero.compute_fstar() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("f(x) >= f_* on random probes") {
  std::mt19937 rng(47);
  auto p = testsupport::random_problem(8, 5, testsupport::GFamily::l1, rng);
  p.compute_fstar();
  for (int trial = 0; trial < 200; ++trial) {
    CHECK(p.f_value(5.0 * randn_vector(5, rng)) >= p.fstar() - 1e-12);
  }
}

TEST_CASE("quadratic interpolation identity") {
  std::mt19937 rng(53);
  auto p = testsupport::random_problem(7, 4, testsupport::GFamily::quadratic, rng);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const VectorXd x = randn_vector(4, rng);
    const VectorXd y = randn_vector(4, rng);
    const double alpha = unif(rng);
    const double lhs = alpha * p.f_value(x) + (1.0 - alpha) * p.f_value(y) -
                       p.f_value(alpha * x + (1.0 - alpha) * y);
    const double rhs =
        0.5 * alpha * (1.0 - alpha) * p.A().apply(x - y).squaredNorm();
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("distance identity f(x) - f_* = 0.5 ||A(x - x_ls)||^2") {
  std::mt19937 rng(59);
  auto p = testsupport::random_problem(9, 6, testsupport::GFamily::quadratic, rng);
  p.compute_fstar(1e-12);
  for (int trial = 0; trial < 100; ++trial) {
    const VectorXd x = 4.0 * randn_vector(6, rng);
    const double direct = p.f_value(x) - p.fstar();
    const double distance = p.f_gap(x);
    CHECK(std::abs(direct - distance) <= 1e-8 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("smooth term satisfies the descent inequality") {
  std::mt19937 rng(61);
  QuadraticSmoothTerm h(1.7, randn_vector(5, rng));
  for (int trial = 0; trial < 100; ++trial) {
    const VectorXd u = 2.0 * randn_vector(5, rng);
    const VectorXd v = 2.0 * randn_vector(5, rng);
    const double lhs = h.value(u) - h.value(v) - h.gradient(v).dot(u - v);
    CHECK(lhs <= 0.5 * h.beta() * (u - v).squaredNorm() + 1e-12);
  }
  LinearSmoothTerm lin(randn_vector(5, rng));
  const VectorXd u = randn_vector(5, rng);
  const VectorXd v = randn_vector(5, rng);
  CHECK(lin.value(u) - lin.value(v) - lin.gradient(v).dot(u - v) ==
        doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("mismatched shapes are rejected at construction") {
  auto a = std::make_shared<DenseMap>(MatrixXd::Zero(2, 3));
  CHECK_THROWS_AS(ConstrainedProblem(a, VectorXd::Zero(3),
                                     std::make_shared<ZeroFunction>(3)),
                  DimensionError);
  CHECK_THROWS_AS(ConstrainedProblem(a, VectorXd::Zero(2),
                                     std::make_shared<ZeroFunction>(2)),
                  DimensionError);
}
