#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "pdprox/oracle.hpp"
#include "support.hpp"

using namespace pdprox;
using testsupport::canonical_problem;
using testsupport::randn_matrix;
using testsupport::randn_vector;

namespace {

VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("least squares") {
  DenseMap two(MatrixXd::Constant(1, 1, 2.0));
  auto sol = oracle::solve_least_squares(two, vec({2.0}));
  CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sol.f_star <= 1e-28);

  MatrixXd tall(2, 1);
  tall << 1.0, 1.0;
  auto incon = oracle::solve_least_squares(DenseMap(tall), vec({0.0, 2.0}));
  CHECK(incon.x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(incon.f_star == doctest::Approx(1.0).epsilon(1e-14));

  // Orthonormal columns: x_ls = A'b.
  std::mt19937 rng(67);
  const MatrixXd q =
      Eigen::HouseholderQR<MatrixXd>(randn_matrix(9, 4, rng)).householderQ() *
      MatrixXd::Identity(9, 4);
  DenseMap ortho(q);
  const VectorXd b = randn_vector(9, rng);
  auto sol2 = oracle::solve_least_squares(ortho, b);
  CHECK((sol2.x - q.transpose() * b).norm() <= 1e-12);
}

TEST_CASE("least squares: CG path agrees with the dense path") {
  std::mt19937 rng(71);
  // n = 60 exceeds the dense cutoff, so CG runs; compare against a direct
  // normal-equations solve.
  const MatrixXd a = randn_matrix(80, 60, rng);
  const VectorXd b = randn_vector(80, rng);
  auto sol = oracle::solve_least_squares(DenseMap(a), b, 1e-12);
  CHECK(sol.iterations > 0);
  const VectorXd direct =
      (a.transpose() * a).ldlt().solve(a.transpose() * b);
  CHECK((sol.x - direct).norm() <= 1e-8 * (1.0 + direct.norm()));
}

TEST_CASE("KKT oracle on hand instances") {
  // min 0.5||x||^2 s.t. x1 + x2 = 2.
  DenseMap row(MatrixXd::Constant(1, 2, 1.0));
  auto sym = oracle::solve_qp_kkt(MatrixXd::Identity(2, 2), VectorXd::Zero(2),
                                  row, vec({2.0}));
  CHECK((sym.x - vec({1.0, 1.0})).norm() <= 1e-12);
  CHECK(sym.g_star == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sym.d_y == doctest::Approx(1.0).epsilon(1e-12));

  // Canonical 1-D: u* solves 1 + 4u = 0.
  DenseMap two(MatrixXd::Constant(1, 1, 2.0));
  auto canon = oracle::solve_qp_kkt(MatrixXd::Identity(1, 1), VectorXd::Zero(1),
                                    two, vec({2.0}));
  CHECK(canon.x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(canon.u[0] == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(canon.d_y == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(canon.g_star == doctest::Approx(0.5).epsilon(1e-12));

  // Inconsistent system: the reformulation A'Ax = A'b reads 2x = 2.
  MatrixXd tall(2, 1);
  tall << 1.0, 1.0;
  auto incon = oracle::solve_qp_kkt(MatrixXd::Identity(1, 1), VectorXd::Zero(1),
                                    DenseMap(tall), vec({0.0, 2.0}));
  CHECK(incon.x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(incon.g_star == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("KKT residuals on random instances") {
  std::mt19937 rng(73);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 2 + static_cast<Index>(rng() % 12);
    const Index m = 2 + static_cast<Index>(rng() % 20);
    const MatrixXd half = randn_matrix(n, n, rng);
    const MatrixXd q = half.transpose() * half + MatrixXd::Identity(n, n);
    const VectorXd c = randn_vector(n, rng);
    DenseMap a(randn_matrix(m, n, rng));
    const VectorXd b = randn_vector(m, rng);

    auto sol = oracle::solve_qp_kkt(q, c, a, b);
    const MatrixXd am = oracle::materialize(a);
    const MatrixXd gram = am.transpose() * am;
    const double scale = 1.0 + b.norm() + c.norm();
    CHECK((q * sol.x + c + gram * sol.u).norm() <= 1e-10 * scale);
    CHECK((gram * sol.x - am.transpose() * b).norm() <= 1e-10 * scale);
  }
}

TEST_CASE("penalized solves") {
  // g = 0: minimizer is the least-squares point.
  std::mt19937 rng(79);
  const MatrixXd a = randn_matrix(6, 4, rng);
  const VectorXd b = randn_vector(6, rng);
  ConstrainedProblem free_p(std::make_shared<DenseMap>(a), b,
                            std::make_shared<ZeroFunction>(4));
  const VectorXd xhat = oracle::solve_penalized(free_p, 3.0, 1e-12);
  auto ls = oracle::solve_least_squares(free_p.A(), b);
  CHECK((xhat - ls.x).norm() <= 1e-8);

  // Canonical problem: closed form 4 rho / (1 + 4 rho).
  auto p = canonical_problem();
  const double big = oracle::solve_penalized(p, 1e6, 1e-12)[0];
  CHECK(std::abs(big - 1.0) <= 1e-3);
  const double mid = oracle::solve_penalized(p, 0.2, 1e-13)[0];
  CHECK(mid == doctest::Approx(0.8 / 1.8).epsilon(1e-10));

  // F_2(xhat) <= F_2(s^2) against the frozen hand-trace value 0.23849.
  p.compute_fstar();
  const double f2_xhat = p.g().value(vec({mid})) + 0.2 * p.f_gap(vec({mid}));
  CHECK(f2_xhat <= 0.23849 + 1e-12);
  CHECK(f2_xhat == doctest::Approx(2.0 / 9.0).epsilon(1e-9));
}

TEST_CASE("penalized ladder agrees with the KKT oracle") {
  std::mt19937 rng(83);
  auto inst = testsupport::certified_quadratic(8, 5, rng, false);
  const VectorXd xhat = oracle::solve_penalized(inst.problem, 1e8, 1e-12);
  CHECK((xhat - inst.kkt.x).norm() <= 1e-4);
}

TEST_CASE("reference solution by penalty continuation") {
  // Quadratic g: the ladder must land on the KKT solution.
  DenseMap row(MatrixXd::Constant(1, 2, 1.0));
  ConstrainedProblem p(std::make_shared<DenseMap>(row.matrix()), vec({2.0}),
                       std::make_shared<QuadraticFunction>(1.0, VectorXd::Zero(2)));
  const VectorXd ref = oracle::reference_solution(p, 1e-11);
  CHECK((ref - vec({1.0, 1.0})).norm() <= 1e-4);

  // l1 over the same constraint line: optimal value 2, feasible limit.
  ConstrainedProblem q(std::make_shared<DenseMap>(row.matrix()), vec({2.0}),
                       std::make_shared<L1Norm>(2, 1.0));
  const VectorXd lref = oracle::reference_solution(q, 1e-11);
  CHECK(std::abs(lref.sum() - 2.0) <= 1e-4);           // feasibility
  CHECK(std::abs(lref.lpNorm<1>() - 2.0) <= 1e-4);     // optimal objective

  // Full-column-rank A: argmin f is a single point, so the ladder must find
  // the least-squares point regardless of g.
  std::mt19937 rng(101);
  auto inst = testsupport::random_problem(12, 6, testsupport::GFamily::l1, rng);
  inst.compute_fstar(1e-12);
  const VectorXd ladder = oracle::reference_solution(inst, 1e-11);
  CHECK((ladder - inst.least_squares_point()).norm() <= 1e-4);
}

TEST_CASE("certify_singleton builds a dual certificate for lasso") {
  std::mt19937 rng(103);
  MatrixXd am = testsupport::randn_matrix(15, 10, rng);
  for (int j = 0; j < 10; ++j) am(j, j) += 2.0;
  ConstrainedProblem p(std::make_shared<DenseMap>(am),
                       2.0 * randn_vector(15, rng),
                       std::make_shared<L1Norm>(10, 0.5));
  auto sol = oracle::certify_singleton(p);
  CHECK((sol.x - p.least_squares_point()).norm() == 0.0);
  CHECK(sol.g_star == doctest::Approx(0.5 * p.least_squares_point().lpNorm<1>()));
  // The multiplier satisfies A'A u = -v for the sign subgradient.
  const MatrixXd gram = am.transpose() * am;
  const VectorXd v = *p.g().subgradient(sol.x);
  CHECK((gram * sol.u + v).norm() <= 1e-9);
  CHECK(sol.d_y == doctest::Approx((am * sol.u).norm()));

  // Wide A: argmin f is a subspace coset, no singleton certificate.
  ConstrainedProblem wide(
      std::make_shared<DenseMap>(testsupport::randn_matrix(3, 6, rng)),
      randn_vector(3, rng), std::make_shared<L1Norm>(6, 1.0));
  CHECK_THROWS_AS(oracle::certify_singleton(wide), ConvergenceError);
}

TEST_CASE("three-point identity") {
  DenseMap two(MatrixXd::Constant(1, 1, 2.0));
  // u = v = 0: LHS = <-4, 1> = -4; RHS = 0 - 2 - 2 + 0 = -4.
  CHECK(oracle::check_three_point_identity(two, vec({2.0}), vec({0.0}),
                                           vec({0.0}), 1e-12));

  // u = v = xb: both sides vanish.
  auto ls = oracle::solve_least_squares(two, vec({2.0}));
  CHECK(oracle::check_three_point_identity(two, vec({2.0}), ls.x, ls.x, 1e-12));

  std::mt19937 rng(89);
  for (int trial = 0; trial < 100; ++trial) {
    DenseMap a(randn_matrix(15, 10, rng));
    const VectorXd b = randn_vector(15, rng);
    CHECK(oracle::check_three_point_identity(a, b, 3.0 * randn_vector(10, rng),
                                             3.0 * randn_vector(10, rng),
                                             1e-10));
  }
}

TEST_CASE("materialize and dense norm") {
  std::mt19937 rng(97);
  const MatrixXd a = randn_matrix(5, 7, rng);
  DenseMap map(a);
  CHECK((oracle::materialize(map) - a).norm() == 0.0);
  CHECK(oracle::operator_norm_dense(map) ==
        doctest::Approx(a.jacobiSvd().singularValues()(0)).epsilon(1e-12));
}
