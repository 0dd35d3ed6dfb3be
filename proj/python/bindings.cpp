#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pdprox/diagnostics.hpp"
#include "pdprox/graph.hpp"
#include "pdprox/manifest.hpp"
#include "pdprox/oracle.hpp"
#include "pdprox/solvers.hpp"

namespace py = pybind11;
using namespace pdprox;

namespace {

py::array_t<double> as_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<long> as_array(const std::vector<long>& v) {
  py::array_t<long> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Trace run_named(const std::string& variant, ConstrainedProblem& p,
                const StepSizes& ss, long max_iters, long record_every,
                bool snapshots, std::optional<VectorXd> x0, double tau0,
                unsigned seed, std::optional<double> norm_estimate) {
  RunOptions opt;
  opt.max_iters = max_iters;
  opt.record_every = record_every;
  opt.record_snapshots = snapshots;
  opt.x0 = std::move(x0);
  opt.tau0 = tau0;
  opt.seed = seed;
  opt.norm_estimate = norm_estimate;
  return run(variant_from_name(variant), p, ss, opt);
}

}  // namespace

PYBIND11_MODULE(_pdprox, m) {
  m.doc() = "primal-form PDHG solver for linearly constrained problems";

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<ConfigRejected>(m, "ConfigRejected", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError",
                                           PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_RuntimeError);

  // Linear maps.
  py::class_<LinearMap, std::shared_ptr<LinearMap>>(m, "LinearMap")
      .def_property_readonly("rows", &LinearMap::rows)
      .def_property_readonly("cols", &LinearMap::cols)
      .def("apply", &LinearMap::apply, py::arg("x"))
      .def("apply_adjoint", &LinearMap::apply_adjoint, py::arg("y"))
      .def_property_readonly("symmetric_psd", &LinearMap::symmetric_psd);

  py::class_<DenseMap, LinearMap, std::shared_ptr<DenseMap>>(m, "DenseMap")
      .def(py::init<MatrixXd>(), py::arg("matrix"))
      .def_property_readonly("matrix", &DenseMap::matrix);

  py::class_<CsrMap, LinearMap, std::shared_ptr<CsrMap>>(m, "CsrMap")
      .def(py::init([](Index rows, Index cols,
                       const std::vector<std::tuple<Index, Index, double>>& t) {
             std::vector<Eigen::Triplet<double>> entries;
             entries.reserve(t.size());
             for (const auto& [i, j, v] : t) entries.emplace_back(i, j, v);
             return CsrMap::from_triplets(rows, cols, entries);
           }),
           py::arg("rows"), py::arg("cols"), py::arg("triplets"));

  py::class_<LaplacianMap, LinearMap, std::shared_ptr<LaplacianMap>>(
      m, "LaplacianMap")
      .def_property_readonly("node_count", &LaplacianMap::node_count)
      .def_property_readonly("block_dim", &LaplacianMap::block_dim)
      .def("node_matrix", &LaplacianMap::node_matrix);

  m.def("build_gram", &build_gram, py::arg("map"));

  py::class_<NormEstimate>(m, "NormEstimate")
      .def_readonly("value", &NormEstimate::value)
      .def_readonly("iterations", &NormEstimate::iterations)
      .def_readonly("converged", &NormEstimate::converged);
  m.def("estimate_operator_norm", &estimate_operator_norm, py::arg("map"),
        py::arg("tol") = 1e-6, py::arg("max_iters") = 5000, py::arg("seed") = 42);

  // Prox catalogue.
  py::class_<ProxFunction, std::shared_ptr<ProxFunction>>(m, "ProxFunction")
      .def_property_readonly("dim", &ProxFunction::dim)
      .def("value", &ProxFunction::value, py::arg("x"))
      .def("prox", &ProxFunction::prox, py::arg("step"), py::arg("z"))
      .def_property_readonly("strong_convexity", &ProxFunction::strong_convexity);

  py::class_<ZeroFunction, ProxFunction, std::shared_ptr<ZeroFunction>>(
      m, "ZeroFunction")
      .def(py::init<Index>(), py::arg("dim"));
  py::class_<LinearFunction, ProxFunction, std::shared_ptr<LinearFunction>>(
      m, "LinearFunction")
      .def(py::init<VectorXd>(), py::arg("c"));
  py::class_<QuadraticFunction, ProxFunction, std::shared_ptr<QuadraticFunction>>(
      m, "QuadraticFunction")
      .def(py::init<double, VectorXd>(), py::arg("rho"), py::arg("center"));
  py::class_<L1Norm, ProxFunction, std::shared_ptr<L1Norm>>(m, "L1Norm")
      .def(py::init<Index, double>(), py::arg("dim"), py::arg("weight"));
  py::class_<BoxIndicator, ProxFunction, std::shared_ptr<BoxIndicator>>(
      m, "BoxIndicator")
      .def(py::init<VectorXd, VectorXd>(), py::arg("lo"), py::arg("hi"))
      .def_static("nonnegative", &BoxIndicator::nonnegative, py::arg("dim"));
  py::class_<PointIndicator, ProxFunction, std::shared_ptr<PointIndicator>>(
      m, "PointIndicator")
      .def(py::init<VectorXd>(), py::arg("point"));
  py::class_<SeparableSum, ProxFunction, std::shared_ptr<SeparableSum>>(
      m, "SeparableSum")
      .def(py::init<std::vector<ProxPtr>>(), py::arg("parts"));
  py::class_<StronglyConvexified, ProxFunction,
             std::shared_ptr<StronglyConvexified>>(m, "StronglyConvexified")
      .def(py::init<ProxPtr, double>(), py::arg("inner"), py::arg("rho"));

  m.def("check_prox_inequality", &check_prox_inequality, py::arg("g"),
        py::arg("step"), py::arg("z"), py::arg("probes"), py::arg("tol") = 1e-9);

  // Smooth terms and the problem.
  py::class_<SmoothTerm, std::shared_ptr<SmoothTerm>>(m, "SmoothTerm")
      .def("value", &SmoothTerm::value, py::arg("x"))
      .def("gradient", &SmoothTerm::gradient, py::arg("x"))
      .def_property_readonly("beta", &SmoothTerm::beta);
  py::class_<LinearSmoothTerm, SmoothTerm, std::shared_ptr<LinearSmoothTerm>>(
      m, "LinearSmoothTerm")
      .def(py::init<VectorXd>(), py::arg("c"));
  py::class_<QuadraticSmoothTerm, SmoothTerm,
             std::shared_ptr<QuadraticSmoothTerm>>(m, "QuadraticSmoothTerm")
      .def(py::init<double, VectorXd>(), py::arg("rho"), py::arg("center"));

  py::class_<ConstrainedProblem>(m, "Problem")
      .def(py::init<MapPtr, VectorXd, ProxPtr, SmoothPtr>(), py::arg("A"),
           py::arg("b"), py::arg("g"), py::arg("h") = nullptr)
      .def_property_readonly("dim", &ConstrainedProblem::dim)
      .def_property_readonly("codim", &ConstrainedProblem::codim)
      .def_property_readonly("gamma", &ConstrainedProblem::gamma)
      .def_property_readonly(
          "A", [](const ConstrainedProblem& p) { return p.A_ptr(); })
      .def_property_readonly("b",
                             [](const ConstrainedProblem& p) { return p.b(); })
      .def("f_value", &ConstrainedProblem::f_value, py::arg("x"))
      .def("f_grad", &ConstrainedProblem::f_grad, py::arg("x"))
      .def("f_gap", &ConstrainedProblem::f_gap, py::arg("x"))
      .def("compute_fstar", &ConstrainedProblem::compute_fstar,
           py::arg("tol") = 1e-10)
      .def_property_readonly("fstar_cached", &ConstrainedProblem::fstar_cached)
      .def_property_readonly("fstar", &ConstrainedProblem::fstar)
      .def_property_readonly("least_squares_point",
                             &ConstrainedProblem::least_squares_point)
      .def("g_value",
           [](const ConstrainedProblem& p, const VectorXd& x) {
             return p.g().value(x);
           },
           py::arg("x"));

  // Stepsizes and the driver.
  py::class_<StepSizes>(m, "StepSizes")
      .def_readonly("tau", &StepSizes::tau)
      .def_readonly("sigma", &StepSizes::sigma)
      .def_readonly("lambda_", &StepSizes::lambda)
      .def_static("from_lambda", &StepSizes::from_lambda, py::arg("lambda_"),
                  py::arg("safety") = 0.99)
      .def_static("from_tau_sigma", &StepSizes::from_tau_sigma, py::arg("tau"),
                  py::arg("sigma"), py::arg("safety") = 0.99);
  m.def(
      "default_step_sizes",
      [](const std::string& variant, const ConstrainedProblem& p, double norm,
         double safety) {
        return default_step_sizes(variant_from_name(variant), p, norm, safety);
      },
      py::arg("variant"), py::arg("problem"), py::arg("norm_estimate"),
      py::arg("safety") = 0.99);

  py::class_<Trace>(m, "Trace")
      .def_property_readonly("k", [](const Trace& t) { return as_array(t.k); })
      .def_property_readonly("f_x",
                             [](const Trace& t) { return as_array(t.f_x); })
      .def_property_readonly("f_s",
                             [](const Trace& t) { return as_array(t.f_s); })
      .def_property_readonly("g_s",
                             [](const Trace& t) { return as_array(t.g_s); })
      .def_property_readonly("F_k_s",
                             [](const Trace& t) { return as_array(t.F_k_s); })
      .def_property_readonly(
          "residual_s", [](const Trace& t) { return as_array(t.residual_s); })
      .def_property_readonly("dx_norm",
                             [](const Trace& t) { return as_array(t.dx_norm); })
      .def_property_readonly("fgap_s",
                             [](const Trace& t) { return as_array(t.fgap_s); })
      .def_property_readonly(
          "consensus_gap",
          [](const Trace& t) { return as_array(t.consensus_gap); })
      .def_property_readonly(
          "x_snapshots", [](const Trace& t) { return t.x_snapshots; })
      .def_property_readonly(
          "s_snapshots", [](const Trace& t) { return t.s_snapshots; })
      .def_readonly("tau", &Trace::tau)
      .def_readonly("sigma", &Trace::sigma)
      .def_readonly("lambda_", &Trace::lambda)
      .def_readonly("f_star", &Trace::f_star)
      .def("__len__", [](const Trace& t) { return t.size(); });

  m.def("run", &run_named, py::arg("variant"), py::arg("problem"),
        py::arg("step_sizes"), py::arg("max_iters") = 1000,
        py::arg("record_every") = 1, py::arg("snapshots") = false,
        py::arg("x0") = std::nullopt, py::arg("tau0") = 1.0,
        py::arg("seed") = 42, py::arg("norm_estimate") = std::nullopt);
  m.def("write_trace_csv", &write_trace_csv, py::arg("path"), py::arg("trace"));
  m.def("read_trace_csv", &read_trace_csv, py::arg("path"));

  // Oracle.
  py::class_<oracle::LeastSquaresSolution>(m, "LeastSquaresSolution")
      .def_readonly("x", &oracle::LeastSquaresSolution::x)
      .def_readonly("f_star", &oracle::LeastSquaresSolution::f_star)
      .def_readonly("iterations", &oracle::LeastSquaresSolution::iterations);
  m.def("solve_least_squares", &oracle::solve_least_squares, py::arg("A"),
        py::arg("b"), py::arg("tol") = 1e-12, py::arg("max_iters") = 100000);

  py::class_<oracle::KktSolution>(m, "KktSolution")
      .def_readonly("x", &oracle::KktSolution::x)
      .def_readonly("u", &oracle::KktSolution::u)
      .def_readonly("g_star", &oracle::KktSolution::g_star)
      .def_readonly("d_y", &oracle::KktSolution::d_y);
  m.def("solve_qp_kkt", &oracle::solve_qp_kkt, py::arg("Q"), py::arg("c"),
        py::arg("A"), py::arg("b"), py::arg("tol") = 1e-10);
  m.def("certify", &oracle::certify, py::arg("problem"), py::arg("tol") = 1e-10);
  m.def("solve_penalized", &oracle::solve_penalized, py::arg("problem"),
        py::arg("rho"), py::arg("tol"), py::arg("max_iters") = 10000000);
  m.def("check_three_point_identity", &oracle::check_three_point_identity,
        py::arg("A"), py::arg("b"), py::arg("u"), py::arg("v"),
        py::arg("tol") = 1e-10);

  // Diagnostics.
  py::class_<Certificates>(m, "Certificates")
      .def(py::init([](double d_x, double d_y, double g_star, double f_star) {
             return Certificates{d_x, d_y, g_star, f_star};
           }),
           py::arg("d_x"), py::arg("d_y"), py::arg("g_star"), py::arg("f_star"))
      .def_readonly("d_x", &Certificates::d_x)
      .def_readonly("d_y", &Certificates::d_y)
      .def_readonly("g_star", &Certificates::g_star)
      .def_readonly("f_star", &Certificates::f_star);
  m.def("make_certificates", &make_certificates, py::arg("kkt"),
        py::arg("problem"), py::arg("x0"));

  py::class_<BoundSet>(m, "BoundSet")
      .def_readonly("penalty_upper", &BoundSet::penalty_upper)
      .def_readonly("penalty_lower", &BoundSet::penalty_lower)
      .def_readonly("feas_upper", &BoundSet::feas_upper)
      .def_readonly("obj_lower", &BoundSet::obj_lower)
      .def_readonly("obj_upper", &BoundSet::obj_upper);
  m.def("theorem1_bounds", &theorem1_bounds, py::arg("cert"), py::arg("ss"),
        py::arg("k"));

  py::class_<AccelBoundSet>(m, "AccelBoundSet")
      .def_readonly("penalty_upper", &AccelBoundSet::penalty_upper)
      .def_readonly("penalty_lower", &AccelBoundSet::penalty_lower)
      .def_readonly("fgap_upper", &AccelBoundSet::fgap_upper)
      .def_readonly("dist_upper", &AccelBoundSet::dist_upper);
  m.def("theorem2_bounds", &theorem2_bounds, py::arg("cert"), py::arg("lambda_"),
        py::arg("sigma_sum_prev"), py::arg("tau_k"), py::arg("sigma_k"));

  m.def("penalty_value", &penalty_value, py::arg("problem"), py::arg("sigma"),
        py::arg("k"), py::arg("x"));
  m.def("epsilon_check", &epsilon_check, py::arg("problem"), py::arg("g_star"),
        py::arg("x"), py::arg("eps"));
  m.def("dual_lower_estimate", &dual_lower_estimate, py::arg("cert"),
        py::arg("f_gap"));
  m.def(
      "rate_fit",
      [](const Trace& t, const std::string& column, long k_min) {
        TraceColumn c;
        if (column == "f_x") c = TraceColumn::f_x;
        else if (column == "f_s") c = TraceColumn::f_s;
        else if (column == "g_s") c = TraceColumn::g_s;
        else if (column == "F_k_s") c = TraceColumn::F_k_s;
        else if (column == "residual_s") c = TraceColumn::residual_s;
        else if (column == "dx_norm") c = TraceColumn::dx_norm;
        else if (column == "fgap_s") c = TraceColumn::fgap_s;
        else throw DimensionError("unknown trace column: " + column);
        return rate_fit(t, c, k_min);
      },
      py::arg("trace"), py::arg("column"), py::arg("k_min") = -1);
  m.def("lyapunov_check", &lyapunov_check, py::arg("trace"), py::arg("problem"),
        py::arg("ss"), py::arg("xbar"), py::arg("slack") = 1e-8,
        py::arg("a_norm") = std::nullopt);
  m.def("accel_schedule_next",
        [](double tau_prev, double lambda) {
          const auto s = accel_schedule_next(tau_prev, lambda);
          return py::make_tuple(s.tau, s.sigma, s.theta);
        },
        py::arg("tau_prev"), py::arg("lambda_"));

  // Distributed consensus.
  py::class_<Graph>(m, "Graph")
      .def(py::init([](int nodes, int block_dim,
                       const std::vector<std::tuple<int, int, double>>& edges) {
             Graph g;
             g.node_count = nodes;
             g.block_dim = block_dim;
             for (const auto& [i, j, w] : edges) g.edges.push_back({i, j, w});
             g.validate();
             return g;
           }),
           py::arg("node_count"), py::arg("block_dim"), py::arg("edges"))
      .def_static("from_file", &Graph::from_file, py::arg("path"))
      .def_readonly("node_count", &Graph::node_count)
      .def_readonly("block_dim", &Graph::block_dim)
      .def("connected", &Graph::connected);
  m.def("laplacian", &laplacian, py::arg("graph"));

  py::class_<ConsensusProblem>(m, "ConsensusProblem")
      .def(py::init([](Graph graph, std::vector<ProxPtr> objectives) {
             ConsensusProblem cp;
             cp.graph = std::move(graph);
             cp.node_objectives = std::move(objectives);
             cp.validate();
             return cp;
           }),
           py::arg("graph"), py::arg("node_objectives"));

  py::class_<ConsensusResult>(m, "ConsensusResult")
      .def_readonly("trace", &ConsensusResult::trace)
      .def_readonly("comm_count", &ConsensusResult::comm_count)
      .def_readonly("iterations", &ConsensusResult::iterations)
      .def_readonly("x_final", &ConsensusResult::x_final)
      .def_readonly("s_final", &ConsensusResult::s_final);
  m.def("run_consensus", &run_consensus, py::arg("problem"), py::arg("lambda_"),
        py::arg("tau"), py::arg("max_iters"), py::arg("record_every") = 1,
        py::arg("stop_gap") = 0.0);
  m.def("run_consensus_pdhg_baseline", &run_consensus_pdhg_baseline,
        py::arg("problem"), py::arg("lambda_"), py::arg("tau"),
        py::arg("max_iters"), py::arg("record_every") = 1,
        py::arg("stop_gap") = 0.0);
  m.def("consensus_gap", &consensus_gap, py::arg("x"), py::arg("node_count"),
        py::arg("block_dim"));

  m.def("parse_problem_manifest", &parse_problem_manifest, py::arg("path"));
}
