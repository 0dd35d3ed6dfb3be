"""Primal-form PDHG solver for linearly constrained convex problems.

The heavy lifting lives in the compiled extension ``_pdprox``; this package
re-exports it and adds a small convenience wrapper for picking stepsizes.
"""

from ._pdprox import (  # noqa: F401
    AccelBoundSet,
    BoundSet,
    BoxIndicator,
    Certificates,
    ConfigRejected,
    ConsensusProblem,
    ConsensusResult,
    ConvergenceError,
    CsrMap,
    DenseMap,
    DimensionError,
    Graph,
    KktSolution,
    L1Norm,
    LaplacianMap,
    LeastSquaresSolution,
    LinearFunction,
    LinearMap,
    LinearSmoothTerm,
    NormEstimate,
    ParseError,
    PointIndicator,
    Problem,
    ProxFunction,
    QuadraticFunction,
    QuadraticSmoothTerm,
    SeparableSum,
    SmoothTerm,
    StepSizes,
    StronglyConvexified,
    Trace,
    ZeroFunction,
    accel_schedule_next,
    build_gram,
    certify,
    check_prox_inequality,
    check_three_point_identity,
    consensus_gap,
    default_step_sizes,
    dual_lower_estimate,
    epsilon_check,
    estimate_operator_norm,
    laplacian,
    lyapunov_check,
    make_certificates,
    parse_problem_manifest,
    penalty_value,
    rate_fit,
    read_trace_csv,
    run,
    run_consensus,
    run_consensus_pdhg_baseline,
    solve_least_squares,
    solve_penalized,
    solve_qp_kkt,
    theorem1_bounds,
    theorem2_bounds,
    write_trace_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"


def solve(variant, problem, *, lambda_=None, tau=None, sigma=None, **kwargs):
    """Run a solver variant with stepsizes resolved the way the CLI does:
    explicit values win, otherwise the variant default from a norm estimate.
    """
    if tau is not None and sigma is not None:
        ss = StepSizes.from_tau_sigma(tau, sigma)
    elif lambda_ is not None:
        ss = StepSizes.from_lambda(lambda_)
    else:
        norm = estimate_operator_norm(problem.A).value
        ss = default_step_sizes(variant, problem, norm)
    return run(variant, problem, ss, **kwargs)
