"""Proximal stochastic variance-reduced solvers for composite finite sums.

Minimizes F(x) = (1/n) sum_i f_i(x) + h(x) with smooth (possibly nonconvex)
components f_i and a convex prox-friendly h, tracking incremental
first-order and proximal oracle calls throughout.
"""

from .core import RngStream, SparseVector, dot, norm2_sq, sample_with_replacement
from .libsvm import Dataset, LibsvmParseError, normalize_rows, parse_libsvm, serialize_libsvm
from .metrics import (Checkpoint, RunTrace, gradient_mapping, gradient_mapping_sq,
                      is_eps_accurate, pl_surplus)
from .plans import StepPlan, manual_plan, plan_pl, plan_saga, plan_svrg
from .problems import (CompositeProblem, NnPcaProblem, OracleCounters,
                       PlQuadraticProblem, grid_optimum_2d, make_pl_quadratic,
                       make_synthetic_nnpca)
from .prox import (BallNonnegProx, BoxProx, L1Prox, ProxOperator, SimplexProx,
                   ZeroProx, three_point_check)
from .solvers import (DivergenceError, SolverOutput, TraceRecorder, pl_saga,
                      pl_svrg, prox_gd, prox_saga, prox_sgd, prox_svrg)

__all__ = [
    "RngStream", "SparseVector", "dot", "norm2_sq", "sample_with_replacement",
    "Dataset", "LibsvmParseError", "normalize_rows", "parse_libsvm", "serialize_libsvm",
    "Checkpoint", "RunTrace", "gradient_mapping", "gradient_mapping_sq",
    "is_eps_accurate", "pl_surplus",
    "StepPlan", "manual_plan", "plan_pl", "plan_saga", "plan_svrg",
    "CompositeProblem", "NnPcaProblem", "OracleCounters", "PlQuadraticProblem",
    "grid_optimum_2d", "make_pl_quadratic", "make_synthetic_nnpca",
    "BallNonnegProx", "BoxProx", "L1Prox", "ProxOperator", "SimplexProx",
    "ZeroProx", "three_point_check",
    "DivergenceError", "SolverOutput", "TraceRecorder", "pl_saga", "pl_svrg",
    "prox_gd", "prox_saga", "prox_sgd", "prox_svrg",
]

__version__ = "0.1.0"
