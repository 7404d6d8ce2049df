"""Bernstein overiterates: univariate and tensor-product operators, their limits,
second-order moduli of smoothness, Zhuk smoothing, and an experiment harness
that checks the quantitative convergence bounds numerically.
"""

from ._validation import (
    CapacityError,
    ConvergenceError,
    DegenerateInputError,
    DomainError,
    ShapeError,
    UnknownFunctionError,
)
from .bernstein import (
    b1_eval,
    basis,
    basis_matrix,
    iterate_deviation,
    iterate_eval,
    matrix_power,
    node_values,
    transfer_matrix,
)
from .corpus import CORPUS_IDS, corpus, grid_field, multilinear_field
from .experiments import (
    ExperimentConfig,
    run_bound_tensor,
    run_bound_univariate,
    run_contraction,
    run_converge_to_L,
    run_experiment,
    run_optimality_dlinear,
    run_zhuk_lemma1,
)
from .fields import ScalarField, as_field, partial_field, seeded_uniform, splitmix64
from .moduli import ModulusEstimate, analytic_omega2, omega2, partial_omega2
from .report import BoundReport, RateReport
from .tensor import (
    BernsteinOveriterator,
    LimitOperator,
    contraction_constant,
    grid_deviation,
    iterate_grid,
    limit_L,
    min_vertex_mass,
    mode_apply,
    sample_nodes,
    tensor_apply,
    tensor_deviation,
    tensor_iterate_eval,
    vertex_table,
)
from .zhuk import (
    LinearFit,
    MinimaxLinearFit,
    ZhukExtension,
    ZhukSmoother,
    axis_smooth,
    best_linear_minimax,
    extend,
    lemma1_check,
    smooth_eval,
    smooth_second_derivative,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
