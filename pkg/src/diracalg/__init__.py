"""Exact calculus of piecewise polynomials, Heaviside steps and Dirac distributions,
with Green's operators and Green's functions for linear boundary problems."""
from .bivariate import Axis, BivDist, Poly2
from .boundary import (
    BoundaryProblem,
    EvalMatrix,
    ForcedSolution,
    GreensFn,
    VerificationReport,
    apply_greens,
    check_regular,
    check_uniqueness,
    evaluation_matrix,
    extract_greens_fn,
    greens_operator,
    kernel_action,
    kernel_projector,
    right_inverse,
    verify_distributional,
)
from .distribution import Dist, reduce_product
from .errors import (
    DiracAlgError,
    ForbiddenProductError,
    IllPosedError,
    IntervalError,
    InvalidProblemError,
    ParseError,
    RewriteLimitError,
    SingularError,
    UnsupportedOperationError,
)
from .ground import Poly
from .operators import IdOp, StieltjesCond, act, act_axis, act_dist, act_pw
from .piecewise import Piecewise
from .scalars import co_heaviside, heaviside, join, meet, neg_part, pos_part, rational
from .syntax import parse_op, parse_problem, parse_value, value_from_json, value_to_json

__all__ = [
    "Axis", "BivDist", "BoundaryProblem", "DiracAlgError", "Dist", "EvalMatrix",
    "ForbiddenProductError", "ForcedSolution", "GreensFn", "IdOp", "IllPosedError",
    "IntervalError", "InvalidProblemError", "ParseError", "Piecewise", "Poly", "Poly2",
    "RewriteLimitError", "SingularError", "StieltjesCond", "UnsupportedOperationError",
    "VerificationReport", "act", "act_axis", "act_dist", "act_pw", "apply_greens",
    "check_regular", "check_uniqueness", "co_heaviside", "evaluation_matrix",
    "extract_greens_fn", "greens_operator", "heaviside", "join", "kernel_action",
    "kernel_projector", "meet", "neg_part", "parse_op", "parse_problem", "parse_value",
    "pos_part", "rational", "reduce_product", "right_inverse", "value_from_json",
    "value_to_json", "verify_distributional",
]
