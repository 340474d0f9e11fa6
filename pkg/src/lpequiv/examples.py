"""Built-in demonstration problems.

Two small underdetermined systems with known sparsest solutions, used
throughout the tests and runnable from the CLI via --example. Each carries
the hand-derived affine chart of its solution set so objective curves are
plotted in the same coordinates every time.
"""
from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .linalg import AffineParametrization, SensingProblem

_A1 = [
    [1.0, 1.5, 0.7, 0.0],
    [0.0, 2.0, 0.5, 1.0],
    [1.0, 0.5, 1.0, 1.0],
]
_B1 = [1.65, 1.4, 0.95]
# one-dimensional solution chart: x = origin + t * direction
_ORIGIN1 = [0.6, 0.7, 0.0, 0.0]
_DIR1 = [18.0 / 11.0, 2.0 / 11.0, -30.0 / 11.0, 1.0]

_A2 = [
    [1.0, 0.0, 3.5, 3.0, 2.7],
    [0.0, 2.0, 0.0, 1.5, 4.5],
    [2.0, 2.0, 4.0, 0.5, 1.5],
]
_B2 = [1.0, 1.0, 3.0]
# two-dimensional solution chart: x = origin + s * dir_a + t * dir_b
_ORIGIN2 = [1.0, 0.5, 0.0, 0.0, 0.0]
_DIR2A = [31.0 / 6.0, -3.0 / 4.0, -7.0 / 3.0, 1.0, 0.0]
_DIR2B = [7.1, -2.25, -2.8, 0.0, 1.0]


def builtin_problem(which: int) -> SensingProblem:
    """Return built-in example 1 (3x4, kernel dim 1) or 2 (3x5, kernel dim 2)."""
    if which == 1:
        return SensingProblem(
            A=np.array(_A1),
            b=np.array(_B1),
            name="example-1",
            parametrization=AffineParametrization(
                origin=np.array(_ORIGIN1),
                basis=np.array(_DIR1)[:, None],
            ),
        )
    if which == 2:
        return SensingProblem(
            A=np.array(_A2),
            b=np.array(_B2),
            name="example-2",
            parametrization=AffineParametrization(
                origin=np.array(_ORIGIN2),
                basis=np.column_stack([_DIR2A, _DIR2B]),
            ),
        )
    raise ParameterError(f"no built-in example {which}; choose 1 or 2")
