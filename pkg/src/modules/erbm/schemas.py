"""Pydantic schemas for the erbm module.

Matrices are stored as nested tuples so that the schemas stay immutable and
hashable; the ``array`` properties hand out numpy copies.
"""

from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

Matrix = Tuple[Tuple[float, ...], ...]


def as_matrix(values: np.ndarray) -> Matrix:
    return tuple(tuple(float(x) for x in row) for row in np.atleast_2d(values))


class PeriodMatrix(BaseModel):
    """P[j][i] = flux(ω_i, η_j) for the collars η_j at ``factor``."""

    model_config = ConfigDict(frozen=True)

    matrix: Matrix
    factor: float
    condition: float

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float).reshape(len(self.matrix), len(self.matrix))

    @property
    def asymmetry(self) -> float:
        """‖P − Pᵀ‖ / ‖P‖ (0 for the empty matrix)."""
        p = self.array
        if p.size == 0:
            return 0.0
        return float(np.linalg.norm(p - p.T) / np.linalg.norm(p))

    @property
    def eigenvalues(self) -> np.ndarray:
        p = self.array
        return np.linalg.eigvalsh(0.5 * (p + p.T)) if p.size else np.zeros(0)


class BoundaryChain(BaseModel):
    """Component-hit chain of ERBM.

    Rows are holes 1..n; column 0 is the absorbing outer curve and column k is
    hole k. ``q`` counts every collar excursion (including returns to the same
    hole); ``p_tilde`` only moves between distinct components.
    """

    model_config = ConfigDict(frozen=True)

    q: Matrix
    p_tilde: Matrix
    factor: float
    row_sum_deviation: float = 0.0

    @property
    def q_array(self) -> np.ndarray:
        return np.array(self.q, dtype=float)

    @property
    def p_array(self) -> np.ndarray:
        return np.array(self.p_tilde, dtype=float)

    @property
    def hole_block(self) -> np.ndarray:
        """Hole-to-hole block of p̃."""
        return self.p_array[:, 1:]


class ChainFundamentals(BaseModel):
    """Expected visits N = (I − B)⁻¹ of the hole-to-hole block B of p̃ and absorption into ∂A₀."""

    model_config = ConfigDict(frozen=True)

    expected_visits: Matrix
    absorption: Tuple[float, ...]
    spectral_radius: float
