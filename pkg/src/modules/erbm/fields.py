"""ER-harmonic fields: a harmonic part plus hole constants times the ω basis."""

from typing import Optional, Sequence, Tuple

import numpy as np

from src.modules.bm_kernels.fields import HarmonicField, LinearCombination, LogSource


class ERHarmonicSolution(LinearCombination):
    """u = u₀ + Σ c_i ω_i with zero flux around every hole.

    ``harmonic`` carries the prescribed ∂A₀ data and vanishes on the holes, so
    u equals c_i on ∂A_i.
    """

    def __init__(
        self,
        harmonic: HarmonicField,
        basis: Sequence[HarmonicField],
        constants: Sequence[float],
        condition: float,
    ):
        self.harmonic = harmonic
        self.basis = tuple(basis)
        self.constants = tuple(float(c) for c in constants)
        self.condition = float(condition)
        super().__init__([(1.0, harmonic)] + list(zip(self.constants, self.basis)))

    def component_value(self, i: int) -> float:
        """Constant value c_i on hole i (1-based)."""
        return self.constants[i - 1]


class ERGreenField(LinearCombination):
    """ER Green's function with a source at an interior point or on a hole.

    Interior source z: −(1/π)·log|·−z| + corrector + Σ c_i ω_i.
    Hole source i:      Σ c_j ω_j with flux −2 around A_i.
    ``regular`` is everything except the logarithm.
    """

    def __init__(
        self,
        regular_terms: Sequence[Tuple[float, HarmonicField]],
        constants: Sequence[float],
        condition: float,
        pole: Optional[complex] = None,
        hole: Optional[int] = None,
    ):
        self.pole = pole
        self.hole = hole
        self.constants = tuple(float(c) for c in constants)
        self.condition = float(condition)
        self.regular = LinearCombination(regular_terms)
        terms = list(regular_terms)
        if pole is not None:
            terms.insert(0, (1.0, LogSource(pole, -1.0 / np.pi, self.regular.domain)))
        super().__init__(terms)

    def component_value(self, i: int) -> float:
        return self.constants[i - 1]
