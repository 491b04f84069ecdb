"""Harmonic field evaluators.

A field answers value and gradient queries in the interior, plus interior
boundary limits on the components of its domain. Gradients are the complex
numbers u_x + i·u_y throughout. Fields combine linearly, so ER-harmonic
functions are written as ``u0 + c1 * omega1 + ...``.
"""

from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import InputError
from src.modules.bm_kernels.solver import LayerPotential
from src.modules.geometry import service as geometry
from src.modules.geometry.schemas import Domain


class HarmonicField:
    """Real harmonic function with value and gradient evaluators."""

    domain: Optional[Domain] = None
    poles: Tuple[complex, ...] = ()

    def evaluate(self, z) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def boundary(self, component: int, t) -> Tuple[np.ndarray, np.ndarray]:
        """Interior boundary limits (value, gradient) on a component of the domain."""
        if self.domain is None:
            raise InputError("field has no domain; boundary limits are undefined")
        z, _, _ = geometry.evaluate_curve(self.domain.component(component), np.atleast_1d(t))
        return self.evaluate(z)

    def value(self, z) -> np.ndarray:
        return self.evaluate(z)[0]

    def gradient(self, z) -> np.ndarray:
        return self.evaluate(z)[1]

    def __add__(self, other: "HarmonicField") -> "LinearCombination":
        return LinearCombination([(1.0, self), (1.0, other)])

    def __sub__(self, other: "HarmonicField") -> "LinearCombination":
        return LinearCombination([(1.0, self), (-1.0, other)])

    def __mul__(self, scalar: float) -> "LinearCombination":
        return LinearCombination([(float(scalar), self)])

    __rmul__ = __mul__

    def __neg__(self) -> "LinearCombination":
        return LinearCombination([(-1.0, self)])


class LinearCombination(HarmonicField):
    """Σ a_k·field_k; domain and poles are inherited from the terms."""

    def __init__(self, terms: Sequence[Tuple[float, HarmonicField]]):
        flat = []
        for coefficient, field in terms:
            if type(field) is LinearCombination:
                flat.extend((coefficient * c, f) for c, f in field.terms)
            else:
                flat.append((coefficient, field))
        self.terms = tuple(flat)
        self.domain = next((f.domain for _, f in self.terms if f.domain is not None), None)
        self.poles = tuple(p for _, f in self.terms for p in f.poles)

    def evaluate(self, z):
        value, gradient = 0.0, 0.0
        for coefficient, field in self.terms:
            v, g = field.evaluate(z)
            value = value + coefficient * v
            gradient = gradient + coefficient * g
        return value, gradient

    def boundary(self, component, t):
        value, gradient = 0.0, 0.0
        for coefficient, field in self.terms:
            v, g = field.boundary(component, t)
            value = value + coefficient * v
            gradient = gradient + coefficient * g
        return value, gradient


# ============================================================================
# EXPLICIT FIELDS
# ============================================================================


class AnalyticField(HarmonicField):
    """u = Re g for an analytic g with known derivative g′."""

    def __init__(
        self,
        g: Callable[[np.ndarray], np.ndarray],
        dg: Callable[[np.ndarray], np.ndarray],
        domain: Optional[Domain] = None,
    ):
        self._g = g
        self._dg = dg
        self.domain = domain

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        return np.real(self._g(z)), np.conj(self._dg(z))


class LogSource(HarmonicField):
    """strength·log|z − center|."""

    def __init__(self, center: complex, strength: float = 1.0, domain: Optional[Domain] = None):
        self.center = complex(center)
        self.strength = float(strength)
        self.domain = domain
        self.poles = (self.center,)

    def evaluate(self, z):
        rel = np.asarray(z, dtype=complex) - self.center
        return self.strength * np.log(np.abs(rel)), self.strength / np.conj(rel)


class BoundaryDipole(HarmonicField):
    """S_w(z) = (1/π)·Re[n_w / (z − w)] for a boundary point w with inward normal n_w.

    The explicit singular part of the Poisson kernel H_D(·, w): on a straight
    boundary it is the whole kernel, on a curved one the remainder is smooth.
    """

    def __init__(self, domain: Domain, component: int, t: float):
        self.domain = domain
        self.component = component
        self.t = float(t)
        z, d1, d2 = geometry.evaluate_curve(domain.component(component), np.array([self.t]))
        self.point = complex(z[0])
        self._tolerance = 1e-9 * abs(d1[0])
        sign = 1.0 if component == 0 else -1.0
        self.normal = sign * 1j * d1[0] / abs(d1[0])
        # value of S_w along ∂D as the boundary point approaches w
        self.limit = float(-np.real(self.normal * d2[0] / (2.0 * d1[0] ** 2)) / np.pi)
        self.poles = (self.point,)

    def evaluate(self, z):
        rel = np.asarray(z, dtype=complex) - self.point
        return np.real(self.normal / rel) / np.pi, np.conj(-self.normal / (np.pi * rel**2))

    def boundary(self, component, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        z, _, _ = geometry.evaluate_curve(self.domain.component(component), t)
        at_pole = np.abs(z - self.point) <= self._tolerance
        safe = np.where(at_pole, self.point + 1.0, z)
        value, gradient = self.evaluate(safe)
        value = np.where(at_pole, self.limit, value)
        gradient = np.where(at_pole, np.nan + 0j, gradient)
        return value, gradient


# ============================================================================
# SOLVED FIELDS
# ============================================================================


class HarmonicSolution(HarmonicField):
    """Solved Dirichlet problem: density on the boundary nodes plus evaluators."""

    def __init__(self, domain: Domain, potential: LayerPotential, data: np.ndarray, condition: float):
        self.domain = domain
        self.potential = potential
        self.data = np.asarray(data, dtype=float)
        self.condition = float(condition)

    @property
    def data_range(self) -> Tuple[float, float]:
        return float(self.data.min()), float(self.data.max())

    @property
    def density(self) -> np.ndarray:
        return self.potential.mu

    def evaluate(self, z):
        return self.potential.evaluate(z)

    def boundary(self, component, t):
        return self.potential.boundary(component, t)


class GreenField(LinearCombination):
    """G(w) = −(1/π)·log|w − z| + corrector(w), vanishing on ∂D."""

    def __init__(self, pole: complex, corrector: HarmonicSolution):
        self.pole = complex(pole)
        self.corrector = corrector
        source = LogSource(self.pole, -1.0 / np.pi, corrector.domain)
        super().__init__([(1.0, source), (1.0, corrector)])


class PoissonKernelField(LinearCombination):
    """H_D(·, w) = S_w − R_w where R_w solves the Dirichlet problem with data S_w."""

    def __init__(self, dipole: BoundaryDipole, regular: HarmonicSolution):
        self.dipole = dipole
        self.regular = regular
        self.component = dipole.component
        self.t = dipole.t
        super().__init__([(1.0, dipole), (-1.0, regular)])
