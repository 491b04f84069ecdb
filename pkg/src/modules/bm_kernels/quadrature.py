"""Quadrature rules on boundary arcs and closed curves."""

from typing import Tuple

import numpy as np

from src.modules.bm_kernels.schemas import TWO_PI, BoundaryArc

GAUSS_ORDER = 16


def gauss_panels(t0: float, t1: float, panels: int, order: int = GAUSS_ORDER) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss–Legendre nodes and weights on [t0, t1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(t0, t1, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def arc_rule(arc: BoundaryArc, panels: int, order: int = GAUSS_ORDER) -> Tuple[np.ndarray, np.ndarray]:
    """Parameter nodes (wrapped to [0, 2π)) and weights for ∫ over an arc in t."""
    nodes, weights = gauss_panels(arc.t0, arc.t0 + arc.length, panels, order)
    return np.mod(nodes, TWO_PI), weights


def arcs_overlap(first: BoundaryArc, second: BoundaryArc) -> bool:
    """True when two arcs share a point (closed intervals modulo 2π)."""
    if first.component != second.component:
        return False
    if first.whole or second.whole:
        return True
    shift = (second.t0 - first.t0) % TWO_PI
    return shift <= first.length or shift + second.length >= TWO_PI


def arc_length(speed, t0: float, t1: float) -> float:
    """∫ |γ′| dt over [t0, t1] for a vectorized speed function."""
    nodes, weights = gauss_panels(t0, t1, 4, 32)
    return float(np.sum(speed(nodes) * weights))
