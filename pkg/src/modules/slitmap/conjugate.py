"""Harmonic conjugates by Gauss–Legendre path integration.

For a field given with its gradient g = φ_x + i·φ_y, the conjugate
differential along dz is ±Im(conj(g)·dz):

    role REAL:      dψ = −φ_y dx + φ_x dy =  Im(conj(g)·dz)
    role IMAGINARY: du =  φ_y dx − φ_x dy = −Im(conj(g)·dz)

SpokeNetwork caches conjugate values on a clearance-checked lattice rooted at
an anchor, so that evaluating the conjugate at a point costs one short
straight segment from the nearest visible lattice node.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path
from scipy.spatial import cKDTree

from src.core.errors import PathTooCloseToBoundary
from src.modules.bm_kernels.fields import HarmonicField
from src.modules.geometry import service as geometry
from src.modules.geometry.schemas import Domain
from src.modules.slitmap.models import ConjugateRole

logger = logging.getLogger(__name__)

ORDER = 16
MAX_PANELS = 64
MAX_GRADING = 40
LATTICE = 32
CANDIDATES = 16
_SEGMENT_SAMPLES = np.linspace(0.0, 1.0, 18)[1:-1]


# ============================================================================
# QUADRATURE
# ============================================================================


def clearance(domain: Optional[Domain], poles: Sequence[complex], points) -> np.ndarray:
    """Distance to ∂D and to the poles; negative outside D."""
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    result = np.full(points.size, np.inf)
    if domain is not None:
        dist, _, _, _ = geometry.distance_to_boundary(domain, points)
        inside = geometry.contains(domain, points)
        result = np.where(inside, dist, -dist)
    for pole in poles:
        result = np.where(result < 0, result, np.minimum(result, np.abs(points - pole)))
    return result


def segment_rule(a: complex, b: complex, far: float, end: float) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre nodes and complex weights dz on the segment a → b.

    Panels are sized to half the clearance ``far`` along the segment and graded
    geometrically toward b when b itself is only ``end`` away from a singularity.
    """
    length = abs(b - a)
    if length == 0.0:
        return np.zeros(0, dtype=complex), np.zeros(0, dtype=complex)
    uniform = int(np.clip(np.ceil(length / max(0.5 * far, 1e-300)), 1, MAX_PANELS))
    edges = list(np.linspace(0.0, 1.0, uniform + 1))
    if end < length / uniform:
        step = 1.0 - edges[-2]
        grading = []
        while step * length > end and len(grading) < MAX_GRADING:
            step *= 0.5
            grading.append(1.0 - step)
        edges = edges[:-1] + grading + [1.0]
    edges = np.array(edges)
    x, w = np.polynomial.legendre.leggauss(ORDER)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    s = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    return a + s * (b - a), ws * (b - a)


def conjugate_increments(field: HarmonicField, role: ConjugateRole, points, dz) -> np.ndarray:
    """Conjugate differential at quadrature nodes."""
    gradient = field.gradient(points)
    increment = np.imag(np.conj(gradient) * dz)
    return -increment if role is ConjugateRole.IMAGINARY else increment


def integrate_segments(
    field: HarmonicField,
    role: ConjugateRole,
    starts: np.ndarray,
    ends: np.ndarray,
    far: np.ndarray,
    end: np.ndarray,
) -> np.ndarray:
    """Conjugate increments along many straight segments in one field evaluation."""
    points, weights, owner = [], [], []
    for k, (a, b, f, e) in enumerate(zip(starts, ends, far, end)):
        p, dz = segment_rule(complex(a), complex(b), float(f), float(e))
        points.append(p)
        weights.append(dz)
        owner.append(np.full(p.size, k))
    if not points:
        return np.zeros(0)
    points = np.concatenate(points)
    weights = np.concatenate(weights)
    owner = np.concatenate(owner)
    totals = np.zeros(len(starts))
    if points.size:
        np.add.at(totals, owner, conjugate_increments(field, role, points, weights))
    return totals


def integrate_path(
    field: HarmonicField,
    role: ConjugateRole,
    vertices: Sequence[complex],
    domain: Optional[Domain] = None,
) -> float:
    """Conjugate accumulated along a polyline."""
    vertices = np.asarray(vertices, dtype=complex)
    starts, ends = vertices[:-1], vertices[1:]
    samples = starts[:, None] + _SEGMENT_SAMPLES[None, :] * (ends - starts)[:, None]
    c = clearance(domain, field.poles, samples.ravel()).reshape(samples.shape)
    far = np.min(c, axis=1)
    end = clearance(domain, field.poles, ends)
    return float(np.sum(integrate_segments(field, role, starts, ends, far, end)))


# ============================================================================
# SPOKE NETWORK
# ============================================================================


def _shifted_pairs(grid: np.ndarray, di: int, dj: int) -> np.ndarray:
    """Index pairs (grid[i, j], grid[i + di, j + dj]) for all valid i, j."""
    rows, cols = grid.shape
    i0, i1 = max(0, -di), rows - max(0, di)
    j0, j1 = max(0, -dj), cols - max(0, dj)
    a = grid[i0:i1, j0:j1]
    b = grid[i0 + di : i1 + di, j0 + dj : j1 + dj]
    return np.column_stack([a.ravel(), b.ravel()])


class SpokeNetwork:
    """Conjugate values cached on a lattice tree rooted at ``anchor``.

    Nodes are lattice points and waypoints with clearance at least ``tau``;
    edges join lattice neighbours (and nearby waypoints) whose straight segment
    keeps that clearance. Values propagate along the shortest-path tree.
    """

    def __init__(
        self,
        field: HarmonicField,
        role: ConjugateRole,
        domain: Domain,
        anchor: complex,
        waypoints: Sequence[np.ndarray] = (),
        resolution: int = LATTICE,
    ):
        self.field = field
        self.role = role
        self.domain = domain
        self.anchor = complex(anchor)
        self.scale = geometry.diameter(domain)
        self.tau = 5e-3 * self.scale

        _, outline = geometry.sample_curve(domain.outer, 512)
        xs = np.linspace(outline.real.min(), outline.real.max(), resolution)
        ys = np.linspace(outline.imag.min(), outline.imag.max(), resolution)
        self.spacing = max(xs[1] - xs[0], ys[1] - ys[0])
        lattice = (xs[None, :] + 1j * ys[:, None]).ravel()
        extra = [np.asarray(w, dtype=complex) for w in waypoints]
        candidates = np.concatenate([[self.anchor], lattice] + extra)
        c = clearance(domain, field.poles, candidates)
        if c[0] < self.tau:
            raise PathTooCloseToBoundary(
                f"anchor {self.anchor} has clearance {c[0]:.3e} < {self.tau:.3e}"
            )
        keep = np.flatnonzero(c >= self.tau)
        index = -np.ones(candidates.size, dtype=int)
        index[keep] = np.arange(keep.size)
        self.nodes = candidates[keep]

        pairs = []
        grid = np.arange(lattice.size).reshape(resolution, resolution) + 1
        for di, dj in ((0, 1), (1, 0), (1, 1), (1, -1)):
            pairs.append(_shifted_pairs(grid, di, dj))
        offset = 1 + lattice.size
        for ring in extra:
            ids = offset + np.arange(ring.size)
            pairs.append(np.column_stack([ids, np.roll(ids, -1)]))
            offset += ring.size
        tree = cKDTree(np.column_stack([lattice.real, lattice.imag]))
        loose = np.concatenate([[0], np.arange(1 + lattice.size, candidates.size)])
        for node in loose:
            near = tree.query_ball_point([candidates[node].real, candidates[node].imag], 1.5 * self.spacing)
            pairs.append(np.column_stack([np.full(len(near), node), np.asarray(near, dtype=int) + 1]))
        pairs = np.concatenate(pairs).astype(int)
        pairs = pairs[(index[pairs[:, 0]] >= 0) & (index[pairs[:, 1]] >= 0)]
        a, b = index[pairs[:, 0]], index[pairs[:, 1]]

        starts, ends = self.nodes[a], self.nodes[b]
        samples = starts[:, None] + _SEGMENT_SAMPLES[None, :] * (ends - starts)[:, None]
        sample_clearance = clearance(domain, field.poles, samples.ravel()).reshape(samples.shape)
        edge_clearance = np.min(sample_clearance, axis=1)
        clear = edge_clearance >= self.tau
        a, b, edge_clearance = a[clear], b[clear], edge_clearance[clear]
        lengths = np.abs(self.nodes[a] - self.nodes[b])
        graph = coo_matrix((lengths, (a, b)), shape=(self.nodes.size, self.nodes.size)).tocsr()
        distance, predecessors = shortest_path(
            graph, method="D", directed=False, indices=0, return_predecessors=True
        )
        reachable = np.flatnonzero(np.isfinite(distance))
        order = reachable[np.argsort(distance[reachable])]

        edge_lookup = {}
        for ea, eb, ec in zip(a, b, edge_clearance):
            edge_lookup[(ea, eb)] = ec
            edge_lookup[(eb, ea)] = ec
        children = order[1:]
        parents = predecessors[children]
        far = np.array([edge_lookup[(p, ch)] for p, ch in zip(parents, children)])
        increments = integrate_segments(
            field, role, self.nodes[parents], self.nodes[children], far, far
        )
        self.values = np.full(self.nodes.size, np.nan)
        self.values[0] = 0.0
        step = dict(zip(children, increments))
        for child, parent in zip(children, parents):
            self.values[child] = self.values[parent] + step[child]

        live = np.isfinite(self.values)
        self.nodes, self.values = self.nodes[live], self.values[live]
        self._tree = cKDTree(np.column_stack([self.nodes.real, self.nodes.imag]))
        logger.info(
            "spoke network: %d nodes, %d clear edges, tau %.3e", self.nodes.size, a.size, self.tau
        )

    def conjugate(self, z) -> np.ndarray:
        """Conjugate at ``z`` relative to the anchor.

        Raises:
            PathTooCloseToBoundary: z outside D, or no visible network node
        """
        z = np.asarray(z, dtype=complex)
        shape = z.shape
        z = np.atleast_1d(z).ravel()
        cz = clearance(self.domain, self.field.poles, z)
        if np.any(cz <= 0.0):
            raise PathTooCloseToBoundary("evaluation point lies outside the domain or on a pole")
        k = min(CANDIDATES, self.nodes.size)
        _, idx = self._tree.query(np.column_stack([z.real, z.imag]), k=k)
        idx = np.asarray(idx).reshape(z.size, k)
        chosen = -np.ones(z.size, dtype=int)
        far = np.zeros(z.size)
        pending = np.arange(z.size)
        for column in range(k):
            if pending.size == 0:
                break
            candidate = idx[pending, column]
            starts, ends = self.nodes[candidate], z[pending]
            samples = starts[:, None] + _SEGMENT_SAMPLES[None, :] * (ends - starts)[:, None]
            c = clearance(self.domain, self.field.poles, samples.ravel()).reshape(samples.shape)
            required = 0.5 * np.minimum(self.tau, cz[pending])
            ok = np.all(c >= required[:, None], axis=1)
            chosen[pending[ok]] = candidate[ok]
            far[pending[ok]] = np.min(c[ok], axis=1)
            pending = pending[~ok]
        if pending.size:
            raise PathTooCloseToBoundary(
                f"no clear straight path from the network to {z[pending[0]]}",
                {"points": int(pending.size)},
            )
        increments = integrate_segments(
            self.field, self.role, self.nodes[chosen], z, far, cz
        )
        return (self.values[chosen] + increments).reshape(shape)
