"""Numerical range polygons and the finite-operator probe."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg as sla
from shapely.geometry import MultiPoint, Point

from .errors import DomainError
from .operators import OperatorSpec
from .windows import WindowProjection, compress

EIG_TOL = 1e-10


@dataclass(frozen=True)
class NumericalRangePolygon:
    """Inscribed polygon of W(A) from support points at ``angles``.

    ``support`` holds lambda_max of Re(e^{-i theta} A) per angle; those lines
    bound W(A) from outside, the points ``points`` lie inside W(A).
    """

    angles: np.ndarray
    points: np.ndarray
    support: np.ndarray

    @property
    def hull(self):
        return MultiPoint([(z.real, z.imag) for z in self.points]).convex_hull

    @property
    def vertices(self) -> np.ndarray:
        h = self.hull
        if h.geom_type == "Polygon":
            xy = np.asarray(h.exterior.coords)[:-1]
        else:
            xy = np.asarray(h.coords)
        return xy[:, 0] + 1j * xy[:, 1]

    def distance(self, z: complex = 0.0) -> float:
        """Distance from ``z`` to the inscribed polygon (0 when inside)."""
        return float(self.hull.distance(Point(z.real, z.imag)))

    def contains(self, z: complex, tol: float = 1e-9) -> bool:
        """Whether ``z`` satisfies every support half-plane within ``tol``."""
        proj = (np.exp(-1j * self.angles) * z).real
        return bool(np.all(proj <= self.support + tol))

    @property
    def gap(self) -> float:
        """Max over angles of (outer support value - inner support value)."""
        inner = (np.exp(-1j * self.angles)[:, None] * self.points[None, :]).real.max(axis=1)
        return float(np.max(self.support - inner))


def numerical_range(matrix, m: int = 360) -> NumericalRangePolygon:
    """Support points of W(A) at m uniform angles (rotation method)."""
    if m < 3:
        raise DomainError("need at least 3 angles")
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DomainError(f"need a nonempty square matrix, got shape {a.shape}")
    angles = 2.0 * np.pi * np.arange(m) / m
    pts = np.empty(m, complex)
    sup = np.empty(m)
    n = a.shape[0]
    for j, t in enumerate(angles):
        rot = np.exp(-1j * t) * a
        h = 0.5 * (rot + rot.conj().T)
        w, v = sla.eigh(h, subset_by_index=[n - 1, n - 1])
        x = v[:, 0]
        pts[j] = np.vdot(x, a @ x)
        sup[j] = w[0]
    return NumericalRangePolygon(angles, pts, sup)


def random_banded(d: int, width: int, rng: np.random.Generator) -> np.ndarray:
    """d x d banded matrix, entries uniform in the closed unit disk."""
    mask = np.abs(np.subtract.outer(np.arange(d), np.arange(d))) <= width
    r = np.sqrt(rng.random((d, d)))
    phi = 2.0 * np.pi * rng.random((d, d))
    return np.where(mask, r * np.exp(1j * phi), 0.0)


@dataclass(frozen=True)
class FinitenessRow:
    d: int
    distances: tuple[float, ...]

    @property
    def max_distance(self) -> float:
        return max(self.distances)


def finiteness_probe(spec: OperatorSpec, dims: Sequence[int], samples: int = 20, seed: int = 0,
                     width: int = 2, angles: int = 360) -> list[FinitenessRow]:
    """dist(0, W([T_d, X_d])) for seeded random banded X_d.

    Every commutator of finite matrices has trace 0, so 0 always lies in the
    true numerical range; the reported distance only measures how well the
    inscribed polygon resolves that fact.
    """
    if samples < 1:
        raise DomainError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    rows = []
    for d in dims:
        t = compress(spec, WindowProjection.standard(int(d), spec.lattice)).entries
        dist = []
        for _ in range(samples):
            x = random_banded(int(d), width, rng)
            dist.append(numerical_range(t @ x - x @ t, angles).distance(0.0))
        rows.append(FinitenessRow(int(d), tuple(dist)))
    return rows
