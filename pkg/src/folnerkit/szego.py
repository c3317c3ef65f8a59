"""Eigenvalue counting measures of finite sections and their limits."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, PreconditionError
from .operators import OperatorSpec, Toeplitz, bandwidth, is_selfadjoint, norm_bound, power
from .windows import WindowProjection, check_cap, compress

DEFAULT_GRID = 1 << 16
DEFAULT_KMAX = 8


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Uniform probability measure on sorted atoms."""

    atoms: np.ndarray

    def __post_init__(self):
        a = np.sort(np.asarray(self.atoms, dtype=float))
        if a.size == 0:
            raise DomainError("a measure needs at least one atom")
        a.setflags(write=False)
        object.__setattr__(self, "atoms", a)

    @property
    def size(self) -> int:
        return self.atoms.size

    def cdf(self, x) -> np.ndarray:
        return np.searchsorted(self.atoms, x, side="right") / self.atoms.size


@dataclass(frozen=True)
class ReferenceMeasure(EmpiricalMeasure):
    kind: str = "symbol"  # "symbol" (pushforward of the symbol) | "oracle"
    params: dict = field(default_factory=dict, compare=False)


def counting_measure(spec: OperatorSpec, d: int) -> EmpiricalMeasure:
    """Eigenvalues of the compression to the standard window of size d."""
    if not is_selfadjoint(spec):
        raise PreconditionError("counting measures need a self-adjoint operator")
    check_cap(d)
    comp = compress(spec, WindowProjection.standard(d, spec.lattice))
    if not comp.is_hermitian():
        raise PreconditionError(f"compression is not Hermitian (asymmetry {comp.asymmetry:.3g})")
    return EmpiricalMeasure(np.linalg.eigvalsh(comp.entries))


def symbol_values(spec: Toeplitz, theta: np.ndarray) -> np.ndarray:
    """phi(theta) = sum_k c_k e^{i k theta}."""
    theta = np.asarray(theta, dtype=float)
    out = np.zeros(theta.shape, complex)
    for k, c in spec.offsets.items():
        out += c * np.exp(1j * k * theta)
    return out


def symbol_pushforward(spec: Toeplitz, grid: int = DEFAULT_GRID) -> ReferenceMeasure:
    if not isinstance(spec, Toeplitz):
        raise PreconditionError("symbol pushforward needs a Toeplitz operator")
    if not spec.hermitian_symbol:
        raise PreconditionError("symbol is not real-valued")
    if grid < 1:
        raise DomainError("grid size must be positive")
    vals = symbol_values(spec, 2.0 * np.pi * np.arange(grid) / grid).real
    return ReferenceMeasure(vals, kind="symbol", params={"grid": grid})


def oracle_reference(spec: OperatorSpec, d: int) -> ReferenceMeasure:
    """Counting measure at a large truncation, used when no closed form exists."""
    mu = counting_measure(spec, d)
    return ReferenceMeasure(mu.atoms, kind="oracle", params={"d": d})


def kolmogorov_distance(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> float:
    """sup_x |F_mu(x) - F_nu(x)|, attained on the merged atom set."""
    grid = np.union1d(mu.atoms, nu.atoms)
    return float(np.abs(mu.cdf(grid) - nu.cdf(grid)).max())


def moment(measure: EmpiricalMeasure, k: int) -> float:
    if k < 0:
        raise DomainError("moment order must be >= 0")
    return float(np.mean(measure.atoms**k)) if k else 1.0


def histogram(measure: EmpiricalMeasure, bins: int = 200):
    """(bin_left, bin_right, mass) rows over the atom range."""
    if bins < 1:
        raise DomainError("bins must be >= 1")
    lo, hi = float(measure.atoms[0]), float(measure.atoms[-1])
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    counts, edges = np.histogram(measure.atoms, bins=bins, range=(lo, hi))
    mass = counts / measure.size
    return [(float(a), float(b), float(m)) for a, b, m in zip(edges[:-1], edges[1:], mass)]


def trace_state(observable: OperatorSpec, window: WindowProjection):
    """Tr(A P) / Tr(P): the mean diagonal entry of A over the window."""
    if window.lattice is not observable.lattice:
        raise DomainError("window and observable live on different lattices")
    r, c, v = observable.columns(window.array)
    diag = r == c
    total = complex(v[diag].sum()) / len(window)
    return total.real if total.imag == 0 else total


@dataclass(frozen=True)
class MomentRow:
    k: int
    measured: float
    reference: float

    @property
    def error(self) -> float:
        return abs(self.measured - self.reference)


def moment_report(spec: OperatorSpec, d: int, k_max: int, ref: EmpiricalMeasure) -> list[MomentRow]:
    mu = counting_measure(spec, d)
    return [MomentRow(k, moment(mu, k), moment(ref, k)) for k in range(k_max + 1)]


def collar_bound(spec: OperatorSpec, k: int, d: int) -> float:
    """2 k w M^k / d: how far mean diag of T^k can sit from the k-th moment of mu^d."""
    return 2.0 * k * bandwidth(spec) * norm_bound(spec) ** k / d


@dataclass(frozen=True)
class SzegoRow:
    d: int
    ks_dist: float
    moment_errors: tuple[float, ...]  # k = 1..k_max
    trace_residuals: tuple[float, ...]  # |m_k(mu^d) - trace_state(T^k)|, k = 1..k_max
    trace_bounds: tuple[float, ...]
    in_symbol_range: Optional[bool] = None


@dataclass
class SzegoReport:
    spec_id: str
    reference_kind: str
    k_max: int
    rows: list[SzegoRow]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])


def szego_report(spec: OperatorSpec, dims: Sequence[int], ref: ReferenceMeasure,
                 k_max: int = DEFAULT_KMAX) -> SzegoReport:
    from .dsl import spec_hash

    dims = [int(d) for d in dims]
    if not dims or any(b <= a for a, b in zip(dims, dims[1:])):
        raise DomainError("dims must be nonempty and strictly ascending")
    if ref.kind == "oracle":
        od = int(ref.params.get("d", ref.size))
        if od < 4 * dims[-1]:
            raise PreconditionError(f"oracle dimension {od} must be >= 4x the largest probe {dims[-1]}")
    ref_moments = [moment(ref, k) for k in range(1, k_max + 1)]
    powers = [power(spec, k) for k in range(1, k_max + 1)]
    sym_range = None
    if ref.kind == "symbol":
        sym_range = (float(ref.atoms[0]), float(ref.atoms[-1]))
    rows = []
    for d in dims:
        mu = counting_measure(spec, d)
        win = WindowProjection.standard(d, spec.lattice)
        mk = [moment(mu, k) for k in range(1, k_max + 1)]
        resid = []
        for k, pk in enumerate(powers, start=1):
            ts = trace_state(pk, win)
            resid.append(abs(mk[k - 1] - complex(ts)))
        bounds = tuple(collar_bound(spec, k, d) for k in range(1, k_max + 1))
        inside = None
        if sym_range is not None:
            # the sampled grid may miss the exact extrema by O(1/G^2)
            slack = 1e-9 * max(1.0, abs(sym_range[0]), abs(sym_range[1]))
            lo, hi = _symbol_extent(spec) if isinstance(spec, Toeplitz) else sym_range
            inside = bool(mu.atoms[0] >= lo - slack and mu.atoms[-1] <= hi + slack)
        rows.append(SzegoRow(
            d,
            kolmogorov_distance(mu, ref),
            tuple(abs(a - b) for a, b in zip(mk, ref_moments)),
            tuple(resid),
            bounds,
            inside,
        ))
    return SzegoReport(spec_hash(spec), ref.kind, k_max, rows)


def _symbol_extent(spec: Toeplitz, samples: int = 1 << 14) -> tuple[float, float]:
    """min/max of the real symbol, refined by golden-section search around the grid extrema."""
    from scipy.optimize import minimize_scalar

    theta = 2.0 * np.pi * np.arange(samples) / samples
    vals = symbol_values(spec, theta).real
    h = 2.0 * np.pi / samples
    out = []
    for sign, idx in ((1.0, int(np.argmin(vals))), (-1.0, int(np.argmax(vals)))):
        t0 = theta[idx]
        res = minimize_scalar(lambda t: sign * symbol_values(spec, np.array([t])).real[0],
                              bounds=(t0 - h, t0 + h), method="bounded", options={"xatol": 1e-12})
        out.append(min(sign * res.fun, sign * vals[idx]) if sign > 0 else max(-res.fun, vals[idx]))
    return out[0], out[1]
