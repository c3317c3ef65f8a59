"""Named operators and finite-window checks of their defining relations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .operators import (
    Adjoint,
    AlmostMathieu,
    CuntzIsometry,
    Diagonal,
    DiagonalRule,
    DirectSum,
    Lattice,
    OperatorSpec,
    Product,
    Shift,
    Sum,
    Toeplitz,
    is_selfadjoint,
)
from .windows import WindowProjection, compress

GOLDEN_MEAN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ZooEntry:
    name: str
    spec: OperatorSpec
    selfadjoint: bool
    reference_measure_hint: Optional[str] = None  # "symbol-pushforward" | "oracle" | None


def _entry(name: str, spec: OperatorSpec, hint: Optional[str] = None) -> ZooEntry:
    return ZooEntry(name, spec, is_selfadjoint(spec), hint)


def make_shift(lattice: Lattice = Lattice.HALF) -> ZooEntry:
    name = "shift" if lattice is Lattice.HALF else "bilateral-shift"
    return _entry(name, Shift(lattice))


def make_toeplitz(coeffs: Sequence[complex], c0_index: int | None = None,
                  lattice: Lattice = Lattice.HALF) -> ZooEntry:
    if len(coeffs) == 0:
        raise DomainError("Toeplitz symbol needs at least one coefficient")
    spec = Toeplitz(tuple(coeffs), c0_index, lattice)
    hint = "symbol-pushforward" if spec.hermitian_symbol else None
    return ZooEntry("toeplitz", spec, spec.hermitian_symbol, hint)


def make_cuntz_family(n: int) -> list[ZooEntry]:
    if n < 2:
        raise DomainError(f"Cuntz family needs n >= 2, got {n}")
    return [ZooEntry(f"cuntz-{n}-{k}", CuntzIsometry(n, k), False) for k in range(n)]


def make_almost_mathieu(lam: float, omega: float = GOLDEN_MEAN, theta: float = 0.0) -> ZooEntry:
    for name, x in (("lambda", lam), ("omega", omega), ("theta", theta)):
        if not math.isfinite(x):
            raise DomainError(f"almost Mathieu {name} must be finite")
    return _entry("almost-mathieu", AlmostMathieu(float(lam), float(omega), float(theta)), "oracle")


def make_diagonal(rule: str | DiagonalRule, lattice: Lattice = Lattice.HALF) -> ZooEntry:
    if isinstance(rule, str):
        rule = DiagonalRule.parse(rule)
    return _entry("diagonal", Diagonal(rule, lattice))


def make_padded_direct_sum(left: OperatorSpec | ZooEntry, right: OperatorSpec | ZooEntry) -> ZooEntry:
    """left ⊕ right with left on even sites and right on odd sites."""
    left = left.spec if isinstance(left, ZooEntry) else left
    right = right.spec if isinstance(right, ZooEntry) else right
    return _entry("padded-direct-sum", DirectSum(left, right))


@dataclass(frozen=True)
class CuntzReport:
    n: int
    window: int
    range_sum_deviation: float
    orthogonality_deviation: float

    @property
    def max_deviation(self) -> float:
        return max(self.range_sum_deviation, self.orthogonality_deviation)


def verify_cuntz_relations(n: int, N: int) -> CuntzReport:
    """Check sum_k S_k S_k^* = 1 and S_l^* S_k = delta_lk 1 on {0..N-1}.

    Entries of the products are evaluated over their full intermediate
    support before the window is applied.
    """
    if N < 1:
        raise DomainError("window size must be >= 1")
    fam = [e.spec for e in make_cuntz_family(n)]
    win = WindowProjection.interval(0, N)
    eye = np.eye(N)
    ranges = Sum(tuple(Product(s, Adjoint(s)) for s in fam))
    dev_sum = float(np.abs(compress(ranges, win).entries - eye).max())
    dev_orth = 0.0
    for l, sl in enumerate(fam):
        for k, sk in enumerate(fam):
            m = compress(Product(Adjoint(sl), sk), win).entries
            dev_orth = max(dev_orth, float(np.abs(m - (eye if l == k else 0.0)).max()))
    return CuntzReport(n, N, dev_sum, dev_orth)


def resolve(name: str, c0_index: int | None = None) -> list[ZooEntry]:
    """Look up a ``zoo:...`` name.  Families expand to several entries.

    Recognized: ``zoo:shift``, ``zoo:shift:full``, ``zoo:toeplitz:c,...``,
    ``zoo:am:lambda:omega:theta``, ``zoo:cuntz:n:k``, ``zoo:cuntz-family:n``,
    ``zoo:diag:<rule>``.
    """
    if not name.startswith("zoo:"):
        raise DomainError(f"not a zoo name: {name!r}")
    kind, _, rest = name[4:].partition(":")
    try:
        if kind == "shift":
            return [make_shift(Lattice(rest) if rest else Lattice.HALF)]
        if kind == "toeplitz":
            coeffs = [complex(x.strip()) for x in rest.split(",") if x.strip()]
            return [make_toeplitz(coeffs, c0_index)]
        if kind == "am":
            parts = [float(x) for x in rest.split(":") if x]
            if not 1 <= len(parts) <= 3:
                raise ValueError("expected zoo:am:lambda[:omega[:theta]]")
            return [make_almost_mathieu(*parts)]
        if kind == "cuntz":
            n, k = (int(x) for x in rest.split(":"))
            return [ZooEntry(f"cuntz-{n}-{k}", CuntzIsometry(n, k), False)]
        if kind == "cuntz-family":
            return make_cuntz_family(int(rest))
        if kind == "diag":
            return [make_diagonal(rest)]
    except (ValueError, TypeError) as exc:
        raise DomainError(f"bad zoo name {name!r}: {exc}") from None
    raise DomainError(f"unknown zoo name {name!r}")
