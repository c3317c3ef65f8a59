"""Schatten-norm commutator diagnostics for coordinate projections.

For a window F with projection P the commutator [T, P] splits into the two
off-diagonal blocks of :class:`~folnerkit.windows.CommutatorBlocks`, so every
Schatten norm of [T, P] is read off those finite blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .dsl import spec_hash
from .errors import DomainError, PreconditionError
from .operators import DirectSum, OperatorSpec, is_selfadjoint, norm_bound
from .windows import WindowProjection, boundary_blocks

P_VALUES = (1, 2, "op")


def _norm_p(p):
    if p in (1, "1"):
        return 1
    if p in (2, "2"):
        return 2
    if p in ("op", "inf", math.inf):
        return "op"
    raise DomainError(f"p must be 1, 2 or 'op', got {p!r}")


def commutator_norm(spec: OperatorSpec, window: WindowProjection, p=2) -> float:
    """Schatten p-norm of T P - P T (p in {1, 2, 'op'})."""
    p = _norm_p(p)
    blocks = boundary_blocks(spec, window)
    if p == 2:
        return math.sqrt(blocks.hs_sq())
    sv = blocks.singular_values()
    if sv.size == 0:
        return 0.0
    return float(sv.sum()) if p == 1 else float(sv[0])


def folner_ratio(spec: OperatorSpec, window: WindowProjection, p=2) -> float:
    """||[T, P]||_p / ||P||_p for p in {1, 2}."""
    p = _norm_p(p)
    if p == "op":
        raise DomainError("the Følner ratio is defined for p = 1 or 2")
    return commutator_norm(spec, window, p) / window.schatten_norm(p)


def joint_folner_ratio(specs: Sequence[OperatorSpec], window: WindowProjection, p=2) -> float:
    if not specs:
        raise DomainError("need at least one operator")
    return max(folner_ratio(s, window, p) for s in specs)


def joint_folner_ratio_sq(specs: Sequence[OperatorSpec], window: WindowProjection) -> float:
    """max over the family of ||[T, P]||_2^2 / rank P, without a square root.

    Exact whenever the commutator entries are integers.
    """
    if not specs:
        raise DomainError("need at least one operator")
    return max(boundary_blocks(s, window).hs_sq() for s in specs) / len(window)


@dataclass(frozen=True)
class HalfBlockCheck:
    lhs: float
    rhs: float

    @property
    def deviation(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def ok(self) -> bool:
        return self.deviation <= 1e-10 * max(1.0, self.lhs)


def sa_halfblock_identity(spec: OperatorSpec, window: WindowProjection) -> HalfBlockCheck:
    """Compare ||[T,P]||_2^2 with 2 ||(I-P) T P||_2^2 for self-adjoint T."""
    if not is_selfadjoint(spec):
        raise PreconditionError("half-block identity needs a self-adjoint operator")
    blocks = boundary_blocks(spec, window)
    return HalfBlockCheck(blocks.hs_sq(), 2.0 * blocks.C.frobenius_sq())


@dataclass(frozen=True)
class PaddedRatio:
    """Følner ratio of T ⊕ X on P ⊕ Q, with the absorption bound.

    ``ratio_sq`` is computed from the blocks of the assembled direct sum;
    ``left_hs_sq`` and ``right_hs_sq`` from the summands on their own.
    """

    rank_p: int
    rank_q: int
    ratio_sq: float
    left_hs_sq: float
    right_hs_sq: float
    combined_hs_sq: float
    x_norm_bound: float

    @property
    def ratio(self) -> float:
        return math.sqrt(self.ratio_sq)

    @property
    def left_ratio_sq(self) -> float:
        return self.left_hs_sq / self.rank_p

    @property
    def bound_sq(self) -> float:
        return self.left_ratio_sq + 4.0 * self.x_norm_bound**2 * self.rank_q / (self.rank_p + self.rank_q)

    @property
    def bound(self) -> float:
        return math.sqrt(self.bound_sq)


def padded_ratio(left: OperatorSpec, right: OperatorSpec, d: int, exponent: float = 0.5) -> PaddedRatio:
    """Pad a rank d^2 window for ``left`` with a rank floor((d^2)^exponent) window for ``right``.

    With the default exponent the ranks are d^2 and d.  ``right``'s operator
    norm enters the bound through :func:`~folnerkit.operators.norm_bound`.
    """
    if d < 1:
        raise DomainError("d must be >= 1")
    rank_p = d * d
    rank_q = d if exponent == 0.5 else max(1, int(math.floor(rank_p**exponent)))
    x_norm = norm_bound(right)
    win_l = WindowProjection.standard(rank_p, left.lattice)
    win_r = WindowProjection.standard(rank_q, right.lattice)
    left_hs = boundary_blocks(left, win_l).hs_sq()
    right_hs = boundary_blocks(right, win_r).hs_sq()

    ds = DirectSum(left, right)
    host = WindowProjection(
        tuple(np.concatenate([ds.embed_left(win_l.array), ds.embed_right(win_r.array)]).tolist())
    )
    combined = boundary_blocks(ds, host).hs_sq()
    return PaddedRatio(rank_p, rank_q, combined / (rank_p + rank_q), left_hs, right_hs, combined, x_norm)


@dataclass(frozen=True)
class ProfileRow:
    window: WindowProjection
    ratio1: float
    ratio2: float
    opnorm_comm: float
    rank: int = 0  # rank of the largest commutator (for norm-ordering checks)

    @property
    def dim(self) -> int:
        return len(self.window)


@dataclass
class FolnerProfile:
    spec_id: str
    rows: list[ProfileRow] = field(default_factory=list)
    p_set: tuple = P_VALUES

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])


def _profile_row(specs: Sequence[OperatorSpec], window: WindowProjection, p_set) -> ProfileRow:
    r1 = r2 = op = math.nan
    rank = 0
    want_sv = 1 in p_set or "op" in p_set
    for s in specs:
        blocks = boundary_blocks(s, window)
        h = math.sqrt(blocks.hs_sq()) / window.schatten_norm(2)
        r2 = h if math.isnan(r2) else max(r2, h)
        if want_sv:
            sv = blocks.singular_values()
            tr = float(sv.sum()) / window.schatten_norm(1) if sv.size else 0.0
            mx = float(sv[0]) if sv.size else 0.0
            r1 = tr if math.isnan(r1) else max(r1, tr)
            op = mx if math.isnan(op) else max(op, mx)
            rank = max(rank, int(np.count_nonzero(sv)))
    if 2 not in p_set:
        r2 = math.nan
    if 1 not in p_set:
        r1 = math.nan
    if "op" not in p_set:
        op = math.nan
    return ProfileRow(window, r1, r2, op, rank)


def profile(specs: OperatorSpec | Sequence[OperatorSpec], dims: Iterable[int],
            p_set: Iterable = P_VALUES, workers: int = 1) -> FolnerProfile:
    """Følner ratios on standard windows of each size in ``dims``.

    For a family the columns hold the max over its members.  Rows may be
    computed concurrently; they are returned in ``dims`` order.
    """
    if isinstance(specs, OperatorSpec):
        specs = [specs]
    specs = list(specs)
    if not specs:
        raise DomainError("need at least one operator")
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims) or any(b <= a for a, b in zip(dims, dims[1:])):
        raise DomainError("dims must be nonempty, positive and strictly ascending")
    p_set = tuple(_norm_p(p) for p in p_set)
    lattice = specs[0].lattice
    if any(s.lattice is not lattice for s in specs):
        raise DomainError("profile members must share a lattice")
    windows = [WindowProjection.standard(d, lattice) for d in dims]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(lambda w: _profile_row(specs, w, p_set), windows))
    else:
        rows = [_profile_row(specs, w, p_set) for w in windows]
    return FolnerProfile(spec_hash(*specs), rows, p_set)
