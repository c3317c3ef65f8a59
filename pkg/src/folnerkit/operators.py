"""Lazy banded operators on l2(N0) and l2(Z).

An operator is an immutable expression tree.  Nothing is ever stored as an
infinite array: every node knows how to list the structurally nonzero entries
of a finite set of its columns (``columns``) or rows (``rows``), and composite
nodes build those lists from their children.  Entry evaluation, compressions
and commutator blocks (see :mod:`folnerkit.windows`) are all driven by these
two primitives, so products that involve Cuntz isometries are evaluated on
exact finite supports instead of through a band bound.

Indices are lattice indices: ``0, 1, 2, ...`` on the half line and any integer
on the full line.  The interleaving ``fold``/``unfold`` bijection between Z and
N0 is used for direct sums and for deterministic enumeration of full-line sites.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence, Union

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, EstimationError, StructureError, UnsupportedStructureError

Triplets = tuple[np.ndarray, np.ndarray, np.ndarray]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class Lattice(enum.Enum):
    HALF = "half"  # N0
    FULL = "full"  # Z

    def check(self, idx) -> np.ndarray:
        arr = np.asarray(idx, dtype=np.int64)
        if self is Lattice.HALF and arr.size and arr.min() < 0:
            raise DomainError(f"negative index {int(arr.min())} on the half-line lattice")
        return arr

    def first(self, count: int) -> np.ndarray:
        """The first ``count`` sites in folded order."""
        a = np.arange(count, dtype=np.int64)
        return a if self is Lattice.HALF else unfold(a)


def fold(m):
    """Interleaving bijection Z -> N0: m >= 0 -> 2m, m < 0 -> -2m - 1."""
    m = np.asarray(m, dtype=np.int64)
    out = np.where(m >= 0, 2 * m, -2 * m - 1)
    return int(out) if out.ndim == 0 else out


def unfold(a):
    """Inverse of :func:`fold`."""
    a = np.asarray(a, dtype=np.int64)
    out = np.where(a % 2 == 0, a // 2, -(a + 1) // 2)
    return int(out) if out.ndim == 0 else out


def _empty() -> Triplets:
    return (np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, complex))


def coalesce(rows: np.ndarray, cols: np.ndarray, vals: np.ndarray, drop_zeros: bool = True) -> Triplets:
    """Sum duplicate (row, col) pairs; optionally drop exact zeros."""
    if rows.size == 0:
        return _empty()
    order = np.lexsort((cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    start = np.ones(rows.size, dtype=bool)
    start[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
    idx = np.flatnonzero(start)
    summed = np.add.reduceat(vals, idx)
    r, c = rows[idx], cols[idx]
    if drop_zeros:
        keep = summed != 0
        r, c, summed = r[keep], c[keep], summed[keep]
    return r, c, summed


def _compose(outer: Triplets, inner: Triplets) -> Triplets:
    """Entries of X @ Y given entries of X on the columns Y reaches.

    ``outer`` = (i, l, x) must list every nonzero of X in the columns ``l``
    appearing in ``inner`` = (l, j, y).
    """
    i, l_out, x = outer
    l_in, j, y = inner
    if l_in.size == 0 or i.size == 0:
        return _empty()
    mids, l_in_pos = np.unique(l_in, return_inverse=True)
    l_out_pos = np.searchsorted(mids, l_out)
    ok = (l_out_pos < mids.size) & (mids[np.minimum(l_out_pos, mids.size - 1)] == l_out)
    i, l_out_pos, x = i[ok], l_out_pos[ok], x[ok]
    ri, i_pos = np.unique(i, return_inverse=True)
    cj, j_pos = np.unique(j, return_inverse=True)
    X = sp.csr_matrix((x, (i_pos, l_out_pos)), shape=(ri.size, mids.size))
    Y = sp.csr_matrix((y, (l_in_pos, j_pos)), shape=(mids.size, cj.size))
    Z = (X @ Y).tocoo()
    return ri[Z.row].astype(np.int64), cj[Z.col].astype(np.int64), Z.data.astype(complex)


# --------------------------------------------------------------------------
# diagonal rules


@dataclass(frozen=True)
class DiagonalRule:
    """Named generator for a diagonal sequence.

    ``periodic``: values repeat with the lattice index.  ``dense_in``: a Kronecker
    (golden-ratio) low-discrepancy sequence in ``[a, b]``, shifted by the seed and
    enumerated in folded order so it is defined on both lattices.
    """

    kind: str
    values: tuple[complex, ...] = ()
    interval: tuple[float, float] = (0.0, 1.0)
    seed: int = 0

    def __post_init__(self):
        if self.kind == "periodic":
            if not self.values:
                raise DomainError("periodic rule needs at least one value")
        elif self.kind == "dense_in":
            a, b = self.interval
            if not (math.isfinite(a) and math.isfinite(b)) or a > b:
                raise DomainError(f"dense_in interval [{a}, {b}] is not a finite interval")
        else:
            raise DomainError(f"unknown diagonal rule {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> DiagonalRule:
        """Parse ``periodic:[v0,v1,...]`` / ``periodic:v0,v1`` / ``dense_in:[a,b]:seed``."""
        kind, _, rest = text.partition(":")
        kind = kind.strip()
        if kind == "periodic":
            body = rest.strip().strip("[]")
            try:
                vals = tuple(complex(v.strip().replace(" ", "")) for v in body.split(",") if v.strip())
            except ValueError as exc:
                raise DomainError(f"bad periodic values in {text!r}") from exc
            return cls("periodic", values=vals)
        if kind == "dense_in":
            ivl, _, seed = rest.partition("]")
            parts = ivl.strip().lstrip("[").split(",")
            try:
                a, b = (float(p) for p in parts)
                s = int(seed.strip().lstrip(":") or 0)
            except ValueError as exc:
                raise DomainError(f"bad dense_in rule {text!r}") from exc
            return cls("dense_in", interval=(a, b), seed=s)
        raise DomainError(f"unknown diagonal rule {text!r}")

    def __str__(self) -> str:
        if self.kind == "periodic":
            return "periodic:[" + ",".join(_fmt_number(v) for v in self.values) + "]"
        a, b = self.interval
        return f"dense_in:[{a!r},{b!r}]:{self.seed}"

    @property
    def is_real(self) -> bool:
        return self.kind == "dense_in" or all(v.imag == 0 for v in self.values)

    def sup(self) -> float:
        if self.kind == "periodic":
            return max(abs(v) for v in self.values)
        return max(abs(self.interval[0]), abs(self.interval[1]))

    def __call__(self, idx: np.ndarray, lattice: Lattice) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        if self.kind == "periodic":
            vals = np.asarray(self.values, dtype=complex)
            return vals[idx % vals.size]
        seq = idx if lattice is Lattice.HALF else fold(idx)
        a, b = self.interval
        shift = (self.seed * math.sqrt(2.0)) % 1.0
        t = np.mod(shift + (np.asarray(seq, dtype=float) + 1.0) * GOLDEN, 1.0)
        return (a + (b - a) * t).astype(complex)


def _fmt_number(v: complex):
    v = complex(v)
    if v.imag == 0:
        return repr(v.real)
    return f"{v.real!r}{v.imag:+}j"


# --------------------------------------------------------------------------
# expression nodes


class OperatorSpec:
    """Base class of the expression tree.

    Subclasses implement ``columns``/``rows`` (vectorized nonzero listing),
    ``_bandwidth``, ``norm_bound`` and ``_adjoint_key``.
    """

    lattice: Lattice

    # -- primitives ------------------------------------------------------
    def columns(self, js) -> Triplets:
        """All structurally nonzero entries ``(i, j, value)`` with ``j`` in ``js``."""
        raise NotImplementedError

    def rows(self, is_) -> Triplets:
        """All structurally nonzero entries ``(i, j, value)`` with ``i`` in ``is_``."""
        raise NotImplementedError

    def _bandwidth(self) -> int:
        raise NotImplementedError

    def norm_bound(self) -> float:
        """Upper bound on the operator norm from row/column absolute sums."""
        raise NotImplementedError

    def _adjoint_key(self, conj: bool):
        raise NotImplementedError

    def children(self) -> tuple[OperatorSpec, ...]:
        return ()

    # -- conveniences ----------------------------------------------------
    def walk(self) -> Iterator[OperatorSpec]:
        yield self
        for c in self.children():
            yield from c.walk()

    @property
    def has_cuntz(self) -> bool:
        return any(isinstance(n, CuntzIsometry) for n in self.walk())

    @property
    def H(self) -> OperatorSpec:
        return Adjoint(self)

    def __add__(self, other: OperatorSpec) -> OperatorSpec:
        return Sum((self, other))

    def __matmul__(self, other: OperatorSpec) -> OperatorSpec:
        return Product(self, other)

    def __rmul__(self, alpha) -> OperatorSpec:
        return Scale(complex(alpha), self)

    def __repr__(self) -> str:
        from .dsl import to_json

        return f"<{type(self).__name__} {to_json(self)}>"


def _check_same_lattice(children: Sequence[OperatorSpec], what: str) -> Lattice:
    lats = {c.lattice for c in children}
    if len(lats) != 1:
        raise StructureError(f"{what} mixes half-line and full-line operands")
    return lats.pop()


@dataclass(frozen=True, repr=False)
class Shift(OperatorSpec):
    """S e_i = e_{i+1}; unilateral on N0, bilateral on Z."""

    lattice: Lattice = Lattice.HALF

    def columns(self, js):
        js = self.lattice.check(js)
        return js + 1, js, np.ones(js.size, complex)

    def rows(self, is_):
        is_ = self.lattice.check(is_)
        if self.lattice is Lattice.HALF:
            is_ = is_[is_ >= 1]
        return is_, is_ - 1, np.ones(is_.size, complex)

    def _bandwidth(self):
        return 1

    def norm_bound(self):
        return 1.0

    def _adjoint_key(self, conj):
        return ("shift", self.lattice.value, conj)


@dataclass(frozen=True, repr=False)
class Toeplitz(OperatorSpec):
    """T_ij = c_{i-j}; ``coeffs[center]`` is c_0."""

    coeffs: tuple[complex, ...]
    center: int | None = None
    lattice: Lattice = Lattice.HALF

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise DomainError("Toeplitz symbol needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if self.center is None:
            if len(self.coeffs) % 2 == 0:
                raise DomainError("even-length coefficient list needs an explicit c0 index")
            object.__setattr__(self, "center", len(self.coeffs) // 2)
        if not 0 <= self.center < len(self.coeffs):
            raise DomainError(f"c0 index {self.center} outside coefficient list")

    @cached_property
    def offsets(self) -> dict[int, complex]:
        """Nonzero coefficients keyed by diagonal offset i - j."""
        return {k - self.center: c for k, c in enumerate(self.coeffs) if c != 0}

    def columns(self, js):
        js = self.lattice.check(js)
        parts = []
        for k, c in self.offsets.items():
            r = js + k
            keep = r >= 0 if self.lattice is Lattice.HALF else slice(None)
            parts.append((r[keep], js[keep], np.full(r[keep].size, c, complex)))
        return _concat(parts)

    def rows(self, is_):
        is_ = self.lattice.check(is_)
        parts = []
        for k, c in self.offsets.items():
            cc = is_ - k
            keep = cc >= 0 if self.lattice is Lattice.HALF else slice(None)
            parts.append((is_[keep], cc[keep], np.full(cc[keep].size, c, complex)))
        return _concat(parts)

    def _bandwidth(self):
        return max(self.center, len(self.coeffs) - 1 - self.center)

    def norm_bound(self):
        return float(sum(abs(c) for c in self.coeffs))

    def _adjoint_key(self, conj):
        items = self.offsets.items()
        if conj:
            items = ((-k, c.conjugate()) for k, c in items)
        return ("toeplitz", self.lattice.value, tuple(sorted(items, key=lambda kv: kv[0])))

    @property
    def hermitian_symbol(self) -> bool:
        off = self.offsets
        keys = set(off) | {-k for k in off}
        return all(off.get(k, 0) == complex(off.get(-k, 0)).conjugate() for k in keys)


@dataclass(frozen=True, repr=False)
class Diagonal(OperatorSpec):
    rule: DiagonalRule
    lattice: Lattice = Lattice.HALF

    def columns(self, js):
        js = self.lattice.check(js)
        return js, js, self.rule(js, self.lattice)

    def rows(self, is_):
        return self.columns(is_)

    def _bandwidth(self):
        return 0

    def norm_bound(self):
        return float(self.rule.sup())

    def _adjoint_key(self, conj):
        rule = self.rule
        if conj and not rule.is_real:
            rule = DiagonalRule("periodic", values=tuple(v.conjugate() for v in rule.values))
        return ("diagonal", self.lattice.value, str(rule))


@dataclass(frozen=True, repr=False)
class AlmostMathieu(OperatorSpec):
    """(Hx)_m = x_{m+1} + x_{m-1} + 2 lam cos(2 pi (theta + m omega)) x_m on Z."""

    lam: float
    omega: float
    theta: float = 0.0

    lattice = Lattice.FULL

    def potential(self, m: np.ndarray) -> np.ndarray:
        return 2.0 * self.lam * np.cos(2.0 * np.pi * (self.theta + np.asarray(m, float) * self.omega))

    def columns(self, js):
        js = Lattice.FULL.check(js)
        ones = np.ones(js.size, complex)
        return (
            np.concatenate([js - 1, js, js + 1]),
            np.concatenate([js, js, js]),
            np.concatenate([ones, self.potential(js).astype(complex), ones]),
        )

    def rows(self, is_):
        i, j, v = self.columns(is_)
        return j, i, v  # real symmetric

    def _bandwidth(self):
        return 1

    def norm_bound(self):
        return 2.0 + 2.0 * abs(self.lam)

    def _adjoint_key(self, conj):
        return ("almost_mathieu", self.lam, self.omega, self.theta)


@dataclass(frozen=True, repr=False)
class CuntzIsometry(OperatorSpec):
    """S_k e_m = e_{n m + k} on N0."""

    n: int
    k: int

    lattice = Lattice.HALF

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"Cuntz branching must be >= 2, got {self.n}")
        if not 0 <= self.k < self.n:
            raise DomainError(f"Cuntz branch {self.k} outside 0..{self.n - 1}")

    def columns(self, js):
        js = Lattice.HALF.check(js)
        return self.n * js + self.k, js, np.ones(js.size, complex)

    def rows(self, is_):
        is_ = Lattice.HALF.check(is_)
        is_ = is_[is_ % self.n == self.k]
        return is_, (is_ - self.k) // self.n, np.ones(is_.size, complex)

    def _bandwidth(self):
        raise UnsupportedStructureError(
            "Cuntz isometries have no finite band; evaluate them through "
            "compress/boundary_blocks on an explicit window"
        )

    def norm_bound(self):
        return 1.0

    def _adjoint_key(self, conj):
        return ("cuntz", self.n, self.k, conj)


@dataclass(frozen=True, repr=False)
class Adjoint(OperatorSpec):
    child: OperatorSpec

    @property
    def lattice(self):
        return self.child.lattice

    def children(self):
        return (self.child,)

    def columns(self, js):
        i, j, v = self.child.rows(js)
        return j, i, np.conj(v)

    def rows(self, is_):
        i, j, v = self.child.columns(is_)
        return j, i, np.conj(v)

    def _bandwidth(self):
        return bandwidth(self.child)

    def norm_bound(self):
        return self.child.norm_bound()

    def _adjoint_key(self, conj):
        return self.child._adjoint_key(not conj)


@dataclass(frozen=True, repr=False)
class Sum(OperatorSpec):
    terms: tuple[OperatorSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise StructureError("sum needs at least one term")
        _check_same_lattice(self.terms, "sum")

    @property
    def lattice(self):
        return self.terms[0].lattice

    def children(self):
        return self.terms

    def columns(self, js):
        return _concat([t.columns(js) for t in self.terms])

    def rows(self, is_):
        return _concat([t.rows(is_) for t in self.terms])

    def _bandwidth(self):
        return max(bandwidth(t) for t in self.terms)

    def norm_bound(self):
        return float(sum(t.norm_bound() for t in self.terms))

    def _adjoint_key(self, conj):
        return ("sum", tuple(sorted((t._adjoint_key(conj) for t in self.terms), key=repr)))


@dataclass(frozen=True, repr=False)
class Product(OperatorSpec):
    """left @ right."""

    left: OperatorSpec
    right: OperatorSpec

    def __post_init__(self):
        _check_same_lattice((self.left, self.right), "product")

    @property
    def lattice(self):
        return self.left.lattice

    def children(self):
        return (self.left, self.right)

    def columns(self, js):
        inner = self.right.columns(js)
        mids = np.unique(inner[0])
        return _compose(self.left.columns(mids), inner)

    def rows(self, is_):
        outer = self.left.rows(is_)
        mids = np.unique(outer[1])
        return _compose(outer, self.right.rows(mids))

    def _bandwidth(self):
        return bandwidth(self.left) + bandwidth(self.right)

    def norm_bound(self):
        return self.left.norm_bound() * self.right.norm_bound()

    def _adjoint_key(self, conj):
        if conj:
            return ("product", self.right._adjoint_key(True), self.left._adjoint_key(True))
        return ("product", self.left._adjoint_key(False), self.right._adjoint_key(False))


@dataclass(frozen=True, repr=False)
class Scale(OperatorSpec):
    alpha: complex
    child: OperatorSpec

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))

    @property
    def lattice(self):
        return self.child.lattice

    def children(self):
        return (self.child,)

    def columns(self, js):
        i, j, v = self.child.columns(js)
        return i, j, self.alpha * v

    def rows(self, is_):
        i, j, v = self.child.rows(is_)
        return i, j, self.alpha * v

    def _bandwidth(self):
        return bandwidth(self.child)

    def norm_bound(self):
        return abs(self.alpha) * self.child.norm_bound()

    def _adjoint_key(self, conj):
        a = self.alpha.conjugate() if conj else self.alpha
        return ("scale", a, self.child._adjoint_key(conj))


@dataclass(frozen=True, repr=False)
class DirectSum(OperatorSpec):
    """left ⊕ right on N0: left on even sites, right on odd sites.

    Full-line summands are first folded onto N0.
    """

    left: OperatorSpec
    right: OperatorSpec

    lattice = Lattice.HALF

    def children(self):
        return (self.left, self.right)

    @staticmethod
    def _to_child(a: np.ndarray, child: OperatorSpec) -> np.ndarray:
        return a if child.lattice is Lattice.HALF else unfold(a)

    @staticmethod
    def _from_child(m: np.ndarray, child: OperatorSpec) -> np.ndarray:
        return m if child.lattice is Lattice.HALF else fold(np.asarray(m, np.int64)).reshape(-1)

    def _side(self, idx, list_fn: str) -> Triplets:
        idx = Lattice.HALF.check(idx)
        parts = []
        for parity, child in ((0, self.left), (1, self.right)):
            sel = idx[idx % 2 == parity]
            if sel.size == 0:
                continue
            i, j, v = getattr(child, list_fn)(self._to_child(sel // 2, child))
            parts.append((
                2 * self._from_child(i, child) + parity,
                2 * self._from_child(j, child) + parity,
                v,
            ))
        return _concat(parts)

    def columns(self, js):
        return self._side(js, "columns")

    def rows(self, is_):
        return self._side(is_, "rows")

    def embed_left(self, m) -> np.ndarray:
        return 2 * np.asarray(self._from_child(np.asarray(m, np.int64), self.left)).reshape(-1)

    def embed_right(self, m) -> np.ndarray:
        return 2 * np.asarray(self._from_child(np.asarray(m, np.int64), self.right)).reshape(-1) + 1

    def _bandwidth(self):
        return 2 * max(folded_bandwidth(self.left), folded_bandwidth(self.right))

    def norm_bound(self):
        return max(self.left.norm_bound(), self.right.norm_bound())

    def _adjoint_key(self, conj):
        return ("direct_sum", self.left._adjoint_key(conj), self.right._adjoint_key(conj))


@dataclass(frozen=True, repr=False)
class FiniteRankPerturbation(OperatorSpec):
    """child + K where K is a dense r x r block on the first r sites (folded order)."""

    child: OperatorSpec
    block: np.ndarray = field(compare=False)

    def __post_init__(self):
        blk = np.array(self.block, dtype=complex)
        if blk.ndim != 2 or blk.shape[0] != blk.shape[1] or blk.shape[0] == 0:
            raise DomainError(f"finite-rank block must be a nonempty square matrix, got shape {blk.shape}")
        blk.setflags(write=False)
        object.__setattr__(self, "block", blk)

    def __eq__(self, other):
        return (
            isinstance(other, FiniteRankPerturbation)
            and self.child == other.child
            and np.array_equal(self.block, other.block)
        )

    def __hash__(self):
        return hash((self.child, self.block.tobytes()))

    @property
    def lattice(self):
        return self.child.lattice

    @property
    def support(self) -> np.ndarray:
        return self.lattice.first(self.block.shape[0])

    def children(self):
        return (self.child,)

    def _block_part(self, idx, by_column: bool) -> Triplets:
        idx = self.lattice.check(idx)
        sup = self.support
        pos = {int(s): p for p, s in enumerate(sup)}
        hit = [(int(x), pos[int(x)]) for x in np.unique(idx) if int(x) in pos]
        if not hit:
            return _empty()
        r = self.block.shape[0]
        rows, cols, vals = [], [], []
        for x, p in hit:
            if by_column:
                rows.append(sup)
                cols.append(np.full(r, x, np.int64))
                vals.append(self.block[:, p])
            else:
                rows.append(np.full(r, x, np.int64))
                cols.append(sup)
                vals.append(self.block[p, :])
        return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)

    def columns(self, js):
        return _concat([self.child.columns(js), self._block_part(js, True)])

    def rows(self, is_):
        return _concat([self.child.rows(is_), self._block_part(is_, False)])

    def _bandwidth(self):
        return max(bandwidth(self.child), self.block.shape[0] - 1)

    def norm_bound(self):
        a = np.abs(self.block)
        return self.child.norm_bound() + float(max(a.sum(0).max(), a.sum(1).max()))

    def _adjoint_key(self, conj):
        blk = self.block.conj().T if conj else self.block
        return ("finite_rank", self.child._adjoint_key(conj), tuple(map(tuple, blk.tolist())))


def _concat(parts: Sequence[Triplets]) -> Triplets:
    parts = [p for p in parts if p[0].size]
    if not parts:
        return _empty()
    return (
        np.concatenate([p[0] for p in parts]).astype(np.int64),
        np.concatenate([p[1] for p in parts]).astype(np.int64),
        np.concatenate([p[2] for p in parts]).astype(complex),
    )


Number = Union[int, float, complex]


# --------------------------------------------------------------------------
# operations


def entry(spec: OperatorSpec, i: int, j: int) -> complex:
    """Matrix coefficient <e_i, T e_j>."""
    spec.lattice.check([i, j])
    r, _, v = coalesce(*spec.columns(np.array([j], dtype=np.int64)), drop_zeros=False)
    hit = v[r == i]
    return complex(hit[0]) if hit.size else 0j


def entries(spec: OperatorSpec, i, j) -> np.ndarray:
    """Vectorized :func:`entry` over paired index arrays."""
    i = spec.lattice.check(i).reshape(-1)
    j = spec.lattice.check(j).reshape(-1)
    if i.size != j.size:
        raise DomainError("row and column index arrays differ in length")
    out = np.zeros(i.size, complex)
    if i.size == 0:
        return out
    r, c, v = coalesce(*spec.columns(np.unique(j)), drop_zeros=False)
    lookup = {(a, b): x for a, b, x in zip(r.tolist(), c.tolist(), v.tolist())}
    for n, key in enumerate(zip(i.tolist(), j.tolist())):
        out[n] = lookup.get(key, 0)
    return out


def bandwidth(spec: OperatorSpec) -> int:
    """Declared band upper bound w: entry(i, j) = 0 whenever |i - j| > w."""
    return spec._bandwidth()


def folded_bandwidth(spec: OperatorSpec) -> int:
    """Band bound after folding Z onto N0 (2w + 1 on the full line)."""
    w = bandwidth(spec)
    return w if spec.lattice is Lattice.HALF else 2 * w + 1


def norm_bound(spec: OperatorSpec) -> float:
    """Schur-test upper bound on ||spec||, propagated through the tree."""
    b = spec.norm_bound()
    if not math.isfinite(b):
        raise EstimationError(f"no finite norm bound for {type(spec).__name__}")
    return float(b)


def is_selfadjoint(spec: OperatorSpec) -> bool:
    """True when the tree equals its formal adjoint after pushing adjoints to the leaves."""
    return spec._adjoint_key(False) == spec._adjoint_key(True)


def power(spec: OperatorSpec, k: int) -> OperatorSpec:
    """Left-nested product spec^k (k >= 1)."""
    if k < 1:
        raise DomainError("power needs k >= 1")
    out = spec
    for _ in range(k - 1):
        out = Product(out, spec)
    return out


def identity(lattice: Lattice = Lattice.HALF) -> Diagonal:
    return Diagonal(DiagonalRule("periodic", values=(1.0,)), lattice)
