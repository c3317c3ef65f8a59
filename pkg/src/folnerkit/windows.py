"""Coordinate projections, finite sections and commutator blocks."""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, ResourceError, StructureError
from .operators import Lattice, OperatorSpec, coalesce, fold

DEFAULT_SIZE_CAP = 16384
HERMITIAN_TOL = 1e-12


def size_cap() -> int:
    """Dense size cap; ``FOLNER_SIZE_CAP`` overrides the default."""
    raw = os.environ.get("FOLNER_SIZE_CAP")
    if raw is None:
        return DEFAULT_SIZE_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise DomainError(f"FOLNER_SIZE_CAP={raw!r} is not an integer") from exc
    if cap < 1:
        raise DomainError("FOLNER_SIZE_CAP must be positive")
    return cap


def check_cap(n: int, what: str = "window") -> None:
    cap = size_cap()
    if n > cap:
        raise ResourceError(f"{what} of size {n} exceeds the size cap {cap} (FOLNER_SIZE_CAP)")


@dataclass(frozen=True)
class WindowProjection:
    """Orthogonal projection onto span{e_i : i in indices}."""

    indices: tuple[int, ...]
    lattice: Lattice = Lattice.HALF

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if not idx:
            raise DomainError("window must be nonempty")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            idx = tuple(sorted(set(idx)))
        self.lattice.check(idx)
        object.__setattr__(self, "indices", idx)

    @classmethod
    def interval(cls, start: int, length: int, lattice: Lattice = Lattice.HALF) -> WindowProjection:
        if length < 1:
            raise DomainError("interval length must be >= 1")
        return cls(tuple(range(start, start + length)), lattice)

    @classmethod
    def standard(cls, d: int, lattice: Lattice = Lattice.HALF) -> WindowProjection:
        """{0..d-1} on N0; {-floor(d/2) .. d-1-floor(d/2)} on Z (symmetric for odd d)."""
        if lattice is Lattice.HALF:
            return cls.interval(0, d, lattice)
        return cls.interval(-(d // 2), d, lattice)

    @classmethod
    def symmetric(cls, m: int) -> WindowProjection:
        """{-m..m} on Z."""
        return cls.interval(-m, 2 * m + 1, Lattice.FULL)

    @cached_property
    def array(self) -> np.ndarray:
        a = np.asarray(self.indices, dtype=np.int64)
        a.setflags(write=False)
        return a

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def rank(self) -> int:
        return len(self.indices)

    def schatten_norm(self, p) -> float:
        if p == "op":
            return 1.0
        return float(self.rank) ** (1.0 / float(p))

    def contains(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        pos = np.searchsorted(self.array, idx)
        pos = np.minimum(pos, self.array.size - 1)
        return self.array[pos] == idx

    @property
    def start(self) -> int:
        return self.indices[0]

    @property
    def is_interval(self) -> bool:
        return self.indices[-1] - self.indices[0] + 1 == len(self.indices)

    def folded(self) -> np.ndarray:
        return self.array if self.lattice is Lattice.HALF else fold(self.array)

    def runs(self) -> list[tuple[int, int]]:
        """Run-length encoding as (start, length) pairs."""
        a = self.array
        breaks = np.flatnonzero(np.diff(a) != 1) + 1
        starts = np.concatenate([[0], breaks])
        ends = np.concatenate([breaks, [a.size]])
        return [(int(a[s]), int(e - s)) for s, e in zip(starts, ends)]

    @classmethod
    def from_runs(cls, runs, lattice: Lattice = Lattice.HALF) -> WindowProjection:
        idx = [s + t for s, n in runs for t in range(n)]
        return cls(tuple(idx), lattice)

    def union(self, other_indices) -> WindowProjection:
        return WindowProjection(tuple(sorted(set(self.indices) | {int(i) for i in other_indices})), self.lattice)


@dataclass(frozen=True)
class CompressionMatrix:
    window: WindowProjection
    entries: np.ndarray
    source: OperatorSpec

    @property
    def asymmetry(self) -> float:
        a = self.entries
        return float(np.abs(a - a.conj().T).max()) if a.size else 0.0

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        scale = max(1.0, float(np.abs(self.entries).max()))
        return self.asymmetry <= tol * scale


def _check_window(spec: OperatorSpec, window: WindowProjection) -> None:
    if window.lattice is not spec.lattice:
        raise DomainError(f"{window.lattice.value}-line window used with a {spec.lattice.value}-line operator")


def compress(spec: OperatorSpec, window: WindowProjection) -> CompressionMatrix:
    """Dense P T P restricted to ran P, in window order.  No symmetrization."""
    _check_window(spec, window)
    n = len(window)
    check_cap(n)
    r, c, v = coalesce(*spec.columns(window.array), drop_zeros=False)
    keep = window.contains(r)
    rpos = np.searchsorted(window.array, r[keep])
    cpos = np.searchsorted(window.array, c[keep])
    mat = np.zeros((n, n), complex)
    mat[rpos, cpos] = v[keep]
    mat.setflags(write=False)
    return CompressionMatrix(window, mat, spec)


@dataclass(frozen=True)
class SparseBlock:
    """A finite block with explicit lattice index maps for rows and columns."""

    row_index: np.ndarray
    col_index: np.ndarray
    matrix: sp.csr_matrix

    @classmethod
    def from_triplets(cls, rows, cols, vals) -> SparseBlock:
        ri, rp = np.unique(rows, return_inverse=True)
        ci, cp = np.unique(cols, return_inverse=True)
        m = sp.csr_matrix((vals, (rp, cp)), shape=(ri.size, ci.size), dtype=complex)
        return cls(ri.astype(np.int64), ci.astype(np.int64), m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def triplets(self):
        coo = self.matrix.tocoo()
        return self.row_index[coo.row], self.col_index[coo.col], coo.data

    def frobenius_sq(self) -> float:
        d = self.matrix.data
        return float(np.dot(d.real, d.real) + np.dot(d.imag, d.imag))

    def singular_values(self) -> np.ndarray:
        """Singular values, computed per connected component of the support graph."""
        from scipy.sparse.csgraph import connected_components

        m, n = self.shape
        if self.nnz == 0:
            return np.zeros(0)
        coo = self.matrix.tocoo()
        graph = sp.coo_matrix((np.ones(coo.nnz), (coo.row, m + coo.col)), shape=(m + n, m + n))
        ncomp, labels = connected_components(graph, directed=False)
        row_lab, col_lab = labels[:m], labels[m:]
        entry_lab = row_lab[coo.row]
        counts = np.bincount(entry_lab, minlength=ncomp)
        rsize = np.bincount(row_lab, minlength=ncomp)
        csize = np.bincount(col_lab, minlength=ncomp)
        single = (rsize == 1) & (csize == 1) & (counts == 1)
        out = [np.abs(coo.data[single[entry_lab]])]
        csr = self.matrix
        for lab in np.flatnonzero(~single & (counts > 0)):
            rsel = np.flatnonzero(row_lab == lab)
            csel = np.flatnonzero(col_lab == lab)
            sub = csr[rsel][:, csel].toarray()
            out.append(np.linalg.svd(sub, compute_uv=False))
        return np.sort(np.concatenate(out))[::-1]


@dataclass(frozen=True)
class CommutatorBlocks:
    """B = P T (I-P) and C = (I-P) T P on their exact finite supports."""

    window: WindowProjection
    B: SparseBlock
    C: SparseBlock

    @property
    def support(self) -> np.ndarray:
        """All sites touched by either block (window sites included)."""
        return np.unique(np.concatenate([self.window.array, self.B.col_index, self.C.row_index]))

    def singular_values(self) -> np.ndarray:
        return np.sort(np.concatenate([self.B.singular_values(), self.C.singular_values()]))[::-1]

    def hs_sq(self) -> float:
        return self.B.frobenius_sq() + self.C.frobenius_sq()


def boundary_blocks(spec: OperatorSpec, window: WindowProjection) -> CommutatorBlocks:
    _check_window(spec, window)
    w = window.array
    r, c, v = coalesce(*spec.columns(w))
    out = ~window.contains(r)
    C = SparseBlock.from_triplets(r[out], c[out], v[out])
    r, c, v = coalesce(*spec.rows(w))
    out = ~window.contains(c)
    B = SparseBlock.from_triplets(r[out], c[out], v[out])
    if not (np.all(np.isfinite(B.matrix.data)) and np.all(np.isfinite(C.matrix.data))):
        raise StructureError("non-finite entries in commutator blocks")
    return CommutatorBlocks(window, B, C)
