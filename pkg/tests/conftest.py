"""Shared fixtures: an independent dense oracle for operator trees, random
self-adjoint banded operators, and the acceptance summary printer."""

from __future__ import annotations

import math

import numpy as np
import pytest

from folnerkit.operators import (
    Adjoint,
    AlmostMathieu,
    CuntzIsometry,
    Diagonal,
    DiagonalRule,
    DirectSum,
    FiniteRankPerturbation,
    Lattice,
    Product,
    Scale,
    Shift,
    Sum,
    Toeplitz,
)


def _rule_value(rule: DiagonalRule, m: int, lattice: Lattice) -> complex:
    if rule.kind == "periodic":
        return rule.values[m % len(rule.values)]
    n = m if lattice is Lattice.HALF else (2 * m if m >= 0 else -2 * m - 1)
    a, b = rule.interval
    t = ((rule.seed * math.sqrt(2.0)) % 1.0 + (n + 1) * (math.sqrt(5.0) - 1.0) / 2.0) % 1.0
    return a + (b - a) * t


def dense_oracle(spec, L: int) -> tuple[np.ndarray, np.ndarray]:
    """Dense matrix of ``spec`` on a box of sites, straight from the definitions.

    Returns (sites, matrix).  HalfLine box is 0..L-1, FullLine box is -L..L-1.
    Products are plain matrix products on the box, so entries within the total
    bandwidth of a truncated edge are unreliable; callers compare inner sites.
    """
    lat = spec.lattice
    sites = np.arange(L) if lat is Lattice.HALF else np.arange(-L, L)
    n = sites.size
    pos = {int(s): p for p, s in enumerate(sites)}
    M = np.zeros((n, n), complex)

    if isinstance(spec, Shift):
        for p, s in enumerate(sites):
            if s + 1 in pos:
                M[pos[s + 1], p] = 1
    elif isinstance(spec, Toeplitz):
        for a, i in enumerate(sites):
            for b, j in enumerate(sites):
                k = i - j + spec.center
                if 0 <= k < len(spec.coeffs):
                    M[a, b] = spec.coeffs[k]
    elif isinstance(spec, Diagonal):
        for p, s in enumerate(sites):
            M[p, p] = _rule_value(spec.rule, int(s), lat)
    elif isinstance(spec, AlmostMathieu):
        for p, s in enumerate(sites):
            M[p, p] = 2 * spec.lam * math.cos(2 * math.pi * (spec.theta + s * spec.omega))
            if s + 1 in pos:
                M[pos[s + 1], p] = 1
                M[p, pos[s + 1]] = 1
    elif isinstance(spec, CuntzIsometry):
        for p, s in enumerate(sites):
            t = spec.n * s + spec.k
            if t in pos:
                M[pos[t], p] = 1
    elif isinstance(spec, Adjoint):
        _, C = dense_oracle(spec.child, L)
        M = C.conj().T
    elif isinstance(spec, Sum):
        for t in spec.terms:
            M = M + dense_oracle(t, L)[1]
    elif isinstance(spec, Product):
        M = dense_oracle(spec.left, L)[1] @ dense_oracle(spec.right, L)[1]
    elif isinstance(spec, Scale):
        M = spec.alpha * dense_oracle(spec.child, L)[1]
    elif isinstance(spec, DirectSum):
        for parity, child in ((0, spec.left), (1, spec.right)):
            csites, C = dense_oracle(child, L)
            folded = csites if child.lattice is Lattice.HALF else np.where(csites >= 0, 2 * csites, -2 * csites - 1)
            host = 2 * folded + parity
            for a, hi in enumerate(host):
                for b, hj in enumerate(host):
                    if hi in pos and hj in pos and C[a, b] != 0:
                        M[pos[hi], pos[hj]] = C[a, b]
    elif isinstance(spec, FiniteRankPerturbation):
        M = dense_oracle(spec.child, L)[1].copy()
        r = spec.block.shape[0]
        sup = list(range(r)) if lat is Lattice.HALF else [a // 2 if a % 2 == 0 else -(a + 1) // 2 for a in range(r)]
        for a, i in enumerate(sup):
            for b, j in enumerate(sup):
                M[pos[i], pos[j]] += spec.block[a, b]
    else:
        raise TypeError(type(spec))
    return sites, M


def random_sa_banded(rng: np.random.Generator, max_width: int = 5):
    """Random self-adjoint banded operator B + B^* with B = D @ T (D diagonal, T Toeplitz)."""
    w = int(rng.integers(1, max_width + 1))
    coeffs = rng.normal(size=2 * w + 1) + 1j * rng.normal(size=2 * w + 1)
    diag = Diagonal(DiagonalRule("dense_in", interval=(-1.0, 1.0), seed=int(rng.integers(0, 10_000))))
    B = Product(diag, Toeplitz(tuple(coeffs)))
    extra = Diagonal(DiagonalRule("periodic", values=tuple(rng.normal(size=3))))
    return Sum((B, Adjoint(B), extra))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance summary ------------------------------------------------------

ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def record(criterion: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS[criterion] = (bool(ok), detail)
    print(f"[{'PASS' if ok else 'FAIL'}] {criterion} {detail}")


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split()[0].rstrip("."))):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
