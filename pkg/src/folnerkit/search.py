"""Search over coordinate windows for small joint Følner ratios.

Only coordinate projections are searched (the operator analogue of group
Følner sets), so every result is an upper bound on the infimum over all
finite-rank projections, never the infimum itself.

The squared commutator norm of a coordinate window F is a cut weight:

    ||[T, P_F]||_2^2 = sum_{x in F} deg(x) - sum_{x, y in F} G[x, y]

with G[x, y] = |T_xy|^2 + |T_yx|^2 (x != y) and deg(x) the off-diagonal
mass of row and column x.  Candidate moves are scored from this identity
in vectorized form; the final window is re-evaluated from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DomainError
from .folner import joint_folner_ratio
from .operators import OperatorSpec, coalesce
from .windows import WindowProjection

STRATEGIES = ("interval", "greedy", "swap-local")
MAX_UNIVERSE = 65536
DEFAULT_BUDGET = 100_000_000
DEFAULT_RESTARTS = 8
DEFAULT_SCHEDULE = (16, 32, 64, 128, 256, 512, 1024)
RESTRICTION = "coordinate projections only; ratios are upper bounds on the infimum"


@dataclass
class SearchResult:
    best_window: WindowProjection
    best_ratio: float
    strategy: str
    evaluations: int
    budget: int
    decay_flag: Optional[str] = None
    trace: list = field(default_factory=list)
    restriction: str = RESTRICTION

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "budget": self.budget,
            "evaluations": self.evaluations,
            "best_window": [list(r) for r in self.best_window.runs()],
            "best_window_size": len(self.best_window),
            "best_ratio": self.best_ratio,
            "decay_flag": self.decay_flag,
            "trace": self.trace,
            "restriction": self.restriction,
        }


class _CutModel:
    """Per-operator degree vectors and coupling matrices on a finite universe."""

    def __init__(self, specs: Sequence[OperatorSpec], universe: np.ndarray):
        self.U = universe
        M = universe.size
        self.deg = []
        self.G = []
        for s in specs:
            deg = np.zeros(M)
            r, c, v = coalesce(*s.columns(universe))
            w = np.abs(v) ** 2
            off = r != c
            np.add.at(deg, np.searchsorted(universe, c[off]), w[off])
            inside = off & _member(universe, r)
            a = np.searchsorted(universe, r[inside])
            b = np.searchsorted(universe, c[inside])
            wi = w[inside]
            G = sp.csr_matrix((np.concatenate([wi, wi]), (np.concatenate([a, b]), np.concatenate([b, a]))),
                              shape=(M, M))
            r, c, v = coalesce(*s.rows(universe))
            w = np.abs(v) ** 2
            off = r != c
            np.add.at(deg, np.searchsorted(universe, r[off]), w[off])
            self.deg.append(deg)
            self.G.append(G.tocsc())

    @property
    def n(self) -> int:
        return len(self.deg)

    def column(self, s: int, x: int) -> np.ndarray:
        out = np.zeros(self.U.size)
        self.add_column(out, s, x)
        return out

    def add_column(self, out: np.ndarray, s: int, x: int) -> None:
        G = self.G[s]
        lo, hi = G.indptr[x], G.indptr[x + 1]
        out[G.indices[lo:hi]] += G.data[lo:hi]

    def interval_costs(self, k: int) -> np.ndarray:
        """(n_specs, M - k + 1) cut weights of all length-k intervals."""
        M = self.U.size
        nstart = M - k + 1
        out = np.empty((self.n, nstart))
        for s in range(self.n):
            csum = np.concatenate([[0.0], np.cumsum(self.deg[s])])
            total = csum[k:] - csum[:nstart]
            upper = sp.triu(self.G[s], k=1).tocoo()
            a, b, w = upper.row, upper.col, upper.data
            ok = (b - a) <= k - 1
            a, b, w = a[ok], b[ok], w[ok]
            lo = np.maximum(b - k + 1, 0)
            hi = np.minimum(a, nstart - 1)
            ok = lo <= hi
            diff = np.zeros(nstart + 1)
            np.add.at(diff, lo[ok], w[ok])
            np.add.at(diff, hi[ok] + 1, -w[ok])
            out[s] = total - 2.0 * np.cumsum(diff)[:nstart]
        return out


def _member(sorted_arr: np.ndarray, x: np.ndarray) -> np.ndarray:
    pos = np.minimum(np.searchsorted(sorted_arr, x), sorted_arr.size - 1)
    return sorted_arr[pos] == x


class _Budget:
    def __init__(self, total: int):
        self.total = total
        self.spent = 0

    @property
    def left(self) -> int:
        return self.total - self.spent

    def take(self, n: int) -> bool:
        if n > self.left:
            return False
        self.spent += n
        return True


def _greedy(model: _CutModel, start: int, k: int, budget: _Budget):
    M = model.U.size
    in_f = np.zeros(M, bool)
    in_f[start] = True
    cost = np.array([model.deg[s][start] for s in range(model.n)])
    gf = np.stack([model.column(s, start) for s in range(model.n)])
    deg = np.stack(model.deg)
    for size in range(1, k):
        if not budget.take(M - size):
            return None
        new = cost[:, None] + deg - 2.0 * gf
        score = new.max(axis=0)
        score[in_f] = np.inf
        x = int(np.argmin(score))
        in_f[x] = True
        cost = new[:, x]
        for s in range(model.n):
            model.add_column(gf[s], s, x)
    return in_f, cost


def _swap_local(model: _CutModel, in_f: np.ndarray, cost: np.ndarray, budget: _Budget):
    M = model.U.size
    k = int(in_f.sum())
    deg = np.stack(model.deg)
    gf = np.stack([model.G[s] @ in_f.astype(float) for s in range(model.n)])
    current = cost.max()
    improved = True
    while improved:
        improved = False
        for x in np.flatnonzero(in_f):
            if not in_f[x]:
                continue
            if not budget.take(M - k):
                return in_f, cost
            gx = np.stack([model.column(s, x) for s in range(model.n)])
            removed = cost - deg[:, x] + 2.0 * gf[:, x]
            new = removed[:, None] + deg - 2.0 * (gf - gx)
            score = new.max(axis=0)
            score[in_f] = np.inf
            y = int(np.argmin(score))
            if score[y] < current * (1.0 - 1e-12) - 1e-15:
                in_f[x], in_f[y] = False, True
                cost = new[:, y]
                current = score[y]
                gf -= gx
                for s in range(model.n):
                    model.add_column(gf[s], s, y)
                improved = True
    return in_f, cost


def subset_search(specs: Sequence[OperatorSpec], max_index: int, size: int, strategy: str = "greedy",
                  budget: int = DEFAULT_BUDGET, seed: int = 0, restarts: int = DEFAULT_RESTARTS) -> SearchResult:
    """Best joint ratio (p = 2) over coordinate windows of ``size`` sites among the first ``max_index``.

    Intervals are always evaluated first.  ``greedy`` then grows windows one
    site at a time from ``restarts`` starting sites (the first site plus
    seeded random ones); ``swap-local`` additionally tries single-site
    exchanges on the best window.  Ties go to the smallest index.
    """
    specs = list(specs)
    if not specs:
        raise DomainError("need at least one operator")
    if strategy not in STRATEGIES:
        raise DomainError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    if budget < 1:
        raise DomainError("budget must be >= 1")
    if not 1 <= size <= max_index <= MAX_UNIVERSE:
        raise DomainError(f"need 1 <= size <= max_index <= {MAX_UNIVERSE}")
    lattice = specs[0].lattice
    if any(s.lattice is not lattice for s in specs):
        raise DomainError("search members must share a lattice")
    universe = np.sort(lattice.first(max_index))
    model = _CutModel(specs, universe)
    spent = _Budget(budget)

    costs = model.interval_costs(size)
    n_int = min(costs.shape[1], spent.left)
    spent.take(n_int)
    joint = costs[:, :n_int].max(axis=0)
    s0 = int(np.argmin(joint))
    best_in = np.zeros(universe.size, bool)
    best_in[s0:s0 + size] = True
    best_cost = costs[:, s0]
    best = joint[s0]

    if strategy != "interval" and best > 0:
        rng = np.random.default_rng(seed)
        starts = [0] + [int(x) for x in rng.integers(0, universe.size, max(restarts - 1, 0))]
        for st in starts:
            got = _greedy(model, st, size, spent)
            if got is None:
                break
            in_f, cost = got
            if cost.max() < best:
                best, best_in, best_cost = cost.max(), in_f, cost
        if strategy == "swap-local" and best > 0:
            best_in, best_cost = _swap_local(model, best_in.copy(), best_cost, spent)

    window = WindowProjection(tuple(universe[best_in].tolist()), lattice)
    ratio = joint_folner_ratio(specs, window, 2)
    return SearchResult(window, ratio, strategy, spent.spent, budget)


def loglog_slope(dims: Sequence[int], ratios: Sequence[float]) -> float:
    x = np.log(np.asarray(dims, float))
    y = np.log(np.asarray(ratios, float))
    return float(np.polyfit(x, y, 1)[0])


def nonfolner_probe(specs: Sequence[OperatorSpec], schedule: Sequence[int] = DEFAULT_SCHEDULE,
                    threshold: float = 0.05, flat_slope: float = 0.05, strategy: str = "greedy",
                    budget: int = DEFAULT_BUDGET, seed: int = 0, universe_factor: int = 4,
                    tail: int = 5) -> SearchResult:
    """Run :func:`subset_search` along ``schedule`` and classify the trend.

    ``decaying``: the last best ratio is below ``threshold``.  ``flat``: the
    log-log slope over the last ``tail`` points has magnitude below
    ``flat_slope`` and every ratio exceeds ``threshold``.  Otherwise
    ``inconclusive``.  ``budget`` applies to each schedule point.
    """
    schedule = [int(d) for d in schedule]
    if not schedule or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise DomainError("schedule must be nonempty and strictly ascending")
    trace = []
    results = []
    for d in schedule:
        M = min(MAX_UNIVERSE, universe_factor * d)
        res = subset_search(specs, M, d, strategy, budget, seed)
        results.append(res)
        trace.append({"dim": d, "max_index": M, "best_ratio": res.best_ratio, "evaluations": res.evaluations})
    ratios = [r.best_ratio for r in results]
    if ratios[-1] < threshold:
        flag = "decaying"
    else:
        pts = [(d, r) for d, r in zip(schedule, ratios)][-tail:]
        if len(pts) >= 2 and min(ratios) > threshold:
            slope = loglog_slope([p[0] for p in pts], [p[1] for p in pts])
            flag = "flat" if abs(slope) < flat_slope else "inconclusive"
        else:
            flag = "inconclusive"
    best = min(results, key=lambda r: r.best_ratio)
    return SearchResult(best.best_window, best.best_ratio, strategy,
                        sum(r.evaluations for r in results), budget, flag, trace)
