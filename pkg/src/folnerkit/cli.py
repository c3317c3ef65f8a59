"""Command-line front end.

    folnerkit profile --op zoo:shift --dims 1,4,100 --p 2
    folnerkit szego   --op zoo:toeplitz:1,0,1 --dims 64,256,1024 --ref symbol
    folnerkit trace   --op zoo:toeplitz:1,0,1 --power 2 --dims 10,100
    folnerkit search  --ops zoo:cuntz-family:2 --size 256 --window 8192
    folnerkit nrange  --op zoo:shift --size 64
    folnerkit verify  --op zoo:cuntz-family:2 --window 64

Exit status: 0 on success, 2 on validation errors, 3 when a size cap is hit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .dsl import parse_operator, spec_hash
from .errors import FolnerError, PreconditionError, ResourceError
from .folner import P_VALUES, _norm_p, profile, sa_halfblock_identity
from .nrange import finiteness_probe, numerical_range
from .operators import CuntzIsometry, OperatorSpec, is_selfadjoint, power
from .search import DEFAULT_BUDGET, nonfolner_probe, subset_search
from .szego import (
    DEFAULT_KMAX,
    counting_measure,
    histogram,
    oracle_reference,
    symbol_pushforward,
    szego_report,
    trace_state,
)
from .windows import WindowProjection, compress
from .zoo import resolve, verify_cuntz_relations

COMMANDS = ("profile", "szego", "trace", "search", "nrange", "verify")


@dataclass
class RunConfig:
    command: str
    ops: list[str] = field(default_factory=list)
    dims: list[int] = field(default_factory=list)
    p: tuple = P_VALUES
    ref: str = "symbol"
    bins: int = 200
    window: Optional[int] = None
    size: Optional[int] = None
    strategy: str = "greedy"
    budget: int = DEFAULT_BUDGET
    seed: int = 0
    out: Optional[str] = None
    format: str = "csv"
    c0_index: Optional[int] = None
    kmax: int = DEFAULT_KMAX
    power: int = 1
    angles: int = 360
    samples: int = 0
    threshold: float = 0.05
    hist: Optional[str] = None


def fmt(x) -> str:
    """Full double precision (17 significant digits)."""
    if isinstance(x, complex):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def split_ops(text: str) -> list[str]:
    """Split a comma list of operator sources; commas inside zoo names and JSON stay put.

    A comma separates sources only outside JSON and when the next source
    starts with ``zoo:``, ``@`` or ``{``.
    """
    parts, start, depth, in_str, escape = [], 0, 0, False, False
    for i, ch in enumerate(text):
        if in_str:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_str = False
        elif ch == '"':
            in_str = True
        elif ch in "{[":
            depth += 1
        elif ch in "}]":
            depth -= 1
        elif ch == "," and depth == 0 and re.match(r"zoo:|@|\{", text[i + 1:]):
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return [p for p in parts if p]


def load_operators(sources: Sequence[str], c0_index: Optional[int] = None) -> list[OperatorSpec]:
    specs = []
    for src in sources:
        src = src.strip()
        if src.startswith("zoo:"):
            specs.extend(e.spec for e in resolve(src, c0_index))
        elif src.startswith("{"):
            specs.append(parse_operator(src))
        else:
            path = Path(src[1:] if src.startswith("@") else src)
            try:
                text = path.read_text()
            except OSError as exc:
                raise PreconditionError(f"cannot read operator file {path}: {exc}") from None
            specs.append(parse_operator(text))
    if not specs:
        raise PreconditionError("no operator given (use --op or --ops)")
    return specs


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _p_list(text: str) -> tuple:
    try:
        return tuple(_norm_p(x.strip()) for x in text.split(",") if x.strip())
    except FolnerError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="folnerkit", description="Finite-section Følner and Szegő diagnostics.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--op", action="append", default=[], help="operator: zoo name, inline JSON, or file path")
    ap.add_argument("--ops", action="append", default=[], help="comma list of operator sources")
    ap.add_argument("--dims", type=_int_list, default=[], help="comma list of window sizes / schedule")
    ap.add_argument("--p", type=_p_list, default=P_VALUES, help="comma list from {1,2,op}")
    ap.add_argument("--ref", default="symbol", help="symbol | oracle:<d>")
    ap.add_argument("--bins", type=int, default=200)
    ap.add_argument("--hist", help="also write a histogram of the largest counting measure here")
    ap.add_argument("--window", type=int, help="window size (verify, nrange) or search universe size")
    ap.add_argument("--size", type=int, help="subset size (search) or matrix size (nrange)")
    ap.add_argument("--strategy", choices=("interval", "greedy", "swap-local"), default="greedy")
    ap.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="output path (stdout if omitted)")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--c0-index", dest="c0_index", type=int, help="center index for zoo:toeplitz coefficients")
    ap.add_argument("--kmax", type=int, default=DEFAULT_KMAX)
    ap.add_argument("--power", type=int, default=1, help="trace: evaluate the k-th power of the observable")
    ap.add_argument("--angles", type=int, default=360)
    ap.add_argument("--samples", type=int, default=0, help="nrange: run the finiteness probe with this many X")
    ap.add_argument("--threshold", type=float, default=0.05)
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    ops = list(ns.op)
    for chunk in ns.ops:
        ops.extend(split_ops(chunk))
    return RunConfig(
        command=ns.command, ops=ops, dims=ns.dims, p=ns.p, ref=ns.ref, bins=ns.bins, window=ns.window,
        size=ns.size, strategy=ns.strategy, budget=ns.budget, seed=ns.seed, out=ns.out, format=ns.format,
        c0_index=ns.c0_index, kmax=ns.kmax, power=ns.power, angles=ns.angles, samples=ns.samples,
        threshold=ns.threshold, hist=ns.hist,
    )


# --------------------------------------------------------------------------
# output


def write_atomic(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_csv(header_comments: Sequence[str], columns: Sequence[str], rows) -> str:
    buf = io.StringIO()
    for line in header_comments:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def render_json(payload: dict) -> str:
    def default(o):
        if isinstance(o, complex):
            return [o.real, o.imag]
        raise TypeError(type(o).__name__)

    return json.dumps(payload, indent=2, sort_keys=True, default=default) + "\n"


def _tabular(cfg: RunConfig, meta: dict, columns: Sequence[str], rows) -> str:
    rows = [list(r) for r in rows]
    if cfg.format == "json":
        return render_json({**meta, "columns": list(columns), "rows": rows})
    comments = [f"{k}={v}" for k, v in meta.items() if not isinstance(v, (dict, list))]
    return render_csv(comments, columns, rows)


# --------------------------------------------------------------------------
# commands


def _need_dims(cfg: RunConfig) -> list[int]:
    if not cfg.dims:
        raise PreconditionError("--dims is required for this command")
    return cfg.dims


def _one(specs: list[OperatorSpec], cmd: str) -> OperatorSpec:
    if len(specs) != 1:
        raise PreconditionError(f"{cmd} takes exactly one operator, got {len(specs)}")
    return specs[0]


def cmd_profile(cfg, specs):
    prof = profile(specs, _need_dims(cfg), cfg.p)
    rows = [(r.window.start, r.dim, r.ratio1, r.ratio2, r.opnorm_comm) for r in prof.rows]
    body = _tabular(cfg, {"command": "profile", "spec_sha256": prof.spec_id},
                    ["window_start", "window_len", "ratio1", "ratio2", "opnorm_comm"], rows)
    last = prof.rows[-1]
    headline = last.ratio2 if 2 in cfg.p else (last.ratio1 if 1 in cfg.p else last.opnorm_comm)
    return body, prof.spec_id, headline


def _reference(cfg, spec):
    if cfg.ref == "symbol":
        return symbol_pushforward(spec)
    m = re.fullmatch(r"oracle:(\d+)", cfg.ref)
    if not m:
        raise PreconditionError(f"--ref must be 'symbol' or 'oracle:<d>', got {cfg.ref!r}")
    return oracle_reference(spec, int(m.group(1)))


def cmd_szego(cfg, specs):
    spec = _one(specs, "szego")
    dims = _need_dims(cfg)
    ref = _reference(cfg, spec)
    rep = szego_report(spec, dims, ref, cfg.kmax)
    ks = range(1, cfg.kmax + 1)
    cols = ["d", "ks_dist"] + [f"m{k}_err" for k in ks] + [f"trace_resid_{k}" for k in ks]
    rows = [[r.d, r.ks_dist, *r.moment_errors, *r.trace_residuals] for r in rep.rows]
    meta = {"command": "szego", "spec_sha256": rep.spec_id, "reference": cfg.ref}
    if cfg.format == "json":
        meta["trace_bounds"] = [list(r.trace_bounds) for r in rep.rows]
        meta["in_symbol_range"] = [r.in_symbol_range for r in rep.rows]
    body = _tabular(cfg, meta, cols, rows)
    if cfg.hist:
        hist = histogram(counting_measure(spec, dims[-1]), cfg.bins)
        write_atomic(cfg.hist, render_csv([f"spec_sha256={rep.spec_id}", f"d={dims[-1]}"],
                                          ["bin_left", "bin_right", "mass"], hist))
    return body, rep.spec_id, rep.rows[-1].ks_dist


def cmd_trace(cfg, specs):
    spec = _one(specs, "trace")
    obs = power(spec, cfg.power)
    rows = []
    for d in _need_dims(cfg):
        t = complex(trace_state(obs, WindowProjection.standard(d, spec.lattice)))
        rows.append((d, t.real, t.imag))
    h = spec_hash(spec)
    body = _tabular(cfg, {"command": "trace", "spec_sha256": h, "power": cfg.power},
                    ["d", "trace_re", "trace_im"], rows)
    return body, h, rows[-1][1]


def cmd_search(cfg, specs):
    h = spec_hash(*specs)
    if cfg.dims:
        res = nonfolner_probe(specs, cfg.dims, cfg.threshold, strategy=cfg.strategy,
                              budget=cfg.budget, seed=cfg.seed)
    else:
        if cfg.size is None:
            raise PreconditionError("search needs --size (or --dims for a probe schedule)")
        universe = cfg.window if cfg.window is not None else 4 * cfg.size
        res = subset_search(specs, universe, cfg.size, cfg.strategy, cfg.budget, cfg.seed)
    payload = {"spec_sha256": h, **res.to_dict()}
    return render_json(payload), h, res.best_ratio


def cmd_nrange(cfg, specs):
    spec = _one(specs, "nrange")
    h = spec_hash(spec)
    if cfg.samples > 0:
        rows = finiteness_probe(spec, _need_dims(cfg), cfg.samples, cfg.seed, angles=cfg.angles)
        table = [(r.d, r.max_distance, sum(r.distances) / len(r.distances)) for r in rows]
        meta = {"command": "nrange", "spec_sha256": h, "samples": cfg.samples, "seed": cfg.seed,
                "note": "finite commutators always contain 0 in W; distances measure polygon resolution"}
        return _tabular(cfg, meta, ["d", "max_distance", "mean_distance"], table), h, table[-1][1]
    d = cfg.size or cfg.window
    if d is None:
        raise PreconditionError("nrange needs --size")
    mat = compress(spec, WindowProjection.standard(d, spec.lattice)).entries
    poly = numerical_range(mat, cfg.angles)
    dist = poly.distance(0.0)
    rows = [(float(t), z.real, z.imag, float(s)) for t, z, s in zip(poly.angles, poly.points, poly.support)]
    meta = {"command": "nrange", "spec_sha256": h, "size": d, "distance_to_origin": fmt(dist)}
    return _tabular(cfg, meta, ["angle", "point_re", "point_im", "support"], rows), h, dist


def cmd_verify(cfg, specs):
    h = spec_hash(*specs)
    N = cfg.window or cfg.size
    if N is None:
        raise PreconditionError("verify needs --window")
    if all(isinstance(s, CuntzIsometry) for s in specs):
        ns = {s.n for s in specs}
        ks = {s.k for s in specs}
        if len(ns) != 1 or ks != set(range(next(iter(ns)))):
            raise PreconditionError("verify needs a complete Cuntz family (e.g. zoo:cuntz-family:2)")
        rep = verify_cuntz_relations(ns.pop(), N)
        rows = [("range_sum", rep.range_sum_deviation), ("orthogonality", rep.orthogonality_deviation)]
        dev = rep.max_deviation
    else:
        rows = []
        for s in specs:
            if not is_selfadjoint(s):
                raise PreconditionError("verify supports Cuntz families and self-adjoint operators")
            chk = sa_halfblock_identity(s, WindowProjection.standard(N, s.lattice))
            rows.append(("halfblock_identity", chk.deviation))
        dev = max(r[1] for r in rows)
    body = _tabular(cfg, {"command": "verify", "spec_sha256": h, "window": N}, ["relation", "max_deviation"], rows)
    return body, h, dev


HANDLERS = {
    "profile": cmd_profile, "szego": cmd_szego, "trace": cmd_trace,
    "search": cmd_search, "nrange": cmd_nrange, "verify": cmd_verify,
}


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        specs = load_operators(cfg.ops, cfg.c0_index)
        body, h, headline = HANDLERS[cfg.command](cfg, specs)
    except ResourceError as exc:
        print(f"error: {exc}", file=stderr)
        return 3
    except FolnerError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    label = "max deviation" if cfg.command == "verify" else "headline"
    summary = f"{cfg.command} spec={h} {label} {fmt(headline) if headline != 0 else '0'}"
    if cfg.out:
        write_atomic(cfg.out, body)
        print(summary, file=stdout)
    else:
        stdout.write(body)
        print(summary, file=stderr)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
