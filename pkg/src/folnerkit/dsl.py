"""JSON operator documents.

A document is a tree of nodes ``{"op": <name>, <params>..., "args": [children]}``.
Complex numbers are written either as plain numbers or as ``[re, im]`` pairs.

>>> parse_operator({"op": "toeplitz", "c": [1, 0, 1]})
<Toeplitz {"c":[1.0,0.0,1.0],"op":"toeplitz"}>
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np

from .errors import DSLError, FolnerError
from .operators import (
    Adjoint,
    AlmostMathieu,
    CuntzIsometry,
    Diagonal,
    DiagonalRule,
    DirectSum,
    FiniteRankPerturbation,
    Lattice,
    OperatorSpec,
    Product,
    Scale,
    Shift,
    Sum,
    Toeplitz,
)

MAX_DOCUMENT_BYTES = 1 << 20

OPS = (
    "shift", "adjoint", "diagonal", "toeplitz", "almost_mathieu", "cuntz",
    "sum", "product", "scale", "direct_sum", "finite_rank",
)


def _number(x, ptr: str) -> complex:
    if isinstance(x, bool):
        raise DSLError("expected a number, got a boolean", ptr)
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in x):
        return complex(x[0], x[1])
    raise DSLError(f"expected a number or [re, im] pair, got {x!r}", ptr)


def _real(x, ptr: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise DSLError(f"expected a real number, got {x!r}", ptr)
    return float(x)


def _int(x, ptr: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise DSLError(f"expected an integer, got {x!r}", ptr)
    return x


def _lattice(node: dict, ptr: str) -> Lattice:
    raw = node.get("lattice", "half")
    try:
        return Lattice(raw)
    except ValueError:
        raise DSLError(f"lattice must be 'half' or 'full', got {raw!r}", ptr + "/lattice") from None


def _args(node: dict, ptr: str, count: int | None = None) -> list:
    args = node.get("args")
    if not isinstance(args, list):
        raise DSLError("missing 'args' list", ptr)
    if count is not None and len(args) != count:
        raise DSLError(f"expected {count} argument(s), got {len(args)}", ptr + "/args")
    if not args:
        raise DSLError("'args' must be nonempty", ptr + "/args")
    return [_parse(a, f"{ptr}/args/{n}") for n, a in enumerate(args)]


def _parse(node: Any, ptr: str) -> OperatorSpec:
    if not isinstance(node, dict):
        raise DSLError(f"expected an object, got {type(node).__name__}", ptr)
    op = node.get("op")
    if op not in OPS:
        raise DSLError(f"unknown op {op!r}; expected one of {', '.join(OPS)}", ptr + "/op")
    try:
        if op == "shift":
            return Shift(_lattice(node, ptr))
        if op == "adjoint":
            return Adjoint(_args(node, ptr, 1)[0])
        if op == "diagonal":
            rule = node.get("rule")
            if not isinstance(rule, str):
                raise DSLError("diagonal needs a string 'rule'", ptr + "/rule")
            try:
                parsed = DiagonalRule.parse(rule)
            except FolnerError as exc:
                raise DSLError(str(exc), ptr + "/rule") from None
            return Diagonal(parsed, _lattice(node, ptr))
        if op == "toeplitz":
            c = node.get("c")
            if not isinstance(c, list) or not c:
                raise DSLError("toeplitz needs a nonempty coefficient list 'c'", ptr + "/c")
            coeffs = tuple(_number(x, f"{ptr}/c/{n}") for n, x in enumerate(c))
            center = node.get("c0_index")
            if center is not None:
                center = _int(center, ptr + "/c0_index")
            elif len(coeffs) % 2 == 0:
                raise DSLError("even-length coefficient list needs 'c0_index'", ptr + "/c")
            return Toeplitz(coeffs, center, _lattice(node, ptr))
        if op == "almost_mathieu":
            for key in ("lambda", "omega"):
                if key not in node:
                    raise DSLError(f"almost_mathieu needs '{key}'", ptr)
            return AlmostMathieu(
                _real(node["lambda"], ptr + "/lambda"),
                _real(node["omega"], ptr + "/omega"),
                _real(node.get("theta", 0.0), ptr + "/theta"),
            )
        if op == "cuntz":
            n = _int(node.get("n"), ptr + "/n")
            k = _int(node.get("k"), ptr + "/k")
            return CuntzIsometry(n, k)
        if op == "sum":
            return Sum(tuple(_args(node, ptr)))
        if op == "product":
            kids = _args(node, ptr)
            if len(kids) < 2:
                raise DSLError("product needs at least two factors", ptr + "/args")
            out = kids[0]
            for k in kids[1:]:
                out = Product(out, k)
            return out
        if op == "scale":
            if "alpha" not in node:
                raise DSLError("scale needs 'alpha'", ptr)
            return Scale(_number(node["alpha"], ptr + "/alpha"), _args(node, ptr, 1)[0])
        if op == "direct_sum":
            left, right = _args(node, ptr, 2)
            return DirectSum(left, right)
        # finite_rank
        block = node.get("block")
        if not isinstance(block, list) or not block or not all(isinstance(r, list) for r in block):
            raise DSLError("finite_rank needs a square 'block' matrix", ptr + "/block")
        rows = [[_number(x, f"{ptr}/block/{a}/{b}") for b, x in enumerate(r)] for a, r in enumerate(block)]
        if any(len(r) != len(rows) for r in rows):
            raise DSLError("finite_rank block must be square", ptr + "/block")
        return FiniteRankPerturbation(_args(node, ptr, 1)[0], np.array(rows, complex))
    except DSLError:
        raise
    except FolnerError as exc:
        raise DSLError(str(exc), ptr) from None


def parse_operator(doc) -> OperatorSpec:
    """Parse a JSON string, bytes, or already-decoded object into an operator tree."""
    if isinstance(doc, (str, bytes)):
        raw = doc.encode() if isinstance(doc, str) else doc
        if len(raw) > MAX_DOCUMENT_BYTES:
            raise DSLError(f"document exceeds {MAX_DOCUMENT_BYTES} bytes")
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise DSLError(f"invalid JSON: {exc}") from None
    return _parse(doc, "")


def _num_out(z: complex):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def to_document(spec: OperatorSpec) -> dict:
    """Inverse of :func:`parse_operator` (up to product nesting)."""
    def lat(node, d):
        if node.lattice is Lattice.FULL:
            d["lattice"] = "full"
        return d

    if isinstance(spec, Shift):
        return lat(spec, {"op": "shift"})
    if isinstance(spec, Adjoint):
        return {"op": "adjoint", "args": [to_document(spec.child)]}
    if isinstance(spec, Diagonal):
        return lat(spec, {"op": "diagonal", "rule": str(spec.rule)})
    if isinstance(spec, Toeplitz):
        d = {"op": "toeplitz", "c": [_num_out(c) for c in spec.coeffs]}
        if len(spec.coeffs) % 2 == 0 or spec.center != len(spec.coeffs) // 2:
            d["c0_index"] = spec.center
        return lat(spec, d)
    if isinstance(spec, AlmostMathieu):
        return {"op": "almost_mathieu", "lambda": spec.lam, "omega": spec.omega, "theta": spec.theta}
    if isinstance(spec, CuntzIsometry):
        return {"op": "cuntz", "n": spec.n, "k": spec.k}
    if isinstance(spec, Sum):
        return {"op": "sum", "args": [to_document(t) for t in spec.terms]}
    if isinstance(spec, Product):
        return {"op": "product", "args": [to_document(spec.left), to_document(spec.right)]}
    if isinstance(spec, Scale):
        return {"op": "scale", "alpha": _num_out(spec.alpha), "args": [to_document(spec.child)]}
    if isinstance(spec, DirectSum):
        return {"op": "direct_sum", "args": [to_document(spec.left), to_document(spec.right)]}
    if isinstance(spec, FiniteRankPerturbation):
        return {
            "op": "finite_rank",
            "block": [[_num_out(x) for x in row] for row in spec.block.tolist()],
            "args": [to_document(spec.child)],
        }
    raise TypeError(f"not an operator node: {spec!r}")


def to_json(spec: OperatorSpec) -> str:
    return json.dumps(to_document(spec), sort_keys=True, separators=(",", ":"))


def spec_hash(*specs: OperatorSpec) -> str:
    """Short SHA-256 of the canonical JSON of one or more specs."""
    payload = "[" + ",".join(to_json(s) for s in specs) + "]"
    return hashlib.sha256(payload.encode()).hexdigest()[:16]
