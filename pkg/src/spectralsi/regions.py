"""Measurable sets represented by membership predicates.

Regions compose (union, intersection, complement) and carry the expression
they were built from as ``label``, which doubles as their serialized form.
The tiny prefix grammar understood by :func:`parse_region`::

    all | empty
    ball(r)                      open Euclidean ball around 0
    interval(a, b)               [a, b) on the line; a, b may be -inf / inf
    box([lo...], [hi...])        product of [lo_i, hi_i)
    halfspace([n...], c)         {x : n.x > c}
    union(R, ...) | intersection(R, ...) | complement(R)
    support(KEY)                 {sigma_KEY > TAU_SUPP}, needs a resolver
"""
from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .sampling import as_points

Member = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class RegionSet:
    membership: Member
    dim: int = 1
    label: str = "region"
    bounding_hint: tuple[tuple[float, ...], tuple[float, ...]] | None = None
    # exact decomposition into disjoint half-open boxes, when known
    pieces: tuple[tuple[tuple[float, ...], tuple[float, ...]], ...] | None = field(default=None, compare=False)

    def contains(self, x) -> np.ndarray:
        pts = as_points(x, self.dim)
        return np.asarray(self.membership(pts), bool).reshape(len(pts))

    def __call__(self, x):
        out = self.contains(x)
        if np.ndim(x) == 0 or (self.dim > 1 and np.ndim(x) == 1):
            return bool(out[0])
        return out

    def measure(self) -> float | None:
        if self.pieces is None:
            return None
        return float(sum(np.prod(np.subtract(hi, lo)) for lo, hi in self.pieces))

    def __str__(self) -> str:
        return self.label


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(float(v)) if v != int(v) else str(int(v))


def everything(dim: int = 1) -> RegionSet:
    return RegionSet(lambda p: np.ones(len(p), bool), dim, "all")


def empty(dim: int = 1) -> RegionSet:
    return RegionSet(lambda p: np.zeros(len(p), bool), dim, "empty", pieces=())


def ball(r: float, dim: int = 1) -> RegionSet:
    r = float(r)
    hint = ((-r,) * dim, (r,) * dim)
    pieces = ((( -r,), (r,)),) if dim == 1 else None
    return RegionSet(
        lambda p: np.einsum("ij,ij->i", p, p) < r * r, dim, f"ball({_fmt(r)})", hint, pieces
    )


def interval(a: float, b: float) -> RegionSet:
    a, b = float(a), float(b)
    hint = ((a,), (b,)) if math.isfinite(a) and math.isfinite(b) else None
    pieces = (((a,), (b,)),) if hint else None
    return RegionSet(
        lambda p: (p[:, 0] >= a) & (p[:, 0] < b), 1, f"interval({_fmt(a)}, {_fmt(b)})", hint, pieces
    )


def box(lo: Sequence[float], hi: Sequence[float]) -> RegionSet:
    lo_a, hi_a = np.asarray(lo, float), np.asarray(hi, float)
    label = f"box([{', '.join(map(_fmt, lo_a))}], [{', '.join(map(_fmt, hi_a))}])"
    finite = bool(np.all(np.isfinite(lo_a)) and np.all(np.isfinite(hi_a)))
    hint = (tuple(lo_a), tuple(hi_a)) if finite else None
    return RegionSet(
        lambda p: np.all((p >= lo_a) & (p < hi_a), axis=1),
        lo_a.size,
        label,
        hint,
        ((hint,) if finite else None),
    )


def halfspace(normal: Sequence[float], offset: float = 0.0) -> RegionSet:
    n = np.asarray(normal, float)
    c = float(offset)
    label = f"halfspace([{', '.join(map(_fmt, n))}], {_fmt(c)})"
    return RegionSet(lambda p: p @ n > c, n.size, label)


def _merge_hints(regs: Sequence[RegionSet]):
    hints = [r.bounding_hint for r in regs]
    if any(h is None for h in hints):
        return None
    return (tuple(np.min([h[0] for h in hints], axis=0)), tuple(np.max([h[1] for h in hints], axis=0)))


def union(*regs: RegionSet) -> RegionSet:
    dim = regs[0].dim
    pieces = None
    if all(r.pieces is not None for r in regs) and dim == 1:
        pieces = _disjoint_1d([p for r in regs for p in r.pieces])
    return RegionSet(
        lambda p: np.any([r.contains(p) for r in regs], axis=0),
        dim,
        f"union({', '.join(r.label for r in regs)})",
        _merge_hints(regs),
        pieces,
    )


def intersection(*regs: RegionSet) -> RegionSet:
    dim = regs[0].dim
    bounded = [r.bounding_hint for r in regs if r.bounding_hint is not None]
    hint = None
    if bounded:
        hint = (tuple(np.max([h[0] for h in bounded], axis=0)), tuple(np.min([h[1] for h in bounded], axis=0)))
    pieces = None
    if dim == 1 and hint is not None:
        known = [r for r in regs if r.pieces is not None]
        if len(known) == len(regs) or _all_intervals_or_trivial(regs):
            pieces = _intersect_1d(regs, hint)
    return RegionSet(
        lambda p: np.all([r.contains(p) for r in regs], axis=0),
        dim,
        f"intersection({', '.join(r.label for r in regs)})",
        hint,
        pieces,
    )


def complement(reg: RegionSet) -> RegionSet:
    return RegionSet(lambda p: ~reg.contains(p), reg.dim, f"complement({reg.label})")


def _disjoint_1d(pieces) -> tuple:
    spans = sorted((lo[0], hi[0]) for lo, hi in pieces if hi[0] > lo[0])
    merged: list[list[float]] = []
    for a, b in spans:
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return tuple(((a,), (b,)) for a, b in merged)


def _all_intervals_or_trivial(regs) -> bool:
    return all(r.pieces is not None or r.label == "all" or r.label.startswith("interval(") for r in regs)


def _interval_spans(r: RegionSet) -> list[tuple[float, float]]:
    if r.label == "all":
        return [(-math.inf, math.inf)]
    if r.pieces is not None:
        return [(lo[0], hi[0]) for lo, hi in r.pieces]
    m = re.fullmatch(r"interval\((.+), (.+)\)", r.label)
    return [(float(m.group(1)), float(m.group(2)))]


def _intersect_1d(regs, hint) -> tuple | None:
    spans = [(hint[0][0], hint[1][0])]
    for r in regs:
        nxt = []
        for a, b in spans:
            for c, d in _interval_spans(r):
                lo, hi = max(a, c), min(b, d)
                if hi > lo:
                    nxt.append((lo, hi))
        spans = nxt
    return _disjoint_1d([((a,), (b,)) for a, b in spans])


def support_region(f: Callable[[np.ndarray], np.ndarray], dim: int, label: str, tau: float = 1e-12) -> RegionSet:
    """``{x : |f(x)| > tau}``."""
    return RegionSet(lambda p: np.abs(np.asarray(f(p))) > tau, dim, label)


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][\w:\-\.]*)|(?P<num>[-+]?(?:\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|inf))|(?P<sym>[(),\[\]]))")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse region near {text[pos:pos + 20]!r}")
        out.append(m.group(0).strip())
        pos = m.end()
    return [t for t in out if t]


def _number(tok: str) -> float:
    if tok in ("inf", "+inf"):
        return math.inf
    if tok == "-inf":
        return -math.inf
    return float(ast.literal_eval(tok)) if not tok.endswith("inf") else float(tok)


def parse_region(
    text: str, dim: int = 1, resolver: Callable[[str], RegionSet] | None = None
) -> RegionSet:
    toks = _tokenize(text)
    pos = 0

    def peek() -> str | None:
        return toks[pos] if pos < len(toks) else None

    def take(expected: str | None = None) -> str:
        nonlocal pos
        if pos >= len(toks):
            raise ValueError(f"unexpected end of region expression {text!r}")
        t = toks[pos]
        if expected is not None and t != expected:
            raise ValueError(f"expected {expected!r}, got {t!r} in {text!r}")
        pos += 1
        return t

    def vector() -> list[float]:
        take("[")
        vals = []
        while peek() != "]":
            vals.append(_number(take()))
            if peek() == ",":
                take(",")
        take("]")
        return vals

    def arg():
        t = peek()
        if t == "[":
            return vector()
        if t is not None and (t[0].isdigit() or t[0] in "+-." or t == "inf"):
            return _number(take())
        return expr()

    def expr() -> RegionSet:
        name = take()
        if name in ("all", "empty") and peek() != "(":
            return everything(dim) if name == "all" else empty(dim)
        take("(")
        if name == "support":
            key = []
            while peek() != ")":
                key.append(take())
            take(")")
            if resolver is None:
                raise ValueError("support(...) needs a registry resolver")
            return resolver("".join(key))
        args = []
        while peek() != ")":
            args.append(arg())
            if peek() == ",":
                take(",")
        take(")")
        if name == "ball":
            return ball(args[0], dim)
        if name == "interval":
            return interval(*args)
        if name == "box":
            return box(*args)
        if name == "halfspace":
            return halfspace(*args)
        if name == "union":
            return union(*args)
        if name == "intersection":
            return intersection(*args)
        if name == "complement":
            return complement(*args)
        if name in ("all", "empty"):
            return everything(dim) if name == "all" else empty(dim)
        raise ValueError(f"unknown region constructor {name!r}")

    reg = expr()
    if pos != len(toks):
        raise ValueError(f"trailing tokens in region expression {text!r}")
    return reg
