"""Integer expansive dilation matrices.

A dilation is stored as a tuple of integer rows so that instances are
hashable and immutable.  Powers (positive and negative) are computed in exact
integer / rational arithmetic and only rounded to floating point once, which
keeps deep iterates such as ``A^-40`` free of accumulated drift.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .errors import (
    InternalSearchExhausted,
    NonInteger,
    NotExpansive,
    NotSquare,
    PowerRangeExceeded,
    Singular,
)

NORM_DECAY_STEPS = 64
NORM_DECAY_DELTA = 1e-6

IntMatrix = tuple[tuple[int, ...], ...]


def _int_det(rows: IntMatrix) -> int:
    """Fraction-free (Bareiss) determinant of an integer matrix."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _adjugate(rows: IntMatrix) -> IntMatrix:
    n = len(rows)
    if n == 1:
        return ((1,),)
    cof = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = tuple(
                tuple(rows[r][c] for c in range(n) if c != j) for r in range(n) if r != i
            )
            cof[i][j] = (-1) ** (i + j) * _int_det(minor)
    # adjugate is the transposed cofactor matrix
    return tuple(tuple(cof[j][i] for j in range(n)) for i in range(n))


def _int_matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


def _int_matpow(a: IntMatrix, p: int) -> IntMatrix:
    n = len(a)
    result: IntMatrix = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    base = a
    while p:
        if p & 1:
            result = _int_matmul(result, base)
        base = _int_matmul(base, base)
        p >>= 1
    return result


@lru_cache(maxsize=4096)
def _power_matrix(rows: IntMatrix, j: int) -> np.ndarray:
    if j >= 0:
        p = _int_matpow(rows, j)
        out = np.array([[float(v) for v in r] for r in p])
    else:
        det = _int_det(rows)
        p = _int_matpow(_adjugate(rows), -j)
        denom = det ** (-j)
        out = np.array([[float(Fraction(v, denom)) for v in r] for r in p])
    out.setflags(write=False)
    return out


def default_j_max(dim: int) -> int:
    return 40 if dim == 1 else 25


@dataclass(frozen=True)
class DilationMatrix:
    """An accepted expansive integer matrix. Build it with :func:`validate_expansive`."""

    entries: IntMatrix

    @property
    def dim(self) -> int:
        return len(self.entries)

    @cached_property
    def det(self) -> int:
        return _int_det(self.entries)

    @property
    def det_abs(self) -> int:
        return abs(self.det)

    @cached_property
    def adjugate(self) -> IntMatrix:
        return _adjugate(self.entries)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    @property
    def j_max(self) -> int:
        return default_j_max(self.dim)

    def eigenvalue_moduli(self) -> np.ndarray:
        return np.sort(np.abs(np.linalg.eigvals(self.array)))

    def power(self, j: int, j_max: int | None = None) -> np.ndarray:
        """Float matrix of ``A^j``, rounded once from exact arithmetic."""
        limit = self.j_max if j_max is None else j_max
        if abs(j) > limit:
            raise PowerRangeExceeded(f"|j|={abs(j)} exceeds j_max={limit}")
        return _power_matrix(self.entries, int(j))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __str__(self) -> str:
        return str(self.tolist())


def _as_int_rows(m: Sequence[Sequence[float]] | np.ndarray) -> IntMatrix:
    arr = np.asarray(m, dtype=object)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise NotSquare(f"matrix of shape {arr.shape} is not square")
    rows = []
    for r in arr:
        row = []
        for v in r:
            if isinstance(v, (bool, np.bool_)):
                raise NonInteger(f"boolean entry {v!r}")
            try:
                fv = float(v)
            except (TypeError, ValueError) as exc:
                raise NonInteger(f"entry {v!r} is not numeric") from exc
            if not np.isfinite(fv) or fv != int(fv):
                raise NonInteger(f"entry {v!r} is not an integer")
            row.append(int(v) if isinstance(v, (int, np.integer)) else int(fv))
        rows.append(tuple(row))
    return tuple(rows)


def _roots_outside_unit_circle_2x2(rows: IntMatrix) -> bool:
    # lambda^2 - t lambda + D has all roots |lambda| > 1 iff the reciprocal
    # polynomial D z^2 - t z + 1 has all roots inside; Jury test, exact ints.
    (a11, a12), (a21, a22) = rows
    t = a11 + a22
    d = a11 * a22 - a12 * a21
    a, b, c = d, -t, 1
    if a < 0:
        a, b, c = -a, -b, -c
    return abs(c) < a and a + b + c > 0 and a - b + c > 0


def _norm_decay_certificate(rows: IntMatrix, n: int, delta: float) -> tuple[bool, float]:
    inv = _power_matrix(rows, -1)
    with np.errstate(over="ignore", invalid="ignore"):
        p = np.eye(len(rows))
        norms = []
        for _ in range(2 * n):
            p = p @ inv
            norms.append(np.linalg.norm(p, 2))
    a_n, a_2n = norms[n - 1], norms[2 * n - 1]
    if not (np.isfinite(a_n) and np.isfinite(a_2n)) or a_n == 0:
        return False, float("inf")
    rate = (a_2n / a_n) ** (1.0 / n)
    return bool(rate < 1.0 - delta), float(rate)


def validate_expansive(
    m: Sequence[Sequence[float]] | np.ndarray,
    *,
    steps: int = NORM_DECAY_STEPS,
    delta: float = NORM_DECAY_DELTA,
) -> DilationMatrix:
    """Accept ``m`` as an expansive dilation or raise.

    For ``d <= 2`` the eigenvalue condition is decided exactly from the
    characteristic polynomial.  For larger ``d`` the decay rate of
    ``||M^-n||`` is estimated from the ratio ``||M^-2n|| / ||M^-n||`` so that
    the constant in front of the geometric bound cancels.
    """
    rows = _as_int_rows(m)
    det = _int_det(rows)
    if det == 0:
        raise Singular("determinant is zero")
    d = len(rows)
    if d == 1:
        ok = abs(rows[0][0]) > 1
    elif d == 2:
        ok = _roots_outside_unit_circle_2x2(rows)
    else:
        ok, rate = _norm_decay_certificate(rows, steps, delta)
    if not ok:
        raise NotExpansive(f"{[list(r) for r in rows]} has an eigenvalue of modulus <= 1")
    return DilationMatrix(rows)


def adjoint(a: DilationMatrix) -> DilationMatrix:
    return DilationMatrix(tuple(zip(*a.entries)))


def apply_power(
    a: DilationMatrix, j: int, x: np.ndarray | Sequence[float] | float, j_max: int | None = None
) -> np.ndarray:
    """Return ``A^j x`` for a single point or an ``(n, d)`` array of points."""
    pts = np.asarray(x, dtype=float)
    mat = a.power(j, j_max)
    if pts.ndim == 0:
        if a.dim != 1:
            raise ValueError("scalar point given for a multi-dimensional dilation")
        return np.asarray(mat[0, 0] * pts)
    if pts.ndim == 1 and pts.shape[0] == a.dim and a.dim > 1:
        return mat @ pts
    if pts.ndim == 1:
        # 1-D array of scalar points
        return mat[0, 0] * pts
    return pts @ mat.T


def digit_set(a: DilationMatrix, max_widen: int = 6) -> list[tuple[int, ...]]:
    """Coset representatives of ``Z^d / A Z^d``.

    Two lattice points are congruent iff ``adj(A)(x - y) = 0 (mod det A)``;
    the search runs over the box ``[-R, R]^d`` with ``R = ||A||_inf``, widening
    when a class is missing.  Representatives prefer non-negative, short vectors.
    """
    q = a.det_abs
    adj = a.adjugate
    radius = max(sum(abs(v) for v in row) for row in a.entries)
    for _ in range(max_widen):
        pts = itertools.product(range(-radius, radius + 1), repeat=a.dim)
        ordered = sorted(
            pts,
            key=lambda p: (sum(v < 0 for v in p), sum(abs(v) for v in p), tuple(-v for v in p)),
        )
        classes: dict[tuple[int, ...], tuple[int, ...]] = {}
        for p in ordered:
            key = tuple(sum(adj[i][k] * p[k] for k in range(a.dim)) % q for i in range(a.dim))
            classes.setdefault(key, p)
            if len(classes) == q:
                return sorted(classes.values(), key=lambda p: (sum(abs(v) for v in p), tuple(-v for v in p)))
        radius *= 2
    raise InternalSearchExhausted(f"found {len(classes)} of {q} cosets")
