"""Seeded sampling helpers.

Every random stream is derived from ``(seed, *tags)`` through
:class:`numpy.random.SeedSequence`, so a block of samples for level ``j`` is
identical whether blocks are produced serially or by parallel workers.
"""
from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.stats import qmc

BLOCK = 1 << 14
_OFFSET = 1 << 31


def as_points(x, dim: int) -> np.ndarray:
    """Coerce a scalar, a single point or a batch to shape ``(n, dim)``."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return arr.reshape(1, 1) if dim == 1 else np.full((1, dim), float(arr))
    if arr.ndim == 1:
        if dim == 1:
            return arr.reshape(-1, 1)
        if arr.shape[0] == dim:
            return arr.reshape(1, dim)
    if arr.ndim == 2 and arr.shape[1] == dim:
        return arr
    raise ValueError(f"cannot interpret array of shape {arr.shape} as points in R^{dim}")


def stream(seed: int, *tags: int) -> np.random.Generator:
    words = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(t) + _OFFSET for t in tags]
    return np.random.default_rng(np.random.SeedSequence(words))


def _unit_cube(n: int, dim: int, seed: int, tags: tuple[int, ...], sampler: str) -> np.ndarray:
    blocks = []
    for b, start in enumerate(range(0, n, BLOCK)):
        m = min(BLOCK, n - start)
        if sampler == "sobol":
            eng = qmc.Sobol(dim, scramble=True, seed=stream(seed, *tags, b))
            blocks.append(eng.random(m))
        elif sampler == "random":
            blocks.append(stream(seed, *tags, b).random((m, dim)))
        else:
            raise ValueError(f"unknown sampler {sampler!r}")
    return np.concatenate(blocks) if blocks else np.empty((0, dim))


def uniform_box(
    n: int, lo, hi, seed: int, tags: tuple[int, ...] = (), sampler: str = "random"
) -> np.ndarray:
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    u = _unit_cube(n, lo.size, seed, tags, sampler)
    return lo + u * (hi - lo)


def uniform_ball(
    n: int, radius: float, dim: int, seed: int, tags: tuple[int, ...] = (), sampler: str = "random"
) -> np.ndarray:
    """Uniform points in the open Euclidean ball ``B_radius``."""
    if dim == 1:
        u = _unit_cube(n, 1, seed, tags, sampler)
        return radius * (2.0 * u - 1.0)
    u = _unit_cube(n, dim + 1, seed, tags, sampler)
    # inverse-CDF gaussian directions keep the construction usable with Sobol points
    from scipy.special import ndtri

    g = ndtri(np.clip(u[:, :dim], 1e-16, 1 - 1e-16))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * u[:, dim] ** (1.0 / dim)
    return g * r[:, None]


def rejection_sample(
    member: Callable[[np.ndarray], np.ndarray],
    n: int,
    lo,
    hi,
    seed: int,
    tags: tuple[int, ...] = (),
    sampler: str = "random",
    max_rounds: int = 64,
) -> np.ndarray:
    """Draw ``n`` uniform points of a region inside the box ``[lo, hi]``.

    Returns fewer than ``n`` rows (possibly zero) when the region occupies a
    negligible part of the box.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    kept: list[np.ndarray] = []
    total = 0
    batch = max(n, 1024)
    for rnd in range(max_rounds):
        pts = uniform_box(batch, lo, hi, seed, tags + (rnd,), sampler)
        hit = pts[member(pts)]
        kept.append(hit)
        total += len(hit)
        if total >= n:
            break
        if total == 0:
            if rnd >= 3:
                break
            batch *= 4
    out = np.concatenate(kept) if kept else np.empty((0, lo.size))
    return out[:n]
