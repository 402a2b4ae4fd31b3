"""Fourier-side generator systems and their spectral functions.

Everything here lives on the frequency side: a generator is an evaluable
function ``xi -> phi_hat(xi)``; time-domain functions are never formed.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .dilation import DilationMatrix, adjoint, apply_power, digit_set
from .errors import FilterUnbounded, NotNormalized, NotPrincipal, TailUnbounded
from .sampling import as_points, uniform_box

TAU_SUPP = 1e-12
SPECTRAL_TOL = 1e-6
DEFAULT_K = {1: 10_000, 2: 100}

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class FourierFunction:
    """An evaluable Fourier transform ``xi -> f_hat(xi)``.

    ``evaluator`` receives an ``(n, dim)`` array and returns ``n`` complex
    values.  ``decay_hint = (C, p)`` promises ``|f(xi)| <= C |xi|_inf^-p`` for
    ``|xi|_inf >= 1``; ``support_box = (lo, hi)`` promises ``f = 0`` outside the
    box.  One of the two is needed for lattice sums to be controllable.
    """

    evaluator: Evaluator
    dim: int = 1
    kind: str = "closed"
    decay_hint: tuple[float, float] | None = None
    support_box: tuple[tuple[float, ...], tuple[float, ...]] | None = None
    label: str = ""

    def evaluate(self, x) -> np.ndarray:
        pts = as_points(x, self.dim)
        return np.asarray(self.evaluator(pts), dtype=complex).reshape(len(pts))

    def __call__(self, x):
        out = self.evaluate(x)
        if np.ndim(x) == 0 or (self.dim > 1 and np.ndim(x) == 1):
            return complex(out[0])
        return out

    def abs2(self, x) -> np.ndarray:
        v = self.evaluate(x)
        return v.real**2 + v.imag**2

    def scaled(self, c: complex, label: str | None = None) -> "FourierFunction":
        ev = self.evaluator
        decay = None if self.decay_hint is None else (abs(c) * self.decay_hint[0], self.decay_hint[1])
        return replace(self, evaluator=lambda p: c * ev(p), decay_hint=decay, label=label or self.label)


def indicator_of_boxes(
    boxes: Sequence[tuple[Sequence[float], Sequence[float], Sequence[bool]]] | Sequence[tuple[float, float]],
    dim: int = 1,
    label: str = "",
) -> FourierFunction:
    """Indicator of a finite union of boxes, as a closed-form FourierFunction.

    In 1D the boxes may be ``(a, b)`` pairs, read as ``[a, b)``.  The general
    form is ``(lo, hi, closed_hi)`` per box where ``closed_hi`` flags, per axis,
    whether the upper face belongs to the box.
    """
    norm = []
    for b in boxes:
        if dim == 1 and len(b) == 2 and np.ndim(b[0]) == 0:
            norm.append((np.array([b[0]], float), np.array([b[1]], float), np.array([False])))
        else:
            lo, hi = np.asarray(b[0], float), np.asarray(b[1], float)
            ch = np.asarray(b[2] if len(b) > 2 else [False] * dim, bool)
            norm.append((lo, hi, ch))

    def ev(p: np.ndarray) -> np.ndarray:
        out = np.zeros(len(p), dtype=bool)
        for lo, hi, ch in norm:
            inside = np.all(p >= lo, axis=1) & np.all(np.where(ch, p <= hi, p < hi), axis=1)
            out |= inside
        return out.astype(complex)

    lo_all = tuple(np.min([b[0] for b in norm], axis=0))
    hi_all = tuple(np.max([b[1] for b in norm], axis=0))
    return FourierFunction(ev, dim=dim, support_box=(lo_all, hi_all), label=label)


def grid_function(axes: Sequence[np.ndarray], values: np.ndarray, label: str = "grid") -> FourierFunction:
    """Piecewise-constant (nearest node) function on a regular grid, zero outside.

    The box is ``[x_0 - h/2, x_last + h/2)`` per axis.
    """
    axes = [np.asarray(a, float) for a in axes]
    vals = np.asarray(values, complex).reshape([len(a) for a in axes])
    dim = len(axes)
    steps = []
    for a in axes:
        if a.size < 2:
            raise ValueError("each grid axis needs at least two nodes")
        h = np.diff(a)
        if not np.allclose(h, h[0], rtol=1e-9, atol=0):
            raise ValueError("grid axes must be uniformly spaced")
        steps.append(float(h[0]))
    lo = np.array([a[0] - s / 2 for a, s in zip(axes, steps)])
    hi = np.array([a[-1] + s / 2 for a, s in zip(axes, steps)])
    starts = np.array([a[0] for a in axes])
    sizes = np.array([a.size for a in axes])
    h = np.array(steps)

    def ev(p: np.ndarray) -> np.ndarray:
        inside = np.all((p >= lo) & (p < hi), axis=1)
        idx = np.clip(np.floor((p - starts) / h + 0.5).astype(np.int64), 0, sizes - 1)
        out = np.zeros(len(p), complex)
        out[inside] = vals[tuple(idx[inside].T)]
        return out

    return FourierFunction(
        ev, dim=dim, kind="grid", support_box=(tuple(lo), tuple(hi)), label=label
    )


def load_grid(path: str | Path, label: str | None = None) -> FourierFunction:
    """Load gridded samples from ``.csv`` (xi_1..xi_d, re, im) or ``.npz``.

    The ``.npz`` layout is ``axis0, axis1, ...`` plus a ``values`` array.
    """
    path = Path(path)
    label = label or path.stem
    if path.suffix == ".npz":
        data = np.load(path)
        axes = [data[f"axis{i}"] for i in range(sum(k.startswith("axis") for k in data.files))]
        return grid_function(axes, data["values"], label)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    try:
        float(rows[0][0])
    except ValueError:
        rows = rows[1:]
    arr = np.array(rows, dtype=float)
    dim = arr.shape[1] - 2
    if dim < 1:
        raise ValueError("CSV grid needs coordinate columns plus re and im")
    coords = arr[:, :dim]
    vals = arr[:, dim] + 1j * arr[:, dim + 1]
    axes = [np.unique(coords[:, i]) for i in range(dim)]
    if np.prod([a.size for a in axes]) != len(arr):
        raise ValueError("CSV rows do not form a full tensor grid")
    index = tuple(np.searchsorted(a, coords[:, i]) for i, a in enumerate(axes))
    grid = np.zeros([a.size for a in axes], complex)
    grid[index] = vals
    return grid_function(axes, grid, label)


# ---------------------------------------------------------------------------
# bracket product


@dataclass(frozen=True)
class BracketResult:
    value: np.ndarray
    tail_bound: float
    K: int

    @property
    def error_bound(self) -> float:
        return self.tail_bound


def _lattice_offsets(dim: int, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    ranges = [np.arange(int(math.floor(a)), int(math.ceil(b)) + 1) for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*ranges, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1).astype(float)


def tail_bound(f: FourierFunction, K: int, s: float) -> float:
    """Bound for ``sum_{|k|_inf > K} |f(xi + k)|^2`` when ``|xi|_inf <= s``."""
    if f.decay_hint is None:
        raise TailUnbounded(f"{f.label or 'function'} has no decay information")
    c, p = f.decay_hint
    d = f.dim
    if 2 * p <= d:
        raise TailUnbounded(f"decay exponent {p} too small for a lattice sum in R^{d}")
    m = K - s
    if m <= 1:
        raise TailUnbounded(f"truncation K={K} too small for |xi| up to {s}")
    growth = 2.0 + (2.0 * s + 1.0) / m
    return 2.0 * d * growth ** (d - 1) * c**2 * m ** (d - 2 * p) / (2 * p - d)


def bracket_product(f: FourierFunction, xi, K: int | None = None, chunk: int = 2048) -> BracketResult:
    """Truncated periodization ``sum_{|k|_inf <= K} |f(xi + k)|^2``.

    Finite-support functions are summed exactly over the lattice points that
    can reach the support, and report a zero tail.
    """
    pts = as_points(xi, f.dim)
    if f.support_box is not None:
        lo = np.asarray(f.support_box[0], float)
        hi = np.asarray(f.support_box[1], float)
        plo, phi = pts.min(axis=0), pts.max(axis=0)
        offsets = _lattice_offsets(f.dim, lo - phi - 1, hi - plo + 1)
        tail = 0.0
        k_used = int(np.max(np.abs(offsets))) if len(offsets) else 0
    else:
        K = DEFAULT_K.get(f.dim, 100) if K is None else int(K)
        if K < 1:
            raise ValueError("K must be >= 1")
        s = float(np.max(np.abs(pts))) if len(pts) else 0.0
        tail = tail_bound(f, K, s)
        offsets = _lattice_offsets(f.dim, np.full(f.dim, -K), np.full(f.dim, K))
        k_used = K
    total = np.zeros(len(pts))
    for start in range(0, len(offsets), chunk):
        ks = offsets[start : start + chunk]
        shifted = (pts[:, None, :] + ks[None, :, :]).reshape(-1, f.dim)
        total += f.abs2(shifted).reshape(len(pts), len(ks)).sum(axis=1)
    return BracketResult(total, tail, k_used)


class _PeriodicBracket:
    """Trigonometric interpolant of a Z^d-periodic bracket, with a fallback.

    The bracket is sampled on an ``N^d`` grid of the unit cell, converted to
    Fourier coefficients and pruned.  If the interpolant disagrees with direct
    summation at off-grid check points by more than ``check_tol`` the direct
    sum is used for every evaluation instead.
    """

    def __init__(self, f: FourierFunction, K: int | None, n: int, check_tol: float = 1e-12):
        self.f = f
        self.K = K
        d = f.dim
        axes = [np.arange(n) / n] * d
        mesh = np.meshgrid(*axes, indexing="ij")
        grid_pts = np.stack([m.ravel() for m in mesh], axis=1)
        res = bracket_product(f, grid_pts, K)
        self.tail = res.tail_bound
        coef = np.fft.fftn(res.value.reshape([n] * d)) / n**d
        freqs = np.fft.fftfreq(n, d=1.0 / n)
        fmesh = np.meshgrid(*[freqs] * d, indexing="ij")
        keep = np.abs(coef) > 1e-16 * max(np.abs(coef).max(), 1e-300)
        self.coef = coef[keep]
        self.freqs = np.stack([m[keep] for m in fmesh], axis=1)
        check = (np.arange(32)[:, None] + 0.5 + 0.37 * np.arange(d)[None, :]) / 32 % 1.0
        direct = bracket_product(f, check, K).value
        self.interp_error = float(np.max(np.abs(self._interp(check) - direct)))
        self.use_interp = self.interp_error <= check_tol and len(self.coef) <= n ** d // 4

    def _interp(self, pts: np.ndarray) -> np.ndarray:
        out = np.zeros(len(pts))
        for c, k in zip(self.coef, self.freqs):
            out += (c * np.exp(2j * np.pi * (pts @ k))).real
        return out

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        if self.use_interp:
            return self._interp(pts - np.floor(pts))
        return bracket_product(self.f, pts - np.floor(pts), self.K).value


def normalize_generator(f: FourierFunction, K: int | None = None, table_size: int | None = None) -> FourierFunction:
    """Return ``f / [f, f]^(1/2)`` where the bracket exceeds ``TAU_SUPP``, else 0."""
    if f.support_box is None and f.decay_hint is None:
        raise TailUnbounded(f"{f.label or 'function'} has no decay information")
    if f.support_box is not None:
        def bracket(p: np.ndarray) -> np.ndarray:
            return bracket_product(f, p).value
    else:
        n = table_size or (256 if f.dim == 1 else 32)
        bracket = _PeriodicBracket(f, K, n)
    ev = f.evaluator

    def normalized(p: np.ndarray) -> np.ndarray:
        b = bracket(p)
        v = np.asarray(ev(p), complex)
        out = np.zeros(len(p), complex)
        ok = b > TAU_SUPP
        out[ok] = v[ok] / np.sqrt(b[ok])
        return out

    # normalized generators are bounded by 1; the support of the bracket can
    # exceed the support box only by whole lattice shifts, which are zero anyway
    decay = None
    if f.decay_hint is not None:
        # |g| <= |f| / sqrt(b) and b >= min bracket; keep the original exponent
        # with a constant inflated by the sampled bracket minimum
        probe = np.linspace(0, 1, 257)[:-1]
        pts = np.stack([probe] * f.dim, axis=1) if f.dim > 1 else probe[:, None]
        bmin = float(np.min(bracket(pts)))
        if bmin > TAU_SUPP:
            decay = (f.decay_hint[0] / math.sqrt(bmin), f.decay_hint[1])
    return FourierFunction(
        normalized,
        dim=f.dim,
        kind=f.kind,
        decay_hint=decay,
        support_box=f.support_box,
        label=f"normalized({f.label})",
    )


# ---------------------------------------------------------------------------
# generator systems and spectral functions


@dataclass(frozen=True)
class GeneratorSystem:
    generators: tuple[FourierFunction, ...]
    dilation: DilationMatrix
    claimed_tight_frame: bool = False
    label: str = ""

    def __post_init__(self):
        if not self.generators:
            raise ValueError("a generator system needs at least one generator")
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            if g.dim != self.dilation.dim:
                raise ValueError("generator dimension does not match the dilation")

    @property
    def dim(self) -> int:
        return self.dilation.dim

    @property
    def principal(self) -> bool:
        return len(self.generators) == 1

    def normalized(self, K: int | None = None) -> "GeneratorSystem":
        """Principal systems only: map the generator to its tight-frame normalization."""
        if not self.principal:
            raise NotPrincipal("normalization via the bracket applies to a single generator")
        g = normalize_generator(self.generators[0], K)
        return GeneratorSystem((g,), self.dilation, True, self.label)


@dataclass(frozen=True)
class SpectralFunction:
    """``xi -> sigma_V(xi)``; evaluation raises instead of clipping above ``1 + tol``."""

    evaluator: Evaluator
    dilation: DilationMatrix
    label: str = ""
    source: GeneratorSystem | None = None
    tol: float = SPECTRAL_TOL
    check_bound: bool = True

    @property
    def dim(self) -> int:
        return self.dilation.dim

    @property
    def adjoint(self) -> DilationMatrix:
        return adjoint(self.dilation)

    def evaluate(self, x) -> np.ndarray:
        pts = as_points(x, self.dim)
        v = np.asarray(self.evaluator(pts), float).reshape(len(pts))
        if self.check_bound and len(v):
            worst = int(np.argmax(v))
            if v[worst] > 1.0 + self.tol:
                raise NotNormalized(
                    f"{self.label}: sigma={v[worst]:.12g} > 1 + {self.tol:g} at xi={pts[worst].tolist()}"
                )
        return v

    def __call__(self, x):
        v = self.evaluate(x)
        if np.ndim(x) == 0 or (self.dim > 1 and np.ndim(x) == 1):
            return float(v[0])
        return v

    def dilated(self, j: int = 1, j_max: int | None = None) -> Callable[[np.ndarray], np.ndarray]:
        """``xi -> sigma(A*^-j xi)``, the spectral function of ``D_A^j V``."""
        a_star = self.adjoint
        return lambda p: self.evaluate(apply_power(a_star, -j, as_points(p, self.dim), j_max))


def spectral_function(system: GeneratorSystem, tol: float = SPECTRAL_TOL) -> SpectralFunction:
    if not system.claimed_tight_frame:
        raise NotNormalized(
            f"{system.label or 'system'} is not declared a tight frame generator; "
            "normalize the generator first"
        )
    gens = system.generators

    def sigma(p: np.ndarray) -> np.ndarray:
        total = np.zeros(len(p))
        for g in gens:
            total += g.abs2(p)
        return total

    return SpectralFunction(sigma, system.dilation, system.label, system, tol)


def dilate_system(system: GeneratorSystem) -> GeneratorSystem:
    """Tight frame generator of ``D_A V`` built from one of ``V``.

    ``D_A(phi(. - k)) = (D_A phi)(. - A^-1 k)``, so the integer shifts of
    ``D_A V`` are generated by ``D_A phi(. - A^-1 r)`` over the digits ``r``.
    """
    a = system.dilation
    a_star = adjoint(a)
    scale = 1.0 / math.sqrt(a.det_abs)
    inv = a.power(-1)
    stretch = float(np.max(np.sum(np.abs(a_star.array), axis=1)))
    gens = []
    for g in system.generators:
        box = None
        if g.support_box is not None:
            lo, hi = np.asarray(g.support_box[0], float), np.asarray(g.support_box[1], float)
            corners = np.stack(np.meshgrid(*zip(lo, hi), indexing="ij"), axis=-1).reshape(-1, a.dim)
            image = apply_power(a_star, 1, corners)
            box = (tuple(image.min(axis=0)), tuple(image.max(axis=0)))
        decay = None
        if g.decay_hint is not None:
            # |A*^-1 xi|_inf >= |xi|_inf / ||A*||_inf
            c, p = g.decay_hint
            decay = (scale * c * stretch**p, p)
        for r in digit_set(a):
            shift = inv @ np.asarray(r, float)

            def ev(p, g=g, shift=shift):
                q = apply_power(a_star, -1, p)
                return scale * g.evaluate(q) * np.exp(-2j * np.pi * (p @ shift))

            gens.append(FourierFunction(ev, dim=a.dim, decay_hint=decay, support_box=box, label=f"D({g.label})"))
    return GeneratorSystem(tuple(gens), a, system.claimed_tight_frame, f"D({system.label})")


# ---------------------------------------------------------------------------
# low-pass filter and refinability


@dataclass(frozen=True)
class LowPassFilter:
    evaluator: Evaluator
    defined_mask: Callable[[np.ndarray], np.ndarray]
    dim: int
    residual: float
    max_modulus: float

    def __call__(self, x) -> np.ndarray:
        pts = as_points(x, self.dim)
        return np.asarray(self.evaluator(pts), complex)


def estimate_filter(
    system: GeneratorSystem,
    samples: int = 4096,
    box: float = 4.0,
    seed: int = 0,
    tol: float = 1e-9,
) -> LowPassFilter:
    """``m(xi) = phi_hat(A* xi) / phi_hat(xi)`` where ``|phi_hat| > sqrt(TAU_SUPP)``.

    The scaling equation is checked on seeded samples from ``[-box, box]^d``:
    ``|m| > 1 + tol`` or a nonzero ``phi_hat(A* xi)`` where ``phi_hat(xi)``
    vanishes both raise :class:`FilterUnbounded`.
    """
    if not system.principal:
        raise NotPrincipal("the scaling equation is stated for a single generator")
    phi = system.generators[0]
    a_star = adjoint(system.dilation)
    thresh = math.sqrt(TAU_SUPP)

    def mask(p: np.ndarray) -> np.ndarray:
        return np.abs(phi.evaluate(p)) > thresh

    def m(p: np.ndarray) -> np.ndarray:
        base = phi.evaluate(p)
        up = phi.evaluate(apply_power(a_star, 1, p))
        out = np.full(len(p), np.nan + 0j)
        ok = np.abs(base) > thresh
        out[ok] = up[ok] / base[ok]
        return out

    d = system.dim
    pts = uniform_box(samples, [-box] * d, [box] * d, seed, (101,))
    defined = mask(pts)
    vals = m(pts)
    up = phi.evaluate(apply_power(a_star, 1, pts))
    orphan = ~defined & (np.abs(up) > thresh)
    if np.any(orphan):
        where = pts[np.argmax(orphan)].tolist()
        raise FilterUnbounded(f"phi_hat(A* xi) != 0 where phi_hat(xi) = 0, e.g. xi={where}")
    modulus = np.abs(vals[defined]) if np.any(defined) else np.zeros(1)
    max_mod = float(modulus.max())
    if max_mod > 1.0 + tol:
        raise FilterUnbounded(f"|m| reaches {max_mod:.6g} > 1")
    base = phi.evaluate(pts)
    resid = np.abs(up - np.where(defined, vals, 0) * base)
    return LowPassFilter(m, mask, d, float(resid.max()), max_mod)


@dataclass(frozen=True)
class RefinabilityCheck:
    ok: bool
    worst_violation: float
    location: list[float] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def check_refinable(
    sigma: SpectralFunction,
    samples: int = 10_000,
    tol: float = 1e-9,
    box: float = 8.0,
    seed: int = 0,
) -> RefinabilityCheck:
    """Sampled test of ``sigma(A*^-1 xi) >= sigma(xi) - tol``.

    ``worst_violation`` is ``max(sigma(xi) - sigma(A*^-1 xi))``; positive values
    above ``tol`` fail.
    """
    d = sigma.dim
    pts = uniform_box(samples, [-box] * d, [box] * d, seed, (102,))
    here = sigma.evaluate(pts)
    down = sigma.dilated(1)(pts)
    gap = here - down
    i = int(np.argmax(gap))
    return RefinabilityCheck(bool(gap[i] <= tol), float(gap[i]), pts[i].tolist())
