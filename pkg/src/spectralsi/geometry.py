"""Measure ratios under iterated dilation, estimated by seeded sampling.

All ratios of the form ``|S ∩ A^-j B_r| / |G ∩ A^-j B_r|`` are estimated by
pull-back: points are drawn in the fixed ball ``B_r`` and mapped by ``A^-j``.
Since ``|A^-j S| = d_A^-j |S|`` this estimates the same ratio without ever
sampling a shrinking set.  "Almost every" is read as "at least ``1 - epsilon``
of the seeded samples".
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dilation import DilationMatrix, apply_power
from .errors import EmptyDenominator
from .regions import RegionSet, support_region
from .sampling import as_points, rejection_sample, uniform_ball, uniform_box

TAU_SUPP = 1e-12
RealFn = Callable[[np.ndarray], np.ndarray]


class Verdict(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class DensityProbe:
    """Sampling budget and tolerances shared by every sampled test."""

    dilation: DilationMatrix
    j_max: int = 40
    samples_per_level: int = 100_000
    seed: int = 42
    epsilon: float = 1e-3
    window: int = 5
    box: float = 8.0
    radii: tuple[float, ...] = (0.5, 1.0, 2.0)
    ladder: tuple[float, ...] = (1e-1, 1e-2, 1e-3)
    convergence_tol: float = 1e-9
    sampler: str = "random"

    def __post_init__(self):
        if self.samples_per_level < 1000:
            raise ValueError("samples_per_level must be at least 1000")
        if not 0 < self.window <= self.j_max:
            raise ValueError("window must lie in (0, j_max]")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")

    def with_dilation(self, a: DilationMatrix) -> "DensityProbe":
        from dataclasses import replace

        return replace(self, dilation=a)

    @property
    def dim(self) -> int:
        return self.dilation.dim

    @property
    def terminal(self) -> range:
        return range(self.j_max - self.window, self.j_max + 1)

    def sample_box(self, region: RegionSet, n: int | None, tags: tuple[int, ...]) -> np.ndarray:
        n = self.samples_per_level if n is None else n
        d = self.dim
        return rejection_sample(
            region.contains, n, [-self.box] * d, [self.box] * d, self.seed, tags, self.sampler
        )


def _as_fn(f) -> RealFn:
    if hasattr(f, "evaluate"):
        return f.evaluate
    return f


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeasureEstimate:
    ratio: float
    stderr: float
    hits: int
    denominator: int
    samples: int


def relative_measure(
    E: RegionSet, G: RegionSet, A: DilationMatrix, j: int, r: float, probe: DensityProbe, tag: int = 1
) -> MeasureEstimate:
    """``|E ∩ G ∩ A^-j B_r| / |G ∩ A^-j B_r|`` by pull-back sampling."""
    x = uniform_ball(probe.samples_per_level, r, A.dim, probe.seed, (tag, j, int(round(r * 1e6))), probe.sampler)
    y = apply_power(A, -j, x, max(probe.j_max, abs(j)))
    in_g = G.contains(y)
    n_g = int(in_g.sum())
    if n_g == 0:
        raise EmptyDenominator(f"no sample of A^-{j} B_{r} fell in {G.label}")
    hits = int((E.contains(y[in_g])).sum())
    p = hits / n_g
    return MeasureEstimate(p, float(np.sqrt(p * (1 - p) / n_g)), hits, n_g, len(x))


def _window_verdict(values: list[float], ses: list[float], threshold: float) -> Verdict:
    below = [v < threshold for v in values]
    if not any(below):
        return Verdict.PASS
    clear = [v + 3 * s < threshold for v, s, b in zip(values, ses, below) if b]
    if any(clear):
        return Verdict.FAIL
    diffs = np.diff(values)
    straddles = any(not b for b in below)
    if straddles and np.any(diffs < 0) and np.any(diffs > 0):
        return Verdict.INCONCLUSIVE
    return Verdict.FAIL


@dataclass
class DensityResult:
    verdict: Verdict
    trace: list[dict] = field(default_factory=list)

    @property
    def score(self) -> float:
        return min(t["ratio"] for t in self.trace) if self.trace else float("nan")


def is_density_point(
    E: RegionSet,
    G: RegionSet,
    A: DilationMatrix,
    probe: DensityProbe,
    radii: tuple[float, ...] | None = None,
    tag: int = 2,
) -> DensityResult:
    """Origin is a point of (G, A)-density for E on the terminal window."""
    radii = probe.radii if radii is None else radii
    trace = []
    verdicts = []
    for r in radii:
        vals, ses = [], []
        for j in probe.terminal:
            est = relative_measure(E, G, A, j, r, probe, tag)
            vals.append(est.ratio)
            ses.append(est.stderr)
            trace.append({"r": r, "j": j, "ratio": est.ratio, "stderr": est.stderr})
        verdicts.append(_window_verdict(vals, ses, 1 - probe.epsilon))
    if Verdict.FAIL in verdicts:
        v = Verdict.FAIL
    elif Verdict.INCONCLUSIVE in verdicts:
        v = Verdict.INCONCLUSIVE
    else:
        v = Verdict.PASS
    return DensityResult(v, trace)


def is_locally_nonzero(f, G: RegionSet, A: DilationMatrix, probe: DensityProbe, tag: int = 3) -> DensityResult:
    """Zero fraction of ``f`` in ``G ∩ A^-j B_1`` stays below epsilon."""
    fn = _as_fn(f)
    supp = support_region(fn, A.dim, "supp(f)", TAU_SUPP)
    return is_density_point(supp, G, A, probe, radii=(1.0,), tag=tag)


# ---------------------------------------------------------------------------


@dataclass
class ApproxContinuityResult:
    verdict: Verdict
    deepest_epsilon: float | None
    j0: dict[float, int | None]
    trace: list[dict] = field(default_factory=list)
    window_start: int = 0

    def failure_fractions(self, eps: float) -> list[float]:
        return [t["fractions"][eps] for t in self.trace]

    @property
    def score(self) -> float:
        """Worst terminal-window failure fraction at the finest ladder level."""
        eps = min(self.trace[0]["fractions"])
        return max(t["fractions"][eps] for t in self.trace if t["j"] >= self.window_start)


def is_approx_continuity_point(
    f, f0: float, G: RegionSet, A: DilationMatrix, probe: DensityProbe, tag: int = 4
) -> ApproxContinuityResult:
    """Epsilon-fraction test: for each epsilon in the ladder find ``j0`` with

    ``|{x in G ∩ A^-j B_1 : |f(x) - f0| >= eps}| / |G ∩ A^-j B_1| < eps``

    for every ``j0 <= j <= j_max``.  A level counts as achieved only when
    ``j0`` lies at or before the start of the terminal window.
    """
    fn = _as_fn(f)
    ladder = sorted(probe.ladder, reverse=True)
    trace = []
    for j in range(0, probe.j_max + 1):
        x = uniform_ball(probe.samples_per_level, 1.0, A.dim, probe.seed, (tag, j), probe.sampler)
        y = apply_power(A, -j, x, probe.j_max)
        y = y[G.contains(y)]
        if len(y) == 0:
            raise EmptyDenominator(f"no sample of A^-{j} B_1 fell in {G.label}")
        dev = np.abs(np.asarray(fn(y)) - f0)
        trace.append({"j": j, "n": len(y), "fractions": {e: float(np.mean(dev >= e)) for e in ladder}})
    j0: dict[float, int | None] = {}
    deepest = None
    verdict = Verdict.PASS
    start = probe.j_max - probe.window
    for i, eps in enumerate(ladder):
        first = None
        for t in reversed(trace):
            if t["fractions"][eps] < eps:
                first = t["j"]
            else:
                break
        j0[eps] = first
        if first is not None and first <= start:
            deepest = eps
            continue
        # the coarse levels decide FAIL; only the finest level may be undecided
        verdict = Verdict.INCONCLUSIVE if i == len(ladder) - 1 and i > 0 else Verdict.FAIL
        break
    return ApproxContinuityResult(verdict, deepest, j0, trace, start)


# ---------------------------------------------------------------------------


@dataclass
class AbsorbingResult:
    verdict: Verdict
    fraction: float
    entered_fraction: float
    histogram: dict[int, int]
    j0: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))


def _orbit_membership(E: RegionSet, A: DilationMatrix, pts: np.ndarray, j_max: int) -> np.ndarray:
    return np.stack([E.contains(apply_power(A, -j, pts, j_max)) for j in range(j_max + 1)], axis=1)


def _terminal_run_start(member: np.ndarray) -> np.ndarray:
    """Least j0 with member[j] true for all j >= j0; -1 if false at the end."""
    n, m = member.shape
    out = np.full(n, -1)
    last_false = np.where(~member, np.arange(m)[None, :], -1).max(axis=1)
    ok = member[:, -1]
    out[ok] = last_false[ok] + 1
    return out


def is_absorbing(
    E: RegionSet, G: RegionSet, A: DilationMatrix, probe: DensityProbe, tag: int = 5
) -> AbsorbingResult:
    """E is A^-1-absorbing in G: almost every orbit ``A^-j xi`` ends up in E."""
    pts = probe.sample_box(G, None, (tag,))
    if len(pts) == 0:
        raise EmptyDenominator(f"no samples of {G.label} inside the probe box")
    member = _orbit_membership(E, A, pts, probe.j_max)
    j0 = _terminal_run_start(member)
    settled = (j0 >= 0) & (j0 <= probe.j_max - probe.window)
    entered = j0 >= 0
    frac = float(settled.mean())
    entered_frac = float(entered.mean())
    if frac >= 1 - probe.epsilon:
        v = Verdict.PASS
    elif entered_frac >= 1 - probe.epsilon:
        v = Verdict.INCONCLUSIVE
    else:
        v = Verdict.FAIL
    hist = Counter(int(k) for k in j0)
    return AbsorbingResult(v, frac, entered_frac, dict(sorted(hist.items())), j0)


@dataclass
class InvariantResult:
    verdict: Verdict
    agreement: float


def check_invariant_set(G: RegionSet, A: DilationMatrix, probe: DensityProbe, tag: int = 6) -> InvariantResult:
    d = A.dim
    x = uniform_box(probe.samples_per_level, [-probe.box] * d, [probe.box] * d, probe.seed, (tag,), probe.sampler)
    same = G.contains(x) == G.contains(apply_power(A, 1, x))
    agree = float(same.mean())
    return InvariantResult(Verdict.PASS if agree >= 1 - probe.epsilon else Verdict.FAIL, agree)


@dataclass
class LimitResult:
    points: np.ndarray
    tail: np.ndarray
    converged: np.ndarray
    monotone: np.ndarray
    oscillation: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))


def subsequence_limit(
    f,
    G: RegionSet,
    A: DilationMatrix,
    probe: DensityProbe,
    points=None,
    tag: int = 7,
) -> LimitResult:
    """Tail value of ``f(A^-j xi)`` at ``j = j_max`` with a convergence flag.

    A sample is flagged converged when the values over the terminal window
    oscillate by less than ``probe.convergence_tol``, or when the whole
    sequence ``j = 0..j_max`` is non-decreasing (a bounded monotone sequence).
    """
    fn = _as_fn(f)
    if points is None:
        pts = probe.sample_box(G, None, (tag,))
    else:
        pts = as_points(points, A.dim)
    seq = np.stack([np.asarray(fn(apply_power(A, -j, pts, probe.j_max)), float) for j in range(probe.j_max + 1)], axis=1)
    window = seq[:, probe.j_max - probe.window :]
    osc = window.max(axis=1) - window.min(axis=1)
    monotone = np.all(np.diff(seq, axis=1) >= -probe.convergence_tol, axis=1)
    converged = (osc < probe.convergence_tol) | monotone
    return LimitResult(pts, seq[:, -1], converged, monotone, osc)
