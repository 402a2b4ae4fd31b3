"""Affine systems and Fourier-side checks for semiorthogonal tight frame wavelets."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dilation import DilationMatrix, adjoint, apply_power
from .errors import NegativeSpectral
from .genspace import DEFAULT_K, FourierFunction, SpectralFunction, _lattice_offsets, tail_bound
from .geometry import ApproxContinuityResult, DensityProbe, Verdict, is_approx_continuity_point
from .regions import RegionSet, everything
from .sampling import as_points, uniform_box


@dataclass(frozen=True)
class WaveletSystem:
    psis: tuple[FourierFunction, ...]
    dilation: DilationMatrix
    G: RegionSet
    semiorthogonal_claimed: bool = True
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "psis", tuple(self.psis))
        if not self.psis:
            raise ValueError("a wavelet system needs at least one function")

    @property
    def dim(self) -> int:
        return self.dilation.dim

    def sigma(self, x) -> np.ndarray:
        """``sum_alpha |psi_hat^alpha|^2``, the spectral function of W(Psi) when Psi is semiorthogonal."""
        pts = as_points(x, self.dim)
        return sum(p.abs2(pts) for p in self.psis)


# ---------------------------------------------------------------------------
# Calderon sum


@dataclass
class CalderonResult:
    value: np.ndarray
    boundary: np.ndarray
    expected: np.ndarray
    tol: float

    @property
    def ok(self) -> np.ndarray:
        return np.abs(self.value - self.expected) <= self.tol

    def __float__(self) -> float:
        return float(self.value[0])


def _near_jump(f: FourierFunction, eta: np.ndarray, h: float, jump_tol: float) -> np.ndarray:
    base = f.abs2(eta)
    step = h * np.maximum(1.0, np.max(np.abs(eta), axis=1))
    flag = np.zeros(len(eta), bool)
    for i in range(eta.shape[1]):
        for sgn in (-1.0, 1.0):
            shifted = eta.copy()
            shifted[:, i] += sgn * step
            flag |= np.abs(f.abs2(shifted) - base) > jump_tol
    return flag


def calderon_sum(
    W: WaveletSystem,
    xi,
    j_range: int = 30,
    tol: float = 1e-6,
    h: float = 1e-9,
    jump_tol: float = 1e-6,
) -> CalderonResult:
    """``sum_alpha sum_{|j| <= j_range} |psi_hat^alpha(A*^j xi)|^2``.

    Samples whose dilates land within ``h`` (relative) of a jump of some
    ``|psi_hat^alpha|^2`` are flagged as boundary samples.
    """
    pts = as_points(xi, W.dim)
    a_star = adjoint(W.dilation)
    total = np.zeros(len(pts))
    boundary = np.zeros(len(pts), bool)
    for j in range(-j_range, j_range + 1):
        eta = apply_power(a_star, j, pts, j_range)
        for psi in W.psis:
            total += psi.abs2(eta)
            boundary |= _near_jump(psi, eta, h, jump_tol)
    expected = W.G.contains(pts).astype(float)
    return CalderonResult(total, boundary, expected, tol)


@dataclass
class CheckReport:
    name: str
    verdict: Verdict
    score: float
    tolerance: float
    details: dict = field(default_factory=dict)


def calderon_check(
    W: WaveletSystem, probe: DensityProbe, j_range: int = 30, tol: float = 1e-6, samples: int = 4096
) -> CheckReport:
    d = W.dim
    pts = uniform_box(samples, [-probe.box] * d, [probe.box] * d, probe.seed, (90,), probe.sampler)
    res = calderon_sum(W, pts, j_range, tol)
    interior = ~res.boundary
    ok = res.ok[interior]
    score = float(ok.mean()) if ok.size else float("nan")
    verdict = Verdict.PASS if ok.size and score >= 1 - probe.epsilon else Verdict.FAIL
    worst = float(np.max(np.abs(res.value - res.expected)[interior])) if ok.size else float("nan")
    return CheckReport(
        "calderon",
        verdict,
        score,
        tol,
        {"samples": int(len(pts)), "boundary": int(res.boundary.sum()), "worst_deviation": worst},
    )


# ---------------------------------------------------------------------------


def sigma_from_core(sigma_v: SpectralFunction, tol: float = 1e-9) -> SpectralFunction:
    """``xi -> sigma_V(A*^-1 xi) - sigma_V(xi)``, the spectral function of W = D_A V ⊖ V."""
    down = sigma_v.dilated(1)

    def sigma_w(p: np.ndarray) -> np.ndarray:
        v = down(p) - sigma_v.evaluate(p)
        worst = int(np.argmin(v)) if len(v) else 0
        if len(v) and v[worst] < -tol:
            raise NegativeSpectral(
                f"sigma_V(A*^-1 xi) < sigma_V(xi) by {-v[worst]:.3g} at xi={p[worst].tolist()}"
            )
        return np.maximum(v, 0.0)

    return SpectralFunction(sigma_w, sigma_v.dilation, f"W({sigma_v.label})", None, sigma_v.tol)


@dataclass
class OriginResult:
    verdict: Verdict
    per_alpha: list[ApproxContinuityResult]


def wavelet_origin_test(W: WaveletSystem, probe: DensityProbe) -> OriginResult:
    """Approximate continuity of each ``|psi_hat^alpha|`` at 0 with value 0, dilation A*."""
    a_star = adjoint(W.dilation)
    full = everything(W.dim)
    results = []
    for alpha, psi in enumerate(W.psis):
        fn = lambda p, psi=psi: np.abs(psi.evaluate(p))
        results.append(is_approx_continuity_point(fn, 0.0, full, a_star, probe, tag=100 + alpha))
    vs = [r.verdict for r in results]
    if all(v == Verdict.PASS for v in vs):
        v = Verdict.PASS
    elif Verdict.FAIL in vs:
        v = Verdict.FAIL
    else:
        v = Verdict.INCONCLUSIVE
    return OriginResult(v, results)


def _inf_norm(m: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(m), axis=1)))


def semiorthogonality_check(
    W: WaveletSystem,
    probe: DensityProbe,
    j_small: int = 4,
    K: int | None = None,
    samples: int = 256,
    tol: float = 1e-9,
) -> CheckReport:
    """Sampled test that ``t_j(xi) = sum_alpha sum_k psi(A*^j(xi+k)) conj(psi(xi+k))`` vanishes.

    ``t_j = 0`` a.e. is equivalent to ``D_A^j W ⊥ W``.  With decay-type
    generators the lattice sum is truncated at ``K`` and the truncation bound
    is added to the tolerance.
    """
    d = W.dim
    a_star = adjoint(W.dilation)
    xi = uniform_box(samples, [0.0] * d, [1.0] * d, probe.seed, (91,), probe.sampler)
    worst: dict[int, float] = {}
    bounds: dict[int, float] = {}
    ok = True
    for j in range(1, j_small + 1):
        t = np.zeros(len(xi), complex)
        tail = 0.0
        for psi in W.psis:
            if psi.support_box is not None:
                lo = np.asarray(psi.support_box[0]) - 1.0
                hi = np.asarray(psi.support_box[1]) + 1.0
                ks = _lattice_offsets(d, lo, hi)
            else:
                kk = DEFAULT_K.get(d, 100) if K is None else K
                ks = _lattice_offsets(d, np.full(d, -kk), np.full(d, kk))
                p = psi.decay_hint[1] if psi.decay_hint else 0.0
                tail += _inf_norm(a_star.power(-j)) ** p * tail_bound(psi, kk, 1.0)
            for start in range(0, len(ks), 2048):
                block = ks[start : start + 2048]
                eta = (xi[:, None, :] + block[None, :, :]).reshape(-1, d)
                up = psi.evaluate(apply_power(a_star, j, eta))
                here = psi.evaluate(eta)
                t += (up * np.conj(here)).reshape(len(xi), len(block)).sum(axis=1)
        worst[j] = float(np.max(np.abs(t)))
        bounds[j] = tail
        ok &= worst[j] <= tol + tail
    score = max(worst.values())
    return CheckReport(
        "semiorthogonality",
        Verdict.PASS if ok else Verdict.FAIL,
        score,
        tol,
        {"max_abs_t": worst, "tail_bound": bounds},
    )
