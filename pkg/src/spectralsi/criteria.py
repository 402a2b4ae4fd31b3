"""Sampled characterizations of the completeness property.

Each ``cN_*`` operation renders one condition on the spectral function of an
A-refinable shift-invariant space as a falsifiable numerical test.  The
conditions are equivalent whenever the hypotheses hold, so :func:`run_suite`
runs all of them and reports whether their decisive verdicts agree.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .dilation import DilationMatrix, adjoint, apply_power
from .errors import EmptyDenominator, HypothesisViolated, NotNormalized, QuadratureNonConvergent
from .genspace import TAU_SUPP, GeneratorSystem, SpectralFunction, check_refinable, spectral_function
from .geometry import (
    DensityProbe,
    Verdict,
    check_invariant_set,
    is_absorbing,
    is_approx_continuity_point,
    is_locally_nonzero,
    subsequence_limit,
)
from .regions import RegionSet, ball, box, complement, everything, intersection, support_region
from .sampling import rejection_sample


class CriterionId(str, enum.Enum):
    C2_support_union = "C2_support_union"
    C3_cesaro = "C3_cesaro"
    C4_absorbing = "C4_absorbing"
    C5_limit_positive = "C5_limit_positive"
    C6_limit_one = "C6_limit_one"
    C7_locally_nonzero = "C7_locally_nonzero"
    C8_approx_continuity = "C8_approx_continuity"
    P_projection_norm = "P_projection_norm"

    def __str__(self) -> str:
        return self.value


@dataclass
class CriterionReport:
    criterion_id: CriterionId
    verdict: Verdict
    score: float
    tolerance: float
    trace: dict = field(default_factory=dict)
    # long-form rows for CSV export
    series: list[dict] = field(default_factory=list, repr=False)

    def summary(self) -> dict:
        return {
            "criterion_id": str(self.criterion_id),
            "verdict": str(self.verdict),
            "score": self.score,
            "tolerance": self.tolerance,
            "trace": self.trace,
        }


class Consensus(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    SPLIT = "SPLIT"

    def __str__(self) -> str:
        return self.value


def consensus_of(reports: list[CriterionReport]) -> Consensus:
    decisive = [r.verdict for r in reports if r.verdict != Verdict.INCONCLUSIVE]
    if decisive and all(v == Verdict.PASS for v in decisive):
        return Consensus.PASS
    if decisive and all(v == Verdict.FAIL for v in decisive):
        return Consensus.FAIL
    return Consensus.SPLIT


@dataclass
class SuiteResult:
    reports: list[CriterionReport]
    consensus: Consensus
    ground_truth: bool | None = None
    label: str = ""

    @property
    def matches_ground_truth(self) -> bool | None:
        if self.ground_truth is None:
            return None
        expected = Consensus.PASS if self.ground_truth else Consensus.FAIL
        return self.consensus == expected

    def report(self, cid: CriterionId | str) -> CriterionReport:
        cid = CriterionId(cid)
        return next(r for r in self.reports if r.criterion_id == cid)


@dataclass(frozen=True)
class QuadConfig:
    epsabs: float = 1e-13
    epsrel: float = 1e-11
    limit: int = 400
    max_error: float = 1e-9


# ---------------------------------------------------------------------------


def _a_star(sigma: SpectralFunction) -> DilationMatrix:
    return adjoint(sigma.dilation)


def _fraction_verdict(score: float, probe: DensityProbe, undecided: float = 0.0) -> Verdict:
    if score >= 1 - probe.epsilon:
        return Verdict.PASS
    if score + undecided >= 1 - probe.epsilon:
        return Verdict.INCONCLUSIVE
    return Verdict.FAIL


def c2_support_union(sigma: SpectralFunction, G: RegionSet, probe: DensityProbe) -> CriterionReport:
    """Fraction of ``xi in G`` with ``sigma(A*^-j xi) > tau`` for some ``|j| <= j_max``."""
    a_star = _a_star(sigma)
    pts = probe.sample_box(G, None, (20,))
    if len(pts) == 0:
        raise EmptyDenominator(f"no samples of {G.label} in the probe box")
    hit = np.zeros(len(pts), bool)
    first_hit = np.full(len(pts), probe.j_max + 1)
    for j in sorted(range(-probe.j_max, probe.j_max + 1), key=abs):
        todo = ~hit
        if not todo.any():
            break
        v = sigma.evaluate(apply_power(a_star, -j, pts[todo], probe.j_max))
        new = v > TAU_SUPP
        idx = np.flatnonzero(todo)[new]
        hit[idx] = True
        first_hit[idx] = j
    score = float(hit.mean())
    found = first_hit[hit]
    return CriterionReport(
        CriterionId.C2_support_union,
        _fraction_verdict(score, probe),
        score,
        probe.epsilon,
        {
            "samples": int(len(pts)),
            "hit_fraction": score,
            "j_hit_range": [int(found.min()), int(found.max())] if found.size else None,
        },
    )


def default_e_family(G: RegionSet) -> list[RegionSet]:
    d = G.dim
    unit = ball(1.0, d)
    shifted = box([0.25] * d, [0.75] * d)
    mirrored = box([-0.75] * d, [-0.25] * d)
    if G.label == "all":
        return [unit, shifted, mirrored]
    return [intersection(unit, G), intersection(shifted, G), intersection(mirrored, G)]


def c3_cesaro(
    sigma: SpectralFunction,
    E_family: list[RegionSet],
    probe: DensityProbe,
) -> CriterionReport:
    """Averages of sigma over ``A*^-j E`` for each bounded ``E`` in the family.

    By change of variables the average equals the mean of ``sigma(A*^-j x)``
    over ``x`` uniform in ``E``, which is what is sampled.
    """
    a_star = _a_star(sigma)
    per_e = {}
    series = []
    worst, worst_se = math.inf, 0.0
    for i, E in enumerate(E_family):
        if E.bounding_hint is None:
            raise ValueError(f"{E.label} must be bounded")
        lo, hi = E.bounding_hint
        x = rejection_sample(E.contains, probe.samples_per_level, lo, hi, probe.seed, (30, i), probe.sampler)
        if len(x) == 0:
            per_e[E.label] = None
            continue
        means = []
        for j in range(probe.j_max + 1):
            v = sigma.evaluate(apply_power(a_star, -j, x, probe.j_max))
            means.append((float(v.mean()), float(v.std(ddof=1) / math.sqrt(len(v)))))
            series.append({"E": E.label, "j": j, "average": means[-1][0], "stderr": means[-1][1]})
        window = means[probe.j_max - probe.window :]
        term = float(np.mean([m for m, _ in window]))
        se = float(np.max([s for _, s in window]))
        per_e[E.label] = {"terminal_average": term, "j0_average": means[0][0], "samples": int(len(x))}
        if term < worst:
            worst, worst_se = term, se
    if not math.isfinite(worst):
        raise EmptyDenominator("every set in the C3 family has zero sampled measure")
    verdict = _fraction_verdict(worst, probe, 3 * worst_se)
    return CriterionReport(CriterionId.C3_cesaro, verdict, worst, probe.epsilon, {"per_E": per_e}, series)


def c4_absorbing(sigma: SpectralFunction, G: RegionSet, probe: DensityProbe) -> CriterionReport:
    supp = support_region(sigma.evaluate, sigma.dim, f"supp({sigma.label})", TAU_SUPP)
    res = is_absorbing(supp, G, _a_star(sigma), probe, tag=40)
    return CriterionReport(
        CriterionId.C4_absorbing,
        res.verdict,
        res.fraction,
        probe.epsilon,
        {"settled_fraction": res.fraction, "entered_fraction": res.entered_fraction, "j0_histogram": res.histogram},
    )


def _limits(sigma: SpectralFunction, G: RegionSet, probe: DensityProbe):
    return subsequence_limit(sigma, G, _a_star(sigma), probe, tag=50)


def c5_limit_positive(sigma: SpectralFunction, G: RegionSet, probe: DensityProbe, limits=None) -> CriterionReport:
    lim = _limits(sigma, G, probe) if limits is None else limits
    good = lim.tail > TAU_SUPP
    score = float(good.mean())
    undecided = float((~good & ~lim.converged).mean())
    return CriterionReport(
        CriterionId.C5_limit_positive,
        _fraction_verdict(score, probe, undecided),
        score,
        probe.epsilon,
        {"samples": int(len(lim.tail)), "nonconvergent": float((~lim.converged).mean())},
    )


def c6_limit_one(
    sigma: SpectralFunction, G: RegionSet, probe: DensityProbe, limits=None, eps_val: float = 1e-3, tol: float = 1e-6
) -> CriterionReport:
    lim = _limits(sigma, G, probe) if limits is None else limits
    good = (lim.tail >= 1 - eps_val) & (lim.tail <= 1 + tol)
    score = float(good.mean())
    undecided = float((~good & ~lim.converged).mean())
    return CriterionReport(
        CriterionId.C6_limit_one,
        _fraction_verdict(score, probe, undecided),
        score,
        probe.epsilon,
        {"samples": int(len(lim.tail)), "eps_val": eps_val, "tail_mean": float(lim.tail.mean())},
    )


def c7_locally_nonzero(sigma: SpectralFunction, G: RegionSet, probe: DensityProbe) -> CriterionReport:
    res = is_locally_nonzero(sigma, G, _a_star(sigma), probe, tag=70)
    return CriterionReport(
        CriterionId.C7_locally_nonzero,
        res.verdict,
        res.score,
        probe.epsilon,
        {"min_nonzero_ratio": res.score},
        [{"j": t["j"], "ratio": t["ratio"], "stderr": t["stderr"]} for t in res.trace],
    )


def c8_approx_continuity(sigma: SpectralFunction, G: RegionSet, probe: DensityProbe) -> CriterionReport:
    res = is_approx_continuity_point(sigma, 1.0, G, _a_star(sigma), probe, tag=80)
    return CriterionReport(
        CriterionId.C8_approx_continuity,
        res.verdict,
        res.score,
        probe.epsilon,
        {"deepest_epsilon": res.deepest_epsilon, "j0": {str(k): v for k, v in res.j0.items()}},
        [{"j": t["j"], **{f"fraction_{e:g}": q for e, q in t["fractions"].items()}} for t in res.trace],
    )


# ---------------------------------------------------------------------------


def _edges_1d(sigma: SpectralFunction) -> list[float]:
    if sigma.source is None:
        return []
    out = []
    for g in sigma.source.generators:
        if g.support_box is not None:
            out += [g.support_box[0][0], g.support_box[1][0]]
    return out


def projection_norm_sq(
    sigma: SpectralFunction, E: RegionSet, j: int, quad: QuadConfig = QuadConfig(), j_max: int | None = None
) -> float:
    """``d_A^j * integral of sigma over A*^-j E``, computed as the integral of
    ``sigma(A*^-j x)`` over ``E`` by adaptive quadrature on each box of E."""
    if E.pieces is None:
        raise ValueError(f"{E.label} has no exact box decomposition")
    pieces = [(np.asarray(lo, float), np.asarray(hi, float)) for lo, hi in E.pieces]
    pieces = [(lo, hi) for lo, hi in pieces if np.all(hi > lo)]
    if not pieces:
        return 0.0
    a_star = _a_star(sigma)
    jm = max(abs(j), sigma.dilation.j_max if j_max is None else j_max)
    mat = a_star.power(-j, jm)
    total = 0.0
    err = 0.0
    if sigma.dim == 1:
        scale = mat[0, 0]
        breaks = [e / scale for e in _edges_1d(sigma)]

        def integrand(x: float) -> float:
            return float(sigma.evaluate(np.array([[x * scale]]))[0])

        for lo, hi in pieces:
            pts = sorted({b for b in breaks if lo[0] < b < hi[0]})
            val, ab, info = integrate.quad(
                integrand, lo[0], hi[0], epsabs=quad.epsabs, epsrel=quad.epsrel,
                limit=quad.limit, points=pts or None, full_output=1,
            )[:3]
            total += val
            err += ab
    else:

        def integrand_nd(*x: float) -> float:
            return float(sigma.evaluate((mat @ np.asarray(x))[None, :])[0])

        for lo, hi in pieces:
            val, ab = integrate.nquad(
                integrand_nd,
                list(zip(lo, hi)),
                opts={"epsabs": quad.epsabs, "epsrel": quad.epsrel, "limit": quad.limit},
            )
            total += val
            err += ab
    if err > quad.max_error:
        raise QuadratureNonConvergent(f"quadrature error estimate {err:.3g} exceeds {quad.max_error:g}")
    return total


def _projection_report(sigma: SpectralFunction, E: RegionSet, probe: DensityProbe, quad: QuadConfig) -> CriterionReport:
    measure = E.measure() or 0.0
    seq = []
    for j in sorted({0, probe.j_max // 2, probe.j_max - probe.window, probe.j_max}):
        seq.append({"j": j, "norm_sq": projection_norm_sq(sigma, E, j, quad, probe.j_max)})
    ratio = seq[-1]["norm_sq"] / measure if measure > 0 else float("nan")
    verdict = Verdict.PASS if ratio >= 1 - probe.epsilon else Verdict.FAIL
    return CriterionReport(
        CriterionId.P_projection_norm,
        verdict,
        ratio,
        probe.epsilon,
        {"E": E.label, "measure": measure, "ratio_at_jmax": ratio},
        seq,
    )


def _projection_set(G: RegionSet) -> RegionSet:
    d = G.dim
    cube = box([-0.5] * d, [0.5] * d)
    return cube if G.label == "all" else intersection(cube, G)


def check_hypotheses(sigma: SpectralFunction, G: RegionSet, probe: DensityProbe) -> None:
    """Raise :class:`HypothesisViolated` unless the suite's standing assumptions hold."""
    inv = check_invariant_set(G, _a_star(sigma), probe)
    if inv.verdict != Verdict.PASS:
        raise HypothesisViolated(f"{G.label} is not A*-invariant (agreement {inv.agreement:.4f})")
    try:
        ref = check_refinable(sigma, seed=probe.seed, box=probe.box)
    except NotNormalized as exc:
        raise HypothesisViolated(str(exc)) from exc
    if not ref.ok:
        raise HypothesisViolated(
            f"not refinable: sigma(xi) - sigma(A*^-1 xi) = {ref.worst_violation:.3g} at {ref.location}"
        )
    outside = probe.sample_box(complement(G), 10_000, (11,))
    if len(outside):
        v = sigma.evaluate(outside)
        if np.any(v > TAU_SUPP):
            where = outside[int(np.argmax(v))].tolist()
            raise HypothesisViolated(f"Supp(sigma) escapes {G.label}, e.g. at {where}")


def run_suite(
    system: GeneratorSystem | SpectralFunction,
    G: RegionSet | None = None,
    probe: DensityProbe | None = None,
    quad: QuadConfig = QuadConfig(),
    ground_truth: bool | None = None,
    E_family: list[RegionSet] | None = None,
) -> SuiteResult:
    """Check the hypotheses, run every criterion and form the consensus.

    A principal system that is not declared a tight frame generator is
    normalized through its bracket first.
    """
    if isinstance(system, SpectralFunction):
        sigma = system
    else:
        if not system.claimed_tight_frame:
            system = system.normalized()
        sigma = spectral_function(system)
    G = everything(sigma.dim) if G is None else G
    probe = DensityProbe(sigma.dilation) if probe is None else probe
    check_hypotheses(sigma, G, probe)
    family = default_e_family(G) if E_family is None else E_family
    limits = _limits(sigma, G, probe)
    reports = [
        c2_support_union(sigma, G, probe),
        c3_cesaro(sigma, family, probe),
        c4_absorbing(sigma, G, probe),
        c5_limit_positive(sigma, G, probe, limits),
        c6_limit_one(sigma, G, probe, limits),
        c7_locally_nonzero(sigma, G, probe),
        c8_approx_continuity(sigma, G, probe),
        _projection_report(sigma, _projection_set(G), probe, quad),
    ]
    return SuiteResult(reports, consensus_of(reports), ground_truth, sigma.label)
