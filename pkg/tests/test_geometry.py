import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import interval_overlap
from spectralsi.dilation import adjoint, validate_expansive
from spectralsi.errors import EmptyDenominator
from spectralsi.geometry import (
    DensityProbe,
    Verdict,
    check_invariant_set,
    is_absorbing,
    is_approx_continuity_point,
    is_density_point,
    is_locally_nonzero,
    relative_measure,
    subsequence_limit,
)
from spectralsi.registry import lookup
from spectralsi.regions import ball, complement, empty, everything, interval, union
from spectralsi.sampling import uniform_ball

A = validate_expansive([[2]])
R = everything(1)
HALF = interval(0, math.inf)


def probe(**kw):
    kw.setdefault("samples_per_level", 20_000)
    return DensityProbe(A, **kw)


def test_probe_validation():
    with pytest.raises(ValueError):
        DensityProbe(A, samples_per_level=10)
    with pytest.raises(ValueError):
        DensityProbe(A, window=0)


def _exact_ratio(spans, g_span, j, r):
    s = r * 2.0**-j
    num = sum(interval_overlap(a, b, max(-s, g_span[0]), min(s, g_span[1])) for a, b in spans)
    den = interval_overlap(-s, s, *g_span)
    return num / den


CASES = [
    # (E spans, G span)
    ([(-0.5, -0.1), (0.1, 0.5)], (-math.inf, math.inf)),
    ([(0.0, math.inf)], (-math.inf, math.inf)),
    ([(-0.3, 0.002), (0.7, 0.9)], (-math.inf, math.inf)),
    ([(0.0, 0.25)], (0.0, math.inf)),
]


@pytest.mark.parametrize("spans, g_span", CASES)
@pytest.mark.parametrize("j", [0, 5, 10, 20])
def test_relative_measure_matches_interval_arithmetic(spans, g_span, j):
    E = union(*[interval(a, b) for a, b in spans])
    G = interval(*g_span)
    est = relative_measure(E, G, A, j, 1.0, DensityProbe(A, samples_per_level=100_000))
    exact = _exact_ratio(spans, g_span, j, 1.0)
    assert abs(est.ratio - exact) <= 3 * est.stderr + 1e-15


def test_relative_measure_trivial_cases():
    p = probe()
    assert relative_measure(ball(1.0), R, A, 3, 1.0, p).ratio == 1.0
    half = relative_measure(HALF, R, A, 7, 1.0, p)
    assert abs(half.ratio - 0.5) < 3 * half.stderr
    with pytest.raises(EmptyDenominator):
        relative_measure(R, empty(1), A, 0, 1.0, p)


@pytest.mark.parametrize("j", [0, 1, 2, 3])
def test_pull_back_matches_direct_sampling(j):
    E = union(interval(-0.4, -0.05), interval(0.2, 0.6))
    p = probe(samples_per_level=50_000)
    pulled = relative_measure(E, R, A, j, 1.0, p)
    # direct: sample the shrunken ball itself with an unrelated stream
    y = uniform_ball(50_000, 2.0**-j, 1, 999, (j,))
    q = float(np.mean(E.contains(y)))
    se = math.sqrt(q * (1 - q) / len(y))
    assert abs(pulled.ratio - q) <= 3 * math.hypot(pulled.stderr, se) + 1e-12


def test_density_trio():
    p = probe()
    punctured = complement(union(interval(0.0, 1e-300), interval(0.5, 0.5 + 1e-300)))
    assert is_density_point(punctured, R, A, p).verdict == Verdict.PASS
    assert is_density_point(HALF, R, A, p).verdict == Verdict.FAIL
    assert is_density_point(HALF, HALF, A, p).verdict == Verdict.PASS


def test_approx_continuity_trio():
    p = probe()
    haar = lookup("haar").spectral()
    a_star = adjoint(A)
    assert is_approx_continuity_point(haar, 1.0, R, a_star, p).verdict == Verdict.PASS
    step = lambda x: (x[:, 0] > 0).astype(float)
    res = is_approx_continuity_point(step, 1.0, R, a_star, p)
    assert res.verdict == Verdict.FAIL
    assert res.deepest_epsilon is None
    assert abs(res.trace[-1]["fractions"][0.1] - 0.5) < 0.02
    assert is_approx_continuity_point(step, 1.0, HALF, a_star, p).verdict == Verdict.PASS


def test_approx_continuity_inconclusive_at_finest_level():
    # |f - 1| >= eps on a fraction 1 - 2^j eps^(1/0.28) of A^-j B_1, which drops
    # below eps at j ~ 12, 24 and 36 for the three ladder levels; the last one
    # lands inside the terminal window [35, 40]
    f = lambda x: 1 - np.abs(x[:, 0]) ** 0.28
    res = is_approx_continuity_point(f, 1.0, R, A, probe(j_max=40))
    assert res.verdict == Verdict.INCONCLUSIVE
    assert res.deepest_epsilon == 1e-2
    assert res.j0[1e-3] is not None and res.j0[1e-3] > 35


def test_approx_continuity_trace_consistency():
    p = probe()
    res = is_approx_continuity_point(lookup("bspline:2").spectral(), 1.0, R, A, p)
    assert res.verdict == Verdict.PASS
    for eps in p.ladder:
        assert all(f < eps for f in res.failure_fractions(eps)[p.j_max - p.window :])


def test_locally_nonzero_trio():
    p = probe()
    a_star = adjoint(A)
    assert is_locally_nonzero(lookup("shannon").spectral(), R, a_star, p).verdict == Verdict.PASS
    hardy = lookup("hardy-shannon").spectral()
    assert is_locally_nonzero(hardy, R, a_star, p).verdict == Verdict.FAIL
    assert is_locally_nonzero(hardy, HALF, a_star, p).verdict == Verdict.PASS


def test_absorbing_ball_and_entry_level():
    p = probe(samples_per_level=5_000)
    res = is_absorbing(ball(1.0), R, A, p)
    assert res.verdict == Verdict.PASS
    pts = p.sample_box(R, None, (5,))
    mag = np.abs(pts[:, 0])
    expected = np.where(mag < 1, 0, np.floor(np.log2(mag)) + 1)
    np.testing.assert_array_equal(res.j0, expected)
    # agrees with ceil(log2|xi|)^+ away from exact powers of two
    np.testing.assert_array_equal(res.j0, np.maximum(0, np.ceil(np.log2(mag))))


def test_absorbing_halfline_and_haar_support():
    p = probe(samples_per_level=5_000)
    assert is_absorbing(HALF, R, A, p).verdict == Verdict.FAIL
    haar = lookup("haar").spectral()
    supp = complement(union(*[interval(k, k + 1e-300) for k in range(-9, 10) if k]))
    res = is_absorbing(supp, R, A, p)
    assert res.verdict == Verdict.PASS
    from spectralsi.regions import support_region

    assert is_absorbing(support_region(haar.evaluate, 1, "supp"), R, A, p).verdict == Verdict.PASS


def test_invariant_sets():
    p = probe()
    assert check_invariant_set(HALF, A, p).verdict == Verdict.PASS
    assert check_invariant_set(interval(-1, 1), A, p).verdict == Verdict.FAIL
    assert check_invariant_set(R, A, p).verdict == Verdict.PASS
    q = validate_expansive([[1, 1], [1, -1]])
    assert check_invariant_set(everything(2), q, DensityProbe(q, samples_per_level=5000)).verdict == Verdict.PASS


def test_subsequence_limit_examples():
    p = probe()
    a_star = adjoint(A)
    haar = lookup("haar").spectral()
    lim = subsequence_limit(haar, R, a_star, p, points=[3.7])
    assert abs(lim.tail[0] - 1.0) < 1e-6 and lim.converged[0]
    shannon = lookup("shannon").spectral()
    lim = subsequence_limit(shannon, R, a_star, p, points=[100.0])
    assert lim.tail[0] == 1.0
    hardy = lookup("hardy-shannon").spectral()
    lim = subsequence_limit(hardy, R, a_star, p, points=[-2.0])
    assert lim.tail[0] == 0.0


def test_monotone_sequences_are_flagged_converged():
    p = probe(samples_per_level=2000)
    # sigma from a refinable space: sequences along A*^-j are non-decreasing
    lim = subsequence_limit(lookup("bspline:3").spectral(), R, A, p)
    assert np.all(lim.monotone) and np.all(lim.converged)


def test_determinism():
    p = probe(samples_per_level=3000)
    a = is_approx_continuity_point(lookup("haar").spectral(), 1.0, R, A, p)
    b = is_approx_continuity_point(lookup("haar").spectral(), 1.0, R, A, p)
    assert a.trace == b.trace


@settings(max_examples=15)
@given(st.floats(0.01, 0.45), st.integers(0, 12))
def test_punctured_interval_ratio_property(delta, j):
    E = union(interval(-0.5, -delta), interval(delta, 0.5))
    est = relative_measure(E, R, A, j, 1.0, probe(samples_per_level=5000))
    exact = _exact_ratio([(-0.5, -delta), (delta, 0.5)], (-math.inf, math.inf), j, 1.0)
    assert abs(est.ratio - exact) <= 4 * est.stderr + 1e-12
