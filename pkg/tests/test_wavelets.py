from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import haar_wavelet_hat as haar_psi_oracle
from spectralsi.dilation import validate_expansive
from spectralsi.errors import NegativeSpectral
from spectralsi.genspace import SpectralFunction
from spectralsi.geometry import DensityProbe, Verdict
from spectralsi.registry import lookup
from spectralsi.wavelets import calderon_check, calderon_sum, semiorthogonality_check, sigma_from_core, wavelet_origin_test

A = validate_expansive([[2]])
K_EXACT = [(Fraction(-16, 7), Fraction(-2)), (Fraction(-1, 2), Fraction(-2, 7)), (Fraction(2, 7), Fraction(1, 2)), (Fraction(2), Fraction(16, 7))]


def probe(**kw):
    kw.setdefault("samples_per_level", 10_000)
    return DensityProbe(A, **kw)


def W(key):
    return lookup(key).system()


def _in_k(x: Fraction) -> bool:
    return any(a <= x <= b for a, b in K_EXACT)


def test_calderon_examples():
    assert calderon_sum(W("shannon-wavelet"), 0.3).value[0] == 1.0
    assert calderon_sum(W("journe"), 0.4).value[0] == 1.0
    # exact oracle: count dyadic dilates of 2/5 that land in K
    assert sum(_in_k(Fraction(2, 5) * Fraction(2) ** j) for j in range(-30, 31)) == 1
    bad = calderon_sum(W("shannon-wavelet-perturbed"), 0.03)
    assert bad.value[0] >= 2 - 1e-9
    assert not bad.ok[0]


def test_calderon_flags_boundary_samples():
    res = calderon_sum(W("shannon-wavelet"), [0.5, 0.25, 0.3])
    assert res.boundary.tolist() == [True, True, False]


@pytest.mark.parametrize("key, expected", [
    ("shannon-wavelet", Verdict.PASS),
    ("journe", Verdict.PASS),
    ("haar-wavelet", Verdict.PASS),
    ("shannon-wavelet-perturbed", Verdict.FAIL),
])
def test_calderon_check(key, expected):
    assert calderon_check(W(key), probe()).verdict == expected


def test_sigma_from_core_shannon_is_exact():
    sw = sigma_from_core(lookup("shannon").spectral())
    x = np.random.default_rng(0).uniform(-3, 3, 10_000)
    x = x[np.min(np.abs(np.abs(x)[:, None] - [0.5, 1.0]), axis=1) > 1e-9]
    expected = ((np.abs(x) >= 0.5) & (x < 1) & (x >= -1)).astype(float)
    expected[(x > -0.5) & (x < 0.5)] = 0.0
    np.testing.assert_array_equal(sw(x), expected)


def test_sigma_from_core_haar_matches_quadrature():
    sw = sigma_from_core(lookup("haar").spectral())
    xi = np.random.default_rng(1).uniform(-6, 6, 1000)
    oracle = np.array([abs(haar_psi_oracle(float(x))) ** 2 for x in xi])
    assert np.max(np.abs(sw(xi) - oracle)) < 1e-6
    assert sw(0.0) == 0.0


def test_sigma_from_core_invariant_indicator_vanishes():
    chi = SpectralFunction(lambda p: (p[:, 0] > 0).astype(float), A, "chi_G")
    x = np.linspace(-5, 5, 1001)
    assert np.all(sigma_from_core(chi)(x) == 0.0)


def test_negative_spectral():
    sw = sigma_from_core(lookup("box-1-2").spectral())
    with pytest.raises(NegativeSpectral):
        sw(np.linspace(1.1, 1.9, 9))


@pytest.mark.parametrize("core, wavelet", [("haar", "haar-wavelet"), ("shannon", "shannon-wavelet")])
def test_decomposition_consistency(core, wavelet):
    sw = sigma_from_core(lookup(core).spectral())
    w = W(wavelet)
    x = np.random.default_rng(2).uniform(-8, 8, 5000)
    x = x[np.min(np.abs(np.abs(x)[:, None] - [0.5, 1.0]), axis=1) > 1e-9]
    assert np.max(np.abs(sw(x) - w.sigma(x))) < 1e-6


CORES = {key: sigma_from_core(lookup(key).spectral()) for key in ("haar", "bspline:2", "shannon")}


@given(st.floats(-20, 20, allow_nan=False))
def test_sigma_from_core_nonnegative(x):
    for sw in CORES.values():
        assert sw(x) >= -1e-9


@pytest.mark.parametrize("key", ["shannon-wavelet", "haar-wavelet", "journe"])
def test_origin_theorem(key):
    assert wavelet_origin_test(W(key), probe()).verdict == Verdict.PASS


def test_origin_fails_with_mass_at_zero():
    assert wavelet_origin_test(W("shannon-wavelet-perturbed"), probe()).verdict == Verdict.FAIL


def test_haar_wavelet_vanishes_linearly_at_origin():
    for x in (1e-2, 1e-3, 1e-4):
        val = abs(W("haar-wavelet").psis[0](x))
        assert abs(val - abs(haar_psi_oracle(x))) < 1e-10
        assert val < 2 * x


def test_journe_semiorthogonality_oracle():
    # t_j = 0 a.e. iff K and 2^-j K overlap in a null set
    for j in range(1, 5):
        scale = Fraction(1, 2**j)
        overlap = sum(
            max(Fraction(0), min(b, d * scale) - max(a, c * scale)) for a, b in K_EXACT for c, d in K_EXACT
        )
        assert overlap == 0
    assert semiorthogonality_check(W("journe"), probe()).verdict == Verdict.PASS


@pytest.mark.parametrize("key, expected", [
    ("shannon-wavelet", Verdict.PASS),
    ("haar-wavelet", Verdict.PASS),
    ("shifted-indicator", Verdict.FAIL),
])
def test_semiorthogonality(key, expected):
    assert semiorthogonality_check(W(key), probe()).verdict == expected


def test_shifted_indicator_overlap_oracle():
    # chi_[1/2,3/2)(2 eta) chi_[1/2,3/2)(eta) is 1 on [1/2, 3/4)
    assert semiorthogonality_check(W("shifted-indicator"), probe()).score == 1.0


@pytest.mark.parametrize("key", ["shannon-wavelet", "haar-wavelet", "journe", "shannon-wavelet-perturbed", "shifted-indicator"])
def test_origin_theorem_as_invariant(key):
    w = W(key)
    p = probe(samples_per_level=5000)
    if (
        calderon_check(w, p).verdict == Verdict.PASS
        and semiorthogonality_check(w, p).verdict == Verdict.PASS
    ):
        assert wavelet_origin_test(w, p).verdict == Verdict.PASS
