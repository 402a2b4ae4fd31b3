"""Built-in examples with closed-form Fourier transforms and ground-truth labels.

Ground truth is keyed by the canonical label of the reducing set ``G``
(``"all"`` for the whole space) and records whether the closure of the
dilates of V is all of ``H^2_G``.  It comes from closed-form analysis and is
never inferred from the criteria.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dilation import DilationMatrix
from .genspace import FourierFunction, GeneratorSystem, SpectralFunction, indicator_of_boxes, spectral_function
from .regions import RegionSet, parse_region, support_region
from .wavelets import WaveletSystem

DYADIC = DilationMatrix(((2,),))
QUINCUNX = DilationMatrix(((1, 1), (1, -1)))
JOURNE_K = ((-16 / 7, -2.0), (-0.5, -2 / 7), (2 / 7, 0.5), (2.0, 16 / 7))


@dataclass(frozen=True)
class Example:
    key: str
    kind: str  # "space" or "wavelet"
    dilation: DilationMatrix
    build: Callable[[], object] = field(repr=False)
    G: str = "all"
    ground_truth: dict[str, bool] = field(default_factory=dict)
    expected: dict[str, bool] = field(default_factory=dict)
    core: str | None = None
    refinable: bool = True
    description: str = ""

    @property
    def dim(self) -> int:
        return self.dilation.dim

    def system(self):
        return self.build()

    def region(self, expr: str | None = None) -> RegionSet:
        return parse_region(expr or self.G, self.dim, resolver)

    def truth_for(self, G: RegionSet) -> bool | None:
        return self.ground_truth.get(G.label)

    def spectral(self) -> SpectralFunction:
        """Spectral function of V (space examples) or of W(Psi) (wavelet examples)."""
        obj = self.build()
        if isinstance(obj, WaveletSystem):
            return SpectralFunction(obj.sigma, obj.dilation, self.key)
        if not obj.claimed_tight_frame:
            obj = obj.normalized()
        return spectral_function(obj)


# ---------------------------------------------------------------------------
# closed forms


def haar_hat() -> FourierFunction:
    def ev(p):
        x = p[:, 0]
        return np.exp(-1j * np.pi * x) * np.sinc(x)

    return FourierFunction(ev, 1, decay_hint=(1 / math.pi, 1.0), label="haar")


def bspline_hat(n: int) -> FourierFunction:
    if n < 1:
        raise ValueError("B-spline order must be at least 1")

    def ev(p):
        x = p[:, 0]
        return np.exp(-1j * np.pi * n * x) * np.sinc(x) ** n

    return FourierFunction(ev, 1, decay_hint=(math.pi**-n, float(n)), label=f"bspline:{n}")


def _open_closed(a: float, b: float, label: str) -> FourierFunction:
    """Indicator of ``(a, b]``."""
    return FourierFunction(
        lambda p: ((p[:, 0] > a) & (p[:, 0] <= b)).astype(complex), 1, support_box=((a,), (b,)), label=label
    )


def _closed_union(spans, label: str) -> FourierFunction:
    def ev(p):
        x = p[:, 0]
        out = np.zeros(len(x), bool)
        for a, b in spans:
            out |= (x >= a) & (x <= b)
        return out.astype(complex)

    lo = min(a for a, _ in spans)
    hi = max(b for _, b in spans)
    return FourierFunction(ev, 1, support_box=((lo,), (hi,)), label=label)


def haar_wavelet_hat() -> FourierFunction:
    """Transform of ``chi_[0,1/2) - chi_[1/2,1)``."""

    def ev(p):
        x = p[:, 0]
        return 1j * np.exp(-1j * np.pi * x) * np.sin(np.pi * x / 2) * np.sinc(x / 2)

    return FourierFunction(ev, 1, decay_hint=(2 / math.pi, 1.0), label="haar-wavelet")


def shannon_wavelet_hat() -> FourierFunction:
    return indicator_of_boxes([(-1.0, -0.5), (0.5, 1.0)], 1, "shannon-wavelet")


def perturbed_shannon_hat() -> FourierFunction:
    base = shannon_wavelet_hat()
    bump = indicator_of_boxes([(-0.05, 0.05)], 1)
    return FourierFunction(
        lambda p: base.evaluator(p) + bump.evaluator(p), 1, support_box=((-1.0,), (1.0,)), label="shannon-wavelet-perturbed"
    )


def _space(gens, a, tight, label):
    return lambda: GeneratorSystem(tuple(g() for g in gens), a, tight, label)


def _halfline_family(M: int, shifted: bool, label: str) -> GeneratorSystem:
    """Tight frame generators of the functions with transform supported in (0, M+1)."""
    if shifted:
        spans = [(0.0, 0.5)] + [(m + 0.5, m + 1.5) for m in range(M)] + [(M + 0.5, M + 1.0)]
    else:
        spans = [(float(m), m + 1.0) for m in range(M + 1)]
    gens = [_open_closed(a, b, f"({a:g}, {b:g}]") for a, b in spans]
    return GeneratorSystem(tuple(gens), DYADIC, True, label)


_HALF = "interval(0, inf)"

_FIXED: dict[str, Example] = {}


def _add(ex: Example) -> None:
    _FIXED[ex.key] = ex


_add(Example(
    "haar", "space", DYADIC, _space([haar_hat], DYADIC, True, "haar"),
    ground_truth={"all": True},
    description="Haar scaling function, |phi_hat|^2 = sinc^2",
))
_add(Example(
    "shannon", "space", DYADIC,
    _space([lambda: indicator_of_boxes([(-0.5, 0.5)], 1, "shannon")], DYADIC, True, "shannon"),
    ground_truth={"all": True},
    description="Shannon scaling function, indicator of [-1/2, 1/2)",
))
_add(Example(
    "shannon-narrow", "space", DYADIC,
    _space([lambda: indicator_of_boxes([(-0.25, 0.25)], 1, "shannon-narrow")], DYADIC, True, "shannon-narrow"),
    ground_truth={"all": True},
    description="zero-padded Shannon, indicator of [-1/4, 1/4)",
))
_add(Example(
    "hardy-shannon", "space", DYADIC,
    _space([lambda: _open_closed(0.0, 0.5, "hardy-shannon")], DYADIC, True, "hardy-shannon"),
    G=_HALF,
    ground_truth={_HALF: True, "all": False},
    description="indicator of (0, 1/2]; complete in the Hardy space, not in L^2",
))
_add(Example(
    "quincunx-shannon", "space", QUINCUNX,
    _space(
        [lambda: indicator_of_boxes([((-0.5, -0.5), (0.5, 0.5), (False, False))], 2, "quincunx-shannon")],
        QUINCUNX, True, "quincunx-shannon",
    ),
    ground_truth={"all": True},
    description="indicator of [-1/2, 1/2)^2 under the quincunx dilation",
))
_add(Example(
    "box-1-2", "space", DYADIC,
    _space([lambda: _closed_union([(1.0, 2.0)], "box-1-2")], DYADIC, True, "box-1-2"),
    refinable=False,
    description="indicator of [1, 2]; not refinable (negative control)",
))
_add(Example(
    "haar-wavelet", "wavelet", DYADIC,
    lambda: WaveletSystem((haar_wavelet_hat(),), DYADIC, parse_region("all"), True, "haar-wavelet"),
    expected={"calderon": True, "semiorthogonality": True, "origin": True},
    core="haar",
    description="Haar wavelet",
))
_add(Example(
    "shannon-wavelet", "wavelet", DYADIC,
    lambda: WaveletSystem((shannon_wavelet_hat(),), DYADIC, parse_region("all"), True, "shannon-wavelet"),
    expected={"calderon": True, "semiorthogonality": True, "origin": True},
    core="shannon",
    description="Shannon wavelet, indicator of [-1,-1/2) u [1/2,1)",
))
_add(Example(
    "journe", "wavelet", DYADIC,
    lambda: WaveletSystem((_closed_union(JOURNE_K, "journe"),), DYADIC, parse_region("all"), True, "journe"),
    expected={"calderon": True, "semiorthogonality": True, "origin": True},
    description="Journe wavelet set [-16/7,-2] u [-1/2,-2/7] u [2/7,1/2] u [2,16/7]",
))
_add(Example(
    "shannon-wavelet-perturbed", "wavelet", DYADIC,
    lambda: WaveletSystem((perturbed_shannon_hat(),), DYADIC, parse_region("all"), False, "shannon-wavelet-perturbed"),
    expected={"calderon": False, "semiorthogonality": False, "origin": False},
    description="Shannon wavelet plus the indicator of [-0.05, 0.05] (negative control)",
))
_add(Example(
    "shifted-indicator", "wavelet", DYADIC,
    lambda: WaveletSystem(
        (indicator_of_boxes([(0.5, 1.5)], 1, "shifted-indicator"),), DYADIC, parse_region("all"), False, "shifted-indicator"
    ),
    expected={"calderon": False, "semiorthogonality": False, "origin": True},
    description="indicator of [1/2, 3/2); fails shift orthogonality (negative control)",
))


def _parametric(key: str) -> Example | None:
    name, _, arg = key.partition(":")
    if not arg:
        return None
    n = int(arg)
    if name == "bspline":
        return Example(
            key, "space", DYADIC,
            lambda: GeneratorSystem((bspline_hat(n),), DYADIC, False, key),
            ground_truth={"all": True},
            description=f"cardinal B-spline of order {n}, normalized through its bracket",
        )
    if name in ("h2g", "h2g-alt"):
        shifted = name == "h2g-alt"
        return Example(
            key, "space", DYADIC,
            lambda: _halfline_family(n, shifted, key),
            G=_HALF,
            refinable=False,
            description=f"truncated tight frame family for the half line, radius {n}"
            + (" (half-shifted tiling)" if shifted else ""),
        )
    return None


def lookup(key: str) -> Example:
    if key in _FIXED:
        return _FIXED[key]
    try:
        ex = _parametric(key)
    except ValueError as exc:
        raise KeyError(f"bad parameter in {key!r}: {exc}") from None
    if ex is None:
        raise KeyError(f"unknown registry key {key!r}")
    return ex


def keys() -> list[str]:
    return list(_FIXED) + ["bspline:n", "h2g:M", "h2g-alt:M"]


def resolver(key: str) -> RegionSet:
    """``support(KEY)`` in region expressions."""
    ex = lookup(key)
    sigma = ex.spectral()
    return support_region(sigma.evaluate, ex.dim, f"support({key})")
