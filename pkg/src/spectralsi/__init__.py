"""Spectral functions of shift-invariant spaces and completeness tests under integer dilations."""
from .dilation import DilationMatrix, adjoint, apply_power, digit_set, validate_expansive
from .genspace import (
    FourierFunction,
    GeneratorSystem,
    SpectralFunction,
    bracket_product,
    check_refinable,
    estimate_filter,
    normalize_generator,
    spectral_function,
)
from .geometry import DensityProbe, Verdict
from .regions import RegionSet, parse_region

__all__ = [
    "DilationMatrix",
    "DensityProbe",
    "FourierFunction",
    "GeneratorSystem",
    "RegionSet",
    "SpectralFunction",
    "Verdict",
    "adjoint",
    "apply_power",
    "bracket_product",
    "check_refinable",
    "digit_set",
    "estimate_filter",
    "normalize_generator",
    "parse_region",
    "spectral_function",
    "validate_expansive",
]

__version__ = "0.1.0"
