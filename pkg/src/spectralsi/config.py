"""Run configuration: a single YAML file with nested keys."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import yaml

from .criteria import QuadConfig
from .dilation import DilationMatrix, validate_expansive
from .geometry import DensityProbe


@dataclass(frozen=True)
class ProbeConfig:
    j_max: int | None = None  # None: dimension default of the dilation
    samples_per_level: int = 100_000
    epsilon: float = 1e-3
    window: int = 5
    box: float = 8.0
    radii: tuple[float, ...] = (0.5, 1.0, 2.0)
    ladder: tuple[float, ...] = (1e-1, 1e-2, 1e-3)
    convergence_tol: float = 1e-9
    sampler: str = "random"

    def build(self, dilation: DilationMatrix, seed: int) -> DensityProbe:
        kw = asdict(self)
        kw["j_max"] = dilation.j_max if self.j_max is None else self.j_max
        kw["radii"] = tuple(self.radii)
        kw["ladder"] = tuple(self.ladder)
        return DensityProbe(dilation, seed=seed, **kw)


@dataclass(frozen=True)
class WaveletConfig:
    j_range: int = 30
    calderon_tol: float = 1e-6
    calderon_samples: int = 4096
    j_small: int = 4
    semiorthogonality_samples: int = 256
    semiorthogonality_tol: float = 1e-9


@dataclass(frozen=True)
class OutputConfig:
    path: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.format not in ("json", "csv"):
            raise ValueError(f"output format must be json or csv, not {self.format!r}")


@dataclass(frozen=True)
class RunConfig:
    """Everything a run depends on; a run is reproducible from this and the seed.

    ``example`` is a registry key, or a mapping describing a custom gridded
    generator: ``{grid: PATH, kind: space|wavelet, claimed_tight_frame: bool}``.
    ``ground_truth`` overrides the registry label for the chosen ``G``.
    """

    example: str | dict
    dilation: tuple[tuple[int, ...], ...] | None = None
    G: str | None = None
    seed: int = 42
    ground_truth: bool | None = None
    probe: ProbeConfig = field(default_factory=ProbeConfig)
    quad: QuadConfig = field(default_factory=QuadConfig)
    wavelet: WaveletConfig = field(default_factory=WaveletConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["dilation"] = None if self.dilation is None else [list(r) for r in self.dilation]
        d["probe"]["radii"] = list(self.probe.radii)
        d["probe"]["ladder"] = list(self.probe.ladder)
        return d

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        data = dict(data)
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "example" not in data:
            raise ValueError("config needs an 'example'")
        sub = {"probe": ProbeConfig, "quad": QuadConfig, "wavelet": WaveletConfig, "output": OutputConfig}
        for key, typ in sub.items():
            if key in data and data[key] is not None:
                vals = dict(data[key])
                for name in ("radii", "ladder"):
                    if name in vals:
                        vals[name] = tuple(float(v) for v in vals[name])
                data[key] = typ(**vals)
            else:
                data.pop(key, None)
        if data.get("dilation") is not None:
            data["dilation"] = tuple(tuple(int(v) for v in row) for row in data["dilation"])
        return cls(**data)

    def dumps(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        return cls.from_dict(yaml.safe_load(text) or {})

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        return cls.loads(Path(path).read_text())

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    def config_hash(self) -> str:
        """sha256 of the canonical JSON form; the output location does not affect results and is left out."""
        data = self.to_dict()
        data["output"].pop("path")
        canon = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def with_overrides(self, **kw) -> "RunConfig":
        """Apply CLI-style overrides; ``None`` values are ignored."""
        probe_kw = {k: kw.pop(k) for k in ("j_max", "samples_per_level", "epsilon") if kw.get(k) is not None}
        kw.pop("j_max", None), kw.pop("samples_per_level", None), kw.pop("epsilon", None)
        out_kw = {k: kw.pop(k) for k in ("path", "format") if kw.get(k) is not None}
        kw.pop("path", None), kw.pop("format", None)
        cfg = replace(self, **{k: v for k, v in kw.items() if v is not None})
        if probe_kw:
            cfg = replace(cfg, probe=replace(cfg.probe, **probe_kw))
        if out_kw:
            cfg = replace(cfg, output=replace(cfg.output, **out_kw))
        return cfg

    def dilation_matrix(self, fallback: DilationMatrix | None = None) -> DilationMatrix:
        if self.dilation is not None:
            return validate_expansive(self.dilation)
        if fallback is None:
            raise ValueError("config needs a 'dilation' for custom examples")
        return fallback
