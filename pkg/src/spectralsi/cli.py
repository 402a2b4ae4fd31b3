"""Command line entry point.

Subcommands: ``dilation``, ``spectral``, ``criteria``, ``wavelet`` and
``registry list``.  Exit codes: 0 success or expected outcome, 1 mismatch or
failure, 2 hypothesis violated, 3 inconclusive.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import registry
from .config import RunConfig
from .criteria import Consensus, run_suite
from .dilation import digit_set, validate_expansive
from .errors import HypothesisViolated, SpectralError
from .genspace import GeneratorSystem, load_grid
from .geometry import Verdict
from .regions import parse_region
from .report import dumps, envelope, suite_payload, write_grid, write_rows, write_suite_csv
from .wavelets import WaveletSystem, calderon_check, semiorthogonality_check, wavelet_origin_test

EXIT_OK, EXIT_MISMATCH, EXIT_HYPOTHESIS, EXIT_INCONCLUSIVE = 0, 1, 2, 3


def _load_config(target: str) -> RunConfig:
    """A YAML path, or a bare registry key for a default configuration."""
    p = Path(target)
    if p.suffix in (".yaml", ".yml", ".json") or p.is_file():
        return RunConfig.load(p)
    registry.lookup(target)
    return RunConfig(example=target)


def _config_from_args(args) -> RunConfig:
    cfg = _load_config(args.config)
    return cfg.with_overrides(
        seed=args.seed,
        j_max=args.jmax,
        samples_per_level=args.samples,
        epsilon=args.epsilon,
        path=args.out,
        format=args.format,
    )


def resolve_example(cfg: RunConfig) -> registry.Example:
    if isinstance(cfg.example, str):
        ex = registry.lookup(cfg.example)
        if cfg.dilation is None:
            return ex
        a = cfg.dilation_matrix()
        if a.dim != ex.dim:
            raise ValueError(f"dilation dimension {a.dim} does not match {ex.key}")
        return replace(ex, dilation=a, build=lambda: replace(ex.build(), dilation=a))
    spec = dict(cfg.example)
    a = cfg.dilation_matrix()
    f = load_grid(spec["grid"])
    kind = spec.get("kind", "space")
    G = cfg.G or "all"
    if kind == "wavelet":
        build = lambda: WaveletSystem((f,), a, parse_region(G, a.dim, registry.resolver), True, f.label)
    else:
        build = lambda: GeneratorSystem((f,), a, bool(spec.get("claimed_tight_frame", False)), f.label)
    return registry.Example(f.label, kind, a, build, G, dict(spec.get("ground_truth", {})))


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------


def cmd_dilation(args) -> int:
    try:
        a = validate_expansive(json.loads(args.matrix))
    except (SpectralError, json.JSONDecodeError) as exc:
        print(f"rejected: {exc}")
        return EXIT_MISMATCH
    digits = digit_set(a)
    print("accepted: expansive")
    print(f"d_A = {a.det_abs}")
    print(f"digits = {[list(r) for r in digits]}")
    print(f"eigenvalue moduli = {[round(float(m), 12) for m in a.eigenvalue_moduli()]}")
    return EXIT_OK


def cmd_spectral(args) -> int:
    cfg = _config_from_args(args)
    ex = resolve_example(cfg)
    if ex.dim > 2:
        print("spectral tabulation supports d <= 2 only", file=sys.stderr)
        return EXIT_MISMATCH
    step = args.step if args.step is not None else (1e-3 if ex.dim == 1 else 2e-2)
    n = int(round((args.hi - args.lo) / step)) + 1
    axis = args.lo + step * np.arange(n)
    axes = [axis] * ex.dim
    sigma = ex.spectral()
    mesh = np.stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")], axis=1)
    values = sigma.evaluate(mesh)
    out = Path(cfg.output.path or f"{ex.key.replace(':', '_')}_sigma.csv")
    script = write_grid(out, axes, values, f"sigma for {ex.key}")
    print(f"wrote {len(values)} rows to {out} and plotting script {script}")
    return EXIT_OK


def _suite_exit(result) -> int:
    decisive = [r for r in result.reports if r.verdict != Verdict.INCONCLUSIVE]
    if result.consensus == Consensus.SPLIT:
        return EXIT_INCONCLUSIVE if not decisive else EXIT_MISMATCH
    if result.matches_ground_truth is False:
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_criteria(args) -> int:
    cfg = _config_from_args(args)
    ex = resolve_example(cfg)
    if ex.kind != "space":
        print(f"{ex.key} is a wavelet example; use the 'wavelet' subcommand", file=sys.stderr)
        return EXIT_MISMATCH
    G = ex.region(cfg.G)
    truth = cfg.ground_truth if cfg.ground_truth is not None else ex.truth_for(G)
    probe = cfg.probe.build(ex.dilation, cfg.seed)
    base = {"example": ex.key, "G": G.label, "dilation": ex.dilation.tolist()}
    try:
        result = run_suite(ex.system(), G, probe, cfg.quad, truth)
    except HypothesisViolated as exc:
        report = envelope(
            {**base, "hypothesis_violated": str(exc), "exit_code": EXIT_HYPOTHESIS},
            seed=cfg.seed, config_hash=cfg.config_hash(), deterministic=args.deterministic,
        )
        _emit(dumps(report), cfg.output.path if cfg.output.format == "json" else None)
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    code = _suite_exit(result)
    payload = {**suite_payload(result, ex.key, G.label, ex.dilation.tolist()), "exit_code": code}
    report = envelope(payload, seed=cfg.seed, config_hash=cfg.config_hash(), deterministic=args.deterministic)
    if cfg.output.format == "csv":
        out = Path(cfg.output.path or f"{ex.key.replace(':', '_')}_criteria.csv")
        for p in write_suite_csv(result, out):
            print(f"wrote {p}", file=sys.stderr)
        out.with_suffix(".json").write_text(dumps(report))
    else:
        _emit(dumps(report), cfg.output.path)
    print(f"{ex.key} on {G.label}: consensus {result.consensus}, ground truth {truth}, exit {code}", file=sys.stderr)
    return code


def cmd_wavelet(args) -> int:
    cfg = _config_from_args(args)
    ex = resolve_example(cfg)
    if ex.kind != "wavelet":
        print(f"{ex.key} is not a wavelet example", file=sys.stderr)
        return EXIT_MISMATCH
    W = ex.system()
    if cfg.G is not None:
        W = replace(W, G=ex.region(cfg.G))
    probe = cfg.probe.build(ex.dilation, cfg.seed)
    wc = cfg.wavelet
    cal = calderon_check(W, probe, wc.j_range, wc.calderon_tol, wc.calderon_samples)
    semi = semiorthogonality_check(W, probe, wc.j_small, samples=wc.semiorthogonality_samples, tol=wc.semiorthogonality_tol)
    origin = wavelet_origin_test(W, probe)
    checks = {
        "calderon": {"verdict": cal.verdict, "score": cal.score, "tolerance": cal.tolerance, "details": cal.details},
        "semiorthogonality": {"verdict": semi.verdict, "score": semi.score, "tolerance": semi.tolerance, "details": semi.details},
        "origin": {
            "verdict": origin.verdict,
            "per_alpha": [
                {"verdict": r.verdict, "score": r.score, "deepest_epsilon": r.deepest_epsilon} for r in origin.per_alpha
            ],
        },
    }
    mismatch, inconclusive = False, False
    for name, chk in checks.items():
        v = chk["verdict"]
        if v == Verdict.INCONCLUSIVE:
            inconclusive = True
            continue
        want = ex.expected.get(name, True)
        chk["expected"] = want if name in ex.expected else None
        mismatch |= (v == Verdict.PASS) != want
    code = EXIT_MISMATCH if mismatch else EXIT_INCONCLUSIVE if inconclusive else EXIT_OK
    payload = {"example": ex.key, "G": W.G.label, "dilation": ex.dilation.tolist(), "checks": checks, "exit_code": code}
    report = envelope(payload, seed=cfg.seed, config_hash=cfg.config_hash(), deterministic=args.deterministic)
    if cfg.output.format == "csv":
        out = Path(cfg.output.path or f"{ex.key}_wavelet.csv")
        write_rows(out, [{"check": k, "verdict": c["verdict"], "score": c.get("score")} for k, c in checks.items()])
        out.with_suffix(".json").write_text(dumps(report))
    else:
        _emit(dumps(report), cfg.output.path)
    return code


def cmd_registry(args) -> int:
    for key in registry.keys():
        if key.endswith((":n", ":M")):
            print(f"{key:28s} parametric")
            continue
        ex = registry.lookup(key)
        truth = ", ".join(f"{g}: {'complete' if v else 'incomplete'}" for g, v in ex.ground_truth.items())
        print(f"{key:28s} {ex.kind:8s} d={ex.dim}  {ex.description}" + (f"  [{truth}]" if truth else ""))
    return EXIT_OK


# ---------------------------------------------------------------------------


def _run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("config", help="YAML run configuration, or a registry key")
    p.add_argument("--seed", type=int)
    p.add_argument("--jmax", type=int)
    p.add_argument("--samples", type=int, help="samples per level")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--deterministic", action="store_true", help="omit timestamps from reports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spectralsi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dilation", help="validate an integer dilation and list its digit set")
    p.add_argument("matrix", help="row-major JSON, e.g. '[[1,1],[1,-1]]'")
    p.set_defaults(func=cmd_dilation)

    p = sub.add_parser("spectral", help="tabulate sigma on a grid (CSV plus plotting script)")
    _run_flags(p)
    p.add_argument("--lo", type=float, default=-4.0)
    p.add_argument("--hi", type=float, default=4.0)
    p.add_argument("--step", type=float)
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("criteria", help="run the completeness criteria suite")
    _run_flags(p)
    p.set_defaults(func=cmd_criteria)

    p = sub.add_parser("wavelet", help="Calderon, semiorthogonality and origin checks")
    _run_flags(p)
    p.set_defaults(func=cmd_wavelet)

    p = sub.add_parser("registry", help="registered examples")
    p.add_argument("action", choices=("list",))
    p.set_defaults(func=cmd_registry)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HypothesisViolated as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (SpectralError, KeyError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
