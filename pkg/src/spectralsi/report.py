"""JSON reports, CSV traces and plot-data emission."""
from __future__ import annotations

import csv
import datetime as _dt
import enum
import json
import math
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from . import __version__
from .criteria import SuiteResult


def clean(obj: Any) -> Any:
    """Recursively turn a report payload into strict-JSON data with string keys."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    return obj


def envelope(payload: dict, *, seed: int, config_hash: str, deterministic: bool) -> dict:
    out = {"version": __version__, "seed": seed, "config_hash": config_hash, **payload}
    if not deterministic:
        out["created"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return clean(out)


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def suite_payload(result: SuiteResult, example: str, G: str, dilation: list) -> dict:
    return {
        "example": example,
        "G": G,
        "dilation": dilation,
        "consensus": result.consensus,
        "ground_truth": result.ground_truth,
        "matches_ground_truth": result.matches_ground_truth,
        "criteria": [r.summary() for r in result.reports],
    }


def write_rows(path: Path, rows: Iterable[dict]) -> None:
    rows = list(rows)
    names: list[str] = []
    for r in rows:
        names += [k for k in r if k not in names]
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=names, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(clean(r))


def write_suite_csv(result: SuiteResult, path: Path) -> list[Path]:
    """One summary CSV plus one trace CSV per criterion next to it."""
    path = Path(path)
    write_rows(
        path,
        [
            {"criterion_id": r.criterion_id, "verdict": r.verdict, "score": r.score, "tolerance": r.tolerance}
            for r in result.reports
        ],
    )
    written = [path]
    for r in result.reports:
        if r.series:
            p = path.with_name(f"{path.stem}.{r.criterion_id}.csv")
            write_rows(p, r.series)
            written.append(p)
    return written


PLOT_SCRIPT = '''"""Plot {csv_name}. Generated file; requires matplotlib."""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

with open("{csv_name}", newline="") as fh:
    rows = list(csv.reader(fh))
head, data = rows[0], np.array(rows[1:], dtype=float)
fig, ax = plt.subplots(figsize=(7, 4))
if len(head) == 2:
    ax.plot(data[:, 0], data[:, 1], lw=1)
    ax.set_xlabel(head[0])
    ax.set_ylabel(head[1])
else:
    xs, ys = np.unique(data[:, 0]), np.unique(data[:, 1])
    z = data[:, 2].reshape(len(xs), len(ys))
    im = ax.imshow(z.T, origin="lower", extent=(xs[0], xs[-1], ys[0], ys[-1]), aspect="auto")
    fig.colorbar(im, ax=ax)
    ax.set_xlabel(head[0])
    ax.set_ylabel(head[1])
ax.set_title("{title}")
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "{png_name}", dpi=120)
'''


def write_grid(path: Path, axes: list[np.ndarray], values: np.ndarray, title: str) -> Path:
    """Write ``(xi..., sigma)`` rows and a matching plotting script; returns the script path."""
    path = Path(path)
    dim = len(axes)
    names = ["xi"] if dim == 1 else [f"xi{i + 1}" for i in range(dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    cols = [m.ravel() for m in mesh] + [np.asarray(values).ravel()]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names + ["sigma"])
        for row in zip(*cols):
            w.writerow([f"{v:.12g}" for v in row])
    script = path.with_suffix(".plot.py")
    script.write_text(PLOT_SCRIPT.format(csv_name=path.name, png_name=path.with_suffix(".png").name, title=title))
    return script
