"""CSV time series and JSON run manifests, written byte-for-byte reproducibly."""
from __future__ import annotations

import hashlib
import json
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .dynamics import TimeSeries

MANIFEST_SUFFIX = ".manifest.json"


def _fmt(x: float) -> str:
    # repr is the shortest string that round-trips to the same double
    if math.isnan(x):
        return "nan"
    return repr(float(x))


def write_timeseries(series: TimeSeries, path, index: str = "t", manifest: bool = True) -> Path:
    """CSV with ``index`` first then the diagnostics in declaration order, LF endings.

    Unless ``manifest`` is False a sibling ``<name>.manifest.json`` records the digest.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = series.names
    lines = [",".join([index] + names)]
    cols = [series[n] for n in names]
    for i, t in enumerate(series.t):
        lines.append(",".join([_fmt(t)] + [_fmt(c[i]) for c in cols]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    if manifest:
        write_manifest(RunManifest(files=[path.name]), path.with_name(path.name + MANIFEST_SUFFIX))
    return path


def read_timeseries(path) -> TimeSeries:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        s = TimeSeries()
        for line in fh:
            vals = [float(v) for v in line.rstrip("\n").split(",")]
            s.append(vals[0], dict(zip(header[1:], vals[1:])))
    if not s.t:
        s.columns = {n: [] for n in header[1:]}
    return s


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


@dataclass
class RunManifest:
    """What ran and what it produced.

    Wall times stay None unless requested, so that re-running a config gives a
    byte-identical manifest.
    """

    files: list = field(default_factory=list)
    config: str = ""
    version: str = __version__
    seed: Optional[int] = None
    grid: dict = field(default_factory=dict)
    stepper: dict = field(default_factory=dict)
    summary: str = ""
    passed: Optional[bool] = None
    flags: dict = field(default_factory=dict)
    numbers: dict = field(default_factory=dict)
    start_time: Optional[str] = None
    end_time: Optional[str] = None


def _stamp() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def write_manifest(m: RunManifest, path) -> Path:
    path = Path(path)
    root = path.parent
    digests = {name: sha256(root / name) for name in m.files}
    body = {
        "version": m.version,
        "config": m.config,
        "seed": m.seed,
        "grid": m.grid,
        "stepper": m.stepper,
        "summary": m.summary,
        "passed": m.passed,
        "flags": m.flags,
        "numbers": {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in m.numbers.items()},
        "files": [{"name": n, "sha256": digests[n]} for n in m.files],
        "start_time": m.start_time,
        "end_time": m.end_time,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(body, indent=2, sort_keys=True) + "\n")
    return path


def read_manifest(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def verify_manifest(path) -> bool:
    """True when every listed file exists and matches its digest."""
    path = Path(path)
    m = read_manifest(path)
    for entry in m["files"]:
        f = path.parent / entry["name"]
        if not f.exists() or sha256(f) != entry["sha256"]:
            return False
    return True


def default_out_dir() -> Path:
    return Path(os.environ.get("ZVL_OUT_DIR", "zvl_out"))
