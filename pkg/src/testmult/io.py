"""CSV and JSON outputs."""

from __future__ import annotations

import csv
import json
import os
import shutil
import tempfile
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .config import to_dict
from .simulation import EnsembleResult


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if hasattr(v, "item"):
        return _fmt(v.item())
    return str(v)


def write_csv(path: Path, rows: Sequence[Mapping[str, object]], columns: Sequence[str] | None = None) -> None:
    columns = list(columns or (rows[0].keys() if rows else []))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row.get(c)) for c in columns])


def write_columns(path: Path, columns: Mapping[str, Iterable]) -> None:
    names = list(columns)
    cols = [list(columns[n]) for n in names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for values in zip(*cols):
            w.writerow([_fmt(v) for v in values])


def _commit(tmp: Path, out_dir: Path) -> None:
    """Move finished files from ``tmp`` into ``out_dir`` so a failure leaves nothing partial."""
    out_dir.mkdir(parents=True, exist_ok=True)
    if not os.access(out_dir, os.W_OK):
        raise PermissionError(f"output directory {out_dir} is not writable")
    for f in sorted(tmp.iterdir()):
        shutil.move(str(f), out_dir / f.name)


def emit_outputs(result: EnsembleResult, out_dir: str | os.PathLike) -> list[Path]:
    """Per-replication CSVs, ``summary.csv`` bands, ``cumulative.csv`` and ``manifest.json``.

    Wall-clock time is excluded from the manifest so that reruns are byte-identical.
    """
    if not result.replications:
        raise ValueError("empty ensemble: nothing to write")
    out_dir = Path(out_dir)
    with tempfile.TemporaryDirectory(dir=out_dir.parent if out_dir.parent.exists() else None) as tmpname:
        tmp = Path(tmpname)
        for rep in result.replications:
            write_columns(tmp / f"replication_seed{rep.seed}.csv", rep.series)
        summary = result.summary()
        write_columns(tmp / "summary.csv", {c: summary[c].tolist() for c in summary.columns})
        cum = result.cumulative_frame()
        write_columns(tmp / "cumulative.csv", {c: cum[c].tolist() for c in cum.columns})
        manifest = result.manifest.to_dict()
        manifest.pop("wall_seconds", None)
        manifest["scenario"] = to_dict(result.scenario.config)
        (tmp / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        names = sorted(f.name for f in tmp.iterdir())
        _commit(tmp, out_dir)
    return [out_dir / n for n in names]


def emit_multiplier_outputs(curve, out_dir: str | os.PathLike, manifest: Mapping[str, object]) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [out_dir / "multipliers.csv", out_dir / "curve_summary.csv", out_dir / "manifest.json"]
    write_csv(paths[0], curve.long_rows())
    write_csv(paths[1], curve.summary_rows())
    paths[2].write_text(json.dumps(dict(manifest), indent=2, sort_keys=True) + "\n")
    return paths
