"""Result-CSV parsing and curve geometry.

Each CSV produced by ``relaysim`` becomes one labeled curve.  Comment
lines starting with ``#`` (the embedded configuration echo) are skipped.
Gap measurements interpolate linearly in (snr_db, log10 cer) space, which
is how dB distances at a fixed error rate are read off semilog figures.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

REQUIRED_COLUMNS = (
    "scheme", "code", "constellation", "mode", "alpha",
    "snr_db", "blocks", "decodes", "errors", "cer", "ci95",
)


class SchemaError(ValueError):
    """A result file does not conform to the relaysim CSV schema."""


@dataclass
class Curve:
    label: str
    snr_db: np.ndarray
    cer: np.ndarray
    ci95: np.ndarray


@dataclass
class CurveSet:
    curves: list[Curve]

    def __len__(self) -> int:
        return len(self.curves)

    def __iter__(self):
        return iter(self.curves)


def _label_from_row(row: dict) -> str:
    label = f"{row['scheme']} {row['code']}/{row['constellation']}"
    if row["mode"] != "sync":
        label += f" {row['mode']}"
    if float(row["alpha"]) != 0.0:
        label += f" alpha={row['alpha']}"
    return label


def load_csv(path: str) -> Curve:
    """Parse one result file into a curve, sorted by SNR.

    Zero-error points cannot be placed on a log axis and are dropped.
    """
    with open(path, encoding="utf-8") as fh:
        body = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(body)
    columns = reader.fieldnames or []
    for needed in REQUIRED_COLUMNS:
        if needed not in columns:
            raise SchemaError(f"{path}: missing column {needed!r}")
    rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    points = sorted(
        (float(r["snr_db"]), float(r["cer"]), float(r["ci95"])) for r in rows
    )
    kept = [(s, c, w) for s, c, w in points if 0.0 < c <= 1.0]
    if not kept:
        raise SchemaError(f"{path}: no rows with a positive error rate")
    snr, cer, ci = (np.array(v) for v in zip(*kept))
    return Curve(label=_label_from_row(rows[0]), snr_db=snr, cer=cer, ci95=ci)


def load_csvs(paths: list[str]) -> CurveSet:
    """One curve per file, in the given order."""
    return CurveSet([load_csv(p) for p in paths])


def snr_at_cer(curve: Curve, target: float) -> float | None:
    """SNR at which the curve crosses ``target``, by log-linear
    interpolation between adjacent points; None when out of range."""
    if target <= 0:
        raise ValueError("target error rate must be positive")
    log_t = math.log10(target)
    for i in range(len(curve.snr_db) - 1):
        c1, c2 = curve.cer[i], curve.cer[i + 1]
        lo, hi = min(c1, c2), max(c1, c2)
        if lo <= target <= hi and c1 != c2:
            s1, s2 = curve.snr_db[i], curve.snr_db[i + 1]
            frac = (log_t - math.log10(c1)) / (math.log10(c2) - math.log10(c1))
            return float(s1 + frac * (s2 - s1))
    return None


def gap_db(reference: Curve, other: Curve, target: float) -> float | None:
    """How many dB to the right of ``reference`` the ``other`` curve
    crosses ``target``; None when either curve is out of range."""
    s_ref = snr_at_cer(reference, target)
    s_other = snr_at_cer(other, target)
    if s_ref is None or s_other is None:
        return None
    return s_other - s_ref
