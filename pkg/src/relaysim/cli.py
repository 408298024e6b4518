"""Command-line front end: one error-rate sweep per invocation, results
written as CSV (optionally mirrored to JSON with full metadata).

Exit codes: 0 on success, 1 on usage/configuration errors, 2 on runtime
or I/O failures.  The resolved configuration is echoed into every output
file so runs can be replayed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, fields

from . import __version__
from .codebook import DEFAULT_ROTATION_DEG
from .montecarlo import SweepSpec, SweepResult, run_sweep

CSV_HEADER = "scheme,code,constellation,mode,alpha,snr_db,blocks,decodes,errors,cer,ci95"


class UsageError(Exception):
    """Bad flags, bad config file, or invariant violations."""


@dataclass
class RunConfig:
    code: str = "alamouti2"
    const: str = "qam4"
    angle: float = DEFAULT_ROTATION_DEG
    scheme: str = "trained"
    snr: str = ""
    alpha: float = 0.0
    frames: int = 50
    min_errors: int = 100
    max_trials: int = 10**6
    seed: int = 0
    mode: str = "sync"
    subcarriers: int = 64
    cp: int = 8
    delays: str = "0"
    out: str = "results.csv"
    format: str = "csv"
    workers: int = 1


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit(2)
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="relaysim", description=__doc__, add_help=True)
    p.add_argument("--code", choices=("alamouti2", "ciod4"))
    p.add_argument("--const", choices=("qam4", "qam16"))
    p.add_argument("--angle", type=float, help="rotation (degrees) for the ciod4 pairs")
    p.add_argument("--scheme", choices=("trained", "coherent_csi", "trained_ml_genie_gamma"))
    p.add_argument("--snr", help="dB points: start:stop:step or comma list")
    p.add_argument("--alpha", type=float, help="pilot power boost factor")
    p.add_argument("--frames", type=int, help="data cycles per quasi-static block")
    p.add_argument("--min-errors", dest="min_errors", type=int)
    p.add_argument("--max-trials", dest="max_trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=("sync", "ofdm"))
    p.add_argument("--subcarriers", type=int)
    p.add_argument("--cp", type=int, help="cyclic prefix length (samples)")
    p.add_argument("--delays", help="per-relay sample delays, comma separated")
    p.add_argument("--out", help="output file path")
    p.add_argument("--format", choices=("csv", "json", "both"))
    p.add_argument("--workers", type=int)
    p.add_argument("--config", help="key=value config file; flags take precedence")
    return p


def parse_snr_points(text: str) -> tuple[float, ...]:
    """Parse `start:stop:step` (inclusive) or a comma list of dB values."""
    text = text.strip()
    if not text:
        raise UsageError("no SNR points given (use --snr)")
    try:
        if ":" in text:
            parts = [float(tok) for tok in text.split(":")]
            if len(parts) != 3:
                raise ValueError
            start, stop, step = parts
            if step <= 0 or stop < start:
                raise ValueError
            count = int(round((stop - start) / step)) + 1
            pts = [start + i * step for i in range(count) if start + i * step <= stop + 1e-9]
            return tuple(pts)
        return tuple(float(tok) for tok in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse SNR list {text!r}") from None


def _parse_delays(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in str(text).split(","))
    except ValueError:
        raise UsageError(f"cannot parse delay list {text!r}") from None


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key = value")
                key, _, value = line.partition("=")
                key = key.strip().replace("-", "_")
                if key == "config" or key not in _FIELD_TYPES:
                    raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    return values


def _coerce(key: str, value):
    if isinstance(value, str):
        kind = _FIELD_TYPES[key]
        try:
            if kind == "int":
                return int(value)
            if kind == "float":
                return float(value)
        except ValueError:
            raise UsageError(f"bad value for {key}: {value!r}") from None
    return value


def parse_config(argv: list[str] | None = None) -> RunConfig:
    """Resolve flags, config file, environment and defaults (in that order)."""
    args = _build_parser().parse_args(argv)
    file_values = _read_config_file(args.config) if args.config else {}
    cfg = RunConfig()
    for name in _FIELD_TYPES:
        cli_value = getattr(args, name, None)
        if cli_value is not None:
            setattr(cfg, name, _coerce(name, cli_value))
        elif name in file_values:
            setattr(cfg, name, _coerce(name, file_values[name]))
    if args.seed is None and "seed" not in file_values:
        env_seed = os.environ.get("RELAYSIM_SEED")
        if env_seed is not None:
            cfg.seed = _coerce("seed", env_seed)
    if not cfg.snr:
        raise UsageError("no SNR points given (use --snr)")
    return cfg


def spec_from_config(cfg: RunConfig) -> SweepSpec:
    try:
        return SweepSpec(
            scheme=cfg.scheme,
            code_id=cfg.code,
            const_id=cfg.const,
            snr_dbs=parse_snr_points(cfg.snr),
            angle_deg=cfg.angle,
            alpha=cfg.alpha,
            frames=cfg.frames,
            min_errors=cfg.min_errors,
            max_trials=cfg.max_trials,
            seed=cfg.seed,
            mode=cfg.mode,
            n_subcarriers=cfg.subcarriers if cfg.mode == "ofdm" else 0,
            cp_len=cfg.cp if cfg.mode == "ofdm" else 0,
            delays=_parse_delays(cfg.delays) if cfg.mode == "ofdm" else (),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _config_echo(cfg: RunConfig) -> list[str]:
    lines = [f"# relaysim {__version__}"]
    for f in fields(RunConfig):
        lines.append(f"# {f.name} = {getattr(cfg, f.name)}")
    return lines


def format_rows(cfg: RunConfig, result: SweepResult) -> list[str]:
    rows = []
    for pt in result.points:
        rows.append(
            f"{cfg.scheme},{cfg.code},{cfg.const},{cfg.mode},{cfg.alpha:g},"
            f"{pt.snr_db:g},{pt.blocks},{pt.decodes},{pt.errors},"
            f"{pt.cer:.6e},{pt.ci95:.6e}"
        )
    return rows


def emit_results(result: SweepResult, cfg: RunConfig, path: str, fmt: str) -> list[str]:
    """Write the sweep to disk; returns the paths written."""
    written = []
    if fmt in ("csv", "both"):
        lines = _config_echo(cfg) + [CSV_HEADER] + format_rows(cfg, result)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        written.append(path)
    if fmt in ("json", "both"):
        json_path = path if fmt == "json" else _with_suffix(path, ".json")
        payload = {
            "version": __version__,
            "config": {f.name: getattr(cfg, f.name) for f in fields(RunConfig)},
            "results": [
                {
                    "snr_db": pt.snr_db,
                    "blocks": pt.blocks,
                    "decodes": pt.decodes,
                    "errors": pt.errors,
                    "cer": pt.cer,
                    "ci95": pt.ci95,
                }
                for pt in result.points
            ],
        }
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        written.append(json_path)
    return written


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
        spec = spec_from_config(cfg)
    except UsageError as exc:
        print(f"relaysim: error: {exc}", file=sys.stderr)
        return 1

    last = {"point": -1, "stamp": 0.0}

    def progress(point_idx: int, snr_db: float, blocks: int, errors: int) -> None:
        # one line every few seconds per point, to keep long points quiet
        now = time.monotonic()
        if point_idx == last["point"] and now - last["stamp"] < 3.0:
            return
        last.update(point=point_idx, stamp=now)
        print(
            f"relaysim: point {point_idx + 1}/{len(spec.snr_dbs)} "
            f"({snr_db:g} dB): {blocks} blocks, {errors} errors",
            file=sys.stderr,
        )

    try:
        result = run_sweep(spec, workers=max(1, cfg.workers), progress=progress)
        written = emit_results(result, cfg, cfg.out, cfg.format)
    except OSError as exc:
        print(f"relaysim: i/o error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(f"relaysim: wrote {path}", file=sys.stderr)
    return 0


def _with_suffix(path: str, suffix: str) -> str:
    root, _ = os.path.splitext(path)
    return root + suffix


if __name__ == "__main__":
    sys.exit(main())
