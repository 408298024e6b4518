"""Monte-Carlo experiment engine: SNR-to-power mapping, quasi-static block
simulation for the three decoding schemes, and error-rate sweeps with a
stopping rule.

Reproducibility: every block draws from its own generator seeded by
(sweep seed, SNR-point index, block index), and blocks are scheduled in
deterministic batches, so results are bit-identical for any worker count.
"""

from __future__ import annotations

import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .codebook import DEFAULT_ROTATION_DEG, RelayCode, codebook_arrays, make_alamouti, make_four_relay_ciod
from .numerics import whitening_factor
from .ofdm import OfdmParams, _ofdm_data_cycles_batch, estimate_channel_k, simulate_ofdm_training, subcarrier_channels
from .sync import (
    ProtocolParams,
    _data_cycles_batch,
    _decode_batch,
    equivalent_channel,
    equivalent_model,
    estimate_channel,
    sample_channel,
    simulate_training_cycle,
)

SCHEMES = ("trained", "coherent_csi", "trained_ml_genie_gamma")
MODES = ("sync", "ofdm")
CODE_IDS = ("alamouti2", "ciod4")
CONST_IDS = ("qam4", "qam16")


@dataclass(frozen=True)
class SweepSpec:
    """Full description of one sweep; plain values only so worker
    processes can rebuild everything from it."""

    scheme: str
    code_id: str
    const_id: str
    snr_dbs: tuple[float, ...]
    angle_deg: float = DEFAULT_ROTATION_DEG
    alpha: float = 0.0
    frames: int = 50
    min_errors: int = 100
    max_trials: int = 10**6
    seed: int = 0
    mode: str = "sync"
    n_subcarriers: int = 0
    cp_len: int = 0
    delays: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "snr_dbs", tuple(float(s) for s in self.snr_dbs))
        object.__setattr__(self, "delays", tuple(int(d) for d in self.delays))
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.code_id not in CODE_IDS:
            raise ValueError(f"unknown code {self.code_id!r}")
        if self.const_id not in CONST_IDS:
            raise ValueError(f"unknown constellation {self.const_id!r}")
        if not self.snr_dbs:
            raise ValueError("need at least one SNR point")
        if any(b <= a for a, b in zip(self.snr_dbs, self.snr_dbs[1:])):
            raise ValueError("SNR points must be strictly increasing")
        if self.min_errors < 1:
            raise ValueError("min_errors must be >= 1")
        if self.max_trials < self.min_errors:
            raise ValueError("max_trials must be >= min_errors")
        if self.frames < 1:
            raise ValueError("frames must be >= 1")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.mode == "ofdm":
            self.ofdm_params()  # validate eagerly

    def ofdm_params(self) -> OfdmParams:
        return OfdmParams(self.n_subcarriers, self.cp_len, self.delays)


@dataclass(frozen=True)
class PointResult:
    snr_db: float
    blocks: int
    decodes: int
    errors: int

    @property
    def cer(self) -> float:
        return self.errors / self.decodes if self.decodes else 0.0

    @property
    def ci95(self) -> float:
        if not self.decodes:
            return 0.0
        p = self.cer
        return 1.96 * np.sqrt(p * (1.0 - p) / self.decodes)


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    points: tuple[PointResult, ...]
    metadata: dict = field(default_factory=dict)


def total_power(
    p_train: float, p_data: float, n_relays: int, frames: int, t1: int, t2: int
) -> float:
    """Average power per channel use over a quasi-static block (a training
    cycle of R+1 uses plus ``frames`` cycles of t1+t2 uses)."""
    if min(p_train, p_data, n_relays, frames, t1, t2) <= 0:
        raise ValueError("all arguments must be positive")
    data_uses = frames * (t1 + t2)
    return (p_train * (n_relays + 1) + p_data * data_uses) / (
        n_relays + 1 + data_uses
    )


def solve_pd_for_snr(
    snr_db: float, n_relays: int, frames: int, t1: int, t2: int, alpha: float
) -> float:
    """Data-cycle power such that the block-average power (with the pilot
    boost ``p_train = (1+alpha) p_data``) hits the requested dB level."""
    p_total = 10.0 ** (snr_db / 10.0)
    data_uses = frames * (t1 + t2)
    return p_total * (n_relays + 1 + data_uses) / (
        (1.0 + alpha) * (n_relays + 1) + data_uses
    )


@functools.lru_cache(maxsize=8)
def build_code(code_id: str, const_id: str, angle_deg: float) -> RelayCode:
    qam_size = {"qam4": 4, "qam16": 16}[const_id]
    if code_id == "alamouti2":
        return make_alamouti(qam_size)
    if code_id == "ciod4":
        return make_four_relay_ciod(qam_size, angle_deg)
    raise ValueError(f"unknown code {code_id!r}")


def params_for_snr(spec: SweepSpec, snr_db: float) -> ProtocolParams:
    code = build_code(spec.code_id, spec.const_id, spec.angle_deg)
    if spec.scheme == "coherent_csi":
        # Reference curve: no training cycle, all power carries data.
        p_data = 10.0 ** (snr_db / 10.0)
        alpha = 0.0
    else:
        p_data = solve_pd_for_snr(
            snr_db, code.n_relays, spec.frames, code.t1, code.t2, spec.alpha
        )
        alpha = spec.alpha
    return ProtocolParams.for_code(code, p_data, frames=spec.frames, alpha=alpha)


def run_block(
    spec: SweepSpec,
    params: ProtocolParams,
    rng: np.random.Generator,
    noiseless: bool = False,
) -> tuple[int, int]:
    """Simulate one quasi-static block; returns (decoded, errors).

    Draw order is fixed (messages, then training noise, then data noise)
    so a block is a pure function of its generator state.
    """
    code = build_code(spec.code_id, spec.const_id, spec.angle_deg)
    z_all, _ = codebook_arrays(code)
    channel = sample_channel(code.n_relays, rng)
    if spec.mode == "sync":
        return _run_block_sync(spec, params, code, z_all, channel, rng, noiseless)
    return _run_block_ofdm(spec, params, code, z_all, channel, rng, noiseless)


def _zeros(shape: tuple) -> np.ndarray:
    return np.zeros(shape, dtype=np.complex128)


def _run_block_sync(spec, params, code, z_all, channel, rng, noiseless):
    f = params.frames
    msgs = rng.integers(0, code.codebook_size, size=f)
    whitener = None
    if spec.scheme == "coherent_csi":
        h_dec = equivalent_channel(channel, code.conj_split)
    else:
        obs = simulate_training_cycle(
            params, channel, rng,
            relay_noise=_zeros((params.n_relays,)) if noiseless else None,
            dest_noise=_zeros((params.n_relays,)) if noiseless else None,
        )
        h_dec = estimate_channel(params, obs)
        if spec.scheme == "trained_ml_genie_gamma":
            whitener = whitening_factor(equivalent_model(params, code, channel).gamma)
    y = _data_cycles_batch(
        params, code, z_all[msgs], channel, rng,
        relay_noise=_zeros((code.n_relays, f, code.t1)) if noiseless else None,
        dest_noise=_zeros((f, code.t2)) if noiseless else None,
    )
    decoded = _decode_batch(params, code, y, h_dec, whitener=whitener)
    return f, int(np.count_nonzero(decoded != msgs))


def _run_block_ofdm(spec, params, code, z_all, channel, rng, noiseless):
    f = params.frames
    ofdm = spec.ofdm_params()
    n = ofdm.n_subcarriers
    total = ofdm.symbol_len
    msgs = rng.integers(0, code.codebook_size, size=(f, n))
    whitener = None
    if spec.scheme == "coherent_csi":
        h_dec = subcarrier_channels(channel, code.conj_split, ofdm)
    else:
        obs = simulate_ofdm_training(
            params, ofdm, channel, rng,
            relay_noise=_zeros((params.n_relays, total)) if noiseless else None,
            dest_noise=_zeros((params.n_relays, total)) if noiseless else None,
        )
        h_dec = estimate_channel_k(params, obs)
        if spec.scheme == "trained_ml_genie_gamma":
            # Unit-modulus subcarrier phases leave the covariance equal on
            # every subcarrier, so one whitener serves all of them.
            whitener = whitening_factor(equivalent_model(params, code, channel).gamma)
    y = _ofdm_data_cycles_batch(
        params, code, ofdm, z_all[msgs], channel, rng,
        relay_noise=_zeros((code.n_relays, f, code.t1, total)) if noiseless else None,
        dest_noise=_zeros((f, code.t2, total)) if noiseless else None,
    )
    errors = 0
    for k in range(n):
        decoded = _decode_batch(params, code, y[:, k, :], h_dec[k], whitener=whitener)
        errors += int(np.count_nonzero(decoded != msgs[:, k]))
    return f * n, errors


def _block_rng(seed: int, point_idx: int, block_idx: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([int(seed), int(point_idx), int(block_idx)])
    )


def _run_chunk(
    spec: SweepSpec, point_idx: int, snr_db: float, start: int, count: int
) -> tuple[int, int]:
    params = params_for_snr(spec, snr_db)
    decodes = 0
    errors = 0
    for b in range(start, start + count):
        d, e = run_block(spec, params, _block_rng(spec.seed, point_idx, b))
        decodes += d
        errors += e
    return decodes, errors


_BATCH_START = 32
_BATCH_MAX = 4096


def run_sweep(
    spec: SweepSpec,
    workers: int = 1,
    progress: Callable[[int, float, int, int], None] | None = None,
) -> SweepResult:
    """Run every SNR point until ``min_errors`` codeword errors accumulate
    or ``max_trials`` blocks are spent, whichever comes first."""
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        points = []
        for p_idx, snr_db in enumerate(spec.snr_dbs):
            blocks = decodes = errors = 0
            batch = _BATCH_START
            while blocks < spec.max_trials and errors < spec.min_errors:
                batch = min(batch, spec.max_trials - blocks)
                for d, e in _run_batch(spec, p_idx, snr_db, blocks, batch, pool, workers):
                    decodes += d
                    errors += e
                blocks += batch
                batch = min(batch * 2, _BATCH_MAX)
                if progress is not None:
                    progress(p_idx, snr_db, blocks, errors)
            points.append(PointResult(snr_db, blocks, decodes, errors))
    finally:
        if pool is not None:
            pool.shutdown()
    metadata = {"version": __version__, "spec": asdict(spec)}
    return SweepResult(spec=spec, points=tuple(points), metadata=metadata)


def _run_batch(spec, point_idx, snr_db, start, count, pool, workers):
    if pool is None:
        return [_run_chunk(spec, point_idx, snr_db, start, count)]
    per = (count + workers - 1) // workers
    futures = []
    offset = start
    remaining = count
    while remaining > 0:
        chunk = min(per, remaining)
        futures.append(
            pool.submit(_run_chunk, spec, point_idx, snr_db, offset, chunk)
        )
        offset += chunk
        remaining -= chunk
    return [f.result() for f in futures]
