"""OFDM extension of the relaying protocol for destinations that see a
different (integer-sample) timing offset from every relay.

Each relay transmission rides OFDM symbols with a cyclic prefix long
enough to absorb the largest offset; conjugating relays additionally
time-reverse their samples so that, after destination processing, every
subcarrier obeys the synchronous model with the equivalent channel picking
up a known per-relay phase ramp ``exp(-2i pi k tau_i / N)``.

Index conventions for the reversal: the public :func:`time_reverse` is
the plain modular reversal ``x[(L - n) mod L]``.  Inside the simulated
chains the relay-side reversal maps the single wrap-around sample
N-periodically (and, during data cycles, re-aligns the reversed body to
the prefix layout) so the per-subcarrier model is exact for every offset
up to and including the full prefix length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import RelayCode
from .numerics import dft, idft
from .sync import ChannelRealization, ProtocolParams, equivalent_channel


@dataclass(frozen=True)
class OfdmParams:
    """Subcarrier count, cyclic-prefix length and per-relay sample delays.

    Delays are relative to the earliest relay: the first is zero and the
    list is nondecreasing, capped by the prefix length.
    """

    n_subcarriers: int
    cp_len: int
    delays: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "delays", tuple(int(d) for d in self.delays))
        if self.n_subcarriers < 2:
            raise ValueError("need at least 2 subcarriers")
        if not 0 <= self.cp_len < self.n_subcarriers:
            raise ValueError("cyclic prefix must satisfy 0 <= cp_len < N")
        if not self.delays or self.delays[0] != 0:
            raise ValueError("first relay delay must be 0 (reference timing)")
        if any(b < a for a, b in zip(self.delays, self.delays[1:])):
            raise ValueError("delays must be nondecreasing")
        if max(self.delays) > self.cp_len:
            raise ValueError(
                f"max delay {max(self.delays)} exceeds cyclic prefix {self.cp_len}"
            )

    @property
    def symbol_len(self) -> int:
        return self.n_subcarriers + self.cp_len


def add_cp(x: np.ndarray, cp_len: int) -> np.ndarray:
    """Prepend the last ``cp_len`` samples (works on the last axis)."""
    n = x.shape[-1]
    if cp_len < 0 or cp_len >= n:
        raise ValueError(f"cyclic prefix length {cp_len} invalid for N={n}")
    if cp_len == 0:
        return x.copy()
    return np.concatenate([x[..., n - cp_len:], x], axis=-1)


def remove_cp(y: np.ndarray, cp_len: int) -> np.ndarray:
    """Drop the first ``cp_len`` samples (works on the last axis)."""
    n = y.shape[-1] - cp_len
    if cp_len < 0 or n <= cp_len:
        raise ValueError(f"cyclic prefix length {cp_len} invalid for input {y.shape[-1]}")
    return y[..., cp_len:].copy()


def time_reverse(x: np.ndarray) -> np.ndarray:
    """Modular time reversal: output ``n`` is input ``(L - n) mod L``."""
    return np.roll(x[..., ::-1], 1, axis=-1)


def _reversal_indices(n_sub: int, cp_len: int, cp_aligned: bool) -> np.ndarray:
    """Sample permutation a conjugating relay applies to its received
    OFDM symbol.

    Both variants reverse the underlying body and emit an exactly
    N-periodic symbol, so any destination window offset by at most
    ``cp_len`` captures a cyclic rotation of the reversed body.  The
    training chain uses the plain variant (body starts at sample 0; the
    destination rotates after prefix removal); data cycles use the
    prefix-aligned variant because there the destination processes all
    relays' superposition uniformly.
    """
    total = n_sub + cp_len
    out = np.arange(total)
    if cp_aligned:
        return (cp_len - out) % n_sub + cp_len
    idx = (total - out) % total
    idx[0] = cp_len  # wrap sample taken N-periodically, not L-periodically
    return idx


def _apply_delay(x: np.ndarray, tau: int) -> np.ndarray:
    """Shift along the last axis, zero-filling the first ``tau`` samples.
    (Samples pushed past the symbol end land in the next slot's discarded
    prefix region, so per-slot processing stays exact.)"""
    if tau == 0:
        return x
    out = np.zeros_like(x)
    out[..., tau:] = x[..., : x.shape[-1] - tau]
    return out


def subcarrier_channels(
    channel: ChannelRealization, conj_split: int, ofdm: OfdmParams
) -> np.ndarray:
    """Equivalent channel per subcarrier: row ``k`` is the synchronous
    equivalent channel with entry ``i`` rotated by ``exp(-2i pi k tau_i / N)``."""
    h = equivalent_channel(channel, conj_split)
    k = np.arange(ofdm.n_subcarriers)[:, np.newaxis]
    taus = np.asarray(ofdm.delays)[np.newaxis, :]
    return np.exp(-2j * np.pi * k * taus / ofdm.n_subcarriers) * h[np.newaxis, :]


def simulate_ofdm_training(
    params: ProtocolParams,
    ofdm: OfdmParams,
    channel: ChannelRealization,
    rng: np.random.Generator | None = None,
    relay_noise: np.ndarray | None = None,
    dest_noise: np.ndarray | None = None,
) -> np.ndarray:
    """Sample-level training cycle; returns per-subcarrier observations.

    The source sends one pilot OFDM symbol (all-ones in frequency).  Each
    relay amplifies and forwards its noisy copy in its own OFDM slot,
    conjugating-and-reversing past the split.  The destination removes
    the prefix per slot, rotates the reversed slots' bodies back by the
    prefix length, applies the DFT and regroups by subcarrier.

    Returns an ``(N, n_relays)`` array whose row ``k`` is the length-R
    training observation on subcarrier ``k``; ``relay_noise`` and
    ``dest_noise`` are ``(n_relays, N + cp_len)`` overrides.
    """
    n, l_cp, total = ofdm.n_subcarriers, ofdm.cp_len, ofdm.symbol_len
    r = params.n_relays
    if len(ofdm.delays) != r:
        raise ValueError("need one delay per relay")
    if relay_noise is None:
        relay_noise = _cn(rng, (r, total))
    if dest_noise is None:
        dest_noise = _cn(rng, (r, total))

    pilot = add_cp(idft(np.ones(n)), l_cp)
    rev_idx = _reversal_indices(n, l_cp, cp_aligned=False)

    obs = np.empty((n, r), dtype=np.complex128)
    for i in range(r):
        received = np.sqrt(params.pi1 * params.p_train) * channel.f[i] * pilot
        received = received + relay_noise[i]
        if i >= params.conj_split:
            received = received.conj()[rev_idx]
        sent = params.relay_gain_train * received
        window = channel.g[i] * _apply_delay(sent, ofdm.delays[i]) + dest_noise[i]
        body = remove_cp(window, l_cp) if l_cp else window.copy()
        if i >= params.conj_split and l_cp:
            body = np.roll(body, l_cp)  # last l_cp samples moved to the front
        obs[:, i] = dft(body)
    return obs


def estimate_channel_k(params: ProtocolParams, obs_k: np.ndarray) -> np.ndarray:
    """Per-subcarrier channel estimate; same linear coefficient as the
    synchronous estimator, applied row-wise."""
    return params.estimator_scale * obs_k


def simulate_ofdm_data(
    params: ProtocolParams,
    ofdm: OfdmParams,
    code: RelayCode,
    z_per_subcarrier: np.ndarray,
    channel: ChannelRealization,
    rng: np.random.Generator | None = None,
    relay_noise: np.ndarray | None = None,
    dest_noise: np.ndarray | None = None,
) -> np.ndarray:
    """Sample-level data cycle carrying one codeword per subcarrier.

    ``z_per_subcarrier`` is ``(N, t1)``.  Returns ``(N, t2)``: row ``k``
    obeys the synchronous data model with the subcarrier-``k`` equivalent
    channel.  Noise overrides: ``relay_noise`` ``(n_relays, t1, N+cp)``,
    ``dest_noise`` ``(t2, N+cp)``.
    """
    y = _ofdm_data_cycles_batch(
        params, code, ofdm, z_per_subcarrier[np.newaxis], channel,
        rng=rng,
        relay_noise=None if relay_noise is None else relay_noise[:, np.newaxis],
        dest_noise=None if dest_noise is None else dest_noise[np.newaxis],
    )
    return y[0]


def _ofdm_data_cycles_batch(
    params: ProtocolParams,
    code: RelayCode,
    ofdm: OfdmParams,
    z_batch: np.ndarray,
    channel: ChannelRealization,
    rng: np.random.Generator | None = None,
    relay_noise: np.ndarray | None = None,
    dest_noise: np.ndarray | None = None,
) -> np.ndarray:
    """Vectorized data cycles on one frozen channel.

    ``z_batch``: (cycles, N, t1).  First phase: t1 source OFDM symbols,
    symbol ``u`` carrying component ``u`` of every subcarrier's transmit
    vector.  Second phase: every relay sends t2 OFDM symbols obtained by
    combining its received symbols with its relay matrix (conjugating
    relays first conjugate and reverse each symbol, prefix-aligned).
    Returns (cycles, N, t2).
    """
    n, l_cp, total = ofdm.n_subcarriers, ofdm.cp_len, ofdm.symbol_len
    n_cycles = z_batch.shape[0]
    if z_batch.shape[1:] != (n, code.t1):
        raise ValueError(f"z batch must be (cycles, {n}, {code.t1})")
    if len(ofdm.delays) != code.n_relays:
        raise ValueError("need one delay per relay")
    if relay_noise is None:
        relay_noise = _cn(rng, (code.n_relays, n_cycles, code.t1, total))
    if dest_noise is None:
        dest_noise = _cn(rng, (n_cycles, code.t2, total))

    # Source phase: frequency-domain symbol u holds z[:, u] across subcarriers.
    freq = np.sqrt(params.pi1 * params.p_data) * np.swapaxes(z_batch, 1, 2)
    src = add_cp(idft(freq), l_cp)  # (cycles, t1, total)

    rev_idx = _reversal_indices(n, l_cp, cp_aligned=True)
    y = dest_noise.astype(np.complex128, copy=True)
    for i in range(code.n_relays):
        r_i = channel.f[i] * src + relay_noise[i]
        if i >= code.conj_split:
            r_i = r_i.conj()[..., rev_idx]
        t_i = params.relay_gain_data * np.einsum("tu,cul->ctl", code.relay_mats[i], r_i)
        y += channel.g[i] * _apply_delay(t_i, ofdm.delays[i])

    body = y[..., l_cp:]
    return np.swapaxes(dft(body), 1, 2)  # (cycles, N, t2)


def super_cycle_uses(n_relays: int, frames: int, ofdm: OfdmParams) -> int:
    """Channel uses consumed by one training cycle plus ``frames`` data
    cycles when every vector rides an OFDM symbol (t1 = t2 = R)."""
    return ((n_relays + 1) + frames * 2 * n_relays) * ofdm.symbol_len


def _cn(rng: np.random.Generator | None, shape: tuple) -> np.ndarray:
    if rng is None:
        raise ValueError("rng is required when noise is not supplied")
    return np.sqrt(0.5) * (
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    )
