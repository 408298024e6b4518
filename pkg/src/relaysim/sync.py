"""Synchronous two-phase relaying protocol: per-relay physical chain,
equivalent destination-side model, pilot training cycle, linear channel
estimation and the exhaustive decoders.

Conventions: all fading gains are unit-variance complex Gaussian, frozen
for one quasi-static block (one training cycle plus ``frames`` data
cycles); every additive noise sample is CN(0, 1) and refreshes each slot.
Powers are linear and noise-normalized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import RelayCode, codebook_arrays
from .numerics import gaussian_cvec, whitening_factor


@dataclass(frozen=True)
class ProtocolParams:
    """Power/timing bookkeeping for one protocol configuration.

    ``pi1``/``pi2`` split the data-cycle power ``p_data`` between the
    source and the relays and must satisfy ``pi1 + pi2 * n_relays == 2``.
    The training cycle spends ``p_train = (1 + alpha) * p_data``.
    """

    n_relays: int
    conj_split: int
    t1: int
    t2: int
    frames: int
    pi1: float
    pi2: float
    p_data: float
    alpha: float = 0.0

    def __post_init__(self) -> None:
        if self.frames < 1:
            raise ValueError("frames must be >= 1")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.p_data <= 0:
            raise ValueError("p_data must be > 0")
        budget = self.pi1 + self.pi2 * self.n_relays
        if abs(budget - 2.0) > 1e-9:
            raise ValueError(
                f"power split must satisfy pi1 + pi2 * R == 2, got {budget}"
            )

    @classmethod
    def for_code(
        cls,
        code: RelayCode,
        p_data: float,
        frames: int = 50,
        alpha: float = 0.0,
        pi1: float = 1.0,
    ) -> "ProtocolParams":
        """Default split: pi1 = 1, pi2 = 1/R."""
        return cls(
            n_relays=code.n_relays,
            conj_split=code.conj_split,
            t1=code.t1,
            t2=code.t2,
            frames=frames,
            pi1=pi1,
            pi2=(2.0 - pi1) / code.n_relays,
            p_data=p_data,
            alpha=alpha,
        )

    @property
    def p_train(self) -> float:
        return (1.0 + self.alpha) * self.p_data

    @property
    def relay_gain_data(self) -> float:
        """Per-relay amplification applied during data cycles."""
        return np.sqrt(self.pi2 * self.p_data / (self.pi1 * self.p_data + 1.0))

    @property
    def amp_data(self) -> float:
        """Scale of the signal term in the equivalent data-cycle model."""
        return np.sqrt(
            self.pi1 * self.pi2 * self.p_data**2 / (self.pi1 * self.p_data + 1.0)
        )

    @property
    def relay_gain_train(self) -> float:
        """Per-relay amplification during training; each relay owns one of
        the R slots, hence the extra factor R in the power budget."""
        return np.sqrt(
            self.pi2 * self.p_train * self.n_relays / (self.pi1 * self.p_train + 1.0)
        )

    @property
    def amp_train(self) -> float:
        return np.sqrt(self.pi1 * self.p_train) * self.relay_gain_train

    @property
    def estimator_scale(self) -> float:
        """Linear-estimator coefficient mapping the training observation to
        the channel estimate (a real scalar)."""
        denom = (
            self.pi2 * self.p_train * self.n_relays
            + self.pi1 * self.pi2 * self.p_train**2 * self.n_relays
        ) / (self.pi1 * self.p_train + 1.0) + 1.0
        return self.amp_train / denom


@dataclass(frozen=True)
class ChannelRealization:
    """Fading gains for one quasi-static block: source->relay ``f`` and
    relay->destination ``g``, each of length ``n_relays``."""

    f: np.ndarray
    g: np.ndarray


@dataclass(frozen=True)
class EquivalentModel:
    """Destination-side algebraic model of a data cycle:
    ``y = amp_data * X h + n`` with noise covariance ``gamma``."""

    h: np.ndarray
    gamma: np.ndarray
    amp_data: float


@dataclass(frozen=True)
class TrainingObservation:
    """Stacked per-slot training observations at the destination."""

    y_hat: np.ndarray
    amp_train: float


def sample_channel(n_relays: int, rng: np.random.Generator) -> ChannelRealization:
    """Draw i.i.d. CN(0, 1) fading for every hop."""
    if n_relays < 1:
        raise ValueError("n_relays must be >= 1")
    return ChannelRealization(
        f=gaussian_cvec(n_relays, 1.0, rng),
        g=gaussian_cvec(n_relays, 1.0, rng),
    )


def equivalent_channel(channel: ChannelRealization, conj_split: int) -> np.ndarray:
    """Products ``f_i g_i``, conjugating ``f`` past the split."""
    h = channel.f * channel.g
    if conj_split < len(h):
        h = h.copy()
        h[conj_split:] = channel.f[conj_split:].conj() * channel.g[conj_split:]
    return h


def equivalent_model(
    params: ProtocolParams, code: RelayCode, channel: ChannelRealization
) -> EquivalentModel:
    """Equivalent channel, noise covariance and signal scale for one block."""
    h = equivalent_channel(channel, code.conj_split)
    c = params.pi2 * params.p_data / (params.pi1 * params.p_data + 1.0)
    gamma = np.eye(code.t2, dtype=np.complex128)
    for i in range(code.n_relays):
        b = code.relay_mats[i]
        gamma = gamma + c * np.abs(channel.g[i]) ** 2 * (b @ b.conj().T)
    return EquivalentModel(h=h, gamma=gamma, amp_data=params.amp_data)


def simulate_data_cycle_physical(
    params: ProtocolParams,
    code: RelayCode,
    z: np.ndarray,
    channel: ChannelRealization,
    rng: np.random.Generator | None = None,
    relay_noise: np.ndarray | None = None,
    dest_noise: np.ndarray | None = None,
) -> np.ndarray:
    """Run one data cycle through the per-relay physical chain.

    Relay ``i`` receives ``sqrt(pi1 p_data) f_i z + v_i``, applies its
    relay matrix to that vector (or to its conjugate, past the split)
    scaled by the AF gain, and the destination sums all relay
    transmissions plus its own noise.  ``relay_noise`` (R x t1) and
    ``dest_noise`` (t2) override the random draws; pass zeros for a
    noiseless run.
    """
    y = _data_cycles_batch(
        params, code, z[np.newaxis], channel,
        rng=rng,
        relay_noise=None if relay_noise is None else relay_noise[:, np.newaxis, :],
        dest_noise=None if dest_noise is None else dest_noise[np.newaxis, :],
    )
    return y[0]


def _data_cycles_batch(
    params: ProtocolParams,
    code: RelayCode,
    z_batch: np.ndarray,
    channel: ChannelRealization,
    rng: np.random.Generator | None = None,
    relay_noise: np.ndarray | None = None,
    dest_noise: np.ndarray | None = None,
) -> np.ndarray:
    """Vectorized physical chain over a batch of data cycles (one frozen
    channel).  ``relay_noise``: (R, batch, t1); ``dest_noise``: (batch, t2)."""
    n_cycles = z_batch.shape[0]
    if z_batch.shape[1] != code.t1:
        raise ValueError(
            f"z has length {z_batch.shape[1]}, code expects t1={code.t1}"
        )
    if channel.f.shape[0] != code.n_relays:
        raise ValueError("channel realization does not match relay count")
    if relay_noise is None:
        relay_noise = _cn_matrix(rng, (code.n_relays, n_cycles, code.t1))
    if dest_noise is None:
        dest_noise = _cn_matrix(rng, (n_cycles, code.t2))

    src_amp = np.sqrt(params.pi1 * params.p_data)
    y = dest_noise.astype(np.complex128, copy=True)
    for i in range(code.n_relays):
        r_i = src_amp * channel.f[i] * z_batch + relay_noise[i]
        if i >= code.conj_split:
            r_i = r_i.conj()
        t_i = params.relay_gain_data * (r_i @ code.relay_mats[i].T)
        y += channel.g[i] * t_i
    return y


def simulate_training_cycle(
    params: ProtocolParams,
    channel: ChannelRealization,
    rng: np.random.Generator | None = None,
    relay_noise: np.ndarray | None = None,
    dest_noise: np.ndarray | None = None,
) -> TrainingObservation:
    """Run the pilot cycle: the source sends the scalar 1, every relay
    amplifies and forwards its noisy copy (conjugated past the split) in
    its own slot, so observation ``i`` involves relay ``i`` only."""
    n = params.n_relays
    if relay_noise is None:
        relay_noise = gaussian_cvec(n, 1.0, rng)
    if dest_noise is None:
        dest_noise = gaussian_cvec(n, 1.0, rng)
    r_hat = np.sqrt(params.pi1 * params.p_train) * channel.f + relay_noise
    sent = r_hat.copy()
    sent[params.conj_split:] = sent[params.conj_split:].conj()
    y_hat = channel.g * params.relay_gain_train * sent + dest_noise
    return TrainingObservation(y_hat=y_hat, amp_train=params.amp_train)


def estimate_channel(params: ProtocolParams, obs: TrainingObservation) -> np.ndarray:
    """Linear estimate of the equivalent channel from the training
    observation (a fixed real scalar times the observation)."""
    if obs.y_hat.shape[0] != params.n_relays:
        raise ValueError("observation length does not match relay count")
    return params.estimator_scale * obs.y_hat


def shrinkage_factor(params: ProtocolParams) -> float:
    """Expected scale of the estimate relative to the true channel:
    conditioned on the fading, E[h_est] = shrinkage_factor * h."""
    return params.estimator_scale * params.amp_train


def decode_mismatched(
    params: ProtocolParams, code: RelayCode, y: np.ndarray, h_est: np.ndarray
) -> int:
    """Nearest-codeword decoding that ignores the noise covariance:
    argmin over the codebook of ``||y - amp_data X h_est||^2``.

    This is the decoder the trained scheme runs with the estimated
    channel; with unitary relay matrices and the true channel it makes
    the same decisions as :func:`decode_ml`.  Ties break toward the
    lowest message index.
    """
    return int(_decode_batch(params, code, y[np.newaxis], h_est)[0])


def decode_ml(
    params: ProtocolParams,
    code: RelayCode,
    y: np.ndarray,
    h: np.ndarray,
    gamma: np.ndarray,
) -> int:
    """Covariance-aware decoding: argmin of the whitened residual norm.

    Requires the true noise covariance, hence knowledge of the
    relay-to-destination gains; used as a genie reference.
    """
    w = whitening_factor(gamma)
    return int(_decode_batch(params, code, y[np.newaxis], h, whitener=w)[0])


def _decode_batch(
    params: ProtocolParams,
    code: RelayCode,
    y_batch: np.ndarray,
    h: np.ndarray,
    whitener: np.ndarray | None = None,
    chunk: int = 4096,
) -> np.ndarray:
    """Exhaustive decoding of a batch of received vectors that share one
    channel.  Returns message indices; codebook scanned in chunks to
    bound memory."""
    _, x_all = codebook_arrays(code)
    signal = params.amp_data * (x_all @ h)  # (size, t2)
    n = y_batch.shape[0]
    best_metric = np.full(n, np.inf)
    best_index = np.zeros(n, dtype=np.int64)
    for start in range(0, signal.shape[0], chunk):
        resid = y_batch[:, np.newaxis, :] - signal[np.newaxis, start:start + chunk, :]
        if whitener is not None:
            resid = resid @ whitener.T
        metric = np.sum(resid.real**2 + resid.imag**2, axis=2)
        idx = np.argmin(metric, axis=1)
        val = metric[np.arange(n), idx]
        better = val < best_metric
        best_metric[better] = val[better]
        best_index[better] = idx[better] + start
    return best_index


def _cn_matrix(rng: np.random.Generator | None, shape: tuple) -> np.ndarray:
    if rng is None:
        raise ValueError("rng is required when noise is not supplied")
    return np.sqrt(0.5) * (
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    )
