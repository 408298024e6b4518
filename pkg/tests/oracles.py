"""Independent reference implementations used by the test suite.

Everything here recomputes expected values through a different route than
the library (explicit summation, direct index arithmetic, DFT matrices)
so the tests compare two independently coded paths.
"""

import numpy as np


def cn(rng, shape):
    return np.sqrt(0.5) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def dft_matrix(n):
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def algebraic_data_cycle(params, code, z, channel, relay_noise, dest_noise):
    """Destination-side model y = amp X h + n assembled term by term."""
    m = code.conj_split
    h = np.array(
        [
            channel.f[i] * channel.g[i] if i < m else np.conj(channel.f[i]) * channel.g[i]
            for i in range(code.n_relays)
        ]
    )
    x = np.stack(
        [
            code.relay_mats[i] @ (z if i < m else np.conj(z))
            for i in range(code.n_relays)
        ],
        axis=1,
    )
    gain = np.sqrt(params.pi2 * params.p_data / (params.pi1 * params.p_data + 1.0))
    n = dest_noise.astype(complex).copy()
    for i in range(code.n_relays):
        v = relay_noise[i] if i < m else np.conj(relay_noise[i])
        n += gain * channel.g[i] * (code.relay_mats[i] @ v)
    return params.amp_data * (x @ h) + n


def delay_vectors(n_relays, cp_len, rng, extra=6):
    """Valid delay tuples: all-zero, all at the prefix bound, plus samples."""
    vecs = {(0,) * n_relays, tuple([0] + [cp_len] * (n_relays - 1))}
    for _ in range(extra):
        d = sorted(int(x) for x in rng.integers(0, cp_len + 1, size=n_relays))
        d[0] = 0
        vecs.add(tuple(d))
    return sorted(vecs)


def all_delay_vectors(n_relays, cp_len):
    """Every nondecreasing delay tuple starting at zero with max <= cp_len."""
    import itertools

    return [
        tuple([0] + sorted(tail))
        for tail in itertools.combinations_with_replacement(
            range(cp_len + 1), n_relays - 1
        )
    ]


def training_noise_oracle(params, ofdm, channel, relay_noise, dest_noise):
    """Per-subcarrier propagation of recorded training noise, spelled out
    with direct index arithmetic and an explicit DFT matrix."""
    n, l_cp = ofdm.n_subcarriers, ofdm.cp_len
    total = n + l_cp
    w_mat = dft_matrix(n)
    beta = params.relay_gain_train
    out = np.zeros((n, params.n_relays), complex)
    for j in range(params.n_relays):
        fwd = relay_noise[j]
        if j >= params.conj_split:
            src = np.conj(relay_noise[j])
            fwd = np.array(
                [src[l_cp] if i == 0 else src[total - i] for i in range(total)]
            )
        window = np.zeros(total, complex)
        tau = ofdm.delays[j]
        window[tau:] = beta * channel.g[j] * fwd[: total - tau]
        window += dest_noise[j]
        body = window[l_cp:]
        if j >= params.conj_split:
            body = np.array([body[(m - l_cp) % n] for m in range(n)])
        out[:, j] = w_mat @ body
    return out


def data_noise_oracle(params, code, ofdm, channel, relay_noise, dest_noise):
    """Recorded-noise propagation through the data chain."""
    n, l_cp = ofdm.n_subcarriers, ofdm.cp_len
    total = n + l_cp
    w_mat = dft_matrix(n)
    gain = np.sqrt(params.pi2 * params.p_data / (params.pi1 * params.p_data + 1.0))
    y = dest_noise.astype(complex).copy()  # (t2, total)
    for i in range(code.n_relays):
        sym = relay_noise[i]
        if i >= code.conj_split:
            src = np.conj(relay_noise[i])
            sym = np.stack(
                [src[:, (l_cp - m) % n + l_cp] for m in range(total)], axis=1
            )
        tx = gain * (code.relay_mats[i] @ sym)
        tau = ofdm.delays[i]
        shifted = np.zeros_like(tx)
        shifted[:, tau:] = tx[:, : total - tau]
        y += channel.g[i] * shifted
    return w_mat @ y[:, l_cp:].T  # (n, t2)


def snr_at_cer(points, target):
    """SNR where a sweep's curve crosses the target error rate
    (log-linear interpolation over points that saw errors)."""
    pts = [(p.snr_db, p.cer) for p in points if p.errors > 0]
    for (s1, c1), (s2, c2) in zip(pts, pts[1:]):
        if c1 >= target >= c2 and c2 > 0 and c1 != c2:
            return s1 + (np.log10(target) - np.log10(c1)) * (s2 - s1) / (
                np.log10(c2) - np.log10(c1)
            )
    return None
