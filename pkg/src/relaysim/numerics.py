"""Complex linear-algebra and sampling primitives shared by the protocol
simulators.

Vectors and matrices are plain ``numpy.ndarray`` objects with dtype
``complex128``.  The DFT pair uses the symmetric ``1/sqrt(N)`` convention,
chosen so that conjugation/time-reversal identities used by the OFDM
processing hold exactly (see ``relaysim.ofdm``).
"""

from __future__ import annotations

import numpy as np


def gaussian_cvec(n: int, variance: float, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` i.i.d. circularly-symmetric complex Gaussian samples.

    Each entry has zero mean and total variance ``variance`` (split evenly
    between real and imaginary parts).
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    if variance <= 0:
        raise ValueError(f"variance must be > 0, got {variance}")
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


def mat_vec(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Complex matrix-vector product with an explicit dimension check."""
    a = np.asarray(a)
    x = np.asarray(x)
    if a.ndim != 2 or x.ndim != 1 or a.shape[1] != x.shape[0]:
        raise ValueError(
            f"dimension mismatch: matrix {a.shape} applied to vector {x.shape}"
        )
    return a @ x


def whitening_factor(gamma: np.ndarray) -> np.ndarray:
    """Return a matrix ``W`` such that ``||W v||^2 == v^H gamma^{-1} v``.

    ``gamma`` must be Hermitian positive definite.  The factor is computed
    as the inverse of the lower Cholesky factor; any factor with the same
    quadratic form would serve, because decoders only use the squared norm.
    """
    gamma = np.asarray(gamma, dtype=np.complex128)
    lower = np.linalg.cholesky(gamma)  # raises LinAlgError if not PD
    return np.linalg.inv(lower)


def whiten(gamma: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Whiten ``v`` against the noise covariance ``gamma``."""
    v = np.asarray(v, dtype=np.complex128)
    if gamma.shape[0] != v.shape[0]:
        raise ValueError(
            f"covariance is {gamma.shape} but vector has length {v.shape[0]}"
        )
    return whitening_factor(gamma) @ v


def dft(x: np.ndarray) -> np.ndarray:
    """Unitary DFT: ``X_k = 1/sqrt(N) * sum_n x_n exp(-2i pi k n / N)``."""
    x = np.asarray(x)
    return np.fft.fft(x, axis=-1) / np.sqrt(x.shape[-1])


def idft(x: np.ndarray) -> np.ndarray:
    """Unitary inverse DFT; exact inverse of :func:`dft`."""
    x = np.asarray(x)
    return np.fft.ifft(x, axis=-1) * np.sqrt(x.shape[-1])
