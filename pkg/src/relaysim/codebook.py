"""Distributed space-time block code designs.

A :class:`RelayCode` bundles the relay matrices, the conjugation split
(relays past the split process the conjugate of what they received), the
symbol alphabet and the mapping from message indices to transmit vectors
``z``.  Two designs ship with the package:

* ``alamouti2`` -- the 2-relay Alamouti construction;
* ``ciod4`` -- a 4-relay coordinate-interleaved design whose symbol pairs
  ride a rotated QAM constellation (default rotation 166.7078 degrees).

Transmit vectors are normalized so the expected energy of ``z`` over the
uniform codebook equals the first-phase duration ``t1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

DEFAULT_ROTATION_DEG = 166.7078
CODEBOOK_CAP = 2**20


class CodebookCapExceeded(RuntimeError):
    """Raised when exhaustive enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class Constellation:
    """Symbol alphabet with unit average energy."""

    name: str
    points: np.ndarray
    bits_per_symbol: int

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.complex128)
        object.__setattr__(self, "points", pts)
        if len(np.unique(pts)) != pts.size:
            raise ValueError("constellation points must be distinct")
        energy = float(np.mean(np.abs(pts) ** 2))
        if abs(energy - 1.0) > 1e-9:
            raise ValueError(f"average point energy must be 1, got {energy}")


@dataclass(frozen=True)
class Codeword:
    """One codebook entry: transmit vector, codeword matrix, message index."""

    z: np.ndarray
    x: np.ndarray
    message_index: int


@dataclass(frozen=True)
class RelayCode:
    """A DSTBC design realized by amplify-and-forward relays.

    ``relay_mats[i]`` is the ``t2 x t1`` linear transform relay ``i``
    applies; relays ``0..conj_split-1`` process their received vector,
    the rest its conjugate.  ``mapping`` selects how constituent symbols
    assemble into ``z`` ("direct": one symbol per entry; "pair_rotated":
    rotated-QAM coordinate pairs interleaved across real/imag parts).
    """

    name: str
    n_relays: int
    conj_split: int
    t1: int
    t2: int
    relay_mats: np.ndarray
    constellation: Constellation
    n_symbols: int
    mapping: str
    rotation_deg: float = 0.0
    unitary: bool = True
    pair_points: np.ndarray | None = field(default=None)

    def __post_init__(self) -> None:
        mats = np.asarray(self.relay_mats, dtype=np.complex128)
        object.__setattr__(self, "relay_mats", mats)
        if mats.shape != (self.n_relays, self.t2, self.t1):
            raise ValueError(
                f"expected {self.n_relays} relay matrices of shape "
                f"({self.t2}, {self.t1}), got {mats.shape}"
            )
        if not np.all(np.isfinite(mats.view(np.float64))):
            raise ValueError("relay matrices must have finite entries")
        if not 0 <= self.conj_split <= self.n_relays:
            raise ValueError("conjugation split must lie in [0, n_relays]")
        if self.unitary:
            eye = np.eye(self.t2)
            for i, b in enumerate(mats):
                if np.max(np.abs(b @ b.conj().T - eye)) > 1e-12:
                    raise ValueError(f"relay matrix {i} is not unitary")

    @property
    def codebook_size(self) -> int:
        return len(self.constellation.points) ** self.n_symbols

    @property
    def bits_per_codeword(self) -> int:
        return self.constellation.bits_per_symbol * self.n_symbols

    @property
    def cache_key(self) -> tuple:
        return (self.name, self.constellation.name, self.n_symbols,
                self.mapping, round(self.rotation_deg, 9))


def qam_constellation(size: int) -> Constellation:
    """Square QAM on the odd-integer grid, scaled to unit average energy.

    Point ``s`` has in-phase level ``levels[s % side]`` and quadrature
    level ``levels[s // side]`` with levels ascending.
    """
    if size not in (4, 16):
        raise ValueError(f"unsupported QAM size {size} (expected 4 or 16)")
    side = int(np.sqrt(size))
    levels = np.arange(-(side - 1), side, 2, dtype=np.float64)
    i_part, q_part = np.meshgrid(levels, levels, indexing="xy")
    pts = (i_part + 1j * q_part).reshape(-1)
    pts = pts / np.sqrt(np.mean(np.abs(pts) ** 2))
    return Constellation(f"qam{size}", pts, int(np.log2(size)))


def make_rotated_qam_mapper(qam_size: int, angle_deg: float) -> np.ndarray:
    """Rotated-QAM alphabet for the coordinate-pair mapping.

    Each point is a plane coordinate pair ``(re, im)`` rotated by
    ``angle_deg``; rotation preserves the unit average energy.
    """
    base = qam_constellation(qam_size)
    return base.points * np.exp(1j * np.deg2rad(angle_deg))


def make_alamouti(qam_size: int = 4) -> RelayCode:
    """Two-relay Alamouti design: X = [[z1, -z2*], [z2, z1*]]."""
    b1 = np.eye(2, dtype=np.complex128)
    b2 = np.array([[0.0, -1.0], [1.0, 0.0]], dtype=np.complex128)
    const = qam_constellation(qam_size)
    return RelayCode(
        name="alamouti2",
        n_relays=2,
        conj_split=1,
        t1=2,
        t2=2,
        relay_mats=np.stack([b1, b2]),
        constellation=const,
        n_symbols=2,
        mapping="direct",
    )


def make_four_relay_ciod(
    qam_size: int = 4, angle_deg: float = DEFAULT_ROTATION_DEG
) -> RelayCode:
    """Four-relay coordinate-interleaved design over rotated QAM.

    Codeword matrix (columns = relays, rows = second-phase slots)::

        [ z1   z2  -z3* -z4* ]
        [ z2   z1  -z4* -z3* ]
        [ z3   z4   z1*  z2* ]
        [ z4   z3   z2*  z1* ]

    Relay matrices are read off column by column: relays 1-2 act on the
    received vector, relays 3-4 on its conjugate.  The coordinate pairs
    {Re z1, Re z2}, {Re z3, Re z4}, {Im z1, Im z2}, {Im z3, Im z4} each
    carry one rotated-QAM point.
    """
    swap = np.array(
        [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
        dtype=np.complex128,
    )
    b3 = np.array(
        [[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]],
        dtype=np.complex128,
    )
    mats = np.stack([np.eye(4, dtype=np.complex128), swap, b3, b3 @ swap])
    const = qam_constellation(qam_size)
    return RelayCode(
        name="ciod4",
        n_relays=4,
        conj_split=2,
        t1=4,
        t2=4,
        relay_mats=mats,
        constellation=const,
        n_symbols=4,
        mapping="pair_rotated",
        rotation_deg=angle_deg,
        pair_points=make_rotated_qam_mapper(qam_size, angle_deg),
    )


def _symbol_digits(code: RelayCode, indices: np.ndarray) -> np.ndarray:
    """Message index -> per-symbol digits, least-significant symbol first."""
    m = len(code.constellation.points)
    digits = np.empty((indices.size, code.n_symbols), dtype=np.int64)
    rem = indices.astype(np.int64)
    for j in range(code.n_symbols):
        digits[:, j] = rem % m
        rem = rem // m
    return digits


def _z_from_digits(code: RelayCode, digits: np.ndarray) -> np.ndarray:
    if code.mapping == "direct":
        return code.constellation.points[digits]
    if code.mapping == "pair_rotated":
        q = code.pair_points[digits]  # (n, 4) rotated pair points
        z = np.empty((digits.shape[0], 4), dtype=np.complex128)
        z[:, 0] = q[:, 0].real + 1j * q[:, 2].real
        z[:, 1] = q[:, 0].imag + 1j * q[:, 2].imag
        z[:, 2] = q[:, 1].real + 1j * q[:, 3].real
        z[:, 3] = q[:, 1].imag + 1j * q[:, 3].imag
        return z
    raise ValueError(f"unknown mapping {code.mapping!r}")


def codeword_matrix(code: RelayCode, z: np.ndarray) -> np.ndarray:
    """Assemble the t2 x n_relays codeword matrix for one transmit vector."""
    return codeword_matrices(code, z[np.newaxis])[0]


def codeword_matrices(code: RelayCode, z_batch: np.ndarray) -> np.ndarray:
    """Column ``i`` is ``B_i z`` up to the conjugation split, ``B_i z*`` after."""
    m = code.conj_split
    plain = np.einsum("itk,ck->cti", code.relay_mats[:m], z_batch)
    conj = np.einsum("itk,ck->cti", code.relay_mats[m:], z_batch.conj())
    return np.concatenate([plain, conj], axis=2)


def encode(code: RelayCode, message_index: int) -> Codeword:
    """Deterministic bijection from message index to codeword."""
    if not 0 <= message_index < code.codebook_size:
        raise ValueError(
            f"message index {message_index} outside [0, {code.codebook_size})"
        )
    digits = _symbol_digits(code, np.array([message_index]))
    z = _z_from_digits(code, digits)[0]
    return Codeword(z=z, x=codeword_matrix(code, z), message_index=message_index)


_ARRAY_CACHE: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def codebook_arrays(
    code: RelayCode, cap: int = CODEBOOK_CAP
) -> tuple[np.ndarray, np.ndarray]:
    """All transmit vectors and codeword matrices, indexed by message.

    Returns ``(z_all, x_all)`` of shapes ``(size, t1)`` and
    ``(size, t2, n_relays)``.  Cached per design.
    """
    size = code.codebook_size
    if size > cap:
        raise CodebookCapExceeded(
            f"codebook size {size} exceeds enumeration cap {cap}"
        )
    key = code.cache_key
    if key not in _ARRAY_CACHE:
        digits = _symbol_digits(code, np.arange(size))
        z_all = _z_from_digits(code, digits)
        _ARRAY_CACHE[key] = (z_all, codeword_matrices(code, z_all))
    return _ARRAY_CACHE[key]


def enumerate_codebook(code: RelayCode, cap: int = CODEBOOK_CAP) -> Iterator[Codeword]:
    """Yield every codeword in message-index order."""
    z_all, x_all = codebook_arrays(code, cap=cap)
    for idx in range(code.codebook_size):
        yield Codeword(z=z_all[idx], x=x_all[idx], message_index=idx)
