"""Coin rotations, k-space translations and single-step unitaries.

All matrices act on the coin basis (H, V) = ((1, 0), (0, 1)) and are returned
as complex128 arrays. Rotations follow

    R_n(angle) = cos(angle) I + i sin(angle) (n1 s1 - n2 s2 - n3 s3)

with s1, s2, s3 the Pauli matrices, so axis 2 is the real y-rotation
[[c, -s], [s, c]] and axis 1 is [[c, i s], [i s, c]].

The translation at wavenumber k is diag(exp(ik), exp(-ik)).

Step operators are written as matrix products (rightmost factor acts first):

    HQW    U(k) = T(k) R2(theta)
    NCRQW  U(k) = T(k) R2(theta) R1(phi)
    SSQW   U(k) = T(k/2) R2(theta2) T(k/2) R2(theta1)

With these products the Pauli decomposition U = cos E - i sin E n.s matches the
closed-form dispersions and norm vectors in :mod:`zakwalk.bands` exactly.
The split-step walk shifts twice per step, so its lattice momentum is k/2 for
the momentum k used by the band formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .params import HQW, NCRQW, SSQW, ProtocolParams, wrap_angle

Axis = Literal[1, 2, 3]

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY = np.eye(2, dtype=np.complex128)

_AXES = {1: (1.0, 0.0, 0.0), 2: (0.0, 1.0, 0.0), 3: (0.0, 0.0, 1.0)}


@dataclass(frozen=True)
class RotationSpec:
    """Rotation about coordinate axis 1, 2 or 3 by ``angle`` radians."""

    axis: Axis
    angle: float

    def __post_init__(self) -> None:
        if self.axis not in _AXES:
            raise ValueError(f"axis must be 1, 2 or 3, got {self.axis!r}")
        object.__setattr__(self, "angle", wrap_angle(self.angle))


@dataclass(frozen=True)
class CoinState:
    """Coin amplitudes on H and V."""

    h: complex
    v: complex

    def as_array(self) -> NDArray[np.complex128]:
        return np.array([self.h, self.v], dtype=np.complex128)

    @property
    def norm(self) -> float:
        return float(np.sqrt(abs(self.h) ** 2 + abs(self.v) ** 2))


H = CoinState(1.0, 0.0)
V = CoinState(0.0, 1.0)


def rotation_matrix(spec: RotationSpec) -> NDArray[np.complex128]:
    """Return the 2x2 matrix of ``spec``."""
    n1, n2, n3 = _AXES[spec.axis]
    c, s = np.cos(spec.angle), np.sin(spec.angle)
    return np.array(
        [
            [c - 1j * n3 * s, (1j * n1 - n2) * s],
            [(1j * n1 + n2) * s, c + 1j * n3 * s],
        ],
        dtype=np.complex128,
    )


def ry(theta: float) -> NDArray[np.complex128]:
    return rotation_matrix(RotationSpec(2, theta))


def rx(phi: float) -> NDArray[np.complex128]:
    return rotation_matrix(RotationSpec(1, phi))


def translation(k: ArrayLike) -> NDArray[np.complex128]:
    """diag(exp(ik), exp(-ik)), broadcast over ``k`` (shape (..., 2, 2))."""
    k = np.asarray(k, dtype=float)
    out = np.zeros(k.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = np.exp(1j * k)
    out[..., 1, 1] = np.exp(-1j * k)
    return out


def coin_sequence(params: ProtocolParams) -> list[NDArray[np.complex128]]:
    """Coin matrices of one step, in the order they act.

    For the split-step walk a translation follows each coin; for the other two
    protocols one translation follows the whole sequence.
    """
    match params:
        case HQW(theta=theta):
            return [ry(theta)]
        case NCRQW(theta=theta, phi=phi):
            return [rx(phi), ry(theta)]
        case SSQW(theta1=t1, theta2=t2):
            return [ry(t1), ry(t2)]
    raise TypeError(f"not a protocol: {params!r}")


def momentum_step_unitary(params: ProtocolParams, k: ArrayLike) -> NDArray[np.complex128]:
    """Bloch-diagonal single-step unitary; vectorised over ``k``."""
    coins = coin_sequence(params)
    k = np.asarray(k, dtype=float)
    if isinstance(params, SSQW):
        half = translation(k / 2.0)
        return half @ coins[1] @ half @ coins[0]
    step = coins[0]
    for coin in coins[1:]:
        step = coin @ step
    return translation(k) @ step


def apply_coin(u: ArrayLike, state: CoinState) -> CoinState:
    h, v = np.asarray(u, dtype=np.complex128) @ state.as_array()
    return CoinState(complex(h), complex(v))


def is_unitary(u: ArrayLike, atol: float = 1e-12) -> bool:
    u = np.asarray(u, dtype=np.complex128)
    eye = np.broadcast_to(IDENTITY, u.shape)
    return bool(np.allclose(np.conj(np.swapaxes(u, -1, -2)) @ u, eye, rtol=0.0, atol=atol))
