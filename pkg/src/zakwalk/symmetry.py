"""Time-reversal breaking between the x- and y-walks.

The y-walk breaks TRS when its Bloch argument is the negative of the x-walk's.
For the split-step walk this is done physically by flipping theta1, which
negates n1; the argument then flips only while n2 keeps its sign, giving the
allowed region

    tan(theta2) / tan(theta1) > cos(k).

The inequality guarantees an unchanged sign of n2 for |k| <= pi/2 (the Zak
integration window). Outside that window it is necessary but not sufficient;
:func:`n2_sign_preserved` gives the exact test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DegenerateTheta1, WrongVariant
from .params import SSQW, ProtocolParams
from .zak import bloch_argument

BOUNDARY_TOL = 1e-12


def flip_theta1(params: ProtocolParams) -> SSQW:
    """Return the split-step parameters with theta1 negated."""
    if not isinstance(params, SSQW):
        raise WrongVariant(f"flip_theta1 needs SSQW parameters, got {params!r}")
    return replace(params, theta1=-params.theta1)


def _check_theta1(theta1: float) -> None:
    if abs(math.sin(theta1)) <= 1e-12:
        raise DegenerateTheta1(f"tan(theta1) = 0 at theta1={theta1!r}")


def trs_allowed(theta1: float, theta2: float, k: float) -> bool:
    """Strict form of the allowed-region inequality; the boundary is excluded."""
    _check_theta1(theta1)
    return math.tan(theta2) / math.tan(theta1) - math.cos(k) > BOUNDARY_TOL


def n2_sign_preserved(theta1: float, theta2: float, k: float) -> bool:
    """True when n2 has the same nonzero sign at theta1 and -theta1.

    Equivalent to (tan t2 / tan t1)^2 > cos^2 k.
    """
    s1, c1, s2, c2 = math.sin(theta1), math.cos(theta1), math.sin(theta2), math.cos(theta2)
    a = math.cos(k) * s1 * c2 + s2 * c1
    b = -math.cos(k) * s1 * c2 + s2 * c1
    return a * b > 0.0


@dataclass(frozen=True)
class TrsRegionMask:
    theta1: float
    theta2_axis: NDArray[np.float64]
    k_axis: NDArray[np.float64]
    allowed: NDArray[np.bool_]  # shape (len(theta2_axis), len(k_axis))

    @property
    def fraction(self) -> float:
        return float(self.allowed.mean())


def trs_region_mask(theta1: float, theta2_axis: ArrayLike, k_axis: ArrayLike) -> TrsRegionMask:
    """Evaluate :func:`trs_allowed` on every (theta2, k) cell."""
    _check_theta1(theta1)
    t2 = np.sort(np.asarray(theta2_axis, dtype=float))
    ks = np.sort(np.asarray(k_axis, dtype=float))
    if t2.size < 2 or ks.size < 2:
        raise ValueError("trs_region_mask needs at least 2 points per axis")
    allowed = np.array([[trs_allowed(theta1, float(a), float(k)) for k in ks] for a in t2], dtype=bool)
    return TrsRegionMask(float(theta1), t2, ks, allowed)


def flipped_argument(phi: float) -> float:
    return -phi


def flipped_argument_walk(params: ProtocolParams, k: float) -> float:
    """Bloch argument of the y-walk when TRS is broken: -phi(k)."""
    return flipped_argument(bloch_argument(params, k))
