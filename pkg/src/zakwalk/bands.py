"""Closed-form quasi-energy bands, Pauli norm vectors and gap closures.

For every protocol the single-step unitary decomposes as

    U(k) = cos E(k) I - i sin E(k) n(k).s

with E in [0, pi]. The band formulas are

    HQW    cos E = cos k cos t
    NCRQW  cos E = cos k cos t cos p + sin k sin t sin p
    SSQW   cos E = cos k cos t1 cos t2 - sin t1 sin t2

and each is of the form ``A cos k + B sin k + C``, which the gap-closure
search uses for its analytic slope.

The ``*_arrays`` helpers take protocol names and broadcastable angle arrays so
that parameter sweeps can be evaluated without Python loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InternalError, SingularPoint
from .params import HQW, NCRQW, SSQW, ProtocolParams

#: sin E at or below this marks a gap closure everywhere in the package.
SINGULAR_THRESHOLD = 1e-9
CLAMP_TOLERANCE = 1e-12

GapEdge = Literal["E0", "Epi"]


def _angle_pair(params: ProtocolParams) -> tuple[str, float, float]:
    match params:
        case HQW(theta=t):
            return "hqw", t, 0.0
        case NCRQW(theta=t, phi=p):
            return "ncrqw", t, p
        case SSQW(theta1=t1, theta2=t2):
            return "ssqw", t1, t2
    raise TypeError(f"not a protocol: {params!r}")


def band_coefficients(protocol: str, p1: ArrayLike, p2: ArrayLike = 0.0):
    """(A, B, C) with cos E = A cos k + B sin k + C."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if protocol == "hqw":
        return np.cos(p1), np.zeros_like(p1), np.zeros_like(p1)
    if protocol == "ncrqw":
        return np.cos(p1) * np.cos(p2), np.sin(p1) * np.sin(p2), np.zeros(np.broadcast(p1, p2).shape)
    if protocol == "ssqw":
        return np.cos(p1) * np.cos(p2), np.zeros(np.broadcast(p1, p2).shape), -np.sin(p1) * np.sin(p2)
    raise ValueError(f"unknown protocol {protocol!r}")


def cos_energy_arrays(protocol: str, p1: ArrayLike, p2: ArrayLike, k: ArrayLike) -> NDArray[np.float64]:
    a, b, c = band_coefficients(protocol, p1, p2)
    k = np.asarray(k, dtype=float)
    return a * np.cos(k) + b * np.sin(k) + c


def norm_numerators_arrays(protocol: str, p1: ArrayLike, p2: ArrayLike, k: ArrayLike) -> NDArray[np.float64]:
    """sin E * n, stacked on a trailing axis of length 3."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    k = np.asarray(k, dtype=float)
    ck, sk = np.cos(k), np.sin(k)
    if protocol == "hqw":
        st, ct = np.sin(p1), np.cos(p1)
        comps = (sk * st, ck * st, -sk * ct)
    elif protocol == "ncrqw":
        a, b, c, d = angular_functions(p1, p2)
        comps = (-ck * a + sk * b, ck * b + sk * a, -sk * d + ck * c)
    elif protocol == "ssqw":
        s1, c1, s2, c2 = np.sin(p1), np.cos(p1), np.sin(p2), np.cos(p2)
        comps = (sk * s1 * c2, ck * s1 * c2 + s2 * c1, -sk * c1 * c2)
    else:
        raise ValueError(f"unknown protocol {protocol!r}")
    return np.stack(np.broadcast_arrays(*comps), axis=-1)


def angular_functions(theta: ArrayLike, phi: ArrayLike):
    """(a, b, c, d) = (sin p cos t, cos p sin t, sin p sin t, cos p cos t)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st, ct, sp, cp = np.sin(theta), np.cos(theta), np.sin(phi), np.cos(phi)
    return sp * ct, cp * st, sp * st, cp * ct


def _energy_from_cos(cos_e: NDArray[np.float64]) -> NDArray[np.float64]:
    excess = np.abs(cos_e) - 1.0
    if np.any(excess > CLAMP_TOLERANCE):
        worst = float(np.max(excess))
        raise InternalError(f"|cos E| exceeds 1 by {worst:.3e}")
    return np.arccos(np.clip(cos_e, -1.0, 1.0))


def dispersion(params: ProtocolParams, k: ArrayLike):
    """Quasi-energy E(k) in [0, pi]; the two bands are +E and -E.

    E is the arccos of the closed-form cos E. It is evaluated as
    atan2(|sin E n|, cos E) for full precision near E = 0 and E = pi.

    Returns a float for scalar ``k`` and an array otherwise.
    """
    protocol, p1, p2 = _angle_pair(params)
    energy = dispersion_arrays(protocol, p1, p2, k)
    return float(energy) if energy.ndim == 0 else energy


def _energy_and_sin(protocol: str, p1: ArrayLike, p2: ArrayLike, k: ArrayLike):
    # sin E = |sin E n| is taken from the numerators, so E stays accurate at
    # the band edges where arccos loses half the digits
    cos_e = cos_energy_arrays(protocol, p1, p2, k)
    _energy_from_cos(cos_e)
    num = norm_numerators_arrays(protocol, p1, p2, k)
    sin_e = np.linalg.norm(num, axis=-1)
    return np.arctan2(sin_e, cos_e), sin_e, num


def dispersion_arrays(protocol: str, p1: ArrayLike, p2: ArrayLike, k: ArrayLike) -> NDArray[np.float64]:
    return _energy_and_sin(protocol, p1, p2, k)[0]


@dataclass(frozen=True)
class NormVector:
    n1: float
    n2: float
    n3: float
    k: float
    E: float

    def as_array(self) -> NDArray[np.float64]:
        return np.array([self.n1, self.n2, self.n3])


def norm_vectors_arrays(protocol: str, p1: ArrayLike, p2: ArrayLike, k: ArrayLike):
    """Unit norm vectors and sin E for broadcast inputs.

    Entries with sin E at or below :data:`SINGULAR_THRESHOLD` are returned as
    NaN; callers decide whether that is an error.
    """
    _, sin_e, num = _energy_and_sin(protocol, p1, p2, k)
    ok = sin_e > SINGULAR_THRESHOLD
    safe = np.where(ok, sin_e, 1.0)
    n = num / safe[..., None]
    n[~ok] = np.nan
    return n, sin_e


def norm_vector(params: ProtocolParams, k: float) -> NormVector:
    """Pauli norm vector n(k) of the step unitary.

    Raises
    ------
    SingularPoint
        If sin E(k) <= 1e-9, where the decomposition has no direction.
    """
    protocol, p1, p2 = _angle_pair(params)
    energy, sin_e, num = _energy_and_sin(protocol, p1, p2, k)
    sin_e = float(sin_e)
    if not sin_e > SINGULAR_THRESHOLD:
        raise SingularPoint(f"gap closed at k={k!r} for {params!r} (sin E = {sin_e:.3e})")
    n1, n2, n3 = num / sin_e
    return NormVector(float(n1), float(n2), float(n3), float(k), float(energy))


def dispersion_surface(family: Sequence[ProtocolParams], k: ArrayLike) -> NDArray[np.float64]:
    """Row-major grid of E: one row per parameter set, one column per k."""
    k = np.asarray(k, dtype=float)
    if len(family) < 2 or k.size < 2:
        raise ValueError("dispersion_surface needs at least 2 parameter sets and 2 k points")
    out = np.empty((len(family), k.size))
    for i, params in enumerate(family):
        out[i] = dispersion(params, k)
    return out


@dataclass(frozen=True)
class DiracPoint:
    """A gap closure at ``k``.

    ``gap_at`` is "E0" when the bands touch at E = 0 and "Epi" at |E| = pi.
    ``extended`` marks a band that is flat at the edge for the whole window;
    ``k`` is then the window start and stands for every k.
    """

    k: float
    params: ProtocolParams
    gap_at: GapEdge
    cos_e: float
    extended: bool = False


def _bisect_slope(a: float, b: float, c: float, lo: float, hi: float, sign: float, width: float) -> float:
    # root of d/dk (sign * cos E) = sign * (-a sin k + b cos k), positive at lo
    def slope(x: float) -> float:
        return sign * (-a * math.sin(x) + b * math.cos(x))

    if slope(lo) <= 0.0:
        return lo
    if slope(hi) >= 0.0:
        return hi
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _wrap_k(k: float) -> float:
    k = math.remainder(k, 2.0 * math.pi)
    return math.pi if k <= -math.pi else k


def find_dirac_points(
    params: ProtocolParams | Iterable[ProtocolParams],
    k_window: tuple[float, float] = (-math.pi, math.pi),
    tolerance: float = 1e-10,
    samples: int = 10_000,
    resolution: float = 1e-10,
) -> list[DiracPoint]:
    """Locate gap closures |cos E| = 1 inside ``k_window``.

    A uniform scan of ``1 - |cos E|`` picks out local minima; each candidate is
    bracketed by a sign change of the slope of cos E and refined by bisection
    until the bracket is narrower than ``resolution``. A point is reported when
    |cos E| is within ``tolerance`` of 1. Closures closer than 1e-8 in k (taken
    modulo 2 pi) are merged. ``params`` may be one parameter set or a sequence
    of them (a parameter family); results are concatenated in input order.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if isinstance(params, (HQW, NCRQW, SSQW)):
        family = [params]
    else:
        family = list(params)
    lo_k, hi_k = float(k_window[0]), float(k_window[1])
    grid = np.linspace(lo_k, hi_k, samples + 1)
    step = grid[1] - grid[0]
    periodic = math.isclose(hi_k - lo_k, 2.0 * math.pi, rel_tol=0.0, abs_tol=1e-12)
    cos_k, sin_k = np.cos(grid), np.sin(grid)

    found: list[DiracPoint] = []
    for p in family:
        protocol, p1, p2 = _angle_pair(p)
        a, b, c = (float(x) for x in band_coefficients(protocol, p1, p2))
        cos_e = a * cos_k + b * sin_k + c
        gap = 1.0 - np.abs(cos_e)
        if np.all(gap < tolerance):
            edge: GapEdge = "E0" if cos_e[0] > 0 else "Epi"
            found.append(DiracPoint(lo_k, p, edge, float(cos_e[0]), extended=True))
            continue
        # a touching point can sit at most half a step from a sample
        amplitude = math.hypot(a, b)
        prefilter = tolerance + amplitude * step * step
        left = np.roll(gap, 1)
        right = np.roll(gap, -1)
        if not periodic:
            left[0] = np.inf
            right[-1] = np.inf
        candidates = np.nonzero((gap <= left) & (gap <= right) & (gap <= prefilter))[0]
        points: list[DiracPoint] = []
        for i in candidates:
            sign = 1.0 if cos_e[i] > 0 else -1.0
            lo = grid[i] - step if (i > 0 or periodic) else grid[i]
            hi = grid[i] + step if (i < samples or periodic) else grid[i]
            k_star = _bisect_slope(a, b, c, lo, hi, sign, resolution)
            if not periodic:
                k_star = min(max(k_star, lo_k), hi_k)
            value = a * math.cos(k_star) + b * math.sin(k_star) + c
            if abs(value - sign) >= tolerance:
                continue
            k_rep = _wrap_k(k_star) if periodic else k_star
            if any(abs(math.remainder(k_rep - q.k, 2.0 * math.pi)) < 1e-8 for q in points):
                continue
            points.append(DiracPoint(k_rep, p, "E0" if sign > 0 else "Epi", value))
        points.sort(key=lambda q: q.k)
        found.extend(points)
    return found


def gapless_parameters(points: Iterable[DiracPoint]) -> list[ProtocolParams]:
    """Distinct parameter sets among ``points``, in first-seen order."""
    seen: list[ProtocolParams] = []
    for q in points:
        if q.params not in seen:
            seen.append(q.params)
    return seen
