"""Bloch eigenvectors, Zak phases and Berry-curvature checks.

Three routes to the Zak phase are provided:

``wilson``
    Discrete Berry phase ``-Im log prod <u(k_i)|u(k_i+1)>`` over a uniform
    k-grid. Interior gauge choices cancel link by link; the two end vectors are
    put in the canonical gauge (largest component real and positive) before
    the product, so the result depends only on the eigen-rays along the path.
    Over a full period the end rays coincide and this is the usual closed-loop
    Zak phase.
``quadrature``
    Composite Simpson integration of (a^2 + b^2) / D^2 for the NCRQW (and for
    the HQW as its phi = 0 case), with D^2 = lam^2 -/+ n3 lam built from the
    unnormalised norm components.
``endpoint``
    phi(k_start) - phi(k_end) along the continuous branch of the Bloch
    argument; meaningful only where n3 vanishes identically.

The quadrature integrand is not a Berry connection in general, so the two
numerical routes are compared by :func:`zak_method_report` rather than assumed
to agree.

Phases are reported as representatives in (-pi, pi]; raw link sums are kept
alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import simpson

from .bands import (
    SINGULAR_THRESHOLD,
    _angle_pair,
    angular_functions,
    norm_vector,
    norm_vectors_arrays,
)
from .coins import SIGMA_1, SIGMA_2, SIGMA_3
from .errors import DivisionByZero, DomainError, NoConvergence, SingularPath, SingularPoint, UndefinedArgument, WrongVariant
from .params import HQW, NCRQW, SSQW, ProtocolParams, make_params

Band = Literal["plus", "minus"]
Method = Literal["WilsonLoop", "ClosedFormIntegrand", "EndpointFormula"]

HALF_ZONE = (-math.pi / 2, math.pi / 2)
POSITIVE_HALF = (0.0, math.pi)
FULL_ZONE = (-math.pi, math.pi)

GAUGE_TIE = 1e-12
MAX_NODES = 2**20
_BAND_SIGN = {"plus": 1.0, "minus": -1.0}


def wrap_phase(x: ArrayLike):
    """Representative of ``x`` modulo 2 pi in (-pi, pi]."""
    y = np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2.0 * np.pi)
    return float(y) if y.ndim == 0 else y


def phase_distance(x: ArrayLike, y: ArrayLike):
    """|x - y| modulo 2 pi, in [0, pi]."""
    return np.abs(wrap_phase(np.asarray(x) - np.asarray(y)))


# -- eigenvectors ------------------------------------------------------------


def canonical_gauge(vectors: ArrayLike) -> NDArray[np.complex128]:
    """Rephase so the larger-modulus component is real and positive.

    Components whose moduli differ by at most 1e-12 count as a tie, resolved
    toward the first component. Works on any array with a trailing axis of 2.
    """
    v = np.asarray(vectors, dtype=np.complex128)
    m0 = np.abs(v[..., 0])
    m1 = np.abs(v[..., 1])
    second = m1 > m0 + GAUGE_TIE
    pivot = np.where(second, v[..., 1], v[..., 0])
    out = v * (np.conj(pivot) / np.abs(pivot))[..., None]
    # the rotated pivot is |pivot| up to rounding; store it exactly real
    out[..., 0] = np.where(second, out[..., 0], np.abs(pivot))
    out[..., 1] = np.where(second, np.abs(pivot), out[..., 1])
    return out


def eigenvectors_from_norm(n: ArrayLike, band: Band) -> NDArray[np.complex128]:
    """Normalised eigenvectors of n.s for unit ``n`` (trailing axis 3).

    Of the two closed-form eigenvector columns of the 2x2 problem the one with
    the larger norm is used, so nothing degenerates away from n = 0.
    """
    n = np.asarray(n, dtype=float)
    s = _BAND_SIGN[band]
    n1, n2, n3 = n[..., 0], n[..., 1], n[..., 2]
    use_a = s * n3 >= 0.0
    first = np.where(use_a, n3 + s, n1 - 1j * n2)
    second = np.where(use_a, n1 + 1j * n2, s - n3)
    v = np.stack([first, second], axis=-1)
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    return canonical_gauge(v)


def pauli_hamiltonian(n: ArrayLike) -> NDArray[np.complex128]:
    n1, n2, n3 = np.asarray(n, dtype=float)
    return n1 * SIGMA_1 + n2 * SIGMA_2 + n3 * SIGMA_3


@dataclass(frozen=True)
class BlochEigenpair:
    k: float
    E: float
    u_plus: NDArray[np.complex128]
    u_minus: NDArray[np.complex128]
    n: NDArray[np.float64]
    gauge: str = "FirstComponentRealPositive"

    @property
    def lam(self) -> float:
        return float(np.linalg.norm(self.n))


def bloch_eigenvectors(params: ProtocolParams, k: float) -> BlochEigenpair:
    """Diagonalise H(k) = n(k).s and fix the gauge of both eigenvectors."""
    nv = norm_vector(params, k)
    n = nv.as_array()
    _, vecs = np.linalg.eigh(pauli_hamiltonian(n))
    u_minus, u_plus = canonical_gauge(vecs.T)
    return BlochEigenpair(float(k), nv.E, u_plus, u_minus, n)


def bloch_argument(params: ProtocolParams, k: float) -> float:
    """atan2(n2, n1) of the norm vector at ``k``."""
    nv = norm_vector(params, k)
    if math.hypot(nv.n1, nv.n2) <= 1e-12:
        raise UndefinedArgument(f"n1 = n2 = 0 at k={k!r} for {params!r}")
    return math.atan2(nv.n2, nv.n1)


def bloch_argument_path(params: ProtocolParams, k: ArrayLike) -> NDArray[np.float64]:
    """Bloch argument along a k-path on its continuous branch (jumps > pi folded)."""
    k = np.asarray(k, dtype=float)
    return np.unwrap(np.array([bloch_argument(params, float(q)) for q in k]))


# -- Wilson loop -------------------------------------------------------------


def wilson_phase(vectors: ArrayLike) -> NDArray[np.float64]:
    """Raw discrete Berry phase of eigenvectors along a path.

    ``vectors`` has shape (..., N + 1, 2). The end vectors are taken to the
    canonical gauge; interior phases drop out of the product.
    """
    v = np.array(vectors, dtype=np.complex128)
    v[..., 0, :] = canonical_gauge(v[..., 0, :])
    v[..., -1, :] = canonical_gauge(v[..., -1, :])
    links = np.sum(np.conj(v[..., :-1, :]) * v[..., 1:, :], axis=-1)
    return -np.sum(np.angle(links), axis=-1)


def _path_phases(protocol, p1, p2, ks, flip):
    """Raw phases (P, 2) for (plus, minus) and a per-cell singular mask."""
    n, sin_e = norm_vectors_arrays(protocol, p1[:, None], p2[:, None], ks[None, :])
    singular = ~np.all(sin_e > SINGULAR_THRESHOLD, axis=1)
    if np.any(singular):
        n[singular] = (0.0, 0.0, 1.0)
    if flip:
        n[..., 1] = -n[..., 1]
    raw = np.stack([wilson_phase(eigenvectors_from_norm(n, b)) for b in ("plus", "minus")], axis=-1)
    return raw, singular


def _adaptive_wilson(protocol, p1, p2, interval, n_k, flip, tol, max_nodes, budget=2**21):
    p1 = np.atleast_1d(np.asarray(p1, dtype=float))
    p2 = np.atleast_1d(np.asarray(p2, dtype=float))
    count = p1.size
    raw = np.full((count, 2), np.nan)
    nodes = np.zeros(count, dtype=np.int64)
    singular = np.zeros(count, dtype=bool)
    converged = np.zeros(count, dtype=bool)

    active = np.arange(count)
    prev = None
    n = n_k
    k0, k1 = interval
    while active.size and n <= max_nodes:
        ks = np.linspace(k0, k1, n + 1)
        chunk = max(1, budget // (n + 1))
        cur = np.empty((active.size, 2))
        sing = np.zeros(active.size, dtype=bool)
        for s in range(0, active.size, chunk):
            idx = active[s : s + chunk]
            cur[s : s + chunk], sing[s : s + chunk] = _path_phases(protocol, p1[idx], p2[idx], ks, flip)
        singular[active[sing]] = True
        raw[active] = cur
        nodes[active] = n
        if prev is not None:
            done = np.all(phase_distance(cur, prev) < tol, axis=1) | sing
        else:
            done = sing
        converged[active[done & ~sing]] = True
        keep = ~done
        active = active[keep]
        prev = cur[keep]
        n *= 2
    return raw, nodes, singular, converged


@dataclass(frozen=True)
class ZakResult:
    """Zak phases of one 1D walk along one k-interval.

    ``Z_plus``/``Z_minus`` are None when only the other band was requested.
    """

    Z_plus: Optional[float]
    Z_minus: Optional[float]
    Z_total: float
    method: Method
    n_k: int
    interval: tuple[float, float]
    raw: dict = field(default_factory=dict)
    flipped: bool = False


def _pick_bands(band: Optional[Band]) -> tuple[bool, bool]:
    if band is None:
        return True, True
    if band not in _BAND_SIGN:
        raise ValueError(f"band must be 'plus', 'minus' or None, got {band!r}")
    return band == "plus", band == "minus"


def _make_result(raw_plus, raw_minus, band, method, n_k, interval, flipped) -> ZakResult:
    want_plus, want_minus = _pick_bands(band)
    raw_plus = raw_plus if want_plus else None
    raw_minus = raw_minus if want_minus else None
    raw_total = sum(x for x in (raw_plus, raw_minus) if x is not None)
    return ZakResult(
        Z_plus=None if raw_plus is None else wrap_phase(raw_plus),
        Z_minus=None if raw_minus is None else wrap_phase(raw_minus),
        Z_total=wrap_phase(raw_total),
        method=method,
        n_k=int(n_k),
        interval=(float(interval[0]), float(interval[1])),
        raw={"plus": raw_plus, "minus": raw_minus, "total": raw_total},
        flipped=flipped,
    )


def zak_wilson_loop(
    params: ProtocolParams,
    band: Optional[Band] = None,
    k_start: float = HALF_ZONE[0],
    k_end: float = HALF_ZONE[1],
    n_k: int = 64,
    *,
    flip: bool = False,
    tol: float = 1e-8,
    max_nodes: int = MAX_NODES,
) -> ZakResult:
    """Wilson-loop Zak phase on [k_start, k_end] with adaptive grid doubling.

    ``flip`` negates the Bloch argument (n2 -> -n2) before diagonalising, which
    is how the y-walk breaks time-reversal symmetry.

    Raises
    ------
    SingularPath
        If sin E <= 1e-9 at any node.
    NoConvergence
        If doubling past ``max_nodes`` still changes the phase by >= ``tol``.
    """
    if n_k < 16:
        raise ValueError("n_k must be at least 16")
    protocol, p1, p2 = _angle_pair(params)
    raw, nodes, singular, converged = _adaptive_wilson(
        protocol, p1, p2, (k_start, k_end), n_k, flip, tol, max_nodes
    )
    if singular[0]:
        raise SingularPath(f"gap closes on [{k_start}, {k_end}] for {params!r}")
    if not converged[0]:
        raise NoConvergence(f"Wilson loop not converged to {tol} within {max_nodes} nodes")
    return _make_result(raw[0, 0], raw[0, 1], band, "WilsonLoop", nodes[0], (k_start, k_end), flip)


def wilson_on_grid(params: ProtocolParams, k: ArrayLike, *, flip: bool = False) -> NDArray[np.float64]:
    """Raw (plus, minus) Wilson phases on one fixed grid, no refinement."""
    protocol, p1, p2 = _angle_pair(params)
    raw, singular = _path_phases(protocol, np.array([p1]), np.array([p2]), np.asarray(k, dtype=float), flip)
    if singular[0]:
        raise SingularPath(f"gap closes on the grid for {params!r}")
    return raw[0]


# -- closed forms ------------------------------------------------------------


def zak_closed_form_ssqw(theta1: float, theta2: float) -> float:
    """tan(theta2) / tan(theta1), the printed split-step result."""
    if abs(math.sin(theta1)) <= 1e-12:
        raise DivisionByZero(f"tan(theta1) = 0 at theta1={theta1!r}")
    return math.tan(theta2) / math.tan(theta1)


@dataclass(frozen=True)
class IntegrandComponents:
    a: float
    b: float
    c: float
    d: float
    C1: complex
    C2: float
    D_plus: float
    D_minus: float


def integrand_components(theta: float, phi: float, k: float, band: Band = "plus") -> IntegrandComponents:
    """Angular functions and the C1, C2, D+/- pieces of the NCRQW integrand.

    C2 = n3 -/+ lam for the requested band, where n3 = c cos k - d sin k and
    lam^2 = a^2 + b^2 + n3^2 are the unnormalised quantities.
    """
    a, b, c, d = (float(x) for x in angular_functions(theta, phi))
    n3 = c * math.cos(k) - d * math.sin(k)
    lam = math.sqrt(a * a + b * b + n3 * n3)
    c1 = -complex(math.cos(k), -math.sin(k)) * complex(a, -b)
    c2 = n3 - _BAND_SIGN[band] * lam
    d_plus = math.sqrt(max(lam * lam - n3 * lam, 0.0))
    d_minus = math.sqrt(max(lam * lam + n3 * lam, 0.0))
    return IntegrandComponents(a, b, c, d, c1, c2, d_plus, d_minus)


def _integrand_arrays(theta, phi, k, band: Band):
    a, b, c, d = angular_functions(theta, phi)
    k = np.asarray(k, dtype=float)
    n3 = c * np.cos(k) - d * np.sin(k)
    perp = a * a + b * b
    lam = np.sqrt(perp + n3 * n3)
    d_sq = lam * lam - _BAND_SIGN[band] * n3 * lam
    return perp, d_sq


def _ncrqw_angles(params: ProtocolParams) -> tuple[float, float]:
    match params:
        case NCRQW(theta=t, phi=p):
            return t, p
        case HQW(theta=t):
            return t, 0.0
    raise WrongVariant(f"the closed-form integrand is defined for NCRQW and HQW, not {params!r}")


def zak_integrand_ncrqw(theta: float, phi: float, k: ArrayLike, band: Band = "plus"):
    """(a^2 + b^2) / D_band(k)^2."""
    perp, d_sq = _integrand_arrays(theta, phi, k, band)
    if np.any(np.sqrt(d_sq) <= 1e-12):
        raise SingularPoint(f"D_{band} vanishes for theta={theta!r}, phi={phi!r}")
    out = perp / d_sq
    return float(out) if np.ndim(out) == 0 else out


def zak_quadrature(
    params: ProtocolParams,
    band: Optional[Band] = None,
    interval: tuple[float, float] = POSITIVE_HALF,
    n_k: int = 64,
    *,
    tol: float = 1e-8,
    max_nodes: int = MAX_NODES,
) -> ZakResult:
    """Simpson quadrature of the closed-form integrand with Richardson refinement.

    The grid is doubled until successive Richardson estimates
    ``S_2n + (S_2n - S_n) / 15`` differ by less than ``tol``.
    """
    theta, phi = _ncrqw_angles(params)
    if n_k < 2 or n_k % 2:
        raise ValueError("n_k must be a positive even number")
    k0, k1 = interval
    want_plus, want_minus = _pick_bands(band)
    values = {}
    for name, wanted in (("plus", want_plus), ("minus", want_minus)):
        if not wanted:
            values[name] = None
            continue
        n = n_k
        prev_s = prev_r = None
        while True:
            if n > max_nodes:
                raise NoConvergence(f"quadrature not converged to {tol} within {max_nodes} nodes")
            ks = np.linspace(k0, k1, n + 1)
            perp, d_sq = _integrand_arrays(theta, phi, ks, name)
            if np.any(np.sqrt(d_sq) <= 1e-12):
                raise SingularPath(f"D_{name} vanishes on [{k0}, {k1}] for {params!r}")
            s = float(simpson(perp / d_sq, x=ks))
            r = None if prev_s is None else s + (s - prev_s) / 15.0
            if r is not None and prev_r is not None and abs(r - prev_r) < tol:
                values[name] = r
                break
            prev_s, prev_r = s, r
            n *= 2
    return _make_result(values["plus"], values["minus"], band, "ClosedFormIntegrand", n, interval, False)


def zak_endpoint_formula(params: ProtocolParams, interval: tuple[float, float] = HALF_ZONE, samples: int = 4097) -> float:
    """phi(k_start) - phi(k_end) on the continuous branch (versor eigenvectors).

    Only valid where n3 vanishes along the whole path.
    """
    ks = np.linspace(interval[0], interval[1], samples)
    protocol, p1, p2 = _angle_pair(params)
    n, sin_e = norm_vectors_arrays(protocol, p1, p2, ks)
    if not np.all(sin_e > SINGULAR_THRESHOLD):
        raise SingularPath(f"gap closes on {interval} for {params!r}")
    if np.max(np.abs(n[:, 2])) > 1e-12:
        raise DomainError("endpoint formula needs n3 = 0 along the whole path")
    phi = np.unwrap(np.arctan2(n[:, 1], n[:, 0]))
    return float(phi[0] - phi[-1])


# -- 2D vectors and landscapes ----------------------------------------------


def zak_vector_2d(
    params_x: ProtocolParams,
    params_y: Optional[ProtocolParams] = None,
    flip_y: bool = False,
    interval: tuple[float, float] = HALF_ZONE,
    n_k: int = 64,
    tol: float = 1e-8,
) -> tuple[float, float]:
    """(Zx, Zy) of a separable 2D walk, each the total 1D Zak phase of its axis.

    With ``flip_y`` the y-walk uses the negated Bloch argument.
    """
    params_y = params_x if params_y is None else params_y
    zx = zak_wilson_loop(params_x, None, interval[0], interval[1], n_k, tol=tol)
    zy = zak_wilson_loop(params_y, None, interval[0], interval[1], n_k, flip=flip_y, tol=tol)
    return zx.Z_total, zy.Z_total


@dataclass(frozen=True)
class ZakLandscape:
    """Zak phases on a parameter grid.

    ``Zx_grid`` and ``Zy_grid`` are masked arrays; masked cells are the
    Undefined (gap-closing) ones. For a one-parameter protocol ``param2_axis``
    is None and the grids are 1D.
    """

    protocol: str
    param1_axis: NDArray[np.float64]
    param2_axis: Optional[NDArray[np.float64]]
    Zx_grid: np.ma.MaskedArray
    Zy_grid: np.ma.MaskedArray
    flip_y: bool
    interval: tuple[float, float]
    nodes: NDArray[np.int64] = field(repr=False, default=None)

    @property
    def singular(self) -> NDArray[np.bool_]:
        return np.ma.getmaskarray(self.Zx_grid) | np.ma.getmaskarray(self.Zy_grid)


def zak_landscape(
    protocol: str,
    param1_axis: ArrayLike,
    param2_axis: Optional[ArrayLike] = None,
    flip_y: bool = False,
    n_k: int = 64,
    interval: tuple[float, float] = HALF_ZONE,
    tol: float = 1e-8,
    max_nodes: int = MAX_NODES,
) -> ZakLandscape:
    """Per-cell (Zx, Zy) over a parameter grid, y-walk parameters equal to x.

    Cells are evaluated in vectorised batches; gap-closing cells are masked.
    Cells that fail to converge raise :class:`NoConvergence`.
    """
    protocol = protocol.lower()
    make_params(protocol, *([0.0] * (1 if param2_axis is None else 2)))  # validates arity
    ax1 = np.sort(np.asarray(param1_axis, dtype=float))
    if ax1.size < 2:
        raise ValueError("landscape axes need at least 2 points")
    if param2_axis is None:
        shape = (ax1.size,)
        p1, p2 = ax1, np.zeros_like(ax1)
        ax2 = None
    else:
        ax2 = np.sort(np.asarray(param2_axis, dtype=float))
        if ax2.size < 2:
            raise ValueError("landscape axes need at least 2 points")
        shape = (ax1.size, ax2.size)
        g1, g2 = np.meshgrid(ax1, ax2, indexing="ij")
        p1, p2 = g1.ravel(), g2.ravel()

    grids = []
    nodes = None
    for flip in (False, flip_y):
        raw, used, singular, converged = _adaptive_wilson(protocol, p1, p2, interval, n_k, flip, tol, max_nodes)
        if np.any(~converged & ~singular):
            raise NoConvergence(f"{int(np.sum(~converged & ~singular))} landscape cells did not converge")
        total = wrap_phase(raw[:, 0] + raw[:, 1])
        grids.append(np.ma.MaskedArray(np.where(singular, 0.0, total).reshape(shape), mask=singular.reshape(shape)))
        nodes = used.reshape(shape) if nodes is None else np.maximum(nodes, used.reshape(shape))
    return ZakLandscape(protocol, ax1, ax2, grids[0], grids[1], flip_y, tuple(interval), nodes)


# -- curvature ---------------------------------------------------------------


def _band_vectors(params: ProtocolParams, k: NDArray[np.float64], band: Band, flip: bool):
    protocol, p1, p2 = _angle_pair(params)
    n, sin_e = norm_vectors_arrays(protocol, p1, p2, k)
    if not np.all(sin_e > SINGULAR_THRESHOLD):
        raise SingularPath(f"gap closes on the k grid for {params!r}")
    if flip:
        n[..., 1] = -n[..., 1]
    return eigenvectors_from_norm(n, band)


def plaquette_curvature(states: ArrayLike) -> NDArray[np.float64]:
    """Plaquette Berry flux of states on a (Nx, Ny, dim) grid; shape (Nx-1, Ny-1)."""
    s = np.asarray(states, dtype=np.complex128)

    def link(a, b):
        return np.sum(np.conj(a) * b, axis=-1)

    u1 = link(s[:-1, :-1], s[1:, :-1])
    u2 = link(s[1:, :-1], s[1:, 1:])
    u3 = link(s[1:, 1:], s[:-1, 1:])
    u4 = link(s[:-1, 1:], s[:-1, :-1])
    return np.angle(u1 * u2 * u3 * u4)


def berry_curvature_check(
    params_x: ProtocolParams,
    params_y: Optional[ProtocolParams],
    kx: ArrayLike,
    ky: ArrayLike,
    flip_y: bool = False,
) -> float:
    """Largest plaquette |F| of product states u(kx) (x) u(ky), over all band pairs."""
    params_y = params_x if params_y is None else params_y
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    worst = 0.0
    for bx in ("plus", "minus"):
        ux = _band_vectors(params_x, kx, bx, False)
        for by in ("plus", "minus"):
            uy = _band_vectors(params_y, ky, by, flip_y)
            prod = np.einsum("ia,jb->ijab", ux, uy).reshape(kx.size, ky.size, 4)
            worst = max(worst, float(np.max(np.abs(plaquette_curvature(prod)))))
    return worst


# -- method comparison -------------------------------------------------------


@dataclass(frozen=True)
class MethodComparison:
    params: ProtocolParams
    interval: tuple[float, float]
    wilson_total: float
    quadrature_total: float
    difference: float
    agree: bool
    gauge_deviation: float
    wilson_converged: bool
    convergence_ratio: float

    @property
    def wilson_ok(self) -> bool:
        return self.wilson_converged and self.gauge_deviation < 1e-10


def zak_method_report(
    params: ProtocolParams,
    interval: tuple[float, float] = POSITIVE_HALF,
    rng: Optional[np.random.Generator] = None,
    agreement_tol: float = 1e-6,
) -> MethodComparison:
    """Compare Wilson-loop and closed-form-integrand totals on one interval.

    Alongside the comparison the Wilson loop's own checks are recorded: the
    phase change under a random per-node gauge twist and the refinement ratio
    of successive plus-band differences on 256/512/1024-node grids.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    try:
        wl = zak_wilson_loop(params, None, interval[0], interval[1])
        converged = True
        w_total = wl.Z_total
    except NoConvergence:
        converged = False
        w_total = float("nan")
    quad = zak_quadrature(params, None, interval)
    diff = float(phase_distance(w_total, quad.Z_total)) if converged else float("nan")

    protocol, p1, p2 = _angle_pair(params)
    ks = np.linspace(interval[0], interval[1], 257)
    n, _ = norm_vectors_arrays(protocol, p1, p2, ks)
    worst = 0.0
    for band in ("plus", "minus"):
        u = eigenvectors_from_norm(n, band)
        twisted = u * np.exp(1j * rng.uniform(-np.pi, np.pi, ks.size))[:, None]
        worst = max(worst, float(phase_distance(wilson_phase(u), wilson_phase(twisted))))

    w = [wilson_on_grid(params, np.linspace(interval[0], interval[1], m + 1))[0] for m in (256, 512, 1024)]
    d1 = float(phase_distance(w[1], w[0]))
    d2 = float(phase_distance(w[2], w[1]))
    # both differences at rounding level: already converged
    ratio = math.inf if d2 < 1e-13 else d1 / d2

    return MethodComparison(
        params, tuple(interval), w_total, quad.Z_total, diff,
        bool(converged and diff < agreement_tol), worst, converged, ratio,
    )
