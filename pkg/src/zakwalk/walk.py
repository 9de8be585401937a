"""Position-space walks and time-multiplexed detection.

States are dense arrays over the light cone. A 1D state has shape (L, 2) with
sites x = -R..R (L = 2R + 1) and coin axis (H, V). A 2D state has shape
(Lx, Ly, 2, 2): one coin for the x-walk and one for the y-walk, so the step
U_x (x) U_y is separable. Product states also keep their two 1D factors and
are evolved factor-wise.

Each protocol step applies its coins in order, with a polarisation-dependent
shift (H to x + 1, V to x - 1) after the full coin sequence; the split-step
walk shifts after each of its two coins.

For detection the photon polarisation is the y-walk coin (the x coin is traced
out), and lattice site (x, y) arrives at t = x dt_x + y dt_y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .coins import CoinState, H, coin_sequence
from .errors import AmbiguousBinning, VanishingOverlap
from .params import SSQW, ProtocolParams

Schedule = Union[ProtocolParams, Sequence[ProtocolParams], Callable[[int], ProtocolParams]]


@dataclass(frozen=True, eq=False)
class WalkState:
    amplitudes: NDArray[np.complex128]
    step_count: int = 0
    factors: Optional[tuple["WalkState", "WalkState"]] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        a = np.asarray(self.amplitudes, dtype=np.complex128)
        if a.ndim == 2 and a.shape[1] == 2 and a.shape[0] % 2 == 1:
            pass
        elif a.ndim == 4 and a.shape[2:] == (2, 2) and a.shape[0] % 2 == 1 and a.shape[1] % 2 == 1:
            pass
        else:
            raise ValueError(f"bad amplitude shape {a.shape}")
        object.__setattr__(self, "amplitudes", a)

    @property
    def dims(self) -> int:
        return 1 if self.amplitudes.ndim == 2 else 2

    @property
    def xs(self) -> NDArray[np.int64]:
        r = self.amplitudes.shape[0] // 2
        return np.arange(-r, r + 1)

    @property
    def ys(self) -> NDArray[np.int64]:
        if self.dims == 1:
            return np.zeros(1, dtype=np.int64)
        r = self.amplitudes.shape[1] // 2
        return np.arange(-r, r + 1)

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def probabilities(self) -> NDArray[np.float64]:
        """Site probabilities: shape (L,) or (Lx, Ly)."""
        p = np.abs(self.amplitudes) ** 2
        return p.sum(axis=-1) if self.dims == 1 else p.sum(axis=(-2, -1))

    def coin_probabilities(self) -> NDArray[np.float64]:
        """(pH, pV) per site; in 2D the y-walk coin, with the x coin traced out."""
        p = np.abs(self.amplitudes) ** 2
        return p if self.dims == 1 else p.sum(axis=-2)


def initial_state(coin: CoinState = H) -> WalkState:
    """|x = 0> (x) coin."""
    return WalkState(coin.as_array()[None, :])


def product_state(x: WalkState, y: WalkState) -> WalkState:
    if x.dims != 1 or y.dims != 1:
        raise ValueError("product_state takes two 1D states")
    dense = np.einsum("ia,jb->ijab", x.amplitudes, y.amplitudes)
    return WalkState(dense, x.step_count, factors=(x, y))


def initial_state_2d(coin_x: CoinState = H, coin_y: CoinState = H) -> WalkState:
    """|x = 0, y = 0> with independent x and y coins."""
    return product_state(initial_state(coin_x), initial_state(coin_y))


def _coin(amps: NDArray, u: NDArray, coin_axis: int) -> NDArray:
    moved = np.moveaxis(amps, coin_axis, -1)
    return np.moveaxis(moved @ u.T, -1, coin_axis)


def _shift(amps: NDArray, axis: int, coin_axis: int) -> NDArray:
    # H moves one site up, V one site down; the lattice grows by one each side
    size = amps.shape[axis]
    shape = list(amps.shape)
    shape[axis] = size + 2
    out = np.zeros(shape, dtype=np.complex128)

    def index(sites: slice, coin: int) -> tuple:
        idx: list = [slice(None)] * amps.ndim
        idx[axis] = sites
        idx[coin_axis] = coin
        return tuple(idx)

    out[index(slice(2, size + 2), 0)] = amps[index(slice(None), 0)]
    out[index(slice(0, size), 1)] = amps[index(slice(None), 1)]
    return out


def _walk_step(amps: NDArray, params: ProtocolParams, axis: int, coin_axis: int) -> NDArray:
    coins = coin_sequence(params)
    if isinstance(params, SSQW):
        for u in coins:
            amps = _shift(_coin(amps, u, coin_axis), axis, coin_axis)
        return amps
    for u in coins:
        amps = _coin(amps, u, coin_axis)
    return _shift(amps, axis, coin_axis)


def step_1d(state: WalkState, params: ProtocolParams) -> WalkState:
    """One full protocol step of a 1D walk."""
    if state.dims != 1:
        raise ValueError("step_1d needs a 1D state")
    return WalkState(_walk_step(state.amplitudes, params, 0, 1), state.step_count + 1)


def step_2d(state: WalkState, params_x: ProtocolParams, params_y: ProtocolParams) -> WalkState:
    """One separable step U_x (x) U_y of a 2D walk."""
    if state.factors is not None:
        fx, fy = state.factors
        return product_state(step_1d(fx, params_x), step_1d(fy, params_y))
    amps = _walk_step(state.amplitudes, params_x, 0, 2)
    amps = _walk_step(amps, params_y, 1, 3)
    return WalkState(amps, state.step_count + 1)


def _schedule(spec: Schedule) -> Callable[[int], ProtocolParams]:
    if callable(spec) and not hasattr(spec, "angles"):
        return spec
    if isinstance(spec, Sequence):
        seq = list(spec)
        return lambda i: seq[i]
    return lambda i: spec


def evolve(
    initial: WalkState,
    params_x: Schedule,
    params_y: Optional[Schedule] = None,
    n_steps: int = 1,
) -> WalkState:
    """Apply ``n_steps`` steps.

    ``params_x``/``params_y`` are fixed parameters, a per-step sequence, or a
    callable from step index to parameters (coin switching between steps).
    Product 2D states are evolved factor-wise and densified once at the end.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    px = _schedule(params_x)
    if initial.dims == 1:
        if params_y is not None:
            raise ValueError("params_y given for a 1D state")
        state = initial
        for i in range(n_steps):
            state = step_1d(state, px(i))
        return state

    py = _schedule(params_x if params_y is None else params_y)
    if initial.factors is not None:
        fx, fy = initial.factors
        ax, ay = fx.amplitudes, fy.amplitudes
        for i in range(n_steps):
            ax = _walk_step(ax, px(i), 0, 1)
            ay = _walk_step(ay, py(i), 0, 1)
        steps = initial.step_count + n_steps
        return product_state(WalkState(ax, steps), WalkState(ay, steps))
    amps = initial.amplitudes
    for i in range(n_steps):
        amps = _walk_step(amps, px(i), 0, 2)
        amps = _walk_step(amps, py(i), 1, 3)
    return WalkState(amps, initial.step_count + n_steps)


def _pad_to(amps: NDArray, radii: Sequence[int]) -> NDArray:
    pads = [((r - s // 2), (r - s // 2)) for r, s in zip(radii, amps.shape)]
    pads += [(0, 0)] * (amps.ndim - len(radii))
    return np.pad(amps, pads)


def overlap_phase(psi_initial: WalkState, psi_final: WalkState) -> float:
    """arg <psi_initial|psi_final> in (-pi, pi]."""
    if psi_initial.dims != psi_final.dims:
        raise ValueError("states have different dimension")
    lattice = psi_initial.dims
    radii = [max(a, b) // 2 for a, b in zip(psi_initial.amplitudes.shape[:lattice], psi_final.amplitudes.shape[:lattice])]
    a = _pad_to(psi_initial.amplitudes, radii)
    b = _pad_to(psi_final.amplitudes, radii)
    overlap = complex(np.vdot(a, b))
    if abs(overlap) <= 1e-12:
        raise VanishingOverlap(f"|<psi_i|psi_f>| = {abs(overlap):.3e}")
    phase = math.atan2(overlap.imag, overlap.real)
    return math.pi if phase == -math.pi else phase


# -- time multiplexing -------------------------------------------------------


@dataclass(frozen=True)
class TimeBinConfig:
    """Fibre-loop delays and losses, times in seconds.

    Defaults follow the pulsed source described for the experiment
    (90 ps pulses, 110 kHz repetition, ~50 % survival per step).
    """

    dt_x: float = 1e-9
    dt_y: float = 100e-9
    pulse_width: float = 90e-12
    rep_period: float = 1.0 / 110e3
    per_step_transmission: float = 0.5

    def validate(self, max_steps: Optional[int] = None) -> None:
        if not 0.0 < self.per_step_transmission <= 1.0:
            raise ValueError("per_step_transmission must be in (0, 1]")
        if not (self.dt_y > self.dt_x > 0.0):
            raise ValueError("need dt_y > dt_x > 0")
        if not self.pulse_width < self.dt_x:
            raise ValueError("pulse_width must be shorter than dt_x")
        if max_steps is not None and not self.dt_y > (2 * max_steps + 1) * self.dt_x:
            raise AmbiguousBinning(
                f"dt_y = {self.dt_y:g} s cannot separate {2 * max_steps + 1} x-sites at dt_x = {self.dt_x:g} s"
            )

    def arrival_time(self, x: int, y: int) -> float:
        return x * self.dt_x + y * self.dt_y


@dataclass(frozen=True)
class TimeBin:
    time: float
    probability: float
    site: tuple[int, int]
    coin: str


@dataclass(frozen=True)
class ArrivalHistogram:
    bins: tuple[TimeBin, ...]
    n_steps: int
    transmission: float

    @property
    def detected(self) -> float:
        return float(sum(b.probability for b in self.bins))


def _site_grid(state: WalkState) -> tuple[NDArray, NDArray]:
    xs, ys = np.meshgrid(state.xs, state.ys, indexing="ij")
    return xs, ys


def to_time_bins(state: WalkState, cfg: TimeBinConfig, n_steps: Optional[int] = None) -> ArrivalHistogram:
    """Project the lattice onto photon arrival times.

    Every site inside the state's extent must fall in its own pulse slot;
    otherwise :class:`AmbiguousBinning` is raised. Probabilities are scaled by
    ``per_step_transmission ** n_steps``; zero-probability cells are omitted.
    """
    n_steps = state.step_count if n_steps is None else n_steps
    cfg.validate()
    xs, ys = _site_grid(state)
    times = xs * cfg.dt_x + ys * cfg.dt_y
    ordered = np.sort(times.ravel())
    if ordered.size > 1 and np.min(np.diff(ordered)) < cfg.pulse_width:
        raise AmbiguousBinning("two lattice sites share an arrival-time bin; increase dt_y")
    scale = cfg.per_step_transmission**n_steps
    coin_p = state.coin_probabilities()
    if state.dims == 1:
        coin_p = coin_p[:, None, :]
    bins = []
    for i, j in np.ndindex(times.shape):
        for c, label in enumerate("HV"):
            p = float(coin_p[i, j, c])
            if p > 0.0:
                bins.append(TimeBin(float(times[i, j]), p * scale, (int(xs[i, j]), int(ys[i, j])), label))
    bins.sort(key=lambda b: (b.time, b.coin))
    return ArrivalHistogram(tuple(bins), n_steps, scale)


def decode_time(t: float, cfg: TimeBinConfig) -> tuple[int, int]:
    """Lattice site of arrival time ``t`` (inverse of the linear time map)."""
    y = round(t / cfg.dt_y)
    x = round((t - y * cfg.dt_y) / cfg.dt_x)
    if abs(cfg.arrival_time(x, y) - t) > cfg.pulse_width / 2:
        raise AmbiguousBinning(f"arrival time {t!r} is not on a lattice slot")
    return int(x), int(y)


def from_time_bins(
    hist: ArrivalHistogram, cfg: TimeBinConfig, undo_loss: bool = True
) -> dict[tuple[int, int], NDArray[np.float64]]:
    """Site -> (pH, pV) recovered from arrival times alone.

    With ``undo_loss`` the global transmission factor is divided out.
    """
    cfg.validate()
    out: dict[tuple[int, int], NDArray[np.float64]] = {}
    slots: dict[tuple[int, int], float] = {}
    scale = hist.transmission if undo_loss else 1.0
    for b in hist.bins:
        site = decode_time(b.time, cfg)
        if site in slots and slots[site] != b.time:
            raise AmbiguousBinning(f"site {site} decoded from two different times")
        slots[site] = b.time
        p = out.setdefault(site, np.zeros(2))
        p["HV".index(b.coin)] += b.probability / scale
    return out


def sample_counts(hist: ArrivalHistogram, shots: int, seed: int = 0) -> tuple[NDArray[np.int64], int]:
    """Multinomial photon counts per bin plus the number of lost photons."""
    probs = np.array([b.probability for b in hist.bins] + [max(0.0, 1.0 - hist.detected)])
    probs /= probs.sum()
    counts = np.random.default_rng(seed).multinomial(shots, probs)
    return counts[:-1], int(counts[-1])
