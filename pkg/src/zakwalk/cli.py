"""Command-line front end.

Every command computes one table and writes it as CSV (header row, fixed
column order) or JSON (``{"metadata": {...}, "data": [...]}``). Floats are
written with 17 significant digits; undefined cells are empty in CSV and null
in JSON. No timestamps or other run-dependent values are recorded, so reruns
with the same arguments produce identical bytes.

Exit codes: 0 success, 2 usage, 3 domain error, 4 I/O error, 1 internal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__, bands, coins, symmetry, walk, zak
from .errors import DomainError, InternalError
from .params import PROTOCOLS, SSQW, ProtocolParams, make_params

SCHEMA_VERSION = 1
OUTPUT_DIR_ENV = "ZAKWALK_OUTPUT_DIR"

COMMANDS = ("dispersion", "norms", "zak1d", "landscape", "dirac", "trsregion", "walk", "timebins")

INTERVALS = {
    "half": zak.HALF_ZONE,
    "positive": zak.POSITIVE_HALF,
    "full": zak.FULL_ZONE,
}

ANGLE_FLAGS = {"hqw": ("theta",), "ncrqw": ("theta", "phi"), "ssqw": ("theta1", "theta2")}
ALL_ANGLES = ("theta", "phi", "theta1", "theta2")

#: Library operations reached by each command.
COMMAND_OPERATIONS: dict[str, tuple[str, ...]] = {
    "dispersion": ("bands.dispersion", "bands.dispersion_surface", "coins.momentum_step_unitary"),
    "norms": (
        "bands.norm_vector",
        "zak.bloch_eigenvectors",
        "zak.bloch_argument",
        "symmetry.flipped_argument_walk",
        "zak.zak_integrand_ncrqw",
    ),
    "zak1d": (
        "zak.zak_wilson_loop",
        "zak.zak_quadrature",
        "zak.zak_closed_form_ssqw",
        "zak.zak_endpoint_formula",
        "zak.zak_vector_2d",
        "zak.berry_curvature_check",
    ),
    "landscape": ("zak.zak_landscape",),
    "dirac": ("bands.find_dirac_points",),
    "trsregion": ("symmetry.trs_region_mask", "symmetry.trs_allowed", "symmetry.flip_theta1"),
    "walk": (
        "coins.rotation_matrix",
        "coins.apply_coin",
        "walk.step_1d",
        "walk.evolve",
        "walk.overlap_phase",
    ),
    "timebins": ("walk.evolve", "walk.to_time_bins", "walk.from_time_bins", "walk.sample_counts"),
}

COLUMNS: dict[str, tuple[str, ...]] = {
    "dispersion": ("param1", "k", "E", "E_unitary"),
    "norms": (
        "k",
        "E",
        "n1",
        "n2",
        "n3",
        "arg",
        "arg_flipped",
        "u_plus_h_re",
        "u_plus_h_im",
        "u_plus_v_re",
        "u_plus_v_im",
        "u_minus_h_re",
        "u_minus_h_im",
        "u_minus_v_re",
        "u_minus_v_im",
        "integrand_plus",
        "integrand_minus",
    ),
    "zak1d": ("quantity", "value"),
    "landscape": ("param1", "param2", "Zx", "Zy", "singular_flag"),
    "dirac": ("param1", "param2", "k", "gap_at", "cos_E", "extended"),
    "trsregion": ("theta2", "k", "allowed", "n2_sign_preserved"),
    "walk": ("x", "y", "pH", "pV", "p_total"),
    "timebins": ("time", "x", "y", "coin", "probability", "recovered", "counts"),
}


class UsageError(Exception):
    """Bad or inconsistent command-line arguments (exit code 2)."""


@dataclass
class RunConfig:
    command: str
    protocol: str
    params: Optional[ProtocolParams]
    options: dict[str, Any]
    out: Optional[str]
    fmt: str
    seed: int


@dataclass
class Table:
    columns: tuple[str, ...]
    rows: list[list[Any]]
    metadata: dict[str, Any] = field(default_factory=dict)


# -- parsing -----------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, protocol_default: str = "hqw") -> None:
    p.add_argument("--protocol", choices=sorted(PROTOCOLS), default=protocol_default)
    for name in ALL_ANGLES:
        p.add_argument(f"--{name}", type=float, default=None, help="angle (radians unless --deg)")
    p.add_argument("--deg", action="store_true", help="read every angle-valued flag in degrees")
    p.add_argument("--out", default=None, help="output file (stdout when omitted)")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, default=0)


def _range(p: argparse.ArgumentParser, flag: str, default: tuple[float, float], help_text: str) -> None:
    p.add_argument(flag, nargs=2, type=float, metavar=("MIN", "MAX"), default=list(default), help=help_text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zakwalk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("dispersion", help="quasi-energy E(k)")
    _add_common(p)
    _range(p, "--k-range", (-math.pi, math.pi), "k window")
    p.add_argument("--k-points", type=int, default=721)
    p.add_argument("--surface", type=int, default=0, metavar="N", help="sweep the first angle over N values")
    _range(p, "--param1-range", (-math.pi, math.pi), "sweep window for --surface")

    p = sub.add_parser("norms", help="norm vectors, eigenvectors, Bloch argument")
    _add_common(p)
    _range(p, "--k-range", (-math.pi, math.pi), "k window")
    p.add_argument("--k-points", type=int, default=721)

    p = sub.add_parser("zak1d", help="Zak phases of a single walk by every method")
    _add_common(p)
    p.add_argument("--n-k", type=int, default=64, help="initial Wilson/quadrature nodes")
    p.add_argument("--interval", choices=sorted(INTERVALS), default="half")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--flip-y", action="store_true")
    p.add_argument("--curvature-points", type=int, default=64)

    p = sub.add_parser("landscape", help="(Zx, Zy) over a parameter grid")
    _add_common(p, "ncrqw")
    _range(p, "--param1-range", (-math.pi, math.pi), "first angle window")
    _range(p, "--param2-range", (-math.pi, math.pi), "second angle window")
    p.add_argument("--grid", type=int, default=201, help="points per parameter axis")
    p.add_argument("--n-k", type=int, default=64)
    p.add_argument("--interval", choices=sorted(INTERVALS), default="half")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--flip-y", action="store_true")

    p = sub.add_parser("dirac", help="gap closures (Dirac points)")
    _add_common(p)
    _range(p, "--k-range", (-math.pi, math.pi), "k window")
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--sweep", type=int, default=0, metavar="N", help="scan every angle over N values in [-pi, pi]")

    p = sub.add_parser("trsregion", help="TRS-breaking region mask over (theta2, k)")
    _add_common(p, "ssqw")
    _range(p, "--theta2-range", (-math.pi, math.pi), "theta2 window")
    _range(p, "--k-range", (-math.pi, math.pi), "k window")
    p.add_argument("--grid", type=int, default=201)

    for name, steps, dims in (("walk", 10, 1), ("timebins", 5, 2)):
        p = sub.add_parser(name, help="position-space walk" if name == "walk" else "time-multiplexed detection")
        _add_common(p)
        p.add_argument("--steps", type=int, default=steps)
        p.add_argument("--dims", type=int, choices=(1, 2), default=dims)
        p.add_argument("--flip-y", action="store_true", help="y-walk uses -theta1 (split-step only)")
        p.add_argument("--coin-rotation", type=float, default=0.0, help="initial coin R_y(angle)|H>")
        if name == "timebins":
            cfg = walk.TimeBinConfig()
            p.add_argument("--dt-x", type=float, default=cfg.dt_x)
            p.add_argument("--dt-y", type=float, default=cfg.dt_y)
            p.add_argument("--pulse-width", type=float, default=cfg.pulse_width)
            p.add_argument("--rep-period", type=float, default=cfg.rep_period)
            p.add_argument("--transmission", type=float, default=cfg.per_step_transmission)
            p.add_argument("--shots", type=int, default=0, help="seeded multinomial photon counts")
    return parser


_ANGLE_OPTIONS = ("k_range", "param1_range", "param2_range", "theta2_range", "coin_rotation")


def _angles_required(command: str, protocol: str, ns: argparse.Namespace) -> tuple[str, ...]:
    if command == "landscape":
        return ()
    if command == "trsregion":
        return ("theta1",)
    if command == "dirac" and ns.sweep:
        return ()
    return ANGLE_FLAGS[protocol]


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """Parse and validate; argparse problems exit with status 2."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return _config_from_namespace(ns)
    except UsageError as exc:
        parser.error(str(exc))
        raise  # unreachable


def _config_from_namespace(ns: argparse.Namespace) -> RunConfig:
    command, protocol = ns.command, ns.protocol
    if command == "trsregion" and protocol != "ssqw":
        raise UsageError("trsregion is defined for --protocol ssqw only")
    if command == "landscape" and protocol == "hqw" and ns.param2_range != [-math.pi, math.pi]:
        raise UsageError("hqw has a single parameter; --param2-range does not apply")
    scale = math.pi / 180.0 if ns.deg else 1.0
    required = _angles_required(command, protocol, ns)
    given = [a for a in ALL_ANGLES if getattr(ns, a) is not None]
    missing = [a for a in required if a not in given]
    extra = [a for a in given if a not in required]
    if missing:
        raise UsageError(f"{protocol} needs " + ", ".join(f"--{a}" for a in missing))
    if extra:
        raise UsageError(f"{command} with {protocol} does not take " + ", ".join(f"--{a}" for a in extra))

    options = {k: v for k, v in vars(ns).items() if k not in ("command", "protocol", "out", "fmt", "seed", "deg")}
    for a in ALL_ANGLES:
        options.pop(a)
    for key in _ANGLE_OPTIONS:
        if key in options:
            v = options[key]
            options[key] = [x * scale for x in v] if isinstance(v, list) else v * scale
    for key in ("k_points", "grid", "samples", "curvature_points"):
        if key in options and options[key] < 2:
            raise UsageError(f"--{key.replace('_', '-')} must be at least 2")
    if options.get("n_k") is not None and options["n_k"] < 16:
        raise UsageError("--n-k must be at least 16")
    if options.get("steps") is not None and options["steps"] < 0:
        raise UsageError("--steps must be non-negative")
    if options.get("shots") is not None and options["shots"] < 0:
        raise UsageError("--shots must be non-negative")
    if command == "dirac" and options["sweep"] and options["sweep"] < 2:
        raise UsageError("--sweep needs at least 2 points")
    if command == "dispersion" and options["surface"] == 1:
        raise UsageError("--surface needs at least 2 points")

    params = None
    if command == "trsregion":
        options["theta1"] = ns.theta1 * scale
    elif required:
        params = make_params(protocol, *(getattr(ns, a) * scale for a in required))
    return RunConfig(command, protocol, params, options, ns.out, ns.fmt, ns.seed)


# -- commands ----------------------------------------------------------------


def _linspace(bounds: Sequence[float], n: int) -> np.ndarray:
    return np.linspace(float(bounds[0]), float(bounds[1]), n)


def _params_meta(params: Optional[ProtocolParams]) -> Optional[dict[str, float]]:
    return None if params is None else params.as_dict()


def _unitary_energy(params: ProtocolParams, k: np.ndarray) -> np.ndarray:
    u = coins.momentum_step_unitary(params, k)
    eig = np.linalg.eigvals(u)
    return np.min(np.abs(np.angle(eig)), axis=-1)


def _cmd_dispersion(cfg: RunConfig) -> Table:
    o = cfg.options
    k = _linspace(o["k_range"], o["k_points"])
    p = cfg.params
    rows = []
    if o["surface"]:
        first = _linspace(o["param1_range"], o["surface"])
        family = [make_params(cfg.protocol, a, *p.angles[1:]) for a in first]
        surface = bands.dispersion_surface(family, k)
        for member, a, energies in zip(family, first, surface):
            eu = _unitary_energy(member, k)
            rows += [[float(a), float(kk), float(e), float(x)] for kk, e, x in zip(k, energies, eu)]
    else:
        energies = bands.dispersion(p, k)
        eu = _unitary_energy(p, k)
        rows = [[p.angles[0], float(kk), float(e), float(x)] for kk, e, x in zip(k, energies, eu)]
    meta = {"grid": {"k_range": o["k_range"], "k_points": o["k_points"], "surface": o["surface"]}}
    if o["surface"]:
        meta["grid"]["param1_range"] = o["param1_range"]
    return Table(COLUMNS["dispersion"], rows, meta)


def _cmd_norms(cfg: RunConfig) -> Table:
    o = cfg.options
    p = cfg.params
    k = _linspace(o["k_range"], o["k_points"])
    rows = []
    for kk in k:
        kk = float(kk)
        energy = bands.dispersion(p, kk)
        row: list[Any] = [kk, energy] + [None] * 15
        try:
            nv = bands.norm_vector(p, kk)
            pair = zak.bloch_eigenvectors(p, kk)
        except DomainError:
            rows.append(row)
            continue
        row[2:5] = [nv.n1, nv.n2, nv.n3]
        try:
            row[5] = zak.bloch_argument(p, kk)
            row[6] = symmetry.flipped_argument_walk(p, kk)
        except DomainError:
            pass
        comps = []
        for u in (pair.u_plus, pair.u_minus):
            for c in u:
                comps += [float(c.real), float(c.imag)]
        row[7:15] = comps
        if not isinstance(p, SSQW):
            theta, phi = p.angles[0], (p.angles[1] if len(p.angles) > 1 else 0.0)
            for j, band in ((15, "plus"), (16, "minus")):
                try:
                    row[j] = zak.zak_integrand_ncrqw(theta, phi, kk, band)
                except DomainError:
                    pass
        rows.append(row)
    meta = {"grid": {"k_range": o["k_range"], "k_points": o["k_points"]}, "gauge": "FirstComponentRealPositive"}
    return Table(COLUMNS["norms"], rows, meta)


def _cmd_zak1d(cfg: RunConfig) -> Table:
    o = cfg.options
    p = cfg.params
    interval = INTERVALS[o["interval"]]
    n_k, tol = o["n_k"], o["tol"]
    values: dict[str, Any] = {}

    w = zak.zak_wilson_loop(p, None, interval[0], interval[1], n_k, tol=tol)
    values.update(wilson_Z_plus=w.Z_plus, wilson_Z_minus=w.Z_minus, wilson_Z_total=w.Z_total, wilson_nodes=w.n_k)

    quad: dict[str, Any] = dict.fromkeys(("quadrature_Z_plus", "quadrature_Z_minus", "quadrature_Z_total", "quadrature_nodes"))
    closed = None
    if isinstance(p, SSQW):
        closed = zak.zak_closed_form_ssqw(*p.angles)
    else:
        q = zak.zak_quadrature(p, None, interval, n_k, tol=tol)
        quad = dict(quadrature_Z_plus=q.Z_plus, quadrature_Z_minus=q.Z_minus, quadrature_Z_total=q.Z_total, quadrature_nodes=q.n_k)
    values.update(quad)
    values["closed_form_ssqw"] = closed
    try:
        values["endpoint_Z_total"] = zak.zak_endpoint_formula(p, interval)
    except DomainError:
        values["endpoint_Z_total"] = None

    zx, zy = zak.zak_vector_2d(p, None, o["flip_y"], interval, n_k, tol)
    values.update(Zx=zx, Zy=zy)
    kk = _linspace(zak.FULL_ZONE, o["curvature_points"])
    values["max_berry_curvature"] = zak.berry_curvature_check(p, None, kk, kk, flip_y=o["flip_y"])

    rows = [[name, value] for name, value in values.items()]
    meta = {
        "interval": list(interval),
        "grid": {"n_k": n_k, "curvature_points": o["curvature_points"]},
        "quadrature": {"rule": "simpson+richardson", "tol": tol},
        "flip_y": o["flip_y"],
    }
    return Table(COLUMNS["zak1d"], rows, meta)


def _cmd_landscape(cfg: RunConfig) -> Table:
    o = cfg.options
    axis1 = _linspace(o["param1_range"], o["grid"])
    axis2 = None if cfg.protocol == "hqw" else _linspace(o["param2_range"], o["grid"])
    interval = INTERVALS[o["interval"]]
    land = zak.zak_landscape(cfg.protocol, axis1, axis2, o["flip_y"], o["n_k"], interval, o["tol"])
    zx, zy, sing = land.Zx_grid, land.Zy_grid, land.singular
    rows = []
    if axis2 is None:
        for i, a in enumerate(axis1):
            rows.append([float(a), None, _masked(zx, i), _masked(zy, i), int(sing[i])])
    else:
        for i, a in enumerate(axis1):
            for j, b in enumerate(axis2):
                rows.append([float(a), float(b), _masked(zx, (i, j)), _masked(zy, (i, j)), int(sing[i, j])])
    meta = {
        "grid": {"param1_range": o["param1_range"], "param2_range": None if axis2 is None else o["param2_range"], "points": o["grid"], "n_k": o["n_k"]},
        "interval": list(interval),
        "quadrature": {"method": "WilsonLoop", "tol": o["tol"]},
        "flip_y": o["flip_y"],
        "singular_cells": int(np.sum(sing)),
    }
    return Table(COLUMNS["landscape"], rows, meta)


def _masked(grid: np.ma.MaskedArray, index) -> Optional[float]:
    return None if np.ma.getmaskarray(grid)[index] else float(grid[index])


def _cmd_dirac(cfg: RunConfig) -> Table:
    o = cfg.options
    if o["sweep"]:
        axis = np.linspace(-math.pi, math.pi, o["sweep"])
        n_angles = len(ANGLE_FLAGS[cfg.protocol])
        grids = np.meshgrid(*([axis] * n_angles), indexing="ij")
        family = [make_params(cfg.protocol, *(float(g.flat[i]) for g in grids)) for i in range(grids[0].size)]
    else:
        family = [cfg.params]
    points = bands.find_dirac_points(family, tuple(o["k_range"]), o["tolerance"], o["samples"])
    rows = []
    for q in points:
        angles = q.params.angles
        rows.append([angles[0], angles[1] if len(angles) > 1 else None, q.k, q.gap_at, q.cos_e, int(q.extended)])
    meta = {
        "grid": {"k_range": o["k_range"], "samples": o["samples"], "sweep": o["sweep"]},
        "tolerance": o["tolerance"],
        "gapless_parameter_count": len(bands.gapless_parameters(points)),
    }
    return Table(COLUMNS["dirac"], rows, meta)


def _cmd_trsregion(cfg: RunConfig) -> Table:
    o = cfg.options
    theta1 = o["theta1"]
    mask = symmetry.trs_region_mask(theta1, _linspace(o["theta2_range"], o["grid"]), _linspace(o["k_range"], o["grid"]))
    rows = []
    for i, t2 in enumerate(mask.theta2_axis):
        for j, k in enumerate(mask.k_axis):
            rows.append([float(t2), float(k), int(mask.allowed[i, j]), int(symmetry.n2_sign_preserved(theta1, t2, k))])
    flipped = symmetry.flip_theta1(SSQW(theta1, 0.0))
    meta = {
        "parameters": {"theta1": theta1, "theta1_flipped": flipped.theta1},
        "grid": {"theta2_range": o["theta2_range"], "k_range": o["k_range"], "points": o["grid"]},
        "allowed_fraction": mask.fraction,
    }
    return Table(COLUMNS["trsregion"], rows, meta)


def _run_walk(cfg: RunConfig) -> tuple[walk.WalkState, walk.WalkState]:
    o = cfg.options
    coin = coins.apply_coin(coins.rotation_matrix(coins.RotationSpec(2, o["coin_rotation"])), coins.H)
    params_y = cfg.params
    if o["flip_y"]:
        if o["dims"] != 2:
            raise UsageError("--flip-y needs --dims 2")
        params_y = symmetry.flip_theta1(cfg.params)
    if o["dims"] == 1:
        start = walk.initial_state(coin)
        return start, walk.evolve(start, cfg.params, None, o["steps"])
    start = walk.initial_state_2d(coin, coin)
    return start, walk.evolve(start, cfg.params, params_y, o["steps"])


def _cmd_walk(cfg: RunConfig) -> Table:
    start, state = _run_walk(cfg)
    coin_p = state.coin_probabilities()
    if state.dims == 1:
        coin_p = coin_p[:, None, :]
    rows = []
    for i, x in enumerate(state.xs):
        for j, y in enumerate(state.ys):
            ph, pv = float(coin_p[i, j, 0]), float(coin_p[i, j, 1])
            rows.append([int(x), int(y), ph, pv, ph + pv])
    try:
        phase = walk.overlap_phase(start, state)
    except DomainError:
        phase = None
    meta = {
        "grid": {"steps": cfg.options["steps"], "dims": cfg.options["dims"]},
        "flip_y": cfg.options["flip_y"],
        "norm": state.norm,
        "overlap_phase": phase,
    }
    return Table(COLUMNS["walk"], rows, meta)


def _cmd_timebins(cfg: RunConfig) -> Table:
    o = cfg.options
    tb = walk.TimeBinConfig(o["dt_x"], o["dt_y"], o["pulse_width"], o["rep_period"], o["transmission"])
    _, state = _run_walk(cfg)
    hist = walk.to_time_bins(state, tb, o["steps"])
    recovered = walk.from_time_bins(hist, tb)
    if o["shots"]:
        counts, lost = walk.sample_counts(hist, o["shots"], cfg.seed)
    else:
        counts, lost = [None] * len(hist.bins), None
    rows = []
    for b, c in zip(hist.bins, counts):
        x, y = b.site
        rows.append([b.time, x, y, b.coin, b.probability, float(recovered[b.site]["HV".index(b.coin)]), None if c is None else int(c)])
    meta = {
        "grid": {"steps": o["steps"], "dims": o["dims"]},
        "timing": {"dt_x": tb.dt_x, "dt_y": tb.dt_y, "pulse_width": tb.pulse_width, "rep_period": tb.rep_period},
        "per_step_transmission": tb.per_step_transmission,
        "detected_probability": hist.detected,
        "shots": o["shots"],
        "lost_counts": lost,
    }
    return Table(COLUMNS["timebins"], rows, meta)


_HANDLERS = {
    "dispersion": _cmd_dispersion,
    "norms": _cmd_norms,
    "zak1d": _cmd_zak1d,
    "landscape": _cmd_landscape,
    "dirac": _cmd_dirac,
    "trsregion": _cmd_trsregion,
    "walk": _cmd_walk,
    "timebins": _cmd_timebins,
}


def run(cfg: RunConfig) -> Table:
    table = _HANDLERS[cfg.command](cfg)
    header = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": cfg.command,
        "protocol": cfg.protocol,
        "parameters": _params_meta(cfg.params),
        "seed": cfg.seed,
        "columns": list(table.columns),
    }
    header.update(table.metadata)
    table.metadata = header
    return table


# -- emission ----------------------------------------------------------------


def _fmt_number(v: Any) -> Optional[str]:
    if v is None:
        return None
    if isinstance(v, (bool, np.bool_)):
        return None
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v) + 0.0  # no negative zero
        return format(v, ".17g") if math.isfinite(v) else None
    return None


def _json_value(v: Any) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    s = _fmt_number(v)
    return "null" if s is None else s


def render(table: Table, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow(["" if v is None else (v if isinstance(v, str) else _fmt_number(v) or "") for v in row])
        return buf.getvalue()
    lines = ["{", f'  "metadata": {_json_value(table.metadata)},', '  "data": [']
    records = [_json_value(dict(zip(table.columns, row))) for row in table.rows]
    lines += [f"    {r}," for r in records[:-1]] + ([f"    {records[-1]}"] if records else [])
    lines += ["  ]", "}"]
    return "\n".join(lines) + "\n"


def output_path(cfg: RunConfig) -> Optional[str]:
    """Resolve ``--out`` against the output-directory override, if set."""
    base = os.environ.get(OUTPUT_DIR_ENV)
    if cfg.out is None:
        return None if not base else os.path.join(base, f"{cfg.command}.{cfg.fmt}")
    if base and not os.path.isabs(cfg.out):
        return os.path.join(base, cfg.out)
    return cfg.out


def emit(table: Table, cfg: RunConfig) -> Optional[str]:
    text = render(table, cfg.fmt)
    path = output_path(cfg)
    if path is None:
        sys.stdout.write(text)
        return None
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def main(argv: Optional[Sequence[str]] = None) -> int:
    cfg = parse_args(argv)
    try:
        emit(run(cfg), cfg)
    except UsageError as exc:
        print(f"zakwalk: error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"zakwalk: domain error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"zakwalk: I/O error: {exc}", file=sys.stderr)
        return 4
    except InternalError as exc:
        print(f"zakwalk: internal error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"zakwalk: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
