"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v`` (the report lines are
printed even with output capture on) or ``python tests/test_acceptance.py``.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from zakwalk.bands import dispersion, find_dirac_points, gapless_parameters, norm_vector
from zakwalk.coins import momentum_step_unitary
from zakwalk.errors import SingularPath, SingularPoint
from zakwalk.params import HQW, NCRQW, SSQW
from zakwalk.symmetry import trs_region_mask
from zakwalk.walk import (
    TimeBinConfig,
    evolve,
    from_time_bins,
    initial_state,
    initial_state_2d,
    step_1d,
    to_time_bins,
)
from zakwalk.zak import (
    berry_curvature_check,
    bloch_eigenvectors,
    phase_distance,
    wilson_phase,
    zak_landscape,
    zak_method_report,
    zak_wilson_loop,
)

PI = math.pi
SEED = 20240601


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        line = f"[acceptance {number:2d}] {'PASS' if ok else 'FAIL'}  {detail}"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return emit


def random_params(rng, protocol=None):
    protocol = protocol or rng.choice(["hqw", "ncrqw", "ssqw"])
    a, b = rng.uniform(-PI, PI, 2)
    return {"hqw": HQW(a), "ncrqw": NCRQW(a, b), "ssqw": SSQW(a, b)}[protocol]


def test_01_dispersion_oracle(report):
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    samples = [(random_params(rng), rng.uniform(-PI, PI)) for _ in range(10_000)]
    closed = np.array([dispersion(p, k) for p, k in samples])
    unitaries = np.array([momentum_step_unitary(p, k) for p, k in samples])
    brute = np.max(np.abs(np.angle(np.linalg.eigvals(unitaries))), axis=-1)
    elapsed = time.perf_counter() - start
    worst = float(np.max(np.abs(closed - brute)))
    report(1, worst <= 1e-10 and elapsed < 5.0, f"max |E - eigenphase| = {worst:.2e} over 1e4 samples, {elapsed:.2f} s")


def test_02_norm_unit_length(report):
    rng = np.random.default_rng(SEED + 1)
    start = time.perf_counter()
    worst, count = 0.0, 0
    while count < 10_000:
        p, k = random_params(rng), rng.uniform(-PI, PI)
        try:
            n = norm_vector(p, k)
        except SingularPoint:
            continue
        worst = max(worst, abs(math.sqrt(n.n1**2 + n.n2**2 + n.n3**2) - 1.0))
        count += 1
    elapsed = time.perf_counter() - start
    report(2, worst <= 1e-10 and elapsed < 2.0, f"max ||n| - 1| = {worst:.2e} over 1e4 samples, {elapsed:.2f} s")


def test_03_reduction_identities(report):
    k = np.linspace(-PI, PI, 201)
    worst = 0.0
    for theta in np.linspace(-PI, PI, 21):
        h = dispersion(HQW(theta), k)
        worst = max(worst, float(np.max(np.abs(dispersion(NCRQW(theta, 0.0), k) - h))))
        worst = max(worst, float(np.max(np.abs(dispersion(SSQW(theta, 0.0), k) - h))))
    report(3, worst <= 1e-12, f"max deviation from HQW = {worst:.2e} on 21 x 201 grid")


def test_04_dual_method(report):
    rng = np.random.default_rng(SEED + 4)
    reports = []
    while len(reports) < 50:
        p = random_params(rng, "ncrqw")
        try:
            reports.append(zak_method_report(p, rng=rng))
        except (SingularPath, SingularPoint):
            continue
    agree = sum(r.agree for r in reports)
    healthy = all(r.wilson_ok and r.convergence_ratio >= 3 for r in reports)
    worst_gauge = max(r.gauge_deviation for r in reports)
    min_ratio = min(r.convergence_ratio for r in reports)
    median_diff = float(np.median([r.difference for r in reports]))
    detail = (
        f"methods agree on {agree}/50 points, median |dZ| = {median_diff:.4f} "
        "(quadrature total is 2 pi identically, see README); "
        f"Wilson self-checks: gauge dev <= {worst_gauge:.1e}, min refinement ratio {min_ratio:.1f}"
    )
    report(4, healthy, detail)


def test_05_trivial_phase(report):
    points = [
        (PI / 2, 0.0), (-PI / 2, 0.0), (PI / 2, PI), (-PI / 2, PI), (PI / 2, -PI),
        (0.0, PI / 2), (0.0, -PI / 2), (PI, PI / 2), (-PI, PI / 2), (PI, -PI / 2),
    ]
    worst = 0.0
    for theta, phi in points:
        p = NCRQW(theta, phi)
        assert max(abs(norm_vector(p, k).n3) for k in np.linspace(-1.5, 1.5, 31)) < 1e-12
        worst = max(worst, float(phase_distance(zak_wilson_loop(p).Z_total, PI)))
    report(5, worst <= 1e-6, f"max |Z_total - pi| = {worst:.2e} at 10 points with n3 = 0")


def test_06_gauge_invariance(report):
    rng = np.random.default_rng(SEED + 6)
    worst, trials = 0.0, 0
    while trials < 100:
        p = random_params(rng)
        ks = np.linspace(-PI / 2, PI / 2, 129)
        try:
            pairs = [bloch_eigenvectors(p, k) for k in ks]
        except SingularPoint:
            continue
        for band in ("u_plus", "u_minus"):
            u = np.array([getattr(x, band) for x in pairs])
            twisted = u * np.exp(1j * rng.uniform(-PI, PI, ks.size))[:, None]
            worst = max(worst, float(phase_distance(wilson_phase(u), wilson_phase(twisted))))
        trials += 1
    report(6, worst < 1e-10, f"max Zak change under random per-node twists = {worst:.2e} (100 trials)")


def test_07_berry_curvature(report):
    rng = np.random.default_rng(SEED + 7)
    k = np.linspace(-PI, PI, 64)
    worst, sets = 0.0, 0
    while sets < 10:
        px, py = random_params(rng), random_params(rng)
        try:
            values = [berry_curvature_check(px, py, k, k, flip_y=f) for f in (False, True)]
        except SingularPath:
            continue
        worst = max(worst, *values)
        sets += 1
    report(7, worst <= 1e-10, f"max plaquette |F| = {worst:.2e} on 64 x 64, 10 sets, with and without flip")


def test_08_flip_antisymmetry(report):
    axis = np.linspace(-PI, PI, 101)
    start = time.perf_counter()
    land = zak_landscape("ncrqw", axis, axis, flip_y=True)
    elapsed = time.perf_counter() - start
    ok_cells = ~land.singular
    dev = phase_distance(land.Zy_grid.data[ok_cells], -land.Zx_grid.data[ok_cells])
    worst = float(np.max(dev))
    detail = f"max |Zy + Zx| mod 2 pi = {worst:.2e} on {int(ok_cells.sum())} cells ({int(land.singular.sum())} undefined), {elapsed:.1f} s"
    report(8, worst <= 1e-8 and elapsed < 60, detail)


def test_09_trs_mask(report):
    t2 = np.linspace(-PI, PI, 201)
    ks = np.linspace(-PI, PI, 201)
    mismatches = 0
    for theta1 in (PI / 8, PI / 4):
        mask = trs_region_mask(theta1, t2, ks).allowed
        # hand-coded, vectorised evaluator of tan(t2)/tan(t1) > cos k (strict, 1e-12 margin)
        reference = (np.tan(t2)[:, None] / np.tan(theta1) - np.cos(ks)[None, :]) > 1e-12
        mismatches += int(np.sum(mask != reference))
    report(9, mismatches == 0, f"{mismatches} mismatching cells over 2 x 201 x 201")


def test_10_walk(report):
    checks = {}
    s1 = step_1d(initial_state(), HQW(PI / 4))
    p1 = dict(zip(s1.xs.tolist(), s1.probabilities().tolist()))
    checks["1 step"] = abs(p1[1] - 0.5) < 1e-12 and abs(p1[-1] - 0.5) < 1e-12
    s2 = evolve(initial_state(), HQW(PI / 4), n_steps=2)
    p2 = dict(zip(s2.xs.tolist(), s2.probabilities().tolist()))
    checks["2 steps"] = max(abs(p2[-2] - 0.25), abs(p2[0] - 0.5), abs(p2[2] - 0.25)) < 1e-12

    # plane-wave evolution on a 64-point grid then inverse transform
    worst_dual = 0.0
    for p in (HQW(PI / 4), NCRQW(0.4, 1.1), SSQW(0.3, 1.2)):
        s = p.shifts_per_step
        state = evolve(initial_state(), p, n_steps=10)
        q = 2 * PI * np.arange(64) / 64
        u = momentum_step_unitary(p, -s * q)
        hat = np.tile([1.0 + 0j, 0.0], (64, 1))
        for _ in range(10):
            hat = np.einsum("qab,qb->qa", u, hat)
        back = np.exp(1j * np.outer(state.xs, q)) @ hat / 64
        worst_dual = max(worst_dual, float(np.max(np.abs(back - state.amplitudes))))
    checks["dual 1e-10"] = worst_dual < 1e-10

    long = evolve(initial_state(), HQW(PI / 4), n_steps=1000)
    checks["norm 1e-12 @1000"] = abs(long.norm - 1) < 1e-12
    parity_ok = cone_ok = True
    for p in (HQW(0.7), NCRQW(0.4, 1.1), SSQW(0.3, 1.2)):
        for n in (1, 7, 20):
            st = evolve(initial_state(), p, n_steps=n)
            s = p.shifts_per_step
            prob = st.probabilities()
            cone_ok &= st.xs.min() >= -s * n and st.xs.max() <= s * n
            parity_ok &= bool(np.all(prob[(st.xs + s * n) % 2 == 1] == 0.0))
    checks["parity"] = parity_ok
    checks["light cone"] = cone_ok
    failed = [k for k, v in checks.items() if not v]
    report(10, not failed, f"dual-representation error {worst_dual:.1e}, norm error {abs(long.norm - 1):.1e}; failed: {failed or 'none'}")


def test_11_time_bins(report):
    cfg = TimeBinConfig(per_step_transmission=0.5)
    state = evolve(initial_state_2d(), HQW(PI / 4), n_steps=5)
    hist = to_time_bins(state, cfg, 5)
    back = from_time_bins(hist, cfg)
    coin_p = state.coin_probabilities()
    ox, oy = state.amplitudes.shape[0] // 2, state.amplitudes.shape[1] // 2
    support = {(int(x), int(y)) for x in state.xs for y in state.ys if coin_p[x + ox, y + oy].sum() > 0}
    worst = max(float(np.max(np.abs(v - coin_p[x + ox, y + oy]))) for (x, y), v in back.items())
    ok = set(back) == support and worst <= 1e-12 and abs(hist.detected - 0.5**5) <= 1e-12
    report(11, ok, f"round-trip error {worst:.1e} on {len(back)} sites; detected {hist.detected:.12f} vs 0.5^5")


def test_12_dirac_points(report):
    pts = find_dirac_points(HQW(0.0))
    hqw_ok = len(pts) == 2 and {p.gap_at for p in pts} == {"E0", "Epi"}
    for p in pts:
        target = 0.0 if p.gap_at == "E0" else PI
        hqw_ok &= abs(math.remainder(p.k - target, 2 * PI)) < 1e-10

    axis = np.linspace(-PI, PI, 17)
    family = [NCRQW(a, b) for a in axis for b in axis]
    sweep = find_dirac_points(family)
    worst = 0.0
    for p in sweep:
        t, f = p.params.angles
        # at a gapless point cos E = cos(k - k0) with k0 = atan2(sin t sin f, cos t cos f)
        k0 = math.atan2(math.sin(t) * math.sin(f), math.cos(t) * math.cos(f))
        target = k0 if p.gap_at == "E0" else k0 + PI
        worst = max(worst, abs(math.remainder(p.k - target, 2 * PI)))
    count = len(gapless_parameters(sweep))
    detail = f"HQW theta=0 ok={hqw_ok}; NCRQW 17x17 sweep: {count} gapless parameter points (13 claimed), max |dk| = {worst:.1e}"
    report(12, hqw_ok and worst < 1e-10, detail)


CLI_RUNS = [
    ["dispersion", "--protocol", "ncrqw", "--theta", "0.7853981634", "--phi", "0.3", "--k-points", "101"],
    ["norms", "--protocol", "ssqw", "--theta1", "0.4", "--theta2", "1.1", "--k-points", "51"],
    ["zak1d", "--protocol", "ncrqw", "--theta", "0.4", "--phi", "1.1", "--flip-y"],
    ["landscape", "--protocol", "ncrqw", "--grid", "41", "--flip-y"],
    ["dirac", "--protocol", "ncrqw", "--sweep", "9"],
    ["trsregion", "--theta1", "0.39269908169872414", "--grid", "61"],
    ["walk", "--protocol", "ssqw", "--theta1", "0.3", "--theta2", "1.2", "--dims", "2", "--steps", "6", "--flip-y"],
    ["timebins", "--protocol", "hqw", "--theta", "0.7853981634", "--steps", "5", "--shots", "1000", "--seed", "3"],
]


def test_13_determinism(report, tmp_path):
    identical, total = 0, 0
    for argv in CLI_RUNS:
        for fmt in ("csv", "json"):
            outputs = []
            for i in range(2):
                path = tmp_path / f"{argv[0]}_{fmt}_{i}"
                proc = subprocess.run(
                    [sys.executable, "-m", "zakwalk", *argv, "--format", fmt, "--out", str(path)],
                    capture_output=True,
                )
                assert proc.returncode == 0, proc.stderr.decode()
                outputs.append(path.read_bytes())
            total += 1
            identical += outputs[0] == outputs[1]
    report(13, identical == total, f"{identical}/{total} command/format pairs byte-identical on rerun")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
