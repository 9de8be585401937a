import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from zakwalk.bands import norm_vector
from zakwalk.errors import DegenerateTheta1, SingularPoint, UndefinedArgument, WrongVariant
from zakwalk.params import HQW, NCRQW, SSQW
from zakwalk.symmetry import (
    flip_theta1,
    flipped_argument,
    flipped_argument_walk,
    n2_sign_preserved,
    trs_allowed,
    trs_region_mask,
)
from zakwalk.zak import bloch_argument

PI = math.pi
angles = st.floats(-PI, PI)
nondegenerate = angles.filter(lambda t: abs(math.sin(t)) > 1e-6)


def test_flip_theta1():
    assert flip_theta1(SSQW(PI / 8, PI / 4)) == SSQW(-PI / 8, PI / 4)
    with pytest.raises(WrongVariant):
        flip_theta1(HQW(0.3))
    with pytest.raises(WrongVariant):
        flip_theta1(NCRQW(0.3, 0.1))


@given(angles, angles)
def test_flip_theta1_involution(t1, t2):
    p = SSQW(t1, t2)
    assert flip_theta1(flip_theta1(p)) == p


@given(nondegenerate, angles, angles)
def test_n1_odd_under_flip(t1, t2, k):
    p = SSQW(t1, t2)
    try:
        a = norm_vector(p, k).as_array() * math.sin(norm_vector(p, k).E)
        b = norm_vector(flip_theta1(p), k).as_array() * math.sin(norm_vector(flip_theta1(p), k).E)
    except SingularPoint:
        return
    assert b[0] == pytest.approx(-a[0], abs=1e-12)


@pytest.mark.parametrize(
    "t1, t2, k, expected",
    [(PI / 4, PI / 4, PI / 2, True), (PI / 4, 0.0, 0.0, False), (PI / 8, PI / 4, 0.0, True)],
)
def test_trs_allowed_examples(t1, t2, k, expected):
    assert trs_allowed(t1, t2, k) is expected


def test_trs_boundary_excluded():
    # tan(pi/4) / tan(pi/4) = 1 = cos(0)
    assert not trs_allowed(PI / 4, PI / 4, 0.0)


@pytest.mark.parametrize("t1", [0.0, PI, -PI])
def test_trs_degenerate_theta1(t1):
    with pytest.raises(DegenerateTheta1):
        trs_allowed(t1, 0.3, 0.0)
    with pytest.raises(DegenerateTheta1):
        trs_region_mask(t1, [0.1, 0.2], [0.1, 0.2])


@given(nondegenerate, angles, angles)
def test_trs_oddness(t1, t2, k):
    assert trs_allowed(t1, t2, k) == trs_allowed(-t1, -t2, k)


def reference_mask(theta1, t2, k):
    # independent evaluator: row per theta2, column per k
    out = np.zeros((len(t2), len(k)), dtype=bool)
    for i in range(len(t2)):
        for j in range(len(k)):
            lhs = math.sin(t2[i]) * math.cos(theta1) / (math.cos(t2[i]) * math.sin(theta1))
            out[i, j] = lhs - math.cos(k[j]) > 1e-12
    return out


@pytest.mark.parametrize("theta1", [PI / 8, PI / 4])
def test_mask_matches_reference(theta1):
    t2 = np.linspace(-PI, PI, 61)
    k = np.linspace(-PI, PI, 61)
    mask = trs_region_mask(theta1, t2, k)
    assert mask.allowed.shape == (61, 61)
    ref = reference_mask(theta1, t2, k)
    # cells within rounding of the boundary may legitimately differ between evaluators
    lhs = np.tan(t2)[:, None] / math.tan(theta1) - np.cos(k)[None, :]
    clear = np.abs(lhs - 1e-12) > 1e-9
    assert np.array_equal(mask.allowed[clear], ref[clear])
    # k = pi/2 column: allowed iff tan(theta2) / tan(theta1) > 0
    col = trs_region_mask(theta1, t2, [0.0, PI / 2]).allowed[:, 1]
    ratio = np.tan(t2) / math.tan(theta1)
    assert np.array_equal(col[np.abs(ratio) > 1e-9], (ratio > 0)[np.abs(ratio) > 1e-9])


def test_mask_topology_grows_away_from_zero():
    t2 = np.linspace(0.05, PI / 2 - 0.05, 40)
    mask = trs_region_mask(PI / 8, t2, np.linspace(-PI, PI, 101))
    frac = mask.allowed.mean(axis=1)
    assert np.all(np.diff(frac) >= 0)
    assert 0 < mask.fraction < 1


def test_mask_is_reproducible():
    a = trs_region_mask(PI / 4, np.linspace(-3, 3, 31), np.linspace(-3, 3, 17))
    b = trs_region_mask(PI / 4, np.linspace(-3, 3, 31), np.linspace(-3, 3, 17))
    assert np.array_equal(a.allowed, b.allowed)
    with pytest.raises(ValueError):
        trs_region_mask(PI / 4, [0.1], [0.1, 0.2])


def test_flipped_argument():
    assert flipped_argument(0.0) == 0.0
    assert flipped_argument(PI / 3) == -PI / 3
    assert flipped_argument(flipped_argument(0.7)) == 0.7
    p = NCRQW(0.4, 1.1)
    assert flipped_argument_walk(p, 0.3) == -bloch_argument(p, 0.3)
    with pytest.raises(UndefinedArgument):
        flipped_argument_walk(HQW(0.0), 0.5)


def test_allowed_cells_keep_n2_sign_in_zak_window(rng):
    # inside |k| <= pi/2 the inequality is sufficient for sign(n2) to survive the flip
    checked = 0
    while checked < 1000:
        t1, t2 = rng.uniform(-PI, PI, 2)
        k = rng.uniform(-PI / 2, PI / 2)
        if abs(math.sin(t1)) < 1e-3 or not trs_allowed(t1, t2, k):
            continue
        p = SSQW(t1, t2)
        try:
            phi_x = bloch_argument(p, k)
            phi_y = bloch_argument(flip_theta1(p), k)
        except (SingularPoint, UndefinedArgument):
            continue
        assert n2_sign_preserved(t1, t2, k)
        # Bloch argument in the tan(phi) = n2 / n1 form, odd in n1
        tx, ty = math.tan(phi_x), math.tan(phi_y)
        if abs(tx) > 1e-9:
            assert math.copysign(1, tx) == -math.copysign(1, ty)
        checked += 1


def test_inequality_not_sufficient_outside_window():
    # documented limitation: allowed cell with |k| > pi/2 where n2 changes sign
    t1, t2, k = PI / 4, 0.1, 3.0
    assert trs_allowed(t1, t2, k)
    assert not n2_sign_preserved(t1, t2, k)
