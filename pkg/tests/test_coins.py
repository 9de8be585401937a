import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from zakwalk.coins import (
    H,
    IDENTITY,
    SIGMA_1,
    SIGMA_2,
    SIGMA_3,
    V,
    CoinState,
    RotationSpec,
    apply_coin,
    is_unitary,
    momentum_step_unitary,
    rotation_matrix,
    rx,
    ry,
    translation,
)
from zakwalk.params import HQW, NCRQW, SSQW

angles = st.floats(-math.pi, math.pi)
R2 = math.sqrt(2) / 2

params_strategy = st.one_of(
    st.builds(HQW, angles),
    st.builds(NCRQW, angles, angles),
    st.builds(SSQW, angles, angles),
)


def expm_oracle(axis, angle):
    # R = exp(i angle G) with G = n1 s1 - n2 s2 - n3 s3
    gen = {1: SIGMA_1, 2: -SIGMA_2, 3: -SIGMA_3}[axis]
    return expm(1j * angle * gen)


def test_rotation_examples():
    np.testing.assert_allclose(rotation_matrix(RotationSpec(2, 0.0)), IDENTITY, atol=1e-15)
    np.testing.assert_allclose(ry(math.pi / 4), [[R2, -R2], [R2, R2]], atol=1e-15)
    np.testing.assert_allclose(rx(math.pi / 2), [[0, 1j], [1j, 0]], atol=1e-15)


@given(st.sampled_from([1, 2, 3]), angles)
def test_rotation_matches_matrix_exponential(axis, angle):
    np.testing.assert_allclose(rotation_matrix(RotationSpec(axis, angle)), expm_oracle(axis, angle), atol=1e-12)


@given(st.sampled_from([1, 2, 3]), angles)
def test_rotation_unitary_and_inverse(axis, angle):
    r = rotation_matrix(RotationSpec(axis, angle))
    assert is_unitary(r)
    assert abs(abs(np.linalg.det(r)) - 1) < 1e-12
    inv = rotation_matrix(RotationSpec(axis, -angle))
    np.testing.assert_allclose(inv, r.conj().T, atol=1e-12)


def test_rotation_spec_validation():
    with pytest.raises(ValueError):
        RotationSpec(4, 0.1)
    assert abs(RotationSpec(1, 3 * math.pi).angle) == pytest.approx(math.pi)


def test_translation():
    t = translation(0.3)
    np.testing.assert_allclose(t, np.diag([np.exp(0.3j), np.exp(-0.3j)]))
    assert translation(np.zeros(5)).shape == (5, 2, 2)


def test_step_unitary_examples():
    np.testing.assert_allclose(momentum_step_unitary(HQW(0.0), 0.0), IDENTITY, atol=1e-15)
    k = np.linspace(-math.pi, math.pi, 31)
    u = momentum_step_unitary(HQW(math.pi / 4), k)
    phases = np.angle(np.linalg.eigvals(u))
    e = np.max(np.abs(phases), axis=-1)
    np.testing.assert_allclose(np.cos(e), np.cos(k) * math.cos(math.pi / 4), atol=1e-12)


@given(angles, angles)
def test_reduction_unitaries(theta, k):
    np.testing.assert_allclose(momentum_step_unitary(NCRQW(theta, 0.0), k), momentum_step_unitary(HQW(theta), k), atol=1e-12)
    np.testing.assert_allclose(momentum_step_unitary(SSQW(theta, 0.0), k), momentum_step_unitary(HQW(theta), k), atol=1e-12)


@given(params_strategy, angles)
def test_step_unitary_is_unitary(params, k):
    u = momentum_step_unitary(params, k)
    assert is_unitary(u)
    assert abs(abs(np.linalg.det(u)) - 1) < 1e-12


def test_step_unitary_order_explicit():
    t, p, k = 0.4, 1.1, 0.7
    np.testing.assert_allclose(momentum_step_unitary(NCRQW(t, p), k), translation(k) @ ry(t) @ rx(p), atol=1e-15)
    np.testing.assert_allclose(
        momentum_step_unitary(SSQW(t, p), k),
        translation(k / 2) @ ry(p) @ translation(k / 2) @ ry(t),
        atol=1e-15,
    )


def test_apply_coin_examples():
    assert apply_coin(IDENTITY, H) == CoinState(1, 0)
    s = apply_coin(ry(math.pi / 4), H)
    assert s.h == pytest.approx(R2) and s.v == pytest.approx(R2)
    s = apply_coin(ry(math.pi / 2), V)
    assert s.h == pytest.approx(-1) and abs(s.v) < 1e-15


@given(params_strategy, angles, st.complex_numbers(max_magnitude=1), st.complex_numbers(max_magnitude=1))
def test_apply_coin_preserves_norm(params, k, a, b):
    norm = math.hypot(abs(a), abs(b))
    if norm < 1e-3:
        return
    s = CoinState(a / norm, b / norm)
    out = apply_coin(momentum_step_unitary(params, k), s)
    assert abs(out.norm - 1) < 1e-12
