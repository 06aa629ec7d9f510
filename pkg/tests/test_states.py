from __future__ import annotations

import json
import math

import numpy as np
import oracles
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bb84opt.linalg import HADAMARD, basis_vector, gram, haar_random_unitary, max_abs
from bb84opt.states import (
    Basis,
    DegenerateRateError,
    ErrorRates,
    InteractionVectors,
    MeasurementSetup,
    computational_setup,
    conjugate_setup,
    delta_kets,
    delta_pm,
    encode,
    fuchs_setup,
    ivs_from_pijs,
    ivs_uv_from_xy,
    ivs_xy_from_uv,
    optimal_ivs,
    optimal_pijs,
    pijs_from_ivs,
    random_setup,
)

XY, UV = Basis.COMPUTATIONAL, Basis.HADAMARD
D_STAR = 0.5 * (1 - 1 / math.sqrt(2))

rate = st.floats(0.01, 0.49)
seeds = st.integers(0, 2**32 - 1)


def test_basis_conjugation_and_parsing():
    for b in Basis:
        assert b.conjugate.conjugate is b
    assert Basis.parse("uv") is UV and Basis.parse(XY) is XY
    with pytest.raises(ValueError):
        Basis.parse("z")


def test_error_rates_domain():
    r = ErrorRates(0.1, 0.3)
    assert r.fidelity(XY) == 0.9 and r.disturbance(UV) == 0.3
    for bad in (-0.01, 0.51, float("nan")):
        with pytest.raises(ValueError):
            ErrorRates(bad, 0.1)


def test_encode_examples():
    assert np.array_equal(encode(0, XY), [1, 0])
    assert max_abs(encode(0, UV) - np.array([1, 1]) / math.sqrt(2)) < 1e-15
    assert max_abs(encode(1, UV) - np.array([1, -1]) / math.sqrt(2)) < 1e-15


def test_delta_pm_examples():
    assert max_abs(np.array(delta_pm(0)) - 1 / math.sqrt(2)) < 1e-15
    assert delta_pm(0.5) == pytest.approx((1, 0), abs=1e-15)
    p, m = delta_pm(0.1464466)
    # sqrt(0.853553) and sqrt(0.146447)
    assert p == pytest.approx(math.sqrt(1 - 0.1464466), abs=1e-6)
    assert m == pytest.approx(math.sqrt(0.1464466), abs=1e-6)
    assert (p, m) == pytest.approx((0.923880, 0.382683), abs=1e-6)
    with pytest.raises(ValueError):
        delta_pm(0.6)


@given(st.floats(0, 0.5))
def test_delta_pm_identities(d):
    p, m = delta_pm(d)
    assert p * p + m * m == pytest.approx(1, abs=1e-12)
    assert 2 * p * m == pytest.approx(1 - 2 * d, abs=1e-12)
    assert p * p - m * m == pytest.approx(2 * math.sqrt(d * (1 - d)), abs=1e-12)


def test_delta_kets_examples():
    k, kh = delta_kets(0)
    assert np.array_equal(k, [1, 0])
    assert max_abs(kh - np.array([1, 1]) / math.sqrt(2)) < 1e-15
    k, kh = delta_kets(0.1)
    assert max_abs(HADAMARD @ k - kh) < 1e-12
    assert max_abs(delta_kets(0.25)[0] - [math.sqrt(0.75), 0.5]) < 1e-15


def test_named_setups():
    assert np.array_equal(computational_setup().directions, np.eye(4))
    f = fuchs_setup().directions
    for k, e in enumerate((0, 3, 2, 1)):
        assert np.array_equal(f[:, k], basis_vector(e, 4))
    for m in (computational_setup(), fuchs_setup()):
        assert m.signs == (1, -1, 1, -1)
        assert [m.guess(k) for k in range(4)] == [0, 1, 0, 1]


def test_setup_validation():
    with pytest.raises(ValueError):
        MeasurementSetup(np.ones((4, 4)))
    with pytest.raises(ValueError):
        MeasurementSetup(np.eye(4), signs=(1, 1, 1, -1))


def test_setup_canonical_reorders_signs():
    m = MeasurementSetup(np.eye(4), XY, (-1, 1, -1, 1))
    c = m.canonical()
    assert c.signs == (1, -1, 1, -1)
    assert np.array_equal(c.directions, np.eye(4)[:, [1, 0, 3, 2]])


def test_setup_json_round_trip():
    m = random_setup(4, UV)
    back = MeasurementSetup.from_dict(json.loads(json.dumps(m.to_dict())))
    assert np.array_equal(back.directions, m.directions) and back.basis is UV


def test_conjugate_of_fuchs_is_hadamard_fuchs():
    f = conjugate_setup(fuchs_setup()).directions
    bar = [encode(0, UV), encode(1, UV)]
    expected = [np.kron(bar[i], bar[j]) for i, j in ((0, 0), (1, 1), (1, 0), (0, 1))]
    for k in range(4):
        assert max_abs(f[:, k] - expected[k]) < 1e-12


def test_conjugate_setup_twice_is_identity():
    for m in (computational_setup(), fuchs_setup(), random_setup(1)):
        twice = conjugate_setup(conjugate_setup(m))
        assert twice.basis is m.basis
        assert max_abs(twice.directions - m.directions) < 1e-12
        assert max_abs(gram(conjugate_setup(m).directions.T) - np.eye(4)) < 1e-12


def test_optimal_ivs_endpoints():
    m = computational_setup()
    ivs = optimal_ivs(XY, ErrorRates(0.2, 0.5), m)
    assert max_abs(ivs.xi_0 - basis_vector(0, 4)) < 1e-15
    assert max_abs(ivs.xi_1 - basis_vector(1, 4)) < 1e-15
    assert abs(np.vdot(ivs.xi_0, ivs.xi_1)) < 1e-15
    ivs = optimal_ivs(XY, ErrorRates(0.2, 0.0), m)
    both = (basis_vector(0, 4) + basis_vector(1, 4)) / math.sqrt(2)
    assert max_abs(ivs.xi_0 - both) < 1e-15 and max_abs(ivs.xi_1 - both) < 1e-15


def test_optimal_ivs_basis_mismatch():
    with pytest.raises(ValueError):
        optimal_ivs(UV, ErrorRates(0.1, 0.1), computational_setup(XY))


@given(rate, rate, seeds)
def test_optimal_ivs_invariants(d_xy, d_uv, seed):
    r = ErrorRates(d_xy, d_uv)
    for basis in (XY, UV):
        ivs = optimal_ivs(basis, r, random_setup(seed, basis))
        assert ivs.is_valid(1e-10)
        target = 1 - 2 * r.disturbance(basis.conjugate)
        assert abs(np.vdot(ivs.xi_0, ivs.xi_1) - target) < 1e-10
        assert abs(np.vdot(ivs.zeta_0, ivs.zeta_1) - target) < 1e-10


def test_ivs_json_round_trip():
    ivs = optimal_ivs(XY, ErrorRates(0.1, 0.2), random_setup(3))
    back = InteractionVectors.from_dict(json.loads(json.dumps(ivs.to_dict())))
    assert max_abs(back.as_matrix() - ivs.as_matrix()) == 0 and back.basis is XY


def test_joint_states_without_disturbance():
    r = ErrorRates(0.0, 0.2)
    m = random_setup(2)
    ivs = optimal_ivs(XY, r, m)
    p = pijs_from_ivs(XY, r, ivs, m)
    for a, s in enumerate(p.states):
        assert np.array_equal(s, np.kron(encode(a, XY), ivs.xi[a]))


@given(rate, rate, seeds)
def test_joint_state_invariants(d_xy, d_uv, seed):
    r = ErrorRates(d_xy, d_uv)
    for basis in (XY, UV):
        p = optimal_pijs(basis, r, random_setup(seed, basis))
        assert p.defects()["norm"] < 1e-12
        assert p.defects()["overlap"] < 1e-9


def test_x_state_product_form():
    for d_xy, d_uv in ((0.1, 0.1), (0.3, 0.05), (0.0, 0.5)):
        p = optimal_pijs(XY, ErrorRates(d_xy, d_uv), computational_setup())
        assert max_abs(p.x_state - oracles.optimal_x_state_product_form(d_xy, d_uv)) < 1e-12


@given(rate, rate, seeds)
def test_partial_trace_gives_eve_mixture(d_xy, d_uv, seed):
    r = ErrorRates(d_xy, d_uv)
    ivs = optimal_ivs(XY, r, random_setup(seed))
    p = pijs_from_ivs(XY, r, ivs, random_setup(seed))
    for a in range(2):
        expected = (1 - d_xy) * np.outer(ivs.xi[a], ivs.xi[a].conj()) + d_xy * np.outer(ivs.zeta[a], ivs.zeta[a].conj())
        assert max_abs(oracles.partial_trace_first_qubit(p.states[a]) - expected) < 1e-12


def test_schmidt_split_recovers_ivs():
    r = ErrorRates(0.2, 0.3)
    ivs = optimal_ivs(UV, r, random_setup(6, UV))
    back = ivs_from_pijs(pijs_from_ivs(UV, r, ivs, random_setup(6, UV)))
    assert max_abs(back.as_matrix() - ivs.as_matrix()) < 1e-12


def test_schmidt_split_degenerate_component_is_zero():
    r = ErrorRates(0.0, 0.3)
    back = ivs_from_pijs(optimal_pijs(XY, r, computational_setup()))
    assert np.array_equal(back.zeta_0, np.zeros(4))


def test_uv_from_xy_matches_direct_construction():
    r = ErrorRates(0.1, 0.1)
    for m in (computational_setup(), fuchs_setup(), random_setup(8)):
        uv = ivs_uv_from_xy(optimal_ivs(XY, r, m), r)
        direct = optimal_ivs(UV, r, conjugate_setup(m))
        assert max_abs(uv.as_matrix() - direct.as_matrix()) < 1e-9
        assert abs(np.vdot(uv.xi_0, uv.xi_1) - (1 - 2 * r.d_xy)) < 1e-9
        back = ivs_xy_from_uv(uv, r)
        assert max_abs(back.as_matrix() - optimal_ivs(XY, r, m).as_matrix()) < 1e-9


@given(rate, rate, seeds)
def test_conjugation_round_trip(d_xy, d_uv, seed):
    r = ErrorRates(d_xy, d_uv)
    ivs = optimal_ivs(XY, r, random_setup(seed))
    uv = ivs_uv_from_xy(ivs, r)
    assert uv.is_valid(1e-9)
    assert max_abs(ivs_xy_from_uv(uv, r).as_matrix() - ivs.as_matrix()) < 1e-9


def test_conjugation_degenerate_rate():
    r = ErrorRates(0.1, 0.0)
    with pytest.raises(DegenerateRateError):
        ivs_uv_from_xy(optimal_ivs(XY, r, computational_setup()), r)


def test_conjugation_wrong_basis():
    r = ErrorRates(0.1, 0.2)
    with pytest.raises(ValueError):
        ivs_uv_from_xy(optimal_ivs(UV, r, computational_setup(UV)), r)


def test_haar_setup_is_complex():
    # arbitrary measurement bases carry complex entries end to end
    m = MeasurementSetup(haar_random_unitary(4, 0))
    ivs = optimal_ivs(XY, ErrorRates(0.1, 0.2), m)
    assert np.abs(ivs.xi_0.imag).max() > 1e-3
    assert ivs.is_valid()
