import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from baltrunc.balance import (asymmetry, balance, build_canonical, certify, error_bound, is_canonical,
                              psi_zero, singular_perturbation, to_canonical, truncate)
from baltrunc.errors import BadDimension, BadInput, RepeatedHSV, SplitsMultiplicityGroup
from baltrunc.gramian import gramians, hankel_spectrum
from baltrunc.lti import StateSpace, check_stability, dc_gain, transfer_eval

import oracles

SIGMA, SIGNS, GAMMA = [10, 1, 0.1, 0.01], [1, 1, -1, -1], [1, 2, 3, 4]
FLIPPED = build_canonical(SIGMA, SIGNS, GAMMA)
ALL_PASS = StateSpace([[0.0, 1.0], [-2.0, -3.0]], [0.0, 1.0], [0.0, -6.0], 1.0)

# two-decimal display of the flipped-sign system
FLIPPED_DISPLAY = np.array([[-0.05, -0.18, 0.30, 0.40],
                            [-0.18, -2.00, 6.67, 8.08],
                            [-0.30, -6.67, -45.00, -109.09],
                            [-0.40, -8.08, -109.09, -800.00]])

# four-decimal display of the canonical power model (magnitudes)
POWER_A_DISPLAY = np.array([[-0.9913, 0.5924, -0.0467, 0.0020, 0.0000],
                            [-0.5924, -0.0216, 0.0087, -0.0004, -0.0000],
                            [0.0467, 0.0087, -0.1800, 0.0157, 0.0003],
                            [-0.0020, -0.0004, 0.0157, -0.1437, -0.0062],
                            [-0.0000, -0.0000, 0.0003, -0.0062, -0.1372]])
POWER_B_DISPLAY = np.array([4.8009, 0.5552, 0.1126, 0.0049, 0.0001])


def power_model():
    tau = np.array([5.01, 6.82, 7.38, 7.79])
    r = np.array([0.013, 0.014, 0.022, 0.025])
    return StateSpace(*oracles.arrow_dense(np.r_[-0.038 / 0.044, -1 / tau], np.full(4, 1 / 0.044),
                                           -r / tau, 1 / 0.044))


def random_canonical_system(rng, n, signs=None):
    sig, s, g = oracles.random_canonical(rng, n, signs)
    return build_canonical(sig, s, g), sig, s, g


def test_flipped_sign_construction_matches_display():
    np.testing.assert_allclose(FLIPPED.A, FLIPPED_DISPLAY, atol=0.005 + 1e-12)
    np.testing.assert_array_equal(FLIPPED.b, GAMMA)
    np.testing.assert_array_equal(FLIPPED.c, [1, 2, -3, -4])
    assert FLIPPED.A[0, 0] == pytest.approx(-0.05)
    assert FLIPPED.A[0, 1] == pytest.approx(-2 / 11)


def test_construction_against_entry_oracle(rng):
    for n in range(1, 8):
        sig, s, g = oracles.random_canonical(rng, n)
        A, b, c, _ = oracles.canonical(sig, s, g)
        sys = build_canonical(sig, s, g)
        np.testing.assert_allclose(sys.A, A, rtol=1e-15)
        np.testing.assert_array_equal(sys.c, c)


def test_scalar_canonical():
    sys = build_canonical([2.0], [1], [3.0])
    assert sys.A[0, 0] == pytest.approx(-9.0 / 4.0)


@pytest.mark.parametrize("args", [
    ([1.0, 2.0], [1, 1], [1, 1]),        # increasing
    ([2.0, 1.0], [1, 0], [1, 1]),        # bad sign
    ([2.0, 1.0], [1, 1], [1, -1]),       # negative weight
    ([2.0, 1.0], [1, 1], [1]),           # length mismatch
    ([2.0, 2.0], [1, -1], [1, 1]),       # repeated
])
def test_construction_rejects_bad_input(args):
    with pytest.raises(BadInput):
        build_canonical(*args)


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_constructed_system_is_balanced(n, seed):
    sys, sig, s, g = random_canonical_system(np.random.default_rng(seed), n)
    # close sigma values with opposite signs can put a pole within 1e-9 of the
    # origin; the diagonal-Gramian check is only meaningful when A is usable
    assume(np.linalg.cond(sys.A) < 1e10)
    pair = gramians(sys)
    scale = sig[0]
    assert np.abs(pair.P - np.diag(sig)).max() <= 1e-8 * scale
    assert np.abs(pair.Q - np.diag(sig)).max() <= 1e-8 * scale
    assert check_stability(sys).stable
    assert is_canonical(sys, s)


def test_power_model_canonical_form_matches_display():
    form = to_canonical(power_model())
    np.testing.assert_allclose(np.abs(form.sys.A), np.abs(POWER_A_DISPLAY), atol=6e-5)
    np.testing.assert_allclose(np.abs(form.sys.b), POWER_B_DISPLAY, atol=6e-5)
    np.testing.assert_allclose(np.abs(form.sys.c), POWER_B_DISPLAY, atol=6e-5)
    np.testing.assert_array_equal(form.signs.signs, [1, -1, -1, -1, -1])
    for w in np.geomspace(1e-3, 1e2, 12):
        assert transfer_eval(form.sys, 1j * w) == pytest.approx(transfer_eval(power_model(), 1j * w), rel=1e-8)


def test_first_order_balancing():
    bal = balance(StateSpace([[-1.0]], [2.0], [0.5]))
    assert bal.sigma.sigmas[0] == pytest.approx(0.5)
    assert bal.sys.A[0, 0] == pytest.approx(-1.0)
    assert abs(bal.sys.b[0]) == pytest.approx(1.0)
    assert bal.sys.b[0] * bal.sys.c[0] == pytest.approx(1.0)


def test_balance_recovers_values_after_similarity(rng):
    for _ in range(10):
        sys, sig, s, g = random_canonical_system(rng, 5)
        T = rng.standard_normal((5, 5)) + 2 * np.eye(5)
        bal = balance(sys.transform(T))
        np.testing.assert_allclose(bal.sigma.values, sig, rtol=1e-7)
        np.testing.assert_array_equal(bal.signs.signs, s)
        assert bal.canonical


def test_balance_of_canonical_system_is_itself_up_to_state_signs():
    bal = balance(FLIPPED)
    D = np.sign(bal.sys.b) * np.sign(FLIPPED.b)
    np.testing.assert_allclose(D[:, None] * bal.sys.A * D[None, :], FLIPPED.A, rtol=1e-9, atol=1e-9)


@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_canonical_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    sys, sig, s, g = random_canonical_system(rng, n)
    T = rng.standard_normal((n, n)) + 3 * np.eye(n)
    form = to_canonical(sys.transform(T))
    # the transformed Gramians lose about cond(T) in relative accuracy
    k = np.linalg.cond(T)
    np.testing.assert_allclose(form.sigma.values, sig, rtol=1e-8 * k)
    np.testing.assert_array_equal(form.signs.signs, s)
    np.testing.assert_allclose(form.gamma, g, rtol=1e-7 * k)
    np.testing.assert_allclose(form.sys.A, sys.A, rtol=1e-7 * k, atol=1e-9 * np.abs(sys.A).max())


def test_repeated_values_have_no_canonical_form():
    with pytest.raises(RepeatedHSV):
        to_canonical(ALL_PASS)


def test_truncation_partitions():
    bal = balance(FLIPPED)
    assert truncate(bal, 4) == bal.sys
    r2 = truncate(bal, 2)
    np.testing.assert_array_equal(r2.A, bal.sys.A[:2, :2])
    tail = StateSpace(bal.sys.A[2:, 2:], bal.sys.b[2:], bal.sys.c[2:])
    np.testing.assert_allclose(gramians(tail).P, np.diag([0.1, 0.01]), rtol=1e-8, atol=1e-12)


def test_order_inside_a_repeated_group_is_rejected():
    bal = balance(ALL_PASS)
    with pytest.raises(SplitsMultiplicityGroup):
        truncate(bal, 1)
    with pytest.raises(BadDimension):
        truncate(bal, 3)


def test_singular_perturbation_full_order_is_identity():
    bal = balance(FLIPPED)
    assert singular_perturbation(bal, 4) == bal.sys


def test_singular_perturbation_matches_dc_gain(rng):
    for _ in range(20):
        sys, *_ = random_canonical_system(rng, int(rng.integers(2, 8)))
        bal = balance(sys)
        for r in range(1, sys.n):
            red = singular_perturbation(bal, r)
            assert dc_gain(red) == pytest.approx(dc_gain(sys), rel=1e-9)


def test_singular_perturbation_is_schur_complement_oracle(rng):
    sys, *_ = random_canonical_system(rng, 5)
    bal = balance(sys)
    A, b, c = bal.sys.A, bal.sys.b, bal.sys.c
    r = 2
    A22i = np.linalg.inv(A[r:, r:])
    red = singular_perturbation(bal, r)
    np.testing.assert_allclose(red.A, A[:r, :r] - A[:r, r:] @ A22i @ A[r:, :r], rtol=1e-10)
    np.testing.assert_allclose(red.b, b[:r] - A[:r, r:] @ A22i @ b[r:], rtol=1e-10)
    np.testing.assert_allclose(red.c, c[:r] - c[r:] @ A22i @ A[r:, :r], rtol=1e-10)
    assert red.d == pytest.approx(-c[r:] @ A22i @ b[r:], rel=1e-10)


# achieved errors from the 10^5-point grid oracle: the peak sits at w = 0
FLIPPED_ROWS = [(1, 2.22, 1.78, False, False), (2, 0.22, 0.22, True, True), (3, 0.02, 0.02, True, True)]


@pytest.mark.parametrize("r,bound,achieved,tight,uniform", FLIPPED_ROWS)
def test_flipped_sign_certificates(r, bound, achieved, tight, uniform):
    cert = certify(FLIPPED, r)
    assert cert.bound == pytest.approx(bound, rel=1e-12)
    assert cert.achieved_error == pytest.approx(achieved, rel=1e-9)
    assert cert.tight is tight and cert.s2_uniform is uniform
    assert not cert.unexpected_tightness


def test_flipped_sign_oracle_values():
    A, b, c, d = oracles.canonical(SIGMA, SIGNS, GAMMA)
    for r, _, achieved, _, _ in FLIPPED_ROWS:
        Ae = np.block([[A, np.zeros((4, r))], [np.zeros((r, 4)), A[:r, :r]]])
        g = oracles.grid_hinf(Ae, np.r_[b, b[:r]], np.r_[c, -c[:r]], 0.0, points=20_000)
        assert g == pytest.approx(achieved, rel=1e-9)


def test_spa_error_equals_bound_when_signs_agree():
    cert = certify(FLIPPED, 2, "spa")
    assert cert.method == "singular_perturbation"
    assert cert.achieved_error == pytest.approx(0.22, rel=1e-8)
    assert cert.tight


def test_full_order_certificate():
    cert = certify(FLIPPED, 4)
    assert cert.bound == 0.0 and cert.achieved_error <= 1e-12 and cert.tight


def test_unknown_method():
    with pytest.raises(BadInput):
        certify(FLIPPED, 2, "hankel")


def test_psi_zero():
    bal = balance(FLIPPED)
    assert asymmetry(psi_zero(bal, 2)) <= 1e-8
    assert asymmetry(psi_zero(bal, 1)) > 1e-3
    assert psi_zero(bal, 3).shape == (1, 1)
    with pytest.raises(BadDimension):
        psi_zero(bal, 4)


def _uniform_tail_signs(rng, n, r):
    head = rng.choice([-1, 1], r)
    return np.r_[head, np.full(n - r, rng.choice([-1, 1]))]


@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_truncations_are_stable_and_within_bound(n, seed):
    rng = np.random.default_rng(seed)
    sys, *_ = random_canonical_system(rng, n)
    bal = balance(sys)
    r = int(rng.integers(1, n))
    cert = certify(bal, r)
    assert np.max(np.linalg.eigvals(cert.reduced.A).real) < 0
    assert cert.achieved_error <= cert.bound * (1 + 1e-6)


@pytest.mark.parametrize("method", ["truncation", "spa"])
@given(n=st.integers(2, 8), seed=st.integers(0, 2**32 - 1))
def test_uniform_trailing_signs_give_equality(method, n, seed):
    rng = np.random.default_rng(seed)
    r = int(rng.integers(1, n))
    sys, *_ = random_canonical_system(rng, n, _uniform_tail_signs(rng, n, r))
    cert = certify(sys, r, method)
    assert cert.s2_uniform
    assert abs(cert.achieved_error - cert.bound) <= 1e-6 * cert.bound
    assert asymmetry(psi_zero(balance(sys), r)) <= 1e-8


def test_state_space_symmetric_values_stay_distinct(rng):
    for _ in range(10):
        n = int(rng.integers(2, 7))
        sys, sig, *_ = random_canonical_system(rng, n, np.ones(n, dtype=int))
        hs = hankel_spectrum(sys)
        assert hs.distinct
        np.testing.assert_allclose(hs.values, sig, rtol=1e-7)


def test_error_bound_uses_distinct_values():
    bal = balance(ALL_PASS)
    assert error_bound(bal, 0) == pytest.approx(2.0)
