import math

import numpy as np
import pytest

from rootnot.qcore import (
    IDENTITY,
    SIGMA_X,
    EulerAngles,
    euler_to_unitary,
    exact_root_unitary,
    fold_polar,
    haar_random_angles,
    is_power_of_two,
    is_unitary,
    transition_prob,
    unitarity_error,
    unitary_power,
    wrap_phase,
)

TWO_PI = 2.0 * math.pi


def random_unitary(rng):
    return euler_to_unitary(haar_random_angles(rng))


def test_wrap_phase_range():
    for x in (-10.0, -1e-18, 0.0, 1.0, TWO_PI, TWO_PI + 0.5, 1e6):
        w = wrap_phase(x)
        assert 0.0 <= w < TWO_PI


def test_fold_polar_reflection():
    assert fold_polar(-0.3) == pytest.approx(0.3, abs=1e-15)
    assert fold_polar(math.pi + 0.2) == pytest.approx(math.pi - 0.2, abs=1e-15)
    assert fold_polar(TWO_PI + 0.1) == pytest.approx(0.1, abs=1e-15)
    for x in np.linspace(-20.0, 20.0, 400):
        assert 0.0 <= fold_polar(x) <= math.pi


def test_euler_angles_normalization():
    a = EulerAngles(beta=TWO_PI + 0.5, delta=-0.5, gamma=1.0)
    assert a.beta == pytest.approx(0.5)
    assert a.delta == pytest.approx(TWO_PI - 0.5)
    with pytest.raises(ValueError):
        EulerAngles(0.0, 0.0, -0.1)
    with pytest.raises(ValueError):
        EulerAngles(0.0, 0.0, math.pi + 0.1)
    with pytest.raises(ValueError):
        EulerAngles(math.nan, 0.0, 1.0)


def test_euler_identity():
    U = euler_to_unitary(EulerAngles(0.0, 0.0, 0.0))
    np.testing.assert_allclose(U, IDENTITY, atol=1e-15)


def test_euler_full_flip():
    U = euler_to_unitary(EulerAngles(0.0, 0.0, math.pi))
    assert transition_prob(U, 0, 1) == pytest.approx(1.0, abs=1e-15)
    assert transition_prob(U, 0, 0) == pytest.approx(0.0, abs=1e-15)


def test_euler_half_flip():
    U = euler_to_unitary(EulerAngles(0.0, 0.0, math.pi / 2))
    assert transition_prob(U, 0, 1) == pytest.approx(0.5, abs=1e-15)


def test_euler_always_unitary():
    rng = np.random.default_rng(7)
    for _ in range(200):
        assert is_unitary(random_unitary(rng), tol=1e-12)


def test_haar_statistics():
    rng = np.random.default_rng(11)
    n = 100_000
    betas = np.empty(n)
    gammas = np.empty(n)
    for i in range(n):
        a = haar_random_angles(rng)
        betas[i] = a.beta
        gammas[i] = a.gamma
    assert abs(np.cos(gammas).mean()) < 0.02
    assert abs(betas.mean() - math.pi) < 0.05


def test_haar_determinism():
    rng1 = np.random.default_rng(123)
    rng2 = np.random.default_rng(123)
    for _ in range(50):
        assert haar_random_angles(rng1) == haar_random_angles(rng2)


def test_unitary_power_trivial():
    rng = np.random.default_rng(3)
    U = random_unitary(rng)
    np.testing.assert_allclose(unitary_power(U, 0), IDENTITY, atol=0)
    np.testing.assert_allclose(unitary_power(SIGMA_X, 2), IDENTITY, atol=1e-15)
    with pytest.raises(ValueError):
        unitary_power(U, -1)


def test_unitary_power_matches_repeated_multiplication():
    rng = np.random.default_rng(5)
    for _ in range(20):
        U = random_unitary(rng)
        expected = IDENTITY
        for n in range(13):
            np.testing.assert_allclose(unitary_power(U, n), expected, atol=1e-13)
            expected = expected @ U


def test_unitary_power_square_of_square():
    rng = np.random.default_rng(17)
    for _ in range(100):
        U = random_unitary(rng)
        direct = unitary_power(U, 4)
        nested = unitary_power(unitary_power(U, 2), 2)
        assert np.abs(direct - nested).max() < 1e-12


def test_power_homomorphism():
    rng = np.random.default_rng(29)
    for _ in range(50):
        U = random_unitary(rng)
        m, n = rng.integers(0, 101, size=2)
        lhs = unitary_power(U, int(m + n))
        rhs = unitary_power(U, int(m)) @ unitary_power(U, int(n))
        assert np.abs(lhs - rhs).max() < 1e-11


def test_power_keeps_unitarity():
    rng = np.random.default_rng(31)
    for _ in range(20):
        U = random_unitary(rng)
        assert unitarity_error(unitary_power(U, 10_000)) <= 1e-10


def test_transition_prob_basics():
    assert transition_prob(IDENTITY, 0, 1) == 0.0
    assert transition_prob(SIGMA_X, 0, 1) == 1.0
    with pytest.raises(ValueError):
        transition_prob(IDENTITY, 2, 0)


def test_transition_prob_column_normalization():
    rng = np.random.default_rng(37)
    for _ in range(100):
        U = random_unitary(rng)
        for a in (0, 1):
            total = transition_prob(U, a, 0) + transition_prob(U, a, 1)
            assert abs(total - 1.0) < 1e-12


def test_global_phase_irrelevant():
    rng = np.random.default_rng(41)
    for _ in range(100):
        U = random_unitary(rng)
        alpha = rng.uniform(0.0, TWO_PI)
        V = np.exp(1j * alpha) * U
        for a in (0, 1):
            for b in (0, 1):
                assert abs(transition_prob(U, a, b) - transition_prob(V, a, b)) < 1e-14


@pytest.mark.parametrize("k", [2, 4, 8, 16])
def test_exact_root_unitary(k):
    root = exact_root_unitary(k)
    assert is_unitary(root, tol=1e-15)
    assert transition_prob(unitary_power(root, k), 0, 1) == pytest.approx(1.0, abs=1e-12)
    assert transition_prob(unitary_power(root, 2 * k), 0, 0) == pytest.approx(1.0, abs=1e-12)


def test_exact_root_rejects_bad_k():
    for k in (0, 1, 3, 5, 6, 12, -4):
        with pytest.raises(ValueError):
            exact_root_unitary(k)


def test_root_formula_at_k1_acts_like_not():
    # the k=1 analog of the root formula is -i*sigma_x, indistinguishable
    # from plain NOT on any measurement
    analog = math.cos(math.pi / 2) * IDENTITY - 1j * math.sin(math.pi / 2) * SIGMA_X
    for a in (0, 1):
        for b in (0, 1):
            assert transition_prob(analog, a, b) == pytest.approx(
                transition_prob(SIGMA_X, a, b), abs=1e-15
            )


def test_is_power_of_two():
    assert [n for n in range(1, 20) if is_power_of_two(n)] == [1, 2, 4, 8, 16]
