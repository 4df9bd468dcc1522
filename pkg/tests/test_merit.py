import math

import numpy as np
import pytest

from rootnot.classical_machine import ClassicalMachine, loop_machine, uniform_machine
from rootnot.merit import (
    MeritPoint,
    MeritSeries,
    classical_merit,
    classical_merit_mc,
    classical_merits,
    quantum_merit,
    quantum_merits,
)
from rootnot.qcore import (
    IDENTITY,
    SIGMA_X,
    euler_to_unitary,
    exact_root_unitary,
    haar_random_angles,
    transition_prob,
    unitary_power,
)


def random_machine(k, rng):
    n = 2 * k
    return ClassicalMachine(k, rng.dirichlet(np.ones(n), size=n))


def identity_machine(k):
    return ClassicalMachine(k, np.eye(2 * k))


@pytest.mark.parametrize("k", [2, 4, 8, 16])
def test_exact_root_scores_one(k):
    values = quantum_merits(exact_root_unitary(k), k, range(1, 21))
    for n, v in values.items():
        assert v == pytest.approx(1.0, abs=1e-12), f"P^{n}"


def test_exact_root_scores_one_at_n50():
    assert quantum_merit(exact_root_unitary(4), 4, 50) == pytest.approx(1.0, abs=1e-12)


def test_identity_scores_zero():
    assert quantum_merit(IDENTITY, 4, 1) == 0.0


def test_not_gate_at_k2():
    # NOT applied twice is the identity: first order fails completely,
    # second order gets the two even-block terms right
    assert quantum_merit(SIGMA_X, 2, 1) == 0.0
    assert quantum_merit(SIGMA_X, 2, 2) == pytest.approx(0.5, abs=1e-15)


def test_first_order_matches_transition_probs():
    rng = np.random.default_rng(2)
    for _ in range(50):
        U = euler_to_unitary(haar_random_angles(rng))
        k = int(rng.choice([1, 2, 4, 8]))
        block = unitary_power(U, k)
        expected = (transition_prob(block, 0, 1) + transition_prob(block, 1, 0)) / 2
        assert quantum_merit(U, k, 1) == expected


def test_quantum_merit_phase_invariant():
    rng = np.random.default_rng(3)
    for _ in range(50):
        U = euler_to_unitary(haar_random_angles(rng))
        alpha = rng.uniform(0.0, 2.0 * math.pi)
        for n in (1, 3, 10):
            assert abs(quantum_merit(U, 4, n) - quantum_merit(np.exp(1j * alpha) * U, 4, n)) < 1e-14


def test_quantum_merit_in_unit_interval():
    rng = np.random.default_rng(5)
    for _ in range(100):
        U = euler_to_unitary(haar_random_angles(rng))
        v = quantum_merit(U, 4, int(rng.integers(1, 12)))
        assert -1e-12 <= v <= 1.0 + 1e-12


def test_batched_orders_match_single_calls():
    rng = np.random.default_rng(7)
    U = euler_to_unitary(haar_random_angles(rng))
    batch = quantum_merits(U, 4, (1, 5, 10))
    for n, v in batch.items():
        assert v == quantum_merit(U, 4, n)


def test_invalid_arguments():
    with pytest.raises(ValueError):
        quantum_merit(IDENTITY, 0, 1)
    with pytest.raises(ValueError):
        quantum_merit(IDENTITY, 2, 0)
    with pytest.raises(ValueError):
        classical_merit_mc(uniform_machine(2), 1, 0, np.random.default_rng(0))


@pytest.mark.parametrize("k", [2, 4])
@pytest.mark.parametrize("n", [1, 3, 10])
def test_uniform_machine_scores_half(k, n):
    assert classical_merit(uniform_machine(k), n) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("k", [2, 4, 8])
def test_loop_machine_scores_one(k):
    values = classical_merits(loop_machine(k), range(1, 21))
    for n, v in values.items():
        assert v == pytest.approx(1.0, abs=1e-12), f"P^{n}"
    assert classical_merit(loop_machine(k), 50) == pytest.approx(1.0, abs=1e-12)


def test_identity_machine_never_flips():
    assert classical_merit(identity_machine(2), 1) == 0.0


def test_classical_merit_in_unit_interval():
    rng = np.random.default_rng(11)
    for _ in range(50):
        m = random_machine(int(rng.choice([2, 4])), rng)
        v = classical_merit(m, int(rng.integers(1, 12)))
        assert -1e-12 <= v <= 1.0 + 1e-12


def test_mc_on_uniform_machine():
    rng = np.random.default_rng(13)
    est = classical_merit_mc(uniform_machine(2), 3, 100_000, rng)
    assert est == pytest.approx(0.5, abs=0.006)


def test_mc_on_loop_machine_is_exact():
    rng = np.random.default_rng(17)
    assert classical_merit_mc(loop_machine(2), 4, 2_000, rng) == 1.0


def test_mc_agrees_with_exact():
    """Sampling estimate vs matrix powers, within four binomial sigmas."""
    rng = np.random.default_rng(19)
    samples = 100_000
    for i in range(20):
        k = 2 if i < 10 else 4
        machine = random_machine(k, rng)
        exact = classical_merit(machine, 3)
        estimate = classical_merit_mc(machine, 3, samples, rng)
        sigma = math.sqrt(max(exact * (1.0 - exact), 1e-12) / samples)
        assert abs(estimate - exact) <= 4.0 * sigma


def test_merit_point_validation():
    MeritPoint(0, {1: 0.5, 10: 1.0})
    with pytest.raises(ValueError):
        MeritPoint(0, {1: 1.5})
    with pytest.raises(ValueError):
        MeritPoint(0, {1: -0.2})


def test_merit_series_requires_increasing_trials():
    p0 = MeritPoint(0, {1: 0.5})
    p1 = MeritPoint(100, {1: 0.6})
    series = MeritSeries("cfg", 0, (p0, p1))
    assert series.trials == (0, 100)
    assert series.column(1) == (0.5, 0.6)
    assert series.final is p1
    with pytest.raises(ValueError):
        MeritSeries("cfg", 0, (p1, p0))
