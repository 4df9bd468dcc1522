import numpy as np
import pytest

from rootnot.classical_machine import (
    ClassicalMachine,
    ClassicalRunConfig,
    MachineState,
    UpdateGains,
    learn_classical,
    loop_machine,
    punish,
    reinforce,
    sample_block,
    uniform_machine,
)


@pytest.mark.parametrize("k", [2, 4, 8])
def test_state_index_roundtrip(k):
    for index in range(2 * k):
        state = MachineState.from_index(index, k)
        assert state.index == index
        assert state.target == index // k
        assert len(state.aux) == k.bit_length() - 1


def test_state_validation():
    with pytest.raises(ValueError):
        MachineState(2, (0,))
    with pytest.raises(ValueError):
        MachineState(0, (0, 3))
    with pytest.raises(ValueError):
        MachineState.from_index(4, 2)


def test_uniform_machine_entries():
    m2 = uniform_machine(2)
    assert m2.P.shape == (4, 4)
    assert np.all(m2.P == 0.25)
    m4 = uniform_machine(4)
    assert m4.P.shape == (8, 8)
    assert np.all(m4.P == 0.125)
    # rows sum to exactly 1: 1/2k is a power of two in binary
    assert np.all(m2.P.sum(axis=1) == 1.0)
    assert np.all(m4.P.sum(axis=1) == 1.0)


@pytest.mark.parametrize("k", [0, 1, 3, 6])
def test_uniform_machine_rejects_bad_k(k):
    with pytest.raises(ValueError):
        uniform_machine(k)


def test_machine_validation():
    with pytest.raises(ValueError):
        ClassicalMachine(2, np.full((4, 4), 0.3))  # rows sum to 1.2
    bad = np.full((4, 4), 0.25)
    bad[0, 0] = -0.05
    bad[0, 1] = 0.55
    with pytest.raises(ValueError):
        ClassicalMachine(2, bad)
    with pytest.raises(ValueError):
        ClassicalMachine(2, np.full((3, 3), 1 / 3))


def test_machine_matrix_is_frozen():
    m = uniform_machine(2)
    with pytest.raises(ValueError):
        m.P[0, 0] = 0.5


def test_independent_parameter_count():
    assert uniform_machine(2).independent_parameters == 12  # N=4
    assert uniform_machine(4).independent_parameters == 56  # N=8


def test_sample_block_on_deterministic_machine():
    m = loop_machine(2)
    traj = sample_block(m, 0, np.random.default_rng(0))
    assert traj.tolist() == [0, 1, 2]
    traj = sample_block(m, 3, np.random.default_rng(0))
    assert traj.tolist() == [3, 0, 1]


def test_sample_block_determinism():
    m = uniform_machine(4)
    t1 = sample_block(m, 2, np.random.default_rng(99))
    t2 = sample_block(m, 2, np.random.default_rng(99))
    assert np.array_equal(t1, t2)


def test_sample_block_uniform_pair_frequencies():
    m = uniform_machine(2)
    rng = np.random.default_rng(21)
    counts = np.zeros((4, 4))
    blocks = 100_000
    for _ in range(blocks):
        traj = sample_block(m, 0, rng)
        counts[traj[1], traj[2]] += 1
    freqs = counts / blocks
    assert np.abs(freqs - 1 / 16).max() < 0.01


def test_reinforce_single_traversal():
    m = uniform_machine(2)
    updated = reinforce(m, [0, 0], 0.25)
    np.testing.assert_allclose(updated.P[0], [0.4, 0.2, 0.2, 0.2], atol=1e-15)
    np.testing.assert_allclose(updated.P[1:], m.P[1:], atol=0)


def test_reinforce_double_traversal():
    m = uniform_machine(2)
    updated = reinforce(m, [0, 0, 0], 0.25)
    np.testing.assert_allclose(updated.P[0], [0.5, 1 / 6, 1 / 6, 1 / 6], atol=1e-15)


def test_reinforce_zero_gain_is_identity():
    m = uniform_machine(2)
    assert reinforce(m, [0, 1, 2], 0.0) is m
    assert punish(m, [0, 1, 2], 0.0) is m


def test_punish_single_traversal():
    m = uniform_machine(2)
    updated = punish(m, [0, 0], 0.25)
    np.testing.assert_allclose(updated.P[0], [0.0, 1 / 3, 1 / 3, 1 / 3], atol=1e-15)


def test_punish_rescues_emptied_row():
    P = np.eye(4)
    m = ClassicalMachine(2, P)
    updated = punish(m, [0, 0], 1.0)
    np.testing.assert_allclose(updated.P[0], [0.25, 0.25, 0.25, 0.25], atol=0)


def test_updates_touch_only_source_rows():
    rng = np.random.default_rng(31)
    m = ClassicalMachine(2, rng.dirichlet(np.ones(4), size=4))
    traj = [1, 3, 1]
    for update, gain in ((reinforce, 0.4), (punish, 0.15)):
        out = update(m, traj, gain)
        np.testing.assert_array_equal(out.P[0], m.P[0])
        np.testing.assert_array_equal(out.P[2], m.P[2])
        assert not np.array_equal(out.P[1], m.P[1])
        assert not np.array_equal(out.P[3], m.P[3])


def test_reinforce_matches_accumulation_oracle_any_edge_order():
    """Per-occurrence additivity: accumulate all rewards, then renormalize."""
    rng = np.random.default_rng(37)
    for _ in range(50):
        m = ClassicalMachine(2, rng.dirichlet(np.ones(4), size=4))
        traj = rng.integers(0, 4, size=5)
        edges = list(zip(traj[:-1], traj[1:]))
        expected = np.array(m.P)
        rng.shuffle(edges)
        for a, b in edges:
            expected[a, b] += 0.25
        for i in {int(a) for a, _ in edges}:
            expected[i] /= expected[i].sum()
        out = reinforce(m, traj, 0.25)
        np.testing.assert_allclose(out.P, expected, atol=1e-12)


def test_rows_stay_stochastic_under_many_updates():
    rng = np.random.default_rng(41)
    m = uniform_machine(2)
    for _ in range(2000):
        traj = rng.integers(0, 4, size=3)
        if rng.random() < 0.5:
            m = reinforce(m, traj, 0.25)
        else:
            m = punish(m, traj, 0.25)
    sums = m.P.sum(axis=1)
    assert np.abs(sums - 1.0).max() < 1e-9
    assert m.P.min() >= 0.0


def test_csv_roundtrip():
    rng = np.random.default_rng(43)
    m = ClassicalMachine(4, rng.dirichlet(np.ones(8), size=8))
    again = ClassicalMachine.from_csv(m.to_csv())
    assert again.k == 4
    np.testing.assert_array_equal(again.P, m.P)


def test_renormalized_restores_exact_sums():
    rng = np.random.default_rng(47)
    m = ClassicalMachine(2, rng.dirichlet(np.ones(4), size=4))
    r = m.renormalized()
    np.testing.assert_allclose(r.P.sum(axis=1), 1.0, atol=1e-15)


def test_learn_classical_on_perfect_loop_stays_perfect():
    config = ClassicalRunConfig(
        k=2, trials=300, gains=UpdateGains(0.25, 0.25), merit_orders=(1, 5, 10), log_interval=50
    )
    series = learn_classical(config, seed=5, initial_machine=loop_machine(2))
    for point in series.points:
        for n, v in point.values.items():
            assert v == pytest.approx(1.0, abs=1e-9), f"P^{n} at trial {point.trial_index}"


def test_learn_classical_determinism():
    config = ClassicalRunConfig(k=2, trials=500, gains=UpdateGains(0.25, 0.25))
    assert learn_classical(config, seed=7) == learn_classical(config, seed=7)


def test_learn_classical_budget_zero():
    config = ClassicalRunConfig(k=2, trials=0, gains=UpdateGains(0.25, 0.25))
    series = learn_classical(config, seed=1)
    assert len(series.points) == 1
    assert series.points[0].trial_index == 0
    assert series.points[0].values[1] == pytest.approx(0.5, abs=1e-12)


def test_learn_classical_rejects_mismatched_machine():
    config = ClassicalRunConfig(k=2, trials=10, gains=UpdateGains(0.25, 0.25))
    with pytest.raises(ValueError):
        learn_classical(config, seed=0, initial_machine=uniform_machine(4))


def test_run_config_validation():
    with pytest.raises(ValueError):
        ClassicalRunConfig(k=3, trials=10, gains=UpdateGains(0.5, 0.5))
    with pytest.raises(ValueError):
        ClassicalRunConfig(k=2, trials=-1, gains=UpdateGains(0.5, 0.5))
    with pytest.raises(ValueError):
        ClassicalRunConfig(k=2, trials=10, gains=UpdateGains(0.5, 0.5), merit_orders=())
    with pytest.raises(ValueError):
        UpdateGains(1.5, 0.5)
    with pytest.raises(ValueError):
        UpdateGains(0.5, -0.1)
