"""Exact figures of merit P^n for both machine families.

P^n averages, over j = 1..n, the probabilities that j*k applications of
the machine map each input bit to the correct output bit: the negation of
the input for odd j, the input itself for even j.  Each order n therefore
folds in more of the task than the last.  All values come from matrix
powers, never from sampling; the Monte-Carlo variant exists only as a
cross-check for the classical computation.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .qcore import transition_prob, unitary_power

if TYPE_CHECKING:
    from .classical_machine import ClassicalMachine

__all__ = [
    "MeritPoint",
    "MeritSeries",
    "classical_merit",
    "classical_merit_mc",
    "classical_merits",
    "quantum_merit",
    "quantum_merits",
]

_VALUE_TOL = 1e-12


@dataclass(frozen=True)
class MeritPoint:
    """Exact merit values observed at one trial checkpoint.

    ``teacher_memory`` is the teacher memory in effect at the checkpoint
    for a quantum learner and 0 for a classical one.
    """

    trial_index: int
    values: Mapping[int, float]
    teacher_memory: int = 0

    def __post_init__(self) -> None:
        for n, v in self.values.items():
            if not -_VALUE_TOL <= v <= 1.0 + _VALUE_TOL:
                raise ValueError(f"P^{n}={v!r} outside [0, 1]")


@dataclass(frozen=True)
class MeritSeries:
    """Checkpoint log of one learning run, ordered by trial index."""

    fingerprint: str
    seed: int
    points: tuple[MeritPoint, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        indices = [p.trial_index for p in self.points]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("trial indices must be strictly increasing")

    @property
    def trials(self) -> tuple[int, ...]:
        return tuple(p.trial_index for p in self.points)

    def column(self, order: int) -> tuple[float, ...]:
        """Values of P^order across all checkpoints."""
        return tuple(p.values[order] for p in self.points)

    @property
    def final(self) -> MeritPoint:
        return self.points[-1]


def _check_orders(k: int, orders: Iterable[int]) -> list[int]:
    orders = list(orders)
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if not orders or any(n < 1 for n in orders):
        raise ValueError(f"merit orders must be positive, got {orders}")
    return orders


def quantum_merits(U: np.ndarray, k: int, orders: Iterable[int]) -> dict[int, float]:
    """Exact P^n of a unitary machine for several orders in one power sweep."""
    orders = _check_orders(k, orders)
    wanted = set(orders)
    top = max(orders)
    block = unitary_power(U, k)
    power = block
    total = 0.0
    out: dict[int, float] = {}
    for j in range(1, top + 1):
        if j % 2:
            total += transition_prob(power, 1, 0) + transition_prob(power, 0, 1)
        else:
            total += transition_prob(power, 0, 0) + transition_prob(power, 1, 1)
        if j in wanted:
            out[j] = total / (2 * j)
        if j < top:
            power = power @ block
    return {n: out[n] for n in orders}


def quantum_merit(U: np.ndarray, k: int, n: int) -> float:
    """Exact merit of order n for a unitary machine, from powers of U."""
    return quantum_merits(U, k, (n,))[n]


def classical_merits(machine: "ClassicalMachine", orders: Iterable[int]) -> dict[int, float]:
    """Exact P^n of a probabilistic machine for several orders in one sweep.

    Starting from the two states with all auxiliary bits zero, the target
    bit marginal after j*k steps is read directly off powers of the
    transition matrix.
    """
    k = machine.k
    orders = _check_orders(k, orders)
    wanted = set(orders)
    top = max(orders)
    block = np.linalg.matrix_power(machine.P, k)
    power = block
    total = 0.0
    out: dict[int, float] = {}
    for j in range(1, top + 1):
        from0 = power[0]  # start: target 0, aux 0
        from1 = power[k]  # start: target 1, aux 0
        if j % 2:
            total += from0[k:].sum() + from1[:k].sum()
        else:
            total += from0[:k].sum() + from1[k:].sum()
        if j in wanted:
            out[j] = float(total / (2 * j))
        if j < top:
            power = power @ block
    return {n: out[n] for n in orders}


def classical_merit(machine: "ClassicalMachine", n: int) -> float:
    """Exact merit of order n for a probabilistic machine."""
    return classical_merits(machine, (n,))[n]


def classical_merit_mc(
    machine: "ClassicalMachine",
    n: int,
    samples: int,
    rng: np.random.Generator,
) -> float:
    """Monte-Carlo estimate of :func:`classical_merit` by trajectory sampling.

    Each sample draws a start bit and an order j uniformly, walks j*k steps
    and scores whether the target bit lands where order j demands, so the
    mean is an unbiased binomial estimate of the exact value.  Used only to
    cross-check the matrix-power computation.
    """
    if samples < 1:
        raise ValueError(f"samples must be positive, got {samples}")
    _check_orders(machine.k, (n,))
    k = machine.k
    top_state = machine.n_states - 1
    cums = machine.row_cumulative
    start_bits = rng.integers(0, 2, size=samples)
    orders = rng.integers(1, n + 1, size=samples)
    checkpoints = orders * k
    state = start_bits * k
    final = state.copy()
    for step in range(1, n * k + 1):
        u = rng.random(samples)
        state = np.minimum((u[:, None] >= cums[state]).sum(axis=1), top_state)
        hit = checkpoints == step
        if hit.any():
            final[hit] = state[hit]
    expected = start_bits ^ (orders & 1)
    return float(np.mean((final // k) == expected))
