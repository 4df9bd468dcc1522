"""Probabilistic machine on 2k internal states and its reward/penalty trainer.

A state packs a target bit (most significant) with log2(k) auxiliary bits,
so state index i carries target bit i // k.  The machine itself is a
row-stochastic transition matrix P: entry P[i, j] is the probability of
stepping from state i to state j.  Training runs the machine in blocks of
k steps; a block that flips the target bit is a success whose traversed
transitions get rewarded, anything else is a failure whose transitions get
punished, and touched rows are renormalized after every update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .merit import MeritPoint, MeritSeries, classical_merits
from .qcore import is_power_of_two

__all__ = [
    "ClassicalMachine",
    "ClassicalRunConfig",
    "MachineState",
    "UpdateGains",
    "learn_classical",
    "loop_machine",
    "punish",
    "reinforce",
    "sample_block",
    "uniform_machine",
]

ROW_SUM_TOL = 1e-9
ZERO_ROW_FLOOR = 1e-12

# exact per-row renormalization pass during learning, to stop float drift
_RENORM_INTERVAL = 10_000


@dataclass(frozen=True)
class MachineState:
    """Readable form of a machine state: target bit plus auxiliary bits.

    The auxiliary vector is most-significant-bit first, so the index of
    (target, aux) is target * 2^len(aux) + int(aux bits).
    """

    target: int
    aux: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.target not in (0, 1) or any(b not in (0, 1) for b in self.aux):
            raise ValueError(f"state components must be bits: {self!r}")
        object.__setattr__(self, "aux", tuple(self.aux))

    @property
    def index(self) -> int:
        i = self.target
        for bit in self.aux:
            i = (i << 1) | bit
        return i

    @classmethod
    def from_index(cls, index: int, k: int) -> "MachineState":
        m = k.bit_length() - 1
        if not 0 <= index < 2 * k:
            raise ValueError(f"index {index} outside [0, {2 * k})")
        bits = [(index >> shift) & 1 for shift in range(m, -1, -1)]
        return cls(target=bits[0], aux=tuple(bits[1:]))


@dataclass(frozen=True)
class UpdateGains:
    """Additive reward and penalty applied to traversed transitions."""

    k_s: float
    k_f: float

    def __post_init__(self) -> None:
        for name in ("k_s", "k_f"):
            v = getattr(self, name)
            if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")


@dataclass(frozen=True)
class ClassicalMachine:
    """Immutable row-stochastic transition matrix over 2k states."""

    k: int
    P: np.ndarray

    def __post_init__(self) -> None:
        if not is_power_of_two(self.k) or self.k < 2:
            raise ValueError(f"k must be a power of two >= 2, got {self.k}")
        P = np.array(self.P, dtype=float)
        n = 2 * self.k
        if P.shape != (n, n):
            raise ValueError(f"transition matrix must be {n}x{n}, got {P.shape}")
        if np.any(P < 0.0) or np.any(P > 1.0):
            raise ValueError("transition probabilities must lie in [0, 1]")
        worst = np.abs(P.sum(axis=1) - 1.0).max()
        if worst > ROW_SUM_TOL:
            raise ValueError(f"row sums deviate from 1 by {worst:.3e}")
        P.flags.writeable = False
        object.__setattr__(self, "P", P)

    @property
    def n_states(self) -> int:
        return 2 * self.k

    @property
    def independent_parameters(self) -> int:
        """Free entries of the matrix: each of the N rows sums to 1."""
        n = self.n_states
        return n * n - n

    @cached_property
    def row_cumulative(self) -> np.ndarray:
        """Per-row cumulative sums, cached for repeated sampling."""
        c = np.cumsum(self.P, axis=1)
        c.flags.writeable = False
        return c

    def renormalized(self) -> "ClassicalMachine":
        """Exactly rescale every row to unit sum."""
        P = np.array(self.P)
        P /= P.sum(axis=1, keepdims=True)
        return ClassicalMachine(self.k, P)

    def to_csv(self) -> str:
        """Row-major CSV, one matrix row per line, 2k columns."""
        lines = [",".join(format(v, ".17g") for v in row) for row in self.P]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "ClassicalMachine":
        rows = [
            [float(cell) for cell in line.split(",")]
            for line in text.strip().splitlines()
        ]
        k, rem = divmod(len(rows), 2)
        if rem:
            raise ValueError(f"expected an even number of rows, got {len(rows)}")
        return cls(k, np.array(rows))


def uniform_machine(k: int) -> ClassicalMachine:
    """Machine with every transition equally likely: p(i, j) = 1/(2k)."""
    if not is_power_of_two(k) or k < 2:
        raise ValueError(f"k must be a power of two >= 2, got {k}")
    n = 2 * k
    return ClassicalMachine(k, np.full((n, n), 1.0 / n))


def loop_machine(k: int) -> ClassicalMachine:
    """Deterministic cycle through all 2k states, flipping the target every k steps."""
    n = 2 * k
    P = np.zeros((n, n))
    P[np.arange(n), (np.arange(n) + 1) % n] = 1.0
    return ClassicalMachine(k, P)


def sample_block(
    machine: ClassicalMachine, start: int, rng: np.random.Generator
) -> np.ndarray:
    """Walk k steps from ``start``; returns all k+1 visited state indices."""
    n = machine.n_states
    if not 0 <= start < n:
        raise ValueError(f"start state {start} outside [0, {n})")
    cums = machine.row_cumulative
    draws = rng.random(machine.k)
    out = np.empty(machine.k + 1, dtype=np.int64)
    out[0] = state = start
    for r, u in enumerate(draws, start=1):
        state = int(np.searchsorted(cums[state], u, side="right"))
        if state >= n:  # cumulative sum may fall a few ulp short of 1
            state = n - 1
        out[r] = state
    return out


def reinforce(machine: ClassicalMachine, trajectory, k_s: float) -> ClassicalMachine:
    """Reward every traversed transition with +k_s, once per traversal.

    Rows that appear as a source in the trajectory are renormalized; all
    other rows are untouched.
    """
    if not 0.0 <= k_s <= 1.0:
        raise ValueError(f"k_s must lie in [0, 1], got {k_s!r}")
    if k_s == 0.0:
        return machine
    P = np.array(machine.P)
    touched = set()
    for a, b in zip(trajectory[:-1], trajectory[1:]):
        P[a, b] += k_s
        touched.add(int(a))
    for i in touched:
        P[i] /= P[i].sum()
    return ClassicalMachine(machine.k, P)


def punish(machine: ClassicalMachine, trajectory, k_f: float) -> ClassicalMachine:
    """Penalize every traversed transition with -k_f, clamped at zero.

    Touched rows are renormalized; a row whose mass all but vanishes is
    reset to uniform rather than left unnormalizable.
    """
    if not 0.0 <= k_f <= 1.0:
        raise ValueError(f"k_f must lie in [0, 1], got {k_f!r}")
    if k_f == 0.0:
        return machine
    P = np.array(machine.P)
    n = machine.n_states
    touched = set()
    for a, b in zip(trajectory[:-1], trajectory[1:]):
        P[a, b] = max(P[a, b] - k_f, 0.0)
        touched.add(int(a))
    for i in touched:
        total = P[i].sum()
        if total < ZERO_ROW_FLOOR:
            P[i] = 1.0 / n
        else:
            P[i] /= total
    return ClassicalMachine(machine.k, P)


@dataclass(frozen=True)
class ClassicalRunConfig:
    """Parameters of one classical learning run."""

    k: int
    trials: int
    gains: UpdateGains
    merit_orders: tuple[int, ...] = (1, 5, 10)
    log_interval: int = 100

    def __post_init__(self) -> None:
        if not is_power_of_two(self.k) or self.k < 2:
            raise ValueError(f"k must be a power of two >= 2, got {self.k}")
        if self.trials < 0:
            raise ValueError(f"trial budget must be >= 0, got {self.trials}")
        if self.log_interval < 1:
            raise ValueError(f"log interval must be >= 1, got {self.log_interval}")
        object.__setattr__(self, "merit_orders", tuple(self.merit_orders))
        if not self.merit_orders or any(n < 1 for n in self.merit_orders):
            raise ValueError(f"merit orders must be positive: {self.merit_orders}")
        if len(set(self.merit_orders)) != len(self.merit_orders):
            raise ValueError(f"merit orders must be distinct: {self.merit_orders}")

    def fingerprint(self) -> str:
        return (
            f"machine=classical k={self.k} trials={self.trials}"
            f" k_s={self.gains.k_s!r} k_f={self.gains.k_f!r}"
            f" orders={','.join(map(str, self.merit_orders))}"
            f" log={self.log_interval}"
        )


def learn_classical(
    config: ClassicalRunConfig,
    seed: int,
    initial_machine: ClassicalMachine | None = None,
) -> MeritSeries:
    """Run the reward/penalty trainer and log exact merits along the way.

    Each trial samples one block of k steps.  A success (final target bit
    is the negation of the block-start target bit) rewards the trajectory
    and the next block continues from the final state; a failure punishes
    it and restarts from a fresh episode: random target bit, auxiliary
    bits cleared.  Exact merits are observers only and never influence the
    updates.
    """
    k = config.k
    if initial_machine is None:
        machine = uniform_machine(k)
    else:
        if initial_machine.k != k:
            raise ValueError(
                f"initial machine has k={initial_machine.k}, config wants k={k}"
            )
        machine = initial_machine
    rng = np.random.default_rng(seed)

    def checkpoint(trial: int) -> MeritPoint:
        return MeritPoint(trial, classical_merits(machine, config.merit_orders), 0)

    points = [checkpoint(0)]
    state = int(rng.integers(0, 2)) * k
    for trial in range(1, config.trials + 1):
        traj = sample_block(machine, state, rng)
        if traj[-1] // k == 1 - traj[0] // k:
            machine = reinforce(machine, traj, config.gains.k_s)
            state = int(traj[-1])
        else:
            machine = punish(machine, traj, config.gains.k_f)
            state = int(rng.integers(0, 2)) * k
        if trial % _RENORM_INTERVAL == 0:
            machine = machine.renormalized()
        if trial % config.log_interval == 0 or trial == config.trials:
            points.append(checkpoint(trial))
    return MeritSeries(config.fingerprint(), seed, tuple(points))
