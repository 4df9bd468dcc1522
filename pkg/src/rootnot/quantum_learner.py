"""Greedy random-walk trainer for a single-qubit machine.

Each trial proposes new Euler angles from Gaussians centred on the current
best, scores the proposal by applying the k-fold operation to M random
input bits, and keeps the proposal whenever it scores at least as many
successes as the incumbent.  The teacher memory M is either fixed or grows
by one every time a proposal aces all M executions, which sharpens the
success test exactly as fast as the machine improves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .merit import MeritPoint, MeritSeries, quantum_merits
from .qcore import (
    EulerAngles,
    euler_to_unitary,
    fold_polar,
    haar_random_angles,
    is_power_of_two,
    transition_prob,
    unitary_power,
    wrap_phase,
)

__all__ = [
    "QuantumLearnerState",
    "QuantumRunConfig",
    "TeacherSchedule",
    "TrialRecord",
    "WalkWidths",
    "learn_quantum",
    "learner_step",
    "propose_angles",
    "run_trial",
]


@dataclass(frozen=True)
class WalkWidths:
    """Gaussian step widths of the random walk.

    ``sigma_beta`` is shared by the two phase angles beta and delta;
    ``sigma_gamma`` drives the polar angle.
    """

    sigma_gamma: float
    sigma_beta: float

    def __post_init__(self) -> None:
        for name in ("sigma_gamma", "sigma_beta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")


@dataclass(frozen=True)
class TeacherSchedule:
    """How the teacher memory M evolves over a run."""

    mode: Literal["fixed", "variable"]
    size: int

    def __post_init__(self) -> None:
        if self.mode not in ("fixed", "variable"):
            raise ValueError(f"mode must be 'fixed' or 'variable', got {self.mode!r}")
        if self.size < 1:
            raise ValueError(f"teacher memory must be >= 1, got {self.size}")

    @classmethod
    def fixed(cls, m: int) -> "TeacherSchedule":
        return cls("fixed", m)

    @classmethod
    def variable(cls, start: int = 1) -> "TeacherSchedule":
        return cls("variable", start)

    @property
    def is_variable(self) -> bool:
        return self.mode == "variable"

    def initial_memory(self) -> int:
        return self.size

    def describe(self) -> str:
        return f"{self.mode}:{self.size}"


@dataclass
class QuantumLearnerState:
    """Mutable walker state: owns its random stream."""

    accepted: EulerAngles
    old_s: int
    teacher_memory: int
    trial_index: int
    rng: np.random.Generator


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of a single trial; ``teacher_memory`` is the M it ran with."""

    trial_index: int
    accepted: bool
    new_s: int
    teacher_memory: int


def propose_angles(
    center: EulerAngles, widths: WalkWidths, rng: np.random.Generator
) -> EulerAngles:
    """One Gaussian step from ``center``.

    The phases wrap modulo 2*pi; gamma reflects off the walls at 0 and pi.
    Draw order is beta, delta, gamma.
    """
    beta = wrap_phase(center.beta + rng.normal(0.0, widths.sigma_beta))
    delta = wrap_phase(center.delta + rng.normal(0.0, widths.sigma_beta))
    gamma = fold_polar(center.gamma + rng.normal(0.0, widths.sigma_gamma))
    return EulerAngles(beta, delta, gamma)


def run_trial(U: np.ndarray, k: int, M: int, rng: np.random.Generator) -> int:
    """Count successes of U^k over M executions.

    Each execution draws an input bit uniformly, applies U^k and samples
    the output bit from the squared amplitudes; success means the output
    is the negation of the input.  Returns the success count in [0, M].
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if M < 1:
        raise ValueError(f"teacher memory must be >= 1, got {M}")
    block = unitary_power(U, k)
    p_flip_from0 = transition_prob(block, 0, 1)
    p_flip_from1 = transition_prob(block, 1, 0)
    bits = rng.integers(0, 2, size=M)
    p = np.where(bits == 0, p_flip_from0, p_flip_from1)
    return int(np.count_nonzero(rng.random(M) < p))


def learner_step(
    state: QuantumLearnerState,
    k: int,
    widths: WalkWidths,
    schedule: TeacherSchedule,
) -> TrialRecord:
    """Advance the walker by one trial, mutating ``state`` in place.

    A proposal is kept when new_s >= old_s (ties accept).  In variable
    mode a perfect score additionally bumps M by one while old_s keeps the
    value new_s, so the next comparison is against the old scale.
    """
    proposal = propose_angles(state.accepted, widths, state.rng)
    m_used = state.teacher_memory
    new_s = run_trial(euler_to_unitary(proposal), k, m_used, state.rng)
    accepted = new_s >= state.old_s
    if accepted:
        state.accepted = proposal
        state.old_s = new_s
    if schedule.is_variable and new_s == m_used:
        state.teacher_memory = m_used + 1
    state.trial_index += 1
    return TrialRecord(state.trial_index, accepted, new_s, m_used)


@dataclass(frozen=True)
class QuantumRunConfig:
    """Parameters of one quantum learning run."""

    k: int
    trials: int
    widths: WalkWidths
    schedule: TeacherSchedule
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
            f"machine=quantum k={self.k} trials={self.trials}"
            f" sigma_gamma={self.widths.sigma_gamma!r}"
            f" sigma_beta={self.widths.sigma_beta!r}"
            f" teacher={self.schedule.describe()}"
            f" orders={','.join(map(str, self.merit_orders))}"
            f" log={self.log_interval}"
        )


def learn_quantum(
    config: QuantumRunConfig,
    seed: int,
    initial_angles: EulerAngles | None = None,
) -> MeritSeries:
    """Run the random-walk trainer and log exact merits along the way.

    The walker starts from Haar-random angles (or ``initial_angles`` when
    given) with old_s = 0, so the first proposal is always accepted.
    Exact merits are computed from the accepted unitary at every
    checkpoint; they are observers only and never influence acceptance.
    """
    rng = np.random.default_rng(seed)
    start = haar_random_angles(rng) if initial_angles is None else initial_angles
    state = QuantumLearnerState(
        accepted=start,
        old_s=0,
        teacher_memory=config.schedule.initial_memory(),
        trial_index=0,
        rng=rng,
    )

    def checkpoint() -> MeritPoint:
        values = quantum_merits(
            euler_to_unitary(state.accepted), config.k, config.merit_orders
        )
        return MeritPoint(state.trial_index, values, state.teacher_memory)

    points = [checkpoint()]
    for trial in range(1, config.trials + 1):
        learner_step(state, config.k, config.widths, config.schedule)
        if trial % config.log_interval == 0 or trial == config.trials:
            points.append(checkpoint())
    return MeritSeries(config.fingerprint(), seed, tuple(points))
