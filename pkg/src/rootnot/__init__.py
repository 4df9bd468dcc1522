"""Simulation and verification lab for machines that learn the k-th root of NOT.

Two trainable machines tackle the same task of negating a bit in k equal
steps (k a power of two): a single-qubit unitary driven by a greedy
Gaussian random walk, and a probabilistic 2k-state machine driven by
reward/penalty updates.  Both are scored with the exact figures of merit
P^n, and exhaustive-enumeration oracles pin down the ground truth about
how many states a perfect classical machine needs and how rare perfect
function tables are.
"""

from .classical_machine import (
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
from .merit import (
    MeritPoint,
    MeritSeries,
    classical_merit,
    classical_merit_mc,
    classical_merits,
    quantum_merit,
    quantum_merits,
)
from .oracle import (
    CountReport,
    DeterministicMachine,
    EnumerationBudgetError,
    ScanReport,
    count_target_functions,
    is_perfect_root,
    minimum_state_scan,
    perfect_cycle_machine,
    target_fraction,
)
from .qcore import (
    EulerAngles,
    euler_to_unitary,
    exact_root_unitary,
    fold_polar,
    haar_random_angles,
    is_unitary,
    transition_prob,
    unitarity_error,
    unitary_power,
    wrap_phase,
)
from .quantum_learner import (
    QuantumLearnerState,
    QuantumRunConfig,
    TeacherSchedule,
    TrialRecord,
    WalkWidths,
    learn_quantum,
    learner_step,
    propose_angles,
    run_trial,
)

__version__ = "0.1.0"
