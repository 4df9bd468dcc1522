"""Exhaustive ground truth for deterministic machines.

A deterministic machine is a function table on N states with a binary
readout and two start states.  This module decides, by direct simulation,
whether such a machine performs the k-th root of NOT perfectly: applied
n*k times to either start it must show the start's readout for even n and
the negation for odd n, for every n.  On top of the predicate it offers
exhaustive scans over all machines of a given size (to locate the minimal
state count that admits a perfect machine), an exhaustive count of perfect
function tables on the canonical 2k-state space, and the exact rational
formula those counts are compared against.

Orbits in a functional graph on N states are rho-shaped: at most N steps
of tail followed by a loop of at most N states.  Checking 2N blocks of k
steps therefore covers every reachable (state, parity) combination, so the
"for every n" quantifier reduces to a finite horizon.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .qcore import is_power_of_two

__all__ = [
    "CountReport",
    "DeterministicMachine",
    "EnumerationBudgetError",
    "ScanReport",
    "count_target_functions",
    "count_work_estimate",
    "is_perfect_root",
    "minimum_state_scan",
    "perfect_cycle_machine",
    "scan_work_estimate",
    "table_power",
    "target_fraction",
]

DEFAULT_WORK_BUDGET = 10**8


class EnumerationBudgetError(ValueError):
    """Raised when an exhaustive job would exceed its work budget."""


@dataclass(frozen=True)
class DeterministicMachine:
    """Function table plus readout labeling and the two start states."""

    table: tuple[int, ...]
    readout: tuple[int, ...]
    start0: int
    start1: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "table", tuple(self.table))
        object.__setattr__(self, "readout", tuple(self.readout))
        n = len(self.table)
        if n < 2:
            raise ValueError(f"need at least 2 states, got {n}")
        if len(self.readout) != n:
            raise ValueError("readout must label every state")
        if any(not 0 <= t < n for t in self.table):
            raise ValueError("table entries must be states")
        if any(b not in (0, 1) for b in self.readout):
            raise ValueError("readout values must be bits")
        if self.start0 == self.start1:
            raise ValueError("start states must differ")
        for name, want in (("start0", 0), ("start1", 1)):
            s = getattr(self, name)
            if not 0 <= s < n:
                raise ValueError(f"{name}={s} is not a state")
            if self.readout[s] != want:
                raise ValueError(f"{name} must read out {want}")

    @property
    def n_states(self) -> int:
        return len(self.table)


def table_power(table: tuple[int, ...], n: int) -> tuple[int, ...]:
    """n-fold composition of a function table with itself (n=0 is identity)."""
    if n < 0:
        raise ValueError(f"power must be non-negative, got {n}")
    result = tuple(range(len(table)))
    base = tuple(table)
    while n:
        if n & 1:
            result = tuple(base[x] for x in result)
        base = tuple(base[x] for x in base)
        n >>= 1
    return result


def is_perfect_root(machine: DeterministicMachine, k: int) -> bool:
    """Decide the perfect-execution predicate by walking 2N blocks of k steps."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    g = table_power(machine.table, k)
    span = 2 * machine.n_states
    readout = machine.readout
    for start in (machine.start0, machine.start1):
        base = readout[start]
        v = start
        for i in range(span):
            v = g[v]
            expected = base if i & 1 else 1 - base  # blocks count from n=1
            if readout[v] != expected:
                return False
    return True


def perfect_cycle_machine(k: int) -> DeterministicMachine:
    """The minimal perfect machine: one 2k-cycle with the starts k apart."""
    if not is_power_of_two(k) or k < 1:
        raise ValueError(f"k must be a power of two >= 1, got {k}")
    n = 2 * k
    table = tuple((i + 1) % n for i in range(n))
    readout = tuple(i // k for i in range(n))
    return DeterministicMachine(table, readout, start0=0, start1=k)


def target_fraction(k: int) -> Fraction:
    """Exact fraction of functions on 2k states that realize the task.

    Evaluates (2k-4)! * (2k-2) * (k^2 - 2) / (2k)^(2k) as a rational with
    big-integer arithmetic.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    numerator = math.factorial(2 * k - 4) * (2 * k - 2) * (k * k - 2)
    return Fraction(numerator, (2 * k) ** (2 * k))


@dataclass(frozen=True)
class ScanReport:
    """Exhaustive-scan result for one state count N."""

    k: int
    n_states: int
    perfect_count: int
    combinations: int

    @property
    def any_perfect(self) -> bool:
        return self.perfect_count > 0


@dataclass(frozen=True)
class CountReport:
    """Exhaustive count of perfect function tables on the canonical space.

    ``formula_value`` is the closed-form fraction; ``agrees`` records
    whether the enumeration confirms it.  The enumeration is ground truth:
    a disagreement is reported, never papered over.
    """

    k: int
    n_states: int
    perfect_count: int
    total_count: int
    formula_value: Fraction

    def __post_init__(self) -> None:
        if self.perfect_count > self.total_count:
            raise ValueError("perfect_count cannot exceed total_count")

    @property
    def enumerated_fraction(self) -> Fraction:
        return Fraction(self.perfect_count, self.total_count)

    @property
    def agrees(self) -> bool:
        return self.enumerated_fraction == self.formula_value


def _pair_count(n: int) -> int:
    """Valid (start0, start1) pairs summed over all 2^n readouts."""
    return sum(math.comb(n, z) * z * (n - z) for z in range(n + 1))


def scan_work_estimate(n_states: int) -> int:
    """Predicate evaluations needed to scan all machines with N states."""
    return n_states**n_states * _pair_count(n_states)


def count_work_estimate(k: int) -> int:
    """Predicate evaluations needed to count tables on the canonical space."""
    return (2 * k) ** (2 * k)


def _iter_tables(n: int, prefix: int | None):
    if prefix is None:
        yield from itertools.product(range(n), repeat=n)
    else:
        for rest in itertools.product(range(n), repeat=n - 1):
            yield (prefix,) + rest


def _scan_chunk(args: tuple[int, int, int | None]) -> int:
    """Count perfect (table, readout, start-pair) combinations in one chunk.

    The start-pair loop factorizes: whether an orbit matches its required
    readout pattern depends on one start at a time, so for each readout the
    number of perfect pairs is (#valid readout-0 starts) * (#valid
    readout-1 starts).
    """
    k, n, prefix = args
    squarings = k.bit_length() - 1  # k is a power of two
    span = 2 * n
    groups = []
    for ro in itertools.product((0, 1), repeat=n):
        zeros = tuple(i for i, b in enumerate(ro) if b == 0)
        ones = tuple(i for i, b in enumerate(ro) if b == 1)
        if zeros and ones:
            groups.append((ro, zeros, ones))
    count = 0
    for table in _iter_tables(n, prefix):
        g = list(table)
        for _ in range(squarings):
            g = [g[x] for x in g]
        orbits = []
        for s in range(n):
            v = s
            seq = []
            for _ in range(span):
                v = g[v]
                seq.append(v)
            orbits.append(seq)
        for ro, zeros, ones in groups:
            valid0 = 0
            for s in zeros:
                for i, v in enumerate(orbits[s]):
                    if ro[v] == (i & 1):  # wanted 1 for even i, 0 for odd
                        break
                else:
                    valid0 += 1
            if not valid0:
                continue
            valid1 = 0
            for s in ones:
                for i, v in enumerate(orbits[s]):
                    if ro[v] != (i & 1):  # wanted 0 for even i, 1 for odd
                        break
                else:
                    valid1 += 1
            count += valid0 * valid1
    return count


def _canonical_chunk(args: tuple[int, int | None]) -> int:
    """Count perfect tables on the canonical 2k-state space in one chunk."""
    k, prefix = args
    n = 2 * k
    squarings = k.bit_length() - 1
    span = 2 * n
    count = 0
    for table in _iter_tables(n, prefix):
        g = list(table)
        for _ in range(squarings):
            g = [g[x] for x in g]
        v = 0  # start with target bit 0, aux bits 0
        for i in range(span):
            v = g[v]
            if (v >= k) == (i & 1):  # readout is v // k
                break
        else:
            v = k  # start with target bit 1, aux bits 0
            for i in range(span):
                v = g[v]
                if (v >= k) != (i & 1):
                    break
            else:
                count += 1
    return count


def _map_chunks(worker, chunk_args: list, workers: int) -> list:
    if workers <= 1 or len(chunk_args) <= 1:
        return [worker(a) for a in chunk_args]
    with ProcessPoolExecutor(max_workers=min(workers, len(chunk_args))) as pool:
        return list(pool.map(worker, chunk_args))


def minimum_state_scan(
    k: int,
    n_max: int,
    workers: int = 1,
    max_work: int = DEFAULT_WORK_BUDGET,
) -> list[ScanReport]:
    """Exhaustively search machines with N = 2..n_max states, per N.

    For each N every function table, every readout labeling and every
    valid start pair is examined, and the number of perfect combinations
    is reported.  Jobs whose estimated predicate evaluations exceed
    ``max_work`` are refused; pass a larger budget to force them.
    """
    if not is_power_of_two(k):
        raise ValueError(f"k must be a power of two, got {k}")
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    total = sum(scan_work_estimate(n) for n in range(2, n_max + 1))
    if total > max_work:
        raise EnumerationBudgetError(
            f"scan up to N={n_max} needs ~{total:.2e} predicate evaluations,"
            f" over the budget of {max_work:.2e}"
        )
    reports = []
    for n in range(2, n_max + 1):
        if workers > 1 and n >= 5:
            chunks = [(k, n, prefix) for prefix in range(n)]
        else:
            chunks = [(k, n, None)]
        perfect = sum(_map_chunks(_scan_chunk, chunks, workers))
        reports.append(ScanReport(k, n, perfect, scan_work_estimate(n)))
    return reports


def count_target_functions(
    k: int,
    workers: int = 1,
    max_work: int = DEFAULT_WORK_BUDGET,
) -> CountReport:
    """Exhaustively count perfect function tables on the canonical space.

    The canonical space fixes the encoding: 2k states, readout is the
    most significant bit (state index // k), starts are state 0 and state
    k.  Every one of the (2k)^(2k) tables is tested.
    """
    if not is_power_of_two(k) or k < 2:
        raise ValueError(f"k must be a power of two >= 2, got {k}")
    total = count_work_estimate(k)
    if total > max_work:
        raise EnumerationBudgetError(
            f"counting at k={k} needs {total:.2e} predicate evaluations,"
            f" over the budget of {max_work:.2e}"
        )
    n = 2 * k
    if workers > 1 and total > 10**6:
        chunks = [(k, prefix) for prefix in range(n)]
    else:
        chunks = [(k, None)]
    perfect = sum(_map_chunks(_canonical_chunk, chunks, workers))
    return CountReport(k, n, perfect, total, target_fraction(k))
