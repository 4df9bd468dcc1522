"""Exact 2x2 complex linear algebra for a single-qubit machine.

Unitaries are plain numpy arrays of shape (2, 2) with complex entries.
Every rotation is parameterized by three Euler angles:

    U(beta, delta, gamma) =
        [ e^{-i(beta+delta)/2} cos(gamma/2)   -e^{i(delta-beta)/2} sin(gamma/2) ]
        [ e^{i(beta-delta)/2}  sin(gamma/2)    e^{i(beta+delta)/2} cos(gamma/2) ]

with beta, delta in [0, 2*pi) and gamma in [0, pi].  A global phase in
front of the matrix changes no measured probability, so it is fixed to 1
and never represented.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)

__all__ = [
    "EulerAngles",
    "IDENTITY",
    "SIGMA_X",
    "euler_to_unitary",
    "exact_root_unitary",
    "fold_polar",
    "haar_random_angles",
    "is_power_of_two",
    "is_unitary",
    "transition_prob",
    "unitarity_error",
    "unitary_power",
    "wrap_phase",
]


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def wrap_phase(angle: float) -> float:
    """Reduce a phase angle into [0, 2*pi)."""
    a = angle % TWO_PI
    # a tiny negative input can round up to exactly 2*pi
    return 0.0 if a >= TWO_PI else a


def fold_polar(angle: float) -> float:
    """Reflect an unbounded polar angle into [0, pi].

    The real line is folded like a billiard between the walls at 0 and pi,
    so a small excursion across a wall stays small after folding.
    """
    a = angle % TWO_PI
    if a > math.pi:
        a = TWO_PI - a
    return a


@dataclass(frozen=True)
class EulerAngles:
    """Position in rotation-parameter space.

    beta and delta are phases, stored reduced modulo 2*pi.  gamma is the
    polar angle and must already lie in [0, pi]; use :func:`fold_polar` to
    bring a free excursion back into range.
    """

    beta: float
    delta: float
    gamma: float

    def __post_init__(self) -> None:
        for name in ("beta", "delta", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        object.__setattr__(self, "beta", wrap_phase(self.beta))
        object.__setattr__(self, "delta", wrap_phase(self.delta))
        if not 0.0 <= self.gamma <= math.pi:
            raise ValueError(f"gamma must lie in [0, pi], got {self.gamma!r}")


def euler_to_unitary(angles: EulerAngles) -> np.ndarray:
    """Rotation matrix for a set of Euler angles (determinant exactly 1)."""
    half_sum = 0.5 * (angles.beta + angles.delta)
    half_diff = 0.5 * (angles.beta - angles.delta)
    c = math.cos(0.5 * angles.gamma)
    s = math.sin(0.5 * angles.gamma)
    return np.array(
        [
            [cmath.exp(-1j * half_sum) * c, -cmath.exp(-1j * half_diff) * s],
            [cmath.exp(1j * half_diff) * s, cmath.exp(1j * half_sum) * c],
        ]
    )


def haar_random_angles(rng: np.random.Generator) -> EulerAngles:
    """Draw angles so the resulting rotations are Haar-uniform.

    beta and delta are uniform phases and cos(gamma) is uniform on [-1, 1].
    The draw order (beta, delta, gamma) is fixed, so equal seeds give equal
    angle sequences.
    """
    beta = TWO_PI * rng.random()
    delta = TWO_PI * rng.random()
    gamma = math.acos(1.0 - 2.0 * rng.random())
    return EulerAngles(beta, delta, gamma)


def unitary_power(U: np.ndarray, n: int) -> np.ndarray:
    """U multiplied with itself n times by binary exponentiation (n=0 gives I)."""
    if n < 0:
        raise ValueError(f"power must be non-negative, got {n}")
    return np.linalg.matrix_power(np.asarray(U, dtype=complex), n)


def transition_prob(U: np.ndarray, a: int, b: int) -> float:
    """Probability that measuring U|a> yields |b>, i.e. |<b|U|a>|^2."""
    if a not in (0, 1) or b not in (0, 1):
        raise ValueError(f"basis labels must be bits, got a={a!r}, b={b!r}")
    amp = U[b, a]
    return float(amp.real * amp.real + amp.imag * amp.imag)


def unitarity_error(U: np.ndarray) -> float:
    """Largest absolute entry of U†U - I."""
    return float(np.abs(U.conj().T @ U - IDENTITY).max())


def is_unitary(U: np.ndarray, tol: float = 1e-12) -> bool:
    return U.shape == (2, 2) and unitarity_error(U) <= tol


def exact_root_unitary(k: int) -> np.ndarray:
    """The rotation whose k-th power negates a bit perfectly.

    Returns cos(pi/(2k)) I - i sin(pi/(2k)) sigma_x, an x-rotation by pi/k.
    Its k-th power is an x-rotation by pi, which maps |0> to |1> and back
    up to a phase, and every even multiple of k applications acts as the
    identity on measurement outcomes.
    """
    if not is_power_of_two(k) or k < 2:
        raise ValueError(f"k must be a power of two >= 2, got {k}")
    theta = math.pi / (2 * k)
    return math.cos(theta) * IDENTITY - 1j * math.sin(theta) * SIGMA_X
