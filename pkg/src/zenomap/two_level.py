"""Two-level Rabi dynamics with and without repeated readout.

A resonantly driven two-level system rotates coherently between its states;
splitting the drive into segments and reading the populations out after each
segment replaces the coherent rotation by an incoherent hopping process.
In the limit of many segments the hopping freezes the system in its initial
state, which is the quantum Zeno effect.

Readout is modeled as phase randomization: the populations are kept and the
amplitude phases are redrawn uniformly. Averaged over the random phases the
interference term of the coherent step drops out and the populations evolve
under a symmetric doubly stochastic matrix whose matrix power has a simple
closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError

# Inputs are rejected as un-normalized beyond this; unitary steps preserve
# the norm far more tightly than this on their own.
_NORM_TOL = 1e-9
_PAIR_TOL = 1e-12


@dataclass(frozen=True)
class TwoLevelState:
    """Pure state of a two-level system, stored as two complex amplitudes."""

    a1: complex
    a2: complex

    def norm_sq(self) -> float:
        """Total probability carried by the two amplitudes."""
        return abs(self.a1) ** 2 + abs(self.a2) ** 2

    def probabilities(self) -> "ProbabilityPair":
        """Occupation probabilities, renormalized against norm roundoff."""
        w1 = abs(self.a1) ** 2
        w2 = abs(self.a2) ** 2
        total = w1 + w2
        return ProbabilityPair(w1 / total, w2 / total)

    @classmethod
    def ground(cls) -> "TwoLevelState":
        return cls(1.0 + 0.0j, 0.0 + 0.0j)


@dataclass(frozen=True)
class RabiParams:
    """Drive frequency and readout interval.

    ``phi`` is the half rotation angle accumulated between consecutive
    readouts, the single parameter the step operators depend on.
    """

    omega: float
    tau: float

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")

    @property
    def phi(self) -> float:
        return 0.5 * self.omega * self.tau


@dataclass(frozen=True)
class ProbabilityPair:
    """Occupation probabilities of the two levels; sums to one."""

    p1: float
    p2: float

    def __post_init__(self) -> None:
        for name, p in (("p1", self.p1), ("p2", self.p2)):
            if not -_PAIR_TOL <= p <= 1.0 + _PAIR_TOL:
                raise ValueError(f"{name}={p} is not a probability")
        if abs(self.p1 + self.p2 - 1.0) > _PAIR_TOL:
            raise ValueError(
                f"probabilities must sum to 1, got {self.p1 + self.p2}"
            )


def _require_normalized(state: TwoLevelState) -> None:
    if abs(state.norm_sq() - 1.0) > _NORM_TOL:
        raise InvalidStateError(
            f"state norm^2 = {state.norm_sq()} deviates from 1 by more than {_NORM_TOL}"
        )


def coherent_step(state: TwoLevelState, phi: float) -> TwoLevelState:
    """Rotate the amplitudes by one drive segment of half-angle ``phi``.

    The segment propagator mixes the amplitudes as
    ``(a1, a2) -> (a1 cos(phi) + i a2 sin(phi), i a1 sin(phi) + a2 cos(phi))``,
    a unitary rotation that preserves the norm.
    """
    _require_normalized(state)
    c = math.cos(phi)
    s = math.sin(phi)
    return TwoLevelState(
        c * state.a1 + 1j * s * state.a2,
        1j * s * state.a1 + c * state.a2,
    )


def coherent_evolve(state: TwoLevelState, phi: float, n: int) -> TwoLevelState:
    """Apply ``n`` drive segments at once using the closed-form power.

    The n-th power of the segment propagator is the same rotation at angle
    ``n * phi``, so uninterrupted evolution needs no iteration.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    _require_normalized(state)
    if n == 0:
        return state
    return coherent_step(state, n * phi)


def measured_probability_step(p: ProbabilityPair, phi: float) -> ProbabilityPair:
    """Advance the populations by one segment with readout in between.

    With the phases randomized by the preceding readout, the populations mix
    through ``cos^2(phi)`` / ``sin^2(phi)`` weights only; the result again
    sums to one exactly.
    """
    c2 = math.cos(phi) ** 2
    s2 = 1.0 - c2
    return ProbabilityPair(c2 * p.p1 + s2 * p.p2, s2 * p.p1 + c2 * p.p2)


def measured_evolve_closed(p: ProbabilityPair, phi: float, n: int) -> ProbabilityPair:
    """Populations after ``n`` measured segments, via diagonalization.

    The population matrix has eigenvalues 1 and ``cos(2 phi)``, so its n-th
    power acts as ``p1 -> (1 + cos^n(2 phi) (p1 - p2)) / 2``.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return p
    contrast = math.cos(2.0 * phi) ** n * (p.p1 - p.p2)
    return ProbabilityPair(0.5 * (1.0 + contrast), 0.5 * (1.0 - contrast))


def zeno_survival(n: int) -> ProbabilityPair:
    """Outcome of a full population-inverting pulse cut into ``n`` segments.

    The drive time is fixed at a half rotation (certain transfer when
    uninterrupted) and the state is read out after each of the ``n``
    segments, i.e. n-1 intermediate readouts plus the final one. Returns
    the final (survival, transfer) probabilities; survival approaches 1
    as ``n`` grows, transfer decays like ``pi^2 / 4n``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    phi = math.pi / (2.0 * n)
    return measured_evolve_closed(ProbabilityPair(1.0, 0.0), phi, n)


def monte_carlo_measured_evolve(
    p0: ProbabilityPair,
    phi: float,
    n: int,
    trials: int,
    seed: int,
) -> ProbabilityPair:
    """Trial-averaged populations under explicit per-step phase randomization.

    Each trial evolves amplitudes whose phases are redrawn independently,
    uniformly on [0, 2*pi), before every coherent segment. Only the moduli
    feed back into later steps, so the update is carried in population form:
    one segment maps ``p1`` to
    ``cos^2(phi) p1 + sin^2(phi) p2 + sin(2 phi) sqrt(p1 p2) sin(alpha1 - alpha2)``,
    which is exactly the squared modulus of the coherent step applied to the
    randomized amplitudes. The trial average converges to
    :func:`measured_evolve_closed` since the interference term has zero mean.

    Two phase vectors are drawn per step (``alpha1`` then ``alpha2``), which
    fixes the stream layout for reproducibility.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    rng = np.random.default_rng(seed)
    p1 = np.full(trials, p0.p1)
    p2 = np.full(trials, p0.p2)
    c = math.cos(phi)
    s = math.sin(phi)
    c2, s2, sin2phi = c * c, s * s, 2.0 * c * s
    for _ in range(n):
        alpha1 = rng.uniform(0.0, 2.0 * math.pi, trials)
        alpha2 = rng.uniform(0.0, 2.0 * math.pi, trials)
        cross = sin2phi * np.sqrt(p1 * p2) * np.sin(alpha1 - alpha2)
        p1, p2 = c2 * p1 + s2 * p2 + cross, s2 * p1 + c2 * p2 - cross
        # analytically >= 0; clamp tiny negative roundoff before the sqrt
        np.maximum(p1, 0.0, out=p1)
        np.maximum(p2, 0.0, out=p2)
    total = p1 + p2
    return ProbabilityPair(float(np.mean(p1 / total)), float(np.mean(p2 / total)))
