"""Measurement as scheduled phase randomization of basis amplitudes.

Reading out the population of a basis state leaves its occupation unchanged
but erases all interference between that state and the rest: the amplitude
keeps its modulus and acquires a fresh uniform random phase, uncorrelated
with anything drawn before. A schedule selects which states are measured
(none, a fixed subset, or all of them) and after which kicks.

Phase draws are owned by an exclusive, seeded stream so that runs are
bit-reproducible: a measurement event consumes exactly one draw per measured
index, in ascending index order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .kick_engine import QuantumState


class MeasurementMode(enum.Enum):
    NONE = "none"
    SUBSET = "subset"
    ALL = "all"


@dataclass(frozen=True)
class MeasurementSchedule:
    """Which states are read out, every how many kicks."""

    mode: MeasurementMode
    period: int = 1
    subset: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.period < 1:
            raise ValueError(f"period must be >= 1, got {self.period}")
        if self.mode is MeasurementMode.SUBSET:
            if not self.subset:
                raise ValueError("subset mode requires a nonempty list of states")
            ordered = tuple(sorted(self.subset))
            if len(set(ordered)) != len(ordered):
                raise ValueError(f"subset contains duplicate states: {self.subset}")
            object.__setattr__(self, "subset", ordered)
        elif self.subset is not None:
            raise ValueError(f"subset given but mode is {self.mode.value}")

    @classmethod
    def none(cls) -> "MeasurementSchedule":
        return cls(MeasurementMode.NONE)

    @classmethod
    def all_states(cls, period: int = 1) -> "MeasurementSchedule":
        return cls(MeasurementMode.ALL, period)

    @classmethod
    def subset_of(cls, states: Sequence[int], period: int = 1) -> "MeasurementSchedule":
        return cls(MeasurementMode.SUBSET, period, tuple(states))


@dataclass
class PhaseRandomizer:
    """Deterministic stream of measurement phases.

    Identical ``(master_seed, realization)`` pairs replay identical draws.
    Parallel realizations get independent substreams; a randomizer must not
    be shared between realizations.
    """

    master_seed: int
    realization: int = 0
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(0, self.realization))
        self._rng = np.random.Generator(np.random.PCG64(seq))

    def phases(self, count: int) -> np.ndarray:
        """Next ``count`` phases, i.i.d. uniform on [0, 2*pi)."""
        return self._rng.uniform(0.0, 2.0 * np.pi, count)


def should_measure(schedule: MeasurementSchedule, j: int) -> bool:
    """True when a measurement fires after kick ``j``."""
    if j < 1:
        raise ValueError(f"kick index must be >= 1, got {j}")
    return schedule.mode is not MeasurementMode.NONE and j % schedule.period == 0


def apply_measurement(
    state: QuantumState, schedule: MeasurementSchedule, rng: PhaseRandomizer
) -> QuantumState:
    """Randomize the phases of the measured amplitudes.

    Occupations are untouched exactly (the amplitudes are multiplied by unit
    phase factors) and unmeasured amplitudes are left bit-identical, so any
    interference among unmeasured states survives. ``NONE`` schedules return
    the input state unchanged without consuming a draw.
    """
    if schedule.mode is MeasurementMode.NONE:
        return state
    if schedule.mode is MeasurementMode.ALL:
        betas = rng.phases(state.window.size)
        out = state.amplitudes * np.exp(1j * betas)
        return QuantumState(state.window, out, state.time_index)
    positions = [state.window.offset(m) for m in schedule.subset]  # raises if outside
    betas = rng.phases(len(positions))
    out = state.amplitudes.copy()
    out[positions] *= np.exp(1j * betas)
    return QuantumState(state.window, out, state.time_index)
