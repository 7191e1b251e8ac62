"""Deterministic seed derivation and uniform streams.

Everything random in this package flows from a splitmix64 generator: a 64-bit
counter advanced by a fixed odd increment, pushed through an avalanching
finalizer. Child streams are derived by hashing (master seed, domain tag,
indices) through the same finalizer, so any (repetition, trial, arm, attempt)
cell owns an independent stream regardless of execution order or worker count.

The constants and update rules here are mirrored verbatim by the sampling
kernels (`_kernel.pyx` / `_kernel_py.py`); changing them is a breaking change
to every recorded seed.
"""

from dataclasses import dataclass

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
INV_2_53 = 1.0 / 9007199254740992.0  # maps a 53-bit integer to [0, 1)

# Domain tags keep derived streams for different purposes disjoint.
DOMAIN_ARM = 0x41  # arm-level outcome sampling
DOMAIN_SCENARIO = 0x53  # per-trial scenario assignment in mixed designs
DOMAIN_PARAMS = 0x50  # random parameter draws for certificates/properties


def mix64(z):
    """splitmix64 finalizer (Stafford mix13), a bijection on 64-bit ints."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def derive_state(master_seed, *fields):
    """Hash a master seed and integer fields into a 64-bit stream state."""
    z = mix64(master_seed & MASK64)
    for f in fields:
        z = mix64((z + (int(f) + 1) * GAMMA) & MASK64)
    return z


@dataclass(frozen=True)
class SeedSpec:
    """Addresses one simulated trial inside a repetition grid.

    The derived arm streams are a pure function of the three fields (plus arm
    and resampling attempt), so repetitions can run on any number of workers
    without sharing or reordering random state.
    """

    master_seed: int
    trial_index: int = 0
    repetition_index: int = 0

    def __post_init__(self):
        if self.trial_index < 0 or self.repetition_index < 0:
            raise ValueError("trial_index and repetition_index must be nonnegative")


def arm_state(seed: SeedSpec, arm: int, attempt: int = 0) -> int:
    """Stream state for one arm of one trial; `arm` is 0 control / 1 screen."""
    return derive_state(
        seed.master_seed,
        DOMAIN_ARM,
        seed.repetition_index,
        seed.trial_index,
        arm + 2 * attempt,
    )


def scenario_state(master_seed, repetition_index, trial_index) -> int:
    return derive_state(master_seed, DOMAIN_SCENARIO, repetition_index, trial_index)


class UnitStream:
    """Sequential uniform variates on [0, 1) from a splitmix64 state."""

    __slots__ = ("state",)

    def __init__(self, state):
        self.state = state & MASK64

    def next_float(self) -> float:
        self.state = (self.state + GAMMA) & MASK64
        return (mix64(self.state) >> 11) * INV_2_53

    def next_index(self, k: int) -> int:
        """Uniform integer in [0, k); exact for k dividing 2**53."""
        return int(self.next_float() * k)
