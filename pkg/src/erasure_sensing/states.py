"""Single-sensor states, noise channels, and terminal measurement.

A sensor is one three-level atom: a qubit subspace described by a Bloch
vector, plus one detectable leak level. The total state is

    (1 - erasure_weight) * (I + r . sigma) / 2   on the qubit subspace
    + erasure_weight * |leak><leak|

so the trace is 1 by construction. All reachable states in this package are
block-diagonal mixtures of that form, which is why a Bloch vector and a
scalar weight suffice instead of a full 3x3 density matrix.

All operations are pure functions of their inputs; only `sample_outcome`
consumes randomness, through an explicit generator.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# Probabilities this far below zero are treated as floating-point debris at
# fringe extrema and clamped to zero; anything worse is a real error.
_NEGATIVE_TOL = 1e-14
_SUM_TOL = 1e-12
_LEAK_TOL = 1e-12


class ChannelKind(enum.Enum):
    DEPOLARIZING = "depolarizing"
    DEPHASING = "dephasing"
    ERASURE = "erasure"


class Outcome(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"
    ERASURE = "erasure"


@dataclass(frozen=True, eq=False)
class SensorState:
    """Qubit Bloch vector plus the population of the detectable leak level."""

    bloch: np.ndarray
    erasure_weight: float = 0.0

    def __post_init__(self):
        b = np.asarray(self.bloch, dtype=float)
        if b.shape != (3,):
            raise ValueError("bloch must be a real 3-vector")
        object.__setattr__(self, "bloch", b)
        if float(np.linalg.norm(b)) > 1.0 + 1e-12:
            raise ValueError("Bloch vector norm exceeds 1")
        w = float(self.erasure_weight)
        if not 0.0 <= w <= 1.0:
            raise ValueError("erasure_weight must lie in [0, 1]")
        object.__setattr__(self, "erasure_weight", w)


@dataclass(frozen=True)
class NoiseChannel:
    """One of the three noise channels, with strength given either as a
    fixed error probability q or as a rate gamma from which
    q(T_c) = 1 - exp(-gamma * T_c) is derived.

    Exactly one of `q` and `gamma` must be set. Note the dephasing channel
    scales coherences by (1 - 2q), so its observable contrast magnitude is
    symmetric under q -> 1 - q and vanishes at q = 1/2.
    """

    kind: ChannelKind
    q: float | None = None
    gamma: float | None = None

    def __post_init__(self):
        if (self.q is None) == (self.gamma is None):
            raise ValueError("specify exactly one of q or gamma")
        if self.q is not None and not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        if self.gamma is not None and self.gamma < 0.0:
            raise ValueError("gamma must be non-negative")

    def strength(self, t_c: float | None = None) -> float:
        """Error probability for one interrogation of duration t_c."""
        if self.q is not None:
            return self.q
        if t_c is None:
            raise ValueError("rate-specified channel needs an interrogation time")
        if t_c < 0.0:
            raise ValueError("interrogation time must be non-negative")
        return 1.0 - math.exp(-self.gamma * t_c)


@dataclass(frozen=True)
class MeasurementBasis:
    """Readout basis |+/- theta> = (|0> +/- e^{i theta} |1>) / sqrt(2)."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities over the three terminal outcomes {plus, minus, erasure}."""

    p_plus: float
    p_minus: float
    p_erasure: float = 0.0

    def __post_init__(self):
        for name in ("p_plus", "p_minus", "p_erasure"):
            p = float(getattr(self, name))
            if p < -_NEGATIVE_TOL:
                raise ValueError(f"{name} = {p} is negative")
            object.__setattr__(self, name, max(p, 0.0))
        total = self.p_plus + self.p_minus + self.p_erasure
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"outcome probabilities sum to {total}, not 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.p_plus, self.p_minus, self.p_erasure])


def prepare_plus() -> SensorState:
    """Initial sensor state |+>, Bloch vector (1, 0, 0), no leakage."""
    return SensorState(bloch=np.array([1.0, 0.0, 0.0]), erasure_weight=0.0)


def accumulate_phase(state: SensorState, phi: float) -> SensorState:
    """Free evolution under exp(-i phi sigma_z / 2).

    Rotates the Bloch vector by phi about z (periodic in 2 pi); the leak
    population is untouched.
    """
    c, s = math.cos(phi), math.sin(phi)
    bx, by, bz = state.bloch
    return SensorState(
        bloch=np.array([bx * c - by * s, bx * s + by * c, bz]),
        erasure_weight=state.erasure_weight,
    )


def apply_noise(
    state: SensorState,
    channel: NoiseChannel | ChannelKind,
    q: float | None = None,
) -> SensorState:
    """Apply one noise channel of strength q.

    Depolarizing shrinks the whole Bloch vector by (1 - q). Dephasing shrinks
    the transverse components by (1 - 2q). Erasure moves a fraction q of the
    remaining qubit population to the leak level and leaves the normalized
    qubit-subspace Bloch vector exactly as it was.
    """
    if isinstance(channel, NoiseChannel):
        kind = channel.kind
        if q is None:
            q = channel.strength()
    else:
        kind = channel
        if q is None:
            raise ValueError("q is required when only a channel kind is given")
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")

    bx, by, bz = state.bloch
    w = state.erasure_weight
    if kind is ChannelKind.DEPOLARIZING:
        return SensorState(bloch=(1.0 - q) * state.bloch, erasure_weight=w)
    if kind is ChannelKind.DEPHASING:
        f = 1.0 - 2.0 * q
        return SensorState(bloch=np.array([f * bx, f * by, bz]), erasure_weight=w)
    if kind is ChannelKind.ERASURE:
        return SensorState(bloch=state.bloch.copy(), erasure_weight=w + q * (1.0 - w))
    raise ValueError(f"unknown channel kind {kind!r}")


def measure_probs(
    state: SensorState,
    basis: MeasurementBasis,
    erasure_detection: bool = True,
) -> OutcomeDistribution:
    """Terminal measurement distribution in the basis |+/- theta>.

    With erasure detection the leak level is resolved as its own outcome:
    p_erasure equals the leak weight and the +/- branch carries the rest.
    Without detection the state must be leak-free (undetected-leakage
    modeling is out of scope) and p_erasure is exactly 0.
    """
    w = state.erasure_weight
    if not erasure_detection:
        if w > _LEAK_TOL:
            raise ValueError(
                "erasure detection disabled but the state has leak population "
                f"{w}; only leak-free pipelines may disable detection"
            )
        w = 0.0
    bx, by, _ = state.bloch
    proj = bx * math.cos(basis.theta) + by * math.sin(basis.theta)
    p_plus = (1.0 - w) * (1.0 + proj) / 2.0
    p_minus = (1.0 - w) * (1.0 - proj) / 2.0
    return OutcomeDistribution(p_plus=p_plus, p_minus=p_minus, p_erasure=w)


def sample_outcome(dist: OutcomeDistribution, rng: np.random.Generator) -> Outcome:
    """Draw one outcome; deterministic given the generator state."""
    u = rng.random()
    if u < dist.p_plus:
        return Outcome.PLUS
    if u < dist.p_plus + dist.p_minus:
        return Outcome.MINUS
    return Outcome.ERASURE
