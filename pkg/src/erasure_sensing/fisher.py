"""Fisher information for the three noisy Ramsey channels.

Closed-form classical Fisher information for depolarizing, dephasing, and
erasure readout; a central-difference numeric evaluator that serves as the
oracle for the closed forms; the single-qubit quantum Fisher information
F = 4 (2 tr(rho^2) - 1) |<eta_0| H |eta_1>|^2 built on a closed-form 2x2
eigendecomposition; and the convexity upper bound (1 - q) F.

Everything here is pure and re-entrant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .states import (
    ChannelKind,
    MeasurementBasis,
    OutcomeDistribution,
    TWO_PI,
    accumulate_phase,
    apply_noise,
    measure_probs,
    prepare_plus,
)

# Outcomes with probability below this are treated as (possibly removable)
# zeros of the model rather than regular points.
_PROB_FLOOR = 1e-14
# At such a zero the derivative must also vanish (quadratic zero) for the
# Fisher sum to stay finite; this is the tolerance on "vanish".
_DERIV_FLOOR = 1e-10
# Eigenvalue gap below which a 2x2 density matrix counts as degenerate.
_DEGENERACY_GAP = 1e-10

_HERMITIAN_TOL = 1e-12


class SingularFisherError(ArithmeticError):
    """A probability vanishes while its phi-derivative does not, so the
    Fisher summand diverges at this evaluation point."""


class DegenerateStateError(ArithmeticError):
    """The quantum Fisher formula needs a non-degenerate eigendecomposition
    of the input state and rho has (numerically) equal eigenvalues."""


@dataclass(frozen=True)
class FisherEvalPoint:
    """One (phi, theta, q, kind) evaluation point; angles stored mod 2 pi."""

    phi: float
    theta: float
    q: float
    kind: ChannelKind

    def __post_init__(self):
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")

    @property
    def delta(self) -> float:
        """Fringe offset phi - theta."""
        return self.phi - self.theta


def channel_outcome_model(
    kind: ChannelKind, q: float, theta: float
) -> Callable[[float], OutcomeDistribution]:
    """Return phi -> OutcomeDistribution for one channel and readout basis.

    The model prepares |+>, accumulates phi, applies the channel at strength
    q, and measures in the |+/- theta> basis with erasure detection on.
    """
    basis = MeasurementBasis(theta)

    def model(phi: float) -> OutcomeDistribution:
        state = accumulate_phase(prepare_plus(), phi)
        state = apply_noise(state, kind, q)
        return measure_probs(state, basis, erasure_detection=True)

    return model


def classical_fisher_numeric(
    model: Callable[[float], OutcomeDistribution],
    phi: float,
    step: float = 1e-5,
) -> float:
    """Central-difference Fisher information sum_x (d_phi p_x)^2 / p_x.

    Outcomes whose probability is numerically zero contribute through the
    quadratic-zero limit 2 p'' provided their derivative also vanishes;
    a vanishing probability with non-vanishing slope raises
    SingularFisherError. The default step 1e-5 balances truncation against
    rounding at double precision.
    """
    if not 0.0 < step <= 1e-2:
        raise ValueError("step must lie in (0, 1e-2]")
    p0 = model(phi).as_array()
    pp = model(phi + step).as_array()
    pm = model(phi - step).as_array()
    deriv = (pp - pm) / (2.0 * step)
    second = (pp - 2.0 * p0 + pm) / step**2

    total = 0.0
    for x in range(3):
        if p0[x] > _PROB_FLOOR:
            total += deriv[x] ** 2 / p0[x]
        elif abs(deriv[x]) < _DERIV_FLOOR:
            # p ~ a (phi - phi0)^2 near a quadratic zero gives p'^2/p -> 2 p''.
            total += max(2.0 * second[x], 0.0)
        else:
            raise SingularFisherError(
                f"singular Fisher evaluation: outcome {x} has p = {p0[x]} "
                f"but slope {deriv[x]} at phi = {phi}"
            )
    return total


def _checked_q(q):
    q = np.asarray(q, dtype=float)
    if np.any((q < 0.0) | (q > 1.0)):
        raise ValueError("q must lie in [0, 1]")
    return q


def _fringe_fisher(amplitude, delta):
    """Fisher information of a two-outcome fringe p = (1 +/- A cos d)/2.

    F = A^2 sin^2 d / (1 - A^2 cos^2 d), with the removable 0/0 at |A| = 1,
    cos d = +/-1 evaluated as its limit value 1.
    """
    amplitude = np.asarray(amplitude, dtype=float)
    delta = np.asarray(delta, dtype=float)
    s2 = np.sin(delta) ** 2
    c2 = np.cos(delta) ** 2
    num = amplitude**2 * s2
    # 1 - A^2 cos^2 d rewritten as s^2 + (1-A^2) c^2: every term is
    # non-negative, so the node region |A| -> 1, sin d -> 0 keeps full
    # precision instead of cancelling two near-unit quantities
    den = s2 + (1.0 - amplitude) * (1.0 + amplitude) * c2
    safe = np.where(den > 0.0, den, 1.0)
    out = np.where(den > 0.0, num / safe, 1.0)
    if out.ndim == 0:
        return float(out)
    return out


def fisher_depolarizing(q, delta):
    """F = (1-q)^2 sin^2(delta) / (1 - (1-q)^2 cos^2(delta)), delta = phi - theta.

    Peaks at delta = pi/2 with value (1-q)^2. Accepts scalars or arrays.
    """
    q = _checked_q(q)
    return _fringe_fisher(1.0 - q, delta)


def fisher_dephasing(q, delta):
    """Dephasing variant of the fringe information, amplitude 1 - 2q.

    The value depends on (1-2q)^2 and is therefore symmetric about q = 1/2,
    where it vanishes for every delta.
    """
    q = _checked_q(q)
    return _fringe_fisher(1.0 - 2.0 * q, delta)


def fisher_erasure(q, delta=None):
    """Erasure readout information, the constant 1 - q for every delta.

    The three-outcome sum evaluates to 1 - q independent of the fringe
    offset; at sin(delta) = 0 the summation formula has a removable 0/0
    whose limit is the same constant, so no special-casing is needed.
    """
    q = _checked_q(q)
    out = 1.0 - q
    if delta is not None:
        out = np.broadcast_arrays(out, np.asarray(delta, dtype=float))[0].copy()
    if np.ndim(out) == 0:
        return float(out)
    return out


def convexity_upper_bound(q: float, noiseless_qfi: float) -> float:
    """Upper bound (1 - q) * F on the information after any strength-q fault.

    Mixing the clean phase-encoded state with any faulty branch at weight q
    can keep at most the surviving fraction of the original information.
    The erasure channel attains this bound; depolarizing falls short of it
    by an extra factor (1 - q).
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    return (1.0 - q) * noiseless_qfi


# Quantum Fisher information

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def pure_density(psi) -> np.ndarray:
    """Density matrix |psi><psi| of a (not necessarily normalized) 2-spinor."""
    psi = np.asarray(psi, dtype=complex).reshape(2)
    norm = np.linalg.norm(psi)
    if norm == 0.0:
        raise ValueError("zero state vector")
    psi = psi / norm
    return np.outer(psi, psi.conj())


def bloch_density(r) -> np.ndarray:
    """Density matrix (I + r . sigma) / 2 of a Bloch vector r, |r| <= 1."""
    r = np.asarray(r, dtype=float).reshape(3)
    if np.linalg.norm(r) > 1.0 + 1e-12:
        raise ValueError("Bloch vector norm exceeds 1")
    eye = np.eye(2, dtype=complex)
    return (eye + r[0] * PAULI_X + r[1] * PAULI_Y + r[2] * PAULI_Z) / 2.0


def validate_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Check shape, hermiticity, unit trace, and eigenvalue range of a 2x2
    density matrix; returns the matrix as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError("density matrix must be 2x2")
    if np.max(np.abs(rho - rho.conj().T)) > _HERMITIAN_TOL:
        raise ValueError("density matrix is not Hermitian")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > _HERMITIAN_TOL:
        raise ValueError(f"density matrix trace is {tr}, not 1")
    lo, hi = _eig2_hermitian(rho)[0]
    if lo < -_HERMITIAN_TOL or hi > 1.0 + _HERMITIAN_TOL:
        raise ValueError(f"eigenvalues ({lo}, {hi}) outside [0, 1]")
    return rho


def _eig2_hermitian(m: np.ndarray):
    """Closed-form eigendecomposition of a 2x2 Hermitian matrix.

    Returns ((lam0, lam1), V) with lam0 <= lam1 and unit eigenvector columns
    V[:, 0], V[:, 1].
    """
    a = m[0, 0].real
    d = m[1, 1].real
    b = m[0, 1]
    s = math.hypot(a - d, 2.0 * abs(b))
    lam0 = (a + d - s) / 2.0
    lam1 = (a + d + s) / 2.0
    if abs(b) < 1e-300:
        if a <= d:
            vecs = np.eye(2, dtype=complex)
        else:
            vecs = np.eye(2, dtype=complex)[:, ::-1]
        return (lam0, lam1), vecs
    # (m - lam I) v = 0 is solved by v = (b, lam - a), nonzero since b != 0.
    v0 = np.array([b, lam0 - a], dtype=complex)
    v1 = np.array([b, lam1 - a], dtype=complex)
    v0 /= np.linalg.norm(v0)
    v1 /= np.linalg.norm(v1)
    return (lam0, lam1), np.column_stack([v0, v1])


def qfi_pure_generator(rho0: np.ndarray, generator: np.ndarray) -> float:
    """Quantum Fisher information 4 (2 tr(rho^2) - 1) |<eta_0|H|eta_1>|^2.

    rho0 must be a valid 2x2 density matrix with an eigenvalue gap above
    1e-10; eta_0, eta_1 are its eigenvectors and H the phase generator.
    A degenerate input (for example the maximally mixed state) raises
    DegenerateStateError: the formula is undefined there.
    """
    rho0 = validate_density_matrix(rho0)
    generator = np.asarray(generator, dtype=complex)
    if generator.shape != (2, 2):
        raise ValueError("generator must be 2x2")
    if np.max(np.abs(generator - generator.conj().T)) > _HERMITIAN_TOL:
        raise ValueError("generator is not Hermitian")
    (lam0, lam1), vecs = _eig2_hermitian(rho0)
    if lam1 - lam0 <= _DEGENERACY_GAP:
        raise DegenerateStateError(
            f"QFI formula undefined at degenerate input (gap {lam1 - lam0})"
        )
    purity = float(np.real(np.trace(rho0 @ rho0)))
    element = vecs[:, 0].conj() @ (generator @ vecs[:, 1])
    return 4.0 * (2.0 * purity - 1.0) * float(abs(element)) ** 2


def qfi_depolarized(
    rho0: np.ndarray,
    generator: np.ndarray,
    q: float,
    method: str = "scaled",
) -> float:
    """Quantum Fisher information after depolarizing the input at strength q.

    method="scaled" uses the factorization F((1-q) rho + q I/2) =
    (1-q)^2 F(rho). method="direct" eigendecomposes the depolarized state
    and applies the base formula, providing an independent cross-check;
    the two agree to near machine precision for every valid input.
    """
    if not 0.0 <= q < 1.0:
        raise ValueError("q must lie in [0, 1)")
    if method == "scaled":
        return (1.0 - q) ** 2 * qfi_pure_generator(rho0, generator)
    if method == "direct":
        rho_q = (1.0 - q) * np.asarray(rho0, dtype=complex) + q * np.eye(2) / 2.0
        return qfi_pure_generator(rho_q, generator)
    raise ValueError("method must be 'scaled' or 'direct'")
