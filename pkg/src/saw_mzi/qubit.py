"""Two-level quantum mechanics for the channel-position qubit.

Basis convention: ``|0>`` is the electron in the upper channel, ``|1>`` in the
lower channel. Density matrices are stored by their three independent entries;
``rho10`` follows from Hermiticity.

Bloch vector convention::

    rho = (I + x*sx + y*sy + z*sz) / 2
    x = 2 Re(rho01),  y = 2 Im(rho10) = -2 Im(rho01),  z = rho00 - rho11
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

ATOL = 1e-12


def _finite(*values: complex) -> bool:
    return all(cmath.isfinite(v) for v in values)


@dataclass(frozen=True)
class QubitState:
    """Pure state ``alpha|0> + beta|1>``."""

    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        if not _finite(self.alpha, self.beta):
            raise DomainError("amplitudes must be finite")
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > ATOL:
            raise DomainError(f"state is not normalised: |alpha|^2 + |beta|^2 = {norm!r}")

    @classmethod
    def zero(cls) -> QubitState:
        return cls(1.0, 0.0)

    @classmethod
    def one(cls) -> QubitState:
        return cls(0.0, 1.0)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    def density(self) -> DensityMatrix:
        return DensityMatrix(
            abs(self.alpha) ** 2,
            self.alpha * self.beta.conjugate(),
            abs(self.beta) ** 2,
        )


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive 2x2 state."""

    rho00: float
    rho01: complex
    rho11: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "rho00", float(self.rho00))
        object.__setattr__(self, "rho01", complex(self.rho01))
        object.__setattr__(self, "rho11", float(self.rho11))
        if not _finite(self.rho00, self.rho01, self.rho11):
            raise DomainError("density matrix entries must be finite")
        trace = self.rho00 + self.rho11
        if abs(trace - 1.0) > ATOL:
            raise DomainError(f"trace must be 1, got {trace!r}")
        if self.rho00 < -ATOL or self.rho11 < -ATOL:
            raise DomainError("diagonal entries must be non-negative")
        if abs(self.rho01) ** 2 > self.rho00 * self.rho11 + ATOL:
            raise DomainError("density matrix is not positive semidefinite")

    @property
    def rho10(self) -> complex:
        return self.rho01.conjugate()

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.rho00, self.rho01], [self.rho10, self.rho11]], dtype=complex)

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> DensityMatrix:
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise DomainError(f"expected a 2x2 matrix, got shape {m.shape}")
        if abs(m[0, 1] - m[1, 0].conjugate()) > ATOL:
            raise DomainError("matrix is not Hermitian")
        return cls(m[0, 0].real, m[0, 1], m[1, 1].real)

    @classmethod
    def maximally_mixed(cls) -> DensityMatrix:
        return cls(0.5, 0.0, 0.5)


@dataclass(frozen=True)
class Unitary2:
    u00: complex
    u01: complex
    u10: complex
    u11: complex

    def __post_init__(self) -> None:
        for name in ("u00", "u01", "u10", "u11"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if not _finite(self.u00, self.u01, self.u10, self.u11):
            raise DomainError("unitary entries must be finite")
        m = self.matrix
        if not np.allclose(m @ m.conj().T, np.eye(2), rtol=0.0, atol=ATOL):
            raise DomainError("matrix is not unitary")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.u00, self.u01], [self.u10, self.u11]], dtype=complex)

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> Unitary2:
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def __matmul__(self, other: Unitary2) -> Unitary2:
        return Unitary2.from_matrix(self.matrix @ other.matrix)

    def apply(self, state: QubitState) -> QubitState:
        a, b = self.matrix @ state.vector
        return QubitState(a, b)


@dataclass(frozen=True)
class BeamsplitterSpec:
    """Beamsplitter angle ``theta`` in [0, pi/2] and output phase ``gamma`` in (-pi, pi]."""

    theta: float
    gamma: float = 0.0
    # Rabi half-periods folded away to bring theta into [0, pi/2]; metadata only.
    wraps: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta) and math.isfinite(self.gamma)):
            raise DomainError("beamsplitter angles must be finite")
        if not 0.0 <= self.theta <= math.pi / 2:
            raise DomainError(f"theta must lie in [0, pi/2], got {self.theta!r}")
        if not -math.pi < self.gamma <= math.pi:
            raise DomainError(f"gamma must lie in (-pi, pi], got {self.gamma!r}")

    @property
    def transmittance(self) -> float:
        return math.cos(self.theta) ** 2

    @property
    def reflectance(self) -> float:
        return math.sin(self.theta) ** 2


@dataclass(frozen=True)
class ChannelContraction:
    """Bloch-axis contraction factors of a unital Pauli-diagonal channel."""

    eta_x: float
    eta_y: float
    eta_z: float

    def __post_init__(self) -> None:
        for name in ("eta_x", "eta_y", "eta_z"):
            value = getattr(self, name)
            if not math.isfinite(value) or abs(value) > 1.0:
                raise DomainError(f"{name} must lie in [-1, 1], got {value!r}")


def bs_unitary(spec: BeamsplitterSpec) -> Unitary2:
    """``[[cos t, -sin t], [e^{i g} sin t, e^{i g} cos t]]``."""
    c, s = math.cos(spec.theta), math.sin(spec.theta)
    g = cmath.exp(1j * spec.gamma)
    return Unitary2(c, -s, g * s, g * c)


def phase_unitary(phi: float) -> Unitary2:
    """``diag(1, e^{i phi})``: phase ``phi`` on the ``|1>`` arm."""
    if not math.isfinite(phi):
        raise DomainError("phase must be finite")
    return Unitary2(1.0, 0.0, 0.0, cmath.exp(1j * phi))


def apply_unitary(rho: DensityMatrix, u: Unitary2) -> DensityMatrix:
    m = u.matrix
    out = m @ rho.matrix @ m.conj().T
    return DensityMatrix(out[0, 0].real, out[0, 1], out[1, 1].real)


def dephasing_factor(tau: float, t2: float) -> float:
    """Coherence factor ``exp(-tau/t2)`` left after dephasing for ``tau``."""
    if not tau >= 0.0:
        raise DomainError(f"dephasing time must be non-negative, got {tau!r}")
    if not t2 > 0.0:
        raise DomainError(f"T2 must be positive, got {t2!r}")
    return math.exp(-tau / t2)


def dephase(rho: DensityMatrix, tau: float, t2: float) -> DensityMatrix:
    """Markovian phase relaxation: populations kept, coherence scaled by ``exp(-tau/t2)``."""
    return DensityMatrix(rho.rho00, rho.rho01 * dephasing_factor(tau, t2), rho.rho11)


def bloch_vector(rho: DensityMatrix) -> tuple[float, float, float]:
    return (2.0 * rho.rho01.real, 2.0 * rho.rho10.imag, rho.rho00 - rho.rho11)


def check_complete_positivity(c: ChannelContraction, atol: float = 1e-9) -> bool:
    """Whether the unital channel contracting the Bloch axes by ``c`` is completely positive.

    The condition is ``|eta_x + eta_y| <= 1 + eta_z`` and ``|eta_x - eta_y| <= 1 - eta_z``,
    i.e. all four Pauli weights of the channel are non-negative.
    """
    ex, ey, ez = c.eta_x, c.eta_y, c.eta_z
    return abs(ex + ey) <= 1.0 + ez + atol and abs(ex - ey) <= 1.0 - ez + atol
