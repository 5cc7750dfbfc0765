"""Mach-Zehnder pipeline and its closed-form reference.

Two independent routes to the detector statistics live here:

* :func:`mzi_simulate` composes beamsplitter, phase gate, dephasing and
  recombiner from :mod:`saw_mzi.qubit`;
* :func:`mzi_closed_form_state` / :func:`mzi_closed_form_probs` evaluate the
  analytic post-interferometer state of the symmetric device.

Multiplying the two beamsplitter matrices and ``diag(1, e^{i phi})`` literally
gives ``P1 = sin^2(2t)(1 + v cos(g + phi))/2``, i.e. the analytic fringe
shifted by half a period. The pipeline therefore applies the phase gate at
``phi + PHASE_CONVENTION_OFFSET`` so that both routes agree entry by entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .qubit import (
    ATOL,
    BeamsplitterSpec,
    DensityMatrix,
    QubitState,
    apply_unitary,
    bs_unitary,
    dephase,
    dephasing_factor,
    phase_unitary,
)

PHASE_CONVENTION_OFFSET = math.pi


@dataclass(frozen=True)
class MziConfig:
    """Two beamsplitters, the arm phase, and the dephasing exposure ``tau`` against ``t2``."""

    bs1: BeamsplitterSpec
    bs2: BeamsplitterSpec
    phi: float = 0.0
    tau: float = 0.0
    t2: float = math.inf

    def __post_init__(self) -> None:
        if not math.isfinite(self.phi):
            raise DomainError("phase must be finite")
        dephasing_factor(self.tau, self.t2)

    @property
    def coherence(self) -> float:
        """Surviving coherence ``v = exp(-tau/t2)``."""
        return dephasing_factor(self.tau, self.t2)

    @classmethod
    def symmetric(
        cls, theta: float, gamma: float = 0.0, phi: float = 0.0, v: float = 1.0
    ) -> MziConfig:
        """Identical beamsplitters with coherence ``v`` (``t2 = 1``, ``tau = -ln v``)."""
        _check_coherence(v)
        bs = BeamsplitterSpec(theta, gamma)
        tau = math.inf if v == 0.0 else -math.log(v)
        return cls(bs, bs, phi=phi, tau=tau, t2=1.0)


@dataclass(frozen=True)
class DetectorProbs:
    p0: float
    p1: float

    def __post_init__(self) -> None:
        for p in (self.p0, self.p1):
            if not -ATOL <= p <= 1.0 + ATOL:
                raise DomainError(f"probability out of range: {p!r}")
        if abs(self.p0 + self.p1 - 1.0) > ATOL:
            raise DomainError("detector probabilities must sum to 1")


def _check_coherence(v: float) -> None:
    if not 0.0 <= v <= 1.0:
        raise DomainError(f"coherence factor v must lie in [0, 1], got {v!r}")


def mzi_closed_form_state(theta: float, gamma: float, phi: float, v: float) -> DensityMatrix:
    _check_coherence(v)
    c, s = math.cos(theta), math.sin(theta)
    s2 = math.sin(2 * theta)
    arg = gamma + phi
    rho00 = c**4 + s**4 + 0.5 * v * s2**2 * math.cos(arg)
    rho01 = (
        0.5
        * complex(math.cos(gamma), -math.sin(gamma))
        * s2
        * (math.cos(2 * theta) + v * complex(math.cos(arg), math.sin(arg)) - 2 * v * c**2 * math.cos(arg))
    )
    rho11 = 0.5 * s2**2 * (1.0 - v * math.cos(arg))
    return DensityMatrix(rho00, rho01, rho11)


def mzi_closed_form_probs(theta: float, gamma: float, phi: float, v: float) -> DetectorProbs:
    _check_coherence(v)
    s2sq = math.sin(2 * theta) ** 2
    arg = gamma + phi
    p0 = math.cos(theta) ** 4 + math.sin(theta) ** 4 + 0.5 * v * s2sq * math.cos(arg)
    p1 = 0.5 * s2sq * (1.0 - v * math.cos(arg))
    return DetectorProbs(p0, p1)


def mzi_final_state(cfg: MziConfig, input: QubitState | None = None) -> DensityMatrix:
    """State after BS1, phase gate, dephasing and BS2, in that order."""
    rho = (input or QubitState.zero()).density()
    rho = apply_unitary(rho, bs_unitary(cfg.bs1))
    rho = apply_unitary(rho, phase_unitary(cfg.phi + PHASE_CONVENTION_OFFSET))
    rho = dephase(rho, cfg.tau, cfg.t2)
    return apply_unitary(rho, bs_unitary(cfg.bs2))


def mzi_simulate(cfg: MziConfig, input: QubitState | None = None) -> DetectorProbs:
    """Detector click probabilities; the default input is ``|0>``."""
    rho = mzi_final_state(cfg, input)
    return DetectorProbs(rho.rho00, rho.rho11)


def visibility_closed_form(theta: float, v: float) -> tuple[float, float]:
    """Analytic fringe visibilities ``(v0, v1)`` of the symmetric device.

    Raises
    ------
    DomainError
        If ``theta`` is outside (0, pi/2); detector 1 shows no fringe there.
    """
    _check_coherence(v)
    if not 0.0 < theta < math.pi / 2:
        raise DomainError(f"visibility undefined for theta={theta!r}; need 0 < theta < pi/2")
    c, s = math.cos(theta), math.sin(theta)
    v0 = v * math.sin(2 * theta) ** 2 / (2 * (c**4 + s**4))
    return v0, v
