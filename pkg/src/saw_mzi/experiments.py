"""Executable versions of the measurement procedures.

Fringe sweeps, visibility extraction, two-stage beamsplitter calibration,
variable-path-length T2 estimation and shot-noise-limited field sensing.
All stochastic steps take an explicit seed; equal seed and inputs give
bit-identical results.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Protocol, Sequence

import numpy as np

from .device import CONSTANTS, DeviceParams, transit_time
from .errors import CalibrationError, DomainError
from .interferometer import MziConfig, mzi_simulate
from .qubit import BeamsplitterSpec

T2_HORIZON_FACTOR = 2.3
MIN_T2_SETTINGS = 5
MIN_FRINGE_POINTS = 8
# Working points closer than this to a fringe extremum are rejected (rad).
MIN_SLOPE_DISTANCE = 0.1

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _fmt(x: float) -> str:
    return format(float(x), ".15g")


@dataclass(frozen=True, eq=False)
class FringeData:
    """Detector probabilities on a uniform phase grid covering one period."""

    phis: np.ndarray
    p0s: np.ndarray
    p1s: np.ndarray
    n_samples: int | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        for name in ("phis", "p0s", "p1s"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = len(self.phis)
        if not (len(self.p0s) == n and len(self.p1s) == n):
            raise DomainError("phis, p0s and p1s must have equal lengths")
        if n < 2 or np.any(np.diff(self.phis) <= 0):
            raise DomainError("phase grid must be strictly increasing with at least two points")
        span = self.phis[-1] - self.phis[0] + (self.phis[1] - self.phis[0])
        if span < 2 * math.pi - 1e-9:
            raise DomainError("phase grid must cover a full 2*pi period")
        for p in (self.p0s, self.p1s):
            if np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
                raise DomainError("probabilities must lie in [0, 1]")
        if self.n_samples is not None and self.n_samples <= 0:
            raise DomainError("n_samples must be a positive integer")

    def to_csv(self, path: str | Path | None = None) -> str:
        """Serialise as ``phi,p0,p1``; returns the text and writes it if ``path`` is given."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["phi", "p0", "p1"])
        for row in zip(self.phis, self.p0s, self.p1s):
            writer.writerow([_fmt(x) for x in row])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

    @classmethod
    def from_csv(cls, path: str | Path) -> FringeData:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        return cls(
            np.array([float(r["phi"]) for r in rows]),
            np.array([float(r["p0"]) for r in rows]),
            np.array([float(r["p1"]) for r in rows]),
        )


@dataclass(frozen=True)
class VisibilityEstimate:
    """Fringe visibilities per detector.

    ``v0``/``v1`` use the grid maximum and minimum. ``v0_fit``/``v1_fit`` come
    from a least-squares sinusoid and are less biased under sampling noise.
    """

    v0: float
    v1: float
    v0_fit: float = math.nan
    v1_fit: float = math.nan


def fringe_sweep(
    cfg: MziConfig,
    n_points: int = 64,
    n_samples: int | None = None,
    seed: int | None = None,
) -> FringeData:
    """Evaluate the interferometer on ``phi = 2*pi*k/n_points``, k = 0..n_points-1.

    ``cfg.phi`` is replaced by the grid values. With ``n_samples`` set, each
    point is a binomial count of ``n_samples`` electrons: ``p1 = k/n`` and
    ``p0 = 1 - p1`` since every electron lands on exactly one detector.
    """
    if n_points < MIN_FRINGE_POINTS:
        raise DomainError(f"need at least {MIN_FRINGE_POINTS} phase points, got {n_points}")
    phis = 2 * math.pi * np.arange(n_points) / n_points
    probs = [mzi_simulate(replace(cfg, phi=float(phi))) for phi in phis]
    p0s = np.array([p.p0 for p in probs])
    p1s = np.array([p.p1 for p in probs])
    if n_samples is not None:
        if n_samples <= 0:
            raise DomainError("n_samples must be a positive integer")
        rng = np.random.default_rng(seed)
        counts = rng.binomial(n_samples, np.clip(p1s, 0.0, 1.0))
        p1s = counts / n_samples
        p0s = (n_samples - counts) / n_samples
    return FringeData(phis, p0s, p1s, n_samples=n_samples, seed=seed)


def fringe_visibility(p: Sequence[float]) -> float:
    """``(max - min) / (max + min)`` over a sampled fringe."""
    p = np.asarray(p, dtype=float)
    hi, lo = float(p.max()), float(p.min())
    if hi + lo <= 0.0:
        raise DomainError("visibility undefined: detector never clicks")
    return (hi - lo) / (hi + lo)


def _sinusoid_visibility(phis: np.ndarray, p: np.ndarray) -> float:
    design = np.column_stack([np.ones_like(phis), np.cos(phis), np.sin(phis)])
    (mean, a, b), *_ = np.linalg.lstsq(design, p, rcond=None)
    if mean <= 0.0:
        return math.nan
    return float(math.hypot(a, b) / mean)


def extract_visibility(data: FringeData) -> VisibilityEstimate:
    return VisibilityEstimate(
        v0=fringe_visibility(data.p0s),
        v1=fringe_visibility(data.p1s),
        v0_fit=_sinusoid_visibility(data.phis, data.p0s),
        v1_fit=_sinusoid_visibility(data.phis, data.p1s),
    )


# --------------------------------------------------------------------------
# Calibration


class FringeDevice(Protocol):
    def sweep(self, setting1: float, setting2: float) -> FringeData: ...


@dataclass(frozen=True)
class SimulatedDevice:
    """Simulated interferometer whose beamsplitter knobs carry unknown offsets.

    The true angle of splitter ``i`` is ``setting_i + offset_i`` clipped to
    [0, pi/2]. Every sweep reuses ``seed`` so repeated calls are reproducible.
    """

    offset1: float = 0.0
    offset2: float = 0.0
    gamma: float = 0.0
    tau: float = 0.0
    t2: float = math.inf
    n_points: int = 64
    n_samples: int | None = None
    seed: int | None = None

    def true_angles(self, setting1: float, setting2: float) -> tuple[float, float]:
        def clip(x: float) -> float:
            return min(max(x, 0.0), math.pi / 2)

        return clip(setting1 + self.offset1), clip(setting2 + self.offset2)

    def sweep(self, setting1: float, setting2: float) -> FringeData:
        theta1, theta2 = self.true_angles(setting1, setting2)
        cfg = MziConfig(
            BeamsplitterSpec(theta1, self.gamma),
            BeamsplitterSpec(theta2, self.gamma),
            tau=self.tau,
            t2=self.t2,
        )
        return fringe_sweep(cfg, self.n_points, self.n_samples, self.seed)


@dataclass(frozen=True)
class CalibrationResult:
    theta1: float
    theta2: float
    mean_p1: float
    visibility: VisibilityEstimate


def _bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float, ftol: float) -> float:
    flo, fhi = f(lo), f(hi)
    if abs(flo) <= ftol:
        return lo
    if abs(fhi) <= ftol:
        return hi
    if (flo < 0) == (fhi < 0):
        raise CalibrationError(
            "cannot bracket mean(P1) = 1/2 over the first beamsplitter range; "
            "the device cannot be tuned to 50:50"
        )
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) <= ftol:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """Maximiser of a unimodal ``f`` on [a, b]; only interior points are evaluated."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def calibrate(
    device: FringeDevice,
    tol: float = 1e-6,
    theta2_start: float = math.pi / 4,
    bracket: tuple[float, float] = (0.0, math.pi / 2),
    ftol: float = 1e-14,
) -> CalibrationResult:
    """Tune the first splitter to mean(P1) = 1/2, then the second to maximal P1 visibility.

    Stage 1 bisects the first knob with the second held at ``theta2_start``.
    Since the phase-averaged P1 equals 1/2 whenever either splitter is 50:50,
    the root does not depend on the second splitter. If the second splitter
    already sits at 50:50 the mean is flat over the whole bracket; the first
    knob is then set by maximising P1 visibility instead. Stage 2 runs a
    golden-section search on the second knob. ``tol`` is the knob resolution
    (rad) of both stages; ``ftol`` is the mean-P1 deviation treated as zero.
    """
    if not tol > 0.0:
        raise DomainError("tolerance must be positive")
    lo, hi = bracket

    def mean_offset(s1: float) -> float:
        return float(np.mean(device.sweep(s1, theta2_start).p1s)) - 0.5

    def v1_at(s1: float, s2: float) -> float:
        try:
            return fringe_visibility(device.sweep(s1, s2).p1s)
        except DomainError:
            return 0.0

    if abs(mean_offset(lo)) <= ftol and abs(mean_offset(hi)) <= ftol:
        theta1 = golden_section_max(lambda s1: v1_at(s1, theta2_start), lo, hi, tol)
    else:
        theta1 = _bisect(mean_offset, lo, hi, tol, ftol)

    def v1(s2: float) -> float:
        return v1_at(theta1, s2)

    theta2 = golden_section_max(v1, lo, hi, tol)
    final = device.sweep(theta1, theta2)
    return CalibrationResult(theta1, theta2, float(np.mean(final.p1s)), extract_visibility(final))


# --------------------------------------------------------------------------
# T2 estimation


@dataclass(frozen=True)
class T2Design:
    lengths: tuple[float, ...]
    taus: tuple[float, ...]
    t2_guess: float

    @property
    def increment(self) -> float:
        return self.lengths[1] - self.lengths[0]

    @property
    def visibility_floor(self) -> float:
        """Expected visibility at the longest setting if ``T2 == t2_guess``."""
        return math.exp(-self.taus[-1] / self.t2_guess)


def design_t2_experiment(
    t2_guess: float, n_settings: int = MIN_T2_SETTINGS, v_saw: float = 2700.0
) -> T2Design:
    """Channel lengths with uniformly spaced transit times up to 2.3 * ``t2_guess``.

    The longest setting leaves ``exp(-2.3)``, about 10%, of the initial visibility.
    """
    if not t2_guess > 0.0:
        raise DomainError(f"T2 guess must be positive, got {t2_guess!r}")
    if n_settings < MIN_T2_SETTINGS:
        raise DomainError(f"need at least {MIN_T2_SETTINGS} path-length settings, got {n_settings}")
    if not v_saw > 0.0:
        raise DomainError(f"SAW velocity must be positive, got {v_saw!r}")
    horizon = T2_HORIZON_FACTOR * t2_guess
    taus = tuple(horizon * k / n_settings for k in range(1, n_settings + 1))
    lengths = tuple(v_saw * tau for tau in taus)
    return T2Design(lengths, tuple(transit_time(l, v_saw) for l in lengths), t2_guess)


@dataclass(frozen=True)
class T2FitResult:
    """Log-linear fit ``ln v = ln A - tau/T2``.

    ``covariance`` is for ``(t2_hat, amplitude_hat)``, propagated to first order
    from the regression of ``(ln A, -1/T2)``. A zero fitted slope gives
    ``t2_hat = inf`` with an undefined (NaN) covariance.
    """

    t2_hat: float
    amplitude_hat: float
    residual_rms: float
    covariance: np.ndarray = field(repr=False)

    @property
    def t2_stderr(self) -> float:
        return math.sqrt(self.covariance[0, 0])

    @property
    def amplitude_stderr(self) -> float:
        return math.sqrt(self.covariance[1, 1])


def estimate_t2(taus: Sequence[float], visibilities: Sequence[float]) -> T2FitResult:
    x = np.asarray(taus, dtype=float)
    v = np.asarray(visibilities, dtype=float)
    if x.shape != v.shape or x.ndim != 1:
        raise DomainError("taus and visibilities must be 1-D and of equal length")
    if len(x) < 3:
        raise DomainError(f"need at least 3 (tau, visibility) points, got {len(x)}")
    for i, vi in enumerate(v):
        if not 0.0 < vi <= 1.05:
            raise DomainError(f"row {i}: visibility {vi!r} outside (0, 1.05]")
    if np.ptp(x) == 0.0:
        raise DomainError("all transit times are equal; slope is undetermined")

    y = np.log(v)
    n = len(x)
    x_mean, y_mean = x.mean(), y.mean()
    dx = x - x_mean
    sxx = float(dx @ dx)
    slope = float(dx @ (y - y_mean)) / sxx
    intercept = float(y_mean - slope * x_mean)
    resid = y - (intercept + slope * x)
    rss = float(resid @ resid)
    amplitude = math.exp(intercept)

    if slope > 0.0:
        raise DomainError("visibility increases with transit time; no decay to fit")
    if slope == 0.0:
        return T2FitResult(math.inf, amplitude, math.sqrt(rss / n), np.full((2, 2), math.nan))

    sigma2 = rss / (n - 2) if n > 2 else 0.0
    cov_lin = sigma2 * np.array(
        [[1.0 / n + x_mean**2 / sxx, -x_mean / sxx], [-x_mean / sxx, 1.0 / sxx]]
    )
    jac = np.array([[0.0, 1.0 / slope**2], [amplitude, 0.0]])
    return T2FitResult(-1.0 / slope, amplitude, math.sqrt(rss / n), jac @ cov_lin @ jac.T)


@dataclass(frozen=True)
class T2Run:
    design: T2Design
    visibilities: tuple[VisibilityEstimate, ...]
    fit: T2FitResult

    @property
    def v1s(self) -> tuple[float, ...]:
        return tuple(v.v1 for v in self.visibilities)


def run_t2_experiment(
    t2: float,
    t2_guess: float | None = None,
    n_settings: int = MIN_T2_SETTINGS,
    v_saw: float = 2700.0,
    n_points: int = 64,
    n_samples: int | None = None,
    seed: int | None = None,
    gate_fidelity: float = 1.0,
) -> T2Run:
    """Design, sweep each path length, extract ``v1`` and fit T2.

    ``gate_fidelity`` is a constant coherence factor applied at every setting
    (beamsplitter errors independent of path length). Each setting draws from
    its own child seed of ``seed``.
    """
    if not 0.0 < gate_fidelity <= 1.0:
        raise DomainError("gate_fidelity must lie in (0, 1]")
    design = design_t2_experiment(t2 if t2_guess is None else t2_guess, n_settings, v_saw)
    gate_tau = -math.log(gate_fidelity) * t2
    if seed is None:
        seeds: list[int | None] = [None] * n_settings
    else:
        seeds = [int(s) for s in np.random.SeedSequence(seed).generate_state(n_settings)]
    bs = BeamsplitterSpec(math.pi / 4)
    estimates = []
    for tau, s in zip(design.taus, seeds):
        cfg = MziConfig(bs, bs, tau=tau + gate_tau, t2=t2)
        estimates.append(extract_visibility(fringe_sweep(cfg, n_points, n_samples, s)))
    fit = estimate_t2(design.taus, [e.v1 for e in estimates])
    return T2Run(design, tuple(estimates), fit)


def write_t2_csv(
    taus: Sequence[float], visibilities: Sequence[float], fit: T2FitResult, path: str | Path | None = None
) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["tau_s", "visibility"])
    for tau, v in zip(taus, visibilities):
        writer.writerow([_fmt(tau), _fmt(v)])
    buf.write(
        f"# t2_hat_s={_fmt(fit.t2_hat)} t2_stderr_s={_fmt(fit.t2_stderr)}"
        f" amplitude_hat={_fmt(fit.amplitude_hat)} residual_rms={_fmt(fit.residual_rms)}\n"
    )
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_t2_csv(path: str | Path) -> tuple[list[float], list[float]]:
    """Read ``tau_s,visibility`` rows, skipping ``#`` lines."""
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.DictReader(lines)
    if reader.fieldnames is None or not {"tau_s", "visibility"} <= set(reader.fieldnames):
        raise ValueError("expected header 'tau_s,visibility'")
    taus, vis = [], []
    for row in reader:
        taus.append(float(row["tau_s"]))
        vis.append(float(row["visibility"]))
    return taus, vis


# --------------------------------------------------------------------------
# Field sensing


@dataclass(frozen=True)
class FieldEstimate:
    e_hat: float
    sigma: float
    n_electrons: float


def _field_per_phase(device: DeviceParams) -> float:
    d, l, v_saw = device.require("d", "l_phase", "v_saw")
    return CONSTANTS.hbar * v_saw / (CONSTANTS.e * d * l)


def _check_working_point(psi: float) -> None:
    r = psi % math.pi
    if min(r, math.pi - r) < MIN_SLOPE_DISTANCE:
        raise DomainError(
            f"working point {psi:.4f} rad is within {MIN_SLOPE_DISTANCE} rad of a fringe extremum"
        )


def sensor_p1(
    device: DeviceParams, E: float, working_point: float, visibility: float = 1.0, gamma: float = 0.0
) -> float:
    """Detector-1 probability of a calibrated 50:50 sensor biased at ``working_point``."""
    phi = working_point + E / _field_per_phase(device)
    cfg = MziConfig.symmetric(math.pi / 4, gamma, phi, visibility)
    return mzi_simulate(cfg).p1


def sense_field(
    device: DeviceParams,
    observed_p1: float,
    working_point: float,
    delta_t: float,
    visibility: float = 1.0,
    gamma: float = 0.0,
) -> FieldEstimate:
    """Transverse field from the detector-1 fraction of a 50:50 sensor.

    The fringe ``P1 = (1 - V cos(gamma + phi))/2`` is inverted on the
    monotone half-period containing the working point. The standard error
    takes the binomial bound ``1/(2 sqrt(N))`` on ``P1``, ``N = f_saw * delta_t``,
    through the fringe slope at the working point.
    """
    (f_saw,) = device.require("f_saw")
    if not 0.0 < visibility <= 1.0:
        raise DomainError("visibility must lie in (0, 1]")
    if not 0.0 <= observed_p1 <= 1.0:
        raise DomainError(f"observed P1 must lie in [0, 1], got {observed_p1!r}")
    if not delta_t > 0.0:
        raise DomainError("integration time must be positive")
    psi_wp = (gamma + working_point) % (2 * math.pi)
    _check_working_point(psi_wp)

    c = min(max((1.0 - 2.0 * observed_p1) / visibility, -1.0), 1.0)
    psi_hat = math.acos(c)
    if psi_wp > math.pi:
        psi_hat = 2 * math.pi - psi_hat
    scale = _field_per_phase(device)
    n = f_saw * delta_t
    slope = 0.5 * visibility * abs(math.sin(psi_wp))
    sigma = 1.0 / (2.0 * math.sqrt(n)) / slope * scale
    return FieldEstimate((psi_hat - psi_wp) * scale, sigma, n)
