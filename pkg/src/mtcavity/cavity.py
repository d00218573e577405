"""Vacuum-field Rabi splitting for dimers coupled to the water cavity mode.

The vacuum field amplitude is evaluated in Gaussian units with a
dimensionless dielectric constant and converted to V/m at the boundary;
every other quantity is SI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import HBAR_CGS, HBAR_SI, M3_TO_CM3, STATVOLT_PER_CM_TO_V_PER_M
from .soliton import transit_time

# interior cylinder of a 1 um tube, radius 7 nm
DEFAULT_VOLUME_M3 = math.pi * (7e-9) ** 2 * 1e-6

# order-of-magnitude cavity field used by the collective-coupling estimate
REFERENCE_FIELD_V_PER_M = 1e4
REFERENCE_COLLECTIVE_COUPLING = 3e11


@dataclass(frozen=True)
class CavityParams:
    """Cavity and emitter parameters.

    ``coupling_field_V_per_m`` is the field entering the Rabi coupling.  It
    defaults to the 1e4 V/m order-of-magnitude value; set it to None to use
    the computed vacuum field instead.  With ``resonant`` the doublet is
    evaluated at zero detuning.
    """

    omega_c: float = 6e12
    omega_0: float = 1e12
    epsilon_rel: float = 80.0
    volume: float = DEFAULT_VOLUME_M3
    N: int = 111
    dipole_Cm: float = 3e-28
    polarization_cos: float = 1.0
    T_r: float = 1e-4
    coupling_field_V_per_m: Optional[float] = REFERENCE_FIELD_V_PER_M
    resonant: bool = True
    t_collapse_range: tuple = (1e-7, 1e-6)

    def __post_init__(self):
        for name in ("omega_c", "omega_0", "volume", "T_r", "epsilon_rel"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if abs(self.polarization_cos) > 1:
            raise ValueError("polarization_cos must lie in [-1, 1]")
        lo, hi = self.t_collapse_range
        if not 0 < lo <= hi:
            raise ValueError("t_collapse_range must be an ordered positive interval")

    @property
    def detuning(self) -> float:
        return 0.0 if self.resonant else self.omega_c - self.omega_0


@dataclass(frozen=True)
class RabiResult:
    E_c: float
    lambda0: float
    lambda_collective: float
    detuning: float
    peaks: tuple
    Q: float
    t_collapse_range: tuple

    @property
    def splitting(self) -> float:
        return self.peaks[0] - self.peaks[1]


def vacuum_field(omega_c: float, epsilon_rel: float, volume: float) -> float:
    """r.m.s. vacuum field (V/m) for a mode of frequency ``omega_c`` in ``volume`` m^3.

    E_c = sqrt(2 pi hbar omega_c / (eps V)) in statvolt/cm, then converted.
    """
    if not (omega_c > 0 and epsilon_rel > 0 and volume > 0):
        raise ValueError("omega_c, epsilon_rel and volume must be positive")
    gaussian = math.sqrt(2.0 * math.pi * HBAR_CGS * omega_c / (epsilon_rel * volume * M3_TO_CM3))
    return gaussian * STATVOLT_PER_CM_TO_V_PER_M


def rabi_coupling(E_c: float, dipole_Cm: float, polarization_cos: float = 1.0) -> float:
    """Single-emitter coupling lambda = E_c d cos(theta) / hbar, in 1/s."""
    if E_c < 0:
        raise ValueError("E_c must be non-negative")
    return E_c * dipole_Cm * polarization_cos / HBAR_SI


def consistent_dimer_count(lambda0: float, collective: float = REFERENCE_COLLECTIVE_COUPLING) -> int:
    """N for which sqrt(N) * lambda0 reproduces ``collective``."""
    if lambda0 <= 0:
        raise ValueError("lambda0 must be positive")
    return max(1, round((collective / lambda0) ** 2))


def doublet_peaks(omega_0: float, detuning: float, N: int, lambda0: float) -> tuple[float, float]:
    """(Omega+, Omega-) = omega_0 - D/2 +- sqrt(D^2 + 4 N lambda^2)/2."""
    if N < 1:
        raise ValueError("N must be >= 1")
    centre = omega_0 - 0.5 * detuning
    half = 0.5 * math.sqrt(detuning * detuning + 4.0 * N * lambda0 * lambda0)
    return centre + half, centre - half


def doublet(params: CavityParams, lambda0: float) -> tuple[float, float]:
    return doublet_peaks(params.omega_0, params.detuning, params.N, lambda0)


def peak_weights(detuning: float, N: int, lambda0: float) -> tuple[float, float]:
    """Relative weights of (Omega+, Omega-); equal at resonance."""
    s = math.sqrt(detuning * detuning + 4.0 * N * lambda0 * lambda0)
    if s == 0:
        return 0.5, 0.5
    return 0.5 * (1.0 + detuning / s), 0.5 * (1.0 - detuning / s)


def linewidth(params: CavityParams) -> float:
    """Lorentzian half-width omega_c / (2Q)."""
    return params.omega_c / (2.0 * quality_factor(params))


def spectrum(params: CavityParams, lambda0: float, omega, half_width: Optional[float] = None) -> np.ndarray:
    """Absorption curve: two unit-area Lorentzians at the doublet peaks."""
    omega = np.asarray(omega, dtype=float)
    if omega.size == 0:
        raise ValueError("empty frequency grid")
    gamma = linewidth(params) if half_width is None else half_width
    if not gamma > 0:
        raise ValueError("half-width must be positive")
    plus, minus = doublet(params, lambda0)
    w_plus, w_minus = peak_weights(params.detuning, params.N, lambda0)

    def lorentz(centre):
        return (gamma / math.pi) / ((omega - centre) ** 2 + gamma * gamma)

    return w_plus * lorentz(plus) + w_minus * lorentz(minus)


def quality_factor(params: CavityParams) -> float:
    return params.omega_c * params.T_r


@dataclass(frozen=True)
class FiguresOfMerit:
    Q: float
    t_collapse_range: tuple
    transit_time: Optional[float] = None
    outlasts_transit: Optional[bool] = None


def figures_of_merit(params: CavityParams, L: Optional[float] = None, v: Optional[float] = None) -> FiguresOfMerit:
    """Q and the collapse-time band; compares the band's upper end with L/v if given."""
    q = quality_factor(params)
    if L is None or v is None:
        return FiguresOfMerit(q, params.t_collapse_range)
    t_f = transit_time(L, v)
    return FiguresOfMerit(q, params.t_collapse_range, t_f, params.t_collapse_range[1] >= t_f)


def analyze(params: CavityParams = CavityParams()) -> RabiResult:
    E_c = vacuum_field(params.omega_c, params.epsilon_rel, params.volume)
    field_for_coupling = E_c if params.coupling_field_V_per_m is None else params.coupling_field_V_per_m
    lam = rabi_coupling(field_for_coupling, params.dipole_Cm, params.polarization_cos)
    return RabiResult(
        E_c=E_c,
        lambda0=lam,
        lambda_collective=lam * math.sqrt(params.N),
        detuning=params.detuning,
        peaks=doublet(params, lam),
        Q=quality_factor(params),
        t_collapse_range=tuple(params.t_collapse_range),
    )


REPORT_KEYS = (
    "E_c_V_per_m",
    "lambda0",
    "lambda_sqrtN",
    "omega_plus",
    "omega_minus",
    "Q",
    "t_collapse_lo",
    "t_collapse_hi",
)


def report_text(res: RabiResult) -> str:
    values = (
        res.E_c,
        res.lambda0,
        res.lambda_collective,
        res.peaks[0],
        res.peaks[1],
        res.Q,
        res.t_collapse_range[0],
        res.t_collapse_range[1],
    )
    return "".join(f"{k}={v:.12e}\n" for k, v in zip(REPORT_KEYS, values))


def parse_report(text: str) -> dict[str, float]:
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            key, _, value = line.partition("=")
            out[key.strip()] = float(value)
    return out
