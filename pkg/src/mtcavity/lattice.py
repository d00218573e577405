"""Microtubule lattice geometry and tubulin dimer dipole estimates.

The lattice is a 13-protofilament tube; each site is one alpha/beta dimer
holding a two-state (Up/Down) electric-dipole conformation.  Transverse
coordinates are for reporting only: the transport model downstream is
one-dimensional along the tube axis.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace
from enum import IntEnum

import numpy as np

from .constants import DEBYE, ELEMENTARY_CHARGE, NM

# Neighbouring protofilaments are offset by a fifth of the dimer height.
AXIAL_STAGGER = 0.2

# Molecular-simulation value for the free tubulin dipole, in debye.
SIMULATED_DIPOLE_DEBYE = 1714.0


class ConformationState(IntEnum):
    DOWN = 0  # GDP-tubulin (trunk)
    UP = 1  # GTP-tubulin


@dataclass(frozen=True)
class DimerSpec:
    """Geometry and charge content of a single tubulin dimer.

    Lengths are in nm, energies in eV, angles in degrees.  ``height_nm`` is
    the axial repeat used for site placement; the full box is kept for
    reference.
    """

    height_nm: float = 8.0
    width_nm: float = 4.0
    depth_nm: float = 6.5
    mobile_electrons: int = 36
    pocket_separation_nm: float = 4.0
    hydrolysis_energy_eV: float = 0.42
    flip_angle_free_deg: float = 27.7
    flip_angle_trunk_deg: float = 2.0

    def __post_init__(self):
        for name in ("height_nm", "width_nm", "depth_nm", "pocket_separation_nm"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.mobile_electrons < 0:
            raise ValueError("mobile_electrons must be non-negative")
        for name in ("flip_angle_free_deg", "flip_angle_trunk_deg"):
            angle = getattr(self, name)
            if not 0.0 <= angle < 90.0:
                raise ValueError(f"{name} must lie in [0, 90), got {angle}")
        if self.flip_angle_trunk_deg > self.flip_angle_free_deg:
            raise ValueError("trunk flip angle cannot exceed the free-tubulin angle")


@dataclass(frozen=True)
class DipoleEstimate:
    raw_Cm: float
    screened_Cm: float
    debye: float
    epsilon_rel: float = 80.0


@dataclass(frozen=True)
class MTLattice:
    n_rings: int
    dimer: DimerSpec = field(default_factory=DimerSpec)
    n_protofilaments: int = 13
    helix_start: int = 5
    inner_radius_nm: float = 7.0
    outer_radius_nm: float = 12.5
    states: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.n_rings < 1:
            raise ValueError(f"n_rings must be >= 1, got {self.n_rings}")
        if self.n_protofilaments < 1:
            raise ValueError("n_protofilaments must be >= 1")
        if not self.outer_radius_nm > self.inner_radius_nm > 0:
            raise ValueError("need outer_radius_nm > inner_radius_nm > 0")
        shape = (self.n_protofilaments, self.n_rings)
        if self.states is None:
            states = np.full(shape, ConformationState.DOWN, dtype=np.int8)
        else:
            states = np.array(self.states, dtype=np.int8)
            if states.shape != shape:
                raise ValueError(f"states must have shape {shape}, got {states.shape}")
            if not np.isin(states, (ConformationState.DOWN, ConformationState.UP)).all():
                raise ValueError("every site must be Up or Down")
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    @property
    def n_sites(self) -> int:
        return self.n_protofilaments * self.n_rings

    @property
    def length_m(self) -> float:
        return self.n_rings * self.dimer.height_nm * NM

    @property
    def mean_radius_nm(self) -> float:
        return 0.5 * (self.inner_radius_nm + self.outer_radius_nm)

    def with_state(self, p: int, n: int, state: ConformationState) -> "MTLattice":
        """Return a copy with site (p, n) set to ``state``."""
        _check_index(self, p, n)
        states = self.states.copy()
        states[p, n] = ConformationState(state)
        return replace(self, states=states)


def build_lattice(n_rings: int, spec: DimerSpec | None = None, **overrides) -> MTLattice:
    """Build a lattice of ``n_rings`` dimer rings, every site Down.

    ``overrides`` may set any other MTLattice field (``n_protofilaments``,
    ``inner_radius_nm``, ...).
    """
    if not isinstance(n_rings, (int, np.integer)) or n_rings < 1:
        raise ValueError(f"n_rings must be a positive integer, got {n_rings!r}")
    if "states" in overrides:
        raise ValueError("build_lattice always starts from the all-Down lattice")
    return MTLattice(n_rings=int(n_rings), dimer=spec or DimerSpec(), **overrides)


def _check_index(lat: MTLattice, p: int, n: int) -> None:
    if not 0 <= p < lat.n_protofilaments:
        raise ValueError(f"protofilament index {p} out of range [0, {lat.n_protofilaments})")
    if not 0 <= n < lat.n_rings:
        raise ValueError(f"ring index {n} out of range [0, {lat.n_rings})")


def site_position(lat: MTLattice, p: int, n: int) -> tuple[float, float, float]:
    """Cartesian position (nm) of site (p, n); x runs along the tube axis."""
    _check_index(lat, p, n)
    h = lat.dimer.height_nm
    x = n * h + p * (AXIAL_STAGGER * h)
    phi = 2.0 * math.pi * p / lat.n_protofilaments
    r = lat.mean_radius_nm
    return x, r * math.cos(phi), r * math.sin(phi)


def estimate_dipole(spec: DimerSpec | None = None, epsilon_rel: float = 80.0) -> DipoleEstimate:
    """Mobile charge times pocket separation, optionally screened by water."""
    spec = spec or DimerSpec()
    if epsilon_rel < 1:
        raise ValueError(f"epsilon_rel must be >= 1, got {epsilon_rel}")
    raw = spec.mobile_electrons * ELEMENTARY_CHARGE * spec.pocket_separation_nm * NM
    return DipoleEstimate(
        raw_Cm=raw,
        screened_Cm=raw / epsilon_rel,
        debye=raw / DEBYE,
        epsilon_rel=float(epsilon_rel),
    )


def simulated_dipole_preset(epsilon_rel: float = 80.0) -> DipoleEstimate:
    """The 1714 D molecular-simulation value, taken as given."""
    if epsilon_rel < 1:
        raise ValueError(f"epsilon_rel must be >= 1, got {epsilon_rel}")
    raw = SIMULATED_DIPOLE_DEBYE * DEBYE
    return DipoleEstimate(raw, raw / epsilon_rel, SIMULATED_DIPOLE_DEBYE, float(epsilon_rel))


def longitudinal_projection(spec: DimerSpec, d_Cm: float, trunk: bool = False) -> float:
    """Axial projection of the dipole, used as the kink amplitude scale.

    The trunk of a polymerised tube flips by a much smaller angle than free
    tubulin, hence the ``trunk`` switch.
    """
    if d_Cm < 0:
        raise ValueError("dipole magnitude must be non-negative")
    angle = spec.flip_angle_trunk_deg if trunk else spec.flip_angle_free_deg
    return d_Cm * math.sin(math.radians(angle))


def lattice_csv(lat: MTLattice) -> str:
    """Dump every site as ``p,n,x_nm,y_nm,z_nm,state`` (p-major order)."""
    buf = io.StringIO()
    buf.write("p,n,x_nm,y_nm,z_nm,state\n")
    for p in range(lat.n_protofilaments):
        for n in range(lat.n_rings):
            x, y, z = site_position(lat, p, n)
            state = ConformationState(int(lat.states[p, n])).name.lower()
            buf.write(f"{p},{n},{x:.6e},{y:.6e},{z:.6e},{state}\n")
    return buf.getvalue()
