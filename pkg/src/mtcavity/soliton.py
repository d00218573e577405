"""Kink solitons on the dimer chain.

Covers the analytic travelling-wave profiles, the damped nonlinear wave
equation

    u_tt = u_xx - gamma * u_t - M1(u) + force

integrated by the method of lines, the smeared (quantum-corrected) force
M1 = exp(a d^2/dz^2) U'(z), and transit-time bookkeeping.  Everything here
is dimensionless (wave speed 1); ``UnitsAdapter`` maps physical scales in
and out.
"""

from __future__ import annotations

import enum
import io
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

logger = logging.getLogger(__name__)

MAX_POTENTIAL_DEGREE = 6
MIN_POINTS_PER_WIDTH = 16
SPONGE_FRACTION = 0.05


class SolitonError(RuntimeError):
    pass


class CFLViolation(ValueError):
    pass


class NumericalAbort(SolitonError):
    """Raised when the field stops being finite; ``step`` is the first bad step."""

    def __init__(self, step: int, time: float):
        super().__init__(f"non-finite field at step {step} (t={time:.6g})")
        self.step = step
        self.time = time


# ---------------------------------------------------------------------------
# Potentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PotentialPoly:
    """Polynomial potential U(u) with ascending coefficients.

    The interaction term P(u) = U'(u) is the formal derivative.  ``coeffs``
    must carry 3 to 7 entries (nominal degree 2..6); trailing zeros are kept
    so that e.g. the zero potential is still a valid quadratic.
    """

    coeffs: tuple

    def __post_init__(self):
        c = tuple(float(a) for a in self.coeffs)
        if not 3 <= len(c) <= MAX_POTENTIAL_DEGREE + 1:
            raise ValueError(
                f"potential needs 3..{MAX_POTENTIAL_DEGREE + 1} coefficients, got {len(c)}"
            )
        if not all(math.isfinite(a) for a in c):
            raise ValueError("potential coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_force(cls, p_coeffs: Sequence[float], u0: float = 0.0) -> "PotentialPoly":
        """Potential whose derivative has ascending coefficients ``p_coeffs``."""
        c = npoly.polyint(np.asarray(p_coeffs, dtype=float), k=u0)
        if len(c) < 3:
            c = np.pad(c, (0, 3 - len(c)))
        return cls(tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def p_coeffs(self) -> np.ndarray:
        return npoly.polyder(np.asarray(self.coeffs))

    def U(self, u):
        return npoly.polyval(u, self.coeffs)

    def P(self, u):
        return npoly.polyval(u, self.p_coeffs)

    def derivative(self, u, order: int = 1):
        return npoly.polyval(u, npoly.polyder(np.asarray(self.coeffs), order))

    def vacua(self) -> np.ndarray:
        """Real local minima of U, ascending."""
        roots = npoly.polyroots(self.p_coeffs) if np.any(self.p_coeffs) else np.array([])
        real = np.sort(roots[np.abs(roots.imag) < 1e-9].real)
        return np.array([r for r in real if self.derivative(r, 2) > 0])

    @classmethod
    def double_well(cls, vacuum: float = 1.0, coupling: float = 1.0) -> "PotentialPoly":
        """U = coupling/4 * (u^2 - vacuum^2)^2, minima at +-vacuum."""
        v2 = vacuum * vacuum
        return cls((0.25 * coupling * v2 * v2, 0.0, -0.5 * coupling * v2, 0.0, 0.25 * coupling))


# ---------------------------------------------------------------------------
# Analytic profiles
# ---------------------------------------------------------------------------


class KinkVariant(enum.Enum):
    TANH = "tanh"
    SIGMOID = "sigmoid"


@dataclass(frozen=True)
class KinkProfile:
    """Travelling kink u(x, t) = f(x - x0 - v t).

    TANH:    c1 * (tanh(c2 * xi) + c3)
    SIGMOID: c1 + (c2 - c1) / (1 + exp(c3 * (c2 - c1) * xi))

    For SIGMOID the constants are the primed ones (c1', c2', c3').
    """

    c1: float
    c2: float
    c3: float
    v: float = 0.0
    variant: KinkVariant = KinkVariant.TANH
    x0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "variant", KinkVariant(self.variant))
        if self.variant is KinkVariant.TANH and not self.c2 > 0:
            raise ValueError("tanh kink needs c2 > 0")
        if self.variant is KinkVariant.SIGMOID and self.c2 == self.c1:
            raise ValueError("sigmoid kink needs c2' != c1'")

    @property
    def width(self) -> float:
        """Length scale of the core (1/c2 for tanh)."""
        if self.variant is KinkVariant.TANH:
            return 1.0 / self.c2
        rate = abs(self.c3 * (self.c2 - self.c1))
        return 2.0 / rate if rate > 0 else math.inf

    @property
    def asymptotes(self) -> tuple[float, float]:
        """(u(-inf), u(+inf))."""
        if self.variant is KinkVariant.TANH:
            return self.c1 * (self.c3 - 1.0), self.c1 * (self.c3 + 1.0)
        k = self.c3 * (self.c2 - self.c1)
        if k > 0:
            return self.c2, self.c1
        if k < 0:
            return self.c1, self.c2
        mid = 0.5 * (self.c1 + self.c2)
        return mid, mid

    def xi(self, x, t=0.0):
        return np.asarray(x, dtype=float) - self.x0 - self.v * t

    def _sigmoid_parts(self, xi):
        d = self.c2 - self.c1
        # 1/(1+e^y) == (1 - tanh(y/2))/2, written this way to avoid overflow
        s = 0.5 * (1.0 - np.tanh(0.5 * self.c3 * d * xi))
        return d, s

    def shape(self, xi):
        if self.variant is KinkVariant.TANH:
            return self.c1 * (np.tanh(self.c2 * xi) + self.c3)
        d, s = self._sigmoid_parts(xi)
        return self.c1 + d * s

    def shape_d1(self, xi):
        if self.variant is KinkVariant.TANH:
            s = np.tanh(self.c2 * xi)
            return self.c1 * self.c2 * (1.0 - s * s)
        d, s = self._sigmoid_parts(xi)
        return -self.c3 * d * d * s * (1.0 - s)

    def shape_d2(self, xi):
        if self.variant is KinkVariant.TANH:
            s = np.tanh(self.c2 * xi)
            return -2.0 * self.c1 * self.c2**2 * s * (1.0 - s * s)
        d, s = self._sigmoid_parts(xi)
        return self.c3**2 * d**3 * s * (1.0 - s) * (1.0 - 2.0 * s)

    def __call__(self, x, t=0.0):
        return self.shape(self.xi(x, t))

    def time_derivative(self, x, t=0.0):
        return -self.v * self.shape_d1(self.xi(x, t))

    def mirrored(self) -> "KinkProfile":
        """The antikink: same profile reflected about its centre."""
        if self.variant is KinkVariant.TANH:
            # c1(tanh(-c2 xi) + c3) = (-c1)(tanh(c2 xi) - c3)
            return replace(self, c1=-self.c1, c3=-self.c3, v=self.v)
        return replace(self, c3=-self.c3)


def kink_eval(k: KinkProfile, x, t=0.0):
    return k(x, t)


def boosted_double_well_kink(
    v: float = 0.0, x0: float = 0.0, vacuum: float = 1.0, coupling: float = 1.0
) -> KinkProfile:
    """Exact undamped, unforced travelling kink of ``PotentialPoly.double_well``."""
    if not abs(v) < 1.0:
        raise ValueError("kink speed must be subluminal (|v| < 1)")
    c2 = vacuum * math.sqrt(0.5 * coupling / (1.0 - v * v))
    return KinkProfile(c1=vacuum, c2=c2, c3=0.0, v=v, x0=x0)


# ---------------------------------------------------------------------------
# Travelling-wave residual
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResidualResult:
    max_residual: float
    under_resolved: bool


def traveling_residual(k: KinkProfile, P: PotentialPoly, rho: float, grid) -> ResidualResult:
    """Max over the grid of |u'' + rho u' - P(u)| using analytic derivatives.

    ``grid`` holds travelling coordinates xi.  ``P`` is given as its
    PotentialPoly (P = U').
    """
    xi = np.asarray(grid, dtype=float)
    if xi.size == 0:
        raise ValueError("empty grid")
    u = k.shape(xi)
    r = k.shape_d2(xi) + rho * k.shape_d1(xi) - P.P(u)
    under = False
    if xi.size > 1:
        spacing = float(np.max(np.abs(np.diff(xi))))
        under = spacing * MIN_POINTS_PER_WIDTH > k.width
    if under:
        logger.warning("grid spacing under-resolves the kink width %.3g", k.width)
    return ResidualResult(float(np.max(np.abs(r))), under)


def matched_cubic(k: KinkProfile, rho: float) -> PotentialPoly:
    """Potential whose P(u) makes the tanh kink an exact solution of u'' + rho u' = P(u).

    With s = tanh(c2 xi) one has u'' + rho u' = c1 c2 (1 - s^2)(rho - 2 c2 s);
    substituting s = u/c1 - c3 gives a cubic in u.
    """
    if k.variant is not KinkVariant.TANH:
        raise ValueError("matched_cubic handles tanh kinks only")
    if k.c1 == 0:
        return PotentialPoly((0.0, 0.0, 0.0))
    c1, c2, c3 = k.c1, k.c2, k.c3
    in_s = c1 * c2 * np.array([rho, -2.0 * c2, -rho, 2.0 * c2])
    s_of_u = np.array([-c3, 1.0 / c1])
    p = np.zeros(1)
    for coef in in_s[::-1]:  # Horner composition
        p = npoly.polyadd(npoly.polymul(p, s_of_u), [coef])
    return PotentialPoly.from_force(p)


def traveling_frame(U: PotentialPoly, gamma: float, force: float, v: float):
    """Reduce the lab-frame PDE to u'' + rho u' = P(u) for speed ``v``.

    Substituting u(x - v t) gives (1 - v^2) u'' + gamma v u' = U'(u) - force,
    hence rho = gamma v / (1 - v^2) and P = (U' - force) / (1 - v^2).
    """
    if not abs(v) < 1.0:
        raise ValueError("|v| must be < 1 in dimensionless units")
    scale = 1.0 / (1.0 - v * v)
    p = U.p_coeffs.copy()
    p[0] -= force
    return gamma * v * scale, PotentialPoly.from_force(p * scale)


@dataclass(frozen=True)
class UnitsAdapter:
    """Maps physical lattice scales to the dimensionless PDE.

    One length unit is ``length_scale_m`` (default: one dimer repeat) and
    one time unit is ``time_scale_s`` (default: 1/omega_0 with
    omega_0 = 1e12 rad/s).  ``rho_per_gamma`` fixes the damping
    proportionality; when None the exact travelling-frame factor
    v/(1 - v^2) is used.
    """

    length_scale_m: float = 8e-9
    time_scale_s: float = 1e-12
    field_scale: float = 1.0
    rho_per_gamma: Optional[float] = None

    @property
    def speed_scale(self) -> float:
        return self.length_scale_m / self.time_scale_s

    def speed(self, v_m_per_s: float) -> float:
        return v_m_per_s / self.speed_scale

    def length(self, L_m: float) -> float:
        return L_m / self.length_scale_m

    def seconds(self, t: float) -> float:
        return t * self.time_scale_s

    def rho(self, gamma: float, v: float) -> float:
        if self.rho_per_gamma is not None:
            return self.rho_per_gamma * gamma
        return gamma * v / (1.0 - v * v)


# ---------------------------------------------------------------------------
# Quantum-corrected force
# ---------------------------------------------------------------------------


class CorrectionMode(enum.Enum):
    OFF = "off"
    CONSTANT = "constant"
    PROFILE = "profile"


@dataclass(frozen=True)
class QuantumCorrection:
    """Diagonal bilocal difference G(x,x,t) - G0(x,x) that smears the force.

    In CONSTANT mode ``delta_g`` is a scalar; in PROFILE mode an array
    matching the spatial grid.
    """

    delta_g: Union[float, np.ndarray] = 0.0
    mode: CorrectionMode = CorrectionMode.OFF

    def __post_init__(self):
        mode = CorrectionMode(self.mode)
        object.__setattr__(self, "mode", mode)
        if mode is CorrectionMode.OFF:
            return
        dg = np.asarray(self.delta_g, dtype=float)
        if mode is CorrectionMode.CONSTANT and dg.ndim != 0:
            raise ValueError("CONSTANT mode takes a scalar delta_g")
        if np.any(dg < 0) or not np.all(np.isfinite(dg)):
            raise ValueError("delta_g must be finite and >= 0 in smear modes")
        if mode is CorrectionMode.CONSTANT:
            object.__setattr__(self, "delta_g", float(dg))
        else:
            dg = dg.copy()
            dg.setflags(write=False)
            object.__setattr__(self, "delta_g", dg)

    @property
    def smear(self):
        """a = delta_g / 2, or 0 when switched off."""
        if self.mode is CorrectionMode.OFF:
            return 0.0
        return 0.5 * self.delta_g if self.mode is CorrectionMode.CONSTANT else 0.5 * np.asarray(self.delta_g)


NO_CORRECTION = QuantumCorrection()


def smeared_coeffs(coeffs: Sequence[float], a: float) -> np.ndarray:
    """Coefficients of exp(a d^2/dz^2) applied to a polynomial.

    The series sum_k a^k/k! f^(2k) terminates because f is a polynomial.
    """
    c = np.asarray(coeffs, dtype=float)
    out = c.copy()
    term = c
    k = 0
    while True:
        term = npoly.polyder(term, 2)
        k += 1
        if term.size == 0 or not np.any(term):
            break
        out[: term.size] += a**k / math.factorial(k) * term
    return out


def corrected_force(U: PotentialPoly, q: QuantumCorrection, z):
    """M1(z) = exp(a d^2/dz^2) U'(z) with a = delta_g / 2."""
    if not isinstance(U, PotentialPoly):
        raise TypeError("corrected_force supports polynomial potentials only")
    p = U.p_coeffs
    a = q.smear
    if np.ndim(a) == 0:
        return npoly.polyval(z, smeared_coeffs(p, float(a)))
    # profile smear: a varies pointwise
    a = np.asarray(a)
    z = np.asarray(z, dtype=float)
    total = npoly.polyval(z, p)
    term = p
    k = 0
    while True:
        term = npoly.polyder(term, 2)
        k += 1
        if term.size == 0 or not np.any(term):
            break
        total = total + a**k / math.factorial(k) * npoly.polyval(z, term)
    return total


# ---------------------------------------------------------------------------
# Field state and integrator
# ---------------------------------------------------------------------------


class Boundary(enum.Enum):
    FIXED = "fixed"
    PERIODIC = "periodic"
    ABSORBING = "absorbing"


@dataclass(frozen=True)
class Grid:
    x0: float
    dx: float
    n_points: int

    def __post_init__(self):
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        if self.n_points < 3:
            raise ValueError("need at least 3 grid points")

    @classmethod
    def centered(cls, length: float, n_points: int, periodic: bool = False) -> "Grid":
        """Grid on [-length/2, length/2] (right end excluded when periodic)."""
        dx = length / (n_points if periodic else n_points - 1)
        return cls(-0.5 * length, dx, n_points)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n_points)


@dataclass(frozen=True)
class FieldState:
    grid: Grid
    u: np.ndarray
    u_t: np.ndarray
    time: float = 0.0
    boundary: Boundary = Boundary.FIXED
    gamma: float = 0.0
    force: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        for name in ("u", "u_t"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (self.grid.n_points,):
                raise ValueError(f"{name} must have length {self.grid.n_points}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")

    @classmethod
    def from_profiles(cls, grid: Grid, profiles: Sequence[KinkProfile], background: float = 0.0, **kw):
        """Superpose kinks as u = background + sum(k - k(-inf))."""
        x = grid.x
        u = np.full(grid.n_points, float(background))
        u_t = np.zeros(grid.n_points)
        for k in profiles:
            u += k(x) - k.asymptotes[0]
            u_t += k.time_derivative(x)
        return cls(grid, u, u_t, **kw)

    @classmethod
    def vacuum(cls, grid: Grid, value: float, **kw):
        return cls(grid, np.full(grid.n_points, float(value)), np.zeros(grid.n_points), **kw)


def kink_position(x: np.ndarray, u: np.ndarray, level: float) -> float:
    """Leftmost crossing of ``level`` by linear interpolation (NaN if none)."""
    d = u - level
    idx = np.nonzero((d[:-1] == 0) | (d[:-1] * d[1:] < 0))[0]
    if idx.size == 0:
        if d[-1] == 0:
            return float(x[-1])
        return math.nan
    i = idx[0]
    if d[i] == 0:
        return float(x[i])
    frac = d[i] / (d[i] - d[i + 1])
    return float(x[i] + frac * (x[i + 1] - x[i]))


def _laplacian(u: np.ndarray, dx: float, periodic: bool, out: np.ndarray) -> np.ndarray:
    inv = 1.0 / (dx * dx)
    if periodic:
        np.subtract(np.roll(u, 1) + np.roll(u, -1), 2.0 * u, out=out)
        out *= inv
    else:
        out[1:-1] = (u[:-2] - 2.0 * u[1:-1] + u[2:]) * inv
        out[0] = 0.0
        out[-1] = 0.0
    return out


def sponge_profile(n_points: int, strength: float = 1.0, fraction: float = SPONGE_FRACTION) -> np.ndarray:
    """Extra damping, ramping linearly from 0 to ``strength`` over the outer ``fraction`` of each end."""
    width = max(1, int(round(fraction * n_points)))
    sigma = np.zeros(n_points)
    ramp = strength * np.arange(width, 0, -1) / width
    sigma[:width] = ramp
    sigma[-width:] = ramp[::-1]
    return sigma


def discrete_energy(state: FieldState, U: PotentialPoly, q: QuantumCorrection = NO_CORRECTION) -> float:
    """Sum of [u_t^2/2 + (D+ u)^2/2 + U_eff(u) - force*u] dx.

    The gradient uses forward differences, which is the energy conserved by
    the 3-point Laplacian.  With a constant smear U_eff is the smeared
    potential (its derivative is M1); profile smear falls back to bare U.
    """
    u, ut, dx = state.u, state.u_t, state.grid.dx
    if state.boundary is Boundary.PERIODIC:
        du = np.roll(u, -1) - u
    else:
        du = np.diff(u)
    a = q.smear
    coeffs = smeared_coeffs(U.coeffs, float(a)) if np.ndim(a) == 0 else np.asarray(U.coeffs)
    pot = npoly.polyval(u, coeffs) - state.force * u
    kinetic = ut
    if state.boundary is not Boundary.PERIODIC:
        kinetic = ut[1:-1]
    return float(dx * (0.5 * np.dot(kinetic, kinetic) + 0.5 * np.dot(du, du) / (dx * dx) + pot.sum()))


@dataclass(frozen=True)
class TrajectorySample:
    step: int
    time: float
    kink_pos: float
    speed_est: float
    shape_l2: float
    energy: float


@dataclass(frozen=True)
class EvolveResult:
    state: FieldState
    samples: list

    def positions(self) -> tuple[np.ndarray, np.ndarray]:
        t = np.array([s.time for s in self.samples])
        x = np.array([s.kink_pos for s in self.samples])
        return t, x

    def fitted_speed(self) -> float:
        """Least-squares slope of kink position against time."""
        t, x = self.positions()
        ok = np.isfinite(x)
        if ok.sum() < 2:
            return math.nan
        return float(np.polyfit(t[ok], x[ok], 1)[0])


def shape_error(state: FieldState, reference: KinkProfile) -> float:
    """Relative L2 distance between u and the analytic profile at the current time.

    The norm is taken relative to the profile's distance from its nearest
    asymptote, which is only O(1) inside the core, so the measure does not
    shrink as the box grows.
    """
    x = state.grid.x
    ref = reference(x, state.time)
    lo, hi = reference.asymptotes
    core = np.minimum(np.abs(ref - lo), np.abs(ref - hi))
    denom = math.sqrt(state.grid.dx * np.dot(core, core))
    err = math.sqrt(state.grid.dx * np.dot(state.u - ref, state.u - ref))
    return err / denom if denom > 0 else err


def evolve(
    state: FieldState,
    U: PotentialPoly,
    q: QuantumCorrection = NO_CORRECTION,
    dt: float = 0.01,
    n_steps: int = 1,
    sample_every: int = 0,
    reference: Optional[KinkProfile] = None,
    level: Optional[float] = None,
    sponge_strength: float = 1.0,
) -> EvolveResult:
    """Integrate u_tt = u_xx - gamma u_t - M1(u) + force.

    Second-order central differences in space and a damped leapfrog
    (kick-drift-kick) in time.  Samples are taken every ``sample_every``
    steps (0: first and last only).  ``reference`` enables the shape error
    and, by default, the mid-level used for the kink position.
    """
    grid = state.grid
    if not dt > 0:
        raise ValueError("dt must be positive")
    if dt > 0.9 * grid.dx:
        raise CFLViolation(f"dt={dt:g} exceeds 0.9*dx={0.9 * grid.dx:g}")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if q.mode is CorrectionMode.PROFILE and np.shape(q.delta_g) != (grid.n_points,):
        raise ValueError("profile delta_g must match the grid")

    periodic = state.boundary is Boundary.PERIODIC
    a = q.smear
    if np.ndim(a) == 0:
        m1_coeffs = smeared_coeffs(U.p_coeffs, float(a))

        def m1(z):
            return npoly.polyval(z, m1_coeffs)
    else:

        def m1(z):
            return corrected_force(U, q, z)

    damping = np.full(grid.n_points, state.gamma)
    if state.boundary is Boundary.ABSORBING:
        damping = damping + sponge_profile(grid.n_points, sponge_strength)
    half = 0.5 * dt
    pre = 1.0 / (1.0 + half * damping)
    post = 1.0 - half * damping

    if level is None:
        if reference is not None:
            level = 0.5 * sum(reference.asymptotes)
        else:
            level = 0.5 * (state.u[0] + state.u[-1])

    u = state.u.copy()
    v = state.u_t.copy()
    lap = np.empty_like(u)
    x = grid.x

    def accel(u):
        acc = _laplacian(u, grid.dx, periodic, lap) - m1(u) + state.force
        if not periodic:
            acc[0] = 0.0
            acc[-1] = 0.0
        return acc

    if not periodic:
        v[0] = v[-1] = 0.0
    acc = accel(u)
    t0 = state.time
    samples: list[TrajectorySample] = []
    prev = [None]

    def record(step, u, v):
        t = t0 + step * dt
        snap = replace(state, u=u, u_t=v, time=t)
        pos = kink_position(x, u, level)
        if prev[0] is not None and math.isfinite(pos) and math.isfinite(prev[0][1]):
            speed = (pos - prev[0][1]) / (t - prev[0][0])
        else:
            speed = math.nan
        prev[0] = (t, pos)
        err = shape_error(snap, reference) if reference is not None else math.nan
        samples.append(TrajectorySample(step, t, pos, speed, err, discrete_energy(snap, U, q)))

    record(0, u, v)
    # blow-up is reported through NumericalAbort, not floating-point warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, n_steps + 1):
            v += half * acc
            v *= pre
            u += dt * v
            acc = accel(u)
            v *= post
            v += half * acc
            if not math.isfinite(u.sum()):
                raise NumericalAbort(step, t0 + step * dt)
            if (sample_every and step % sample_every == 0) or step == n_steps:
                if not samples or samples[-1].step != step:
                    record(step, u, v)
    final = replace(state, u=u, u_t=v, time=t0 + n_steps * dt)
    return EvolveResult(final, samples)


# ---------------------------------------------------------------------------
# Collisions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CollisionReport:
    survivors: int
    final_vacuum_residual: float
    state: FieldState = field(repr=False)


def count_structures(u: np.ndarray, vacua: np.ndarray, amplitude: float, periodic: bool = False) -> int:
    """Number of walls separating the far-field vacuum from regions beyond half an amplitude."""
    if vacua.size == 0:
        raise SolitonError("potential has no vacuum")
    ref = vacua[np.argmin(np.abs(vacua - u[0]))]
    away = np.abs(u - ref) > 0.5 * amplitude
    if periodic:
        return int(np.count_nonzero(away != np.roll(away, -1)))
    return int(np.count_nonzero(away[1:] != away[:-1]))


def vacuum_residual(u: np.ndarray, vacua: np.ndarray) -> float:
    """max_x of the distance from u(x) to the nearest vacuum."""
    return float(np.max(np.min(np.abs(u[:, None] - vacua[None, :]), axis=1)))


def collide(
    state: FieldState,
    U: PotentialPoly,
    gamma: Optional[float] = None,
    dt: float = 0.01,
    n_steps: int = 1,
    amplitude: Optional[float] = None,
) -> CollisionReport:
    """Evolve kink/antikink initial data and count what is left.

    ``amplitude`` defaults to the spread of U's vacua.  The vacuum residual
    is measured against the shifted vacua when a constant force is present.
    """
    if gamma is not None:
        state = replace(state, gamma=gamma)
    shifted = replace(U, coeffs=tuple(np.asarray(U.coeffs) - np.pad([0.0, state.force], (0, len(U.coeffs) - 2))))
    vacua = shifted.vacua()
    if vacua.size == 0:
        raise SolitonError("potential has no vacuum")
    if amplitude is None:
        amplitude = float(vacua[-1] - vacua[0]) if vacua.size > 1 else 1.0
    result = evolve(state, U, dt=dt, n_steps=n_steps)
    u = result.state.u
    periodic = state.boundary is Boundary.PERIODIC
    return CollisionReport(
        survivors=count_structures(u, vacua, amplitude, periodic),
        final_vacuum_residual=vacuum_residual(u, vacua),
        state=result.state,
    )


def kink_antikink_state(
    grid: Grid,
    separation: float,
    speed: float = 0.0,
    vacuum: float = 1.0,
    coupling: float = 1.0,
    offset: float = 0.0,
    **kw,
) -> FieldState:
    """Kink on the left moving right, antikink on the right moving left.

    Both sit on the double-well background -vacuum; ``offset`` shifts the
    antikink to model a launch delay.
    """
    left = boosted_double_well_kink(speed, -0.5 * separation, vacuum, coupling)
    right = boosted_double_well_kink(-speed, 0.5 * separation + offset, vacuum, coupling).mirrored()
    return FieldState.from_profiles(grid, [left, right], background=-vacuum, **kw)


# ---------------------------------------------------------------------------
# Transit time and I/O
# ---------------------------------------------------------------------------


def transit_time(L: float, v: float) -> float:
    """Time for a kink moving at ``v`` to cross length ``L`` (SI)."""
    if not (L > 0 and v > 0):
        raise ValueError(f"length and speed must be positive, got L={L}, v={v}")
    return L / v


def trajectory_csv(samples: Sequence[TrajectorySample]) -> str:
    buf = io.StringIO()
    buf.write("step,time,kink_pos,speed_est,shape_l2,energy\n")
    for s in samples:
        buf.write(
            f"{s.step},{s.time:.12e},{s.kink_pos:.12e},{s.speed_est:.12e},{s.shape_l2:.12e},{s.energy:.12e}\n"
        )
    return buf.getvalue()


def snapshot_csv(state: FieldState) -> str:
    buf = io.StringIO()
    buf.write("x,u,u_t\n")
    for xi, ui, vi in zip(state.grid.x, state.u, state.u_t):
        buf.write(f"{xi:.12e},{ui:.12e},{vi:.12e}\n")
    return buf.getvalue()
