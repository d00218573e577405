"""Soliton logic gates on tube segments joined by MAP links.

Two layers:

* abstract - each MAP passes the soliton on its source segment with
  probability p; arrivals of opposite phase annihilate, equal phases
  coalesce.  Distributions are enumerated exactly (up to 20 MAPs) or
  sampled.
* physical - the two-input, one-output topology is run through the PDE:
  a Plus arrival launches a kink, a Minus arrival an antikink, and the
  output bit is whether anything survives.
"""

from __future__ import annotations

import enum
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from . import soliton as sol

MAX_EXACT_MAPS = 20


class GateError(ValueError):
    pass


class Phase(enum.IntEnum):
    PLUS = 1
    MINUS = -1

    @classmethod
    def parse(cls, token) -> "Phase":
        if isinstance(token, Phase):
            return token
        if token in ("+", "plus", "Plus", 1):
            return cls.PLUS
        if token in ("-", "minus", "Minus", -1):
            return cls.MINUS
        raise GateError(f"unknown phase {token!r}")


@dataclass(frozen=True)
class Segment:
    id: str
    length_um: float

    def __post_init__(self):
        if not self.length_um > 0:
            raise GateError(f"segment {self.id} needs positive length")


@dataclass(frozen=True)
class MapLink:
    source: str
    target: str
    position_um: float
    p: float = 1.0
    phase: Phase = Phase.PLUS

    def __post_init__(self):
        object.__setattr__(self, "phase", Phase.parse(self.phase))
        if not 0.0 <= self.p <= 1.0:
            raise GateError(f"transmit probability {self.p} outside [0, 1]")
        if self.source == self.target:
            raise GateError("a MAP must join two different segments")


@dataclass(frozen=True)
class GateNetwork:
    segments: tuple
    maps: tuple

    def __post_init__(self):
        segs = tuple(self.segments)
        maps = tuple(self.maps)
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "maps", maps)
        ids = [s.id for s in segs]
        if len(set(ids)) != len(ids):
            raise GateError("duplicate segment ids")
        by_id = {s.id: s for s in segs}
        for m in maps:
            for end in (m.source, m.target):
                if end not in by_id:
                    raise GateError(f"MAP references unknown segment {end!r}")
            if not 0.0 <= m.position_um <= by_id[m.source].length_um:
                raise GateError(f"binding position {m.position_um} outside segment {m.source}")
        self.topological_order()  # rejects cycles

    @property
    def ids(self) -> list[str]:
        return [s.id for s in self.segments]

    @property
    def input_segments(self) -> list[str]:
        """Segments with no incoming MAP, in declaration order."""
        targets = {m.target for m in self.maps}
        return [s.id for s in self.segments if s.id not in targets]

    def segment(self, seg_id: str) -> Segment:
        return next(s for s in self.segments if s.id == seg_id)

    def incoming(self, seg_id: str) -> list[int]:
        return [i for i, m in enumerate(self.maps) if m.target == seg_id]

    def topological_order(self) -> list[str]:
        indeg = {s: 0 for s in self.ids}
        for m in self.maps:
            indeg[m.target] += 1
        ready = [s for s in self.ids if indeg[s] == 0]
        order = []
        while ready:
            s = ready.pop(0)
            order.append(s)
            for m in self.maps:
                if m.source == s:
                    indeg[m.target] -= 1
                    if indeg[m.target] == 0:
                        ready.append(m.target)
        if len(order) != len(self.ids):
            raise GateError("MAP links form a cycle")
        return order


def xor_network(p: float = 1.0, length_um: float = 1.0) -> GateNetwork:
    """Two input segments feeding one output through opposite-phase MAPs."""
    segs = (Segment("a1", length_um), Segment("a2", length_um), Segment("b", length_um))
    maps = (
        MapLink("a1", "b", 0.5 * length_um, p, Phase.PLUS),
        MapLink("a2", "b", 0.5 * length_um, p, Phase.MINUS),
    )
    return GateNetwork(segs, maps)


@dataclass(frozen=True)
class GateOutcome:
    segment_ids: tuple
    distribution: dict  # output bit tuple -> probability

    def probability(self, seg_id: str, bit: int = 1) -> float:
        k = self.segment_ids.index(seg_id)
        return float(sum(p for bits, p in self.distribution.items() if bits[k] == bit))

    def most_likely(self) -> tuple:
        return max(self.distribution.items(), key=lambda kv: kv[1])[0]

    def bit(self, seg_id: str) -> int:
        """Output bit of ``seg_id`` when the outcome is deterministic."""
        p1 = self.probability(seg_id, 1)
        if not (math.isclose(p1, 0.0, abs_tol=1e-12) or math.isclose(p1, 1.0, abs_tol=1e-12)):
            raise GateError(f"segment {seg_id} is not deterministic (P(1)={p1})")
        return int(round(p1))


def _input_vector(net: GateNetwork, inputs) -> np.ndarray:
    bits = np.zeros(len(net.segments), dtype=np.int64)
    if isinstance(inputs, Mapping):
        for seg_id, b in inputs.items():
            if seg_id not in net.ids:
                raise GateError(f"unknown input segment {seg_id!r}")
            bits[net.ids.index(seg_id)] = int(b)
    else:
        inputs = list(inputs)
        srcs = net.input_segments
        if len(inputs) != len(srcs):
            raise GateError(f"expected {len(srcs)} input bits for {srcs}, got {len(inputs)}")
        for seg_id, b in zip(srcs, inputs):
            bits[net.ids.index(seg_id)] = int(b)
    if not np.isin(bits, (0, 1)).all():
        raise GateError("input bits must be 0 or 1")
    return bits


def _propagate(net: GateNetwork, inputs: np.ndarray, transmit: np.ndarray, same_phase: str) -> np.ndarray:
    """Signed soliton charge per segment for each row of ``transmit``.

    ``transmit`` is (configs, maps) boolean; the result is (configs,
    segments) in {-1, 0, 1}.
    """
    n_cfg = transmit.shape[0]
    charge = np.zeros((n_cfg, len(net.segments)), dtype=np.int64)
    col = {s: i for i, s in enumerate(net.ids)}
    for seg in net.topological_order():
        j = col[seg]
        total = np.full(n_cfg, inputs[j], dtype=np.int64)
        plus = np.full(n_cfg, inputs[j], dtype=np.int64)
        minus = np.zeros(n_cfg, dtype=np.int64)
        for i in net.incoming(seg):
            m = net.maps[i]
            arriving = transmit[:, i] * charge[:, col[m.source]] * int(m.phase)
            total += arriving
            plus += arriving > 0
            minus += arriving < 0
        if same_phase == "error" and (np.any(plus > 1) or np.any(minus > 1)):
            raise GateError(f"same-phase solitons meet on segment {seg}")
        charge[:, j] = np.sign(total)
    return charge


def _collect(net: GateNetwork, charge: np.ndarray, weights: np.ndarray) -> GateOutcome:
    bits = np.abs(charge).astype(np.int8)
    dist: dict = defaultdict(float)
    uniq, inverse = np.unique(bits, axis=0, return_inverse=True)
    sums = np.bincount(inverse.ravel(), weights=weights, minlength=len(uniq))
    for row, w in zip(uniq, sums):
        if w > 0:
            dist[tuple(int(b) for b in row)] += float(w)
    return GateOutcome(tuple(net.ids), dict(sorted(dist.items())))


def eval_abstract(
    net: GateNetwork,
    inputs,
    same_phase: str = "coalesce",
    monte_carlo: bool = False,
    trials: int = 10_000,
    seed: Optional[int] = None,
) -> GateOutcome:
    """Distribution of output bits over independent MAP transmission events.

    ``same_phase`` is ``"coalesce"`` (equal phases merge into one soliton)
    or ``"error"`` (raise if equal phases meet).
    """
    if same_phase not in ("coalesce", "error"):
        raise GateError(f"unknown same-phase rule {same_phase!r}")
    bits = _input_vector(net, inputs)
    m = len(net.maps)
    p = np.array([mp.p for mp in net.maps], dtype=float)
    if monte_carlo:
        if seed is None:
            raise GateError("Monte Carlo evaluation needs a seed")
        if trials < 1:
            raise GateError("trials must be >= 1")
        rng = np.random.Generator(np.random.PCG64(seed))
        transmit = (rng.random((trials, m)) < p).astype(np.int64)
        weights = np.full(trials, 1.0 / trials)
    else:
        if m > MAX_EXACT_MAPS:
            raise GateError(f"{m} MAPs exceed the exact-enumeration limit of {MAX_EXACT_MAPS}; use monte_carlo with a seed")
        codes = np.arange(2**m, dtype=np.int64)
        transmit = (codes[:, None] >> np.arange(m)) & 1
        weights = np.prod(np.where(transmit == 1, p, 1.0 - p), axis=1) if m else np.ones(1)
    charge = _propagate(net, bits, transmit, same_phase)
    return _collect(net, charge, weights)


def length_bias(length: float, midpoint: float = math.inf, width: float = 1.0) -> float:
    """Transmit probability 1 / (1 + exp((L - L0) / w)).

    The default calibration (L0 = inf) gives p = 1 for every length.
    """
    if not length > 0:
        raise GateError("segment length must be positive")
    if not width > 0:
        raise GateError("calibration width must be positive")
    arg = (length - midpoint) / width
    if arg > 700:
        return 0.0
    return 1.0 / (1.0 + math.exp(arg))


def with_length_bias(net: GateNetwork, midpoint: float = math.inf, width: float = 1.0) -> GateNetwork:
    """Copy of ``net`` with each MAP's p set from its target segment's length."""
    maps = tuple(
        MapLink(m.source, m.target, m.position_um, length_bias(net.segment(m.target).length_um, midpoint, width), m.phase)
        for m in net.maps
    )
    return GateNetwork(net.segments, maps)


# ---------------------------------------------------------------------------
# physical layer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhysicalGateConfig:
    """PDE settings for the output segment (dimensionless units)."""

    n_points: int = 2001
    length: float = 100.0
    dt_factor: float = 0.5
    t_final: float = 200.0
    gamma: float = 0.1
    speed: float = 0.8
    separation: float = 20.0
    launch_offset: float = 0.0
    vacuum: float = 1.0
    coupling: float = 1.0

    def grid(self) -> sol.Grid:
        return sol.Grid.centered(self.length, self.n_points)

    @property
    def dt(self) -> float:
        return self.dt_factor * self.grid().dx

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_final / self.dt)))


def _xor_links(net: GateNetwork) -> tuple[str, MapLink, MapLink]:
    targets = {m.target for m in net.maps}
    outputs = [t for t in targets if len(net.incoming(t)) == 2]
    if len(net.maps) != 2 or len(outputs) != 1:
        raise GateError("physical evaluation needs exactly two MAPs into one output segment")
    out = outputs[0]
    plus, minus = sorted((net.maps[i] for i in net.incoming(out)), key=lambda m: -int(m.phase))
    if plus.phase == minus.phase:
        raise GateError("physical evaluation needs one Plus and one Minus MAP")
    if plus.source in targets or minus.source in targets:
        raise GateError("physical evaluation needs input segments fed by nothing else")
    return out, plus, minus


def output_field(arrivals: tuple[bool, bool], cfg: PhysicalGateConfig) -> sol.FieldState:
    """Initial data on the output segment for (Plus arrived, Minus arrived)."""
    grid = cfg.grid()
    has_plus, has_minus = arrivals
    vac = cfg.vacuum
    kw = dict(gamma=cfg.gamma, boundary=sol.Boundary.FIXED)
    if has_plus and has_minus:
        return sol.kink_antikink_state(
            grid, cfg.separation, cfg.speed, vac, cfg.coupling, offset=cfg.launch_offset, **kw
        )
    if has_plus:
        k = sol.boosted_double_well_kink(cfg.speed, -0.5 * cfg.separation, vac, cfg.coupling)
        return sol.FieldState.from_profiles(grid, [k], background=-vac, **kw)
    if has_minus:
        k = sol.boosted_double_well_kink(
            -cfg.speed, 0.5 * cfg.separation + cfg.launch_offset, vac, cfg.coupling
        ).mirrored()
        return sol.FieldState.from_profiles(grid, [k], background=vac, **kw)
    return sol.FieldState.vacuum(grid, -vac, **kw)


def eval_physical(
    net: GateNetwork,
    inputs,
    cfg: PhysicalGateConfig = PhysicalGateConfig(),
    transmitted: Optional[Sequence[bool]] = None,
) -> GateOutcome:
    """Deterministic outcome with the collision run on the output segment.

    ``transmitted`` gives (Plus MAP fires, Minus MAP fires); by default both
    do, matching the abstract layer at p = 1.
    """
    out, plus, minus = _xor_links(net)
    bits = _input_vector(net, inputs)
    col = {s: i for i, s in enumerate(net.ids)}
    fire = (True, True) if transmitted is None else tuple(bool(t) for t in transmitted)
    arrivals = (bool(bits[col[plus.source]]) and fire[0], bool(bits[col[minus.source]]) and fire[1])
    U = sol.PotentialPoly.double_well(cfg.vacuum, cfg.coupling)
    state = output_field(arrivals, cfg)
    report = sol.collide(state, U, dt=cfg.dt, n_steps=cfg.n_steps)
    result = bits.copy()
    result[col[out]] = min(1, int(bits[col[out]]) + int(report.survivors > 0))
    return GateOutcome(tuple(net.ids), {tuple(int(b) for b in result): 1.0})


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def parse_network(text: str) -> GateNetwork:
    """Read ``segment <id> <length_um>`` / ``map <from> <to> <pos_um> <p> <+|->`` lines."""
    segs, maps = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "segment" and len(parts) == 3:
                segs.append(Segment(parts[1], float(parts[2])))
            elif parts[0] == "map" and len(parts) == 6:
                maps.append(MapLink(parts[1], parts[2], float(parts[3]), float(parts[4]), parts[5]))
            else:
                raise GateError(f"unrecognised line {raw!r}")
        except (ValueError, IndexError) as exc:
            raise GateError(f"network line {lineno}: {exc}") from exc
    return GateNetwork(tuple(segs), tuple(maps))


def format_network(net: GateNetwork) -> str:
    lines = [f"segment {s.id} {s.length_um:g}" for s in net.segments]
    lines += [
        f"map {m.source} {m.target} {m.position_um:g} {m.p:g} {'+' if m.phase is Phase.PLUS else '-'}"
        for m in net.maps
    ]
    return "\n".join(lines) + "\n"


def outcome_csv(rows: Sequence[tuple[str, GateOutcome]]) -> str:
    """``config,bits,probability`` rows; config is the input bit string."""
    buf = io.StringIO()
    buf.write("config,bits,probability\n")
    for config, outcome in rows:
        for bits, prob in outcome.distribution.items():
            buf.write(f"{config},{''.join(map(str, bits))},{prob:.12e}\n")
    return buf.getvalue()
