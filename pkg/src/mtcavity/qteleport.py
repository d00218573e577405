"""Dense state-vector engine for teleporting a coherent state between tubes.

Registers are named qubits; basis states are ordered with the first label
as the most significant bit, so for (B, C) the order is 00, 01, 10, 11.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

MAX_QUBITS = 12
NORM_TOL = 1e-12

SQRT_HALF = 1.0 / math.sqrt(2.0)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


class TeleportError(ValueError):
    pass


@dataclass(frozen=True)
class PureState:
    """Complex amplitudes over named qubit registers."""

    amplitudes: np.ndarray
    labels: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise TeleportError(f"duplicate register names in {labels}")
        if len(labels) > MAX_QUBITS:
            raise TeleportError(f"at most {MAX_QUBITS} qubits supported")
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if amps.size != 2 ** len(labels):
            raise TeleportError(f"{len(labels)} registers need {2 ** len(labels)} amplitudes, got {amps.size}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "labels", labels)

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm**2 - 1.0) <= tol

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)


def qubit(amp0: complex, amp1: complex, label: str = "A") -> PureState:
    return PureState(np.array([amp0, amp1], dtype=complex), (label,))


def make_epr(pair: Sequence[str] = ("B", "C")) -> PureState:
    """(|1_B 0_C> + |0_B 1_C>) / sqrt(2)."""
    b, c = pair
    if b == c:
        raise TeleportError("EPR pair needs two distinct registers")
    return PureState(np.array([0.0, SQRT_HALF, SQRT_HALF, 0.0], dtype=complex), (b, c))


def tensor(a: PureState, b: PureState) -> PureState:
    """Kronecker product, registers of ``a`` first."""
    clash = set(a.labels) & set(b.labels)
    if clash:
        raise TeleportError(f"register names collide: {sorted(clash)}")
    return PureState(np.kron(a.amplitudes, b.amplitudes), a.labels + b.labels)


def apply_gate(state: PureState, gate: np.ndarray, label: str) -> PureState:
    """Apply a single-qubit unitary to register ``label``."""
    k = state.labels.index(label)
    psi = np.tensordot(gate, state.tensor_view(), axes=([1], [k]))
    psi = np.moveaxis(psi, 0, k)
    return PureState(psi.ravel(), state.labels)


def fidelity(a, b) -> float:
    """|<a|b>|^2 for normalised vectors; insensitive to global phase."""
    va = a.amplitudes if isinstance(a, PureState) else np.asarray(a, dtype=complex)
    vb = b.amplitudes if isinstance(b, PureState) else np.asarray(b, dtype=complex)
    return float(abs(np.vdot(va, vb)) ** 2)


def reduced_density(state: PureState, keep: Sequence[str]) -> np.ndarray:
    """Density matrix of the registers in ``keep`` (in that order)."""
    idx = [state.labels.index(k) for k in keep]
    rest = [i for i in range(state.n_qubits) if i not in idx]
    psi = np.transpose(state.tensor_view(), idx + rest).reshape(2 ** len(idx), -1)
    return psi @ psi.conj().T


class BellOutcome(enum.Enum):
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"


# two-qubit vectors in the order 00, 01, 10, 11 of the measured pair
BELL_BASIS = {
    BellOutcome.PSI_PLUS: np.array([0, 1, 1, 0], dtype=complex) * SQRT_HALF,
    BellOutcome.PSI_MINUS: np.array([0, 1, -1, 0], dtype=complex) * SQRT_HALF,
    BellOutcome.PHI_PLUS: np.array([1, 0, 0, 1], dtype=complex) * SQRT_HALF,
    BellOutcome.PHI_MINUS: np.array([1, 0, 0, -1], dtype=complex) * SQRT_HALF,
}
OUTCOME_ORDER = tuple(BELL_BASIS)


class Correction(enum.Enum):
    IDENTITY = "I"
    X = "X"
    Z = "Z"
    XZ = "XZ"


CORRECTION_FOR = {
    BellOutcome.PSI_PLUS: Correction.IDENTITY,
    BellOutcome.PSI_MINUS: Correction.Z,
    BellOutcome.PHI_PLUS: Correction.X,
    BellOutcome.PHI_MINUS: Correction.XZ,
}
CORRECTION_MATRIX = {
    Correction.IDENTITY: I2,
    Correction.X: X,
    Correction.Z: Z,
    Correction.XZ: X @ Z,
}


def bell_state(outcome: BellOutcome, pair: Sequence[str] = ("A", "B")) -> PureState:
    return PureState(BELL_BASIS[BellOutcome(outcome)], tuple(pair))


@dataclass(frozen=True)
class BellBranch:
    outcome: BellOutcome
    projection: np.ndarray  # <Bell|Psi>, unnormalised, over the remaining registers
    weight: float
    labels: tuple

    @property
    def state(self) -> np.ndarray:
        """Normalised branch state (zeros if the branch is empty)."""
        if self.weight == 0:
            return np.zeros_like(self.projection)
        return self.projection / math.sqrt(self.weight)


def bell_expand(state: PureState, pair: Sequence[str] = ("A", "B")) -> list[BellBranch]:
    """Decompose ``state`` as sum_i |Bell_i(pair)> (x) projection_i."""
    pair = tuple(pair)
    if len(pair) != 2 or pair[0] == pair[1]:
        raise TeleportError("Bell measurement needs two distinct registers")
    if state.n_qubits < 3:
        raise TeleportError("state needs the measured pair plus at least one target register")
    missing = [p for p in pair if p not in state.labels]
    if missing:
        raise TeleportError(f"registers {missing} not in state {state.labels}")
    idx = [state.labels.index(p) for p in pair]
    rest = [i for i in range(state.n_qubits) if i not in idx]
    m = np.transpose(state.tensor_view(), idx + rest).reshape(4, -1)
    rest_labels = tuple(state.labels[i] for i in rest)
    branches = []
    for outcome in OUTCOME_ORDER:
        proj = BELL_BASIS[outcome].conj() @ m
        proj.setflags(write=False)
        branches.append(BellBranch(outcome, proj, float(np.vdot(proj, proj).real), rest_labels))
    return branches


@dataclass(frozen=True)
class TeleportTranscript:
    input_state: Optional[tuple]
    outcome: BellOutcome
    outcome_probability: float
    raw_C_state: np.ndarray
    post_state: PureState = field(repr=False)
    correction: Optional[Correction] = None
    corrected_C_state: Optional[np.ndarray] = None
    fidelity: Optional[float] = None

    def csv_line(self) -> str:
        a0, a1 = self.input_state
        return ",".join(
            (
                _fmt_complex(a0),
                _fmt_complex(a1),
                self.outcome.value,
                f"{self.outcome_probability:.12e}",
                self.correction.value if self.correction else "",
                f"{self.fidelity:.12e}" if self.fidelity is not None else "",
            )
        )


TRANSCRIPT_HEADER = "input_amp0,input_amp1,outcome,probability,correction,fidelity"


def _fmt_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.12e}{z.imag:+.12e}j"


def _rng(seed: Union[int, np.random.Generator, None]) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise TeleportError("a seed or Generator is required for measurement")
    return np.random.Generator(np.random.PCG64(seed))


def measure_bell(
    state: PureState,
    pair: Sequence[str] = ("A", "B"),
    rng_seed: Union[int, np.random.Generator, None] = None,
    forced: Optional[BellOutcome] = None,
    input_state: Optional[tuple] = None,
) -> TeleportTranscript:
    """Projective Bell measurement on ``pair``; the target collapses to its branch.

    With ``forced`` the outcome is chosen rather than sampled (no generator
    needed).  Sampling draws one uniform variate from a PCG64 generator.
    """
    if not state.is_normalized():
        raise TeleportError(f"state must be normalised (norm^2 = {state.norm ** 2:.15g})")
    branches = bell_expand(state, pair)
    if forced is not None:
        chosen = next(b for b in branches if b.outcome is BellOutcome(forced))
        if chosen.weight == 0:
            raise TeleportError(f"forced outcome {chosen.outcome.value} has zero probability")
    else:
        weights = np.array([b.weight for b in branches])
        cdf = np.cumsum(weights / weights.sum())
        draw = _rng(rng_seed).random()
        chosen = branches[min(int(np.searchsorted(cdf, draw, side="right")), 3)]
    raw = chosen.state
    raw.setflags(write=False)
    post = tensor(bell_state(chosen.outcome, pair), PureState(raw, chosen.labels))
    # restore the caller's register order
    order = [post.labels.index(lbl) for lbl in state.labels]
    post = PureState(np.transpose(post.tensor_view(), order).ravel(), state.labels)
    return TeleportTranscript(input_state, chosen.outcome, chosen.weight, raw, post)


def correct(transcript: TeleportTranscript) -> TeleportTranscript:
    """Apply the fixed Pauli correction for the recorded outcome."""
    try:
        corr = CORRECTION_FOR[transcript.outcome]
    except KeyError as exc:  # pragma: no cover - enum is closed
        raise RuntimeError(f"unknown Bell outcome {transcript.outcome!r}") from exc
    raw = np.asarray(transcript.raw_C_state)
    if raw.shape != (2,):
        raise TeleportError("correction acts on a single target qubit")
    fixed = CORRECTION_MATRIX[corr] @ raw
    fixed.setflags(write=False)
    fid = None
    if transcript.input_state is not None:
        fid = fidelity(np.asarray(transcript.input_state, dtype=complex), fixed)
    return TeleportTranscript(
        transcript.input_state,
        transcript.outcome,
        transcript.outcome_probability,
        transcript.raw_C_state,
        transcript.post_state,
        corr,
        fixed,
        fid,
    )


def teleport(
    inp: tuple,
    seed: Union[int, np.random.Generator, None] = None,
    forced: Optional[BellOutcome] = None,
) -> TeleportTranscript:
    """Teleport (amp0, amp1) from A to C through an EPR pair (B, C)."""
    amp0, amp1 = complex(inp[0]), complex(inp[1])
    a = qubit(amp0, amp1, "A")
    if not a.is_normalized():
        raise TeleportError(f"input must be normalised, |amp0|^2+|amp1|^2 = {a.norm ** 2:.15g}")
    full = tensor(a, make_epr(("B", "C")))
    t = measure_bell(full, ("A", "B"), seed, forced=forced, input_state=(amp0, amp1))
    return correct(t)


def teleport_batch(inp: tuple, trials: int, seed: int) -> list[TeleportTranscript]:
    """``trials`` independent teleportations drawing from one seeded generator."""
    if trials < 1:
        raise TeleportError("trials must be >= 1")
    rng = _rng(seed)
    # every trial starts from the same state, so each branch is built once;
    # the draws match repeated teleport(inp, rng) calls one for one
    branches = {o: teleport(inp, forced=o) for o in OUTCOME_ORDER}
    weights = np.array([branches[o].outcome_probability for o in OUTCOME_ORDER])
    cdf = np.cumsum(weights / weights.sum())
    picks = np.minimum(np.searchsorted(cdf, rng.random(trials), side="right"), 3)
    return [branches[OUTCOME_ORDER[i]] for i in picks]


def transcript_csv(transcripts: Sequence[TeleportTranscript]) -> str:
    buf = io.StringIO()
    buf.write(TRANSCRIPT_HEADER + "\n")
    for t in transcripts:
        buf.write(t.csv_line() + "\n")
    return buf.getvalue()
