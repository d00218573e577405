"""Foerster energy transfer between OH oscillators versus kink transport."""

from __future__ import annotations

from dataclasses import dataclass

from .constants import ANGSTROM
from .soliton import transit_time


@dataclass(frozen=True)
class ForsterParams:
    """Pair-transfer parameters; ``T1`` (s) has no default."""

    T1: float
    r0_angstrom: float = 2.1
    r_angstrom: float = 2.8

    def __post_init__(self):
        if not self.T1 > 0:
            raise ValueError("T1 must be positive")
        if not self.r0_angstrom > 0:
            raise ValueError("Foerster radius must be positive")
        if not self.r_angstrom > 0:
            raise ValueError("oscillator distance must be positive")


def forster_rate(p: ForsterParams) -> float:
    """k = (r0/r)^6 / T1 in 1/s."""
    return (p.r0_angstrom / p.r_angstrom) ** 6 / p.T1


@dataclass(frozen=True)
class ChannelComparison:
    k_per_s: float
    forster_chain_time_s: float
    kink_time_s: float

    @property
    def ratio(self) -> float:
        """Foerster chain time over kink transit time."""
        return self.forster_chain_time_s / self.kink_time_s

    def report_text(self) -> str:
        rows = (
            ("k_per_s", self.k_per_s),
            ("forster_chain_time_s", self.forster_chain_time_s),
            ("kink_time_s", self.kink_time_s),
            ("ratio", self.ratio),
        )
        return "".join(f"{k}={v:.12e}\n" for k, v in rows)


def compare_channels(
    p: ForsterParams,
    hop_distance_m: float,
    chain_length_m: float,
    kink: tuple[float, float],
) -> ChannelComparison:
    """Sequential hopping along ``chain_length_m`` against a kink crossing ``kink = (L, v)``.

    The hop count is the continuous ratio chain_length / hop_distance.
    """
    if not hop_distance_m > 0:
        raise ValueError("hop distance must be positive")
    if chain_length_m < 0:
        raise ValueError("chain length must be non-negative")
    k = forster_rate(p)
    hops = chain_length_m / hop_distance_m
    return ChannelComparison(k, hops / k, transit_time(*kink))


def default_hop_distance_m(p: ForsterParams) -> float:
    return p.r_angstrom * ANGSTROM
