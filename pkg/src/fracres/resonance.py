"""Semi-classical resonance bookkeeping for hopping processes.

A particle moving from site ``j`` to site ``k`` changes the local energy by
``U (n_k - n_j + 1)``. A drive at frequency Omega makes that process resonant
when ``m Omega`` matches the energy change (integer resonance, nearest
neighbours), or when two identical hops each supply half of the energy of a
next-nearest-neighbour move (fractional resonance).
"""

from __future__ import annotations

import cmath
import enum
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence

from .basis import FockConfig
from .operators import LatticeParams


class ResonanceKind(enum.Enum):
    INTEGER = "integer"
    FRACTIONAL = "fractional"
    OFF_RESONANT = "off_resonant"


@dataclass(frozen=True)
class HopEvent:
    """One particle moved from ``from_site`` to ``to_site`` (1-based sites).

    Sites one apart are a single hop; two apart is the composite two-hop move
    through the intermediate site.
    """

    from_site: int
    to_site: int
    config: FockConfig

    def __post_init__(self):
        L = len(self.config)
        if not (1 <= self.from_site <= L and 1 <= self.to_site <= L):
            raise ValueError(f"hop {self.from_site}->{self.to_site} leaves the {L}-site chain")
        if abs(self.from_site - self.to_site) not in (1, 2):
            raise ValueError("hop events connect sites one or two apart")
        if self.config[self.from_site - 1] < 1:
            raise ValueError(f"site {self.from_site} of {self.config} is empty; nothing to hop")

    @property
    def distance(self) -> int:
        return abs(self.from_site - self.to_site)

    def after(self) -> FockConfig:
        out = list(self.config)
        out[self.from_site - 1] -= 1
        out[self.to_site - 1] += 1
        return tuple(out)

    def delta_n(self) -> int:
        """n_to - n_from, before the hop."""
        return self.config[self.to_site - 1] - self.config[self.from_site - 1]


@dataclass(frozen=True)
class ResonanceClass:
    kind: ResonanceKind
    order: int


@dataclass(frozen=True)
class Resonance:
    omega_over_U: Fraction
    resonance_class: ResonanceClass
    multiplicity: int

    @property
    def kind(self) -> ResonanceKind:
        return self.resonance_class.kind

    @property
    def order(self) -> int:
        return self.resonance_class.order

    def omega(self, params: LatticeParams) -> float:
        return float(self.omega_over_U) * params.U


def config_energy(config: Sequence[int], params: LatticeParams) -> float:
    """Local energy sum_j (omega n_j + U/2 n_j^2) of a configuration."""
    return sum(params.omega * n + 0.5 * params.U * n * n for n in config)


def _delta_in_units_of_U(event: HopEvent) -> int:
    return event.delta_n() + 1


def hop_energy_diff(event: HopEvent, params: LatticeParams) -> float:
    """Energy change U (n_to - n_from + 1) of a hop; omega terms cancel."""
    return params.U * _delta_in_units_of_U(event)


def hop_events(config: Sequence[int], distance: int) -> List[HopEvent]:
    """All moves of one particle between sites ``distance`` apart, both directions."""
    config = tuple(config)
    events = []
    for j in range(1, len(config) - distance + 1):
        k = j + distance
        for src, dst in ((j, k), (k, j)):
            if config[src - 1] > 0:
                events.append(HopEvent(src, dst, config))
    return events


def free_transitions(config: Sequence[int]) -> List[HopEvent]:
    """Single and two-hop moves that cost no energy."""
    return [e for d in (1, 2) for e in hop_events(config, d) if _delta_in_units_of_U(e) == 0]


def resonance_frequencies(config: Sequence[int], m_max: int = 3) -> List[Resonance]:
    """Positive drive frequencies (in units of U) resonant with hops out of ``config``.

    Nearest-neighbour hops give integer resonances ``|dE| / m``; next-nearest
    moves give fractional resonances ``|dE| / (2 m)``, for ``1 <= m <= m_max``.
    Zero-energy moves are excluded (see :func:`free_transitions`). Identical
    (frequency, kind, order) entries are merged with a multiplicity count.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    counts: Counter = Counter()
    for distance, kind, denom in ((1, ResonanceKind.INTEGER, 1), (2, ResonanceKind.FRACTIONAL, 2)):
        for event in hop_events(config, distance):
            gap = abs(_delta_in_units_of_U(event))
            if gap == 0:
                continue
            for m in range(1, m_max + 1):
                counts[(Fraction(gap, denom * m), kind, m)] += 1
    out = [Resonance(ratio, ResonanceClass(kind, m), mult) for (ratio, kind, m), mult in counts.items()]
    out.sort(key=lambda r: (-r.omega_over_U, r.kind.value, r.order))
    return out


def classify_drive(config: Sequence[int], omega_over_U: float, m_max: int = 3,
                   rtol: float = 1e-9) -> List[ResonanceClass]:
    """Resonance classes matched by a drive frequency; [OFF_RESONANT] if none."""
    hits = [r.resonance_class for r in resonance_frequencies(config, m_max)
            if abs(float(r.omega_over_U) - omega_over_U) <= rtol * max(1.0, omega_over_U)]
    return hits or [ResonanceClass(ResonanceKind.OFF_RESONANT, 1)]


def rotating_phase(t: float, config: Sequence[int], site: int, params: LatticeParams) -> complex:
    """exp(i U t (n_{j+1} - n_j - 1)) attached to a_j^+ a_{j+1} in the frame of H0."""
    if not 1 <= site <= len(config) - 1:
        raise IndexError(f"bond {site} outside [1, {len(config) - 1}]")
    exponent = config[site] - config[site - 1] - 1
    return cmath.exp(1j * params.U * t * exponent)


def drive_factor(t: float, config: Sequence[int], site: int, params: LatticeParams) -> complex:
    """Full time dependence cos(Omega t) * rotating phase of one bond term."""
    return cmath.cos(params.Omega_drive * t) * rotating_phase(t, config, site, params)


def resonance_table(config: Sequence[int], m_max: int, drive_ratio: float | None = None) -> List[Dict]:
    """Plain-data report rows, flagging entries that coincide with the configured drive."""
    rows = []
    for r in resonance_frequencies(config, m_max):
        row = {
            "omega_over_U": float(r.omega_over_U),
            "fraction": str(r.omega_over_U),
            "kind": r.kind.value,
            "order": r.order,
            "multiplicity": r.multiplicity,
        }
        if drive_ratio is not None:
            row["matches_drive"] = abs(float(r.omega_over_U) - drive_ratio) <= 1e-9
        rows.append(row)
    return rows
