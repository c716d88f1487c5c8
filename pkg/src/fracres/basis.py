"""Truncated bosonic Fock bases for an open chain of ``L`` sites.

Configurations are plain tuples of occupation numbers ``(n_1, ..., n_L)``.
A :class:`BasisMap` fixes an ordering (lexicographic) and a symmetry sector:

- ``Sector.full()``: every vector with ``0 <= n_j <= n_max``.
- ``Sector.fixed_n(N)``: configurations with ``sum(n) == N``.
- ``Sector.fixed_n_even(N)``: the reflection-even part of ``fixed_n(N)``; each
  basis vector is the normalized symmetric combination of a configuration and
  its mirror image, labelled by the lexicographically smaller of the two.
- ``Sector.at_most_n(N)``: configurations with ``sum(n) <= N``. This subspace
  is closed under hopping, single-particle loss and dephasing, which makes it
  the natural working space for open dynamics started at particle number N.

Site indices in the public API are 1-based, as in the lattice Hamiltonian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

FockConfig = Tuple[int, ...]

_INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class Sector:
    kind: str
    n: Optional[int] = None

    KINDS = ("full", "fixed_n", "fixed_n_even", "at_most_n")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown sector kind {self.kind!r}")
        if self.kind == "full":
            if self.n is not None:
                raise ValueError("full sector takes no particle number")
        elif self.n is None or self.n < 0:
            raise ValueError(f"sector {self.kind!r} needs a particle number >= 0")

    @classmethod
    def full(cls) -> "Sector":
        return cls("full")

    @classmethod
    def fixed_n(cls, n: int) -> "Sector":
        return cls("fixed_n", n)

    @classmethod
    def fixed_n_even(cls, n: int) -> "Sector":
        return cls("fixed_n_even", n)

    @classmethod
    def at_most_n(cls, n: int) -> "Sector":
        return cls("at_most_n", n)

    def __str__(self):
        return self.kind if self.n is None else f"{self.kind}({self.n})"


def dimension_count(n_particles: int, n_sites: int) -> int:
    """Number of ways to put ``N`` bosons on ``L`` sites, (N+L-1)! / (N! (L-1)!)."""
    if n_particles < 0 or n_sites < 1:
        raise ValueError("need N >= 0 and L >= 1")
    value = math.comb(n_particles + n_sites - 1, n_sites - 1)
    if value > _INT64_MAX:
        raise OverflowError(f"D(N={n_particles}, L={n_sites}) exceeds 64-bit range")
    return value


def parity_reflect(config: Sequence[int]) -> FockConfig:
    """Mirror a configuration about the chain centre."""
    return tuple(reversed(tuple(config)))


def validate_config(config: Sequence[int], n_sites: int, n_max: int) -> FockConfig:
    config = tuple(int(n) for n in config)
    if len(config) != n_sites:
        raise ValueError(f"configuration {config} has {len(config)} sites, expected {n_sites}")
    if any(n < 0 or n > n_max for n in config):
        raise ValueError(f"configuration {config} has occupations outside [0, {n_max}]")
    return config


def _compositions(n_sites: int, n_max: int, lo: int, hi: int) -> Iterator[FockConfig]:
    # lexicographic vectors with entries in [0, n_max] and total in [lo, hi]
    if n_sites == 0:
        if lo <= 0 <= hi:
            yield ()
        return
    rest_cap = (n_sites - 1) * n_max
    for first in range(n_max + 1):
        if first > hi:
            break
        if first + rest_cap < lo:
            continue
        for tail in _compositions(n_sites - 1, n_max, lo - first, hi - first):
            yield (first,) + tail


@dataclass(frozen=True, eq=False)
class BasisMap:
    """Ordered, immutable set of Fock configurations with inverse lookup."""

    n_sites: int
    n_max: int
    sector: Sector
    configs: Tuple[FockConfig, ...]
    index_of: Dict[FockConfig, int] = field(repr=False)
    parent: Optional["BasisMap"] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.configs)

    def __len__(self):
        return len(self.configs)

    def __eq__(self, other):
        if not isinstance(other, BasisMap):
            return NotImplemented
        return (self.n_sites, self.n_max, self.sector, self.configs) == (
            other.n_sites, other.n_max, other.sector, other.configs)

    def __hash__(self):
        return hash((self.n_sites, self.n_max, self.sector, self.configs))

    def config_of(self, index: int) -> FockConfig:
        return self.configs[index]

    def index(self, config: Sequence[int]) -> int:
        key = tuple(config)
        try:
            return self.index_of[key]
        except KeyError:
            raise KeyError(f"configuration {key} is not in the {self.sector} basis") from None

    def __contains__(self, config) -> bool:
        return tuple(config) in self.index_of

    def particle_numbers(self) -> np.ndarray:
        return np.array([sum(c) for c in self.configs], dtype=np.int64)

    @property
    def is_symmetrized(self) -> bool:
        return self.sector.kind == "fixed_n_even"

    def isometry(self) -> sparse.csr_matrix:
        """Columns are the sector basis vectors written in the parent basis.

        Only defined for the reflection-even sector; for configuration bases it
        is the identity.
        """
        if not self.is_symmetrized:
            return sparse.identity(self.size, dtype=complex, format="csr")
        rows, cols, vals = [], [], []
        for k, c in enumerate(self.configs):
            mirror = parity_reflect(c)
            if mirror == c:
                rows.append(self.parent.index(c))
                cols.append(k)
                vals.append(1.0)
            else:
                for member in (c, mirror):
                    rows.append(self.parent.index(member))
                    cols.append(k)
                    vals.append(1.0 / math.sqrt(2.0))
        return sparse.csr_matrix(
            (np.asarray(vals, dtype=complex), (rows, cols)), shape=(self.parent.size, self.size))


def enumerate_basis(n_sites: int, n_max: int, sector: Sector = Sector.full()) -> BasisMap:
    """Build the lexicographically ordered basis of a sector."""
    if n_sites < 1:
        raise ValueError(f"L must be >= 1, got {n_sites}")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    capacity = n_sites * n_max
    if sector.kind in ("fixed_n", "fixed_n_even") and sector.n > capacity:
        raise ValueError(
            f"{sector} is empty: at most L*n_max = {capacity} particles fit on the lattice")

    if sector.kind == "full":
        configs = tuple(_compositions(n_sites, n_max, 0, capacity))
    elif sector.kind == "fixed_n":
        configs = tuple(_compositions(n_sites, n_max, sector.n, sector.n))
    elif sector.kind == "at_most_n":
        configs = tuple(_compositions(n_sites, n_max, 0, min(sector.n, capacity)))
    else:
        parent = enumerate_basis(n_sites, n_max, Sector.fixed_n(sector.n))
        configs = tuple(c for c in parent.configs if c <= parity_reflect(c))
        return BasisMap(n_sites, n_max, sector, configs,
                        {c: i for i, c in enumerate(configs)}, parent)
    return BasisMap(n_sites, n_max, sector, configs, {c: i for i, c in enumerate(configs)})


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm pure state aligned with a basis."""

    basis: BasisMap
    amplitudes: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.basis.size,):
            raise ValueError(f"amplitude vector has shape {amps.shape}, basis size is {self.basis.size}")
        norm = np.linalg.norm(amps)
        if self.check and abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized (norm = {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_configs(cls, basis: BasisMap, configs: Sequence[Sequence[int]],
                     weights: Optional[Sequence[complex]] = None) -> "StateVector":
        """Normalized superposition of Fock configurations.

        For the reflection-even sector the configurations are expanded in the
        parent configuration basis and projected onto the symmetrized vectors.
        """
        if weights is None:
            weights = [1.0] * len(configs)
        target = basis.parent if basis.is_symmetrized else basis
        amps = np.zeros(target.size, dtype=complex)
        for c, w in zip(configs, weights):
            amps[target.index(c)] += w
        if basis.is_symmetrized:
            amps = basis.isometry().conj().T @ amps
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise ValueError("superposition has zero norm in this basis")
        return cls(basis, amps / norm)

    @classmethod
    def basis_state(cls, basis: BasisMap, config: Sequence[int]) -> "StateVector":
        return cls.from_configs(basis, [config])


_NAMED_CONSTITUENTS: Dict[str, List[FockConfig]] = {
    "psi1": [(1, 2, 0), (0, 2, 1)],
    "psi2": [(1, 0, 2), (2, 0, 1)],
    "psi3": [(2, 1, 0), (0, 1, 2)],
    "psi4": [(0, 3, 0)],
    "psi5": [(3, 0, 0), (0, 0, 3)],
}

NAMED_STATES = ("psi0", "psi1", "psi2", "psi3", "psi4", "psi5")


def named_constituents(name: str, n_sites: int) -> List[FockConfig]:
    """Configurations entering one of the named reflection-even states."""
    if name == "psi0":
        return [(1,) * n_sites]
    if name not in _NAMED_CONSTITUENTS:
        raise ValueError(f"unknown named state {name!r}; expected one of {NAMED_STATES}")
    if n_sites != 3:
        raise ValueError(f"{name} is only defined on three sites (got L={n_sites})")
    return list(_NAMED_CONSTITUENTS[name])


def named_state(name: str, basis: BasisMap) -> StateVector:
    """Unit filling ``psi0`` or one of the three-site even states ``psi1``..``psi5``."""
    constituents = named_constituents(name, basis.n_sites)
    lookup = basis.parent if basis.is_symmetrized else basis
    missing = [c for c in constituents if c not in lookup]
    if missing:
        raise ValueError(f"{name} needs configurations {missing} absent from the {basis.sector} basis")
    return StateVector.from_configs(basis, constituents)
