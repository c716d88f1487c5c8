"""Sparse operators of the driven Bose-Hubbard chain.

Units: hbar = 1. Hamiltonian parameters are angular frequencies (rad/s) and
noise rates are plain rates (1/s). All builders return ``scipy.sparse``
CSR matrices with entries below ``DROP_TOL`` removed.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, List, Sequence, Tuple

import numpy as np
from scipy import sparse

from .basis import BasisMap, FockConfig, parity_reflect

DROP_TOL = 1e-15


class SectorError(ValueError):
    """Operator does not act within the requested basis sector."""


class StrongInteractionWarning(UserWarning):
    pass


class CollapseKind(enum.Enum):
    DECAY = "decay"
    DEPHASE = "dephase"


@dataclass(frozen=True)
class LatticeParams:
    """Chain and drive parameters.

    ``static_hopping`` replaces J0 cos(Omega t) by the constant J0 (the
    Omega -> 0 limit), which is handy for analytic checks.
    """

    L: int
    n_max: int
    U: float
    J0: float
    Omega_drive: float
    omega: float = 0.0
    static_hopping: bool = False

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.n_max < 0:
            raise ValueError(f"n_max must be >= 0, got {self.n_max}")
        if not self.U > 0:
            raise ValueError(f"U must be > 0, got {self.U}")
        if not self.J0 >= 0:
            raise ValueError(f"J0 must be >= 0, got {self.J0}")
        if not self.Omega_drive > 0:
            raise ValueError(f"Omega_drive must be > 0, got {self.Omega_drive}")
        if self.U < 10 * self.J0:
            warnings.warn(f"U/J0 = {self.U / self.J0:.3g} is outside the strongly interacting regime",
                          StrongInteractionWarning, stacklevel=3)

    @property
    def period(self) -> float:
        return 2 * math.pi / self.Omega_drive

    def hopping_amplitude(self, t: float) -> float:
        """J(t); the Hamiltonian carries -J(t) times the hopping operator."""
        if self.static_hopping:
            return self.J0
        return self.J0 * math.cos(self.Omega_drive * t)


@dataclass(frozen=True)
class NoiseParams:
    """Per-level decay rates kappa_{n,n-1} and dephasing rates gamma_{n-1,n}, n = 1..n_max."""

    kappa: Tuple[float, ...]
    gamma: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "kappa", tuple(float(k) for k in self.kappa))
        object.__setattr__(self, "gamma", tuple(float(g) for g in self.gamma))
        if len(self.kappa) != len(self.gamma):
            raise ValueError("kappa and gamma must list one rate per level")
        if any(not r >= 0 for r in self.kappa + self.gamma):
            raise ValueError("noise rates must be non-negative")

    @classmethod
    def zero(cls, n_max: int) -> "NoiseParams":
        return cls((0.0,) * n_max, (0.0,) * n_max)

    @property
    def n_max(self) -> int:
        return len(self.kappa)

    @property
    def is_zero(self) -> bool:
        return not any(self.kappa) and not any(self.gamma)


def _check_site(basis: BasisMap, site: int) -> int:
    if not 1 <= site <= basis.n_sites:
        raise IndexError(f"site {site} outside [1, {basis.n_sites}]")
    return site - 1


def _require_config_basis(basis: BasisMap, allowed: Sequence[str], what: str):
    if basis.sector.kind not in allowed:
        raise SectorError(f"{what} is not defined on the {basis.sector} basis (allowed: {', '.join(allowed)})")


def _assemble(basis: BasisMap, elements: Callable[[FockConfig], Iterable[Tuple[FockConfig, float]]],
              drop_missing: bool = False) -> sparse.csr_matrix:
    """Sparse matrix from a map  config -> [(target config, amplitude)]."""
    if basis.is_symmetrized:
        full = _assemble(basis.parent, elements, drop_missing)
        iso = basis.isometry()
        return _clean((iso.conj().T @ full @ iso).tocsr())
    rows, cols, vals = [], [], []
    for col, config in enumerate(basis.configs):
        for target, amp in elements(config):
            row = basis.index_of.get(target)
            if row is None:
                if drop_missing:
                    continue
                raise SectorError(f"operator maps {config} to {target}, outside the {basis.sector} basis")
            rows.append(row)
            cols.append(col)
            vals.append(amp)
    mat = sparse.csr_matrix((np.asarray(vals, dtype=complex), (rows, cols)),
                            shape=(basis.size, basis.size))
    return _clean(mat)


def _clean(mat, tol: float = DROP_TOL) -> sparse.csr_matrix:
    mat = sparse.csr_matrix(mat, dtype=complex)
    mat.sum_duplicates()
    mat.data[np.abs(mat.data) < tol] = 0
    mat.eliminate_zeros()
    return mat


def _shift(config: FockConfig, site: int, delta: int) -> FockConfig:
    out = list(config)
    out[site] += delta
    return tuple(out)


def ladder_down(basis: BasisMap, site: int) -> sparse.csr_matrix:
    """Annihilation operator a_j: |.., n_j, ..> -> sqrt(n_j) |.., n_j - 1, ..>."""
    _require_config_basis(basis, ("full",), "ladder operator")
    j = _check_site(basis, site)

    def elements(c):
        if c[j] > 0:
            yield _shift(c, j, -1), math.sqrt(c[j])

    return _assemble(basis, elements)


def ladder_up(basis: BasisMap, site: int) -> sparse.csr_matrix:
    """Creation operator a_j^dagger, truncated at n_max."""
    _require_config_basis(basis, ("full",), "ladder operator")
    j = _check_site(basis, site)

    def elements(c):
        if c[j] < basis.n_max:
            yield _shift(c, j, +1), math.sqrt(c[j] + 1)

    return _assemble(basis, elements)


def number_op(basis: BasisMap, site: int) -> sparse.csr_matrix:
    j = _check_site(basis, site)
    return _assemble(basis, lambda c: [(c, float(c[j]))])


def build_H0(params: LatticeParams, basis: BasisMap) -> sparse.csr_matrix:
    """Local energy sum_j (omega n_j + U/2 n_j^2), diagonal in the Fock basis."""
    def elements(c):
        # integer sums first so mirrored configurations get bit-identical energies
        yield c, params.omega * sum(c) + 0.5 * params.U * sum(n * n for n in c)

    return _assemble(basis, elements)


def build_hopping(basis: BasisMap) -> sparse.csr_matrix:
    """Open-boundary nearest-neighbour hopping sum_j (a_j^+ a_{j+1} + h.c.)."""
    if basis.n_sites < 2:
        raise ValueError("hopping needs at least two sites")
    n_max = basis.n_max

    def elements(c):
        for j in range(basis.n_sites - 1):
            for dst, src in ((j, j + 1), (j + 1, j)):
                if c[src] > 0 and c[dst] < n_max:
                    moved = _shift(_shift(c, src, -1), dst, +1)
                    yield moved, math.sqrt(c[src] * (c[dst] + 1))

    return _assemble(basis, elements)


def hamiltonian_at(t: float, params: LatticeParams, H0, hop) -> sparse.csr_matrix:
    """H(t) = H0 - J(t) * hop."""
    if H0.shape != hop.shape:
        raise ValueError(f"H0 {H0.shape} and hopping {hop.shape} have different dimensions")
    return _clean(H0 - params.hopping_amplitude(t) * hop)


def local_collapse_matrix(noise: NoiseParams, kind: CollapseKind) -> np.ndarray:
    """Single-site collapse matrix over levels 0..n_max."""
    n_max = noise.n_max
    mat = np.zeros((n_max + 1, n_max + 1))
    for n in range(1, n_max + 1):
        if kind is CollapseKind.DECAY:
            mat[n - 1, n] = math.sqrt(n * noise.kappa[n - 1])
        else:
            mat[n, n] = n * math.sqrt(noise.gamma[n - 1])
    return mat


def build_collapse(basis: BasisMap, noise: NoiseParams, site: int,
                   kind: CollapseKind) -> sparse.csr_matrix:
    """Local decay or dephasing operator on one site, identity on the others."""
    _require_config_basis(basis, ("full", "at_most_n"), "collapse operator")
    if noise.n_max != basis.n_max:
        raise ValueError(f"noise lists {noise.n_max} levels, basis has n_max = {basis.n_max}")
    j = _check_site(basis, site)
    local = local_collapse_matrix(noise, kind)

    def elements(c):
        n = c[j]
        if kind is CollapseKind.DECAY:
            if n > 0:
                yield _shift(c, j, -1), local[n - 1, n]
        else:
            yield c, local[n, n]

    return _assemble(basis, elements)


def collapse_operators(basis: BasisMap, noise: NoiseParams) -> List[sparse.csr_matrix]:
    """All non-zero collapse operators, site by site, decay before dephasing."""
    ops = []
    for site in range(1, basis.n_sites + 1):
        for kind in CollapseKind:
            op = build_collapse(basis, noise, site, kind)
            if op.nnz:
                ops.append(op)
    return ops


def symmetry_operators(basis: BasisMap) -> Tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """Total number operator and the reflection (parity) operator."""
    n_op = _assemble(basis, lambda c: [(c, float(sum(c)))])
    parity = _assemble(basis, lambda c: [(parity_reflect(c), 1.0)])
    return n_op, parity


def commutator(A, B, tol: float = DROP_TOL) -> sparse.csr_matrix:
    if A.shape != B.shape:
        raise ValueError(f"cannot commute operators of shapes {A.shape} and {B.shape}")
    return _clean(A @ B - B @ A, tol)


def apply(op, amplitudes: np.ndarray) -> np.ndarray:
    return op @ amplitudes


def expectation(op, amplitudes: np.ndarray) -> complex:
    return complex(np.vdot(amplitudes, op @ amplitudes))


def hermiticity_defect(op) -> float:
    diff = op - op.conj().T
    if sparse.issparse(diff):
        return float(abs(diff).max()) if diff.nnz else 0.0
    return float(np.max(np.abs(diff))) if diff.size else 0.0
