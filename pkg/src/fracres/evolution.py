"""Fixed-step RK4 integration of closed and open (Lindblad) dynamics.

Time is handled in units of the drive period ``T = 2 pi / Omega`` at the
schedule level and in seconds inside the integrators.

The open integrator works on the smallest configuration space that the
dynamics can reach: with particle-number-conserving hopping, single-particle
loss and number dephasing, a density matrix supported on ``sum(n) <= N``
stays there. Restricting to that block is exact and shrinks the L=4, n_max=4
problem from 625 to 70 states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
from scipy import linalg, sparse

from .basis import BasisMap, Sector, StateVector, enumerate_basis
from .operators import (LatticeParams, NoiseParams, build_H0, build_hopping,
                        collapse_operators)

DENSE_LIMIT = 400
ORACLE_MAX_DIM = 64

Observer = Callable[[object], Mapping[str, float]]


class IntegrationError(RuntimeError):
    """Numerical abort; ``diagnostics`` holds the offending quantities."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, float]] = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class StepSizeError(IntegrationError):
    pass


@dataclass(frozen=True)
class Schedule:
    """Run length and step, both in drive periods."""

    t_final: float
    dt: float = 1 / 256
    output_stride: int = 16

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if not self.t_final >= self.dt:
            raise ValueError("t_final must be >= dt")
        if self.output_stride < 1:
            raise ValueError("output_stride must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    basis: BasisMap
    matrix: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (self.basis.size, self.basis.size):
            raise ValueError(f"density matrix has shape {mat.shape}, basis size is {self.basis.size}")
        object.__setattr__(self, "matrix", mat)
        if self.check:
            herm = hermiticity(mat)
            if herm > 1e-12:
                raise ValueError(f"density matrix is not Hermitian (defect {herm:.3g})")
            tr = np.trace(mat).real
            if abs(tr - 1) > 1e-10:
                raise ValueError(f"density matrix trace is {tr!r}")
            lam = np.linalg.eigvalsh(mat).min()
            if lam < -1e-8:
                raise ValueError(f"density matrix has negative eigenvalue {lam:.3g}")

    @classmethod
    def from_state(cls, state: StateVector) -> "DensityMatrix":
        psi = state.amplitudes
        return cls(state.basis, np.outer(psi, psi.conj()))

    def restricted_to(self, basis: BasisMap) -> "DensityMatrix":
        """Copy on a sub-basis; raises if weight would be discarded."""
        idx = np.array([self.basis.index(c) for c in basis.configs])
        kept = self.matrix[np.ix_(idx, idx)]
        lost = np.abs(self.matrix).sum() - np.abs(kept).sum()
        if lost > 1e-14:
            raise ValueError(f"restriction to {basis.sector} drops weight {lost:.3g}")
        return DensityMatrix(basis, kept, check=False)

    def embedded_in(self, basis: BasisMap) -> "DensityMatrix":
        idx = np.array([basis.index(c) for c in self.basis.configs])
        out = np.zeros((basis.size, basis.size), dtype=complex)
        out[np.ix_(idx, idx)] = self.matrix
        return DensityMatrix(basis, out, check=False)


def hermiticity(mat: np.ndarray) -> float:
    return float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0


@dataclass
class TimeSeries:
    """Sampled observables; ``columns`` come from observers, ``diagnostics`` from the integrator."""

    t_over_T: np.ndarray
    columns: Dict[str, np.ndarray]
    diagnostics: Dict[str, np.ndarray]
    final_state: object = None

    def __getitem__(self, name: str) -> np.ndarray:
        if name == "t_over_T":
            return self.t_over_T
        if name in self.columns:
            return self.columns[name]
        return self.diagnostics[name]

    def __len__(self):
        return len(self.t_over_T)


def rk4_step(rhs: Callable, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    """Classical four-stage Runge-Kutta step."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    k1 = rhs(t, y)
    k2 = rhs(t + dt / 2, y + (dt / 2) * k1)
    k3 = rhs(t + dt / 2, y + (dt / 2) * k2)
    k4 = rhs(t + dt, y + dt * k3)
    for k in (k1, k2, k3, k4):
        if not np.all(np.isfinite(k)):
            raise IntegrationError(f"non-finite RK4 stage at t = {t!r}", {"t": t})
    return y + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def _as_working(op, dense: bool):
    return op.toarray() if dense else sparse.csr_matrix(op)


def _hopping_or_zero(basis: BasisMap):
    if basis.n_sites < 2:
        return sparse.csr_matrix((basis.size, basis.size), dtype=complex)
    return build_hopping(basis)


class SchrodingerRHS:
    """dpsi/dt = -i (H(t) - E_ref) psi.

    The constant ``energy_shift`` E_ref only changes the global phase but keeps
    the eigenphases RK4 has to follow small; see :func:`reference_energy`.
    """

    def __init__(self, params: LatticeParams, basis: BasisMap, energy_shift: float = 0.0):
        self.params = params
        dense = basis.size <= DENSE_LIMIT
        H0 = build_H0(params, basis)
        if energy_shift:
            H0 = H0 - energy_shift * sparse.identity(basis.size, dtype=complex, format="csr")
        self.H0 = _as_working(H0, dense)
        self.hop = _as_working(_hopping_or_zero(basis), dense)

    def __call__(self, t: float, psi: np.ndarray) -> np.ndarray:
        return -1j * (self.H0 @ psi - self.params.hopping_amplitude(t) * (self.hop @ psi))


def reference_energy(params: LatticeParams, basis: BasisMap, psi: np.ndarray) -> float:
    """Centre of the local-energy window of ``psi`` and its one-hop neighbours.

    RK4 damps a phase rotating at frequency E by roughly (E dt)^6 / 144 per
    step, so integrating relative to this centre keeps the norm drift of long
    closed runs small.
    """
    support = np.abs(psi) > 0
    reach = support | (np.abs(_hopping_or_zero(basis) @ support.astype(float)) > 0)
    energies = build_H0(params, basis).diagonal().real[reach]
    return 0.5 * float(energies.min() + energies.max())


class LindbladRHS:
    """Right-hand side of the Lindblad equation, Hermitian by construction.

    With ``K = sum_k C_k^+ C_k`` and ``A = (H(t) - i K / 2) rho``,
    ``drho/dt = -i (A - A^+) + sum_k C_k rho C_k^+``. Diagonal collapse
    operators are folded into one elementwise weight matrix, and a diagonal
    ``H0 - i K / 2`` is applied as a row scaling.
    """

    def __init__(self, params: LatticeParams, noise: NoiseParams, basis: BasisMap):
        self.params = params
        n = basis.size
        K = sparse.csr_matrix((n, n), dtype=complex)
        weights = np.zeros((n, n))
        self.jumps = []
        for C in collapse_operators(basis, noise):
            K = K + C.conj().T @ C
            if _is_diagonal(C):
                d = C.diagonal()
                weights += np.real(np.outer(d, d.conj()))
            else:
                self.jumps.append(C)
        self.weights = weights if np.any(weights) else None
        # sum_k C_k rho C_k^+ as two sparse products over the stacked operators
        self.n_jumps = len(self.jumps)
        if self.jumps:
            self.jump_stack = sparse.vstack(self.jumps, format="csr")
            self.jump_blocks = sparse.block_diag(self.jumps, format="csr")
        Heff = _clean_csr(build_H0(params, basis) - 0.5j * K)
        if _is_diagonal(Heff):
            self.Heff = None
            self.heff_diag = Heff.diagonal()[:, None]
        else:
            self.Heff = Heff if n > DENSE_LIMIT else Heff.toarray()
        self.hop = _hopping_or_zero(basis)
        self.has_hopping = self.hop.nnz > 0

    def __call__(self, t: float, rho: np.ndarray) -> np.ndarray:
        A = self.heff_diag * rho if self.Heff is None else self.Heff @ rho
        if self.has_hopping:
            A = A - self.params.hopping_amplitude(t) * (self.hop @ rho)
        out = -1j * (A - A.conj().T)
        if self.n_jumps:
            n = rho.shape[0]
            left = (self.jump_stack @ rho).reshape(self.n_jumps, n, n)
            left = left.conj().transpose(0, 2, 1).reshape(self.n_jumps * n, n)
            out += (self.jump_blocks @ left).reshape(self.n_jumps, n, n).sum(axis=0)
        if self.weights is not None:
            out += self.weights * rho
        return 0.5 * (out + out.conj().T)


def _is_diagonal(op) -> bool:
    coo = sparse.coo_matrix(op)
    return bool(np.all(coo.row == coo.col))


def _clean_csr(op) -> sparse.csr_matrix:
    op = sparse.csr_matrix(op)
    op.eliminate_zeros()
    return op


def _collect(observers: Sequence[Observer], state) -> Dict[str, float]:
    values: Dict[str, float] = {}
    for obs in observers:
        values.update(obs(state))
    return values


def _finish(times: List[float], rows: List[Dict[str, float]], diags: Dict[str, List[float]],
            final_state) -> TimeSeries:
    names = list(rows[0]) if rows else []
    columns = {name: np.array([row[name] for row in rows]) for name in names}
    return TimeSeries(np.array(times), columns,
                      {k: np.array(v) for k, v in diags.items()}, final_state)


def evolve_closed(psi0: StateVector, params: LatticeParams, schedule: Schedule,
                  observers: Iterable[Observer] = ()) -> TimeSeries:
    """RK4 for the Schrodinger equation; the norm is monitored, never renormalized.

    The Hamiltonian is integrated relative to :func:`reference_energy`, which
    changes only the unobservable global phase.
    """
    observers = list(observers)
    basis = psi0.basis
    rhs = SchrodingerRHS(params, basis, reference_energy(params, basis, psi0.amplitudes))
    T = params.period
    dt = schedule.dt * T
    psi = psi0.amplitudes.copy()
    times, rows, diags = [], [], {"norm": []}

    def record(step):
        norm = float(np.linalg.norm(psi))
        if abs(norm - 1) > 1e-3:
            raise StepSizeError(
                f"norm drifted to {norm!r} at t/T = {step * schedule.dt:.6g}; reduce dt",
                {"norm": norm, "t_over_T": step * schedule.dt})
        times.append(step * schedule.dt)
        diags["norm"].append(norm)
        rows.append(_collect(observers, StateVector(basis, psi, check=False)))

    record(0)
    for step in range(schedule.n_steps):
        psi = rk4_step(rhs, step * dt, psi, dt)
        if (step + 1) % schedule.output_stride == 0:
            record(step + 1)
    return _finish(times, rows, diags, StateVector(basis, psi, check=False))


def reachable_basis(rho: DensityMatrix) -> BasisMap:
    """Smallest ``at_most_n`` basis holding the support of ``rho``."""
    basis = rho.basis
    weight = np.abs(rho.matrix).sum(axis=0) + np.abs(rho.matrix).sum(axis=1)
    numbers = basis.particle_numbers()
    occupied = numbers[weight > 0]
    top = int(occupied.max()) if occupied.size else 0
    return enumerate_basis(basis.n_sites, basis.n_max, Sector.at_most_n(top))


def evolve_open(rho0: DensityMatrix, params: LatticeParams, noise: NoiseParams,
                schedule: Schedule, observers: Iterable[Observer] = (),
                reduce: bool = True) -> TimeSeries:
    """RK4 for the Lindblad equation with per-site decay and dephasing.

    Observers always see the state on ``rho0.basis``. With ``reduce`` the
    integration runs on the reachable ``sum(n) <= N`` block and the state is
    embedded back before observation.

    Diagnostics recorded per sample: ``trace``, ``hermiticity``,
    ``min_eigenvalue`` and ``purity_spectral`` (sum of squared eigenvalues).
    """
    observers = list(observers)
    outer = rho0.basis
    if outer.sector.kind not in ("full", "at_most_n"):
        raise ValueError(f"open dynamics needs a full or at_most_n basis, got {outer.sector}")
    if reduce:
        work = reachable_basis(rho0)
        if work.size == outer.size:
            work = outer
    else:
        work = outer
    state0 = rho0 if work is outer else rho0.restricted_to(work)
    rhs = LindbladRHS(params, noise, work)
    T = params.period
    dt = schedule.dt * T
    rho = state0.matrix.copy()
    times, rows = [], []
    diags = {"trace": [], "hermiticity": [], "min_eigenvalue": [], "purity_spectral": []}

    def record(step):
        tr = float(np.trace(rho).real)
        herm = hermiticity(rho)
        lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        lam_min = float(lam.min())
        info = {"t_over_T": step * schedule.dt, "trace": tr, "hermiticity": herm,
                "min_eigenvalue": lam_min}
        if abs(tr - 1) > 1e-6:
            raise IntegrationError(f"trace drifted to {tr!r} at t/T = {step * schedule.dt:.6g}", info)
        if lam_min < -1e-6:
            raise IntegrationError(
                f"density matrix lost positivity (min eigenvalue {lam_min:.3g}) "
                f"at t/T = {step * schedule.dt:.6g}", info)
        times.append(step * schedule.dt)
        diags["trace"].append(tr)
        diags["hermiticity"].append(herm)
        diags["min_eigenvalue"].append(lam_min)
        diags["purity_spectral"].append(float(np.sum(lam**2)))
        if observers:
            state = DensityMatrix(work, rho, check=False)
            if work is not outer:
                state = state.embedded_in(outer)
            rows.append(_collect(observers, state))
        else:
            rows.append({})

    record(0)
    for step in range(schedule.n_steps):
        rho = rk4_step(rhs, step * dt, rho, dt)
        if (step + 1) % schedule.output_stride == 0:
            record(step + 1)
    final = DensityMatrix(work, rho, check=False)
    if work is not outer:
        final = final.embedded_in(outer)
    return _finish(times, rows, diags, final)


def lindblad_superoperators(params: LatticeParams, noise: NoiseParams, basis: BasisMap):
    """Dense (static, hopping) parts of the Liouvillian acting on row-major vec(rho).

    The generator at time t is ``static - J(t) * hopping``.
    """
    n = basis.size
    eye = np.eye(n)
    H0 = build_H0(params, basis).toarray()
    hop = _hopping_or_zero(basis).toarray()
    static = -1j * (np.kron(H0, eye) - np.kron(eye, H0.T))
    for C in collapse_operators(basis, noise):
        C = C.toarray()
        CdC = C.conj().T @ C
        static += np.kron(C, C.conj()) - 0.5 * np.kron(CdC, eye) - 0.5 * np.kron(eye, CdC.T)
    hopping = -1j * (np.kron(hop, eye) - np.kron(eye, hop.T))
    return static, hopping


def oracle_propagate(rho0: DensityMatrix, params: LatticeParams, noise: NoiseParams,
                     schedule: Schedule) -> DensityMatrix:
    """Piecewise-constant exponential propagator, H frozen at each step midpoint.

    Independent cross-check for :func:`evolve_open` on small systems.
    """
    basis = rho0.basis
    if basis.size > ORACLE_MAX_DIM:
        raise ValueError(f"oracle limited to dimension {ORACLE_MAX_DIM}, got {basis.size}")
    static, hopping = lindblad_superoperators(params, noise, basis)
    dt = schedule.dt * params.period
    vec = rho0.matrix.reshape(-1).copy()
    constant = params.static_hopping or params.J0 == 0 or not np.any(hopping)
    if constant:
        prop = linalg.expm((static - params.hopping_amplitude(0.0) * hopping) * dt)
        for _ in range(schedule.n_steps):
            vec = prop @ vec
    else:
        for step in range(schedule.n_steps):
            t_mid = (step + 0.5) * dt
            vec = linalg.expm((static - params.hopping_amplitude(t_mid) * hopping) * dt) @ vec
    n = basis.size
    return DensityMatrix(basis, vec.reshape(n, n), check=False)
