"""Populations, linear entropy and symmetry expectations.

Functions accept either a :class:`~fracres.basis.StateVector` or a
:class:`~fracres.evolution.DensityMatrix`.
"""

from __future__ import annotations

from typing import Callable, Dict, List, Sequence, Tuple, Union

import numpy as np

from .basis import NAMED_STATES, BasisMap, StateVector, named_constituents, named_state
from .evolution import DensityMatrix
from .operators import symmetry_operators

State = Union[StateVector, DensityMatrix]

NEGATIVE_CLAMP = 1e-9


class BasisMismatchError(ValueError):
    pass


def _check_same_basis(a: BasisMap, b: BasisMap):
    if a is not b and a != b:
        raise BasisMismatchError(f"states live on different bases ({a.sector}, {b.sector})")


def _clamp(p: float, what: str) -> float:
    if p < -NEGATIVE_CLAMP or p > 1 + NEGATIVE_CLAMP:
        raise ValueError(f"{what} = {p!r} is outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def population(state: State, target: StateVector) -> float:
    """|<target|psi>|^2 for pure states, <target|rho|target> for mixed ones."""
    _check_same_basis(state.basis, target.basis)
    phi = target.amplitudes
    if isinstance(state, DensityMatrix):
        value = np.vdot(phi, state.matrix @ phi)
        if abs(value.imag) > 1e-12:
            raise ValueError(f"population has imaginary part {value.imag:.3g}")
        return _clamp(float(value.real), "population")
    return _clamp(float(abs(np.vdot(phi, state.amplitudes)) ** 2), "population")


def config_populations(state: State) -> np.ndarray:
    """Probability of each basis configuration (diagonal of rho)."""
    if isinstance(state, DensityMatrix):
        return np.real(np.diag(state.matrix)).copy()
    return np.abs(state.amplitudes) ** 2


def purity(state: State) -> float:
    if isinstance(state, DensityMatrix):
        # tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        return float(np.sum(np.abs(state.matrix) ** 2))
    # purity of |psi><psi| / <psi|psi>, insensitive to integrator norm drift
    rho = np.outer(state.amplitudes, state.amplitudes.conj())
    return float(np.sum(np.abs(rho) ** 2) / np.trace(rho).real ** 2)


def linear_entropy(state: State) -> float:
    """S = 1 - tr(rho^2)."""
    return 1.0 - purity(state)


def symmetry_expectations(state: State, n_op, parity_op) -> Tuple[float, float]:
    """(<N>, <P>) as real numbers."""
    size = state.basis.size
    if n_op.shape != (size, size) or parity_op.shape != (size, size):
        raise BasisMismatchError("operators do not match the state's basis")
    if isinstance(state, DensityMatrix):
        rho = state.matrix
        n_val = (n_op.multiply(rho.T)).sum()
        p_val = (parity_op.multiply(rho.T)).sum()
    else:
        psi = state.amplitudes
        n_val = np.vdot(psi, n_op @ psi)
        p_val = np.vdot(psi, parity_op @ psi)
    return float(np.real(n_val)), float(np.real(p_val))


def config_label(config: Sequence[int]) -> str:
    return "cfg_" + "".join(str(n) for n in config)


def available_named_states(basis: BasisMap) -> List[str]:
    """Named states expressible on ``basis`` (psi0 everywhere it fits, psi1-5 on three sites)."""
    lookup = basis.parent if basis.is_symmetrized else basis
    names = []
    for name in NAMED_STATES:
        try:
            constituents = named_constituents(name, basis.n_sites)
        except ValueError:
            continue
        if all(c in lookup for c in constituents):
            names.append(name)
    return names


def standard_observer(basis: BasisMap, with_configs: bool = False) -> Callable[[State], Dict[str, float]]:
    """Observer emitting P0..P5, S, trace, N_exp, parity_exp and optional cfg_ columns.

    Column order is fixed so CSV output is reproducible.
    """
    names = available_named_states(basis)
    targets = np.array([named_state(n, basis).amplitudes for n in names]).reshape(len(names), basis.size)
    labels = ["P" + n[3:] for n in names]
    n_op, parity_op = symmetry_operators(basis)
    cfg_labels = [config_label(c) for c in basis.configs] if with_configs else []

    def observe(state: State) -> Dict[str, float]:
        _check_same_basis(state.basis, basis)
        out: Dict[str, float] = {}
        if isinstance(state, DensityMatrix):
            rho = state.matrix
            pops = np.real(np.einsum("ia,ab,ib->i", targets.conj(), rho, targets))
            tr = float(np.trace(rho).real)
        else:
            pops = np.abs(targets.conj() @ state.amplitudes) ** 2
            tr = float(np.vdot(state.amplitudes, state.amplitudes).real)
        for label, p in zip(labels, pops):
            out[label] = _clamp(float(p), label)
        out["S"] = linear_entropy(state)
        out["trace"] = tr
        out["N_exp"], out["parity_exp"] = symmetry_expectations(state, n_op, parity_op)
        if with_configs:
            for label, p in zip(cfg_labels, config_populations(state)):
                out[label] = _clamp(float(p), label)
        return out

    return observe


def parity_defect_observer(basis: BasisMap) -> Callable[[State], Dict[str, float]]:
    """max |P rho P - rho|: zero whenever the state is reflection symmetric.

    Site-uniform loss keeps the density matrix reflection symmetric even though
    <P> itself drifts once particles are lost (a lost particle from |111> leaves
    an equal mixture of |011> and |110>, which has <P> = 0).
    """
    _, parity_op = symmetry_operators(basis)
    perm = parity_op.tocoo()
    order = np.empty(basis.size, dtype=np.int64)
    order[perm.col] = perm.row

    def observe(state: State) -> Dict[str, float]:
        if isinstance(state, DensityMatrix):
            rho = state.matrix
            return {"parity_defect": float(np.max(np.abs(rho[np.ix_(order, order)] - rho)))}
        psi = state.amplitudes
        overlap = abs(np.vdot(psi[order], psi))
        return {"parity_defect": float(1.0 - overlap)}

    return observe
