import math
from functools import reduce

import numpy as np
import pytest

from fracres.basis import Sector, enumerate_basis, parity_reflect
from fracres.operators import (CollapseKind, LatticeParams, NoiseParams, SectorError,
                               StrongInteractionWarning, build_collapse, build_H0, build_hopping,
                               commutator, hamiltonian_at, hermiticity_defect, ladder_down,
                               ladder_up, local_collapse_matrix, number_op, symmetry_operators)

U = 2 * math.pi * 40.0
J0 = 2 * math.pi * 1.0


def params(L=3, n_max=3, drive=0.5, omega=0.0):
    return LatticeParams(L=L, n_max=n_max, U=U, J0=J0, Omega_drive=drive * U, omega=omega)


def ket(basis, config):
    v = np.zeros(basis.size, dtype=complex)
    v[basis.index(config)] = 1
    return v


def elem(op, basis, bra, k):
    return op[basis.index(bra), basis.index(k)]


def kron_embed(local, site, L):
    """Oracle: identity on every site but ``site`` (1-based), lexicographic = kron order."""
    dim = local.shape[0]
    factors = [local if j == site else np.eye(dim) for j in range(1, L + 1)]
    return reduce(np.kron, factors)


# ladder operators -------------------------------------------------------------

def test_ladder_single_site():
    basis = enumerate_basis(1, 3)
    a = ladder_down(basis, 1)
    adag = ladder_up(basis, 1)
    assert np.allclose(a @ ket(basis, (1,)), ket(basis, (0,)))
    assert np.allclose(a @ ket(basis, (3,)), math.sqrt(3) * ket(basis, (2,)))
    assert np.allclose(adag @ ket(basis, (3,)), 0)


def test_ladder_up_is_adjoint():
    basis = enumerate_basis(3, 2)
    for site in (1, 2, 3):
        diff = ladder_up(basis, site) - ladder_down(basis, site).conj().T
        assert abs(diff).max() == 0


def test_ladder_matches_kron_oracle():
    L, n_max = 3, 3
    basis = enumerate_basis(L, n_max)
    local = np.diag(np.sqrt(np.arange(1, n_max + 1)), k=1)
    for site in range(1, L + 1):
        assert np.allclose(ladder_down(basis, site).toarray(), kron_embed(local, site, L), atol=0)


def test_canonical_commutator_below_cutoff():
    L, n_max = 2, 3
    basis = enumerate_basis(L, n_max)
    for site in (1, 2):
        a, adag = ladder_down(basis, site), ladder_up(basis, site)
        comm = (a @ adag - adag @ a).toarray()
        below = np.array([c[site - 1] < n_max for c in basis.configs])
        proj = np.diag(below.astype(float))
        assert np.allclose(proj @ comm @ proj, proj, atol=1e-14)


def test_ladders_on_different_sites_commute_exactly():
    basis = enumerate_basis(3, 2)
    a1, adag2 = ladder_down(basis, 1), ladder_up(basis, 2)
    assert commutator(a1, adag2).nnz == 0


def test_ladder_rejects_sector_basis():
    with pytest.raises(SectorError):
        ladder_down(enumerate_basis(3, 3, Sector.fixed_n(3)), 1)
    with pytest.raises(IndexError):
        ladder_down(enumerate_basis(3, 3), 4)


# H0 and hopping ---------------------------------------------------------------

@pytest.mark.parametrize("config, energy_over_U", [((1, 1, 1), 1.5), ((2, 0, 1), 2.5), ((0, 0, 0), 0.0)])
def test_H0_diagonal(config, energy_over_U):
    basis = enumerate_basis(3, 3)
    H0 = build_H0(params(), basis)
    assert elem(H0, basis, config, config).real == pytest.approx(energy_over_U * U, rel=1e-15, abs=0)


def test_H0_matches_number_operator_oracle():
    basis = enumerate_basis(3, 3)
    p = params(omega=2 * math.pi * 3.0)
    oracle = sum(p.omega * number_op(basis, j) + 0.5 * p.U * number_op(basis, j) @ number_op(basis, j)
                 for j in (1, 2, 3))
    assert np.allclose(build_H0(p, basis).toarray(), oracle.toarray(), rtol=1e-15, atol=1e-9)
    assert abs(build_H0(p, basis) - sparse_diag(build_H0(p, basis))).max() == 0


def sparse_diag(op):
    from scipy import sparse
    return sparse.diags(op.diagonal())


def test_hopping_elements():
    basis = enumerate_basis(3, 3)
    hop = build_hopping(basis)
    assert elem(hop, basis, (2, 0, 1), (1, 1, 1)) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert elem(hop, basis, (1, 1, 1), (1, 1, 1)) == 0
    assert elem(hop, basis, (0, 1, 2), (1, 1, 1)) == 0


def test_hopping_matches_ladder_oracle():
    basis = enumerate_basis(3, 3)
    oracle = sum(ladder_up(basis, j) @ ladder_down(basis, j + 1)
                 + ladder_up(basis, j + 1) @ ladder_down(basis, j) for j in (1, 2))
    assert np.allclose(build_hopping(basis).toarray(), oracle.toarray(), atol=1e-14)


def test_hopping_is_open_boundary():
    basis = enumerate_basis(3, 3)
    hop = build_hopping(basis)
    assert elem(hop, basis, (2, 0, 0), (1, 0, 1)) == 0


def test_hopping_needs_two_sites():
    with pytest.raises(ValueError):
        build_hopping(enumerate_basis(1, 3))


def test_hopping_in_sectors_matches_full_block():
    full = enumerate_basis(3, 3)
    sector = enumerate_basis(3, 3, Sector.fixed_n(3))
    idx = [full.index(c) for c in sector.configs]
    block = build_hopping(full).toarray()[np.ix_(idx, idx)]
    assert np.array_equal(build_hopping(sector).toarray(), block)


def test_even_sector_hopping_is_projected_block():
    sector = enumerate_basis(3, 3, Sector.fixed_n(3))
    even = enumerate_basis(3, 3, Sector.fixed_n_even(3))
    iso = even.isometry().toarray()
    expected = iso.conj().T @ build_hopping(sector).toarray() @ iso
    assert np.allclose(build_hopping(even).toarray(), expected, atol=1e-14)


def test_hamiltonian_at():
    basis = enumerate_basis(3, 3)
    p = params()
    H0, hop = build_H0(p, basis), build_hopping(basis)
    T = 2 * math.pi / p.Omega_drive
    assert abs(hamiltonian_at(math.pi / (2 * p.Omega_drive), p, H0, hop) - H0).max() < 1e-15 * J0 * 10
    H_zero = hamiltonian_at(0.0, p, H0, hop)
    assert elem(H_zero, basis, (2, 0, 1), (1, 1, 1)) == pytest.approx(-J0 * math.sqrt(2), rel=1e-15)
    for t in np.linspace(0, T, 7):
        a = hamiltonian_at(t, p, H0, hop).toarray()
        b = hamiltonian_at(t + T, p, H0, hop).toarray()
        assert np.allclose(a, b, rtol=0, atol=1e-12 * J0)
        assert hermiticity_defect(hamiltonian_at(t, p, H0, hop)) <= 1e-14


def test_hamiltonian_dimension_mismatch():
    p = params()
    with pytest.raises(ValueError):
        hamiltonian_at(0.0, p, build_H0(p, enumerate_basis(3, 3)), build_hopping(enumerate_basis(3, 2)))


def test_strong_interaction_warning():
    with pytest.warns(StrongInteractionWarning):
        LatticeParams(L=2, n_max=1, U=1.0, J0=0.5, Omega_drive=1.0)


def test_lattice_params_validation():
    with pytest.raises(ValueError):
        LatticeParams(L=2, n_max=1, U=0.0, J0=0.0, Omega_drive=1.0)
    with pytest.raises(ValueError):
        LatticeParams(L=2, n_max=1, U=1.0, J0=-1.0, Omega_drive=1.0)
    with pytest.raises(ValueError):
        LatticeParams(L=2, n_max=1, U=1.0, J0=0.0, Omega_drive=0.0)


# collapse operators -------------------------------------------------------------

NOISE = NoiseParams((11.9e3, 24.39e3, 33.33e3), (13.89e3, 31.25e3, 83.33e3))


def test_local_decay_matrix():
    mat = local_collapse_matrix(NOISE, CollapseKind.DECAY)
    expected = np.zeros((4, 4))
    expected[0, 1] = math.sqrt(11.9e3)
    expected[1, 2] = math.sqrt(2 * 24.39e3)
    expected[2, 3] = math.sqrt(3 * 33.33e3)
    assert np.array_equal(mat, expected)


def test_local_dephasing_matrix():
    mat = local_collapse_matrix(NOISE, CollapseKind.DEPHASE)
    expected = np.diag([0, math.sqrt(13.89e3), 2 * math.sqrt(31.25e3), 3 * math.sqrt(83.33e3)])
    assert np.array_equal(mat, expected)


@pytest.mark.parametrize("kind", list(CollapseKind))
def test_collapse_matches_kron_oracle(kind):
    basis = enumerate_basis(3, 3)
    local = local_collapse_matrix(NOISE, kind)
    for site in (1, 2, 3):
        got = build_collapse(basis, NOISE, site, kind).toarray()
        assert np.allclose(got, kron_embed(local, site, 3), rtol=1e-15, atol=0)


def test_zero_rates_give_zero_operator():
    basis = enumerate_basis(2, 3)
    for kind in CollapseKind:
        assert build_collapse(basis, NoiseParams.zero(3), 1, kind).nnz == 0


def test_collapse_sector_rules():
    with pytest.raises(SectorError):
        build_collapse(enumerate_basis(3, 3, Sector.fixed_n(3)), NOISE, 1, CollapseKind.DECAY)
    reduced = enumerate_basis(3, 3, Sector.at_most_n(3))
    full = enumerate_basis(3, 3)
    idx = [full.index(c) for c in reduced.configs]
    block = build_collapse(full, NOISE, 2, CollapseKind.DECAY).toarray()[np.ix_(idx, idx)]
    assert np.array_equal(build_collapse(reduced, NOISE, 2, CollapseKind.DECAY).toarray(), block)


def test_collapse_level_mismatch():
    with pytest.raises(ValueError):
        build_collapse(enumerate_basis(2, 2), NOISE, 1, CollapseKind.DECAY)


def test_noise_validation():
    with pytest.raises(ValueError):
        NoiseParams((1.0, -1.0), (0.0, 0.0))
    with pytest.raises(ValueError):
        NoiseParams((1.0,), (0.0, 0.0))


def test_parity_conjugation_maps_collapse_sites():
    L = 4
    basis = enumerate_basis(L, 2)
    noise = NoiseParams((1.0, 2.0), (3.0, 4.0))
    _, P = symmetry_operators(basis)
    for kind in CollapseKind:
        for site in range(1, L + 1):
            mirrored = P @ build_collapse(basis, noise, site, kind) @ P
            assert abs(mirrored - build_collapse(basis, noise, L + 1 - site, kind)).max() == 0


# symmetry operators ---------------------------------------------------------------

def test_symmetry_operators():
    basis = enumerate_basis(3, 3)
    N, P = symmetry_operators(basis)
    assert np.array_equal(N @ ket(basis, (1, 1, 1)), 3 * ket(basis, (1, 1, 1)))
    assert np.array_equal(P @ ket(basis, (2, 1, 0)), ket(basis, (0, 1, 2)))
    assert abs(P @ P - np.eye(basis.size)).max() == 0
    for c in basis.configs:
        assert np.array_equal(P @ ket(basis, c), ket(basis, parity_reflect(c)))


def test_parity_is_identity_on_even_sector():
    even = enumerate_basis(3, 3, Sector.fixed_n_even(3))
    _, P = symmetry_operators(even)
    assert np.allclose(P.toarray(), np.eye(even.size), atol=1e-15)


@pytest.mark.parametrize("L, n_max", [(3, 3), (4, 2), (4, 4)])
def test_hamiltonian_commutes_with_symmetries(L, n_max):
    basis = enumerate_basis(L, n_max)
    p = params(L=L, n_max=n_max)
    H0, hop = build_H0(p, basis), build_hopping(basis)
    N, P = symmetry_operators(basis)
    T = 2 * math.pi / p.Omega_drive
    for t in np.linspace(0, T, 9):
        H = hamiltonian_at(t, p, H0, hop)
        assert commutator(H, N).nnz == 0
        assert commutator(H, P).nnz == 0
    assert commutator(N, N).nnz == 0


def test_commutator_dimension_mismatch():
    with pytest.raises(ValueError):
        commutator(build_H0(params(), enumerate_basis(3, 3)), build_H0(params(), enumerate_basis(3, 2)))
