import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracres.basis import (NAMED_STATES, Sector, StateVector, dimension_count, enumerate_basis,
                           named_state, parity_reflect)


def brute_force(L, n_max, total=None):
    vectors = itertools.product(range(n_max + 1), repeat=L)
    return sorted(v for v in vectors if total is None or sum(v) == total)


@pytest.mark.parametrize("L, n_max, size", [(3, 3, 64), (4, 4, 625), (1, 0, 1)])
def test_full_sizes(L, n_max, size):
    assert enumerate_basis(L, n_max).size == size


def test_empty_lattice_has_vacuum_only():
    assert enumerate_basis(1, 0).configs == ((0,),)


def test_fixed_n_matches_enumeration():
    basis = enumerate_basis(3, 3, Sector.fixed_n(3))
    assert list(basis.configs) == brute_force(3, 3, 3)
    assert basis.size == 10


@pytest.mark.parametrize("N, L, expected", [(3, 3, 10), (0, 5, 1), (4, 4, 35)])
def test_dimension_count(N, L, expected):
    assert dimension_count(N, L) == expected
    assert dimension_count(N, L) == len(brute_force(L, N, N))


def test_dimension_count_is_exact_integer():
    assert isinstance(dimension_count(30, 12), int)
    assert dimension_count(30, 12) == math.factorial(41) // (math.factorial(30) * math.factorial(11))


def test_dimension_count_overflow():
    with pytest.raises(OverflowError):
        dimension_count(400, 400)


def test_dimension_count_rejects_bad_arguments():
    with pytest.raises(ValueError):
        dimension_count(-1, 3)
    with pytest.raises(ValueError):
        dimension_count(2, 0)


@pytest.mark.parametrize("config, mirrored", [((1, 2, 0), (0, 2, 1)), ((1, 1, 1), (1, 1, 1)),
                                              ((2, 1, 0, 3), (3, 0, 1, 2))])
def test_parity_reflect(config, mirrored):
    assert parity_reflect(config) == mirrored


@given(st.lists(st.integers(0, 5), min_size=1, max_size=8))
def test_parity_reflect_is_involution(config):
    assert parity_reflect(parity_reflect(config)) == tuple(config)


def test_invalid_sector_raises():
    with pytest.raises(ValueError):
        enumerate_basis(3, 1, Sector.fixed_n(4))
    with pytest.raises(ValueError):
        enumerate_basis(0, 3)
    with pytest.raises(ValueError):
        enumerate_basis(2, -1)
    with pytest.raises(ValueError):
        Sector.fixed_n(-1)


@pytest.mark.parametrize("L, n_max", [(L, n) for L in range(1, 5) for n in range(0, 5)])
def test_sector_sizes_partition_full_space(L, n_max):
    sizes = [enumerate_basis(L, n_max, Sector.fixed_n(N)).size for N in range(L * n_max + 1)]
    assert sum(sizes) == (n_max + 1) ** L


@pytest.mark.parametrize("L, n_max", [(2, 3), (3, 3), (4, 2)])
def test_lexicographic_order_and_inverse_lookup(L, n_max):
    basis = enumerate_basis(L, n_max)
    assert list(basis.configs) == brute_force(L, n_max)
    for i in range(basis.size):
        assert basis.index(basis.config_of(i)) == i


@pytest.mark.parametrize("L, N", [(2, 2), (3, 3), (4, 3)])
def test_cutoff_saturation(L, N):
    exact = enumerate_basis(L, N, Sector.fixed_n(N))
    for extra in (1, 3):
        assert enumerate_basis(L, N + extra, Sector.fixed_n(N)).configs == exact.configs


def test_at_most_n_sector():
    basis = enumerate_basis(3, 3, Sector.at_most_n(3))
    assert list(basis.configs) == sorted(c for c in brute_force(3, 3) if sum(c) <= 3)
    assert basis.size == sum(dimension_count(N, 3) for N in range(4))


def test_missing_config_lookup_raises():
    basis = enumerate_basis(3, 3, Sector.fixed_n(3))
    with pytest.raises(KeyError):
        basis.index((0, 0, 0))


def test_named_states_on_three_sites():
    basis = enumerate_basis(3, 3)
    psi0 = named_state("psi0", basis).amplitudes
    assert psi0[basis.index((1, 1, 1))] == 1
    assert np.count_nonzero(psi0) == 1

    psi1 = named_state("psi1", basis).amplitudes
    assert psi1[basis.index((1, 2, 0))] == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert psi1[basis.index((0, 2, 1))] == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert np.count_nonzero(psi1) == 2

    psi4 = named_state("psi4", basis).amplitudes
    assert psi4[basis.index((0, 3, 0))] == 1
    assert np.count_nonzero(psi4) == 1


@pytest.mark.parametrize("name", NAMED_STATES)
def test_named_states_are_parity_even(name):
    basis = enumerate_basis(3, 3)
    amps = named_state(name, basis).amplitudes
    mirrored = np.zeros_like(amps)
    for i, c in enumerate(basis.configs):
        mirrored[basis.index(parity_reflect(c))] = amps[i]
    assert np.array_equal(mirrored, amps)
    assert np.linalg.norm(amps) == pytest.approx(1, abs=1e-12)


def test_named_states_are_orthonormal():
    basis = enumerate_basis(3, 3, Sector.fixed_n(3))
    vecs = np.array([named_state(n, basis).amplitudes for n in NAMED_STATES])
    assert np.allclose(vecs.conj() @ vecs.T, np.eye(6), atol=1e-14)


def test_psi0_generalizes_to_any_length():
    basis = enumerate_basis(4, 4)
    assert named_state("psi0", basis).amplitudes[basis.index((1, 1, 1, 1))] == 1


def test_named_state_errors():
    with pytest.raises(ValueError):
        named_state("psi3", enumerate_basis(3, 1))
    with pytest.raises(ValueError):
        named_state("psi1", enumerate_basis(4, 3))
    with pytest.raises(ValueError):
        named_state("psi9", enumerate_basis(3, 3))


def test_even_sector_vectors_are_the_named_states():
    even = enumerate_basis(3, 3, Sector.fixed_n_even(3))
    assert even.size == 6
    for name in NAMED_STATES:
        amps = named_state(name, even).amplitudes
        assert np.count_nonzero(np.abs(amps) > 1e-15) == 1
    iso = even.isometry().toarray()
    assert np.allclose(iso.conj().T @ iso, np.eye(6), atol=1e-15)


def test_state_vector_requires_unit_norm():
    basis = enumerate_basis(2, 1)
    with pytest.raises(ValueError):
        StateVector(basis, np.ones(basis.size))
    with pytest.raises(ValueError):
        StateVector(basis, np.ones(3))
