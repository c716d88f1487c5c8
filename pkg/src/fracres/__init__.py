"""Closed and open dynamics of periodically driven Bose-Hubbard chains."""

from .basis import (BasisMap, Sector, StateVector, dimension_count, enumerate_basis,
                    named_state, parity_reflect)
from .evolution import (DensityMatrix, IntegrationError, Schedule, StepSizeError, TimeSeries,
                        evolve_closed, evolve_open, oracle_propagate, rk4_step)
from .operators import (CollapseKind, LatticeParams, NoiseParams, build_collapse, build_H0,
                        build_hopping, commutator, hamiltonian_at, ladder_down, ladder_up,
                        symmetry_operators)
from .observables import (config_populations, linear_entropy, population, purity,
                          symmetry_expectations)
from .resonance import (HopEvent, ResonanceKind, config_energy, hop_energy_diff,
                        resonance_frequencies, rotating_phase)
from .scenario import ScenarioConfig, parse_scenario

__version__ = "0.1.0"

__all__ = [
    "BasisMap",
    "Sector",
    "StateVector",
    "dimension_count",
    "enumerate_basis",
    "named_state",
    "parity_reflect",
    "DensityMatrix",
    "IntegrationError",
    "Schedule",
    "StepSizeError",
    "TimeSeries",
    "evolve_closed",
    "evolve_open",
    "oracle_propagate",
    "rk4_step",
    "CollapseKind",
    "LatticeParams",
    "NoiseParams",
    "build_collapse",
    "build_H0",
    "build_hopping",
    "commutator",
    "hamiltonian_at",
    "ladder_down",
    "ladder_up",
    "symmetry_operators",
    "config_populations",
    "linear_entropy",
    "population",
    "purity",
    "symmetry_expectations",
    "HopEvent",
    "ResonanceKind",
    "config_energy",
    "hop_energy_diff",
    "resonance_frequencies",
    "rotating_phase",
    "ScenarioConfig",
    "parse_scenario",
]
