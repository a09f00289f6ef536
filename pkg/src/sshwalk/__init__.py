"""Dissipative quantum walk on an SSH lattice with structured reservoirs."""

__version__ = "0.1.0"

from .gme import BromwichConfig, KTrace, evolve_volterra, invert_bromwich, steady_average
from .kernel import SelfEnergyData, SpectralLaw, memory_kernel, self_energy_laplace, sigma_prime
from .model import KGrid, WalkParams, hopping_amplitude, phase_and_derivative, winding_number
from .observables import (
    PhaseCell,
    ReducedDensity2,
    WitnessTrace,
    mean_displacement,
    mean_displacement_longtime,
    phase_diagram,
    survival_probability,
    trace_distance,
    witness,
)
from .oracle import (
    ChainModel,
    ExactSpectrum,
    exact_evolve_chain,
    exact_evolve_full,
    exact_evolve_reduced,
    exact_longtime_average,
)
from .swt import DiscreteReservoir, ReducedModel, discretize_spectral_law, reduce

__all__ = [
    "BromwichConfig",
    "ChainModel",
    "DiscreteReservoir",
    "ExactSpectrum",
    "KGrid",
    "KTrace",
    "PhaseCell",
    "ReducedDensity2",
    "ReducedModel",
    "SelfEnergyData",
    "SpectralLaw",
    "WalkParams",
    "WitnessTrace",
    "discretize_spectral_law",
    "evolve_volterra",
    "exact_evolve_chain",
    "exact_evolve_full",
    "exact_evolve_reduced",
    "exact_longtime_average",
    "hopping_amplitude",
    "invert_bromwich",
    "mean_displacement",
    "mean_displacement_longtime",
    "memory_kernel",
    "phase_and_derivative",
    "phase_diagram",
    "reduce",
    "self_energy_laplace",
    "sigma_prime",
    "steady_average",
    "survival_probability",
    "trace_distance",
    "winding_number",
    "witness",
]
