"""Bethe-ansatz scalar products, norms and field form factors of the
non-linear Schroedinger model, with brute-force oracles and large-volume
asymptotics."""

__version__ = "0.1.0"

from .bethe_core import (
    BetheState,
    ModelGeometry,
    QuantumNumbers,
    counting_functions,
    kernel,
    shift_function_finite,
    solve_bae,
    theta,
)
from .determinants import (
    ff_det_continuum,
    ff_det_lattice,
    gaudin_norm,
    normalized_ff_parts,
    slavnov_overlap,
)
from .thermo import ExcitationThermo, ThermoModel, find_q, shift_thermo, solve_dressed
from .asymptotics import asymptotic_ff, regularized_det, smooth_part, discrete_part
from .special import barnes_g

__all__ = [
    "BetheState", "ModelGeometry", "QuantumNumbers", "counting_functions", "kernel",
    "shift_function_finite", "solve_bae", "theta", "ff_det_continuum", "ff_det_lattice",
    "gaudin_norm", "normalized_ff_parts", "slavnov_overlap", "ExcitationThermo", "ThermoModel",
    "find_q", "shift_thermo", "solve_dressed", "asymptotic_ff", "regularized_det", "smooth_part",
    "discrete_part", "barnes_g",
]
