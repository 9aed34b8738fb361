"""
cQED Gates - One-Step Multi-Qubit Gate Toolkit

This package simulates driven transmon–resonator devices: it builds the
device Hamiltonians, integrates the Lindblad master equation, constructs
the one-step X-rotation and entangling gates, runs Grover's search and
Deutsch–Jozsa with them, and characterizes gates by process tomography.

Main components:
- qcore: Dense operators, states, partial traces, Pauli bases, fidelities
- device: Cooper-pair-box spectrum, charge dispersion, anharmonicity
- model: Device Hamiltonians, frames, propagators, gate conditions
- lindblad: Master-equation solver and gate scenarios
- gates: Gate library, oracles, diffusion, circuits
- algorithms: Grover and Deutsch–Jozsa
- qpt: χ-matrix process tomography
- scenarios / runner / cli: Named experiments written to CSV/JSON artifacts

Usage:
    from cqed_gates import resolve_conditions, GateScenario, run_gate

    conds, report = resolve_conditions("ent2", g=2 * 3.14159 * 60.0, index=30)
    run = run_gate(GateScenario(conds))
"""

__version__ = '1.0.0'

from .exceptions import (
    ArgumentError,
    ConfigError,
    CqedError,
    DivergenceError,
    InversionError,
    NumericalMethodError,
    PreconditionError,
    SingularityError,
)
from .models import DeviceSpec, GateConditions, NoiseSpec, ScenarioConfig
from .qcore import DensityMatrix, Operator, StateVector
from .model import closed_form, resolve_conditions
from .lindblad import GateScenario, run_gate, solve
from .gates import entangler, gate, oracle
from .algorithms import deutsch_jozsa, grover_ideal
from .qpt import chi_ideal, process_fidelity, process_tomography
from .runner import ScenarioRunner, run_scenario

__all__ = [
    'ArgumentError',
    'ConfigError',
    'CqedError',
    'DivergenceError',
    'InversionError',
    'NumericalMethodError',
    'PreconditionError',
    'SingularityError',
    'DeviceSpec',
    'GateConditions',
    'NoiseSpec',
    'ScenarioConfig',
    'DensityMatrix',
    'Operator',
    'StateVector',
    'closed_form',
    'resolve_conditions',
    'GateScenario',
    'run_gate',
    'solve',
    'entangler',
    'gate',
    'oracle',
    'deutsch_jozsa',
    'grover_ideal',
    'chi_ideal',
    'process_fidelity',
    'process_tomography',
    'ScenarioRunner',
    'run_scenario',
]
