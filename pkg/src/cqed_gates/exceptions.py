"""
Exception hierarchy for the cQED gate toolkit.

Every error raised on purpose by the library derives from ``CqedError`` so a
caller (the CLI in particular) can separate "the input was wrong" from "the
numerics failed" with a single ``except`` clause each.

    CqedError
    ├── ArgumentError        bad argument value (also a ValueError)
    ├── PreconditionError    operation called outside its validity domain
    ├── ConfigError          scenario config failed validation
    └── NumericalMethodError numerics broke down (also an ArithmeticError)
        ├── DivergenceError  non-finite state during integration
        ├── InversionError   tomography input set does not span
        └── SingularityError Δ_r = 0 in the factorized propagator
"""

from typing import List, Optional, Sequence


class CqedError(Exception):
    """Base class for all toolkit errors."""


class ArgumentError(CqedError, ValueError):
    """An argument is out of range, malformed, or has mismatched dimensions."""


class PreconditionError(CqedError, ValueError):
    """
    An operation was asked to work outside the regime it is defined for.

    The classic case is the interaction-frame Hamiltonian with ω_d ≠ ω_q, or
    the qubit-only propagator at a time where the resonator has not returned
    to its initial state (Δ_r·t ≠ 2πk).
    """


class ConfigError(CqedError):
    """
    A scenario configuration failed validation.

    Attributes:
        violations: Human-readable descriptions of every failed check
    """

    def __init__(self, message: str, violations: Optional[Sequence[str]] = None):
        super().__init__(message)
        self.violations: List[str] = list(violations or [])


class NumericalMethodError(CqedError, ArithmeticError):
    """A numerical method failed (non-diagonalizable input, bad conditioning...)."""


class DivergenceError(NumericalMethodError):
    """
    The integrator produced non-finite values.

    Attributes:
        step: Index of the integration step at which the state blew up
    """

    def __init__(self, message: str, step: int):
        super().__init__(f"{message} (step {step})")
        self.step = step


class InversionError(NumericalMethodError):
    """The tomographic input set is rank-deficient; χ cannot be inverted."""


class SingularityError(NumericalMethodError):
    """A closed form is singular at the requested parameters (e.g. Δ_r = 0)."""
