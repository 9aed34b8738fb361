"""
Static Cooper-pair-box / transmon physics.

Charge-basis Hamiltonian, its spectrum as a function of gate charge, charge
dispersion, flux tuning of the Josephson energy, anharmonicity and the
drive-induced leakage estimate for the second excited level.

Energies are carried in whatever angular unit the caller uses (rad/µs in the
rest of the package); only ratios matter for most of these functions.
"""

import logging
from typing import Iterable, List

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .exceptions import ArgumentError
from .models import CpbParams, FluxSpec
from .qcore import Operator

_log = logging.getLogger(__name__)

# E_J/E_C from which the two-level transmon picture is trusted
TRANSMON_RATIO = 10.0


def _bands(p: CpbParams):
    charges = np.arange(-p.charge_cutoff, p.charge_cutoff + 1, dtype=float)
    diagonal = 4.0 * p.e_c * (charges - p.n_g) ** 2
    off = np.full(len(charges) - 1, -0.5 * p.e_j)
    return diagonal, off


def cpb_hamiltonian(p: CpbParams) -> Operator:
    """
    Charge-basis CPB Hamiltonian of dimension 2·cutoff + 1.

    Diagonal 4·E_C·(N − N_g)² (E_C the single-electron charging energy, so this
    is the (2e)²/2C parabola), and −E_J/2 on both first off-diagonals.
    """
    diagonal, off = _bands(p)
    return Operator(np.diag(diagonal) + np.diag(off, 1) + np.diag(off, -1))


def cpb_spectrum(p: CpbParams, k_levels: int) -> np.ndarray:
    """
    The ``k_levels`` lowest eigenvalues in ascending order.

    Raises:
        ArgumentError: k_levels outside [1, 2·cutoff + 1]
    """
    size = 2 * p.charge_cutoff + 1
    if not 1 <= k_levels <= size:
        raise ArgumentError(f"k_levels must be in [1, {size}], got {k_levels}")
    diagonal, off = _bands(p)
    return eigvalsh_tridiagonal(diagonal, off, select="i", select_range=(0, k_levels - 1))


def cpb_sweep(p: CpbParams, n_g_grid: Iterable[float], k_levels: int = 3) -> np.ndarray:
    """Spectrum over a gate-charge grid; row i holds the levels at n_g_grid[i]."""
    rows: List[np.ndarray] = []
    for n_g in n_g_grid:
        rows.append(cpb_spectrum(CpbParams(p.e_c, p.e_j, float(n_g), p.charge_cutoff), k_levels))
    return np.array(rows)


def _transition(p: CpbParams, n_g: float, k: int) -> float:
    levels = cpb_spectrum(CpbParams(p.e_c, p.e_j, n_g, p.charge_cutoff), k + 2)
    return float(levels[k + 1] - levels[k])


def charge_dispersion(p: CpbParams, k: int = 0) -> float:
    """
    ε_k = E_{k,k+1}(N_g = 1/2) − E_{k,k+1}(N_g = 0), signed as written.

    The ``n_g`` field of ``p`` is ignored; both sweet spots are evaluated.
    """
    if k < 0:
        raise ArgumentError(f"level index must be >= 0, got {k}")
    return _transition(p, 0.5, k) - _transition(p, 0.0, k)


def ej_of_flux(f: FluxSpec) -> float:
    """
    Effective Josephson energy of a symmetric SQUID, E_Jmax·|cos(πΦ/Φ₀)|.

    The sign of the cosine only shifts the phase origin, so the magnitude
    is returned.
    """
    return float(f.e_j_max * abs(np.cos(np.pi * f.phi_ratio)))


def transmon_regime(p: CpbParams) -> bool:
    return p.ratio >= TRANSMON_RATIO


def anharmonicity(p: CpbParams) -> float:
    """
    α = E_12 − E_01 at the sweet spot N_g = 1/2, computed from the spectrum.

    In the transmon limit α → −E_C. The first correction is
    −(7/8)·sqrt(2E_C/E_J)·E_C, so at E_J/E_C = 50 the exact value is
    about −1.15·E_C; −E_C is reached within 5% only above E_J/E_C ≈ 1000.
    """
    if not transmon_regime(p):
        _log.debug("anharmonicity at E_J/E_C = %.3g is outside the transmon regime", p.ratio)
    levels = cpb_spectrum(CpbParams(p.e_c, p.e_j, 0.5, p.charge_cutoff), 3)
    return float((levels[2] - levels[1]) - (levels[1] - levels[0]))


def leakage_estimate(alpha: float, omega_rabi: float) -> float:
    """Population of |2> under a resonant drive: P₂ = 2/(4 + (α/Ω_R)²)."""
    if alpha == 0:
        raise ArgumentError("leakage estimate needs a nonzero anharmonicity")
    if omega_rabi == 0:
        return 0.0
    return 2.0 / (4.0 + (alpha / omega_rabi) ** 2)
