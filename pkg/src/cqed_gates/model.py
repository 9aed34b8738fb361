"""
Hamiltonians and propagators of N identical transmons on a driven resonator.

Frames:
    lab          H₁ + H₂ + H₃ (free, Jaynes–Cummings exchange, qubit drive)
    interaction  rotating with H₁ at ω_d = ω_q
    effective    additionally rotating with H₀ = 2Ω_R S_x, fast terms dropped

Detuning sign: Δ_r is measured as ω_d − ω_r throughout, i.e. the gate
devices place the resonator Δ_r below the drive. With that sign the chain
lab → interaction → effective → factorized propagator → closed-form gate
matrices is consistent and the effective coupling is +2λS_x² with
λ = g²/(2Δ_r) > 0.

Subsystem order: qubit 1 ... qubit N, resonator last.
"""

import logging
import math
from functools import lru_cache
from typing import Dict, Optional, Tuple, Union

import numpy as np

from .exceptions import ArgumentError, PreconditionError, SingularityError
from .models import DeviceSpec, GateConditions, ValidityReport
from .qcore import (
    DensityMatrix,
    Operator,
    annihilation,
    embed,
    identity,
    kron,
    matexp,
    number,
    sigma_minus,
    sigma_plus,
    sigma_x,
)

_log = logging.getLogger(__name__)


# -------------------------------------------------------
# CONSTANTS
# -------------------------------------------------------

# 2Ω_R/g and 2Ω_R/Δ_r must both reach this for "strong driving"
STRONG_DRIVING_RATIO = 5.0

# Relative tolerance on the Δ_r·t = 2πk condition
PERIOD_RTOL = 1e-9

# Relative tolerance on ω_d = ω_q
RESONANCE_RTOL = 1e-12


def qubit_z() -> Operator:
    """|1><1| − |0><0|, the qubit energy operator (|1> excited)."""
    return Operator([[-1, 0], [0, 1]])


def collective_sx(n: int) -> Operator:
    """S_x = ½ Σ_j (σ₊ʲ + σ₋ʲ) on n qubits."""
    if n < 1:
        raise ArgumentError(f"collective_sx needs n >= 1, got {n}")
    dims = (2,) * n
    half_x = 0.5 * sigma_x()
    total = embed(half_x, 0, dims)
    for j in range(1, n):
        total = total + embed(half_x, j, dims)
    return total


@lru_cache(maxsize=64)
def _parts(n_qubits: int, n_fock: int) -> Dict[str, object]:
    dims = (2,) * n_qubits + (n_fock,)
    a = embed(annihilation(n_fock), n_qubits, dims)
    sp = [embed(sigma_plus(), j, dims) for j in range(n_qubits)]
    sm = [embed(sigma_minus(), j, dims) for j in range(n_qubits)]
    sz = [embed(qubit_z(), j, dims) for j in range(n_qubits)]
    sx = kron(collective_sx(n_qubits), identity(n_fock))
    return {
        "dims": dims,
        "a": a.data,
        "ad": a.data.conj().T,
        "num": embed(number(n_fock), n_qubits, dims).data,
        "sp_sum": sum(s.data for s in sp),
        "sm_sum": sum(s.data for s in sm),
        "sz_sum": sum(s.data for s in sz),
        "sx": sx.data,
        "sx2": sx.data @ sx.data,
        "a_sm": sum(a.dag().data @ s.data for s in sm),
        "a_sp": sum(a.data @ s.data for s in sp),
    }


def _require_resonant_drive(spec: DeviceSpec):
    if abs(spec.omega_d - spec.omega_q) > RESONANCE_RTOL * spec.omega_q:
        raise PreconditionError(
            f"rotating frames need ω_d = ω_q (got ω_d={spec.omega_d}, ω_q={spec.omega_q})"
        )


def _detuning(spec: DeviceSpec) -> float:
    return spec.delta_r


def _lam(spec: DeviceSpec) -> float:
    delta = _detuning(spec)
    if delta == 0:
        raise SingularityError("λ = g²/(2Δ_r) is singular at Δ_r = 0")
    return spec.g ** 2 / (2.0 * delta)


# -------------------------------------------------------
# HAMILTONIANS
# -------------------------------------------------------

def free_hamiltonian(spec: DeviceSpec) -> Operator:
    """H₁ = ω_r a†a + ½ ω_q Σ σ_zʲ."""
    p = _parts(spec.n_qubits, spec.n_fock)
    return Operator(spec.omega_r * p["num"] + 0.5 * spec.omega_q * p["sz_sum"], p["dims"])


def hamiltonian_lab(spec: DeviceSpec, t: float) -> Operator:
    """
    H(t) = H₁ + g Σ(a†σ₋ʲ + aσ₊ʲ) + Ω_R Σ(σ₋ʲ e^{iω_d t} + σ₊ʲ e^{−iω_d t}).
    """
    p = _parts(spec.n_qubits, spec.n_fock)
    phase = np.exp(1j * spec.omega_d * t)
    h = (
        spec.omega_r * p["num"]
        + 0.5 * spec.omega_q * p["sz_sum"]
        + spec.g * (p["a_sm"] + p["a_sp"])
        + spec.omega_rabi * (p["sm_sum"] * phase + p["sp_sum"] * np.conj(phase))
    )
    return Operator(h, p["dims"])


def hamiltonian_interaction(spec: DeviceSpec, t: float) -> Operator:
    """
    H_I(t) = 2Ω_R S_x + g Σ(a†σ₋ʲ e^{−iΔ_r t} + aσ₊ʲ e^{iΔ_r t}).

    This is e^{iH₁t}(H − H₁)e^{−iH₁t} for ω_d = ω_q with Δ_r = ω_q − ω_r.

    Raises:
        PreconditionError: ω_d ≠ ω_q
    """
    _require_resonant_drive(spec)
    p = _parts(spec.n_qubits, spec.n_fock)
    phase = np.exp(-1j * _detuning(spec) * t)
    h = 2.0 * spec.omega_rabi * p["sx"] + spec.g * (p["a_sm"] * phase + p["a_sp"] * np.conj(phase))
    return Operator(h, p["dims"])


def hamiltonian_effective(spec: DeviceSpec, t: float) -> Operator:
    """H'_i(t) = g(a† e^{−iΔ_r t} + a e^{iΔ_r t}) S_x, the strong-driving limit."""
    _require_resonant_drive(spec)
    p = _parts(spec.n_qubits, spec.n_fock)
    phase = np.exp(-1j * _detuning(spec) * t)
    h = spec.g * (p["ad"] * phase + p["a"] * np.conj(phase)) @ p["sx"]
    return Operator(h, p["dims"])


def hamiltonian_qubit_only(spec: DeviceSpec) -> Operator:
    """2Ω_R S_x + 2λ S_x² on the qubits alone: the decoherence-free reference."""
    sx = collective_sx(spec.n_qubits)
    return 2.0 * spec.omega_rabi * sx + 2.0 * _lam(spec) * (sx @ sx)


# -------------------------------------------------------
# FRAME CHANGES
# -------------------------------------------------------

def to_interaction_frame(spec: DeviceSpec, rho: DensityMatrix, t: float) -> DensityMatrix:
    """Lab-frame state → interaction frame: e^{iH₁t} ρ e^{−iH₁t}."""
    u = matexp(free_hamiltonian(spec), 1j * t)
    return _conjugate(u, rho)


def effective_to_interaction(spec: DeviceSpec, rho: DensityMatrix, t: float) -> DensityMatrix:
    """Effective-frame state → interaction frame: e^{−iH₀t} ρ e^{iH₀t}, H₀ = 2Ω_R S_x."""
    return _conjugate(_drive_rotation(spec, rho.dims, -t), rho)


def interaction_to_effective(spec: DeviceSpec, rho: DensityMatrix, t: float) -> DensityMatrix:
    return _conjugate(_drive_rotation(spec, rho.dims, t), rho)


def _drive_rotation(spec: DeviceSpec, dims: Tuple[int, ...], t: float) -> Operator:
    sx = collective_sx(spec.n_qubits)
    if len(dims) == spec.n_qubits + 1:
        sx = kron(sx, identity(dims[-1]))
    return matexp(sx, 2j * spec.omega_rabi * t)


def _conjugate(u: Operator, rho: DensityMatrix) -> DensityMatrix:
    out = u.data @ rho.data @ u.data.conj().T
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(Operator(out, rho.dims), psd_tol=rho.psd_tol)


# -------------------------------------------------------
# PROPAGATORS AND CLOSED FORMS
# -------------------------------------------------------

def factorization_coefficients(spec: DeviceSpec, t: float) -> Tuple[complex, complex]:
    """
    A(t) = (g²/Δ_r)[t + (e^{−iΔ_r t} − 1)/(iΔ_r)],  B(t) = g(e^{iΔ_r t} − 1)/(iΔ_r).

    Raises:
        SingularityError: Δ_r = 0
    """
    delta = _detuning(spec)
    if delta == 0:
        raise SingularityError("factorized propagator is singular at Δ_r = 0")
    g = spec.g
    a_coef = (g ** 2 / delta) * (t + (np.exp(-1j * delta * t) - 1.0) / (1j * delta))
    b_coef = g * (np.exp(1j * delta * t) - 1.0) / (1j * delta)
    return complex(a_coef), complex(b_coef)


def propagator_factorized(spec: DeviceSpec, t: float) -> Operator:
    """
    Exact propagator of H'_i on qubits ⊗ resonator:
    exp(−iA S_x²)·exp(−iB S_x a)·exp(−iB* S_x a†).
    """
    _require_resonant_drive(spec)
    a_coef, b_coef = factorization_coefficients(spec, t)
    p = _parts(spec.n_qubits, spec.n_fock)
    dims = p["dims"]
    u_a = matexp(Operator(p["sx2"], dims), -1j * a_coef)
    u_b = matexp(Operator(p["sx"] @ p["a"], dims), -1j * b_coef)
    u_c = matexp(Operator(p["sx"] @ p["ad"], dims), -1j * np.conj(b_coef))
    return u_a @ u_b @ u_c


def propagator_qubit(
    spec_or_conds: Union[DeviceSpec, GateConditions],
    t: Optional[float] = None,
) -> Operator:
    """
    U_I(t) = exp(−2iΩ_R S_x t)·exp(−2iλ S_x² t) on the qubits alone.

    Valid only when the resonator has closed its loop, Δ_r·t = 2πk.

    Raises:
        PreconditionError: Δ_r·t is not a positive multiple of 2π
    """
    if isinstance(spec_or_conds, GateConditions):
        conds = spec_or_conds
        n, delta, g = conds.n_qubits, conds.delta_r, conds.g
        omega_rabi, lam = conds.omega_rabi, conds.lam
        t = conds.t_gate if t is None else t
    else:
        spec = spec_or_conds
        _require_resonant_drive(spec)
        if t is None:
            raise ArgumentError("propagator_qubit needs a time when given a DeviceSpec")
        n, delta, g = spec.n_qubits, _detuning(spec), spec.g
        omega_rabi, lam = spec.omega_rabi, _lam(spec)
    phase = delta * t
    k = round(phase / (2 * np.pi))
    residual = phase - 2 * np.pi * k
    if k < 1 or abs(residual) > PERIOD_RTOL * 2 * np.pi * k:
        raise PreconditionError(
            f"Δ_r·t = {phase:.12g} is not a positive multiple of 2π (residual {residual:.3e})"
        )
    sx = collective_sx(n)
    return matexp(sx, -2j * omega_rabi * t) @ matexp(sx @ sx, -2j * lam * t)


def _hamming(i: int, j: int) -> int:
    return bin(i ^ j).count("1")


def two_qubit_closed_form(omega_rabi_t: float, lambda_t: float) -> Operator:
    """
    The two-qubit one-step propagator in the computational basis.

    Entries depend only on the Hamming distance d between row and column:
        d = 0:  ½ + ½ cos(2Ω_R t) e^{−2iλt}
        d = 1:  −(i/2) sin(2Ω_R t) e^{−2iλt}
        d = 2:  −½ + ½ cos(2Ω_R t) e^{−2iλt}
    """
    e = np.exp(-2j * lambda_t)
    c, s = np.cos(2 * omega_rabi_t), np.sin(2 * omega_rabi_t)
    by_distance = (0.5 + 0.5 * c * e, -0.5j * s * e, -0.5 + 0.5 * c * e)
    m = np.array([[by_distance[_hamming(i, j)] for j in range(4)] for i in range(4)])
    return Operator(m, (2, 2))


def three_qubit_closed_form(b: float, h: float) -> Operator:
    """
    The three-qubit one-step propagator with b = 2λt and h = Ω_R/λ.

    A' sits on the diagonal, C' at Hamming distance 1, D' at distance 2 and
    B' at distance 3.
    """
    pre = np.exp(-2.25j * b)
    e2 = np.exp(2j * b)
    big, small = 1.5 * b * h, 0.5 * b * h
    a_p = 0.25 * pre * (np.cos(big) + 3 * np.cos(small) * e2)
    b_p = -0.25j * pre * (np.sin(big) - 3 * np.sin(small) * e2)
    c_p = -0.25j * pre * (np.sin(big) + np.sin(small) * e2)
    d_p = 0.25 * pre * (np.cos(big) - np.cos(small) * e2)
    by_distance = (a_p, c_p, d_p, b_p)
    m = np.array([[by_distance[_hamming(i, j)] for j in range(8)] for i in range(8)])
    return Operator(m, (2, 2, 2))


def closed_form(conds: GateConditions, t: Optional[float] = None) -> Operator:
    """The closed-form qubit propagator of an operating point at time t (default t_gate)."""
    t = conds.t_gate if t is None else t
    if conds.n_qubits == 2:
        return two_qubit_closed_form(conds.omega_rabi * t, conds.lam * t)
    return three_qubit_closed_form(2 * conds.lam * t, conds.h)


# -------------------------------------------------------
# GATE CONDITIONS
# -------------------------------------------------------

def _solve_family(family: str, g: float, index: int) -> Tuple[float, float, float]:
    """Return (Δ_r, t_gate, Ω_R) for a member of a condition family."""
    if family == "x2":
        delta = math.sqrt(2.0) * g
        lam = g ** 2 / (2 * delta)
        return delta, 2 * math.pi / delta, (2 * index + 1) * lam / 2
    if family == "ent2":
        if index == 0:
            raise ArgumentError("ent2 needs index >= 1 (index 0 gives Ω_R = 0)")
        return 2.0 * g, math.pi / g, index * g
    if family == "x3":
        delta = math.sqrt(2.0) * g
        lam = g ** 2 / (2 * delta)
        return delta, 2 * math.pi / delta, (0.5 + 2 * index) * lam
    if family == "ent3":
        return 2.0 * g, math.pi / g, (3 + 4 * index) * g / 4
    raise ArgumentError(f"unknown gate family {family!r}; expected x2, ent2, x3 or ent3")


def resolve_conditions(family: str, g: float, index: int = 0) -> Tuple[GateConditions, ValidityReport]:
    """
    Solve a gate family's conditions together with Δ_r·t = 2π and λ = g²/(2Δ_r).

    Families and their integer index n:
        x2    2λt = π,    2Ω_R t = (2n+1)π/2   → Δ_r = √2 g
        ent2  λt = π/4,   Ω_R t = nπ (n ≥ 1)   → Δ_r = 2g, Ω_R = n g
        x3    b = π,      bh = π/2 + 2πn       → Δ_r = √2 g, n = 0 gives Ω_R = Δ_r/8
        ent3  b = π/2,    bh = 3π/2 + 2πn      → Δ_r = 2g, n = 0 gives Ω_R = 3g/4

    Returns:
        The operating point and a report of the strong-driving ratios. A weak
        drive is reported, never rejected.
    """
    if not g > 0:
        raise ArgumentError(f"g must be > 0, got {g}")
    if index < 0:
        raise ArgumentError(f"index must be >= 0, got {index}")
    delta, t_gate, omega_rabi = _solve_family(family, g, int(index))
    lam = g ** 2 / (2 * delta)
    conds = GateConditions(
        family=family,
        integer_index=int(index),
        g=g,
        delta_r=delta,
        lam=lam,
        t_gate=t_gate,
        omega_rabi=omega_rabi,
        b=2 * lam * t_gate,
        h=omega_rabi / lam,
    )
    report = ValidityReport(
        ratio_g=2 * omega_rabi / g,
        ratio_delta=2 * omega_rabi / delta,
        threshold=STRONG_DRIVING_RATIO,
    )
    for violation in report.violations():
        _log.warning("%s index %d: %s", family, index, violation)
    return conds, report


def nearest_index(family: str, g: float, omega_rabi: float) -> int:
    """The family index whose Rabi frequency is closest to ``omega_rabi``."""
    lam = {"x2": g / (2 * math.sqrt(2.0)), "x3": g / (2 * math.sqrt(2.0))}.get(family, g / 4)
    if family == "x2":
        raw = (2 * omega_rabi / lam - 1) / 2
    elif family == "ent2":
        raw = omega_rabi / g
    elif family == "x3":
        raw = (omega_rabi / lam - 0.5) / 2
    elif family == "ent3":
        raw = (4 * omega_rabi / g - 3) / 4
    else:
        raise ArgumentError(f"unknown gate family {family!r}")
    floor = 1 if family == "ent2" else 0
    return max(floor, int(round(raw)))


def conditions_for_device(spec: DeviceSpec, family: str) -> Tuple[GateConditions, ValidityReport]:
    """Resolve the family member whose Rabi frequency is closest to the device drive."""
    if family not in ("x2", "ent2", "x3", "ent3"):
        raise ArgumentError(f"unknown gate family {family!r}")
    if spec.n_qubits != (2 if family.endswith("2") else 3):
        raise ArgumentError(f"family {family!r} does not match a {spec.n_qubits}-qubit device")
    return resolve_conditions(family, spec.g, nearest_index(family, spec.g, spec.omega_rabi))


# -------------------------------------------------------
# JAYNES–CUMMINGS
# -------------------------------------------------------

def jc_hamiltonian(omega_r: float, omega_q: float, g: float, n_fock: int) -> Operator:
    """Single-qubit Jaynes–Cummings model on (qubit, resonator)."""
    p = _parts(1, int(n_fock))
    h = omega_r * p["num"] + 0.5 * omega_q * p["sz_sum"] + g * (p["a_sm"] + p["a_sp"])
    return Operator(h, p["dims"])


def jc_dressed_energies(g: float, delta: float, n: int, omega_r: float = 0.0) -> Tuple[float, float]:
    """E± = ω_r(n+1) ± ½ sqrt(4g²(n+1) + Δ²)."""
    if n < 0:
        raise ArgumentError(f"photon number must be >= 0, got {n}")
    half = 0.5 * math.sqrt(4 * g ** 2 * (n + 1) + delta ** 2)
    return omega_r * (n + 1) + half, omega_r * (n + 1) - half


def jc_dressed_states(g: float, delta: float, n: int) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Mixing angle θ_n with tan 2θ_n = 2g√(n+1)/Δ and the dressed states
    |+,n> = cos θ|e,n> + sin θ|g,n+1>, |−,n> = −sin θ|e,n> + cos θ|g,n+1>
    as coefficient vectors over (|e,n>, |g,n+1>).
    """
    if n < 0:
        raise ArgumentError(f"photon number must be >= 0, got {n}")
    theta = 0.5 * math.atan2(2 * g * math.sqrt(n + 1), delta)
    plus = np.array([math.cos(theta), math.sin(theta)])
    minus = np.array([-math.sin(theta), math.cos(theta)])
    return theta, plus, minus
