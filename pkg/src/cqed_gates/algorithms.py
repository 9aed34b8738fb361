"""
Algorithm runners built on the gate library.

Ideal state-vector Grover search (W-gate or Hadamard preparation), its
geometric picture, sweeps where every W-type gate is replaced by the one-step
propagator at arbitrary (b, h), a Grover run whose W-type gates are driven
through the master equation, and Deutsch–Jozsa.
"""

import logging
import math
from functools import reduce
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from .exceptions import ArgumentError, PreconditionError
from .gates import apply_circuit, diffusion, gate, oracle, w_gate
from .lindblad import RECORD_PSD_TOL, choose_dt, solve
from .model import (
    conditions_for_device,
    hamiltonian_interaction,
    three_qubit_closed_form,
    two_qubit_closed_form,
)
from .models import (
    DeutschJozsaResult,
    DeviceSpec,
    GateSpec,
    GroverMasterRun,
    GroverRun,
    NoiseSpec,
    Segment,
    SolveOptions,
    SweepPoint,
    Trajectory,
)
from .qcore import DensityMatrix, Operator, StateVector, basis_state, partial_trace, tensor_states

_log = logging.getLogger(__name__)

PREPS = ("w_gates", "hadamard")

# Multiples of π searched for a W-type operating point
OPERATING_SEARCH = 64


def _tensor_power(m: np.ndarray, n: int) -> np.ndarray:
    return reduce(np.kron, [m] * n)


def _zero(n: int) -> np.ndarray:
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = 1.0
    return psi


# -------------------------------------------------------
# IDEAL GROVER
# -------------------------------------------------------

def grover_ideal(n: int, marked: int, iterations: int, prep: str = "w_gates") -> GroverRun:
    """
    State-vector Grover search.

    The register starts in |0...0>, is prepared with W_n (or H^{⊗n}) and then
    goes through ``iterations`` rounds of oracle followed by diffusion about
    the prepared state.

    Returns:
        GroverRun whose index 0 holds the prepared state
    """
    if n < 1:
        raise ArgumentError(f"n must be >= 1, got {n}")
    if not 0 <= marked < 2 ** n:
        raise ArgumentError(f"marked state {marked} out of range for {n} qubits")
    if iterations < 0:
        raise ArgumentError(f"iterations must be >= 0, got {iterations}")
    if prep not in PREPS:
        raise ArgumentError(f"unknown preparation {prep!r}; expected one of {PREPS}")

    if prep == "w_gates":
        u_prep = w_gate(n).matrix.data
        u_diff = diffusion(n).matrix.data
    else:
        u_prep = _tensor_power(gate("H").matrix.data, n)
        x = _tensor_power(gate("X").matrix.data, n)
        cp = oracle(n, 2 ** n - 1).matrix.data
        u_diff = -u_prep @ x @ cp @ x @ u_prep
    u_oracle = oracle(n, marked).matrix.data

    psi = u_prep @ _zero(n)
    amplitudes = [psi]
    probs = [float(abs(psi[marked]) ** 2)]
    for _ in range(iterations):
        psi = u_diff @ (u_oracle @ psi)
        amplitudes.append(psi)
        probs.append(float(abs(psi[marked]) ** 2))
    return GroverRun(
        n=n,
        marked=marked,
        iterations=iterations,
        prep=prep,
        amplitudes_per_step=amplitudes,
        success_prob_per_step=probs,
    )


def grover_optimal_iterations(n: int) -> int:
    """round(π/(4·asin(2^{−n/2})) − ½), at least 1."""
    if n < 1:
        raise ArgumentError(f"n must be >= 1, got {n}")
    k = math.pi / (4.0 * math.asin(2.0 ** (-n / 2.0))) - 0.5
    return max(1, int(round(k)))


def grover_geometry(n: int, m_marked: int = 1) -> float:
    """
    Rotation angle θ = 2·acos(√((N − M)/N)).

    After k rounds the success probability is sin²((2k + 1)θ/2).
    """
    size = 2 ** n
    if not 1 <= m_marked < size:
        raise ArgumentError(f"m_marked must be in [1, {size}), got {m_marked}")
    return 2.0 * math.acos(math.sqrt((size - m_marked) / size))


# -------------------------------------------------------
# GROVER WITH ONE-STEP PROPAGATORS
# -------------------------------------------------------

def _propagator(n: int, b: float, h: float) -> np.ndarray:
    if n == 2:
        return two_qubit_closed_form(0.5 * b * h, 0.5 * b).data
    return three_qubit_closed_form(b, h).data


def _circuit_steps(n: int, marked: int, iterations: int) -> List[str]:
    """
    Time-ordered step names of the Grover circuit in terms of the one-step
    propagator U. Two qubits: prep σ_x U, diffusion U σ_x cP σ_x U σ_x.
    Three qubits: prep U, diffusion U cP U σ_x.
    """
    if n == 2:
        prep, diff = ["X", "U"], ["U", "X", "CP", "X", "U", "X"]
    else:
        prep, diff = ["U"], ["U", "CP", "U", "X"]
    return prep + (["ORACLE"] + diff) * iterations


def _check_register(n: int, marked: int):
    if n not in (2, 3):
        raise ArgumentError(f"propagator-based Grover runs need 2 or 3 qubits, got {n}")
    if not 0 <= marked < 2 ** n:
        raise ArgumentError(f"marked state {marked} out of range for {n} qubits")


def grover_with_propagator(n: int, marked: int, b: float, h: float, iterations: Optional[int] = None) -> StateVector:
    """Final register state when every W-type gate is the one-step propagator at (b, h)."""
    _check_register(n, marked)
    iterations = grover_optimal_iterations(n) if iterations is None else iterations
    unitaries = {
        "U": _propagator(n, b, h),
        "X": _tensor_power(gate("X").matrix.data, n),
        "CP": oracle(n, 2 ** n - 1).matrix.data,
        "ORACLE": oracle(n, marked).matrix.data,
    }
    psi = _zero(n)
    for step in _circuit_steps(n, marked, iterations):
        psi = unitaries[step] @ psi
    return StateVector(psi, (2,) * n)


def operating_b(n: int, h: float) -> float:
    """
    Smallest b = 2λt at which the one-step propagator with Ω_R/λ = h is the
    W-type gate of an n-qubit register.

    The propagator is exp(−ibh S_x)·exp(−ib S_x²), so b and h never enter
    separately. Two qubits need b an odd multiple of π with bh/π ≡ ½ (mod 1);
    three qubits need b a multiple of π with bh/π ≡ ½ (mod 2). Away from it the
    error grows like (h + 1)·|δb| per gate, which sets the width of a
    fidelity window in b.

    Raises:
        PreconditionError: no operating point within OPERATING_SEARCH multiples of π
    """
    _check_register(n, 0)
    if not h > 0:
        raise ArgumentError(f"h must be > 0, got {h}")
    period = 1.0 if n == 2 else 2.0
    for k in range(1, OPERATING_SEARCH + 1):
        if n == 2 and k % 2 == 0:
            continue
        offset = (k * h - 0.5) % period
        if min(offset, period - offset) < 1e-9 * max(1.0, k * h):
            return k * math.pi
    raise PreconditionError(
        f"Ω_R/λ = {h:g} has no {n}-qubit operating point up to b = {OPERATING_SEARCH}π"
    )


def grover_noisy_sweep(
    n: int,
    marked: Union[int, Sequence[int], None],
    b_grid: Sequence[float],
    h: float,
    iterations: Optional[int] = None,
) -> List[SweepPoint]:
    """
    Grover fidelity against the marked state over a grid of b = 2λt.

    Oracles stay ideal; only the W-type gates carry the (b, h) dependence.

    Args:
        n: 2 or 3 qubits
        marked: One marked index, a list of them, or None for every basis state
        b_grid: Values of b
        h: Ω_R/λ
        iterations: Grover rounds (default: optimal for n)

    Returns:
        Rows ordered by marked state, then by b
    """
    if not h > 0:
        raise ArgumentError(f"h must be > 0, got {h}")
    try:
        _log.debug("grover_noisy_sweep n=%d h=%g: operating b = %.6g", n, h, operating_b(n, h))
    except PreconditionError as exc:
        _log.warning("grover_noisy_sweep: %s; no b on the grid realizes the W-type gate", exc)
    grid = [float(b) for b in b_grid]
    if not all(np.isfinite(grid)):
        raise ArgumentError("b grid must be finite")
    if marked is None:
        targets = list(range(2 ** n))
    elif isinstance(marked, (int, np.integer)):
        targets = [int(marked)]
    else:
        targets = [int(m) for m in marked]

    rows = []
    for m in targets:
        _check_register(n, m)
        label = format(m, f"0{n}b")
        for b in grid:
            psi = grover_with_propagator(n, m, b, h, iterations)
            rows.append(SweepPoint(b=b, h=float(h), oracle=label, fidelity=float(abs(psi.data[m]) ** 2)))
    return rows


# -------------------------------------------------------
# GROVER THROUGH THE MASTER EQUATION
# -------------------------------------------------------

def _apply_instant(u: np.ndarray, rho: DensityMatrix, n_fock: int) -> DensityMatrix:
    full = np.kron(u, np.eye(n_fock))
    out = full @ rho.data @ full.conj().T
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(Operator(out, rho.dims), psd_tol=RECORD_PSD_TOL)


def grover_master_equation(
    n: int,
    marked: int,
    device: DeviceSpec,
    noise: NoiseSpec,
    iterations: Optional[int] = None,
    steps_per_period: Optional[int] = None,
) -> GroverMasterRun:
    """
    Grover search with each W-type gate realized as one interaction-frame
    master-equation window of the device, oracles and σ_x layers applied as
    instantaneous ideal unitaries.

    The device must sit on an operating point of the x2 (n = 2) or x3
    (n = 3) family: its Rabi frequency picks the family member and its
    detuning must equal that member's Δ_r.

    How it works:
        1. Check the device against the family operating point
        2. Pick one dt for every U window from the total driven time
        3. Walk the circuit: U windows through the solver, the rest as
           instantaneous unitaries on the qubit factor
        4. Fidelity is the marked-state population of the reduced register

    Raises:
        PreconditionError: the device detuning does not match the family
        DivergenceError: propagated from the solver
    """
    # STEP 1: Operating point
    _check_register(n, marked)
    if device.n_qubits != n:
        raise ArgumentError(f"device has {device.n_qubits} qubits, Grover run needs {n}")
    conds, _ = conditions_for_device(device, "x2" if n == 2 else "x3")
    off_detuning = abs(device.delta_r - conds.delta_r) > 1e-9 * conds.delta_r
    off_drive = abs(device.omega_rabi - conds.omega_rabi) > 1e-9 * conds.omega_rabi
    if off_detuning or off_drive:
        raise PreconditionError(
            f"device (Δ_r={device.delta_r:.6g}, Ω_R={device.omega_rabi:.6g}) is not on an "
            f"operating point of the {conds.family} family"
        )
    iterations = grover_optimal_iterations(n) if iterations is None else iterations

    # STEP 2: Step size
    def h_of_t(t):
        return hamiltonian_interaction(device, t)

    t_gate = conds.t_gate
    circuit = _circuit_steps(n, marked, iterations)
    windows = sum(1 for step in circuit if step == "U")
    dt = choose_dt(h_of_t, t_gate, steps_per_period, horizon=windows * t_gate)
    n_steps = int(np.ceil(t_gate / dt - 1e-9))
    opts = SolveOptions(t_final=t_gate, dt=t_gate / n_steps, record_every=n_steps)

    # STEP 3: Circuit
    instant = {
        "X": _tensor_power(gate("X").matrix.data, n),
        "CP": oracle(n, 2 ** n - 1).matrix.data,
        "ORACLE": oracle(n, marked).matrix.data,
    }
    rho = DensityMatrix.from_ket(tensor_states(basis_state((2,) * n, 0), basis_state(device.n_fock, 0)))
    clock = 0.0
    segments: List[Segment] = []
    traj: Optional[Trajectory] = None
    for step in circuit:
        if step == "U":
            traj = solve(h_of_t, rho, noise, opts)
            rho = traj.final_state
            segments.append(Segment(f"U_{conds.family}", clock, clock + t_gate))
            clock += t_gate
        else:
            rho = _apply_instant(instant[step], rho, device.n_fock)
            segments.append(Segment(step, clock, clock))

    # STEP 4: Score
    reduced = partial_trace(rho, range(n))
    fidelity = float(np.real(reduced.data[marked, marked]))
    _log.debug("grover_master_equation n=%d marked=%d: F=%.6f over %.4g µs", n, marked, fidelity, clock)
    return GroverMasterRun(
        n=n,
        marked=marked,
        iterations=iterations,
        fidelity=fidelity,
        segments=segments,
        trajectory=traj,
    )


# -------------------------------------------------------
# DEUTSCH–JOZSA
# -------------------------------------------------------

def _truth_table(n: int, f: Union[Sequence[int], Callable[[int], int]]) -> List[int]:
    table = [int(f(x)) for x in range(2 ** n)] if callable(f) else [int(v) for v in f]
    if len(table) != 2 ** n:
        raise ArgumentError(f"truth table needs {2 ** n} entries, got {len(table)}")
    if set(table) - {0, 1}:
        raise ArgumentError("f must map into {0, 1}")
    ones = sum(table)
    if ones not in (0, 2 ** n, 2 ** (n - 1)):
        raise ArgumentError(f"f is neither constant nor balanced ({ones} ones out of {2 ** n})")
    return table


def oracle_f(n: int, table: Sequence[int]) -> GateSpec:
    """U_f|x>|y> = |x>|y ⊕ f(x)> on n register qubits plus the ancilla (last)."""
    size = 2 ** (n + 1)
    m = np.zeros((size, size))
    for x, fx in enumerate(table):
        for y in (0, 1):
            m[2 * x + (y ^ fx), 2 * x + y] = 1.0
    return GateSpec("U_f", tuple(range(n + 1)), Operator(m, (2,) * (n + 1)))


def deutsch_jozsa(n: int, f: Union[Sequence[int], Callable[[int], int]]) -> DeutschJozsaResult:
    """
    Decide whether f is constant or balanced with one query.

    Runs |0>^n|1> → H^{⊗(n+1)} → U_f → H^{⊗n} ⊗ I and reads the probability of
    the all-zeros register.

    Raises:
        ArgumentError: f is neither constant nor balanced
    """
    if n < 1:
        raise ArgumentError(f"n must be >= 1, got {n}")
    table = _truth_table(n, f)
    circuit = [gate("H", qubits=(q,)) for q in range(n + 1)]
    circuit.append(oracle_f(n, table))
    circuit += [gate("H", qubits=(q,)) for q in range(n)]
    start = basis_state((2,) * (n + 1), 1)
    final = apply_circuit(circuit, start)
    register = np.abs(final.data.reshape(2 ** n, 2)) ** 2
    p_zero = float(register[0].sum())
    kind = "constant" if abs(p_zero - 1.0) < 1e-9 else "balanced"
    return DeutschJozsaResult(n=n, kind=kind, p_zero=p_zero, amplitudes=np.array(final.data))


def register_probabilities(result: DeutschJozsaResult) -> np.ndarray:
    """Register outcome probabilities with the ancilla traced out."""
    return (np.abs(result.amplitudes.reshape(2 ** result.n, 2)) ** 2).sum(axis=1)
