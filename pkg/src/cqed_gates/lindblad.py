"""
Open-system dynamics.

Lindblad right-hand side, a fixed-step fourth-order Runge–Kutta integrator for
time-dependent Hamiltonians, occupation probabilities, and the gate-level
studies built on top of them (single gate, repeated gates, decoherence error,
Fock-truncation convergence).

Each step of the integrator is followed by re-Hermitization (ρ + ρ†)/2 and
trace renormalization. The corrections are tracked and reported on the
returned Trajectory instead of being silently absorbed.
"""

import logging
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import ArgumentError, DivergenceError, NumericalMethodError, PreconditionError
from .model import (
    closed_form,
    effective_to_interaction,
    hamiltonian_effective,
    hamiltonian_interaction,
    hamiltonian_lab,
    interaction_to_effective,
    qubit_z,
    to_interaction_frame,
)
from .models import DeviceSpec, GateConditions, NoiseSpec, SolveOptions, Trajectory
from .qcore import (
    DensityMatrix,
    Operator,
    StateVector,
    annihilation,
    basis_state,
    embed,
    fidelity_pure,
    partial_trace,
    sigma_minus,
    tensor_states,
)

_log = logging.getLogger(__name__)

HamiltonianFn = Callable[[float], Union[Operator, np.ndarray]]


# -------------------------------------------------------
# CONSTANTS
# -------------------------------------------------------

# dt must resolve the fastest frequency with at least this many steps
MIN_STEPS_PER_PERIOD = 20

# Bound on the estimated global RK4 error of a solve when the library picks dt
ACCURACY_TARGET = 1e-8

# Positivity tolerance for recorded states
RECORD_PSD_TOL = 1e-7

DEFAULT_N_FOCK = 10

FIDELITY_MODES = ("project", "trace")


# -------------------------------------------------------
# COLLAPSE OPERATORS AND GENERATOR
# -------------------------------------------------------

def collapse_operators_for(n_qubits: int, n_fock: Optional[int], noise: NoiseSpec) -> List[Operator]:
    """
    [√κ a] ++ [√γ₁ʲ σ₋ʲ] ++ [√γ_φʲ σ_zʲ], embedded on qubits (⊗ resonator).

    Zero rates contribute no operator. ``n_fock=None`` means there is no
    resonator factor, in which case κ must be zero.
    """
    dims = (2,) * n_qubits + ((n_fock,) if n_fock else ())
    ops: List[Operator] = []
    if noise.kappa > 0:
        if not n_fock:
            raise ArgumentError("κ > 0 needs a resonator in the Hilbert space")
        ops.append(np.sqrt(noise.kappa) * embed(annihilation(n_fock), n_qubits, dims))
    for j, rate in enumerate(noise.per_qubit("gamma1", n_qubits)):
        if rate > 0:
            ops.append(np.sqrt(rate) * embed(sigma_minus(), j, dims))
    for j, rate in enumerate(noise.per_qubit("gamma_phi", n_qubits)):
        if rate > 0:
            ops.append(np.sqrt(rate) * embed(qubit_z(), j, dims))
    return ops


def collapse_operators(spec: DeviceSpec, noise: NoiseSpec) -> List[Operator]:
    return collapse_operators_for(spec.n_qubits, spec.n_fock, noise)


class _Generator:
    """Lindblad generator with the anticommutator folded into H_eff = H − (i/2)ΣL†L."""

    def __init__(self, collapse: Sequence[Operator], dim: int):
        self.jumps = [(c.data, c.data.conj().T) for c in collapse]
        self.decay = np.zeros((dim, dim), dtype=complex)
        for c, cd in self.jumps:
            self.decay += cd @ c

    def __call__(self, h: np.ndarray, rho: np.ndarray) -> np.ndarray:
        h_eff = h - 0.5j * self.decay
        out = -1j * (h_eff @ rho - rho @ h_eff.conj().T)
        for c, cd in self.jumps:
            out += c @ rho @ cd
        return out


def lindblad_rhs(h: Operator, rho: DensityMatrix, cs: Sequence[Operator]) -> np.ndarray:
    """dρ/dt = −i[H, ρ] + Σ (LρL† − ½L†Lρ − ½ρL†L)."""
    if h.dims != rho.dims or any(c.dims != rho.dims for c in cs):
        raise ArgumentError("Hamiltonian, state and collapse operators must share dims")
    return _Generator(cs, h.dim)(h.data, rho.data)


# -------------------------------------------------------
# INTEGRATOR
# -------------------------------------------------------

def _as_array(h) -> np.ndarray:
    return h.data if isinstance(h, Operator) else np.asarray(h, dtype=complex)


def fastest_frequency(h_of_t: HamiltonianFn, t_final: float) -> float:
    """Spectral width of H sampled at a few times: the fastest frequency in ρ(t)."""
    width = 0.0
    for t in (0.0, 0.25 * t_final, 0.5 * t_final):
        w = np.linalg.eigvalsh(_as_array(h_of_t(t)))
        width = max(width, float(w[-1] - w[0]))
    return width


def choose_dt(
    h_of_t: HamiltonianFn,
    t_final: float,
    steps_per_period: Optional[int] = None,
    horizon: Optional[float] = None,
    tol: float = ACCURACY_TARGET,
) -> float:
    """
    Step size for a solve over [0, t_final].

    How it works:
        1. ω = spectral width of H, the fastest frequency in ρ(t)
        2. With ``steps_per_period`` the step is 2π/(steps_per_period·ω)
        3. Otherwise each RK4 step misses the (ω dt)⁵/120 term of the exact
           propagator, so over ``horizon`` (default t_final) the error is
           about ω·horizon·(ω dt)⁴/120; dt is the largest step keeping that
           below ``tol``
        4. Never coarser than MIN_STEPS_PER_PERIOD steps per period

    ``horizon`` covers runs chained over several windows (repeated gates,
    Grover iterations) whose errors accumulate.
    """
    width = fastest_frequency(h_of_t, t_final)
    if width == 0.0:
        return t_final / (steps_per_period or MIN_STEPS_PER_PERIOD)
    if steps_per_period:
        return min(t_final, 2 * np.pi / (steps_per_period * width))

    horizon = max(horizon or t_final, t_final)
    phase = (120.0 * tol / (width * horizon)) ** 0.25
    phase = min(phase, 2 * np.pi / MIN_STEPS_PER_PERIOD)
    dt = min(t_final, phase / width)
    _log.debug("choose_dt: ω = %.3g rad/µs, horizon %.3g µs, %.0f steps per period", width, horizon, 2 * np.pi / phase)
    return dt


def solve(
    h_of_t: HamiltonianFn,
    rho0: DensityMatrix,
    noise: Union[NoiseSpec, Sequence[Operator], None],
    opts: SolveOptions,
    e_ops: Optional[Dict[str, Operator]] = None,
) -> Trajectory:
    """
    Integrate the master equation from ρ0 over [0, t_final].

    Args:
        h_of_t: Reentrant callback returning H(t) (Operator or ndarray)
        rho0: Initial state
        noise: NoiseSpec (collapse operators built from rho0.dims), an explicit
               list of collapse operators, or None
        opts: Step size, duration, recording stride
        e_ops: Optional named observables recorded as Re Tr(Oρ)

    Returns:
        Trajectory with the initial state, every ``record_every``-th state
        and the final state.

    How it works:
        1. Collapse operators come from the NoiseSpec (or are given)
        2. Classical RK4 with H sampled at t, t + dt/2 and t + dt
        3. After each step the skew part is removed and the trace reset to 1;
           both corrections are tracked
        4. Recorded states must be density matrices within RECORD_PSD_TOL

    Raises:
        DivergenceError: the state became non-finite
        NumericalMethodError: a recorded state lost positivity
    """
    # STEP 1: Collapse operators
    dims = rho0.dims
    if noise is None:
        collapse: List[Operator] = []
    elif isinstance(noise, NoiseSpec):
        n_qubits = len(dims) - (1 if opts.resonator else 0)
        n_fock = dims[-1] if opts.resonator else None
        collapse = collapse_operators_for(n_qubits, n_fock, noise)
    else:
        collapse = list(noise)

    n_steps = opts.n_steps
    dt = opts.t_final / n_steps

    width = fastest_frequency(h_of_t, opts.t_final)
    if width > 0 and dt > 2 * np.pi / (MIN_STEPS_PER_PERIOD * width):
        _log.warning(
            "dt = %.3g does not resolve the fastest frequency %.3g rad/µs (limit %.3g)",
            dt, width, 2 * np.pi / (MIN_STEPS_PER_PERIOD * width),
        )

    # STEP 2: Integrate
    generator = _Generator(collapse, rho0.op.dim)
    e_ops = dict(e_ops or {})
    rho = np.array(rho0.data, dtype=complex)

    times = [0.0]
    states = [rho0]
    series: Dict[str, List[float]] = {name: [_expect(op, rho)] for name, op in e_ops.items()}
    max_drift = 0.0
    max_herm = 0.0

    h_now = _as_array(h_of_t(0.0))
    if h_now.shape != rho.shape:
        raise ArgumentError(f"Hamiltonian shape {h_now.shape} does not match state shape {rho.shape}")
    for step in range(n_steps):
        t = step * dt
        h_mid = _as_array(h_of_t(t + 0.5 * dt))
        h_next = _as_array(h_of_t(t + dt))

        k1 = generator(h_now, rho)
        k2 = generator(h_mid, rho + 0.5 * dt * k1)
        k3 = generator(h_mid, rho + 0.5 * dt * k2)
        k4 = generator(h_next, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        h_now = h_next

        if not np.all(np.isfinite(rho)):
            raise DivergenceError("master-equation state became non-finite", step)

        skew = 0.5 * (rho - rho.conj().T)
        max_herm = max(max_herm, float(np.max(np.abs(skew))))
        rho = rho - skew
        trace = float(np.real(np.trace(rho)))
        max_drift = max(max_drift, abs(trace - 1.0))
        rho = rho / trace

        if (step + 1) % opts.record_every == 0 or step == n_steps - 1:
            try:
                state = DensityMatrix(Operator(rho, dims), psd_tol=RECORD_PSD_TOL)
            except ArgumentError as exc:
                raise NumericalMethodError(f"state at step {step} is not a density matrix: {exc}") from exc
            times.append((step + 1) * dt)
            states.append(state)
            for name, op in e_ops.items():
                series[name].append(_expect(op, rho))

    # STEP 3: Report corrections
    _log.debug(
        "solve: %d steps of %.3g, max trace drift %.2e, max Hermiticity correction %.2e",
        n_steps, dt, max_drift, max_herm,
    )
    return Trajectory(
        times=np.array(times),
        states=states,
        observables={name: np.array(values) for name, values in series.items()},
        max_trace_drift=max_drift,
        max_hermiticity_correction=max_herm,
        steps=n_steps,
    )


def _expect(op: Operator, rho: np.ndarray) -> float:
    return float(np.real(np.trace(op.data @ rho)))


# -------------------------------------------------------
# OBSERVABLES
# -------------------------------------------------------

def _check_labels(labels: Sequence[str], n_qubits: int):
    for label in labels:
        if len(label) != n_qubits or set(label) - {"0", "1"}:
            raise ArgumentError(f"bad basis label {label!r} for {n_qubits} qubits")


def qubit_populations(rho: np.ndarray, n_qubits: int, resonator: bool = True) -> np.ndarray:
    """Computational-basis populations of the qubit register, resonator traced out."""
    diag = np.real(np.diag(rho))
    if resonator:
        diag = diag.reshape(2 ** n_qubits, -1).sum(axis=1)
    return diag


def occupations(
    traj: Trajectory,
    labels: Sequence[str],
    resonator: bool = True,
) -> Dict[str, np.ndarray]:
    """
    P_label(t) = <label| Tr_r ρ(t) |label> for each computational-basis label.

    Raises:
        ArgumentError: a label is not a bit string of the register length
    """
    dims = traj.states[0].dims
    n_qubits = len(dims) - (1 if resonator else 0)
    _check_labels(labels, n_qubits)
    table = np.array([qubit_populations(s.data, n_qubits, resonator) for s in traj.states])
    return {label: table[:, int(label, 2)] for label in labels}


def all_labels(n_qubits: int) -> List[str]:
    return [format(i, f"0{n_qubits}b") for i in range(2 ** n_qubits)]


def rotating_occupations(spec: DeviceSpec, traj: Trajectory, labels: Sequence[str]) -> Dict[str, np.ndarray]:
    """
    Occupations of interaction-frame states viewed in the frame co-rotating
    with the collective drive (e^{iH₀t} ρ e^{−iH₀t}); the fast Rabi rotation is
    removed and the slow S_x² dynamics is left.
    """
    _check_labels(labels, spec.n_qubits)
    rows = []
    for t, state in zip(traj.times, traj.states):
        rotated = interaction_to_effective(spec, state, float(t))
        rows.append(qubit_populations(rotated.data, spec.n_qubits))
    table = np.array(rows)
    return {label: table[:, int(label, 2)] for label in labels}


# -------------------------------------------------------
# GATE SCENARIOS
# -------------------------------------------------------

@dataclass(frozen=True)
class GateScenario:
    """
    One-step gate driven on the full qubits ⊗ resonator system.

    Attributes:
        conds: Operating point (resolve_conditions output)
        noise: Dissipation rates
        n_fock: Resonator truncation
        frame: "interaction" (default), "lab" or "effective" (noiseless only)
        initial_qubits: Bit string for the starting qubit register
        fock: Initial resonator Fock state
        fidelity_mode: "project" onto target ⊗ |fock> or "trace" the resonator out
        steps_per_period: Fixed integrator resolution of the fastest frequency;
            None picks dt from ACCURACY_TARGET
        omega_q: Qubit frequency used for lab-frame runs
    """
    conds: GateConditions
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    n_fock: int = DEFAULT_N_FOCK
    frame: str = "interaction"
    initial_qubits: str = ""
    fock: int = 0
    fidelity_mode: str = "project"
    steps_per_period: Optional[int] = None
    omega_q: float = 2 * np.pi * 4800.0

    def __post_init__(self):
        if self.fidelity_mode not in FIDELITY_MODES:
            raise ArgumentError(f"unknown fidelity mode {self.fidelity_mode!r}")
        if not 0 <= self.fock < self.n_fock:
            raise ArgumentError(f"Fock state {self.fock} outside truncation {self.n_fock}")
        if self.frame == "effective" and not self.noise.is_noiseless:
            raise PreconditionError("the effective frame supports closed-system runs only")
        if self.initial_qubits:
            _check_labels([self.initial_qubits], self.conds.n_qubits)

    @property
    def device(self) -> DeviceSpec:
        return self.conds.device(n_fock=self.n_fock, omega_q=self.omega_q)

    @property
    def qubit_label(self) -> str:
        return self.initial_qubits or "0" * self.conds.n_qubits

    def replace(self, **changes) -> "GateScenario":
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return GateScenario(**values)


@dataclass
class GateRun:
    """Fidelity after each gate plus the trajectory of the last gate window."""
    fidelities: List[float]
    trajectory: Trajectory
    final_state: DensityMatrix


def _frame_hamiltonian(spec: DeviceSpec, frame: str) -> HamiltonianFn:
    if frame == "interaction":
        return partial(hamiltonian_interaction, spec)
    if frame == "effective":
        return partial(hamiltonian_effective, spec)
    if frame == "lab":
        return partial(hamiltonian_lab, spec)
    raise ArgumentError(f"unknown frame {frame!r}")


def _to_interaction(spec: DeviceSpec, frame: str, state: DensityMatrix, t: float) -> DensityMatrix:
    if frame == "lab":
        return to_interaction_frame(spec, state, t)
    if frame == "effective":
        return effective_to_interaction(spec, state, t)
    return state


def initial_state(scenario: GateScenario) -> DensityMatrix:
    n = scenario.conds.n_qubits
    qubits = basis_state((2,) * n, int(scenario.qubit_label, 2))
    photon = basis_state(scenario.n_fock, scenario.fock)
    return DensityMatrix.from_ket(tensor_states(qubits, photon))


def gate_fidelity(
    scenario: GateScenario,
    state_i: DensityMatrix,
    target: StateVector,
) -> float:
    """Fidelity of an interaction-frame state against an ideal qubit-register target."""
    if scenario.fidelity_mode == "trace":
        reduced = partial_trace(state_i, range(scenario.conds.n_qubits))
        return fidelity_pure(target, reduced)
    photon = basis_state(scenario.n_fock, scenario.fock)
    return fidelity_pure(tensor_states(target, photon), state_i)


def run_gate(
    scenario: GateScenario,
    n_gates: int = 1,
    record_every: Optional[int] = None,
    e_ops: Optional[Dict[str, Operator]] = None,
) -> GateRun:
    """
    Drive ``n_gates`` consecutive gate windows and score each against the
    closed-form prediction U_I^k |ψ0>.

    The Hamiltonian runs in continuous time, so lab-frame runs keep their
    drive phase across windows.

    How it works:
        1. One dt for all windows, sized from the total driven time
        2. Each window is one solve from the previous window's final state
        3. The state is mapped to the interaction frame and scored against
           U_I^k applied to the initial register
    """
    # STEP 1: Step size
    if n_gates < 1:
        raise ArgumentError(f"n_gates must be >= 1, got {n_gates}")
    spec = scenario.device
    conds = scenario.conds
    h_of_t = _frame_hamiltonian(spec, scenario.frame)
    t_gate = conds.t_gate
    dt = choose_dt(h_of_t, t_gate, scenario.steps_per_period, horizon=n_gates * t_gate)
    n_steps = int(np.ceil(t_gate / dt - 1e-9))
    stride = record_every or n_steps

    u_gate = closed_form(conds)
    target = basis_state((2,) * conds.n_qubits, int(scenario.qubit_label, 2))

    # STEP 2: Gate windows
    state = initial_state(scenario)
    fidelities: List[float] = []
    traj: Optional[Trajectory] = None
    for k in range(n_gates):
        t0 = k * t_gate
        shifted = (lambda t, _t0=t0: h_of_t(t + _t0)) if scenario.frame == "lab" else h_of_t
        opts = SolveOptions(t_final=t_gate, dt=t_gate / n_steps, record_every=stride, frame=scenario.frame)
        traj = solve(shifted, state, scenario.noise, opts, e_ops=e_ops)
        state = traj.final_state
        target = u_gate @ target
        in_frame = _to_interaction(spec, scenario.frame, state, t0 + t_gate)
        fidelities.append(gate_fidelity(scenario, in_frame, target))

    _log.debug("run_gate %s: fidelities %s", conds.family, fidelities)
    return GateRun(fidelities=fidelities, trajectory=traj, final_state=state)


def propagate_gate(scenario: GateScenario, rho0: DensityMatrix) -> DensityMatrix:
    """One gate window from ``rho0`` (qubits ⊗ resonator); the result is in the interaction frame."""
    spec = scenario.device
    if rho0.dims != spec.dims:
        raise ArgumentError(f"state dims {rho0.dims} do not match device dims {spec.dims}")
    h_of_t = _frame_hamiltonian(spec, scenario.frame)
    t_gate = scenario.conds.t_gate
    dt = choose_dt(h_of_t, t_gate, scenario.steps_per_period)
    n_steps = int(np.ceil(t_gate / dt - 1e-9))
    opts = SolveOptions(t_final=t_gate, dt=t_gate / n_steps, record_every=n_steps, frame=scenario.frame)
    traj = solve(h_of_t, rho0, scenario.noise, opts)
    return _to_interaction(spec, scenario.frame, traj.final_state, t_gate)


def repeated_gate_fidelity(scenario: GateScenario, n_gates: int, with_noise: bool = True) -> List[float]:
    """
    Fidelity after each of ``n_gates`` sequential gates.

    ``with_noise=False`` runs the same master-equation path with every rate
    zeroed, so what is left is the coherent error of the driven
    qubits ⊗ resonator system (residual photon entanglement, RWA terms).
    """
    if n_gates < 1:
        raise ArgumentError(f"n_gates must be >= 1, got {n_gates}")
    if not with_noise:
        scenario = scenario.replace(noise=NoiseSpec())
    return run_gate(scenario, n_gates).fidelities


def decoherence_error(scenario: GateScenario) -> float:
    """F(master equation without noise) − F(master equation with noise) for a single gate."""
    clean = repeated_gate_fidelity(scenario, 1, with_noise=False)[0]
    noisy = run_gate(scenario, 1).fidelities[0]
    return clean - noisy


def fock_convergence(scenario: GateScenario, extra: int = 4) -> Tuple[float, float, float]:
    """
    Re-run a single gate with ``extra`` more Fock levels.

    Returns:
        (fidelity at n_fock, fidelity at n_fock + extra, absolute shift)
    """
    base = run_gate(scenario).fidelities[0]
    more = run_gate(scenario.replace(n_fock=scenario.n_fock + extra)).fidelities[0]
    shift = abs(more - base)
    _log.info("Fock convergence n=%d→%d: shift %.2e", scenario.n_fock, scenario.n_fock + extra, shift)
    return base, more, shift


def noise_from_coherence(t1: float, t2: float, kappa: float = 0.0) -> NoiseSpec:
    return NoiseSpec.from_coherence(t1, t2, kappa)


def noise_from_tc(tc: float, kappa: float = 0.0) -> NoiseSpec:
    return NoiseSpec.from_tc(tc, kappa)
