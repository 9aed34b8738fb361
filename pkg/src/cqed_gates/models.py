"""
Data models for the cQED gate toolkit.

Parameter records (device, noise, solver options, scenario config) and result
records (trajectories, Grover runs, process matrices) are plain dataclasses.
Each validates its invariants in ``__post_init__`` and offers ``to_dict()``
for JSON serialization through orjson.

Units: every frequency-like field is an angular frequency in rad/µs and
every time is in µs. The CLI layer converts from the f = ω/2π values that
configs are written in.
"""

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import ArgumentError, SingularityError
from .qcore import DensityMatrix, Operator, Y_CONVENTIONS, Y_MINUS_I, pauli_labels

FRAMES = ("lab", "interaction", "effective")
FAMILIES = ("x2", "ent2", "x3", "ent3")


def _complex_pairs(matrix: np.ndarray) -> List[List[List[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in matrix]


# -------------------------------------------------------
# DEVICE PHYSICS
# -------------------------------------------------------

@dataclass(frozen=True)
class CpbParams:
    """
    Cooper-pair box in the charge basis.

    Attributes:
        e_c: Single-electron charging energy e²/2C (rad/µs). The charge-basis
             diagonal is 4·e_c·(N − N_g)²
        e_j: Josephson energy (rad/µs)
        n_g: Dimensionless gate charge
        charge_cutoff: Charge states run over N ∈ [−cutoff, +cutoff]

    Example:
        transmon = CpbParams(e_c=1.0, e_j=50.0, n_g=0.5)
    """
    e_c: float
    e_j: float
    n_g: float = 0.0
    charge_cutoff: int = 15

    def __post_init__(self):
        if not self.e_c > 0:
            raise ArgumentError(f"e_c must be > 0, got {self.e_c}")
        if self.e_j < 0:
            raise ArgumentError(f"e_j must be >= 0, got {self.e_j}")
        if self.charge_cutoff < 2:
            raise ArgumentError(f"charge_cutoff must be >= 2, got {self.charge_cutoff}")

    @property
    def ratio(self) -> float:
        return self.e_j / self.e_c

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class FluxSpec:
    """Symmetric SQUID: maximal Josephson energy and reduced external flux Φ_ext/Φ₀."""
    e_j_max: float
    phi_ratio: float = 0.0

    def __post_init__(self):
        if not self.e_j_max > 0:
            raise ArgumentError(f"e_j_max must be > 0, got {self.e_j_max}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DeviceSpec:
    """
    N identical transmons coupled to one driven resonator.

    Attributes:
        n_qubits: Number of qubits (≥ 1)
        n_fock: Resonator Fock-space truncation (≥ 2)
        omega_r: Resonator frequency
        omega_q: Qubit frequency, shared by all qubits
        g: Qubit–resonator coupling
        omega_d: Drive frequency
        omega_rabi: Rabi frequency Ω_R of the effective qubit drive

    Derived, read-only:
        delta_r: ω_d − ω_r (the resonator sits Δ_r below the drive)
        lam: λ = g²/(2Δ_r), the resonator-mediated qubit–qubit coupling

    Example:
        spec = DeviceSpec.from_detuning(n_qubits=2, g=2*pi*40, delta_r=2*pi*80,
                                        omega_rabi=2*pi*180)
    """
    n_qubits: int
    n_fock: int
    omega_r: float
    omega_q: float
    g: float
    omega_d: float
    omega_rabi: float

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ArgumentError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if self.n_fock < 2:
            raise ArgumentError(f"n_fock must be >= 2, got {self.n_fock}")
        for name in ("omega_r", "omega_q", "omega_d"):
            if not getattr(self, name) > 0:
                raise ArgumentError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in ("g", "omega_rabi"):
            if getattr(self, name) < 0:
                raise ArgumentError(f"{name} must be >= 0, got {getattr(self, name)}")

    @classmethod
    def from_detuning(
        cls,
        n_qubits: int,
        g: float,
        delta_r: float,
        omega_rabi: float,
        n_fock: int = 10,
        omega_q: float = 2 * np.pi * 4800.0,
    ) -> "DeviceSpec":
        """Build a resonantly driven device (ω_d = ω_q) with ω_r = ω_q − Δ_r."""
        return cls(
            n_qubits=n_qubits,
            n_fock=n_fock,
            omega_r=omega_q - delta_r,
            omega_q=omega_q,
            g=g,
            omega_d=omega_q,
            omega_rabi=omega_rabi,
        )

    @property
    def delta_r(self) -> float:
        return self.omega_d - self.omega_r

    @property
    def lam(self) -> float:
        if self.delta_r == 0:
            raise SingularityError("λ = g²/(2Δ_r) is singular at Δ_r = 0")
        return self.g ** 2 / (2.0 * self.delta_r)

    @property
    def dims(self) -> Tuple[int, ...]:
        return (2,) * self.n_qubits + (self.n_fock,)

    @property
    def qubit_dims(self) -> Tuple[int, ...]:
        return (2,) * self.n_qubits

    def replace(self, **changes) -> "DeviceSpec":
        values = asdict(self)
        values.update(changes)
        return DeviceSpec(**values)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["delta_r"] = self.delta_r
        data["lam"] = self.lam if self.delta_r != 0 else None
        return data


@dataclass(frozen=True)
class GateConditions:
    """
    A consistent operating point for one of the one-step gate families.

    Attributes:
        family: One of "x2", "ent2", "x3", "ent3"
        integer_index: The integer labelling the member of the condition family
        g: Coupling used to solve the conditions
        delta_r: Resonator detuning Δ_r (Δ_r·t_gate = 2π)
        lam: λ = g²/(2Δ_r)
        t_gate: Gate time
        omega_rabi: Rabi frequency Ω_R
        b: 2λ·t_gate
        h: Ω_R/λ
    """
    family: str
    integer_index: int
    g: float
    delta_r: float
    lam: float
    t_gate: float
    omega_rabi: float
    b: float
    h: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ArgumentError(f"unknown gate family {self.family!r}; expected one of {FAMILIES}")
        if not self.lam > 0:
            raise ArgumentError(f"lambda must be > 0, got {self.lam}")
        if not self.t_gate > 0:
            raise ArgumentError(f"t_gate must be > 0, got {self.t_gate}")
        if abs(self.b - 2.0 * self.lam * self.t_gate) > 1e-12 * max(1.0, abs(self.b)):
            raise ArgumentError("b must equal 2·lambda·t_gate")

    @property
    def n_qubits(self) -> int:
        return 2 if self.family.endswith("2") else 3

    def device(self, n_fock: int = 10, omega_q: float = 2 * np.pi * 4800.0) -> DeviceSpec:
        return DeviceSpec.from_detuning(
            n_qubits=self.n_qubits,
            g=self.g,
            delta_r=self.delta_r,
            omega_rabi=self.omega_rabi,
            n_fock=n_fock,
            omega_q=omega_q,
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ValidityReport:
    """Strong-driving ratios 2Ω_R/g and 2Ω_R/Δ_r for an operating point."""
    ratio_g: float
    ratio_delta: float
    threshold: float

    @property
    def strong_driving(self) -> bool:
        return self.ratio_g >= self.threshold and self.ratio_delta >= self.threshold

    def violations(self) -> List[str]:
        out = []
        if self.ratio_g < self.threshold:
            out.append(f"2Ω_R/g = {self.ratio_g:.3f} below strong-driving threshold {self.threshold}")
        if self.ratio_delta < self.threshold:
            out.append(f"2Ω_R/Δ_r = {self.ratio_delta:.3f} below strong-driving threshold {self.threshold}")
        return out

    def to_dict(self) -> dict:
        data = asdict(self)
        data["strong_driving"] = self.strong_driving
        return data


# -------------------------------------------------------
# DISSIPATION AND SOLVER SETTINGS
# -------------------------------------------------------

RateList = Union[float, Tuple[float, ...]]


@dataclass(frozen=True)
class NoiseSpec:
    """
    Dissipation rates entering the Lindblad equation.

    ``gamma1`` and ``gamma_phi`` are either a scalar broadcast to every qubit
    or one value per qubit.

    Example:
        noise = NoiseSpec.from_coherence(t1=95.0, t2=70.0, kappa=2*pi*1.5)
    """
    kappa: float = 0.0
    gamma1: RateList = 0.0
    gamma_phi: RateList = 0.0

    def __post_init__(self):
        if self.kappa < 0:
            raise ArgumentError(f"kappa must be >= 0, got {self.kappa}")
        for name in ("gamma1", "gamma_phi"):
            value = getattr(self, name)
            if not np.isscalar(value):
                value = tuple(float(v) for v in value)
                object.__setattr__(self, name, value)
            if np.min(value) < 0:
                raise ArgumentError(f"{name} rates must be >= 0, got {value}")

    @classmethod
    def from_coherence(cls, t1: float, t2: float, kappa: float = 0.0) -> "NoiseSpec":
        """
        γ₁ = 1/T₁ and γ_φ = 1/T₁ − 1/(2T₂).

        T₂ above 2T₁ would need a negative pure-dephasing rate
        (1/T₂ − 1/(2T₁) < 0) and is rejected along with a negative γ_φ.
        """
        if not (t1 > 0 and t2 > 0):
            raise ArgumentError(f"T1 and T2 must be > 0, got T1={t1}, T2={t2}")
        if t2 > 2.0 * t1:
            raise ArgumentError(
                f"T2={t2} exceeds 2*T1={2.0 * t1}: negative dephasing rate 1/T2 - 1/(2 T1)"
            )
        gamma1 = 1.0 / t1
        gamma_phi = 1.0 / t1 - 1.0 / (2.0 * t2)
        if gamma_phi < 0:
            raise ArgumentError(
                f"T1={t1}, T2={t2} gives negative dephasing rate γ_φ = {gamma_phi:.4g}"
            )
        return cls(kappa=kappa, gamma1=gamma1, gamma_phi=gamma_phi)

    @classmethod
    def from_tc(cls, tc: float, kappa: float = 0.0) -> "NoiseSpec":
        """T_c = T₁ = T₂: γ₁ = 1/T_c and γ_φ = 1/(2T_c)."""
        return cls.from_coherence(tc, tc, kappa)

    def per_qubit(self, name: str, n_qubits: int) -> Tuple[float, ...]:
        value = getattr(self, name)
        if np.isscalar(value):
            return (float(value),) * n_qubits
        if len(value) != n_qubits:
            raise ArgumentError(f"{name} has {len(value)} entries for {n_qubits} qubits")
        return tuple(value)

    @property
    def is_noiseless(self) -> bool:
        return self.kappa == 0 and np.max(self.gamma1) == 0 and np.max(self.gamma_phi) == 0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SolveOptions:
    """
    Fixed-step integration settings.

    Attributes:
        t_final: Duration of the solve
        dt: Requested step; shrunk so an integer number of steps ends at t_final
        record_every: Store every k-th state (the final state is always stored)
        frame: "lab", "interaction" or "effective" (bookkeeping for callers)
        resonator: Whether the last subsystem is the resonator
    """
    t_final: float
    dt: float
    record_every: int = 1
    frame: str = "interaction"
    resonator: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ArgumentError(f"dt must be > 0, got {self.dt}")
        if self.t_final < self.dt:
            raise ArgumentError(f"t_final ({self.t_final}) must be >= dt ({self.dt})")
        if self.record_every < 1:
            raise ArgumentError(f"record_every must be >= 1, got {self.record_every}")
        if self.frame not in FRAMES:
            raise ArgumentError(f"unknown frame {self.frame!r}; expected one of {FRAMES}")

    @property
    def n_steps(self) -> int:
        return max(1, int(np.ceil(self.t_final / self.dt - 1e-9)))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Trajectory:
    """
    Output of a master-equation solve.

    Attributes:
        times: Strictly increasing sample times
        states: Density matrix at each sample time
        observables: Named real series aligned with ``times``
        max_trace_drift: Largest |Tr ρ − 1| seen before renormalization
        max_hermiticity_correction: Largest entry removed by re-Hermitizing
        steps: Number of integration steps taken
    """
    times: np.ndarray
    states: List[DensityMatrix]
    observables: Dict[str, np.ndarray] = field(default_factory=dict)
    max_trace_drift: float = 0.0
    max_hermiticity_correction: float = 0.0
    steps: int = 0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.states):
            raise ArgumentError("times and states must have equal length")
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ArgumentError("trajectory times must be strictly increasing")

    @property
    def final_state(self) -> DensityMatrix:
        return self.states[-1]

    @property
    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue over every recorded state."""
        return min(float(np.linalg.eigvalsh(s.data)[0]) for s in self.states)

    def to_dict(self) -> dict:
        return {
            "times": self.times.tolist(),
            "observables": {k: np.asarray(v).tolist() for k, v in self.observables.items()},
            "max_trace_drift": self.max_trace_drift,
            "max_hermiticity_correction": self.max_hermiticity_correction,
            "steps": self.steps,
        }


# -------------------------------------------------------
# GATES, ALGORITHMS, TOMOGRAPHY
# -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GateSpec:
    """
    A named unitary acting on an ordered list of qubits.

    Example:
        cnot = GateSpec("CNOT", (0, 1), Operator(matrix, (2, 2)))
    """
    name: str
    qubits: Tuple[int, ...]
    matrix: Operator
    params: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.matrix.dim != 2 ** len(self.qubits):
            raise ArgumentError(
                f"gate {self.name}: matrix dimension {self.matrix.dim} does not match "
                f"{len(self.qubits)} qubits"
            )
        if not self.matrix.is_unitary(1e-10):
            raise ArgumentError(f"gate {self.name} is not unitary")

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "qubits": list(self.qubits),
            "params": list(self.params),
            "dims": list(self.matrix.dims),
            "matrix": _complex_pairs(self.matrix.data),
        }


@dataclass
class GroverRun:
    """
    Amplitudes and success probability after each Grover round.

    Index 0 of both lists is the prepared state before any round.
    """
    n: int
    marked: int
    iterations: int
    prep: str
    amplitudes_per_step: List[np.ndarray]
    success_prob_per_step: List[float]

    def __post_init__(self):
        for amps in self.amplitudes_per_step:
            if abs(np.linalg.norm(amps) - 1.0) > 1e-12:
                raise ArgumentError("Grover amplitude vector is not normalized")
        for p in self.success_prob_per_step:
            if not -1e-12 <= p <= 1 + 1e-12:
                raise ArgumentError(f"success probability {p} outside [0, 1]")

    @property
    def final_success(self) -> float:
        return self.success_prob_per_step[-1]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "marked": self.marked,
            "iterations": self.iterations,
            "prep": self.prep,
            "success_prob": [float(p) for p in self.success_prob_per_step[1:]],
            "success_prob_per_step": [float(p) for p in self.success_prob_per_step],
            "amplitudes_per_step": [_complex_pairs(np.atleast_2d(a))[0] for a in self.amplitudes_per_step],
        }


@dataclass(frozen=True)
class SweepPoint:
    """One row of a noisy-gate Grover sweep."""
    b: float
    h: float
    oracle: str
    fidelity: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Segment:
    """A named stretch of simulated device time; instantaneous steps have start == stop."""
    name: str
    start: float
    stop: float

    @property
    def duration(self) -> float:
        return self.stop - self.start

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class GroverMasterRun:
    """
    Grover circuit with W-type gates driven through the master equation.

    Attributes:
        n: Qubit count
        marked: Marked basis index
        iterations: Grover rounds
        fidelity: <marked| Tr_r ρ_final |marked>
        segments: Gate windows and instantaneous unitaries in time order
        trajectory: Trajectory of the last gate window
    """
    n: int
    marked: int
    iterations: int
    fidelity: float
    segments: List[Segment]
    trajectory: Trajectory

    @property
    def total_time(self) -> float:
        return self.segments[-1].stop if self.segments else 0.0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "marked": self.marked,
            "iterations": self.iterations,
            "fidelity": self.fidelity,
            "total_time": self.total_time,
            "segments": [s.to_dict() for s in self.segments],
        }


@dataclass
class DeutschJozsaResult:
    """Outcome of one Deutsch–Jozsa run on n register qubits plus one ancilla."""
    n: int
    kind: str
    p_zero: float
    amplitudes: np.ndarray

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "kind": self.kind,
            "p_zero": self.p_zero,
            "amplitudes": _complex_pairs(np.atleast_2d(self.amplitudes))[0],
        }


@dataclass(frozen=True, eq=False)
class ChiMatrix:
    """
    Process matrix ε(ρ) = Σ_ab χ_ab A_a ρ A_b† in the ordered Pauli basis.

    Attributes:
        data: 4^n × 4^n complex matrix
        n: Number of qubits
        y_convention: "minus_i_sigma_y" (default) or "standard"
    """
    data: np.ndarray
    n: int
    y_convention: str = Y_MINUS_I
    hermitian_tol: float = 1e-8
    trace_tol: float = 1e-6

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        size = 4 ** self.n
        if data.shape != (size, size):
            raise ArgumentError(f"χ for {self.n} qubits must be {size}×{size}, got {data.shape}")
        if self.y_convention not in Y_CONVENTIONS:
            raise ArgumentError(f"unknown y_convention {self.y_convention!r}")
        herm = np.max(np.abs(data - data.conj().T))
        if herm > self.hermitian_tol:
            raise ArgumentError(f"χ matrix not Hermitian (deviation {herm:.3e})")
        tr = np.trace(data)
        if abs(tr - 1.0) > self.trace_tol:
            raise ArgumentError(f"χ matrix trace is {tr:.8f}, expected 1")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def basis_order(self) -> List[str]:
        return pauli_labels(self.n)

    def entry(self, row: str, col: str) -> complex:
        labels = self.basis_order
        return complex(self.data[labels.index(row), labels.index(col)])

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "y_convention": self.y_convention,
            "basis_order": self.basis_order,
            "chi": _complex_pairs(self.data),
        }


# -------------------------------------------------------
# SCENARIO CONFIG
# -------------------------------------------------------

@dataclass(frozen=True)
class SweepAxis:
    """One swept parameter: ``points`` values from ``min`` to ``max`` inclusive."""
    parameter: str
    min: float
    max: float
    points: int

    def __post_init__(self):
        if self.points < 2:
            raise ArgumentError(f"sweep points must be >= 2, got {self.points}")

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.points)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ScenarioConfig:
    """
    A parsed scenario configuration, still in config units (GHz, MHz, µs).

    Attributes:
        scenario: Registry name
        device: Device fields (``g_mhz``, ``omega_rabi_mhz``, ``omega_q_ghz``, ``n_fock``)
        noise: Noise fields (``kappa_mhz``, ``t1_us``, ``t2_us``, ``tc_us``)
        params: Scenario-specific settings (indices, grids, qubit counts)
        sweep: Optional swept axis
        output_dir: Artifact directory
        seed: Reserved; every scenario is deterministic
    """
    scenario: str
    device: Dict[str, float] = field(default_factory=dict)
    noise: Dict[str, float] = field(default_factory=dict)
    params: Dict[str, object] = field(default_factory=dict)
    sweep: Optional[SweepAxis] = None
    output_dir: str = "output"
    seed: int = 0

    def to_dict(self) -> dict:
        data = {
            "scenario": self.scenario,
            "device": dict(self.device),
            "noise": dict(self.noise),
            "params": dict(self.params),
            "sweep": self.sweep.to_dict() if self.sweep else None,
            "output_dir": self.output_dir,
            "seed": self.seed,
        }
        return data
