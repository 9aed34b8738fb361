"""
Ideal gate library.

Standard single- and multi-qubit gates, the W_n superposition gates, Grover
phase oracles (direct and decomposed through W₁ conjugation), diffusion
operators, the one-step entanglers and the Bell/GHZ circuit builders.

Qubit 0 is the leftmost tensor factor and the most significant bit of a basis
index. A circuit is an ordered list of GateSpec, applied first to last.
"""

import logging
from functools import reduce
from typing import Callable, Dict, List, Sequence

import numpy as np
import orjson

from .exceptions import ArgumentError
from .model import three_qubit_closed_form
from .models import GateSpec
from .qcore import Operator, StateVector, kron, matexp, sigma_x, sigma_y, sigma_z

_log = logging.getLogger(__name__)

_SQ2 = 1.0 / np.sqrt(2.0)


# -------------------------------------------------------
# GATE TABLE
# -------------------------------------------------------

def _rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def _permutation(order: Sequence[int]) -> np.ndarray:
    m = np.zeros((len(order), len(order)))
    for col, row in enumerate(order):
        m[row, col] = 1.0
    return m


_FIXED: Dict[str, np.ndarray] = {
    "I": np.eye(2),
    "X": sigma_x().data,
    "Y": sigma_y().data,
    "Z": sigma_z().data,
    "H": _SQ2 * np.array([[1, 1], [1, -1]]),
    "S": np.diag([1, 1j]),
    "T": np.diag([1, np.exp(0.25j * np.pi)]),
    "CNOT": _permutation([0, 1, 3, 2]),
    "CP": np.diag([1, 1, 1, -1]),
    "ISWAP": np.array([[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]]),
    "SQRT_ISWAP": np.array(
        [[1, 0, 0, 0], [0, _SQ2, 1j * _SQ2, 0], [0, 1j * _SQ2, _SQ2, 0], [0, 0, 0, 1]]
    ),
    "TOFFOLI": _permutation([0, 1, 2, 3, 4, 5, 7, 6]),
    "FREDKIN": _permutation([0, 1, 2, 3, 4, 6, 5, 7]),
}

_ROTATIONS: Dict[str, Callable[[float], np.ndarray]] = {"RX": _rx, "RY": _ry, "RZ": _rz}

GATE_NAMES = tuple(_FIXED) + tuple(_ROTATIONS)


def gate(name: str, *params: float, qubits: Sequence[int] = ()) -> GateSpec:
    """
    Look up a library gate.

    Args:
        name: One of I, X, Y, Z, H, S, T, RX, RY, RZ, CNOT, CP, ISWAP,
              SQRT_ISWAP, TOFFOLI, FREDKIN (case-insensitive)
        params: The rotation angle for RX/RY/RZ; nothing otherwise
        qubits: Target qubits; defaults to 0..k-1

    Raises:
        ArgumentError: unknown name or wrong number of parameters

    Example:
        rx = gate("RX", np.pi / 2)
        cnot = gate("CNOT", qubits=(1, 2))
    """
    key = name.upper()
    if key in _ROTATIONS:
        if len(params) != 1:
            raise ArgumentError(f"{key} takes exactly one angle, got {len(params)}")
        matrix = _ROTATIONS[key](float(params[0]))
    elif key in _FIXED:
        if params:
            raise ArgumentError(f"{key} takes no parameters, got {len(params)}")
        matrix = _FIXED[key]
    else:
        raise ArgumentError(f"unknown gate {name!r}; known gates: {', '.join(GATE_NAMES)}")
    k = int(np.log2(matrix.shape[0]))
    qubits = tuple(qubits) if qubits else tuple(range(k))
    return GateSpec(key, qubits, Operator(matrix, (2,) * k), tuple(params))


def _tensor_power(m: np.ndarray, n: int) -> np.ndarray:
    return reduce(np.kron, [m] * n)


def _spec(name: str, matrix: np.ndarray, n: int, params=()) -> GateSpec:
    return GateSpec(name, tuple(range(n)), Operator(matrix, (2,) * n), params)


# -------------------------------------------------------
# SUPERPOSITION, ORACLE AND DIFFUSION GATES
# -------------------------------------------------------

def w_gate(n: int) -> GateSpec:
    """W_n = R_x(−π/2)^{⊗n} σ_x^{⊗n}; W₁|0> = (i|0> + |1>)/√2."""
    if n < 1:
        raise ArgumentError(f"w_gate needs n >= 1, got {n}")
    single = _rx(-np.pi / 2) @ _FIXED["X"]
    return _spec(f"W{n}", _tensor_power(single, n), n)


def _check_marked(n: int, marked: int):
    if not 0 <= marked < 2 ** n:
        raise ArgumentError(f"marked state {marked} out of range for {n} qubits")


def oracle(n: int, marked: int) -> GateSpec:
    """Phase oracle I − 2|x><x| for the basis index ``marked``."""
    if n < 1:
        raise ArgumentError(f"oracle needs n >= 1, got {n}")
    _check_marked(n, marked)
    diag = np.ones(2 ** n, dtype=complex)
    diag[marked] = -1.0
    return _spec(f"CP_{marked:0{n}b}", np.diag(diag), n)


def _bits(marked, n: int) -> str:
    if isinstance(marked, (int, np.integer)):
        _check_marked(n, int(marked))
        return format(int(marked), f"0{n}b")
    marked = str(marked)
    if len(marked) != n or set(marked) - {"0", "1"}:
        raise ArgumentError(f"marked string must be {n} bits, got {marked!r}")
    return marked


_Y_BLOCK = np.array([[0, -1j], [1j, 0]])

# Two-qubit U_ij: identity except a ±Y block selected by the first bit, keyed by
# the cP_ij it produces under V₂·U·V₂⁻¹ (so "01" holds +Y in the upper block)
_U2 = {
    "00": np.block([[-_Y_BLOCK, np.zeros((2, 2))], [np.zeros((2, 2)), np.eye(2)]]),
    "01": np.block([[_Y_BLOCK, np.zeros((2, 2))], [np.zeros((2, 2)), np.eye(2)]]),
    "10": np.block([[np.eye(2), np.zeros((2, 2))], [np.zeros((2, 2)), -_Y_BLOCK]]),
    "11": np.block([[np.eye(2), np.zeros((2, 2))], [np.zeros((2, 2)), _Y_BLOCK]]),
}

ORDERINGS = ("v_u_vinv", "vinv_u_v")


def decomposition_core2(marked) -> Operator:
    """The two-qubit core U_ij conjugated into cP_ij by V₂ = I ⊗ W₁."""
    return Operator(_U2[_bits(marked, 2)], (2, 2))


def oracle_decomposed2(marked, ordering: str = "v_u_vinv") -> GateSpec:
    """
    cP_ij from a single two-qubit U_ij dressed with V₂ = I ⊗ W₁.

    ``ordering`` picks V₂·U·V₂⁻¹ (reproduces I − 2|ij><ij|) or V₂⁻¹·U·V₂.
    """
    bits = _bits(marked, 2)
    if ordering not in ORDERINGS:
        raise ArgumentError(f"unknown ordering {ordering!r}; expected one of {ORDERINGS}")
    v = np.kron(np.eye(2), w_gate(1).matrix.data)
    v_inv = v.conj().T
    u = _U2[bits]
    m = v @ u @ v_inv if ordering == "v_u_vinv" else v_inv @ u @ v
    return _spec(f"CP_{bits}_decomposed", m, 2)


def decomposition_core3() -> Operator:
    """U₃: identity with [[0, −i], [i, 0]] in the |110>, |111> block."""
    m = np.eye(8, dtype=complex)
    m[6:, 6:] = _Y_BLOCK
    return Operator(m, (2, 2, 2))


def oracle_decomposed3(marked) -> GateSpec:
    """
    cP₁₁₁ = V₃U₃V₃⁻¹ with V₃ = I ⊗ I ⊗ W₁, moved to any other marked string by
    σ_x on each qubit whose marked bit is 0.
    """
    bits = _bits(marked, 3)
    v = np.kron(np.eye(4), w_gate(1).matrix.data)
    m = v @ decomposition_core3().data @ v.conj().T
    flips = [_FIXED["X"] if b == "0" else np.eye(2) for b in bits]
    x = reduce(np.kron, flips)
    return _spec(f"CP_{bits}_decomposed", x @ m @ x, 3)


DIFFUSION_FORMS = ("circuit", "propagator")


def diffusion(n: int, form: str = "circuit") -> GateSpec:
    """
    Inversion about the W_n-prepared state, up to a global phase.

    Forms:
        circuit     σ_x^{⊗n} R σ_x^{⊗n} cP σ_x^{⊗n} R with R = R_x(−π/2)^{⊗n}
        propagator  −σ_x^{⊗3} U cP U, U the three-qubit one-step propagator at
                    its W-gate point (b = π, h = ½); n = 3 only
    """
    if n < 1:
        raise ArgumentError(f"diffusion needs n >= 1, got {n}")
    if form not in DIFFUSION_FORMS:
        raise ArgumentError(f"unknown diffusion form {form!r}; expected one of {DIFFUSION_FORMS}")
    x = _tensor_power(_FIXED["X"], n)
    cp = oracle(n, 2 ** n - 1).matrix.data
    if form == "circuit":
        r = _tensor_power(_rx(-np.pi / 2), n)
        m = x @ r @ x @ cp @ x @ r
    else:
        if n != 3:
            raise ArgumentError("the propagator form of the diffusion operator is defined for n = 3")
        u = three_qubit_closed_form(np.pi, 0.5).data
        m = -x @ u @ cp @ u
    return _spec(f"D{n}", m, n)


def entangler(n: int) -> GateSpec:
    """(1/√2)(I − i σ_x^{⊗n}), the one-step entangling gate without its global phase."""
    if n not in (2, 3):
        raise ArgumentError(f"entangler is defined for 2 or 3 qubits, got {n}")
    m = _SQ2 * (np.eye(2 ** n) - 1j * _tensor_power(_FIXED["X"], n))
    return _spec(f"ENT{n}", m, n)


# -------------------------------------------------------
# TWO-QUBIT COUPLING EVOLUTIONS
# -------------------------------------------------------

def sqrt_iswap_evolution(g_qq: float, t: float) -> GateSpec:
    """
    Exchange coupling g_qq(σ₊σ₋ + σ₋σ₊) for time t: cos(g t) / i sin(g t) in the
    |01>, |10> block. t = π/(4g) gives √iSWAP and t = π/(2g) gives iSWAP.
    """
    if not g_qq > 0:
        raise ArgumentError(f"g_qq must be > 0, got {g_qq}")
    c, s = np.cos(g_qq * t), np.sin(g_qq * t)
    m = np.array([[1, 0, 0, 0], [0, c, 1j * s, 0], [0, 1j * s, c, 0], [0, 0, 0, 1]])
    return _spec("U_XY", m, 2, (g_qq, t))


def cphase_evolution(coupling: float, t: float) -> GateSpec:
    """
    exp(−iHt) with H = (J/2)(Z⊗Z − Z⊗I − I⊗Z); t = π/(2J) gives CP up to the
    global phase e^{iπ/4}.
    """
    if not coupling > 0:
        raise ArgumentError(f"coupling must be > 0, got {coupling}")
    z = sigma_z()
    eye = Operator(np.eye(2))
    h = 0.5 * coupling * (kron(z, z) - kron(z, eye) - kron(eye, z))
    return GateSpec("U_ZZ", (0, 1), matexp(h, -1j * t), (coupling, t))


# -------------------------------------------------------
# CIRCUITS
# -------------------------------------------------------

def bell_circuit() -> List[GateSpec]:
    """H on qubit 0, then CNOT 0→1: |00> → (|00> + |11>)/√2."""
    return [gate("H", qubits=(0,)), gate("CNOT", qubits=(0, 1))]


def ghz_circuit() -> List[GateSpec]:
    """H on qubit 0, CNOT 0→1, CNOT 1→2: |000> → (|000> + |111>)/√2."""
    return [gate("H", qubits=(0,)), gate("CNOT", qubits=(0, 1)), gate("CNOT", qubits=(1, 2))]


def _apply_gate(spec: GateSpec, tensor: np.ndarray) -> np.ndarray:
    k = spec.n_qubits
    g = spec.matrix.data.reshape((2,) * (2 * k))
    out = np.tensordot(g, tensor, axes=(list(range(k, 2 * k)), list(spec.qubits)))
    return np.moveaxis(out, list(range(k)), list(spec.qubits))


def apply_circuit(circuit: Sequence[GateSpec], state: StateVector) -> StateVector:
    """
    Run a circuit on a qubit register state.

    Raises:
        ArgumentError: the state is not a qubit register or a gate targets a
                       qubit outside it
    """
    dims = state.dims
    if any(d != 2 for d in dims):
        raise ArgumentError(f"apply_circuit needs a qubit register, got dims {dims}")
    n = len(dims)
    tensor = np.array(state.data).reshape(dims)
    for spec in circuit:
        if len(set(spec.qubits)) != spec.n_qubits or any(not 0 <= q < n for q in spec.qubits):
            raise ArgumentError(f"gate {spec.name} targets {spec.qubits} on a {n}-qubit register")
        tensor = _apply_gate(spec, tensor)
    return StateVector(tensor.reshape(-1), dims)


def circuit_unitary(circuit: Sequence[GateSpec], n: int) -> Operator:
    """The full 2^n × 2^n unitary of a circuit."""
    cols = []
    for i in range(2 ** n):
        basis = np.zeros(2 ** n, dtype=complex)
        basis[i] = 1.0
        cols.append(apply_circuit(circuit, StateVector(basis, (2,) * n)).data)
    return Operator(np.array(cols).T, (2,) * n)


def gate_to_json(spec: GateSpec) -> str:
    """Name, qubits, dims and row-major [re, im] matrix entries, keys sorted."""
    return orjson.dumps(spec.to_dict(), option=orjson.OPT_SORT_KEYS).decode("utf-8")
