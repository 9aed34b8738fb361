"""
Quantum process tomography.

A channel is pushed through an informationally complete set of product
inputs, its superoperator is recovered by linear inversion and re-expressed
as the χ matrix

    ε(ρ) = Σ_ab χ_ab A_a ρ A_b†

in the ordered n-qubit Pauli basis A_a (Y taken as −iσ_y by default).

Channels are either unitaries (GateSpec or Operator) or any callable mapping
a DensityMatrix to a DensityMatrix, such as ``lindblad_channel(scenario)``.
"""

import itertools
import logging
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np
import orjson

from .exceptions import ArgumentError, InversionError, NumericalMethodError
from .lindblad import RECORD_PSD_TOL, GateScenario, propagate_gate
from .models import ChiMatrix, GateSpec
from .qcore import (
    DensityMatrix,
    Operator,
    StateVector,
    Y_MINUS_I,
    basis_state,
    fidelity_pure,
    partial_trace,
    pauli_basis,
    pauli_labels,
    tensor_states,
)

_log = logging.getLogger(__name__)

Channel = Union[GateSpec, Operator, Callable[[DensityMatrix], DensityMatrix]]

# Trace preservation demanded of every channel output
CHANNEL_TRACE_TOL = 1e-7

# χ eigenvalues below this are reported as a positivity violation
CHI_PSD_TOL = 1e-6

# Largest |Σ χ_ab A_a ρ_in A_b† − ρ_out| tolerated before warning
CHI_RESIDUAL_TOL = 1e-8


# -------------------------------------------------------
# INPUTS AND CHANNELS
# -------------------------------------------------------

def _single_inputs() -> List[StateVector]:
    s = 1.0 / np.sqrt(2.0)
    return [
        StateVector([1, 0]),
        StateVector([0, 1]),
        StateVector([s, s]),
        StateVector([s, 1j * s]),
    ]


def tomographic_kets(n: int) -> List[StateVector]:
    """The 4^n product kets over {|0>, |1>, |+>, |+i>}, lexicographic."""
    if n < 1:
        raise ArgumentError(f"n must be >= 1, got {n}")
    return [tensor_states(*combo) for combo in itertools.product(_single_inputs(), repeat=n)]


def tomographic_inputs(n: int) -> List[DensityMatrix]:
    return [DensityMatrix.from_ket(psi) for psi in tomographic_kets(n)]


def gram_condition(n: int) -> float:
    """Condition number of the matrix whose columns are the vectorized inputs."""
    r = np.array([rho.data.reshape(-1) for rho in tomographic_inputs(n)]).T
    return float(np.linalg.cond(r))


class LindbladChannel:
    """
    A gate scenario used as an n-qubit channel.

    The qubit input is embedded as ρ ⊗ |k><k| (k the scenario's Fock state),
    driven for one gate window and reduced back to the qubits.
    """

    def __init__(self, scenario: GateScenario):
        self.scenario = scenario
        self.n = scenario.conds.n_qubits

    def __call__(self, rho: DensityMatrix) -> DensityMatrix:
        if rho.dims != (2,) * self.n:
            raise ArgumentError(f"channel acts on {self.n} qubits, got dims {rho.dims}")
        photon = basis_state(self.scenario.n_fock, self.scenario.fock)
        vac = np.outer(photon.data, photon.data.conj())
        full = DensityMatrix(Operator(np.kron(rho.data, vac), rho.dims + photon.dims), psd_tol=RECORD_PSD_TOL)
        out = propagate_gate(self.scenario, full)
        return partial_trace(out, range(self.n))


def lindblad_channel(scenario: GateScenario) -> LindbladChannel:
    return LindbladChannel(scenario)


def apply_process(channel: Channel, rho_in: DensityMatrix) -> DensityMatrix:
    """
    ε(ρ_in) for a unitary or callable channel.

    Raises:
        NumericalMethodError: the channel changed the trace by more than 1e-7
    """
    if isinstance(channel, (GateSpec, Operator)):
        u = channel.matrix if isinstance(channel, GateSpec) else channel
        if u.dim != rho_in.op.dim:
            raise ArgumentError(f"unitary of dimension {u.dim} applied to state of dimension {rho_in.op.dim}")
        out = u.data @ rho_in.data @ u.data.conj().T
        out = 0.5 * (out + out.conj().T)
        rho_out = DensityMatrix(Operator(out, rho_in.dims), psd_tol=RECORD_PSD_TOL)
    else:
        rho_out = channel(rho_in)
    drift = abs(np.trace(rho_out.data).real - 1.0)
    if drift > CHANNEL_TRACE_TOL:
        raise NumericalMethodError(f"channel changed the trace by {drift:.3e}")
    return rho_out


def _unitary_of(u: Union[GateSpec, Operator]) -> Operator:
    return u.matrix if isinstance(u, GateSpec) else u


# -------------------------------------------------------
# χ MATRIX
# -------------------------------------------------------

def _basis_stack(n: int, y_convention: str) -> np.ndarray:
    return np.array([a.data for a in pauli_basis(n, y_convention)])


def chi_linear_inversion(
    pairs: Sequence[Tuple[DensityMatrix, DensityMatrix]],
    n: int,
    y_convention: str = Y_MINUS_I,
) -> ChiMatrix:
    """
    Recover χ from (ρ_in, ρ_out) pairs.

    The superoperator S with vec(ρ_out) = S·vec(ρ_in) is solved by least
    squares over the inputs, then projected onto the Pauli pairs:
    χ_ab = Σ conj(A_a[r, p])·A_b[s, q]·S[r, s, p, q] / D².

    How it works:
        1. Stack vec(ρ_in) and vec(ρ_out) for every pair; the inputs must
           have full rank D²
        2. Least squares for S, then the Pauli projection above, Hermitized
        3. Rebuild every ρ_out from χ and log the worst residual

    Raises:
        InversionError: the inputs do not span the operator space
    """
    # STEP 1: Check the pairs span the operator space
    d = 2 ** n
    if not pairs:
        raise InversionError("no tomography pairs given")
    for rho_in, rho_out in pairs:
        if rho_in.op.dim != d or rho_out.op.dim != d:
            raise ArgumentError(f"tomography pair does not live on {n} qubits")
    r = np.array([rho_in.data.reshape(-1) for rho_in, _ in pairs]).T
    out = np.array([rho_out.data.reshape(-1) for _, rho_out in pairs]).T
    rank = np.linalg.matrix_rank(r)
    if rank < d * d:
        raise InversionError(f"tomography inputs span rank {rank}, need {d * d}")

    # STEP 2: Superoperator by least squares, projected onto Pauli pairs
    s_t, *_ = np.linalg.lstsq(r.T, out.T, rcond=None)
    s4 = s_t.T.reshape(d, d, d, d)
    a = _basis_stack(n, y_convention)
    chi = np.einsum("arp,bsq,rspq->ab", a.conj(), a, s4) / d ** 2
    chi = ChiMatrix(0.5 * (chi + chi.conj().T), n, y_convention)

    # STEP 3: Check the reconstruction against every pair
    residual = reconstruction_residual(chi, pairs)
    lowest = float(np.linalg.eigvalsh(chi.data)[0])
    _log.debug("χ inversion n=%d: residual %.2e, min eigenvalue %.2e", n, residual, lowest)
    if residual > CHI_RESIDUAL_TOL:
        _log.warning("χ reproduces the tomography pairs only to %.3e", residual)
    if lowest < -CHI_PSD_TOL:
        _log.warning("reconstructed χ has negative eigenvalue %.3e", lowest)
    return chi


def reconstruction_residual(chi: ChiMatrix, pairs: Sequence[Tuple[DensityMatrix, DensityMatrix]]) -> float:
    """max over pairs of max |Σ χ_ab A_a ρ_in A_b† − ρ_out|."""
    a = _basis_stack(chi.n, chi.y_convention)
    worst = 0.0
    for rho_in, rho_out in pairs:
        recon = np.einsum("ab,arp,pq,bsq->rs", chi.data, a, rho_in.data, a.conj())
        worst = max(worst, float(np.max(np.abs(recon - rho_out.data))))
    return worst


def process_tomography(channel: Channel, n: int, y_convention: str = Y_MINUS_I) -> ChiMatrix:
    """
    Push every tomographic input through ``channel`` and invert.

    How it works:
        1. The 4^n product inputs |0>, |1>, |+>, |+i> per qubit
        2. Each goes through the channel; a trace change over
           CHANNEL_TRACE_TOL raises NumericalMethodError
        3. chi_linear_inversion over all pairs
    """
    pairs = [(rho, apply_process(channel, rho)) for rho in tomographic_inputs(n)]
    return chi_linear_inversion(pairs, n, y_convention)


def chi_ideal(u: Union[GateSpec, Operator], y_convention: str = Y_MINUS_I) -> ChiMatrix:
    """Rank-one χ_ab = c_a c_b* from the Pauli expansion U = Σ c_a A_a."""
    op = _unitary_of(u)
    if not op.is_unitary(1e-10):
        raise ArgumentError("chi_ideal needs a unitary")
    n = int(round(np.log2(op.dim)))
    if 2 ** n != op.dim:
        raise ArgumentError(f"dimension {op.dim} is not a qubit register")
    a = _basis_stack(n, y_convention)
    c = np.einsum("aji,ji->a", a.conj(), op.data) / op.dim
    return ChiMatrix(np.outer(c, c.conj()), n, y_convention)


def chi_eigenvalues(chi: ChiMatrix) -> np.ndarray:
    return np.linalg.eigvalsh(chi.data)


def process_fidelity(chi_a: ChiMatrix, chi_b: ChiMatrix) -> float:
    """
    Tr(χ_a χ_b).

    Raises:
        ArgumentError: the two matrices use different qubit counts or Y conventions
    """
    if chi_a.n != chi_b.n or chi_a.y_convention != chi_b.y_convention:
        raise ArgumentError(
            f"χ conventions differ: ({chi_a.n}, {chi_a.y_convention}) vs ({chi_b.n}, {chi_b.y_convention})"
        )
    value = np.trace(chi_a.data @ chi_b.data)
    if abs(value.imag) > 1e-9:
        raise NumericalMethodError(f"process fidelity has imaginary part {value.imag:.3e}")
    return float(value.real)


def mean_fidelity(u_ideal: Union[GateSpec, Operator], channel: Channel) -> float:
    """Average of <Uψ| ε(|ψ><ψ|) |Uψ> over the tomographic product kets."""
    op = _unitary_of(u_ideal)
    n = int(round(np.log2(op.dim)))
    kets = tomographic_kets(n)
    outputs = [apply_process(channel, DensityMatrix.from_ket(psi)) for psi in kets]
    return mean_fidelity_from_outputs(op, kets, outputs)


def mean_fidelity_from_outputs(
    u_ideal: Union[GateSpec, Operator],
    kets: Sequence[StateVector],
    outputs: Sequence[DensityMatrix],
) -> float:
    """Mean fidelity when the channel outputs for ``kets`` are already known."""
    if len(kets) != len(outputs) or not kets:
        raise ArgumentError("need one channel output per input ket")
    op = _unitary_of(u_ideal)
    return sum(fidelity_pure(op @ psi, out) for psi, out in zip(kets, outputs)) / len(kets)


# -------------------------------------------------------
# EXPORT
# -------------------------------------------------------

def chi_bar_export(chi: ChiMatrix) -> List[Tuple[str, str, float]]:
    """(row_label, col_label, |χ|) over the full basis, row-major."""
    labels = pauli_labels(chi.n)
    mags = np.abs(chi.data)
    return [(labels[i], labels[j], float(mags[i, j])) for i in range(len(labels)) for j in range(len(labels))]


def chi_to_json(chi: ChiMatrix) -> str:
    return orjson.dumps(chi.to_dict(), option=orjson.OPT_SORT_KEYS).decode("utf-8")
