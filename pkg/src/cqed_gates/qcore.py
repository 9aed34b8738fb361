"""
Dense tensor-algebra kernel.

Operators, kets and density matrices are small dense numpy arrays tagged with
the ordered list of subsystem dimensions they live on. The ordering is fixed
across the package: qubit 1, qubit 2, ..., qubit N, resonator last, with
qubit 1 the most significant digit of a basis label |q1 q2 ... qN>.

All values are immutable after construction (the wrapped arrays are marked
read-only), so they can be shared freely between worker threads.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from .exceptions import ArgumentError, NumericalMethodError

_log = logging.getLogger(__name__)


# -------------------------------------------------------
# CONSTANTS
# -------------------------------------------------------

# Default absolute tolerance on matrix entries
ATOL = 1e-10

# DensityMatrix construction checks
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-9

# Eigenvalues below this are treated as exact zeros inside matrix square roots
_SQRT_CLIP = 1e-12

Y_STANDARD = "standard"
Y_MINUS_I = "minus_i_sigma_y"
Y_CONVENTIONS = (Y_STANDARD, Y_MINUS_I)

PAULI_LABELS = ("I", "X", "Y", "Z")


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _normalize_dims(dims: Iterable[int], size: int) -> Tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims:
        return (size,) if size > 1 else ()
    if any(d < 2 for d in dims):
        raise ArgumentError(f"subsystem dimensions must be >= 2, got {dims}")
    if int(np.prod(dims)) != size:
        raise ArgumentError(f"dims {dims} do not multiply to {size}")
    return dims


# -------------------------------------------------------
# VALUE TYPES
# -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Operator:
    """
    A dense complex D×D matrix on a tensor-product space.

    Attributes:
        data: Complex matrix, stored read-only
        dims: Ordered subsystem dimensions whose product is D

    Example:
        sx = sigma_x()
        xx = kron(sx, sx)          # dims (2, 2)
        u = matexp(xx, -1j * np.pi / 4)
    """
    data: np.ndarray
    dims: Tuple[int, ...] = ()

    # numpy scalars defer to __rmul__ instead of broadcasting
    __array_ufunc__ = None

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ArgumentError(f"operator must be square, got shape {data.shape}")
        object.__setattr__(self, "dims", _normalize_dims(self.dims, data.shape[0]))
        object.__setattr__(self, "data", _freeze(data))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def dag(self) -> "Operator":
        return dagger(self)

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def is_hermitian(self, tol: float = ATOL) -> bool:
        return bool(np.max(np.abs(self.data - self.data.conj().T), initial=0.0) <= tol)

    def is_unitary(self, tol: float = ATOL) -> bool:
        eye = np.eye(self.dim)
        return bool(np.max(np.abs(self.data.conj().T @ self.data - eye), initial=0.0) <= tol)

    def allclose(self, other: "Operator", atol: float = ATOL) -> bool:
        return self.dims == other.dims and bool(np.allclose(self.data, other.data, atol=atol, rtol=0))

    def _check_dims(self, other: "Operator"):
        if self.dims != other.dims:
            raise ArgumentError(f"dimension mismatch: {self.dims} vs {other.dims}")

    def apply(self, psi: "StateVector") -> np.ndarray:
        """Unnormalized image ``data @ psi.data`` as a plain array."""
        if self.dims != psi.dims:
            raise ArgumentError(f"dimension mismatch: {self.dims} vs {psi.dims}")
        return self.data @ psi.data

    def __matmul__(self, other):
        """
        Operator product, or the image of a ket.

        A ket image is returned as a StateVector and therefore renormalized;
        for a non-unitary operator that is the conditional state after the
        operator acts. An image of zero norm raises ArgumentError. Use
        ``apply`` for the raw vector.
        """
        if isinstance(other, Operator):
            self._check_dims(other)
            return Operator(self.data @ other.data, self.dims)
        if isinstance(other, StateVector):
            return StateVector(self.apply(other), self.dims)
        return NotImplemented

    def __add__(self, other: "Operator") -> "Operator":
        self._check_dims(other)
        return Operator(self.data + other.data, self.dims)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_dims(other)
        return Operator(self.data - other.data, self.dims)

    def __mul__(self, scalar) -> "Operator":
        if isinstance(scalar, (Operator, StateVector)):
            return NotImplemented
        return Operator(self.data * complex(scalar), self.dims)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(-self.data, self.dims)

    def __truediv__(self, scalar) -> "Operator":
        return Operator(self.data / complex(scalar), self.dims)


@dataclass(frozen=True, eq=False)
class StateVector:
    """
    A normalized ket. The constructor rescales the input to unit norm.

    Attributes:
        data: Complex vector of length D, stored read-only
        dims: Ordered subsystem dimensions
    """
    data: np.ndarray
    dims: Tuple[int, ...] = ()

    def __post_init__(self):
        data = np.array(self.data, dtype=complex).reshape(-1)
        norm = np.linalg.norm(data)
        if not np.isfinite(norm) or norm == 0.0:
            raise ArgumentError("state vector must have a finite nonzero norm")
        data = data / norm
        object.__setattr__(self, "dims", _normalize_dims(self.dims, data.shape[0]))
        object.__setattr__(self, "data", _freeze(data))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def probabilities(self) -> np.ndarray:
        return np.abs(self.data) ** 2


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    A density matrix: Hermitian, unit trace, positive semidefinite.

    Construction checks Hermiticity (1e-10) and trace (1e-9); positivity is
    checked with ``psd_tol`` (default 1e-9). Callers that have already
    enforced the invariants (the master-equation solver) pass a looser
    positivity tolerance rather than skipping the checks.

    Attributes:
        op: The underlying Operator
    """
    op: Operator
    psd_tol: float = PSD_TOL

    def __post_init__(self):
        data = self.op.data
        herm = np.max(np.abs(data - data.conj().T), initial=0.0)
        if herm > HERMITIAN_TOL:
            raise ArgumentError(f"density matrix not Hermitian (deviation {herm:.3e})")
        tr = np.trace(data).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ArgumentError(f"density matrix trace is {tr:.12f}, expected 1")
        if self.psd_tol is not None:
            lowest = np.linalg.eigvalsh(data)[0]
            if lowest < -self.psd_tol:
                raise ArgumentError(f"density matrix has negative eigenvalue {lowest:.3e}")

    @classmethod
    def from_array(cls, data, dims: Sequence[int] = (), psd_tol: float = PSD_TOL) -> "DensityMatrix":
        return cls(Operator(data, dims), psd_tol)

    @classmethod
    def from_ket(cls, psi: StateVector) -> "DensityMatrix":
        return cls(Operator(np.outer(psi.data, psi.data.conj()), psi.dims))

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int]) -> "DensityMatrix":
        d = int(np.prod(dims))
        return cls(Operator(np.eye(d) / d, dims))

    @property
    def data(self) -> np.ndarray:
        return self.op.data

    @property
    def dims(self) -> Tuple[int, ...]:
        return self.op.dims

    def purity(self) -> float:
        return float(np.real(np.trace(self.data @ self.data)))


# -------------------------------------------------------
# CONSTRUCTORS
# -------------------------------------------------------

def identity(dims: Union[int, Sequence[int]]) -> Operator:
    dims = (dims,) if isinstance(dims, int) else tuple(dims)
    return Operator(np.eye(int(np.prod(dims))), dims)


def sigma_x() -> Operator:
    return Operator([[0, 1], [1, 0]])


def sigma_y() -> Operator:
    return Operator([[0, -1j], [1j, 0]])


def sigma_z() -> Operator:
    return Operator([[1, 0], [0, -1]])


def sigma_plus() -> Operator:
    """Raising operator |1><0|."""
    return Operator([[0, 0], [1, 0]])


def sigma_minus() -> Operator:
    """Lowering operator |0><1|."""
    return Operator([[0, 1], [0, 0]])


def annihilation(n: int) -> Operator:
    """Truncated resonator annihilation operator with a|k> = sqrt(k)|k-1>."""
    if n < 2:
        raise ArgumentError(f"Fock truncation must be >= 2, got {n}")
    return Operator(np.diag(np.sqrt(np.arange(1, n)), k=1))


def number(n: int) -> Operator:
    return Operator(np.diag(np.arange(n, dtype=float)))


def basis_state(dims: Union[int, Sequence[int]], index: Union[int, Sequence[int]]) -> StateVector:
    """
    Computational basis ket.

    ``index`` is either a flat index or one digit per subsystem, so
    ``basis_state((2, 2, 10), (1, 0, 3))`` is |1,0>|3>_r.
    """
    dims = (dims,) if isinstance(dims, int) else tuple(dims)
    if not isinstance(index, (int, np.integer)):
        digits = tuple(index)
        if len(digits) != len(dims) or any(not 0 <= k < d for k, d in zip(digits, dims)):
            raise ArgumentError(f"basis digits {digits} invalid for dims {dims}")
        index = int(np.ravel_multi_index(digits, dims))
    size = int(np.prod(dims))
    if not 0 <= index < size:
        raise ArgumentError(f"basis index {index} out of range for dimension {size}")
    vec = np.zeros(size, dtype=complex)
    vec[index] = 1.0
    return StateVector(vec, dims)


def tensor_states(*states: StateVector) -> StateVector:
    data = reduce(np.kron, (s.data for s in states))
    dims = sum((s.dims for s in states), ())
    return StateVector(data, dims)


def embed(op: Operator, slot: int, dims: Sequence[int]) -> Operator:
    """Place a single-subsystem operator at ``slot`` with identities elsewhere."""
    dims = tuple(dims)
    if not 0 <= slot < len(dims):
        raise ArgumentError(f"slot {slot} out of range for dims {dims}")
    if op.dim != dims[slot]:
        raise ArgumentError(f"operator dimension {op.dim} does not fit slot of size {dims[slot]}")
    factors = [op if k == slot else identity(d) for k, d in enumerate(dims)]
    return kron(*factors)


# -------------------------------------------------------
# CORE OPERATIONS
# -------------------------------------------------------

def kron(*ops: Operator) -> Operator:
    """
    Kronecker product with dims concatenation.

    kron(a, b)[i*Db + k, j*Db + l] = a[i, j] * b[k, l]
    """
    if not ops:
        raise ArgumentError("kron needs at least one operator")
    data = reduce(np.kron, (o.data for o in ops))
    dims = sum((o.dims for o in ops), ())
    return Operator(data, dims)


def dagger(a: Operator) -> Operator:
    return Operator(a.data.conj().T, a.dims)


def matexp(h: Operator, scale: complex) -> Operator:
    """
    Compute exp(scale * h).

    Hermitian input goes through an eigendecomposition, so for a purely
    imaginary ``scale`` the result is unitary to rounding. Anything else is
    handed to scipy's scaling-and-squaring Padé approximant.

    Raises:
        ArgumentError: h contains NaN or inf
        NumericalMethodError: the eigensolver did not converge
    """
    data = h.data
    if not np.all(np.isfinite(data)):
        raise ArgumentError("matexp input contains non-finite entries")
    scale = complex(scale)
    try:
        if np.max(np.abs(data - data.conj().T), initial=0.0) <= 1e-13:
            w, v = np.linalg.eigh(0.5 * (data + data.conj().T))
            out = (v * np.exp(scale * w)) @ v.conj().T
        else:
            out = scipy.linalg.expm(scale * data)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalMethodError(f"matrix exponential failed: {exc}") from exc
    if not np.all(np.isfinite(out)):
        raise NumericalMethodError("matrix exponential produced non-finite entries")
    return Operator(out, h.dims)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """
    Trace out every subsystem not listed in ``keep``.

    The kept subsystems stay in their original order regardless of the order
    they are listed in.

    Raises:
        ArgumentError: keep is empty or names a subsystem that does not exist
    """
    dims = rho.dims
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ArgumentError("partial_trace needs at least one subsystem to keep")
    if keep[0] < 0 or keep[-1] >= n:
        raise ArgumentError(f"keep indices {keep} out of range for {n} subsystems")
    tensor = rho.data.reshape(dims + dims)
    row_axes = list(range(n))
    col_axes = [k + n if k in keep else k for k in range(n)]
    out_axes = keep + [k + n for k in keep]
    reduced = np.einsum(tensor, row_axes + col_axes, out_axes)
    kept_dims = tuple(dims[k] for k in keep)
    size = int(np.prod(kept_dims))
    reduced = reduced.reshape(size, size)
    reduced = 0.5 * (reduced + reduced.conj().T)
    return DensityMatrix(Operator(reduced, kept_dims), psd_tol=rho.psd_tol)


def pauli_basis(n: int, y_convention: str = Y_STANDARD) -> List[Operator]:
    """
    The 4^n Pauli products, lexicographic over {I, X, Y, Z} with the leftmost
    factor most significant (index 5 for n=2 is X⊗X).

    Under ``"minus_i_sigma_y"`` the Y element is -iσ_y = [[0, -1], [1, 0]],
    which makes every basis element a real matrix.
    """
    if n < 1:
        raise ArgumentError(f"pauli_basis needs n >= 1, got {n}")
    if y_convention not in Y_CONVENTIONS:
        raise ArgumentError(f"unknown y_convention {y_convention!r}; expected one of {Y_CONVENTIONS}")
    y = sigma_y() if y_convention == Y_STANDARD else -1j * sigma_y()
    singles = [identity(2), sigma_x(), y, sigma_z()]
    return [kron(*combo) for combo in itertools.product(singles, repeat=n)]


def pauli_labels(n: int) -> List[str]:
    return ["".join(combo) for combo in itertools.product(PAULI_LABELS, repeat=n)]


# -------------------------------------------------------
# FIDELITIES AND DISTANCES
# -------------------------------------------------------

def fidelity_pure(psi: StateVector, rho: DensityMatrix) -> float:
    """<ψ|ρ|ψ>, the state fidelity against a pure target."""
    if psi.dims != rho.dims:
        raise ArgumentError(f"dimension mismatch: {psi.dims} vs {rho.dims}")
    value = np.vdot(psi.data, rho.data @ psi.data)
    if abs(value.imag) > 1e-10:
        raise NumericalMethodError(f"fidelity has imaginary part {value.imag:.3e}")
    return float(min(max(value.real, 0.0), 1.0))


def _psd_sqrt(data: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (data + data.conj().T))
    w = np.where(w > _SQRT_CLIP, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity_mixed(rho: DensityMatrix, sigma: DensityMatrix, psd_tol: float = 1e-7) -> float:
    """
    Uhlmann fidelity (Tr sqrt(sqrt(σ) ρ sqrt(σ)))².

    Raises:
        ArgumentError: dims differ or an input has an eigenvalue below -psd_tol
    """
    if rho.dims != sigma.dims:
        raise ArgumentError(f"dimension mismatch: {rho.dims} vs {sigma.dims}")
    for name, m in (("rho", rho), ("sigma", sigma)):
        lowest = np.linalg.eigvalsh(m.data)[0]
        if lowest < -psd_tol:
            raise ArgumentError(f"{name} is not positive semidefinite (eigenvalue {lowest:.3e})")
    root = _psd_sqrt(sigma.data)
    inner = root @ rho.data @ root
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    w = np.where(w > _SQRT_CLIP, w, 0.0)
    value = float(np.sum(np.sqrt(w)) ** 2)
    return min(max(value, 0.0), 1.0)


def phase_distance(u: Operator, v: Operator) -> float:
    """
    Max entrywise distance between ``u`` and ``v`` after the best global
    phase has been taken off ``v``.
    """
    if u.data.shape != v.data.shape:
        raise ArgumentError(f"shape mismatch: {u.data.shape} vs {v.data.shape}")
    overlap = np.vdot(v.data.ravel(), u.data.ravel())
    if abs(overlap) < 1e-14:
        k = int(np.argmax(np.abs(v.data)))
        overlap = u.data.ravel()[k] * np.conj(v.data.ravel()[k])
    phase = np.exp(1j * np.angle(overlap)) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(u.data - phase * v.data)))


def ket_to_dm(psi: StateVector) -> DensityMatrix:
    return DensityMatrix.from_ket(psi)
