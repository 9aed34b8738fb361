#!/usr/bin/env python3
"""
Tests for the gate library: fixed gates, oracles and their decompositions,
diffusion, the one-step entanglers, coupling evolutions and circuits.
"""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

import numpy as np
import orjson
import pytest

from cqed_gates.exceptions import ArgumentError
from cqed_gates.gates import (
    GATE_NAMES,
    apply_circuit,
    bell_circuit,
    circuit_unitary,
    cphase_evolution,
    decomposition_core2,
    diffusion,
    entangler,
    gate,
    gate_to_json,
    ghz_circuit,
    oracle,
    oracle_decomposed2,
    oracle_decomposed3,
    sqrt_iswap_evolution,
    w_gate,
)
from cqed_gates.qcore import StateVector, basis_state, identity, kron, phase_distance


def _ket(n, index):
    return basis_state((2,) * n, index)


# -------------------------------------------------------
# gate table
# -------------------------------------------------------

@pytest.mark.parametrize("name", [n for n in GATE_NAMES if n not in ("RX", "RY", "RZ")])
def test_fixed_gates_are_unitary(name):
    assert gate(name).matrix.is_unitary()


def test_rotation_gates_need_one_angle():
    assert gate("rx", np.pi).matrix.is_unitary()
    with pytest.raises(ArgumentError):
        gate("RX")
    with pytest.raises(ArgumentError):
        gate("H", 0.1)
    with pytest.raises(ArgumentError):
        gate("SWAPPY")


def test_hadamard_from_rotations():
    h = gate("H").matrix
    built = np.exp(0.5j * np.pi) * (gate("RX", np.pi).matrix @ gate("RY", np.pi / 2).matrix)
    assert h.allclose(built, 1e-12)


def test_cnot_from_hadamards_and_cphase():
    hh = kron(identity(2), gate("H").matrix)
    assert gate("CNOT").matrix.allclose(hh @ gate("CP").matrix @ hh, 1e-12)


def test_cnot_truth_table():
    cnot = gate("CNOT").matrix
    for source, target in [(0, 0), (1, 1), (2, 3), (3, 2)]:
        assert np.allclose((cnot @ _ket(2, source)).data, _ket(2, target).data)


def test_toffoli_and_fredkin():
    assert np.allclose((gate("TOFFOLI").matrix @ _ket(3, 6)).data, _ket(3, 7).data)
    assert np.allclose((gate("FREDKIN").matrix @ _ket(3, 5)).data, _ket(3, 6).data)
    assert np.allclose((gate("FREDKIN").matrix @ _ket(3, 1)).data, _ket(3, 1).data)


def test_gate_qubits_default_and_override():
    assert gate("CNOT").qubits == (0, 1)
    assert gate("CNOT", qubits=(2, 0)).qubits == (2, 0)


# -------------------------------------------------------
# W gate and oracles
# -------------------------------------------------------

def test_single_w_gate():
    out = w_gate(1).matrix @ _ket(1, 0)
    assert np.allclose(out.data, np.array([1j, 1]) / np.sqrt(2))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_w_gate_makes_uniform_superposition(n):
    out = w_gate(n).matrix @ _ket(n, 0)
    assert np.allclose(np.abs(out.data), 2 ** (-n / 2))


@pytest.mark.parametrize("n", [2, 3])
def test_oracle_flips_only_marked_state(n):
    for marked in range(2 ** n):
        diag = np.diag(oracle(n, marked).matrix.data)
        expected = np.ones(2 ** n)
        expected[marked] = -1
        assert np.allclose(diag, expected)


def test_oracle_rejects_out_of_range():
    with pytest.raises(ArgumentError):
        oracle(2, 4)


@pytest.mark.parametrize("marked", ["00", "01", "10", "11"])
def test_two_qubit_decomposition(marked):
    built = oracle_decomposed2(marked).matrix
    assert phase_distance(built, oracle(2, int(marked, 2)).matrix) < 1e-10


def test_two_qubit_core_is_an_involution():
    u = decomposition_core2("11")
    assert (u @ u).allclose(identity((2, 2)))


def test_two_qubit_cores_are_keyed_by_the_oracle_they_build():
    y = np.array([[0, -1j], [1j, 0]])
    assert np.allclose(decomposition_core2("01").data[:2, :2], y)
    assert np.allclose(decomposition_core2("00").data[:2, :2], -y)
    assert np.allclose(decomposition_core2("10").data[2:, 2:], -y)
    assert np.allclose(decomposition_core2("11").data[2:, 2:], y)


def test_reversed_ordering_does_not_give_the_oracle():
    built = oracle_decomposed2("11", ordering="vinv_u_v").matrix
    assert phase_distance(built, oracle(2, 3).matrix) > 0.5


def test_unknown_ordering_is_rejected():
    with pytest.raises(ArgumentError):
        oracle_decomposed2("11", ordering="u_v")


@pytest.mark.parametrize("marked", range(8))
def test_three_qubit_decomposition(marked):
    built = oracle_decomposed3(format(marked, "03b")).matrix
    assert phase_distance(built, oracle(3, marked).matrix) < 1e-10


def test_marked_string_validation():
    with pytest.raises(ArgumentError):
        oracle_decomposed3("12")
    with pytest.raises(ArgumentError):
        oracle_decomposed2("011")


# -------------------------------------------------------
# diffusion
# -------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3])
def test_diffusion_reflects_about_prepared_state(n):
    s = (w_gate(n).matrix @ _ket(n, 0)).data
    reflection = 2 * np.outer(s, s.conj()) - np.eye(2 ** n)
    d = diffusion(n).matrix
    assert phase_distance(d, type(d)(reflection, d.dims)) < 1e-10


def test_diffusion_forms_agree():
    assert phase_distance(diffusion(3, "propagator").matrix, diffusion(3, "circuit").matrix) < 1e-10


def test_propagator_diffusion_is_three_qubit_only():
    with pytest.raises(ArgumentError):
        diffusion(2, "propagator")
    with pytest.raises(ArgumentError):
        diffusion(3, "lattice")


def test_diffusion_squares_to_identity():
    d = diffusion(3).matrix
    assert phase_distance(d @ d, identity((2, 2, 2))) < 1e-10


# -------------------------------------------------------
# entanglers
# -------------------------------------------------------

def test_two_qubit_entangler_prepares_bell_state():
    out = entangler(2).matrix @ _ket(2, 0)
    assert np.allclose(out.data, np.array([1, 0, 0, -1j]) / np.sqrt(2))
    assert out.probabilities() == pytest.approx([0.5, 0, 0, 0.5])


def test_three_qubit_entangler_prepares_ghz_state():
    out = entangler(3).matrix @ _ket(3, 0)
    assert np.allclose(out.data[[0, 7]], np.array([1, -1j]) / np.sqrt(2))
    assert np.allclose(out.data[1:7], 0.0)


def test_entangler_fourth_power():
    u = entangler(2).matrix
    assert (u @ u @ u @ u).allclose(-1 * identity((2, 2)), 1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_entangler_commutes_with_global_flip(n):
    u = entangler(n).matrix
    x = kron(*[gate("X").matrix] * n)
    assert (u @ x).allclose(x @ u, 1e-12)


def test_entangler_qubit_range():
    with pytest.raises(ArgumentError):
        entangler(4)


# -------------------------------------------------------
# coupling evolutions
# -------------------------------------------------------

def test_sqrt_iswap_evolution():
    g = 2.0
    assert sqrt_iswap_evolution(g, 0.0).matrix.allclose(identity((2, 2)))
    assert sqrt_iswap_evolution(g, np.pi / (2 * g)).matrix.allclose(gate("ISWAP").matrix, 1e-12)
    half = sqrt_iswap_evolution(g, np.pi / (4 * g)).matrix
    assert half.allclose(gate("SQRT_ISWAP").matrix, 1e-12)
    assert (half @ half).allclose(gate("ISWAP").matrix, 1e-12)


def test_cphase_evolution():
    j = 3.0
    u = cphase_evolution(j, np.pi / (2 * j)).matrix
    assert phase_distance(u, gate("CP").matrix) < 1e-12
    assert np.angle(u.data[0, 0]) == pytest.approx(np.pi / 4)


def test_coupling_must_be_positive():
    with pytest.raises(ArgumentError):
        sqrt_iswap_evolution(0.0, 1.0)
    with pytest.raises(ArgumentError):
        cphase_evolution(-1.0, 1.0)


# -------------------------------------------------------
# circuits
# -------------------------------------------------------

def test_bell_circuit():
    out = apply_circuit(bell_circuit(), _ket(2, 0))
    assert np.allclose(out.data, np.array([1, 0, 0, 1]) / np.sqrt(2))


def test_ghz_circuit_and_intermediate_state():
    circuit = ghz_circuit()
    out = apply_circuit(circuit, _ket(3, 0))
    assert np.allclose(out.data[[0, 7]], 1 / np.sqrt(2))
    middle = apply_circuit(circuit[:1], _ket(3, 0))
    expected = np.zeros(8)
    expected[[0, 4]] = 1 / np.sqrt(2)
    assert np.allclose(middle.data, expected)


def test_circuit_on_non_adjacent_qubits():
    out = apply_circuit([gate("CNOT", qubits=(0, 2))], _ket(3, 4))
    assert np.allclose(out.data, _ket(3, 5).data)


def test_circuit_unitary_matches_product():
    expected = gate("CNOT").matrix @ kron(gate("H").matrix, identity(2))
    assert circuit_unitary(bell_circuit(), 2).allclose(expected, 1e-12)


def test_apply_circuit_validates_targets():
    with pytest.raises(ArgumentError):
        apply_circuit([gate("CNOT", qubits=(0, 3))], _ket(3, 0))
    with pytest.raises(ArgumentError):
        apply_circuit([gate("X")], StateVector(np.ones(3)))


def test_gate_to_json():
    record = orjson.loads(gate_to_json(gate("CP")))
    assert record["name"] == "CP"
    assert record["dims"] == [2, 2]
    assert record["qubits"] == [0, 1]
    assert record["matrix"][3][3] == [-1.0, 0.0]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
