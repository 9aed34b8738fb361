#!/usr/bin/env python3
"""
Tests for the device Hamiltonians, frame changes, propagators, closed-form
gates and the gate-condition resolver.
"""

import logging
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqed_gates.exceptions import ArgumentError, PreconditionError, SingularityError
from cqed_gates.gates import entangler, w_gate
from cqed_gates.model import (
    closed_form,
    collective_sx,
    conditions_for_device,
    factorization_coefficients,
    free_hamiltonian,
    hamiltonian_effective,
    hamiltonian_interaction,
    hamiltonian_lab,
    hamiltonian_qubit_only,
    jc_dressed_energies,
    jc_dressed_states,
    jc_hamiltonian,
    nearest_index,
    propagator_factorized,
    propagator_qubit,
    resolve_conditions,
    three_qubit_closed_form,
    to_interaction_frame,
    two_qubit_closed_form,
)
from cqed_gates.models import DeviceSpec
from cqed_gates.qcore import (
    DensityMatrix,
    StateVector,
    annihilation,
    basis_state,
    dagger,
    identity,
    kron,
    matexp,
    phase_distance,
    sigma_x,
)

G = 2 * np.pi * 60.0


def _rk4(h_of_t, y0, t_final, steps):
    """Fixed-step RK4 for dy/dt = −iH(t)y; y may hold several columns."""
    dt = t_final / steps
    y = np.array(y0, dtype=complex)

    def f(t, v):
        return -1j * (h_of_t(t).data @ v)

    for k in range(steps):
        t = k * dt
        k1 = f(t, y)
        k2 = f(t + dt / 2, y + dt / 2 * k1)
        k3 = f(t + dt / 2, y + dt / 2 * k2)
        k4 = f(t + dt, y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def _rx_pair(theta):
    rx = matexp(sigma_x(), -0.5j * theta)
    return kron(rx, rx)


# -------------------------------------------------------
# collective operators
# -------------------------------------------------------

def test_collective_sx_spectrum():
    assert np.allclose(np.linalg.eigvalsh(collective_sx(2).data), [-1, 0, 0, 1])
    assert collective_sx(1).allclose(0.5 * sigma_x())


def test_collective_sx_squared_on_all_plus():
    plus = StateVector(np.ones(8), (2, 2, 2))
    sx = collective_sx(3)
    value = np.vdot(plus.data, (sx @ sx).data @ plus.data).real
    assert value == pytest.approx(9 / 4)


def test_collective_sx_rejects_zero_qubits():
    with pytest.raises(ArgumentError):
        collective_sx(0)


# -------------------------------------------------------
# Hamiltonians
# -------------------------------------------------------

def _spec(n_qubits=2, n_fock=4, g=1.0, delta=2.0, omega_rabi=3.0):
    return DeviceSpec.from_detuning(n_qubits=n_qubits, g=g, delta_r=delta, omega_rabi=omega_rabi,
                                    n_fock=n_fock, omega_q=50.0)


def test_lab_hamiltonian_is_hermitian_and_periodic():
    spec = _spec()
    period = 2 * np.pi / spec.omega_d
    for t in (0.0, 0.013, 0.2):
        h = hamiltonian_lab(spec, t)
        assert h.is_hermitian(1e-12)
        assert np.allclose(h.data, hamiltonian_lab(spec, t + period).data, atol=1e-9)


def test_interaction_hamiltonian_at_zero_time():
    spec = _spec(g=0.0)
    expected = kron(2.0 * spec.omega_rabi * collective_sx(2), identity(4))
    assert hamiltonian_interaction(spec, 0.0).allclose(expected)


def test_interaction_frame_needs_resonant_drive():
    spec = _spec().replace(omega_d=49.0)
    with pytest.raises(PreconditionError):
        hamiltonian_interaction(spec, 0.0)
    with pytest.raises(PreconditionError):
        hamiltonian_effective(spec, 0.0)


def test_effective_hamiltonian_quarter_period():
    spec = _spec(g=0.7, delta=2.0)
    t = np.pi / (2 * spec.delta_r)
    a = kron(identity((2, 2)), annihilation(4))
    sx = kron(collective_sx(2), identity(4))
    expected = 0.7 * ((-1j) * dagger(a) + 1j * a) @ sx
    assert hamiltonian_effective(spec, t).allclose(expected, 1e-12)


def test_effective_hamiltonian_commutator_is_collective():
    spec = _spec(g=0.7, delta=2.0, n_fock=5)
    t1, t2 = 0.3, 1.1
    h1, h2 = hamiltonian_effective(spec, t1), hamiltonian_effective(spec, t2)
    comm = (h1 @ h2 - h2 @ h1).data
    e1, e2 = np.exp(-1j * spec.delta_r * t1), np.exp(-1j * spec.delta_r * t2)
    a = annihilation(5)
    aad = (a @ dagger(a) - dagger(a) @ a)
    sx = collective_sx(2)
    expected = 0.49 * (np.conj(e1) * e2 - e1 * np.conj(e2)) * kron(sx @ sx, aad).data
    assert np.allclose(comm, expected, atol=1e-12)


def test_qubit_only_hamiltonian():
    spec = _spec()
    sx = collective_sx(2)
    expected = 2 * spec.omega_rabi * sx + 2 * spec.lam * (sx @ sx)
    assert hamiltonian_qubit_only(spec).allclose(expected)


def test_lambda_is_singular_on_resonance():
    spec = DeviceSpec(n_qubits=2, n_fock=4, omega_r=10.0, omega_q=10.0, g=1.0, omega_d=10.0, omega_rabi=1.0)
    with pytest.raises(SingularityError):
        _ = spec.lam
    with pytest.raises(SingularityError):
        factorization_coefficients(spec, 1.0)


def test_lab_and_interaction_frames_agree():
    spec = DeviceSpec(n_qubits=1, n_fock=4, omega_r=17.0, omega_q=20.0, g=0.5, omega_d=20.0, omega_rabi=1.0)
    t_final = 0.5
    psi0 = basis_state(spec.dims, 0).data
    lab = _rk4(lambda t: hamiltonian_lab(spec, t), psi0, t_final, 5000)
    rotating = _rk4(lambda t: hamiltonian_interaction(spec, t), psi0, t_final, 5000)
    moved = to_interaction_frame(spec, DensityMatrix.from_array(np.outer(lab, lab.conj()), spec.dims), t_final)
    assert np.allclose(moved.data, np.outer(rotating, rotating.conj()), atol=1e-8)


def test_free_hamiltonian_is_diagonal():
    h = free_hamiltonian(_spec()).data
    assert np.allclose(h, np.diag(np.diag(h)))


# -------------------------------------------------------
# propagators
# -------------------------------------------------------

def test_factorized_propagator_at_zero_is_identity():
    spec = _spec()
    assert propagator_factorized(spec, 0.0).allclose(identity(spec.dims), 1e-12)


def test_factorized_propagator_matches_integration():
    rng = np.random.default_rng(2024)
    n_fock = 20
    for _ in range(5):
        g = rng.uniform(0.2, 0.5)
        delta = rng.uniform(1.0, 2.0)
        t = rng.uniform(0.0, 4 * np.pi) / delta
        spec = _spec(g=g, delta=delta, n_fock=n_fock, omega_rabi=0.0)
        columns = [q * n_fock for q in range(4)]
        start = np.eye(4 * n_fock)[:, columns]
        integrated = _rk4(lambda s: hamiltonian_effective(spec, s), start, t, 3000)
        factorized = propagator_factorized(spec, t).data[:, columns]
        assert np.max(np.abs(integrated - factorized)) < 1e-6


def test_factorized_propagator_releases_resonator_after_a_period():
    spec = _spec(g=0.8, delta=1.5, n_fock=6, omega_rabi=0.0)
    t = 2 * np.pi / spec.delta_r
    u = propagator_factorized(spec, t).data.reshape(4, 6, 4, 6)
    qubit = propagator_qubit(spec, t).data
    for n in range(3):
        assert np.allclose(u[:, n, :, n], qubit, atol=1e-10)
    assert np.allclose(u[:, 0, :, 1], 0.0, atol=1e-10)


def test_propagator_qubit_needs_closed_loop():
    spec = _spec()
    with pytest.raises(PreconditionError):
        propagator_qubit(spec, 0.3 * 2 * np.pi / spec.delta_r)


def test_propagator_qubit_gives_x_rotation():
    conds, _ = resolve_conditions("x2", G, 0)
    assert phase_distance(propagator_qubit(conds), _rx_pair(-np.pi / 2)) < 1e-10


@pytest.mark.parametrize("family,index", [
    ("x2", 0), ("x2", 9), ("x2", 60),
    ("ent2", 1), ("ent2", 5), ("ent2", 30),
    ("x3", 0), ("x3", 4), ("x3", 60),
    ("ent3", 0), ("ent3", 4), ("ent3", 30),
])
def test_closed_form_equals_propagator(family, index):
    conds, _ = resolve_conditions(family, G, index)
    assert closed_form(conds).allclose(propagator_qubit(conds), 1e-9)


@settings(max_examples=30, deadline=None)
@given(omega_t=st.floats(-20.0, 20.0), lambda_t=st.floats(-20.0, 20.0))
def test_two_qubit_closed_form_factorizes(omega_t, lambda_t):
    sx = collective_sx(2)
    expected = matexp(sx, -2j * omega_t) @ matexp(sx @ sx, -2j * lambda_t)
    assert two_qubit_closed_form(omega_t, lambda_t).allclose(expected, 1e-10)


@settings(max_examples=30, deadline=None)
@given(b=st.floats(-10.0, 10.0), h=st.floats(-10.0, 10.0))
def test_three_qubit_closed_form_factorizes(b, h):
    sx = collective_sx(3)
    expected = matexp(sx, -1j * b * h) @ matexp(sx @ sx, -1j * b)
    assert three_qubit_closed_form(b, h).allclose(expected, 1e-10)


def test_closed_forms_are_unitary_and_commute_with_sx_squared():
    sx2 = collective_sx(2) @ collective_sx(2)
    sx3 = collective_sx(3) @ collective_sx(3)
    for x in np.linspace(0.0, 2 * np.pi, 20):
        for y in np.linspace(0.0, 2 * np.pi, 20):
            u2 = two_qubit_closed_form(x, y)
            u3 = three_qubit_closed_form(x, y)
            assert u2.is_unitary(1e-10) and u3.is_unitary(1e-10)
            assert np.allclose((u2 @ sx2 - sx2 @ u2).data, 0.0, atol=1e-10)
            assert np.allclose((u3 @ sx3 - sx3 @ u3).data, 0.0, atol=1e-10)


@pytest.mark.parametrize("index", [0, 2])
def test_x2_family_reaches_x_rotation(index):
    conds, _ = resolve_conditions("x2", G, index)
    assert phase_distance(closed_form(conds), _rx_pair(-np.pi / 2)) < 1e-10


@pytest.mark.parametrize("index", [1, 2, 5])
def test_ent2_family_reaches_entangler(index):
    conds, _ = resolve_conditions("ent2", G, index)
    assert phase_distance(closed_form(conds), entangler(2).matrix) < 1e-10


@pytest.mark.parametrize("index", [0, 1, 4])
def test_ent3_family_reaches_entangler(index):
    conds, _ = resolve_conditions("ent3", G, index)
    assert phase_distance(closed_form(conds), entangler(3).matrix) < 1e-10


@pytest.mark.parametrize("index", [0, 1, 4])
def test_x3_family_reaches_w_gate(index):
    conds, _ = resolve_conditions("x3", G, index)
    assert phase_distance(closed_form(conds), w_gate(3).matrix) < 1e-10


# -------------------------------------------------------
# gate conditions
# -------------------------------------------------------

def test_ent3_operating_point():
    g = 2 * np.pi * 20.0
    conds, _ = resolve_conditions("ent3", g, 0)
    assert conds.delta_r / (2 * np.pi) == pytest.approx(40.0)
    assert conds.t_gate == pytest.approx(0.025)
    assert conds.omega_rabi / (2 * np.pi) == pytest.approx(15.0)
    assert conds.b == pytest.approx(np.pi / 2)


def test_x2_index_sets_drive_ratio():
    conds, _ = resolve_conditions("x2", G, 4)
    assert conds.h == pytest.approx(4.5)
    assert conds.b == pytest.approx(np.pi)
    assert conds.delta_r * conds.t_gate == pytest.approx(2 * np.pi)


def test_weak_drive_is_reported_not_rejected(caplog):
    with caplog.at_level(logging.WARNING, logger="cqed_gates.model"):
        conds, report = resolve_conditions("x3", G, 0)
    assert report.ratio_g == pytest.approx(np.sqrt(2) / 4)
    assert not report.strong_driving
    assert report.violations()
    assert "strong-driving" in caplog.text
    assert conds.family == "x3"


def test_strong_drive_passes_report():
    _, report = resolve_conditions("ent2", G, 30)
    assert report.strong_driving
    assert report.violations() == []


def test_resolver_rejects_bad_input():
    with pytest.raises(ArgumentError):
        resolve_conditions("ent2", G, 0)
    with pytest.raises(ArgumentError):
        resolve_conditions("x4", G, 0)
    with pytest.raises(ArgumentError):
        resolve_conditions("x2", 0.0, 0)
    with pytest.raises(ArgumentError):
        resolve_conditions("x2", G, -1)


@pytest.mark.parametrize("family,index", [("x2", 9), ("ent2", 30), ("x3", 4), ("ent3", 7)])
def test_nearest_index_recovers_family_member(family, index):
    conds, _ = resolve_conditions(family, G, index)
    assert nearest_index(family, G, conds.omega_rabi) == index
    again, _ = conditions_for_device(conds.device(n_fock=4), family)
    assert again.integer_index == index


def test_conditions_for_device_checks_qubit_count():
    conds, _ = resolve_conditions("ent2", G, 3)
    with pytest.raises(ArgumentError):
        conditions_for_device(conds.device(), "ent3")


# -------------------------------------------------------
# Jaynes–Cummings
# -------------------------------------------------------

def test_dressed_energies():
    plus, minus = jc_dressed_energies(g=1.0, delta=0.0, n=0)
    assert plus - minus == pytest.approx(2.0)
    plus, minus = jc_dressed_energies(g=0.0, delta=3.0, n=2, omega_r=5.0)
    assert (plus, minus) == pytest.approx((16.5, 13.5))
    split0 = np.subtract(*jc_dressed_energies(1.0, 0.0, 0))
    split3 = np.subtract(*jc_dressed_energies(1.0, 0.0, 3))
    assert split3 / split0 == pytest.approx(2.0)


def test_dressed_states_diagonalize_the_doublet():
    g, delta, n = 0.7, 1.3, 2
    coupling = g * np.sqrt(n + 1)
    block = np.array([[delta / 2, coupling], [coupling, -delta / 2]])
    half = 0.5 * np.sqrt(4 * coupling ** 2 + delta ** 2)
    _, plus, minus = jc_dressed_states(g, delta, n)
    assert np.allclose(block @ plus, half * plus)
    assert np.allclose(block @ minus, -half * minus)


def test_vacuum_rabi_oscillation():
    g, n_fock = 1.0, 4
    h = jc_hamiltonian(10.0, 10.0, g, n_fock)
    excited_vacuum = basis_state((2, n_fock), (1, 0))
    ground_one_photon = basis_state((2, n_fock), (0, 1))
    half_period = matexp(h, -1j * np.pi / (2 * g)) @ excited_vacuum
    full_period = matexp(h, -1j * np.pi / g) @ excited_vacuum
    assert abs(np.vdot(ground_one_photon.data, half_period.data)) ** 2 == pytest.approx(1.0, abs=1e-10)
    assert abs(np.vdot(excited_vacuum.data, full_period.data)) ** 2 == pytest.approx(1.0, abs=1e-10)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
