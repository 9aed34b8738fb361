#!/usr/bin/env python3
"""
Tests for the master-equation integrator, collapse operators, observables
and the gate-scenario runs built on top of them.
"""

import logging
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

import numpy as np
import pytest

from cqed_gates.exceptions import ArgumentError, DivergenceError, PreconditionError
from cqed_gates.lindblad import (
    ACCURACY_TARGET,
    MIN_STEPS_PER_PERIOD,
    GateScenario,
    all_labels,
    choose_dt,
    collapse_operators_for,
    decoherence_error,
    fock_convergence,
    lindblad_rhs,
    noise_from_coherence,
    occupations,
    repeated_gate_fidelity,
    rotating_occupations,
    run_gate,
    solve,
)
from cqed_gates.model import resolve_conditions
from cqed_gates.models import NoiseSpec, SolveOptions
from cqed_gates.qcore import DensityMatrix, Operator, basis_state, sigma_x, tensor_states

G = 2 * np.pi * 60.0


def _excited():
    return DensityMatrix.from_ket(basis_state(2, 1))


def _zero_h(dim):
    return lambda t: Operator(np.zeros((dim, dim)))


# -------------------------------------------------------
# noise specs and collapse operators
# -------------------------------------------------------

def test_noise_from_coherence_rates():
    noise = noise_from_coherence(95.0, 70.0)
    assert noise.gamma1 == pytest.approx(1 / 95.0)
    assert noise.gamma_phi == pytest.approx(1 / 95.0 - 1 / 140.0)


def test_noise_rejects_negative_dephasing():
    with pytest.raises(ArgumentError):
        NoiseSpec.from_coherence(10.0, 30.0)
    with pytest.raises(ArgumentError):
        NoiseSpec.from_coherence(0.0, 1.0)


def test_tc_sets_equal_coherence_times():
    noise = NoiseSpec.from_tc(2.0)
    assert noise.gamma1 == pytest.approx(0.5)
    assert noise.gamma_phi == pytest.approx(0.25)


def test_collapse_operator_order_and_count():
    noise = NoiseSpec(kappa=0.3, gamma1=0.1, gamma_phi=0.2)
    ops = collapse_operators_for(2, 5, noise)
    assert len(ops) == 5
    assert all(op.dims == (2, 2, 5) for op in ops)
    # first operator acts on the resonator only
    photon = tensor_states(basis_state((2, 2), 0), basis_state(5, 1))
    out = ops[0].apply(photon)
    assert np.linalg.norm(out) == pytest.approx(np.sqrt(0.3))


def test_zero_rates_give_no_operators():
    assert collapse_operators_for(3, 4, NoiseSpec()) == []
    assert len(collapse_operators_for(2, 4, NoiseSpec(gamma1=(0.1, 0.0)))) == 1


def test_resonator_loss_needs_resonator():
    with pytest.raises(ArgumentError):
        collapse_operators_for(2, None, NoiseSpec(kappa=1.0))


# -------------------------------------------------------
# generator
# -------------------------------------------------------

def test_decay_moves_population_to_ground():
    gamma = 0.4
    cs = collapse_operators_for(1, None, NoiseSpec(gamma1=gamma))
    rhs = lindblad_rhs(Operator(np.zeros((2, 2))), _excited(), cs)
    assert np.allclose(rhs, gamma * np.diag([1.0, -1.0]))


def test_dephasing_rate_on_coherence():
    gamma_phi = 0.3
    plus = DensityMatrix.from_array(0.5 * np.ones((2, 2)))
    cs = collapse_operators_for(1, None, NoiseSpec(gamma_phi=gamma_phi))
    rhs = lindblad_rhs(Operator(np.zeros((2, 2))), plus, cs)
    assert rhs[0, 1] == pytest.approx(-2 * gamma_phi * 0.5)
    assert rhs[0, 0] == pytest.approx(0.0)


def test_generator_is_traceless():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a @ a.conj().T
    rho = DensityMatrix.from_array(rho / np.trace(rho).real, (2, 2))
    h = Operator(a + a.conj().T, (2, 2))
    cs = collapse_operators_for(2, None, NoiseSpec(gamma1=0.2, gamma_phi=0.1))
    assert abs(np.trace(lindblad_rhs(h, rho, cs))) < 1e-12


def test_rhs_rejects_dims_mismatch():
    with pytest.raises(ArgumentError):
        lindblad_rhs(Operator(np.zeros((4, 4)), (2, 2)), _excited(), [])


# -------------------------------------------------------
# integrator
# -------------------------------------------------------

def test_zero_hamiltonian_keeps_state():
    rho0 = DensityMatrix.from_array(np.diag([0.25, 0.75]))
    traj = solve(_zero_h(2), rho0, None, SolveOptions(t_final=1.0, dt=0.1, resonator=False))
    assert np.allclose(traj.final_state.data, rho0.data)


def test_energy_relaxation_over_t1():
    t1 = 20.0
    opts = SolveOptions(t_final=t1, dt=t1 / 1000, record_every=1000, resonator=False)
    traj = solve(_zero_h(2), _excited(), NoiseSpec(gamma1=1 / t1), opts)
    assert traj.final_state.data[1, 1].real == pytest.approx(np.exp(-1.0), abs=1e-6)
    assert traj.max_trace_drift < 1e-10


def test_rabi_oscillation():
    omega = 2.0
    h = lambda t: omega * sigma_x()
    opts = SolveOptions(t_final=np.pi / (2 * omega), dt=1e-3, record_every=10, resonator=False)
    traj = solve(h, DensityMatrix.from_ket(basis_state(2, 0)), None, opts)
    assert traj.final_state.data[1, 1].real == pytest.approx(1.0, abs=1e-8)


def test_record_stride_keeps_initial_and_final():
    opts = SolveOptions(t_final=1.0, dt=0.1, record_every=3, resonator=False)
    traj = solve(_zero_h(2), _excited(), None, opts)
    assert traj.steps == 10
    assert np.allclose(traj.times, [0.0, 0.3, 0.6, 0.9, 1.0])
    assert len(traj.states) == 5


def test_observables_are_recorded():
    opts = SolveOptions(t_final=1.0, dt=0.01, record_every=50, resonator=False)
    traj = solve(lambda t: sigma_x(), _excited(), None, opts, e_ops={"x": sigma_x()})
    assert traj.observables["x"].shape == traj.times.shape
    assert np.allclose(traj.observables["x"], 0.0, atol=1e-10)


def test_coarse_step_is_reported(caplog):
    opts = SolveOptions(t_final=0.1, dt=0.02, resonator=False)
    with caplog.at_level(logging.WARNING, logger="cqed_gates.lindblad"):
        solve(lambda t: 10.0 * sigma_x(), _excited(), None, opts)
    assert "does not resolve the fastest frequency" in caplog.text


def test_non_finite_state_raises_divergence():
    def h(t):
        return Operator(np.full((2, 2), np.nan)) if t > 0.6 else sigma_x()

    opts = SolveOptions(t_final=1.0, dt=0.01, record_every=100, resonator=False)
    with pytest.raises(DivergenceError) as err:
        solve(h, _excited(), None, opts)
    assert err.value.step > 0


def test_hamiltonian_shape_is_checked():
    opts = SolveOptions(t_final=1.0, dt=0.1, resonator=False)
    with pytest.raises(ArgumentError):
        solve(_zero_h(4), _excited(), None, opts)


def test_solve_options_validation():
    with pytest.raises(ArgumentError):
        SolveOptions(t_final=0.01, dt=0.1)


def test_choose_dt_resolves_fastest_frequency():
    dt = choose_dt(lambda t: 5.0 * sigma_x(), 10.0, steps_per_period=100)
    assert dt == pytest.approx(2 * np.pi / (100 * 10.0))
    assert choose_dt(_zero_h(2), 3.0, 30) == pytest.approx(0.1)


def test_choose_dt_meets_accuracy_target():
    h = lambda t: 5.0 * sigma_x()
    dt = choose_dt(h, 10.0)
    # width 10 rad/µs over 10 µs: 10 * 10 * (10 dt)^4 / 120 = target
    assert dt == pytest.approx((120 * ACCURACY_TARGET / 100.0) ** 0.25 / 10.0)
    assert dt < 2 * np.pi / (MIN_STEPS_PER_PERIOD * 10.0)
    assert choose_dt(h, 10.0, horizon=160.0) == pytest.approx(dt / 2)
    assert choose_dt(h, 10.0, tol=16 * ACCURACY_TARGET) == pytest.approx(2 * dt)


def test_choose_dt_never_drops_below_minimum_resolution():
    dt = choose_dt(lambda t: 5.0 * sigma_x(), 10.0, tol=1.0)
    assert dt == pytest.approx(2 * np.pi / (MIN_STEPS_PER_PERIOD * 10.0))


# -------------------------------------------------------
# occupations
# -------------------------------------------------------

def test_occupations_sum_to_one():
    rho0 = DensityMatrix.from_ket(tensor_states(basis_state((2, 2), 2), basis_state(3, 1)))
    traj = solve(_zero_h(12), rho0, None, SolveOptions(t_final=1.0, dt=0.5))
    occ = occupations(traj, all_labels(2))
    total = sum(occ.values())
    assert np.allclose(total, 1.0)
    assert np.allclose(occ["10"], 1.0)


def test_occupations_reject_bad_label():
    rho0 = DensityMatrix.from_ket(tensor_states(basis_state((2, 2), 0), basis_state(3, 0)))
    traj = solve(_zero_h(12), rho0, None, SolveOptions(t_final=1.0, dt=0.5))
    with pytest.raises(ArgumentError):
        occupations(traj, ["012"])


# -------------------------------------------------------
# gate scenarios
# -------------------------------------------------------

def _scenario(family, index, **kwargs):
    conds, _ = resolve_conditions(family, G, index)
    return GateScenario(conds, **kwargs)


def test_scenario_validation():
    conds, _ = resolve_conditions("ent2", G, 1)
    with pytest.raises(PreconditionError):
        GateScenario(conds, noise=NoiseSpec(gamma1=0.01), frame="effective")
    with pytest.raises(ArgumentError):
        GateScenario(conds, n_fock=4, fock=4)
    with pytest.raises(ArgumentError):
        GateScenario(conds, fidelity_mode="partial")
    with pytest.raises(ArgumentError):
        GateScenario(conds, initial_qubits="012")


def test_effective_frame_reproduces_closed_form():
    run = run_gate(_scenario("ent2", 1, frame="effective"))
    assert run.fidelities[0] > 1 - 1e-6


def test_x_gate_at_published_drive_in_effective_frame():
    # index 9 at g/2π = 60 MHz puts Ω_R/2π near 200 MHz
    scenario = _scenario("x2", 9, frame="effective")
    assert scenario.conds.omega_rabi / (2 * np.pi) == pytest.approx(201.5, abs=0.1)
    assert run_gate(scenario).fidelities[0] >= 0.998


def test_noiseless_repeated_gates_are_exact():
    fids = repeated_gate_fidelity(_scenario("ent3", 0, frame="effective"), 3, with_noise=False)
    assert len(fids) == 3
    assert np.allclose(fids, 1.0, atol=1e-6)


def test_noiseless_repeat_runs_the_master_equation():
    scenario = _scenario("ent2", 1, noise=NoiseSpec.from_tc(2.0))
    clean = repeated_gate_fidelity(scenario, 2, with_noise=False)
    assert clean == run_gate(scenario.replace(noise=NoiseSpec()), 2).fidelities
    assert clean != repeated_gate_fidelity(scenario, 2)


def test_driven_gate_stays_positive():
    run = run_gate(_scenario("ent2", 1), record_every=1)
    assert run.trajectory.min_eigenvalue > -1e-7
    assert run.trajectory.max_trace_drift < 1e-7
    noisy = run_gate(_scenario("ent2", 1, noise=NoiseSpec.from_tc(2.0)), record_every=1)
    assert noisy.trajectory.min_eigenvalue > -1e-7


def test_run_gate_needs_a_gate():
    with pytest.raises(ArgumentError):
        run_gate(_scenario("ent2", 1), 0)


@pytest.mark.slow
def test_noiseless_bell_gate_in_interaction_frame():
    run = run_gate(_scenario("ent2", 30))
    assert run.fidelities[0] >= 0.99


@pytest.mark.slow
def test_trace_mode_is_at_least_projection():
    scenario = _scenario("ent2", 5)
    project = run_gate(scenario).fidelities[0]
    traced = run_gate(scenario.replace(fidelity_mode="trace")).fidelities[0]
    assert traced >= project - 1e-12


@pytest.mark.slow
def test_bell_populations_cross_at_gate_time():
    scenario = _scenario("ent2", 30)
    run = run_gate(scenario, record_every=200)
    occ = rotating_occupations(scenario.device, run.trajectory, ["00", "11"])
    assert occ["00"][0] == pytest.approx(1.0)
    assert occ["00"][-1] == pytest.approx(0.5, abs=0.02)
    assert occ["11"][-1] == pytest.approx(0.5, abs=0.02)


@pytest.mark.slow
def test_noisy_fidelity_decreases_gate_by_gate():
    scenario = _scenario("ent2", 60, noise=NoiseSpec.from_tc(2.0))
    fids = run_gate(scenario, 3).fidelities
    assert all(a > b for a, b in zip(fids, fids[1:]))


@pytest.mark.slow
def test_decoherence_error_is_positive():
    scenario = _scenario("ent2", 5, noise=NoiseSpec.from_tc(1.0))
    assert decoherence_error(scenario) > 0


@pytest.mark.slow
def test_fock_truncation_is_converged():
    _, _, shift = fock_convergence(_scenario("ent2", 5))
    assert shift < 1e-5


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
