"""
Registry of named experiments.

Each scenario declares pinned defaults (in config units: GHz, MHz, µs), the
list of independent work items it splits into, a pure function evaluating
one item, and a writer that turns the ordered results into artifacts.
The runner owns concurrency and the manifest; nothing here prints.

Config sections:
    device  g_mhz, omega_rabi_mhz, omega_q_ghz, n_fock
    noise   kappa_mhz, t1_us, t2_us, tc_us (tc_us wins over t1_us/t2_us)
    params  scenario-specific, listed in each scenario's defaults
"""

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from .algorithms import deutsch_jozsa, grover_ideal, grover_noisy_sweep, grover_optimal_iterations
from .device import anharmonicity, charge_dispersion, cpb_sweep, transmon_regime
from .exceptions import ArgumentError, ConfigError, CqedError
from .gates import entangler
from .lindblad import (
    GateScenario,
    all_labels,
    choose_dt,
    initial_state,
    repeated_gate_fidelity,
    rotating_occupations,
    run_gate,
    solve,
)
from .model import hamiltonian_interaction, nearest_index, resolve_conditions
from .models import CpbParams, GateConditions, NoiseSpec, ScenarioConfig, SolveOptions, SweepAxis
from .qpt import (
    apply_process,
    chi_bar_export,
    chi_ideal,
    chi_linear_inversion,
    lindblad_channel,
    mean_fidelity_from_outputs,
    process_fidelity,
    reconstruction_residual,
    tomographic_inputs,
    tomographic_kets,
)
from .utils import angular_to_mhz, ghz_to_angular, mhz_to_angular, write_csv, write_json

_log = logging.getLogger(__name__)


# -------------------------------------------------------
# CONSTANTS
# -------------------------------------------------------

DEVICE_KEYS = ("g_mhz", "omega_rabi_mhz", "omega_q_ghz", "n_fock")
NOISE_KEYS = ("kappa_mhz", "t1_us", "t2_us", "tc_us")

DEFAULT_DEVICE = {"g_mhz": 60.0, "omega_q_ghz": 4.8, "n_fock": 10}
DEFAULT_NOISE = {"kappa_mhz": 0.0, "t1_us": 95.0, "t2_us": 70.0}

# κ above this fraction of ω_q is reported as a unit mistake
KAPPA_SANITY_FRACTION = 0.01

# Samples per gate window in the dynamics scenarios
DYNAMICS_SAMPLES = 200


@dataclass(frozen=True)
class Scenario:
    """
    A named experiment.

    Attributes:
        name: Registry key
        description: One line for --list-scenarios
        device: Default device section
        noise: Default noise section
        params: Default params section; its keys are the accepted params
        sweep: Default swept axis, if the scenario sweeps
        sweepable: Parameters a sweep may name
        points: cfg → list of independent work items
        evaluate: (cfg, item) → result; pure and thread-safe
        write: (cfg, items, results, out_dir) → summary dict
    """
    name: str
    description: str
    points: Callable[[ScenarioConfig], List[Any]]
    evaluate: Callable[[ScenarioConfig, Any], Any]
    write: Callable[[ScenarioConfig, List[Any], List[Any], Path], Dict[str, Any]]
    device: Dict[str, Any] = field(default_factory=dict)
    noise: Dict[str, Any] = field(default_factory=dict)
    params: Dict[str, Any] = field(default_factory=dict)
    sweep: Optional[SweepAxis] = None
    sweepable: Tuple[str, ...] = ()


REGISTRY: Dict[str, Scenario] = {}


def register(scenario: Scenario) -> Scenario:
    REGISTRY[scenario.name] = scenario
    return scenario


def get_scenario(name: str) -> Scenario:
    if name not in REGISTRY:
        raise ConfigError(
            f"unknown scenario {name!r}",
            [f"scenario {name!r} is not in the registry: {', '.join(sorted(REGISTRY))}"],
        )
    return REGISTRY[name]


# -------------------------------------------------------
# CONFIG RESOLUTION
# -------------------------------------------------------

def resolve(cfg: ScenarioConfig) -> ScenarioConfig:
    """Overlay a config on its scenario's defaults."""
    scenario = get_scenario(cfg.scenario)
    return ScenarioConfig(
        scenario=cfg.scenario,
        device={**scenario.device, **cfg.device},
        noise={**scenario.noise, **cfg.noise},
        params={**scenario.params, **cfg.params},
        sweep=cfg.sweep or scenario.sweep,
        output_dir=cfg.output_dir,
        seed=cfg.seed,
    )


def with_value(cfg: ScenarioConfig, key: str, value: Any) -> ScenarioConfig:
    """Copy of ``cfg`` with one device/noise/params key replaced."""
    if key in DEVICE_KEYS:
        return replace(cfg, device={**cfg.device, key: value})
    if key in NOISE_KEYS:
        noise = {**cfg.noise, key: value}
        if key == "tc_us":
            noise.pop("t1_us", None)
            noise.pop("t2_us", None)
        return replace(cfg, noise=noise)
    return replace(cfg, params={**cfg.params, key: value})


def noise_spec(cfg: ScenarioConfig) -> NoiseSpec:
    noise = cfg.noise
    kappa = mhz_to_angular(float(noise.get("kappa_mhz", 0.0)))
    if noise.get("tc_us"):
        return NoiseSpec.from_tc(float(noise["tc_us"]), kappa)
    if noise.get("t1_us") and noise.get("t2_us"):
        return NoiseSpec.from_coherence(float(noise["t1_us"]), float(noise["t2_us"]), kappa)
    return NoiseSpec(kappa=kappa)


def gate_conditions(cfg: ScenarioConfig) -> GateConditions:
    """Operating point from params.family with params.index, or the index nearest device.omega_rabi_mhz."""
    family = cfg.params["family"]
    g = mhz_to_angular(float(cfg.device["g_mhz"]))
    index = cfg.params.get("index")
    if index is None:
        if "omega_rabi_mhz" not in cfg.device:
            raise ArgumentError(f"{cfg.scenario} needs params.index or device.omega_rabi_mhz")
        index = nearest_index(family, g, mhz_to_angular(float(cfg.device["omega_rabi_mhz"])))
    conds, _ = resolve_conditions(family, g, int(index))
    return conds


def gate_scenario(cfg: ScenarioConfig) -> GateScenario:
    return GateScenario(
        conds=gate_conditions(cfg),
        noise=noise_spec(cfg),
        n_fock=int(cfg.device["n_fock"]),
        fock=int(cfg.params.get("fock", 0)),
        initial_qubits=str(cfg.params.get("initial", "")),
        omega_q=ghz_to_angular(float(cfg.device["omega_q_ghz"])),
    )


def derived(cfg: ScenarioConfig) -> Dict[str, Any]:
    """Quantities resolved from the config, for the manifest."""
    if "family" not in cfg.params:
        return {}
    conds = gate_conditions(cfg)
    _, report = resolve_conditions(conds.family, conds.g, conds.integer_index)
    data = conds.to_dict()
    data.update(
        delta_r_mhz=angular_to_mhz(conds.delta_r),
        lam_mhz=angular_to_mhz(conds.lam),
        omega_rabi_mhz=angular_to_mhz(conds.omega_rabi),
        validity=report.to_dict(),
        noise=noise_spec(cfg).to_dict(),
    )
    return data


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _type_violations(cfg: ScenarioConfig, scenario: Scenario) -> List[str]:
    """Values whose JSON type cannot be what the key expects."""
    found = []
    for section, values in (("device", cfg.device), ("noise", cfg.noise)):
        for key, value in values.items():
            if key not in DEVICE_KEYS + NOISE_KEYS:
                continue
            if not _is_number(value):
                found.append(f"{section}.{key} must be a finite number, got {value!r}")
        if section == "device" and "n_fock" in values and _is_number(values["n_fock"]):
            if values["n_fock"] != int(values["n_fock"]) or values["n_fock"] < 2:
                found.append(f"device.n_fock must be an integer >= 2, got {values['n_fock']!r}")
    for key, value in cfg.params.items():
        if key not in scenario.params:
            continue
        default = scenario.params.get(key)
        if value is None and (default is None or key == "index"):
            continue
        if isinstance(default, bool):
            ok = isinstance(value, bool)
        elif isinstance(default, int):
            ok = _is_number(value) and value == int(value)
        elif isinstance(default, float) or default is None:
            ok = _is_number(value)
        elif isinstance(default, str):
            ok = isinstance(value, str)
        elif isinstance(default, (list, tuple)):
            ok = isinstance(value, (list, tuple))
        else:
            ok = True
        if not ok:
            found.append(f"params.{key} has the wrong type: {value!r} (default {default!r})")
    return found


def validate(cfg: ScenarioConfig) -> List[str]:
    """
    Every problem with a config, as human-readable strings.

    Checks registry membership, unknown keys, sweep targets, noise
    consistency, κ against ω_q, and that the gate conditions resolve.
    Never touches the filesystem.
    """
    if cfg.scenario not in REGISTRY:
        return [f"scenario {cfg.scenario!r} is not in the registry: {', '.join(sorted(REGISTRY))}"]
    scenario = REGISTRY[cfg.scenario]
    violations = []
    for key in cfg.device:
        if key not in DEVICE_KEYS:
            violations.append(f"unknown device key {key!r}; expected one of {DEVICE_KEYS}")
    for key in cfg.noise:
        if key not in NOISE_KEYS:
            violations.append(f"unknown noise key {key!r}; expected one of {NOISE_KEYS}")
    for key in cfg.params:
        if key not in scenario.params:
            violations.append(f"unknown params key {key!r} for {cfg.scenario}; expected one of {sorted(scenario.params)}")
    if cfg.sweep is not None and cfg.sweep.parameter not in scenario.sweepable:
        violations.append(
            f"{cfg.scenario} cannot sweep {cfg.sweep.parameter!r}; sweepable: {list(scenario.sweepable)}"
        )
    violations.extend(_type_violations(cfg, scenario))
    if violations:
        return violations

    merged = resolve(cfg)
    try:
        noise = noise_spec(merged)
    except ArgumentError as e:
        violations.append(str(e))
        noise = None
    if noise is not None and "omega_q_ghz" in merged.device:
        omega_q = ghz_to_angular(float(merged.device["omega_q_ghz"]))
        if noise.kappa > KAPPA_SANITY_FRACTION * omega_q:
            violations.append(
                f"κ/2π = {merged.noise.get('kappa_mhz')} MHz is not small against ω_q/2π = "
                f"{merged.device['omega_q_ghz']} GHz"
            )
    if "family" in merged.params:
        try:
            gate_conditions(merged)
        except CqedError as e:
            violations.append(f"gate conditions do not resolve: {e}")
    if merged.sweep is not None:
        axis = merged.sweep
        if axis.min > axis.max:
            violations.append(f"sweep {axis.parameter}: min {axis.min} is above max {axis.max}")
        elif axis.parameter in NOISE_KEYS:
            for end in (axis.min, axis.max):
                try:
                    noise_spec(with_value(merged, axis.parameter, end))
                except ArgumentError as e:
                    violations.append(f"sweep {axis.parameter}={end}: {e}")
    return violations


def _sweep_values(cfg: ScenarioConfig) -> List[Any]:
    values = cfg.sweep.values()
    if cfg.sweep.parameter in ("fock", "n_fock"):
        return [int(round(v)) for v in values]
    return [float(v) for v in values]


# -------------------------------------------------------
# cpb-spectrum
# -------------------------------------------------------

def _cpb_points(cfg):
    return [float(r) for r in cfg.params["ratios"]]


def _cpb_evaluate(cfg, ratio):
    p = CpbParams(e_c=1.0, e_j=ratio, charge_cutoff=int(cfg.params["charge_cutoff"]))
    grid = cfg.sweep.values()
    return {
        "levels": cpb_sweep(p, grid, int(cfg.params["k_levels"])),
        "charge_dispersion": charge_dispersion(p),
        "anharmonicity": anharmonicity(p),
        "transmon_regime": transmon_regime(p),
    }


def _cpb_write(cfg, ratios, results, out_dir):
    k = int(cfg.params["k_levels"])
    grid = cfg.sweep.values()
    rows = []
    for ratio, result in zip(ratios, results):
        for n_g, levels in zip(grid, result["levels"]):
            rows.append([ratio, float(n_g)] + [float(e) for e in levels])
    write_csv(out_dir / "cpb_spectrum.csv", ["e_j_over_e_c", "n_g"] + [f"E{m}" for m in range(k)], rows)
    table = [
        {
            "e_j_over_e_c": ratio,
            "sqrt_8ej_over_ec": math.sqrt(8.0 * ratio),
            "charge_dispersion": r["charge_dispersion"],
            "anharmonicity": r["anharmonicity"],
            "transmon_regime": r["transmon_regime"],
        }
        for ratio, r in zip(ratios, results)
    ]
    write_json(out_dir / "transmon.json", {"energy_unit": "E_C", "ratios": table})
    return {"ratios": len(ratios), "grid_points": len(grid)}


register(Scenario(
    name="cpb-spectrum",
    description="CPB levels vs gate charge for several E_J/E_C, with dispersion and anharmonicity",
    points=_cpb_points,
    evaluate=_cpb_evaluate,
    write=_cpb_write,
    params={"ratios": [1.0, 5.0, 10.0, 50.0], "k_levels": 3, "charge_cutoff": 15},
    sweep=SweepAxis("n_g", -2.0, 2.0, 201),
    sweepable=("n_g",),
))


# -------------------------------------------------------
# single-gate fidelity sweeps
# -------------------------------------------------------

def _gate_sweep_points(cfg):
    return _sweep_values(cfg)


def _gate_sweep_evaluate(cfg, value):
    point = with_value(cfg, cfg.sweep.parameter, value)
    scenario = gate_scenario(point)
    if cfg.sweep.parameter == "fock":
        margin = int(cfg.params.get("fock_margin", 8))
        scenario = scenario.replace(n_fock=max(scenario.n_fock, value + margin))
    return run_gate(scenario).fidelities[0]


def _gate_sweep_write(cfg, values, fidelities, out_dir):
    write_csv(out_dir / "fidelity.csv", [cfg.sweep.parameter, "fidelity"], zip(values, fidelities))
    clean = repeated_gate_fidelity(gate_scenario(cfg), 1, with_noise=False)[0]
    summary = {
        "parameter": cfg.sweep.parameter,
        "min_fidelity": min(fidelities),
        "max_fidelity": max(fidelities),
        "decoherence_free_fidelity": clean,
    }
    write_json(out_dir / "summary.json", summary)
    return summary


def _gate_sweep(name, description, family, index, sweep, extra_params=None):
    params = {"family": family, "index": index, "initial": "", "fock": 0}
    params.update(extra_params or {})
    return register(Scenario(
        name=name,
        description=description,
        points=_gate_sweep_points,
        evaluate=_gate_sweep_evaluate,
        write=_gate_sweep_write,
        device=dict(DEFAULT_DEVICE),
        noise=dict(DEFAULT_NOISE),
        params=params,
        sweep=sweep,
        sweepable=("kappa_mhz", "tc_us", "t1_us", "t2_us", "fock", "g_mhz"),
    ))


_gate_sweep(
    "xgate2-fidelity-kappa",
    "Two-qubit one-step X gate: fidelity vs resonator decay κ",
    "x2", 60, SweepAxis("kappa_mhz", 0.0, 2.5, 6),
)
_gate_sweep(
    "xgate2-fidelity-T",
    "Two-qubit one-step X gate: fidelity vs coherence time T₁ = T₂",
    "x2", 60, SweepAxis("tc_us", 10.0, 100.0, 10),
)
_gate_sweep(
    "xgate3-fidelity-kappa",
    "Three-qubit one-step X gate: fidelity vs resonator decay κ",
    "x3", 60, SweepAxis("kappa_mhz", 0.0, 2.5, 6),
)
_gate_sweep(
    "xgate3-fock",
    "Three-qubit one-step X gate: fidelity vs initial resonator Fock state",
    "x3", 60, SweepAxis("fock", 0, 6, 7),
    {"fock_margin": 8},
)


# -------------------------------------------------------
# entangling-gate dynamics
# -------------------------------------------------------

def _dynamics_points(cfg):
    return ["dynamics", "repeated"]


def _dynamics_evaluate(cfg, item):
    scenario = gate_scenario(cfg)
    if item == "repeated":
        n_gates = int(cfg.params["n_gates"])
        return {
            "noisy": run_gate(scenario, n_gates).fidelities,
            "clean": repeated_gate_fidelity(scenario, n_gates, with_noise=False),
        }
    spec = scenario.device
    t_final = float(cfg.params["windows"]) * scenario.conds.t_gate

    def h_of_t(t):
        return hamiltonian_interaction(spec, t)

    dt = choose_dt(h_of_t, t_final, scenario.steps_per_period)
    n_steps = int(math.ceil(t_final / dt - 1e-9))
    samples = int(cfg.params["samples"])
    opts = SolveOptions(t_final=t_final, dt=t_final / n_steps, record_every=max(1, n_steps // samples))
    traj = solve(h_of_t, initial_state(scenario), scenario.noise, opts)
    labels = all_labels(spec.n_qubits)
    return {"times": traj.times, "occupations": rotating_occupations(spec, traj, labels)}


def _crossing_time(times, first, second) -> Optional[float]:
    diff = np.asarray(first) - np.asarray(second)
    for i in range(1, len(diff)):
        if diff[i - 1] > 0 >= diff[i]:
            frac = diff[i - 1] / (diff[i - 1] - diff[i])
            return float(times[i - 1] + frac * (times[i] - times[i - 1]))
    return None


def _dynamics_write(cfg, items, results, out_dir):
    dynamics, repeated = results
    labels = list(dynamics["occupations"])
    rows = [
        [float(t)] + [float(dynamics["occupations"][label][i]) for label in labels]
        for i, t in enumerate(dynamics["times"])
    ]
    write_csv(out_dir / "dynamics.csv", ["t_us"] + [f"P{label}" for label in labels], rows)
    write_csv(
        out_dir / "repeated_fidelity.csv",
        ["gate", "fidelity", "fidelity_noiseless"],
        [[k + 1, f, c] for k, (f, c) in enumerate(zip(repeated["noisy"], repeated["clean"]))],
    )
    conds = gate_conditions(cfg)
    ground, top = labels[0], labels[-1]
    summary = {
        "single_gate_fidelity": repeated["noisy"][0],
        "decoherence_error": repeated["clean"][0] - repeated["noisy"][0],
        "t_gate_us": conds.t_gate,
        "crossing_time_us": _crossing_time(
            dynamics["times"], dynamics["occupations"][ground], dynamics["occupations"][top]
        ),
    }
    write_json(out_dir / "summary.json", summary)
    return summary


def _dynamics(name, description, family, index):
    return register(Scenario(
        name=name,
        description=description,
        points=_dynamics_points,
        evaluate=_dynamics_evaluate,
        write=_dynamics_write,
        device=dict(DEFAULT_DEVICE),
        noise=dict(DEFAULT_NOISE),
        params={"family": family, "index": index, "n_gates": 10, "windows": 2, "samples": DYNAMICS_SAMPLES},
    ))


_dynamics("bell-dynamics", "Two-qubit entangling gate: occupations and repeated-gate fidelity", "ent2", 30)
_dynamics("ghz-dynamics", "Three-qubit entangling gate: occupations and repeated-gate fidelity", "ent3", 30)


# -------------------------------------------------------
# Grover
# -------------------------------------------------------

def _grover_points(cfg):
    return list(range(2 ** int(cfg.params["n"])))


def _grover_evaluate(cfg, marked):
    iterations = cfg.params.get("iterations")
    n = int(cfg.params["n"])
    iterations = grover_optimal_iterations(n) if iterations is None else int(iterations)
    return grover_ideal(n, marked, iterations, str(cfg.params["prep"]))


def _grover_write(cfg, marked_states, runs, out_dir):
    first = runs[0].to_dict()
    write_json(out_dir / "grover.json", {
        "n": first["n"],
        "iterations": first["iterations"],
        "prep": first["prep"],
        "success_prob": first["success_prob"],
        "runs": [run.to_dict() for run in runs],
    })
    rows = []
    for run in runs:
        for step, amps in enumerate(run.amplitudes_per_step):
            for basis, z in enumerate(amps):
                rows.append([run.marked, step, basis, float(z.real), float(z.imag), float(abs(z) ** 2)])
    write_csv(out_dir / "amplitudes.csv", ["marked", "step", "basis", "re", "im", "probability"], rows)
    return {"success_prob": first["success_prob"]}


register(Scenario(
    name="grover-ideal",
    description="State-vector Grover search with W-gate preparation, every marked state",
    points=_grover_points,
    evaluate=_grover_evaluate,
    write=_grover_write,
    params={"n": 3, "iterations": 2, "prep": "w_gates"},
))


def _sweep_points(cfg):
    return list(range(2 ** int(cfg.params["n"])))


def _sweep_evaluate(cfg, marked):
    iterations = cfg.params.get("iterations")
    return grover_noisy_sweep(
        int(cfg.params["n"]),
        marked,
        cfg.sweep.values(),
        float(cfg.params["h"]),
        None if iterations is None else int(iterations),
    )


def _sweep_write(cfg, marked_states, results, out_dir):
    rows = [row for chunk in results for row in chunk]
    write_csv(out_dir / "sweep.csv", ["b", "h", "oracle", "fidelity"], [[r.b, r.h, r.oracle, r.fidelity] for r in rows])
    per_oracle = {}
    for r in rows:
        per_oracle[r.oracle] = min(per_oracle.get(r.oracle, 1.0), r.fidelity)
    summary = {"h": float(cfg.params["h"]), "min_fidelity_per_oracle": per_oracle}
    write_json(out_dir / "summary.json", summary)
    return summary


def _grover_sweep(name, description, n, h):
    return register(Scenario(
        name=name,
        description=description,
        points=_sweep_points,
        evaluate=_sweep_evaluate,
        write=_sweep_write,
        params={"n": n, "h": h, "iterations": None},
        sweep=SweepAxis("b", 0.9 * math.pi, 1.1 * math.pi, 41),
        sweepable=("b",),
    ))


_grover_sweep("grover2-sweep", "Two-qubit Grover with one-step W-type gates: fidelity vs b", 2, 13.5)
_grover_sweep("grover3-sweep", "Three-qubit Grover with one-step W-type gates: fidelity vs b", 3, 8.5)


# -------------------------------------------------------
# process tomography
# -------------------------------------------------------

def _qpt_points(cfg):
    n = 2 if cfg.params["family"].endswith("2") else 3
    return list(range(4 ** n))


def _qpt_evaluate(cfg, k):
    scenario = gate_scenario(cfg)
    rho_in = tomographic_inputs(scenario.conds.n_qubits)[k]
    return apply_process(lindblad_channel(scenario), rho_in)


def _qpt_write(cfg, indices, outputs, out_dir):
    n = 2 if cfg.params["family"].endswith("2") else 3
    y_convention = str(cfg.params["y_convention"])
    inputs = tomographic_inputs(n)
    pairs = list(zip(inputs, outputs))
    chi = chi_linear_inversion(pairs, n, y_convention)
    ideal_u = entangler(n)
    ideal = chi_ideal(ideal_u, y_convention)
    report = {
        "process_fidelity": process_fidelity(ideal, chi),
        "mean_fidelity": mean_fidelity_from_outputs(ideal_u, tomographic_kets(n), outputs),
        "min_chi_eigenvalue": float(np.linalg.eigvalsh(chi.data)[0]),
        "reconstruction_residual": reconstruction_residual(chi, pairs),
        "y_convention": y_convention,
    }
    write_json(out_dir / "chi.json", chi.to_dict())
    write_json(out_dir / "chi_ideal.json", ideal.to_dict())
    write_csv(out_dir / "chi_bar.csv", ["row_label", "col_label", "abs_value"], chi_bar_export(chi))
    write_json(out_dir / "report.json", report)
    return report


def _qpt(name, description, family, index, noise, n_fock):
    return register(Scenario(
        name=name,
        description=description,
        points=_qpt_points,
        evaluate=_qpt_evaluate,
        write=_qpt_write,
        device={**DEFAULT_DEVICE, "n_fock": n_fock},
        noise=noise,
        params={"family": family, "index": index, "y_convention": "minus_i_sigma_y", "fock": 0, "initial": ""},
    ))


_qpt("qpt2", "Process tomography of the two-qubit entangling gate", "ent2", 60, {"kappa_mhz": 0.0, "tc_us": 20.0}, 10)
_qpt("qpt3", "Process tomography of the three-qubit entangling gate", "ent3", 30, {"kappa_mhz": 0.0, "tc_us": 0.6}, 6)


# -------------------------------------------------------
# Deutsch–Jozsa
# -------------------------------------------------------

DJ_FUNCTIONS = ("constant_0", "constant_1", "first_bit", "parity")


def dj_function(name: str, n: int) -> Callable[[int], int]:
    """Named oracle functions on n-bit inputs; first_bit reads the most significant bit."""
    if name == "constant_0":
        return lambda x: 0
    if name == "constant_1":
        return lambda x: 1
    if name == "first_bit":
        return lambda x: (x >> (n - 1)) & 1
    if name == "parity":
        return lambda x: bin(x).count("1") % 2
    raise ArgumentError(f"unknown Deutsch–Jozsa function {name!r}; known: {list(DJ_FUNCTIONS)}")


def _dj_points(cfg):
    return list(cfg.params["functions"])


def _dj_evaluate(cfg, name):
    n = int(cfg.params["n"])
    return deutsch_jozsa(n, dj_function(name, n))


def _dj_write(cfg, names, results, out_dir):
    data = {name: r.to_dict() for name, r in zip(names, results)}
    write_json(out_dir / "dj.json", {"n": int(cfg.params["n"]), "functions": data})
    return {name: r.kind for name, r in zip(names, results)}


register(Scenario(
    name="dj-demo",
    description="Deutsch–Jozsa on constant and balanced functions",
    points=_dj_points,
    evaluate=_dj_evaluate,
    write=_dj_write,
    params={"n": 3, "functions": list(DJ_FUNCTIONS)},
))
