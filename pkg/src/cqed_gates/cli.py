"""
Command-line entry point.

Usage:
    cqed-gates --list-scenarios
    cqed-gates --scenario grover-ideal
    cqed-gates --config configs/bell.json --output-dir results/

The config is one JSON document:

    {
      "scenario": "bell-dynamics",
      "device": {"g_mhz": 60.0, "n_fock": 10},
      "noise": {"t1_us": 95.0, "t2_us": 70.0, "kappa_mhz": 0.0},
      "params": {"index": 30},
      "sweep": {"parameter": "kappa_mhz", "min": 0.0, "max": 2.5, "points": 6},
      "output_dir": "output"
    }

Exit codes:
    0  success
    2  invalid config or argument
    3  numerical failure
"""

import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
import orjson

from .exceptions import ArgumentError, ConfigError, CqedError, NumericalMethodError, PreconditionError
from .models import ScenarioConfig, SweepAxis
from .runner import run_scenario
from .scenarios import REGISTRY, validate

_log = logging.getLogger(__name__)

# -------------------------------------------------------
# CONSTANTS
# -------------------------------------------------------

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_INTERRUPTED = 130

DEFAULT_OUTPUT_DIR = "output"
LOG_LEVEL_ENV = "CQED_LOG_LEVEL"

CONFIG_KEYS = ("scenario", "device", "noise", "params", "sweep", "output_dir", "seed")
SWEEP_KEYS = ("parameter", "min", "max", "points")


def parse_config(data: Dict[str, Any]) -> ScenarioConfig:
    """
    Build a ScenarioConfig from a decoded JSON document.

    Raises:
        ConfigError: unknown keys, wrong section types or a malformed sweep
    """
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object", ["top level is not an object"])
    violations: List[str] = []
    for key in data:
        if key not in CONFIG_KEYS:
            violations.append(f"unknown config key {key!r}; expected one of {CONFIG_KEYS}")
    if not data.get("scenario"):
        violations.append("config has no scenario name")
    for section in ("device", "noise", "params"):
        if not isinstance(data.get(section, {}), dict):
            violations.append(f"{section} must be an object")

    sweep: Optional[SweepAxis] = None
    raw = data.get("sweep")
    if raw is not None:
        if not isinstance(raw, dict) or set(raw) != set(SWEEP_KEYS):
            violations.append(f"sweep must be an object with exactly the keys {SWEEP_KEYS}")
        else:
            try:
                sweep = SweepAxis(str(raw["parameter"]), float(raw["min"]), float(raw["max"]), int(raw["points"]))
            except (ArgumentError, TypeError, ValueError) as e:
                violations.append(f"sweep: {e}")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        violations.append(f"seed must be an integer, got {seed!r}")
    if violations:
        raise ConfigError("config could not be parsed", violations)

    return ScenarioConfig(
        scenario=str(data["scenario"]),
        device=dict(data.get("device", {})),
        noise=dict(data.get("noise", {})),
        params=dict(data.get("params", {})),
        sweep=sweep,
        output_dir=str(data.get("output_dir", DEFAULT_OUTPUT_DIR)),
        seed=seed,
    )


def load_config(path: Path) -> Dict[str, Any]:
    try:
        return orjson.loads(Path(path).read_bytes())
    except orjson.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON", [str(e)])


def error_record(error: Exception) -> str:
    """The machine-readable record written to stderr on failure."""
    return orjson.dumps(
        {
            "error": type(error).__name__,
            "message": str(error),
            "violations": getattr(error, "violations", []),
        },
        option=orjson.OPT_SORT_KEYS,
    ).decode("utf-8")


def exit_code_for(error: Exception) -> int:
    if isinstance(error, (ConfigError, ArgumentError, PreconditionError)):
        return EXIT_CONFIG
    if isinstance(error, NumericalMethodError):
        return EXIT_NUMERICAL
    return 1


def _configure_logging():
    level = os.environ.get(LOG_LEVEL_ENV, "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


@click.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Scenario config (JSON).")
@click.option("--output-dir", type=click.Path(file_okay=False, path_type=Path),
              help="Override the config's output directory.")
@click.option("--scenario", help="Scenario name; overrides the config's.")
@click.option("--list-scenarios", is_flag=True, help="List registered scenarios and exit.")
def main(config_path: Optional[Path], output_dir: Optional[Path], scenario: Optional[str], list_scenarios: bool):
    """Run a named circuit-QED gate experiment and write its artifacts."""
    _configure_logging()

    if list_scenarios:
        for name in sorted(REGISTRY):
            click.echo(f"{name:24s} {REGISTRY[name].description}")
        sys.exit(EXIT_OK)

    try:
        data = load_config(config_path) if config_path else {}
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object", ["top level is not an object"])
        if scenario:
            data["scenario"] = scenario
        if output_dir:
            data["output_dir"] = str(output_dir)
        if not data.get("scenario"):
            raise ConfigError("nothing to run", ["pass --scenario or a config with a scenario name"])
        cfg = parse_config(data)
        violations = validate(cfg)
        if violations:
            raise ConfigError(f"invalid config for {cfg.scenario!r}", violations)
        run_scenario(cfg)
    except CqedError as e:
        click.echo(f"❌ {e}", err=True)
        for violation in getattr(e, "violations", []):
            click.echo(f"   ⚠️  {violation}", err=True)
        click.echo(error_record(e), err=True)
        sys.exit(exit_code_for(e))
    except KeyboardInterrupt:
        click.echo("\n⚠️  Run interrupted by user", err=True)
        sys.exit(EXIT_INTERRUPTED)
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
