#!/usr/bin/env python3
"""
Entry point for the cQED gate scenarios.

This script runs one named experiment end to end. All the work happens in
the scenario registry and the runner; this file only wires up the path and
the top-level error handling.

Usage:
    python run_scenario.py --scenario grover-ideal
    python run_scenario.py --config my_config.json --output-dir results/
    python run_scenario.py --list-scenarios

What this does:
    1. Parses and validates the config (defaults come from the scenario)
    2. Evaluates the scenario's work items on a worker pool
    3. Writes CSV/JSON artifacts in item order
    4. Writes manifest.json with the resolved parameters and checksums

Output structure:
    output/{scenario}/
        manifest.json       # Resolved config, derived quantities, checksums
        *.csv / *.json      # Scenario artifacts

Re-running a scenario with the same config rewrites byte-identical files.
"""

import sys
from pathlib import Path

# Add src to path to import the package
# This allows running the script from repository root
sys.path.insert(0, str(Path(__file__).parent / "src"))

from cqed_gates.cli import main


if __name__ == "__main__":
    try:
        main()
    except KeyboardInterrupt:
        print("\n\n⚠️  Run interrupted by user")
        print("   Artifacts of the interrupted scenario may be incomplete.")
        sys.exit(130)
    except Exception as e:
        print(f"\n\n❌ Fatal error: {e}")
        import traceback
        traceback.print_exc()
        sys.exit(1)
