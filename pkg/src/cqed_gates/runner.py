"""
Scenario runner.

Takes a resolved ScenarioConfig, fans its independent work items out over a
bounded worker pool, collects the results in item order, hands them to the
scenario's writer and finishes with a manifest.json describing the run.

Example:
    runner = ScenarioRunner(ScenarioConfig(scenario="grover-ideal"))
    summary = asyncio.run(runner.run())
"""

import asyncio
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional

from tqdm import tqdm

from . import __version__
from .exceptions import ConfigError
from .models import ScenarioConfig
from .scenarios import derived, get_scenario, resolve, validate
from .utils import sha256_file, write_json

_log = logging.getLogger(__name__)

# -------------------------------------------------------
# CONSTANTS
# -------------------------------------------------------

# Upper bound on simultaneous work items
MAX_WORKERS = 4

MANIFEST_NAME = "manifest.json"


class ScenarioRunner:
    """
    Runs one scenario end to end.

    Key features:
    1. **Validation first**: every config violation is reported before any work starts
    2. **Bounded concurrency**: a semaphore caps in-flight items at ``max_workers``
    3. **Deterministic output**: results are written in item order, whatever
       order the workers finish in, and the manifest carries no timestamps
    4. **Traceable artifacts**: the manifest lists a sha256 for every file written
    """

    def __init__(
        self,
        config: ScenarioConfig,
        max_workers: Optional[int] = None,
        quiet: bool = False,
    ):
        violations = validate(config)
        if violations:
            raise ConfigError(f"invalid config for {config.scenario!r}", violations)
        self.scenario = get_scenario(config.scenario)
        self.config = resolve(config)
        self.out_dir = Path(self.config.output_dir) / self.scenario.name
        self.max_workers = max_workers or min(MAX_WORKERS, os.cpu_count() or 1)
        self.semaphore: Optional[asyncio.Semaphore] = None
        self.quiet = quiet

    def _say(self, message: str = ""):
        if not self.quiet:
            print(message)

    async def _evaluate(self, loop, pool, item: Any, pbar: tqdm) -> Any:
        async with self.semaphore:
            result = await loop.run_in_executor(pool, self.scenario.evaluate, self.config, item)
        pbar.update(1)
        return result

    def _write_manifest(self, summary: Dict[str, Any], n_items: int) -> Path:
        artifacts = {
            path.name: sha256_file(path)
            for path in sorted(self.out_dir.iterdir())
            if path.is_file() and path.name != MANIFEST_NAME
        }
        manifest = {
            "scenario": self.scenario.name,
            "version": __version__,
            "config": {k: v for k, v in self.config.to_dict().items() if k != "output_dir"},
            "derived": derived(self.config),
            "work_items": n_items,
            "summary": summary,
            "artifacts": artifacts,
        }
        return write_json(self.out_dir / MANIFEST_NAME, manifest)

    async def run(self) -> Dict[str, Any]:
        """
        Evaluate every work item and write the artifacts.

        Returns:
            The scenario writer's summary

        Raises:
            Whatever a work item raises; the pool is shut down either way
        """
        self._say("=" * 60)
        self._say(f"🚀 Scenario: {self.scenario.name}")
        self._say(f"   {self.scenario.description}")
        self._say("=" * 60)

        # -------------------------------------------------------
        # STEP 1: Split into work items
        # -------------------------------------------------------
        items: List[Any] = self.scenario.points(self.config)
        self._say(f"\n📊 Work items: {len(items)}")
        self._say(f"   Concurrency: {self.max_workers} workers")
        self._say(f"   Output directory: {self.out_dir}")
        self.out_dir.mkdir(parents=True, exist_ok=True)

        # -------------------------------------------------------
        # STEP 2: Evaluate concurrently, keep item order
        # -------------------------------------------------------
        loop = asyncio.get_running_loop()
        self.semaphore = asyncio.Semaphore(self.max_workers)
        pool = ThreadPoolExecutor(max_workers=self.max_workers)
        try:
            with tqdm(total=len(items), desc=self.scenario.name, disable=self.quiet) as pbar:
                results = await asyncio.gather(
                    *[self._evaluate(loop, pool, item, pbar) for item in items]
                )
        finally:
            pool.shutdown(wait=True)

        # -------------------------------------------------------
        # STEP 3: Artifacts and manifest
        # -------------------------------------------------------
        summary = self.scenario.write(self.config, items, list(results), self.out_dir)
        manifest = self._write_manifest(summary, len(items))
        _log.info("scenario %s finished: %s", self.scenario.name, summary)

        self._say("\n" + "=" * 60)
        self._say("✅ Scenario complete!")
        self._say("=" * 60)
        for key, value in summary.items():
            self._say(f"   {key}: {value}")
        self._say(f"   💾 Manifest: {manifest}")
        self._say("=" * 60)
        return summary


def run_scenario(config: ScenarioConfig, max_workers: Optional[int] = None, quiet: bool = False) -> Dict[str, Any]:
    """Synchronous wrapper: ``asyncio.run(ScenarioRunner(config).run())``."""
    return asyncio.run(ScenarioRunner(config, max_workers, quiet).run())
