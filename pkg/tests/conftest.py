"""Shared fixtures: cached scenario runs and event-log helpers.

The acceptance tests measure full runs of the committed scenarios under
several balancers. Runs are deterministic, so they execute once per
session and every test reads from the cache. Each cached run keeps the
in-memory result, the written report directory (with events.log), and
the wall-clock duration of the run itself.
"""

from __future__ import annotations

import csv
import dataclasses
import time
from dataclasses import dataclass
from pathlib import Path

import pytest

from lbicasim import EventLog, RunResult, load_config, run_simulation, write_run

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"

SCENARIOS = {
    "random_read": SCENARIO_DIR / "random_read.cfg",
    "mixed_rw": SCENARIO_DIR / "mixed_rw.cfg",
    "write_intensive": SCENARIO_DIR / "write_intensive.cfg",
}


@dataclass
class CachedRun:
    result: RunResult
    out_dir: Path
    elapsed_s: float

    @property
    def summary(self) -> dict:
        return self.result.summary


def execute_run(config_path: Path, balancer: str, out_dir: Path) -> CachedRun:
    config = dataclasses.replace(load_config(config_path), balancer=balancer)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.monotonic()
    with open(out_dir / "events.log", "w", newline="") as fh:
        result = run_simulation(config, events=EventLog(fh, config.scenario_hash()))
    elapsed = time.monotonic() - started
    write_run(result, out_dir)
    return CachedRun(result=result, out_dir=out_dir, elapsed_s=elapsed)


@pytest.fixture(scope="session")
def scenario_runs(tmp_path_factory) -> dict[tuple[str, str], CachedRun]:
    """Every (scenario, balancer) pair the acceptance criteria compare."""
    wanted = [
        ("random_read", "none-wb"),
        ("random_read", "lbica"),
        ("mixed_rw", "none-wb"),
        ("mixed_rw", "lbica"),
        ("write_intensive", "none-wb"),
        ("write_intensive", "lbica"),
        ("write_intensive", "sib"),
    ]
    root = tmp_path_factory.mktemp("runs")
    runs = {}
    for scenario, balancer in wanted:
        out = root / f"{scenario}-{balancer}"
        runs[(scenario, balancer)] = execute_run(SCENARIOS[scenario], balancer, out)
    return runs


def read_events(path: Path) -> tuple[str, list[dict[str, str]]]:
    """Load events.log rows in written order, plus the scenario hash."""
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        assert first.startswith("# scenario="), f"{path}: missing scenario header"
        rows = list(csv.DictReader(fh))
    return first.removeprefix("# scenario="), rows


def burst_window_indices(result: RunResult) -> set[int]:
    """Interval indices the run flagged as cache-side bottlenecks."""
    return {row.stats.interval_index for row in result.rows if row.burst}


def ssd_submits_per_window(rows: list[dict[str, str]], interval_us: int) -> dict[int, int]:
    """Count cache-queue submissions per interval window from an event log.

    Window k covers times ((k-1)*L, k*L]; a submission at t lands in
    window ceil(t / L).
    """
    counts: dict[int, int] = {}
    for row in rows:
        if row["event"] == "submit" and row["target"] == "ssd":
            t = int(row["time"])
            window = -(-t // interval_us)
            counts[window] = counts.get(window, 0) + 1
    return counts
