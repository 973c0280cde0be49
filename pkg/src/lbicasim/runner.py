"""Run orchestration: workload -> cache engine -> event loop -> telemetry -> balancer.

The :class:`Simulation` drives the event loop, dispatches application
arrivals through the cache engine, materializes deferred promotions when
their backing disk reads complete, ticks the balancer at every interval
boundary, and keeps the per-application bookkeeping that defines request
latency (a write-through write completes when both halves finish).

It also implements the two mutation hooks controllers use, so every
policy change and queue edit flows through one logged place:

* ``set_policy`` switches the cache policy (logged when it changes);
* ``bypass_tail`` removes requests from the cache queue tail, discarding
  promotions (the disk copy is current, nothing is lost) and resubmitting
  application requests to the disk with origin and arrival preserved.

With an event log enabled, every request lifecycle step and policy
change is recorded, which is enough to independently replay cache
metadata and re-derive interval statistics.
"""

from __future__ import annotations

import csv
import itertools
import statistics
from dataclasses import dataclass
from typing import IO, Sequence

from .balancer import RatioVector, detect_bottleneck, make_balancer
from .cache import CacheConfig, CacheEngine, WritePolicy
from .config import RunConfig
from .engine import Device, DeviceRole, IoRequest, Origin, Simulator
from .telemetry import IntervalStats, IntervalTracker, take_snapshot
from .workload import generate, load_trace

EVENT_COLUMNS = ("time", "event", "req", "app", "origin", "op", "target", "lba", "arrival", "note")


class EventLog:
    """CSV event stream: arrivals, submissions, completions, queue edits."""

    def __init__(self, fh: IO[str], scenario: str):
        self._writer = csv.writer(fh, lineterminator="\n")
        fh.write(f"# scenario={scenario}\n")
        self._writer.writerow(EVENT_COLUMNS)

    def request(self, time: int, event: str, req: IoRequest, note: str = "") -> None:
        self._writer.writerow(
            (
                time,
                event,
                req.id,
                "" if req.app_id is None else req.app_id,
                req.origin.value,
                req.op.value,
                "" if req.target is None else req.target.value,
                req.lba,
                req.arrival,
                note,
            )
        )

    def policy(self, time: int, policy: WritePolicy) -> None:
        self._writer.writerow((time, "policy", "", "", "", "", "", "", "", policy.value))


@dataclass
class IntervalRow:
    """One intervals.csv row: closed stats plus the controller outcome."""

    stats: IntervalStats
    ratios: RatioVector
    burst: bool
    klass: str
    policy: str
    bypassed: int


@dataclass
class RunResult:
    config: RunConfig
    rows: list[IntervalRow]
    summary: dict
    end_time: int


class Simulation:
    def __init__(self, config: RunConfig, requests: Sequence[IoRequest], events: EventLog | None = None):
        self.config = config
        self.events = events
        ssd = Device(DeviceRole.SSD, config.ssd_read_us, config.ssd_write_us)
        hdd = Device(DeviceRole.HDD, config.hdd_read_us, config.hdd_write_us)
        self.sim = Simulator(ssd, hdd)
        next_free = max((r.id for r in requests), default=-1) + 1
        self._ids = itertools.count(next_free)
        self.cache = CacheEngine(
            CacheConfig(config.cache_blocks, config.block_bytes),
            next_id=self._ids.__next__,
        )
        self.tracker = IntervalTracker(ssd.latency_avg, hdd.latency_avg)
        self.balancer = make_balancer(config.balancer, self, config.theta_dom)
        self.rows: list[IntervalRow] = []
        self.submitted = {DeviceRole.SSD: 0, DeviceRole.HDD: 0}
        self.bypassed_total = 0
        self.dropped_promotions = 0
        self._deferred: dict[int, list] = {}
        self._outstanding: dict[int, set[int]] = {}
        self._arrival_of: dict[int, int] = {}
        self._latencies: list[int] = []
        self._n_app = len(requests)
        for req in requests:
            self.sim.schedule_arrival(req)

    # ------------------------------------------------------------------
    # controller surface

    def set_policy(self, policy: WritePolicy) -> None:
        if policy is not self.cache.policy:
            self.cache.set_policy(policy)
            if self.events:
                self.events.policy(self.sim.clock, policy)

    def bypass_tail(self, count: int) -> int:
        removed = self.sim.ssd.remove_tail(count)
        for req in removed:
            if self.events:
                self.events.request(self.sim.clock, "remove", req)
            if req.origin is Origin.P:
                # a dropped promotion loses no data, the disk copy is current
                self.dropped_promotions += 1
                if self.events:
                    self.events.request(self.sim.clock, "drop", req, note="bypassed promotion")
                continue
            req.target = DeviceRole.HDD
            self._submit(req)
        self.bypassed_total += len(removed)
        return len(removed)

    # ------------------------------------------------------------------
    # event handling

    def _submit(self, req: IoRequest) -> None:
        self.sim.submit(req)
        self.submitted[req.target] += 1
        if self.events:
            self.events.request(self.sim.clock, "submit", req)

    def _dispatch(self, req: IoRequest) -> None:
        if self.events:
            self.events.request(self.sim.clock, "arrive", req)
        self._arrival_of[req.id] = req.arrival
        plan = self.cache.access(req, self.sim.clock)
        self._outstanding[req.id] = set(plan.foreground)
        for deferred in plan.deferred:
            self._deferred.setdefault(deferred.after_id, []).append(deferred)
        for sub in plan.immediate:
            self._submit(sub)

    def _on_complete(self, req: IoRequest) -> None:
        self.tracker.record_completion(req)
        if self.events:
            self.events.request(self.sim.clock, "complete", req)
        for deferred in self._deferred.pop(req.id, ()):
            if self.cache.admits_promotion:
                deferred.request.arrival = self.sim.clock
                self._submit(deferred.request)
            else:
                self.dropped_promotions += 1
                if self.events:
                    self.events.request(
                        self.sim.clock, "drop", deferred.request, note="write-only policy"
                    )
        if req.app_id is not None:
            self._foreground_resolved(req.app_id, req.id, self.sim.clock)

    def _foreground_resolved(self, app_id: int, req_id: int, when: int) -> None:
        pending = self._outstanding.get(app_id)
        if pending is None:
            return
        pending.discard(req_id)
        if not pending:
            del self._outstanding[app_id]
            self._latencies.append(when - self._arrival_of.pop(app_id))

    def _tick(self, boundary: int) -> None:
        ssd_q = self.sim.ssd.qsize
        hdd_q = self.sim.hdd.qsize
        snapshot = take_snapshot(boundary, self.sim.ssd, self.sim.hdd)
        stats = self.tracker.close_interval(boundary, ssd_q, hdd_q)
        decision = self.balancer.tick(stats, snapshot)
        self.rows.append(
            IntervalRow(
                stats=stats,
                ratios=RatioVector.from_snapshot(snapshot),
                burst=detect_bottleneck(stats),
                klass=decision.klass.value if decision.klass is not None else "",
                policy=self.cache.policy.value,
                bypassed=decision.bypass_depth,
            )
        )

    # ------------------------------------------------------------------

    def run(self) -> RunResult:
        self.balancer.prepare()
        interval = self.config.interval_us
        boundary = interval
        while True:
            nxt = self.sim.next_event_time()
            if nxt is None:
                break
            if nxt > boundary:
                # idle stretch crosses the boundary: close the interval first
                self.sim.advance_to(boundary)
                self._tick(boundary)
                boundary += interval
                continue
            completed, arrived = self.sim.step()
            for req in completed:
                self._on_complete(req)
            for req in arrived:
                self._dispatch(req)
            if self.sim.clock == boundary:
                self._tick(boundary)
                boundary += interval
        end_time = self.sim.clock
        if end_time > boundary - interval:
            # final partial interval: queues are empty, the tick just closes it
            self.sim.advance_to(boundary)
            self._tick(boundary)
        return RunResult(self.config, self.rows, self._summary(end_time), end_time)

    def _summary(self, end_time: int) -> dict:
        latencies = sorted(self._latencies)
        if latencies:
            mean_lat = statistics.fmean(latencies)
            median_lat = statistics.median(latencies)
            p99_lat = latencies[max(0, -(-99 * len(latencies) // 100) - 1)]
            max_lat = latencies[-1]
        else:
            mean_lat = median_lat = 0.0
            p99_lat = max_lat = 0
        burst_rows = [row for row in self.rows if row.burst]
        totals = self.tracker.totals
        summary = {
            "scenario": self.config.scenario_hash(),
            "balancer": self.config.balancer,
            "seed": self.config.seed,
            "simulated_end_us": end_time,
            "intervals": len(self.rows),
            "app_requests": self._n_app,
            "app_completed": len(latencies),
            "mean_latency_us": mean_lat,
            "median_latency_us": median_lat,
            "p99_latency_us": p99_lat,
            "max_latency_us": max_lat,
            "cache_read_hits": self.cache.read_hits,
            "cache_read_misses": self.cache.read_misses,
            "ssd_submitted": self.submitted[DeviceRole.SSD],
            "hdd_submitted": self.submitted[DeviceRole.HDD],
            "bypassed_total": self.bypassed_total,
            "dropped_promotions": self.dropped_promotions,
            "dirty_writebacks": self.cache.dirty_writebacks,
            "dirty_resident_end": len(self.cache.dirty_lbas()),
            "burst_intervals": len(burst_rows),
            "mean_ssd_qsize_burst": (
                statistics.fmean(row.stats.ssd_qsize for row in burst_rows) if burst_rows else 0.0
            ),
            "mean_hdd_qsize": (
                statistics.fmean(row.stats.hdd_qsize for row in self.rows) if self.rows else 0.0
            ),
        }
        for role in DeviceRole:
            for origin in Origin:
                summary[f"{role.value}_completed_{origin.value.lower()}"] = totals[role][origin]
        return summary


def build_requests(config: RunConfig) -> list[IoRequest]:
    if config.trace_path is not None:
        return load_trace(config.trace_path)
    return generate(config.phases, config.seed)


def run_simulation(config: RunConfig, events: EventLog | None = None) -> RunResult:
    return Simulation(config, build_requests(config), events=events).run()
