"""Load balancing controllers for the two-tier stack.

Three controllers share one tick interface, invoked at every interval
boundary with the closed interval's stats and a queue snapshot:

* ``none-wb``: write-back cache, no balancing. The baseline.
* ``lbica``: detects a cache-side bottleneck by comparing queue times,
  characterizes the workload from the origin mix sitting in the cache
  queue, and reassigns the write policy to steer traffic away from the
  overloaded cache; write-intensive queues additionally get their tail
  bypassed to the disk.
* ``sib``: prior selective-bypass baseline. The cache is pinned to
  write-through and requests are bypassed from the cache queue tail
  whenever their estimated wait exceeds the disk-side estimate. It never
  changes the write policy.

Controllers mutate the running system only through the narrow surface
the runner hands them (``set_policy`` and ``bypass_tail``), which keeps
every queue edit logged and accounted in one place.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Protocol

from .cache import WritePolicy
from .engine import Origin
from .telemetry import IntervalStats, QueueSnapshot


class WorkloadClass(Enum):
    RANDOM_READ = "random-read"
    MIXED_READ_WRITE = "mixed-read-write"
    RANDOM_WRITE = "random-write"
    SEQUENTIAL_WRITE = "sequential-write"
    SEQUENTIAL_READ = "sequential-read"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class RatioVector:
    """Origin mix of the cache queue as fractions in [0, 1]."""

    r: float
    w: float
    p: float
    e: float

    @classmethod
    def from_counts(cls, r: int, w: int, p: int, e: int) -> RatioVector:
        total = r + w + p + e
        if total <= 0:
            return cls(0.0, 0.0, 0.0, 0.0)
        return cls(r / total, w / total, p / total, e / total)

    @classmethod
    def from_snapshot(cls, snapshot: QueueSnapshot) -> RatioVector:
        counts = {origin: 0 for origin in Origin}
        for _id, origin in snapshot.ssd_inqueue:
            counts[origin] += 1
        return cls.from_counts(
            counts[Origin.R], counts[Origin.W], counts[Origin.P], counts[Origin.E]
        )


@dataclass(frozen=True)
class PolicyDecision:
    """Outcome of one controller tick.

    ``tail_bypass`` is the write-intensive directive that pairs tail
    bypassing with the WB policy; it is never set with any other policy.
    ``bypass_depth`` reports how many requests actually left the cache
    queue this tick (SIB reports its per-request bypasses here too).
    ``klass`` is None when the tick did not classify (no bottleneck, or a
    controller that never classifies).
    """

    policy: WritePolicy
    tail_bypass: bool = False
    bypass_depth: int = 0
    klass: WorkloadClass | None = None
    burst: bool = False


def detect_bottleneck(stats: IntervalStats) -> bool:
    """True when the cache queue would take strictly longer to drain."""
    return stats.cache_qtime > stats.disk_qtime


def classify(ratios: RatioVector, theta_dom: float = 0.8) -> WorkloadClass:
    """Name the workload from the origin mix of the cache queue.

    A promotion-dominated queue is a sequential read (a miss streak being
    installed). Otherwise the largest origin pair that reaches the
    dominance threshold wins: r+p reads the cache, w+e writes it under
    pressure, r+w is a mixed foreground. Ties go to the more specific
    signature (r+p, then w+e) so a pure-read or pure-write queue is not
    absorbed into the mixed class. Below the threshold the queue stays
    unclassified.
    """
    if not 0.5 < theta_dom <= 1.0:
        raise ValueError("theta_dom must be in (0.5, 1.0]")
    if ratios.p >= theta_dom:
        return WorkloadClass.SEQUENTIAL_READ
    groups: list[tuple[float, int, WorkloadClass | None]] = [
        (ratios.r + ratios.p, 2, WorkloadClass.RANDOM_READ),
        (ratios.w + ratios.e, 1, None),  # split on w vs e below
        (ratios.r + ratios.w, 0, WorkloadClass.MIXED_READ_WRITE),
    ]
    score, _prio, klass = max(groups, key=lambda g: (g[0], g[1]))
    if score < theta_dom:
        return WorkloadClass.UNCLASSIFIED
    if klass is None:
        return (
            WorkloadClass.RANDOM_WRITE if ratios.w > ratios.e else WorkloadClass.SEQUENTIAL_WRITE
        )
    return klass


def assign_policy(klass: WorkloadClass, burst: bool) -> PolicyDecision:
    """Map a workload class to the write policy that unloads the cache.

    Without a bottleneck the cache always reverts to write-back. During
    one, read-heavy queues stop taking promotions (WO), mixed queues stop
    taking writes (RO), and write-intensive or unrecognized queues keep
    WB but shed their queue tail to the disk. A promotion-dominated queue
    keeps WB: its load comes from misses the disk must serve anyway.
    """
    if not burst:
        return PolicyDecision(WritePolicy.WB, klass=klass, burst=False)
    if klass is WorkloadClass.RANDOM_READ:
        return PolicyDecision(WritePolicy.WO, klass=klass, burst=True)
    if klass is WorkloadClass.MIXED_READ_WRITE:
        return PolicyDecision(WritePolicy.RO, klass=klass, burst=True)
    if klass in (
        WorkloadClass.RANDOM_WRITE,
        WorkloadClass.SEQUENTIAL_WRITE,
        WorkloadClass.UNCLASSIFIED,
    ):
        return PolicyDecision(WritePolicy.WB, tail_bypass=True, klass=klass, burst=True)
    return PolicyDecision(WritePolicy.WB, klass=klass, burst=True)  # sequential read


def compute_bypass_depth(stats: IntervalStats) -> int:
    """Smallest tail cut that rebalances the queue times.

    Returns the minimal k >= 0 with
    ``(ssd_qsize - k) * ssd_latency_avg <= (hdd_qsize + k) * hdd_latency_avg``.
    Each bypassed request both shortens the cache queue and lengthens the
    disk queue, hence the combined divisor.
    """
    excess = stats.ssd_qsize * stats.ssd_latency_avg - stats.hdd_qsize * stats.hdd_latency_avg
    if excess <= 0:
        return 0
    step = stats.ssd_latency_avg + stats.hdd_latency_avg
    return -(-excess // step)


class Controls(Protocol):
    """Mutation surface the runner exposes to controllers."""

    def set_policy(self, policy: WritePolicy) -> None: ...

    def bypass_tail(self, count: int) -> int: ...


class WriteBackBaseline:
    """No balancing: the cache stays write-back for the whole run."""

    name = "none-wb"

    def __init__(self, controls: Controls, theta_dom: float = 0.8):
        self.controls = controls

    def prepare(self) -> None:
        self.controls.set_policy(WritePolicy.WB)

    def tick(self, stats: IntervalStats, snapshot: QueueSnapshot) -> PolicyDecision:
        return PolicyDecision(WritePolicy.WB, burst=detect_bottleneck(stats))


class LbicaBalancer:
    """Adaptive policy assignment driven by queue-time comparison."""

    name = "lbica"

    def __init__(self, controls: Controls, theta_dom: float = 0.8):
        self.controls = controls
        self.theta_dom = theta_dom

    def prepare(self) -> None:
        self.controls.set_policy(WritePolicy.WB)

    def tick(self, stats: IntervalStats, snapshot: QueueSnapshot) -> PolicyDecision:
        if not detect_bottleneck(stats):
            self.controls.set_policy(WritePolicy.WB)
            return PolicyDecision(WritePolicy.WB, burst=False)
        ratios = RatioVector.from_snapshot(snapshot)
        klass = classify(ratios, self.theta_dom)
        decision = assign_policy(klass, burst=True)
        moved = 0
        if decision.tail_bypass:
            moved = self.controls.bypass_tail(compute_bypass_depth(stats))
        self.controls.set_policy(decision.policy)
        return replace(decision, bypass_depth=moved)


class SibBalancer:
    """Selective bypass over a write-through cache.

    Walks the cache queue from the tail inward; a request at 1-based
    position ``pos`` is expected to wait ``pos * ssd_latency_avg``, and is
    bypassed while that exceeds the disk-side estimate
    ``(hdd_qsize + already_bypassed) * hdd_latency_avg``. The in-service
    request (position 1) is never considered. The policy never changes.
    """

    name = "sib"

    def __init__(self, controls: Controls, theta_dom: float = 0.8):
        self.controls = controls

    def prepare(self) -> None:
        self.controls.set_policy(WritePolicy.WT)

    def tick(self, stats: IntervalStats, snapshot: QueueSnapshot) -> PolicyDecision:
        count = sib_scan_depth(
            stats.ssd_qsize, stats.ssd_latency_avg, stats.hdd_qsize, stats.hdd_latency_avg
        )
        moved = self.controls.bypass_tail(count) if count else 0
        return PolicyDecision(
            WritePolicy.WT, bypass_depth=moved, burst=detect_bottleneck(stats)
        )


def sib_scan_depth(
    ssd_qsize: int, ssd_latency_avg: int, hdd_qsize: int, hdd_latency_avg: int
) -> int:
    """How many tail requests the SIB estimator sends to the disk."""
    pos = ssd_qsize
    bypassed = 0
    while pos >= 2 and pos * ssd_latency_avg > (hdd_qsize + bypassed) * hdd_latency_avg:
        bypassed += 1
        pos -= 1
    return bypassed


BALANCERS: dict[str, type] = {
    WriteBackBaseline.name: WriteBackBaseline,
    LbicaBalancer.name: LbicaBalancer,
    SibBalancer.name: SibBalancer,
}


def make_balancer(name: str, controls: Controls, theta_dom: float = 0.8):
    try:
        cls = BALANCERS[name]
    except KeyError:
        raise ValueError(f"unknown balancer {name!r}, expected one of {sorted(BALANCERS)}")
    return cls(controls, theta_dom)
