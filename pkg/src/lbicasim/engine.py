"""Event-driven simulation core: clock, device queues, request lifecycle.

Each storage device is a single-server FIFO queue with fixed per-op
service latencies. Time is integer microseconds and only moves forward,
to the earliest pending event (a scheduled arrival or an in-service
completion). Everything else in the package (cache engine, telemetry,
balancers) runs on top of this substrate, so determinism here means
determinism everywhere: equal inputs replay to bit-identical schedules.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from enum import Enum


class Origin(Enum):
    """Request provenance: application traffic (R/W) or cache traffic (P/E)."""

    R = "R"  # application read
    W = "W"  # application write
    P = "P"  # promotion: write a block fetched from disk into the cache
    E = "E"  # eviction: write a dirty block back to disk


class OpType(Enum):
    READ = "read"
    WRITE = "write"


class DeviceRole(Enum):
    SSD = "ssd"
    HDD = "hdd"


class RoutingError(ValueError):
    """A request was submitted to a device that does not match its target."""


@dataclass
class IoRequest:
    """One block-granular device access.

    Application requests (origin R/W) carry ``app_id == id``; auxiliary
    requests created by the cache engine (promotions, eviction
    write-backs, the disk half of a write-through write) either link back
    through ``app_id`` or carry ``None``. ``target`` is unset until the
    cache engine routes the request. Timestamps fill in as the request
    moves through a device queue and must satisfy
    ``arrival <= enqueued_at <= service_start <= completed_at``.

    ``hops`` records every device the request was enqueued on, in order;
    a request bypassed from the cache queue to the disk therefore shows
    ``[SSD, HDD]``.
    """

    id: int
    arrival: int
    lba: int
    op: OpType
    origin: Origin
    target: DeviceRole | None = None
    app_id: int | None = None
    enqueued_at: int | None = None
    service_start: int | None = None
    completed_at: int | None = None
    hops: list[DeviceRole] = field(default_factory=list)


class Device:
    """Single-server FIFO queue with per-op service latencies (microseconds).

    ``qsize`` counts every pending request including the one in service.
    The in-service request can never be cancelled; queue surgery such as
    tail bypassing only reaches the waiting portion of the queue.
    """

    def __init__(self, role: DeviceRole, read_latency: int, write_latency: int):
        if read_latency <= 0 or write_latency <= 0:
            raise ValueError("service latencies must be positive")
        self.role = role
        self.read_latency = int(read_latency)
        self.write_latency = int(write_latency)
        self.waiting: deque[IoRequest] = deque()
        self.in_service: IoRequest | None = None
        self.busy_until = 0
        self.busy_time = 0  # summed service time of completed requests

    @property
    def qsize(self) -> int:
        return len(self.waiting) + (1 if self.in_service is not None else 0)

    @property
    def latency_avg(self) -> int:
        """Configured average service latency, the queue-time latency term."""
        return (self.read_latency + self.write_latency) // 2

    def latency_for(self, op: OpType) -> int:
        return self.read_latency if op is OpType.READ else self.write_latency

    def submit(self, req: IoRequest, now: int) -> None:
        if req.target is not self.role:
            raise RoutingError(
                f"request {req.id} targets {req.target and req.target.name}, "
                f"submitted to {self.role.name}"
            )
        req.enqueued_at = max(now, req.arrival)
        req.hops.append(self.role)
        self.waiting.append(req)
        self._maybe_start(now)

    def _maybe_start(self, now: int) -> None:
        if self.in_service is None and self.waiting:
            req = self.waiting.popleft()
            req.service_start = now
            self.in_service = req
            self.busy_until = now + self.latency_for(req.op)

    def complete_due(self, now: int) -> IoRequest | None:
        """Finish the in-service request if its completion time is ``now``."""
        req = self.in_service
        if req is None or self.busy_until != now:
            return None
        req.completed_at = now
        self.busy_time += now - req.service_start
        self.in_service = None
        self._maybe_start(now)
        return req

    def remove_tail(self, count: int) -> list[IoRequest]:
        """Detach up to ``count`` requests from the tail of the waiting queue.

        The in-service request is never touched, so the removable depth is
        the waiting-queue length; larger counts are clamped. Removed
        requests are returned in queue order (closest-to-service first).
        """
        n = min(count, len(self.waiting))
        if n <= 0:
            return []
        removed = [self.waiting.pop() for _ in range(n)]
        removed.reverse()
        return removed

    def pending(self) -> list[IoRequest]:
        """Head-to-tail view of pending requests, in-service first."""
        head = [self.in_service] if self.in_service is not None else []
        return head + list(self.waiting)


class Simulator:
    """Deterministic event loop over two devices and a schedule of arrivals.

    Tie-breaking at an equal timestamp is fixed: service completions are
    processed before arrivals, SSD before HDD, and arrivals in submission
    order (a monotone sequence number breaks heap ties).
    """

    def __init__(self, ssd: Device, hdd: Device):
        self.clock = 0
        self.ssd = ssd
        self.hdd = hdd
        self._arrivals: list[tuple[int, int, IoRequest]] = []
        self._seq = 0

    def device(self, role: DeviceRole | None) -> Device:
        if role is DeviceRole.SSD:
            return self.ssd
        if role is DeviceRole.HDD:
            return self.hdd
        raise RoutingError(f"request routed to unknown device {role}")

    def schedule_arrival(self, req: IoRequest) -> None:
        heapq.heappush(self._arrivals, (req.arrival, self._seq, req))
        self._seq += 1

    def submit(self, req: IoRequest, device: Device | None = None) -> None:
        if device is None:
            device = self.device(req.target)
        device.submit(req, self.clock)

    def next_event_time(self) -> int | None:
        times = []
        if self._arrivals:
            times.append(self._arrivals[0][0])
        for dev in (self.ssd, self.hdd):
            if dev.in_service is not None:
                times.append(dev.busy_until)
        return min(times) if times else None

    def step(self) -> tuple[list[IoRequest], list[IoRequest]] | None:
        """Advance the clock to the next event and process it.

        Returns ``(completed, arrived)`` for that instant, or ``None`` when
        no event is pending, which signals the end of the simulation rather
        than an error.
        """
        t = self.next_event_time()
        if t is None:
            return None
        self.clock = t
        completed = []
        for dev in (self.ssd, self.hdd):
            done = dev.complete_due(t)
            if done is not None:
                completed.append(done)
        arrived = []
        while self._arrivals and self._arrivals[0][0] == t:
            arrived.append(heapq.heappop(self._arrivals)[2])
        return completed, arrived

    def advance_to(self, t: int) -> None:
        """Move the clock to ``t``, which must not skip over pending events.

        Used for interval boundaries that fall inside an idle stretch.
        """
        nxt = self.next_event_time()
        if t < self.clock or (nxt is not None and nxt < t):
            raise ValueError(f"cannot advance to {t} past pending events")
        self.clock = t
