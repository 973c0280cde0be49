"""Queue statistics: queue-time products, snapshots, per-interval counters.

The balancers act on two views of the system, both produced here:

* a point-in-time :class:`QueueSnapshot` of what sits in each device
  queue, tagged by origin, used to characterize the queued workload;
* an :class:`IntervalStats` record closed at every interval boundary,
  carrying sampled queue depths and the queue-time products
  ``qsize * latency_avg`` that drive bottleneck detection.

The latency term is the configured per-device average of read and write
service latency, fixed for the whole run; queue times are exact integer
products of that and the sampled depth.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import Device, DeviceRole, IoRequest, Origin


def compute_queue_times(
    ssd_qsize: int, ssd_latency_avg: int, hdd_qsize: int, hdd_latency_avg: int
) -> tuple[int, int]:
    """Worst-case time to drain each queue: depth times average latency."""
    if ssd_latency_avg <= 0 or hdd_latency_avg <= 0:
        raise ValueError("average latencies must be positive")
    if ssd_qsize < 0 or hdd_qsize < 0:
        raise ValueError("queue sizes must be non-negative")
    return ssd_qsize * ssd_latency_avg, hdd_qsize * hdd_latency_avg


@dataclass(frozen=True)
class QueueSnapshot:
    """Immutable copy of both queues at one instant, head to tail.

    Entries are ``(request id, origin)`` for every pending request,
    including the one in service. Later simulation steps never mutate a
    snapshot.
    """

    taken_at: int
    ssd_inqueue: tuple[tuple[int, Origin], ...]
    hdd_inqueue: tuple[tuple[int, Origin], ...]


def take_snapshot(now: int, ssd: Device, hdd: Device) -> QueueSnapshot:
    return QueueSnapshot(
        taken_at=now,
        ssd_inqueue=tuple((r.id, r.origin) for r in ssd.pending()),
        hdd_inqueue=tuple((r.id, r.origin) for r in hdd.pending()),
    )


@dataclass
class IntervalStats:
    """One closed reporting interval.

    Queue depths are sampled at the window end; ``served`` counts
    completions per device per origin inside the window; ``max_latency``
    is the largest ``completed_at - arrival`` seen per device in the
    window (zero when idle).
    """

    interval_index: int
    window_start: int
    window_end: int
    ssd_qsize: int
    hdd_qsize: int
    ssd_latency_avg: int
    hdd_latency_avg: int
    cache_qtime: int
    disk_qtime: int
    served: dict[DeviceRole, dict[Origin, int]]
    max_latency: dict[DeviceRole, int]


def _fresh_counts() -> dict[DeviceRole, dict[Origin, int]]:
    return {role: {origin: 0 for origin in Origin} for role in DeviceRole}


class IntervalTracker:
    """Streams completions into non-overlapping interval windows."""

    def __init__(self, ssd_latency_avg: int, hdd_latency_avg: int):
        self.ssd_latency_avg = ssd_latency_avg
        self.hdd_latency_avg = hdd_latency_avg
        self.totals = _fresh_counts()
        self._window_start = 0
        self._index = 0
        self._served = _fresh_counts()
        self._max_latency = {role: 0 for role in DeviceRole}

    def record_completion(self, req: IoRequest) -> None:
        assert req.target is not None and req.completed_at is not None
        self._served[req.target][req.origin] += 1
        self.totals[req.target][req.origin] += 1
        latency = req.completed_at - req.arrival
        if latency > self._max_latency[req.target]:
            self._max_latency[req.target] = latency

    def close_interval(self, end: int, ssd_qsize: int, hdd_qsize: int) -> IntervalStats:
        """Close the window ending at ``end`` and reset windowed counters."""
        if end <= self._window_start:
            raise ValueError(
                f"interval windows must not overlap: "
                f"close at {end} after window start {self._window_start}"
            )
        cache_qtime, disk_qtime = compute_queue_times(
            ssd_qsize, self.ssd_latency_avg, hdd_qsize, self.hdd_latency_avg
        )
        self._index += 1
        stats = IntervalStats(
            interval_index=self._index,
            window_start=self._window_start,
            window_end=end,
            ssd_qsize=ssd_qsize,
            hdd_qsize=hdd_qsize,
            ssd_latency_avg=self.ssd_latency_avg,
            hdd_latency_avg=self.hdd_latency_avg,
            cache_qtime=cache_qtime,
            disk_qtime=disk_qtime,
            served=self._served,
            max_latency=self._max_latency,
        )
        self._window_start = end
        self._served = _fresh_counts()
        self._max_latency = {role: 0 for role in DeviceRole}
        return stats
