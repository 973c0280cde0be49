"""Queue-time products, snapshots, and interval bookkeeping."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lbicasim import (
    Device,
    DeviceRole,
    IntervalTracker,
    IoRequest,
    OpType,
    Origin,
    compute_queue_times,
    take_snapshot,
)

qsizes = st.integers(min_value=0, max_value=1_000_000)
latencies = st.integers(min_value=1, max_value=100_000)


class TestComputeQueueTimes:
    def test_empty_queues(self):
        assert compute_queue_times(0, 100, 0, 5000) == (0, 0)

    def test_direct_products(self):
        assert compute_queue_times(10, 100, 1, 5000) == (1000, 5000)

    def test_cache_side_crossing_the_disk_side(self):
        assert compute_queue_times(60, 100, 1, 5000) == (6000, 5000)

    def test_nonpositive_latency_rejected(self):
        with pytest.raises(ValueError):
            compute_queue_times(1, 0, 1, 5000)

    def test_negative_qsize_rejected(self):
        with pytest.raises(ValueError):
            compute_queue_times(-1, 100, 0, 5000)

    @given(qsizes, latencies, qsizes, latencies)
    def test_linearity(self, s, ls, h, lh):
        cq, dq = compute_queue_times(s, ls, h, lh)
        cq2, dq2 = compute_queue_times(2 * s, ls, 2 * h, lh)
        assert (cq2, dq2) == (2 * cq, 2 * dq)


def enqueue(device, req_id, origin, now=0):
    op = OpType.READ if origin is Origin.R else OpType.WRITE
    req = IoRequest(id=req_id, arrival=now, lba=0, op=op, origin=origin, target=device.role)
    device.submit(req, now)
    return req


class TestSnapshot:
    def setup_method(self):
        self.ssd = Device(DeviceRole.SSD, 100, 100)
        self.hdd = Device(DeviceRole.HDD, 5000, 5000)

    def test_empty_queues_snapshot_empty(self):
        snap = take_snapshot(0, self.ssd, self.hdd)
        assert snap.ssd_inqueue == ()
        assert snap.hdd_inqueue == ()

    def test_origin_tags_copied_in_queue_order(self):
        enqueue(self.ssd, 1, Origin.R)
        enqueue(self.ssd, 2, Origin.P)
        enqueue(self.ssd, 3, Origin.P)
        enqueue(self.hdd, 4, Origin.R)
        snap = take_snapshot(0, self.ssd, self.hdd)
        assert [o for _, o in snap.ssd_inqueue] == [Origin.R, Origin.P, Origin.P]
        assert [o for _, o in snap.hdd_inqueue] == [Origin.R]

    def test_snapshot_unaffected_by_later_completions(self):
        enqueue(self.ssd, 1, Origin.R)
        snap = take_snapshot(0, self.ssd, self.hdd)
        before = snap.ssd_inqueue
        self.ssd.complete_due(self.ssd.busy_until)  # drain the device
        assert self.ssd.qsize == 0
        assert snap.ssd_inqueue == before


def completed_request(req_id, origin, target, arrival, completed_at):
    op = OpType.READ if origin is Origin.R else OpType.WRITE
    req = IoRequest(id=req_id, arrival=arrival, lba=0, op=op, origin=origin, target=target)
    req.completed_at = completed_at
    return req


class TestIntervalTracker:
    def setup_method(self):
        self.tracker = IntervalTracker(ssd_latency_avg=100, hdd_latency_avg=5000)

    def test_idle_window(self):
        stats = self.tracker.close_interval(1000, ssd_qsize=0, hdd_qsize=0)
        assert stats.interval_index == 1
        assert stats.window_start == 0 and stats.window_end == 1000
        assert all(count == 0 for per in stats.served.values() for count in per.values())
        assert stats.max_latency == {DeviceRole.SSD: 0, DeviceRole.HDD: 0}
        assert (stats.cache_qtime, stats.disk_qtime) == (0, 0)

    def test_single_completion_sets_max_latency(self):
        self.tracker.record_completion(
            completed_request(1, Origin.R, DeviceRole.SSD, arrival=0, completed_at=250)
        )
        stats = self.tracker.close_interval(1000, 0, 0)
        assert stats.max_latency[DeviceRole.SSD] == 250
        assert stats.served[DeviceRole.SSD][Origin.R] == 1

    def test_windowed_counters_reset_but_totals_accumulate(self):
        self.tracker.record_completion(
            completed_request(1, Origin.W, DeviceRole.HDD, arrival=0, completed_at=400)
        )
        self.tracker.close_interval(1000, 0, 0)
        stats = self.tracker.close_interval(2000, 0, 0)
        assert stats.served[DeviceRole.HDD][Origin.W] == 0
        assert stats.max_latency[DeviceRole.HDD] == 0
        assert self.tracker.totals[DeviceRole.HDD][Origin.W] == 1

    def test_qtimes_use_sampled_depths(self):
        stats = self.tracker.close_interval(1000, ssd_qsize=60, hdd_qsize=1)
        assert (stats.cache_qtime, stats.disk_qtime) == (6000, 5000)

    def test_overlapping_windows_rejected(self):
        self.tracker.close_interval(1000, 0, 0)
        with pytest.raises(ValueError):
            self.tracker.close_interval(1000, 0, 0)

    def test_served_counts_partition_completions(self):
        requests = [
            completed_request(1, Origin.R, DeviceRole.SSD, 0, 100),
            completed_request(2, Origin.P, DeviceRole.SSD, 0, 200),
            completed_request(3, Origin.R, DeviceRole.HDD, 0, 5000),
            completed_request(4, Origin.E, DeviceRole.HDD, 0, 9000),
            completed_request(5, Origin.W, DeviceRole.SSD, 50, 300),
        ]
        for req in requests:
            self.tracker.record_completion(req)
        stats = self.tracker.close_interval(10_000, 0, 0)
        total = sum(count for per in stats.served.values() for count in per.values())
        assert total == len(requests)
        assert stats.served[DeviceRole.SSD][Origin.R] == 1
        assert stats.served[DeviceRole.SSD][Origin.P] == 1
        assert stats.served[DeviceRole.SSD][Origin.W] == 1
        assert stats.served[DeviceRole.HDD][Origin.R] == 1
        assert stats.served[DeviceRole.HDD][Origin.E] == 1
