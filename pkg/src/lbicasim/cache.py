"""Cache admission, eviction, and write-policy semantics.

The cache engine owns the block map (residency, dirty bits, LRU recency)
and decides, per application access, which device requests realize it.
Metadata updates synchronously when the access is planned; the returned
:class:`RoutingPlan` models the device traffic the access costs. Hit and
miss behaviour therefore matches a pure LRU run over the access sequence,
independent of device timing.

Four write policies steer where writes and promotions go:

* WB, write-back: writes buffered in cache and marked dirty; the disk is
  only updated when a dirty victim is evicted.
* WT, write-through: writes go to cache and disk together; the access
  completes when both finish.
* WO, write-only: writes are buffered like WB, but read misses are never
  promoted, so the cache takes no promotion traffic.
* RO, read-only: only read traffic is cached; application writes bypass
  to disk, invalidating any cached copy (dirty copies are written back
  first).
"""

from __future__ import annotations

import itertools
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .engine import DeviceRole, IoRequest, OpType, Origin


class WritePolicy(Enum):
    WB = "WB"
    WT = "WT"
    WO = "WO"
    RO = "RO"


@dataclass(frozen=True)
class CacheConfig:
    capacity_blocks: int
    block_bytes: int = 4096

    def __post_init__(self):
        if self.capacity_blocks < 1:
            raise ValueError("cache capacity must be at least one block")
        if self.block_bytes < 1:
            raise ValueError("block size must be positive")


@dataclass
class CacheEntry:
    dirty: bool
    last_touch: int


@dataclass
class DeferredPromotion:
    """Submit ``request`` once the request with id ``after_id`` completes.

    A promotion installs data fetched from disk, so it cannot enter the
    cache queue before the backing disk read finishes. Materialization
    must re-check the active policy: if the cache switched to WO while the
    read was in flight, the promotion is dropped, not submitted. The
    runner refreshes ``request.arrival`` to the submission instant.
    """

    after_id: int
    request: IoRequest


@dataclass
class RoutingPlan:
    """Device submissions realizing one application access.

    ``immediate`` is ordered; same-device entries must be submitted in
    list order (e.g. the write-back of a stale dirty copy precedes the
    invalidating disk write). ``foreground`` lists the request ids whose
    completion completes the application access; other traffic in the
    plan (promotions, eviction write-backs) is background.
    """

    immediate: list[IoRequest] = field(default_factory=list)
    deferred: list[DeferredPromotion] = field(default_factory=list)
    foreground: list[int] = field(default_factory=list)


class CacheEngine:
    """Block map, LRU recency, and the active write policy.

    ``next_id`` allocates ids for the auxiliary requests the engine
    creates; the runner passes its global counter so ids stay unique
    across application and cache traffic.
    """

    def __init__(
        self,
        config: CacheConfig,
        policy: WritePolicy = WritePolicy.WB,
        next_id: Callable[[], int] | None = None,
    ):
        self.config = config
        self.policy = policy
        # insertion order is recency order: first entry is the LRU victim
        self._entries: OrderedDict[int, CacheEntry] = OrderedDict()
        self._next_id = next_id or itertools.count(1_000_000).__next__
        self.read_hits = 0
        self.read_misses = 0
        self.dirty_writebacks = 0  # every origin-E request ever emitted

    # ------------------------------------------------------------------
    # state inspection

    @property
    def occupancy(self) -> int:
        return len(self._entries)

    def resident(self, lba: int) -> bool:
        return lba in self._entries

    def resident_lbas(self) -> list[int]:
        """Resident blocks in recency order, LRU first."""
        return list(self._entries)

    def dirty_lbas(self) -> set[int]:
        return {lba for lba, e in self._entries.items() if e.dirty}

    @property
    def admits_promotion(self) -> bool:
        return self.policy is not WritePolicy.WO

    # ------------------------------------------------------------------
    # operations

    def set_policy(self, policy: WritePolicy) -> None:
        """Switch the write policy in place.

        Resident blocks and dirty bits survive the switch; nothing is
        flushed. Subsequent accesses follow the new policy.
        """
        self.policy = policy

    def access(self, req: IoRequest, now: int) -> RoutingPlan:
        """Plan the device traffic for one application access."""
        if req.origin not in (Origin.R, Origin.W):
            raise ValueError(
                f"cache access takes application traffic only, got origin {req.origin.name}"
            )
        plan = RoutingPlan(foreground=[req.id])
        if req.op is OpType.READ:
            self._plan_read(req, now, plan)
        else:
            self._plan_write(req, now, plan)
        return plan

    def evict_victim(self, now: int) -> tuple[int, IoRequest | None]:
        """Evict the LRU block from a full cache.

        Returns the victim lba and, when the victim was dirty, the HDD
        write-back request that persists it. Clean victims leave silently.
        """
        if len(self._entries) < self.config.capacity_blocks:
            raise ValueError("evict_victim called on a cache that is not full")
        lba, entry = self._entries.popitem(last=False)
        if entry.dirty:
            return lba, self._writeback(lba, now)
        return lba, None

    # ------------------------------------------------------------------
    # internals

    def _plan_read(self, req: IoRequest, now: int, plan: RoutingPlan) -> None:
        if req.lba in self._entries:
            self.read_hits += 1
            self._touch(req.lba, now)
            req.target = DeviceRole.SSD
            plan.immediate.append(req)
            return
        self.read_misses += 1
        req.target = DeviceRole.HDD
        plan.immediate.append(req)
        if self.policy is WritePolicy.WO:
            return  # miss served by disk alone, nothing admitted
        writeback = self._admit(req.lba, dirty=False, now=now)
        if writeback is not None:
            plan.immediate.append(writeback)
        promote = IoRequest(
            id=self._next_id(),
            arrival=now,
            lba=req.lba,
            op=OpType.WRITE,
            origin=Origin.P,
            target=DeviceRole.SSD,
        )
        plan.deferred.append(DeferredPromotion(after_id=req.id, request=promote))

    def _plan_write(self, req: IoRequest, now: int, plan: RoutingPlan) -> None:
        if self.policy is WritePolicy.RO:
            entry = self._entries.pop(req.lba, None)  # invalidate any cached copy
            if entry is not None and entry.dirty:
                # the cached copy holds unwritten data: persist it before
                # the new write lands on the same device queue
                plan.immediate.append(self._writeback(req.lba, now))
            req.target = DeviceRole.HDD
            plan.immediate.append(req)
            return

        if self.policy is WritePolicy.WT:
            entry = self._entries.get(req.lba)
            if entry is not None:
                entry.dirty = False  # disk copy becomes current again
                self._touch(req.lba, now)
            else:
                writeback = self._admit(req.lba, dirty=False, now=now)
                if writeback is not None:
                    plan.immediate.append(writeback)
            req.target = DeviceRole.SSD
            plan.immediate.append(req)
            mirror = IoRequest(
                id=self._next_id(),
                arrival=req.arrival,
                lba=req.lba,
                op=OpType.WRITE,
                origin=Origin.W,
                target=DeviceRole.HDD,
                app_id=req.app_id,
            )
            plan.immediate.append(mirror)
            plan.foreground.append(mirror.id)
            return

        # WB and WO both buffer the write and mark the block dirty
        req.target = DeviceRole.SSD
        plan.immediate.append(req)
        entry = self._entries.get(req.lba)
        if entry is not None:
            entry.dirty = True
            self._touch(req.lba, now)
        else:
            writeback = self._admit(req.lba, dirty=True, now=now)
            if writeback is not None:
                plan.immediate.append(writeback)

    def _touch(self, lba: int, now: int) -> None:
        self._entries.move_to_end(lba)
        self._entries[lba].last_touch = now

    def _admit(self, lba: int, dirty: bool, now: int) -> IoRequest | None:
        """Insert a non-resident block as MRU, evicting first if full."""
        writeback = None
        if len(self._entries) >= self.config.capacity_blocks:
            _victim, writeback = self.evict_victim(now)
        self._entries[lba] = CacheEntry(dirty=dirty, last_touch=now)
        return writeback

    def _writeback(self, lba: int, now: int) -> IoRequest:
        self.dirty_writebacks += 1
        return IoRequest(
            id=self._next_id(),
            arrival=now,
            lba=lba,
            op=OpType.WRITE,
            origin=Origin.E,
            target=DeviceRole.HDD,
        )
