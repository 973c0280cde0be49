"""Synthetic workload generation and the on-disk trace format.

A scenario is a list of phases. Each phase emits block-granular requests
at a fixed rate (optionally jittered inside each arrival slot) with a
seeded op mix and address pattern, so the same scenario and seed always
produce the same stream. Burstiness is modeled by stepping the rate
between phases rather than by heavy-tailed arrival processes, which
keeps per-phase counts checkable.

Traces serialize as text, one request per line::

    arrival_us,lba,blocks,op

with ``op`` R or W, ``#`` comments, and records sorted by arrival.
Multi-block records load as consecutive single-block requests sharing
the arrival time.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .engine import IoRequest, OpType, Origin


class TraceFormatError(ValueError):
    """A trace file violated the format contract; message names the line."""


@dataclass(frozen=True)
class UniformRandom:
    """Addresses drawn uniformly from [base, base + working_set_blocks)."""

    base: int = 0


@dataclass(frozen=True)
class Sequential:
    """Strictly monotone address walk: start, start+stride, ..."""

    start: int = 0
    stride: int = 1

    def __post_init__(self):
        if self.stride < 1:
            raise ValueError("sequential stride must be at least 1")


@dataclass(frozen=True)
class PhaseSpec:
    duration_us: int
    arrival_rate: float  # requests per second
    read_fraction: float
    address_model: UniformRandom | Sequential
    working_set_blocks: int
    jitter: float = 0.0  # fraction of the arrival slot, 0 = exact spacing
    # when set, writes draw uniformly from their own region
    # [write_base, write_base + working_set_blocks) instead of sharing
    # the read region; lets a scenario keep reads cacheable while writes
    # churn elsewhere
    write_base: int | None = None

    def __post_init__(self):
        if self.duration_us <= 0:
            raise ValueError("phase duration must be positive")
        if self.arrival_rate <= 0:
            raise ValueError("phase arrival rate must be positive")
        if not 0.0 <= self.read_fraction <= 1.0:
            raise ValueError("read fraction must be in [0, 1]")
        if self.working_set_blocks < 1:
            raise ValueError("working set must span at least one block")
        if not 0.0 <= self.jitter <= 1.0:
            raise ValueError("jitter must be in [0, 1]")
        if self.write_base is not None and not isinstance(self.address_model, UniformRandom):
            raise ValueError("a separate write region requires a uniform address model")

    @property
    def request_count(self) -> int:
        return int(self.duration_us * self.arrival_rate / 1_000_000)


def generate(phases: Sequence[PhaseSpec], seed: int, start_id: int = 0) -> list[IoRequest]:
    """Expand a scenario into its request stream, deterministically."""
    rng = random.Random(seed)
    requests: list[IoRequest] = []
    next_id = start_id
    phase_start = 0
    for phase in phases:
        count = phase.request_count
        slot = 1_000_000 / phase.arrival_rate
        seq_step = 0
        for i in range(count):
            arrival = phase_start + int(i * slot)
            if phase.jitter > 0.0:
                arrival += int(rng.random() * phase.jitter * slot)
            is_read = rng.random() < phase.read_fraction
            model = phase.address_model
            if isinstance(model, Sequential):
                lba = model.start + seq_step * model.stride
                seq_step += 1
            else:
                offset = rng.randrange(phase.working_set_blocks)
                if not is_read and phase.write_base is not None:
                    lba = phase.write_base + offset
                else:
                    lba = model.base + offset
            requests.append(
                IoRequest(
                    id=next_id,
                    arrival=arrival,
                    lba=lba,
                    op=OpType.READ if is_read else OpType.WRITE,
                    origin=Origin.R if is_read else Origin.W,
                    app_id=next_id,
                )
            )
            next_id += 1
        phase_start += phase.duration_us
    return requests


def load_trace(source: str | Path | Iterable[str], start_id: int = 0) -> list[IoRequest]:
    """Parse a trace file into single-block requests.

    Raises :class:`TraceFormatError` with the offending line number for
    malformed records and for the first out-of-order arrival.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_trace(fh, start_id=start_id)

    requests: list[IoRequest] = []
    next_id = start_id
    last_arrival = None
    for lineno, raw in enumerate(source, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 4:
            raise TraceFormatError(
                f"line {lineno}: expected 'arrival_us,lba,blocks,op', got {line!r}"
            )
        try:
            arrival, lba, blocks = int(fields[0]), int(fields[1]), int(fields[2])
        except ValueError:
            raise TraceFormatError(f"line {lineno}: arrival_us, lba and blocks must be integers")
        if arrival < 0 or lba < 0:
            raise TraceFormatError(f"line {lineno}: arrival_us and lba must be non-negative")
        if blocks < 1:
            raise TraceFormatError(f"line {lineno}: blocks must be at least 1")
        op_field = fields[3].upper()
        if op_field not in ("R", "W"):
            raise TraceFormatError(f"line {lineno}: op must be R or W, got {fields[3]!r}")
        if last_arrival is not None and arrival < last_arrival:
            raise TraceFormatError(
                f"line {lineno}: arrivals not sorted ({arrival} after {last_arrival})"
            )
        last_arrival = arrival
        op = OpType.READ if op_field == "R" else OpType.WRITE
        origin = Origin.R if op_field == "R" else Origin.W
        for offset in range(blocks):
            requests.append(
                IoRequest(
                    id=next_id,
                    arrival=arrival,
                    lba=lba + offset,
                    op=op,
                    origin=origin,
                    app_id=next_id,
                )
            )
            next_id += 1
    return requests


def dump_trace(requests: Iterable[IoRequest], path: str | Path) -> None:
    """Write requests as a single-block-per-line trace."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# arrival_us,lba,blocks,op\n")
        for req in requests:
            op = "R" if req.op is OpType.READ else "W"
            fh.write(f"{req.arrival},{req.lba},1,{op}\n")
