"""Structure-level byte accounting, run metrics, and the p-schedule resolver.

Memory is measured by counting records the stack structures hold, against a
fixed cost table, instead of profiling the heap.  That keeps runs at full
speed and isolates the stack's footprint from unrelated allocations; the
price is that allocator overhead is not represented.  One run per case is
enough because the accounting does not perturb timing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import AccountingError

# Idealized per-record costs in bytes, applied uniformly to both stack kinds.
# A data record is an index, a stream position, a context reference and a
# payload slot; a signature additionally owns its bottom/floor data records,
# which are accounted separately as data.
DATA_BYTES = 48
SIG_BYTES = 64
BUFFER_SLOT_BYTES = 8

COST_TABLE = {
    "data": DATA_BYTES,
    "sig": SIG_BYTES,
    "slot": BUFFER_SLOT_BYTES,
}


class MemoryMeter:
    """Tracks live/peak bytes plus replay counters for one run's structures.

    One meter is shared by a stack and every scratch structure its replays
    spawn, so reconstruction memory and nested reconstruction counts all land
    in the same place.
    """

    __slots__ = (
        "live_bytes",
        "peak_bytes",
        "live_data",
        "peak_data",
        "replay_lines",
        "reconstructions",
    )

    def __init__(self):
        self.live_bytes = 0
        self.peak_bytes = 0
        self.live_data = 0
        self.peak_data = 0
        self.replay_lines = 0
        self.reconstructions = 0

    def _alloc(self, kind: str, count: int) -> None:
        self.live_bytes += COST_TABLE[kind] * count
        if self.live_bytes > self.peak_bytes:
            self.peak_bytes = self.live_bytes

    def _free(self, kind: str, count: int) -> None:
        self.live_bytes -= COST_TABLE[kind] * count
        if self.live_bytes < 0:
            raise AccountingError(f"live bytes went negative freeing {count} x {kind}")

    def alloc_data(self, count: int = 1) -> None:
        self._alloc("data", count)
        self.live_data += count
        if self.live_data > self.peak_data:
            self.peak_data = self.live_data

    def free_data(self, count: int = 1) -> None:
        self._free("data", count)
        self.live_data -= count
        if self.live_data < 0:
            raise AccountingError("live data record count went negative")

    def alloc_sig(self, count: int = 1) -> None:
        self._alloc("sig", count)

    def free_sig(self, count: int = 1) -> None:
        self._free("sig", count)

    def alloc_slot(self, count: int = 1) -> None:
        self._alloc("slot", count)

    def free_slot(self, count: int = 1) -> None:
        self._free("slot", count)


@dataclass
class RunMetrics:
    """Outcome of one run: timing, memory, and operation counts."""

    wall_seconds: float = 0.0
    peak_bytes: int = 0
    live_bytes: int = 0
    reconstructions: int = 0
    pushes: int = 0
    pops: int = 0
    degraded_estimate: bool = False
    final_len: int = 0

    def csv_fields(self) -> dict:
        return {
            "time_s": f"{self.wall_seconds:.6f}",
            "peak_bytes": self.peak_bytes,
            "reconstructions": self.reconstructions,
            "final_stack_len": self.final_len,
        }


FIXED_SCHEDULES = ("10", "50", "100", "500")
VARIABLE_SCHEDULES = ("sqrt", "root4", "root8", "log")
SCHEDULES = FIXED_SCHEDULES + VARIABLE_SCHEDULES


def resolve_p(schedule: str | int, n: int) -> int:
    """Resolve a symbolic space parameter for input size n, clamped to [2, n].

    Fixed schedules ("10", "50", "100", "500" or any integer) return their
    constant; "sqrt", "root4", "root8" take the matching root of n; "log"
    takes the base-2 logarithm.  Roots and logs are rounded to nearest.
    """
    if n < 2:
        raise ValueError(f"input size must be at least 2, got {n}")
    s = str(schedule)
    if s == "sqrt":
        p = round(n ** 0.5)
    elif s == "root4":
        p = round(n ** 0.25)
    elif s == "root8":
        p = round(n ** 0.125)
    elif s == "log":
        p = round(math.log2(n))
    else:
        try:
            p = int(s)
        except ValueError:
            raise ValueError(f"unknown p schedule: {schedule!r}") from None
    return max(2, min(p, n))
