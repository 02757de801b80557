"""Deterministic synthetic inputs: linear-stack, nested push-pop cycles, points.

Every generator is a pure function of its GenSpec: same parameters, byte
identical file.  Files start with a header comment recording the parameters
and the RNG, then one data line per element in the owning problem's format.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from pathlib import Path

GEN_KINDS = ("pushonly", "xmas", "points")

# Nested-cycle constants: blocks of CYCLE sub-blocks, dropping half of what a
# block added once it completes.
CYCLE = 8
UNIT_DROP = CYCLE // 2


@dataclass(frozen=True, slots=True)
class GenSpec:
    kind: str
    n: int
    rho: float = 0.0
    seed: int = 0
    out_path: str | None = None

    def header(self) -> str:
        return (
            f"# kind={self.kind} n={self.n} rho={self.rho:g} "
            f"seed={self.seed} rng=mt19937"
        )


def generate(spec: GenSpec) -> str:
    """Render one input (header + data lines); write out_path if set."""
    if spec.kind == "pushonly":
        body = _gen_pushonly(spec)
    elif spec.kind == "xmas":
        body = _gen_xmas(spec)
    elif spec.kind == "points":
        body = _gen_points(spec)
    else:
        raise ValueError(f"unknown generator kind: {spec.kind!r}")
    text = spec.header() + "\n" + body
    if spec.out_path:
        Path(spec.out_path).write_text(text, encoding="utf-8")
    return text


def _gen_pushonly(spec: GenSpec) -> str:
    """n "value,pops" lines; pops is 1 with probability 1-rho, else 0.

    Every element is pushed, so with survival probability rho the stack ends
    near rho*n entries; rho=1 never pops, rho=0 keeps at most one entry.
    """
    if not 0.0 <= spec.rho <= 1.0:
        raise ValueError(f"rho must be within [0, 1], got {spec.rho}")
    rng = random.Random(spec.seed)
    lines = []
    for _ in range(spec.n):
        value = rng.randrange(1, 1_000_000_000)
        pops = 0 if rng.random() < spec.rho else 1
        lines.append(f"{value},{pops}")
    return "\n".join(lines) + "\n"


def cycle_pops_after(m: int) -> int:
    """Pops released by every nested cycle that completes after element m.

    A depth-d cycle spans CYCLE**(d+1) elements and, on completion, drops
    half of the net growth it produced, which works out to 4**(d+1) entries.
    """
    total = 0
    span = CYCLE
    drop = UNIT_DROP
    while m % span == 0:
        total += drop
        span *= CYCLE
        drop *= UNIT_DROP
    return total


def _gen_xmas(spec: GenSpec) -> str:
    """Nested push-pop cycles; pending pops attach to the next element.

    The pop loop runs before the push, so pops released when cycles complete
    at element m are carried on element m+1's line; whatever is pending when
    the input ends is dropped (the report drain empties the stack anyway).
    """
    if spec.n < 1:
        raise ValueError("xmas input needs at least one element")
    rng = random.Random(spec.seed)
    lines = []
    pending = 0
    for m in range(1, spec.n + 1):
        value = rng.randrange(1, 1_000_000_000)
        lines.append(f"{value},{pending}")
        pending = cycle_pops_after(m)
    return "\n".join(lines) + "\n"


def xmas_height_steps(n: int):
    """Yield (elements_processed, cycle_depth, height) for the nested cycles.

    Heights follow the logical schedule in which each completing cycle's drop
    applies at its own boundary: after element m the pending drops of depth
    0, 1, ... apply in order, each yielding one step.  Depth -1 tags the
    height right after the push, before any completion drops.
    """
    height = 0
    for m in range(1, n + 1):
        height += 1
        yield m, -1, height
        depth = 0
        span = CYCLE
        drop = UNIT_DROP
        while m % span == 0:
            height -= drop
            yield m, depth, height
            depth += 1
            span *= CYCLE
            drop *= UNIT_DROP


def xmas_peak_height(n: int) -> int:
    """Largest height the nested-cycle schedule reaches over n elements."""
    return max(h for _, _, h in xmas_height_steps(n))


def xmas_final_height(n: int) -> int:
    """Stack height once element n's own completion drops have applied."""
    height = 0
    for _, _, h in xmas_height_steps(n):
        height = h
    return height


def _gen_points(spec: GenSpec) -> str:
    """n uniform points in the unit square, sorted by strictly increasing x."""
    if spec.n < 2:
        raise ValueError("point input needs at least two points")
    rng = random.Random(spec.seed)
    pts = sorted((rng.random(), rng.random()) for _ in range(spec.n))
    xs = [p[0] for p in pts]
    for i in range(1, len(xs)):
        if xs[i] <= xs[i - 1]:
            xs[i] = math.nextafter(xs[i - 1], 2.0)
    lines = [f"{x!r},{y!r}" for x, (_, y) in zip(xs, pts)]
    return "\n".join(lines) + "\n"
