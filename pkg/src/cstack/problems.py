"""The two bundled stack algorithms: a pop/push driver and the upper hull.

TestRun reads "value,pops" pairs and performs the requested pops before each
push; it exists to exercise arbitrary pop/push distributions with almost no
per-element computation.  UpperHull reads x-sorted "x,y" points and keeps the
chain of points bounding the set from above.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Data
from .runner import Runner, StackAlgorithm


@dataclass(frozen=True, slots=True)
class TestRunPayload:
    value: int
    pops: int


@dataclass(slots=True)
class TestRunContext:
    remaining_pops: int = 0


class TestRun(StackAlgorithm):
    """Pops as many times as the current line asks (or until empty), then pushes."""

    k = 1

    def initialize(self, runner: Runner) -> TestRunContext:
        return TestRunContext()

    def clone_context(self, ctx: TestRunContext) -> TestRunContext:
        return TestRunContext(ctx.remaining_pops)

    def read_input(self, line: str, ctx) -> TestRunPayload:
        value_s, pops_s = line.split(",")
        payload = TestRunPayload(int(value_s), int(pops_s))
        if payload.pops < 0:
            raise ValueError("pop count must be non-negative")
        if ctx is not None:
            ctx.remaining_pops = payload.pops
        return payload

    def pop_condition(self, payload, ctx, top) -> bool:
        return ctx.remaining_pops > 0

    def post_pop(self, payload, popped: Data, ctx) -> None:
        ctx.remaining_pops -= 1

    def report_line(self, d: Data) -> str:
        return str(d.payload.value)


@dataclass(frozen=True, slots=True)
class Point2D:
    x: float
    y: float


def orientation(a: Point2D, b: Point2D, c: Point2D) -> int:
    """Turn direction of a->b->c: +1 counterclockwise, -1 clockwise, 0 collinear.

    Exact when all coordinates are ints; for floats, collinearity is decided
    with a relative 1e-12 tolerance on the cross product.
    """
    lhs = (b.x - a.x) * (c.y - b.y)
    rhs = (b.y - a.y) * (c.x - b.x)
    cross = lhs - rhs
    if cross == 0:
        return 0
    if not (isinstance(cross, int)):
        scale = max(abs(lhs), abs(rhs))
        if abs(cross) <= 1e-12 * scale:
            return 0
    return 1 if cross > 0 else -1


class UpperHull(StackAlgorithm):
    """Keeps the upper convex chain of x-sorted points.

    The first two points are preloaded before the main loop.  A point already
    on the chain is discarded when the incoming point sees it make a
    counterclockwise turn; collinear points stay.  Needs no context.
    """

    k = 2

    def initialize(self, runner: Runner) -> None:
        runner.read_push(2)
        return None

    def clone_context(self, ctx: None) -> None:
        return None

    def read_input(self, line: str, ctx) -> Point2D:
        x_s, y_s = line.split(",")
        return Point2D(float(x_s), float(y_s))

    def pop_condition(self, payload: Point2D, ctx, top) -> bool:
        last = top.top(1)
        below = top.top(2)
        if below is None:
            # Fewer than two entries available: no turn to evaluate.
            return False
        return orientation(below.payload, last.payload, payload) == 1

    def push_condition(self, payload: Point2D, ctx, top) -> bool:
        last = top.top(1)
        if last is not None and payload.x <= last.payload.x:
            raise ValueError(
                f"input points not sorted by strictly increasing x at x={payload.x}"
            )
        return True

    def report_line(self, d: Data) -> str:
        return f"{d.payload.x!r},{d.payload.y!r}"


PROBLEMS = {"testrun": TestRun, "upperhull": UpperHull}
