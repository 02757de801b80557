"""Hook-driven execution loop shared by every stack-backed algorithm.

An algorithm is a set of hooks: parse one input line into a payload, decide
per element whether to pop (repeatedly) and whether to push, with optional
pre/post/no actions around each, and a formatter for the final report.  The
runner executes the loop, feeds the hooks read-only views of the top-k
entries, and drains the stack into the report when the input ends.

The same loop doubles as the replay engine: when a compressed stack needs a
folded block back, the runner re-runs the hooks over that block's input range
on an independent cursor, against a scratch stack, with a private copy of the
context.  Conditions must therefore be pure functions of (payload, context,
top-k view), and the other hooks may mutate the context but nothing else the
replay can observe.
"""

from __future__ import annotations

import bisect
import copy
import io
import time
from dataclasses import dataclass, field
from typing import Any

from .compressed import CompressedStack
from .core import ClassicStack, ContractError, Data, StackInterface
from .metrics import MemoryMeter, RunMetrics


class ParseError(ValueError):
    """An input line did not match the problem's format."""

    def __init__(self, line_no: int, line: str, reason: str):
        super().__init__(f"line {line_no}: {reason} in {line!r}")
        self.line_no = line_no


class TopAccess:
    """Read-only window onto the top k entries, handed to the conditions.

    top(j) returns the j-th entry from the top, or None where the stack holds
    fewer than j entries; j beyond the algorithm's declared depth is an
    error.  Probes are lazy: a condition that never looks at the stack never
    pays for deep access.
    """

    __slots__ = ("_stack", "k")

    def __init__(self, stack: StackInterface, k: int):
        self._stack = stack
        self.k = k

    def top(self, j: int) -> Data | None:
        if j > self.k:
            raise ContractError(f"top({j}) outside declared access depth k={self.k}")
        stack = self._stack
        if j > stack.probe_depth():
            return None
        return stack.top(j)


class StackAlgorithm:
    """Base hooks. Subclasses set k and override what they need.

    Conditions receive `top`, a TopAccess window; positions the stack cannot
    answer read as None.  `ctx` is None while initialize() runs.
    """

    k = 1

    def initialize(self, runner: "Runner") -> Any:
        """Create the context; may preload entries via runner.read_push()."""
        return None

    def clone_context(self, ctx: Any) -> Any:
        """O(1) copy of the context; override when copy.copy is too generic."""
        return copy.copy(ctx)

    def read_input(self, line: str, ctx: Any) -> Any:
        raise NotImplementedError

    def pop_condition(self, payload: Any, ctx: Any, top: TopAccess) -> bool:
        return False

    def push_condition(self, payload: Any, ctx: Any, top: TopAccess) -> bool:
        return True

    def pre_pop(self, payload: Any, ctx: Any) -> None:
        pass

    def post_pop(self, payload: Any, popped: Data, ctx: Any) -> None:
        pass

    def no_pop(self, payload: Any, ctx: Any) -> None:
        pass

    def pre_push(self, payload: Any, ctx: Any) -> None:
        pass

    def post_push(self, entry: Data, ctx: Any) -> None:
        pass

    def no_push(self, payload: Any, ctx: Any) -> None:
        pass

    def report_line(self, d: Data) -> str:
        return str(d.payload)


class LineSource:
    """Line-oriented input with independent seekable cursors.

    Cursors skip blank lines and '#' comment lines; positions refer to the
    underlying byte stream, so a cursor opened at a saved position re-reads
    exactly the bytes that followed it.  The content must not change during a
    run.
    """

    def __init__(self, path: str | None = None, data: bytes | None = None):
        self._path = path
        self._data = data
        self._handles: list = []

    @classmethod
    def from_path(cls, path) -> "LineSource":
        return cls(path=str(path))

    @classmethod
    def from_text(cls, text: str) -> "LineSource":
        return cls(data=text.encode("utf-8"))

    def cursor(self, pos: int = 0) -> "LineCursor":
        if self._path is not None:
            handle = open(self._path, "rb")
        else:
            handle = io.BytesIO(self._data)
        if pos:
            handle.seek(pos)
        self._handles.append(handle)
        return LineCursor(handle, self._handles)

    def close(self) -> None:
        for h in self._handles:
            try:
                h.close()
            except Exception:
                pass
        self._handles.clear()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class LineCursor:
    __slots__ = ("_handle", "_pos", "_registry")

    def __init__(self, handle, registry=None):
        self._handle = handle
        self._pos = handle.tell()
        self._registry = registry

    def read(self) -> tuple[str, int] | None:
        """Next data line and the byte position just after it, or None at EOF."""
        readline = self._handle.readline
        pos = self._pos
        while True:
            raw = readline()
            if not raw:
                self._pos = pos
                return None
            pos += len(raw)
            line = raw.decode("utf-8").strip()
            if not line or line.startswith("#"):
                continue
            self._pos = pos
            return line, pos

    def close(self) -> None:
        self._handle.close()
        if self._registry is not None:
            try:
                self._registry.remove(self._handle)
            except ValueError:
                pass


@dataclass
class RunResult:
    metrics: RunMetrics
    report: list[str] = field(default_factory=list)


class Runner:
    """Executes one algorithm over one input against one stack."""

    def __init__(
        self,
        algo: StackAlgorithm,
        source: LineSource,
        stack: StackInterface,
        *,
        collect_report: bool = True,
        drain_report: bool = True,
        check_invariants: bool = False,
    ):
        self.algo = algo
        self.source = source
        self.stack = stack
        self.collect_report = collect_report
        self.drain_report = drain_report
        self.check_invariants = check_invariants
        self.ctx: Any = None
        self.index = 0
        self.pushes = 0
        self.pops = 0
        self._cursor: LineCursor | None = None
        self._preload_end = 0
        self._init_ctx_snapshot: Any = None
        if isinstance(stack, CompressedStack) and stack.replay is None:
            stack.replay = self.replay_segment
        self.meter: MemoryMeter = getattr(stack, "meter", None) or MemoryMeter()

    # -- main loop -----------------------------------------------------------

    def run(self) -> RunResult:
        t0 = time.perf_counter()
        self._cursor = self.source.cursor(0)
        self.ctx = self.algo.initialize(self)
        self._init_ctx_snapshot = self.algo.clone_context(self.ctx)
        read = self._cursor.read
        read_input = self.algo.read_input
        step = self._element_step
        ctx = self.ctx
        stack = self.stack
        index = self.index
        while True:
            item = read()
            if item is None:
                break
            line, pos = item
            index += 1
            self.index = index
            try:
                payload = read_input(line, ctx)
            except ParseError:
                raise
            except Exception as exc:
                raise ParseError(index, line, str(exc)) from exc
            step(payload, index, pos, stack, ctx, False)
        final_len = self.stack.len()
        report = self._report() if self.drain_report else []
        wall = time.perf_counter() - t0
        metrics = RunMetrics(
            wall_seconds=wall,
            peak_bytes=self.meter.peak_bytes,
            live_bytes=self.meter.live_bytes,
            reconstructions=self.meter.reconstructions,
            pushes=self.pushes,
            pops=self.pops,
            degraded_estimate=getattr(self.stack, "degraded", False),
            final_len=final_len,
        )
        self._cursor.close()
        return RunResult(metrics=metrics, report=report)

    def count_reconstructions(self) -> int:
        """Total replay invocations so far; always 0 for a classic stack."""
        return self.meter.reconstructions

    def read_push(self, count: int) -> None:
        """Read and push `count` elements without consulting the conditions.

        Only valid from initialize(); the context does not exist yet, so
        read_input receives ctx=None and the entries snapshot a None context.
        """
        for _ in range(count):
            item = self._cursor.read()
            if item is None:
                raise ParseError(self.index + 1, "<eof>", "input ended during preload")
            line, pos = item
            self.index += 1
            payload = self.algo.read_input(line, None)
            self.stack.push(Data(self.index, payload, None, pos))
            self.pushes += 1
        self._preload_end = self.index

    def _element_step(self, payload, index, pos, stack, ctx, replaying) -> None:
        algo = self.algo
        view = TopAccess(stack, algo.k)
        while stack.len() > 0:
            if algo.pop_condition(payload, ctx, view):
                algo.pre_pop(payload, ctx)
                popped = stack.pop()
                if not replaying:
                    self.pops += 1
                algo.post_pop(payload, popped, ctx)
            else:
                algo.no_pop(payload, ctx)
                break
        if algo.push_condition(payload, ctx, view):
            algo.pre_push(payload, ctx)
            entry = Data(index, payload, algo.clone_context(ctx), pos)
            stack.push(entry)
            if not replaying:
                self.pushes += 1
            algo.post_push(entry, ctx)
        else:
            algo.no_push(payload, ctx)
        if self.check_invariants and not replaying and isinstance(stack, CompressedStack):
            stack.check_invariants()

    def _report(self) -> list[str]:
        lines: list[str] = []
        stack = self.stack
        while stack.len() > 0:
            d = stack.pop()
            self.pops += 1
            if self.collect_report:
                lines.append(self.algo.report_line(d))
        return lines

    # -- replay delegate -------------------------------------------------------

    def replay_segment(self, scratch: StackInterface, bottom: Data, last_index: int) -> None:
        """Re-run the hook loop over input indices bottom.index..last_index.

        Seeds the scratch with the bottom entry, restores its context
        snapshot, and resumes reading right after the bottom's line.  Entries
        preloaded by initialize() are re-pushed raw, exactly as the original
        run pushed them; the context switches to the post-initialize snapshot
        once the preloaded region ends.
        """
        algo = self.algo
        ctx = algo.clone_context(bottom.ctx_snapshot)
        scratch.push(bottom)
        if bottom.index > self._preload_end:
            algo.post_push(bottom, ctx)
        elif bottom.index == self._preload_end:
            ctx = algo.clone_context(self._init_ctx_snapshot)
        if bottom.index >= last_index:
            return
        cursor = self.source.cursor(bottom.stream_pos)
        try:
            idx = bottom.index
            while idx < last_index:
                item = cursor.read()
                if item is None:
                    raise ParseError(idx + 1, "<eof>", "input ended during replay")
                line, pos = item
                idx += 1
                self.meter.replay_lines += 1
                if idx <= self._preload_end:
                    payload = algo.read_input(line, None)
                    scratch.push(Data(idx, payload, None, pos))
                    if idx == self._preload_end:
                        ctx = algo.clone_context(self._init_ctx_snapshot)
                    continue
                payload = algo.read_input(line, ctx)
                self._element_step(payload, idx, pos, scratch, ctx, True)
        finally:
            cursor.close()


# -- twin execution / checker ------------------------------------------------


class DivergenceError(AssertionError):
    """The two stacks disagreed; carries where and how."""

    def __init__(self, ordinal: int, what: str):
        super().__init__(f"divergence at operation {ordinal}: {what}")
        self.ordinal = ordinal
        self.what = what


class TwinStack(StackInterface):
    """Drives a classic and a compressed stack in lockstep and compares them.

    Every push/pop/top is mirrored; with deep=True, after each operation all
    entry copies resident in the compressed structure (buffer, explicit runs,
    signature bottoms, floor buffers) are checked against the classic stack's
    entry at the same index.
    """

    def __init__(self, classic, compressed, deep: bool = False, cap_check: bool = True):
        self.classic = classic
        self.compressed = compressed
        self.deep = deep
        self.cap_check = cap_check
        self.ordinal = 0
        self.meter = compressed.meter

    @property
    def degraded(self) -> bool:
        return self.compressed.degraded

    def push(self, d: Data) -> None:
        self.ordinal += 1
        self.classic.push(d)
        self.compressed.push(d)
        self.verify_now()

    def pop(self) -> Data:
        self.ordinal += 1
        a = self.classic.pop()
        b = self.compressed.pop()
        if a != b:
            raise DivergenceError(self.ordinal, f"pop returned {b!r}, classic has {a!r}")
        self.verify_now()
        return b

    def top(self, j: int) -> Data | None:
        a = self.classic.top(j) if j <= self.classic.len() else None
        b = self.compressed.top(j)
        if a != b:
            raise DivergenceError(self.ordinal, f"top({j}) returned {b!r}, classic has {a!r}")
        return b

    def len(self) -> int:
        la = self.classic.len()
        lb = self.compressed.len()
        if la != lb:
            raise DivergenceError(self.ordinal, f"lengths differ: classic {la}, compressed {lb}")
        return lb

    def dispose(self) -> None:
        self.classic.dispose()
        self.compressed.dispose()

    def verify_now(self) -> None:
        if not self.deep:
            if self.cap_check:
                self.compressed.check_space_cap()
            return
        entries = self.classic.entries
        indices = [e.index for e in entries]
        for kind, d in self.compressed.iter_resident():
            i = bisect.bisect_left(indices, d.index)
            if i == len(indices) or indices[i] != d.index:
                raise DivergenceError(
                    self.ordinal,
                    f"{kind} entry index {d.index} not live in classic stack",
                )
            if entries[i] != d:
                raise DivergenceError(
                    self.ordinal,
                    f"{kind} entry at index {d.index}: {d!r} != classic {entries[i]!r}",
                )
        nb = len(self.compressed.buffer)
        if nb and entries[-nb:] != self.compressed.buffer:
            raise DivergenceError(self.ordinal, "buffer does not mirror the top entries")
        self.compressed.check_invariants()


def run_checked(
    algo: StackAlgorithm,
    source: LineSource,
    p: int,
    *,
    n_expect: int,
    k: int | None = None,
    meter: MemoryMeter | None = None,
) -> tuple[bool, str | None]:
    """Run classic and compressed in lockstep with deep state comparison.

    Returns (True, None) when every check passed, else (False, detail) with
    the first divergence: operation ordinal, entry index, and both values.
    """
    k = algo.k if k is None else k
    meter = meter or MemoryMeter()
    compressed = CompressedStack(n_expect, p, k, meter=meter)
    twin = TwinStack(ClassicStack(), compressed, deep=True)
    runner = Runner(algo, source, twin, collect_report=False)
    compressed.replay = runner.replay_segment
    try:
        runner.run()
    except DivergenceError as exc:
        return False, str(exc)
    return True, None
