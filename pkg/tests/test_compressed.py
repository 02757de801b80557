import random

import pytest
from hypothesis import given, settings, strategies as st

from cstack.compressed import CompressedStack
from cstack.core import ContractError, Data, DeterminismError, EmptyStackError
from cstack.metrics import MemoryMeter

from helpers import pairs_to_text, random_trace, run_testrun, run_twin_testrun
from oracles import replay_testrun


def entry(i, payload=None):
    return Data(i, payload if payload is not None else i * 10, None, 0)


class TestDirectPushes:
    """Structure shaping at the stack API level, no runner involved."""

    def test_first_push(self):
        cs = CompressedStack(16, 2, k=1)
        cs.push(entry(1))
        assert [d.index for d in cs.first.explicit] == [1]
        assert cs.tail == []
        assert cs.len() == 1

    def test_fold_on_deepest_boundary(self):
        cs = CompressedStack(16, 2, k=1)  # sizes (8, 4, 2)
        cs.push(entry(1))
        cs.push(entry(2))
        assert [d.index for d in cs.first.explicit] == [1, 2]
        cs.push(entry(3))
        assert [d.index for d in cs.first.explicit] == [3]
        sigs = cs.first.finished[1]  # finished level-3 blocks
        assert [(s.first_index, s.last_index, s.level) for s in sigs] == [(1, 2, 3)]

    def test_new_top_block_demotes_components(self):
        cs = CompressedStack(16, 2, k=1)
        for i in (1, 2, 3):
            cs.push(entry(i))
        cs.push(entry(9))
        assert [d.index for d in cs.first.explicit] == [9]
        assert cs.second is not None and cs.second.has_survivors()
        assert cs.second.top_index() == 3
        assert cs.tail == []
        cs.check_invariants()

    def test_push_below_current_index_rejected(self):
        cs = CompressedStack(16, 2, k=1)
        cs.push(entry(5))
        with pytest.raises(ContractError):
            cs.push(entry(5))

    def test_pop_empty(self):
        cs = CompressedStack(16, 2, k=1)
        with pytest.raises(EmptyStackError):
            cs.pop()

    def test_fold_keeps_live_count(self):
        cs = CompressedStack(64, 2, k=1)
        for i in range(1, 22):
            cs.push(entry(i))
            assert cs.len() == i
        cs.check_invariants()


class TestTopAndBuffer:
    def test_top_small_depths(self):
        cs = CompressedStack(8, 2, k=2)
        for i, v in enumerate([5, 7, 9], 1):
            cs.push(entry(i, v))
        assert cs.top(1).payload == 9
        assert cs.top(2).payload == 7

    def test_top_beyond_live_is_absent(self):
        cs = CompressedStack(8, 2, k=2)
        cs.push(entry(1))
        assert cs.top(2) is None

    def test_top_beyond_declared_depth_rejected(self):
        cs = CompressedStack(8, 2, k=2)
        cs.push(entry(1))
        with pytest.raises(ContractError):
            cs.top(3)

    def test_top_after_pop_run_answers_through_reconstruction(self):
        # after the run, 1 and 2 survive only inside a signature; popping the
        # explicit entries empties the buffer, so the next top(1) must replay
        pairs = [(10, 0), (20, 0), (30, 0), (40, 0)]
        result, runner, cs, meter = run_testrun(pairs, p=2, n_expect=8, drain=False)
        assert cs.pop().payload.value == 40
        assert cs.pop().payload.value == 30
        assert meter.reconstructions == 0
        got = cs.top(1)
        assert got.payload.value == 20
        assert meter.reconstructions == 1
        assert cs.len() == 2
        assert cs.top(1) == got  # served from the buffer now


class TestOracleEquivalence:
    def test_spec_pop_trace(self):
        # four pushes then a four-pop element: the pop of index 2 rebuilds
        # the folded pair, exactly one reconstruction
        pairs = [(9, 0), (8, 0), (7, 0), (6, 0), (5, 4)]
        result, runner, cs, meter = run_testrun(pairs, p=2, n_expect=16)
        assert result.report == ["5"]
        assert meter.reconstructions == 1

    def test_interleaved_trace_matches_classic(self):
        rng = random.Random(11)
        pairs = random_trace(rng, 4096)
        result, twin = run_twin_testrun(pairs, p=3)
        pop_seq, final = replay_testrun(pairs)
        assert result.report == [str(v) for v in reversed(final)]

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_random_traces_deep_checked(self, data):
        n = data.draw(st.integers(min_value=1, max_value=120))
        rng = random.Random(data.draw(st.integers(0, 2 ** 16)))
        pairs = random_trace(rng, n)
        p = data.draw(st.sampled_from([2, 3, 5, 8]))
        result, twin = run_twin_testrun(pairs, p=p, deep=True)
        pop_seq, final = replay_testrun(pairs)
        assert result.report == [str(v) for v in reversed(final)]


class TestReconstruction:
    def test_single_entry_signature_reads_no_input(self):
        # fold {1} alone into a signature, then pop back to it
        pairs = [(10, 0), (20, 0), (30, 1), (40, 2)]
        result, runner, cs, meter = run_testrun(pairs, p=2, n_expect=16, drain=False)
        assert meter.reconstructions == 1
        assert meter.replay_lines == 0

    def test_full_block_replay_reads_its_range_once(self):
        # 48 pushes build three level-1 blocks of 16 (n=64, p=4); a deep pop
        # run consumes the two detailed components, then one more pop must
        # rebuild the oldest block from its signature: 15 lines re-read
        pairs = [(i, 0) for i in range(1, 49)] + [(100, 32)]
        marks = {}

        def on_element(runner, entry):
            if entry.index == 49:
                marks["lines"] = runner.meter.replay_lines
                marks["recon"] = runner.meter.reconstructions

        result, runner, cs, meter = run_testrun(
            pairs + [(200, 2)], p=4, n_expect=64, drain=False,
            on_element=on_element,
        )
        assert meter.replay_lines - marks["lines"] == 15
        assert meter.reconstructions - marks["recon"] == 1

    def test_rerun_is_deterministic(self):
        rng = random.Random(5)
        pairs = random_trace(rng, 600)
        dumps = []
        for _ in range(2):
            result, runner, cs, meter = run_testrun(pairs, p=3, n_expect=600, drain=False)
            dumps.append((
                [(kind, d.index, d.payload) for kind, d in cs.iter_resident()],
                meter.reconstructions,
                result.metrics.peak_bytes,
            ))
        assert dumps[0] == dumps[1]

    def test_replay_below_range_is_refused(self):
        # a pop condition that is not a pure function of its arguments decides
        # differently during the replay and tries to pop through the range
        # bottom; the scratch stack refuses instead of corrupting state
        from cstack.problems import TestRun
        from cstack.runner import LineSource, Runner

        class Impure(TestRun):
            def __init__(self):
                self.calls = 0

            def pop_condition(self, payload, ctx, top):
                self.calls += 1
                if payload.value == 20 and self.calls > 6:
                    return True  # fires only when element 2 is replayed
                return super().pop_condition(payload, ctx, top)

        pairs = [(10, 0), (20, 0), (30, 0), (40, 0), (99, 4)]
        cs = CompressedStack(16, 2, k=1, meter=MemoryMeter())
        runner = Runner(Impure(), LineSource.from_text(pairs_to_text(pairs)), cs,
                        drain_report=False)
        with pytest.raises(DeterminismError):
            runner.run()


class TestSpaceCap:
    def test_resident_entries_bounded_during_random_runs(self):
        rng = random.Random(3)
        for _ in range(12):
            pairs = random_trace(rng, 400)
            p = rng.choice([2, 4, 9, 20])
            run_twin_testrun(pairs, p=p, deep=False)  # cap asserted per op

    def test_tail_cap_holds_within_expected_size(self):
        pairs = [(i, 0) for i in range(1, 201)]
        result, runner, cs, meter = run_testrun(pairs, p=4, n_expect=200, drain=False)
        cs.check_invariants()
        assert cs.tail_within_cap()

    def test_audit_matches_incremental_count(self):
        rng = random.Random(9)
        pairs = random_trace(rng, 300)

        def on_element(runner, entry):
            stack = runner.stack
            walked = sum(1 for _ in stack.iter_resident())
            assert walked == stack.resident_data_count()

        run_testrun(pairs, p=3, n_expect=300, drain=False, on_element=on_element)


class TestOverflow:
    def test_pushes_beyond_expected_size_stay_correct(self):
        pairs = [(i, 0) for i in range(1, 33)]
        result, twin = run_twin_testrun(pairs, p=2, n_expect=16)
        assert result.metrics.degraded_estimate
        # drain happened, so re-run undrained to inspect the tail growth
        result2, runner, cs, meter = run_testrun(pairs, p=2, n_expect=16, drain=False)
        assert len(cs.tail) > cs.geom.p - 2

    def test_exact_estimate_never_degrades(self):
        pairs = [(i, 0) for i in range(1, 33)]
        result, runner, cs, meter = run_testrun(pairs, p=2, n_expect=32, drain=False)
        assert not result.metrics.degraded_estimate

    def test_undersized_estimate_uses_more_memory(self):
        # a low size estimate splits the input into many more top-level
        # blocks, so the compressed tail grows well past its usual cap
        pairs = [(i, 0) for i in range(1, 1025)]
        exact, *_ = run_testrun(pairs, p=4, n_expect=1024, drain=False)
        under, *_ = run_testrun(pairs, p=4, n_expect=256, drain=False)
        assert under.metrics.degraded_estimate
        assert under.metrics.peak_bytes > exact.metrics.peak_bytes

    def test_oversized_estimate_never_degrades(self):
        pairs = [(i, 0) for i in range(1, 1025)]
        over, *_ = run_testrun(pairs, p=2, n_expect=4096, drain=False)
        assert not over.metrics.degraded_estimate


def test_zero_reconstructions_without_pops():
    pairs = [(i, 0) for i in range(1, 301)]
    for p in (2, 5, 17):
        result, runner, cs, meter = run_testrun(pairs, p=p, n_expect=300, drain=False)
        assert meter.reconstructions == 0


def test_dispose_returns_all_bytes():
    rng = random.Random(21)
    pairs = random_trace(rng, 500)
    result, runner, cs, meter = run_testrun(pairs, p=3, n_expect=500, drain=False)
    assert meter.live_bytes > 0
    cs.dispose()
    assert meter.live_bytes == 0
    cs.dispose()  # idempotent
    assert meter.live_bytes == 0
