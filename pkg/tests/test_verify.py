from __future__ import annotations

from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import line_multiplicities, point_set
from qcover.design import Design
from qcover.errors import ResourceLimitError
from qcover.mrdlift import gabidulin, lift
from qcover.projgeom import Subspace, gaussian, unit_span
from qcover.verify import (
    CoverageReport,
    build_key_runs,
    census,
    iter_target_multiplicities,
    mem_budget,
    verify_covering,
)


def test_count_mode_matches_oracle(design632_q2):
    d = design632_q2.design()
    rep = verify_covering(d, "count")
    assert rep.complete and rep.total_targets == 651
    assert rep.histogram == {1: 616, 3: 28, 5: 7}
    assert (rep.min_mult, rep.max_mult) == (1, 5)
    assert rep.uncovered_sample == []


def test_mark_and_count_agree(design842_q2):
    d, _ = design842_q2
    mark = verify_covering(d, "mark")
    count = verify_covering(d, "count")
    assert (mark.total_targets, mark.covered) == (count.total_targets, count.covered) == (10795, 10795)
    assert (mark.min_mult, mark.max_mult) == (1, 1)
    assert count.histogram == {1: 10400, 3: 360, 18: 35}
    assert mark.histogram == {}


@pytest.mark.parametrize("mode", ["mark", "count"])
def test_worker_invariance(design843_q2, mode):
    d, _ = design843_q2
    one = verify_covering(d, mode, workers=1)
    four = verify_covering(d, mode, workers=4)
    assert one.comparable() == four.comparable()
    assert one.complete


def test_worker_invariance_with_gaps(design842_q2):
    d, _ = design842_q2
    holed = Design(d.field, d.n, d.k, d.r, d.gens[::2], d.family)
    a = verify_covering(holed, "count", workers=1)
    b = verify_covering(holed, "count", workers=4)
    assert a.comparable() == b.comparable()
    assert not a.complete


def test_spill_path(design842_q2):
    d, _ = design842_q2
    with build_key_runs(d, budget=4096) as runs:
        assert runs.spilled and len(runs.runs) > 1
    small = verify_covering(d, "count", mem_budget_bytes=4096)
    big = verify_covering(d, "count")
    assert small.comparable() == big.comparable()


def test_missing_block_gives_witnesses(F2, design632_q2):
    d = design632_q2.design()
    Z0 = design632_q2.Z[0]
    keep = ~(d.gens == Z0).all(axis=(1, 2))
    holed = Design(F2, 6, 3, 2, d.gens[keep], "632")
    rep = verify_covering(holed, "count")
    assert not rep.complete
    assert len(rep.uncovered_sample) == min(10, rep.total_targets - rep.covered)
    removed = point_set(F2, Z0)
    blocks = [point_set(F2, g) for g in holed.gens]
    for w in rep.uncovered_sample:
        pts = point_set(F2, w.array())
        assert pts <= removed
        assert not any(pts <= b for b in blocks)
    assert rep.histogram[0] == rep.total_targets - rep.covered
    assert rep.min_mult == 0


@given(st.lists(st.integers(0, 104), min_size=1, max_size=60, unique=True))
@settings(max_examples=15, deadline=None)
def test_covered_count_matches_oracle_on_subsets(design632_q2, idx):
    d = design632_q2.design()
    sub = Design(d.field, 6, 3, 2, d.gens[sorted(idx)], "632")
    rep = verify_covering(sub, "count")
    mult = line_multiplicities(d.field, sub.gens)
    assert rep.covered == len(mult)
    want = Counter(mult.values())
    want[0] = 651 - len(mult)
    assert {m: c for m, c in rep.histogram.items()} == {m: c for m, c in want.items() if c}


def test_restricted_targets_of_lifted_planes(F2):
    code = gabidulin(3, 3, 2, F2)
    d = Design(F2, 6, 3, 2, lift(code.codewords()), "lift")
    rep = verify_covering(d, "count", pivot_within=range(3))
    assert rep.total_targets == 448
    assert rep.histogram == {1: 448}
    full = verify_covering(d, "count")
    assert full.total_targets == 651 and not full.complete


def test_iter_target_multiplicities(design632_q2):
    d = design632_q2.design()
    total = 0
    for piv, gens, mult in iter_target_multiplicities(d):
        assert gens.shape[0] == mult.shape[0]
        total += mult.sum()
    assert total == 616 + 3 * 28 + 5 * 7 == 105 * 7


def test_cap_and_mode_errors(design632_q2):
    d = design632_q2.design()
    with pytest.raises(ResourceLimitError):
        verify_covering(d, cap=100)
    with pytest.raises(ValueError):
        verify_covering(d, "fast")


def test_mem_budget_env(monkeypatch):
    monkeypatch.setenv("QCOVER_MEM_BUDGET", "64m")
    assert mem_budget() == 64 << 20
    monkeypatch.setenv("QCOVER_MEM_BUDGET", "1.5G")
    assert mem_budget() == 3 << 29
    monkeypatch.setenv("QCOVER_MEM_BUDGET", "4096")
    assert mem_budget() == 4096
    monkeypatch.setenv("QCOVER_MEM_BUDGET", "lots")
    with pytest.raises(ValueError):
        mem_budget()


def test_report_rendering():
    rep = CoverageReport(10, 9, 0, 3, {0: 1, 1: 6, 3: 3}, [], 0.5, "count")
    kv = rep.as_kv()
    assert "uncovered=1" in kv and "histogram=0:1,1:6,3:3" in kv
    table = rep.as_table()
    assert "multiplicity histogram" in table
    assert not rep.complete


def test_census(F2, design632_q2):
    d = design632_q2.design()
    assert census(d, unit_span(F2, 6, range(2, 7))) == 17
    assert census(d, Subspace.whole(F2, 6)) == 105
    with pytest.raises(ValueError):
        census(d, unit_span(F2, 5, [1]))
