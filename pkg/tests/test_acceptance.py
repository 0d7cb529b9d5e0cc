"""Acceptance criteria, one test per checkable part.

Each test carries ``@pytest.mark.criterion(number, part)``; the conftest
prints one PASS/FAIL line per criterion at the end of the run.  Parts whose
target value cannot be reached by any valid construction are asserted at
that value under a strict xfail, so they show up as FAIL in the
summary without turning the suite red.
"""

from __future__ import annotations

import itertools
import resource
import time

import numpy as np
import pytest

from qcover import bounds
from qcover.design import Design
from qcover.designs import (
    build_2n32,
    build_2n43,
    build_3n8_42,
    build_842,
    build_843,
    hyperplanes_through,
    lambda_2n43,
    measure_alpha_beta,
)
from qcover.errors import SearchBudgetExceeded
from qcover.gfq import field_of_order
from qcover.mrdlift import gabidulin, lifting_report
from qcover.projgeom import gaussian, meet_ranks, rank, rref_batch, unit_span
from qcover.qcdfile import read_design, write_design
from qcover.quadrics import KleinCtx, build_X_exact_cover, check_X, build_design_632, hyperplane_census_632
from qcover.spreads import find_parallelism, regular_spread, verify_parallelism, verify_spread
from qcover.verify import iter_target_multiplicities, verify_covering

criterion = pytest.mark.criterion
F2 = field_of_order(2)

CENSUS_842_UNREACHABLE = (
    "hyperplanes through Sigma contain q(q+1)(q^2+q+1) = 42 blocks for every choice of spreads "
    "and bijection; the target 30 counts only q+1 of the q(q+1) solids per spread line"
)
SIZE_3N8_42_UNREACHABLE = (
    "with the true base census 42 the recursion yields 21574 - 14*42 = 20986 blocks; 21154 needs census 30"
)
PLANE_COUNT_LITERAL = "PG(9,2) has gaussian(10,3,2) = 6347715 planes, all of which are verified; 1269543 is not that count"
TH4_CLOSED_FORM_UPPER = (
    "the closed-form upper bound equals the attained recursion size only at q = 2; for q >= 3 they differ from n = 1 on"
)


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# -- criterion 1 -------------------------------------------------------------


@criterion(1, "lifting case i")
def test_c01_lifting_case_i():
    code = gabidulin(3, 3, 2, F2)
    rep, secs = timed(lambda: lifting_report(code, 2))
    assert rep["blocks"] == 64
    assert rep["targets"] == 448
    assert (rep["min_mult"], rep["max_mult"], rep["stray"]) == (1, 1, 0)
    assert secs < 1.0


# -- criterion 2 -------------------------------------------------------------

_c2_time = []


@criterion(2, "lifting case ii")
def test_c02_lifting_case_ii():
    rep, secs = timed(lambda: lifting_report(gabidulin(4, 4, 3, F2), 2))
    _c2_time.append(secs)
    assert rep["blocks"] == 256
    assert rep["targets"] == 2**8 * gaussian(4, 2, 2)
    assert (rep["min_mult"], rep["max_mult"], rep["stray"]) == (1, 1, 0)


@criterion(2, "lifting case iii")
def test_c02_lifting_case_iii():
    rep, secs = timed(lambda: lifting_report(gabidulin(4, 4, 2, F2), 3))
    _c2_time.append(secs)
    assert rep["blocks"] == 4096
    assert rep["targets"] == 2**12 * gaussian(4, 3, 2)
    assert (rep["min_mult"], rep["max_mult"], rep["stray"]) == (1, 1, 0)
    assert sum(_c2_time) < 30


# -- criterion 3 -------------------------------------------------------------


@criterion(3, "C_2(6,3,2)")
def test_c03_design_632():
    t0 = time.perf_counter()
    d632 = build_design_632(F2)
    d = d632.design()
    rep = verify_covering(d, "count")
    secs = time.perf_counter() - t0
    assert d.size == 2**6 + 2**4 + 2 * 2**3 + 2 * 2**2 + 2 - 1 == 105
    assert rep.total_targets == 651 and rep.complete and rep.min_mult >= 1
    _, total, parts = hyperplane_census_632(d632)
    assert total == 17
    assert parts == {"X": 0, "Y": 2, "Z": 3, "T": 12}
    assert secs < 60


# -- criterion 4 -------------------------------------------------------------


@criterion(4, "C_3(6,3,2) stretch")
def test_c04_design_632_q3():
    F3 = field_of_order(3)
    budget_s = 3600
    t0 = time.perf_counter()
    ctx = KleinCtx(F3)
    try:
        X, stats = build_X_exact_cover(ctx, "agl1", budget=None, time_budget=budget_s)
    except SearchBudgetExceeded as exc:
        pytest.skip(f"X search exceeded its budget: {exc}")
    check_X(ctx, X)
    d632 = build_design_632(F3, X=X)
    d = d632.design()
    rep = verify_covering(d, "mark")
    assert d.size == 884
    assert rep.total_targets == 11011 and rep.complete
    _, total, _ = hyperplane_census_632(d632)
    assert total == 47
    assert time.perf_counter() - t0 < budget_s


# -- criterion 5 -------------------------------------------------------------


@pytest.fixture(scope="module")
def built_842():
    (d, trace), secs = timed(lambda: build_842(F2))
    return d, trace, secs


@criterion(5, "size and coverage")
def test_c05_design_842(built_842):
    d, _, build_secs = built_842
    rep, secs = timed(lambda: verify_covering(d, "count"))
    assert d.size == 346
    assert rep.total_targets == 10795 and rep.complete
    assert build_secs + secs < 10
    assert d.size < (2**4 + 1) * (2**4 + 2**2 + 1) == 357


@criterion(5, "hyperplane census 30")
@pytest.mark.xfail(strict=True, reason=CENSUS_842_UNREACHABLE)
def test_c05_census_842(built_842):
    d, _, _ = built_842
    gamma = unit_span(F2, 8, range(2, 9))
    assert gamma.contains(unit_span(F2, 8, [5, 6, 7, 8]))
    assert d.census(gamma) == 30


# -- criterion 6 -------------------------------------------------------------


@criterion(6, "C_2(8,4,3)")
def test_c06_design_843():
    t0 = time.perf_counter()
    par = find_parallelism(F2)
    d, trace = build_843(F2, (par, par))
    rep = verify_covering(d, "count")
    assert d.size == 6897
    assert rep.total_targets == 97155 and rep.complete
    assert 4 in rep.histogram
    sig = unit_span(F2, 8, [5, 6, 7, 8])
    for _, gens, mult in iter_target_multiplicities(d):
        meets_in_line = meet_ranks(F2, gens, sig) == 2
        assert ((mult == 4) == meets_in_line).all()
    # lines of Sigma times planes through each that leave Sigma: (points off Sigma) / q^2
    assert rep.histogram[4] == gaussian(4, 2, 2) * (gaussian(8, 1, 2) - gaussian(4, 1, 2)) // 4 == 2100
    alpha, betas = measure_alpha_beta(d, lambda_2n43(F2, 4))
    assert (alpha, betas) == (81, [561, 561, 561])
    assert len(hyperplanes_through(lambda_2n43(F2, 4))) == 3
    assert time.perf_counter() - t0 < 60


# -- criterion 7 -------------------------------------------------------------

_c7_time: dict[str, float] = {}


@criterion(7, "build_2n32(4,2)")
def test_c07_2n32():
    t0 = time.perf_counter()
    d, _ = build_2n32(4, F2)
    rep = verify_covering(d, "mark")
    _c7_time["2n32"] = time.perf_counter() - t0
    assert d.size == 1657
    assert rep.total_targets == 10795 and rep.complete


@pytest.fixture(scope="module")
def built_3n8_42():
    t0 = time.perf_counter()
    d, trace = build_3n8_42(1, F2)
    rep = verify_covering(d, "mark")
    _c7_time["3n8_42"] = time.perf_counter() - t0
    return d, rep


@criterion(7, "build_3n8_42(1,2) coverage")
def test_c07_3n8_42_coverage(built_3n8_42):
    d, rep = built_3n8_42
    assert d.n == 11
    assert rep.total_targets == 698027 and rep.complete


@criterion(7, "build_3n8_42(1,2) size 21154")
@pytest.mark.xfail(strict=True, reason=SIZE_3N8_42_UNREACHABLE)
def test_c07_3n8_42_size(built_3n8_42):
    d, _ = built_3n8_42
    assert d.size == 21154


@pytest.fixture(scope="module")
def built_2n43():
    t0 = time.perf_counter()
    d, trace = build_2n43(5, F2)
    rep = verify_covering(d, "count")
    _c7_time["2n43"] = time.perf_counter() - t0
    return d, trace, rep


@criterion(7, "build_2n43(5,2)")
def test_c07_2n43(built_2n43):
    d, trace, rep = built_2n43
    assert d.size == 457585
    assert rep.total_targets == gaussian(10, 3, 2) == 6347715
    assert rep.complete
    assert trace.alpha == 6897


@criterion(7, "plane count 1269543")
@pytest.mark.xfail(strict=True, reason=PLANE_COUNT_LITERAL)
def test_c07_2n43_plane_count_literal(built_2n43):
    _, _, rep = built_2n43
    assert rep.total_targets == 1269543


@criterion(7, "runtime and memory")
def test_c07_budget(built_3n8_42, built_2n43):
    assert set(_c7_time) >= {"3n8_42", "2n43"}
    assert sum(_c7_time.values()) < 15 * 60
    peak_kib = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    assert peak_kib * 1024 < 4 * 2**30


# -- criterion 8 -------------------------------------------------------------

QS = (2, 3, 4, 5)


@criterion(8, "th3 sizes = upper bounds")
def test_c08_2n32_formulas():
    t0 = time.perf_counter()
    for q, n in itertools.product(QS, range(3, 9)):
        row = bounds.bounds_2n32(n, q)
        assert row.constructed == row.upper
    assert time.perf_counter() - t0 < 1


@criterion(8, "th4 sizes = upper bounds")
@pytest.mark.xfail(strict=True, reason=TH4_CLOSED_FORM_UPPER)
def test_c08_3n8_42_formulas():
    for q, n in itertools.product(QS, range(0, 6)):
        assert bounds.size_3n8_42(n, q) == bounds.upper_3n8_42_closed_form(n, q), (q, n)


@criterion(8, "(alpha, beta, size) recurrence")
def test_c08_2n43_recurrence():
    t0 = time.perf_counter()
    for q in QS:
        prev = None
        for n in range(4, 9):
            size, alpha, beta = bounds.sequence_2n43(n, q)
            if prev is not None:
                assert alpha == prev
            prev = size
        assert bounds.sequence_2n43(5, q)[0] == bounds.bounds_43("c1043", q).upper
        assert bounds.sequence_2n43(4, q)[0] == bounds.bounds_43("c843", q).upper
    assert time.perf_counter() - t0 < 1


@criterion(8, "lower-bound instances")
def test_c08_lower_bounds():
    assert bounds.bounds_2n32(3, 2).lower == 93
    assert bounds.bounds_43("c843", 2).lower == 6477
    assert bounds.bounds_43("c1043", 2).lower == 423181


# -- criterion 9 -------------------------------------------------------------


@criterion(9, "spreads and parallelisms")
def test_c09_structures():
    t0 = time.perf_counter()
    totals = {}
    for q in (2, 3):
        F = field_of_order(q)
        assert verify_spread(regular_spread(F))
        par = find_parallelism(F)
        assert verify_parallelism(par)
        totals[q] = sum(len(s) for s in par.spreads)
    assert totals == {2: 35, 3: 130}
    assert time.perf_counter() - t0 < 5


# -- criterion 10 ------------------------------------------------------------


@criterion(10, "field axioms q <= 9")
def test_c10_field_axioms():
    for q in (2, 3, 4, 5, 7, 8, 9):
        F = field_of_order(q)
        a, b, c = (x.ravel() for x in np.meshgrid(np.arange(q), np.arange(q), np.arange(q), indexing="ij"))
        assert (F.vadd(a, F.vadd(b, c)) == F.vadd(F.vadd(a, b), c)).all()
        assert (F.vmul(a, F.vmul(b, c)) == F.vmul(F.vmul(a, b), c)).all()
        assert (F.vmul(a, F.vadd(b, c)) == F.vadd(F.vmul(a, b), F.vmul(a, c))).all()
        assert (F.vadd(a, b) == F.vadd(b, a)).all() and (F.vmul(a, b) == F.vmul(b, a)).all()
        x = np.arange(q)
        assert (F.vadd(x, 0) == x).all() and (F.vmul(x, 1) == x).all()
        assert (F.vadd(x, F.np_neg[x]) == 0).all()
        assert (F.vmul(x[1:], F.np_inv[x[1:]]) == 1).all()


@criterion(10, "canonical RREF on 10^4 matrices")
def test_c10_rref():
    rng = np.random.default_rng(2024)
    for q in (2, 3, 4):
        F = field_of_order(q)
        M = rng.integers(0, q, size=(10_000, 3, 6))
        R, rk = rref_batch(F, M)
        R2, rk2 = rref_batch(F, R)
        assert (R == R2).all() and (rk == rk2).all()
        while True:
            P = rng.integers(0, q, size=(3, 3))
            if rank(F, P) == 3:
                break
        R3, _ = rref_batch(F, F.matmul(P[None], M))
        assert (R3 == R).all()


@criterion(10, "verifier worker invariance")
def test_c10_workers(built_842):
    d, _, _ = built_842
    holed = Design(F2, d.n, d.k, d.r, d.gens[::3], d.family)
    for design in (d, holed):
        assert verify_covering(design, "count", workers=1).comparable() == verify_covering(
            design, "count", workers=4
        ).comparable()


@criterion(10, "file round trip")
def test_c10_round_trip(tmp_path, built_842):
    d, _, _ = built_842
    for name in ("a.qcd", "a.qcd.gz"):
        p1, p2 = tmp_path / name, tmp_path / ("b" + name)
        write_design(d, p1)
        write_design(read_design(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()
