from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcover import bounds
from qcover.projgeom import gaussian, theta

PRIME_POWERS = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]


def test_2n32_examples():
    row = bounds.bounds_2n32(3, 2)
    assert (row.lower, row.upper) == (93, 105)
    assert bounds.bounds_2n32(4, 2).upper == 1657
    assert bounds.bounds_2n32(3, 3).upper == 884
    # lower is ceil(theta_{n-1,q^2} theta_{2n-2,q} / (q^2+q+1))
    assert -(-21 * 31 // 7) == 93


@pytest.mark.parametrize("q", [2, 3, 4, 5])
@pytest.mark.parametrize("n", range(3, 9))
def test_2n32_upper_equals_construction(q, n):
    row = bounds.bounds_2n32(n, q)
    assert row.upper == row.constructed == bounds.size_2n32(n, q)
    assert row.consistent


def test_2n32_split_matches_built_designs():
    # measured on materialised designs at q = 2
    assert bounds.split_2n32(3, 2) == (105 - 17, 17)
    assert bounds.split_2n32(4, 2) == (1657 - 281, 281)


def test_3n8_42_examples():
    row = bounds.bounds_3n8_42(0, 2)
    assert row.upper == row.constructed == 346
    # divisor (q+1)(q^2+1)(q^2+q+1) = 105 at q = 2
    assert row.lower == -(-255 * 127 // 105) == 309
    assert bounds.size_3n8_42(1, 2) == 20986


def test_3n8_42_census_forms():
    for q in PRIME_POWERS:
        assert bounds.census_842(q) == q * (q + 1) * (q * q + q + 1)
        assert bounds.census_842_naive(q) == q * (q + 1) * (2 * q + 1)
        assert bounds.split_3n8_42(0, q) == (bounds.size_842(q) - bounds.census_842(q), bounds.census_842(q))


def test_3n8_42_size_recursion_matches_materialised_counts():
    # U + V + W parts measured on the n = 1 design at q = 2
    out, inside = bounds.split_3n8_42(1, 2)
    assert out + inside == 20986 and inside == 2170


def test_3n8_42_size_is_linear_in_base_census():
    # every block of the base outside the hyperplane is copied q^2+q+1 times
    for c in range(0, 50, 7):
        assert bounds._split_3n8_42(1, 2, c) == (2**14 + 8 * (346 - c), c + 7 * (346 - c))
        assert sum(bounds._split_3n8_42(1, 2, c)) == 21574 - 14 * c


def test_closed_form_upper_agrees_with_construction_only_at_q2():
    for n in range(6):
        assert bounds.upper_3n8_42_closed_form(n, 2) == bounds.size_3n8_42(n, 2)
    for q in (3, 4, 5):
        assert bounds.upper_3n8_42_closed_form(0, q) == bounds.size_842(q)
        assert all(bounds.upper_3n8_42_closed_form(n, q) != bounds.size_3n8_42(n, q) for n in range(1, 6))


def test_43_examples():
    assert (bounds.bounds_43("c843", 2).lower, bounds.bounds_43("c843", 2).upper) == (6477, 6897)
    row = bounds.bounds_43("c1043", 2)
    assert (row.lower, row.upper) == (423181, 457585) == (17 * 73 * 341, 457585)
    assert bounds.bounds_43("c843", 3).upper == 636742
    with pytest.raises(ValueError):
        bounds.bounds_43("c1243", 2)


def test_2n43_recurrence_against_measurements():
    # (size, alpha, beta) measured on the materialised designs at q = 2
    assert bounds.sequence_2n43(4, 2) == (6897, 81, 561)
    assert bounds.step_2n43(4, 2, 6897, 81, 561) == (457585, 6897, 41073)
    # the variant with -q^2 alpha in place of +q^3 alpha gives a different beta
    assert bounds.beta_minus_variant(2, 6897, 81, 561) == 40101


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_2n43_final_upper(q):
    assert bounds.bounds_43("c843", q).constructed == bounds.bounds_43("c843", q).upper
    assert bounds.bounds_43("c1043", q).constructed == bounds.bounds_43("c1043", q).upper
    seq = [bounds.sequence_2n43(n, q) for n in range(4, 9)]
    for (s0, a0, b0), (s1, a1, b1) in zip(seq, seq[1:]):
        assert a1 == s0
        assert s1 > s0 and b1 > b0


@pytest.mark.parametrize("q", PRIME_POWERS)
def test_monotonicity(q):
    for n in range(3, 11):
        assert bounds.bounds_2n32(n, q).lower <= bounds.bounds_2n32(n, q).upper
    for n in range(0, 11):
        row = bounds.bounds_3n8_42(n, q)
        assert row.lower <= row.upper
        assert row.lower <= row.upper_closed_form
    for target in ("c843", "c1043"):
        row = bounds.bounds_43(target, q)
        assert row.lower <= row.upper


@given(st.sampled_from(PRIME_POWERS), st.integers(3, 10))
def test_2n32_lower_is_counting_bound(q, n):
    # each plane holds q^2+q+1 lines, and theta_{n-1,q^2} = theta_{2n-1,q} / (q+1)
    assert bounds.bounds_2n32(n, q).lower == bounds.trivial_lower(2 * n, 3, 2, q)
    assert bounds.trivial_lower(2 * n, 3, 2, q) == -(-gaussian(2 * n, 2, q) // theta(2, q))


def test_big_integers_stay_exact():
    q = 16
    row = bounds.bounds_43("c1043", q)
    assert row.upper > 2**63
    assert row.upper == q**18 + q**4 * (q * q + 1) * (q * q + q + 1) * (q**8 + q**6 + q**4 + q**3 + q**2 + 1) + 1


def test_metsch_comparison():
    assert bounds.metsch_spread_count(2) == 357 > bounds.size_842(2) == 346


def test_domain_errors():
    with pytest.raises(ValueError):
        bounds.bounds_2n32(2, 2)
    with pytest.raises(ValueError):
        bounds.bounds_3n8_42(-1, 2)
    with pytest.raises(ValueError):
        bounds.sequence_2n43(3, 2)
