"""Closed-form sizes and lower/upper bounds for the covering-design families.

Everything is plain Python integers, so large q and n never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

from .projgeom import gaussian, theta

FAMILIES = ("2n32", "3n8_42", "c843", "c1043")


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class BoundsRow:
    family: str
    n: int | None
    q: int
    lower: int
    upper: int
    constructed: int | None = None
    upper_closed_form: int | None = None

    @property
    def consistent(self) -> bool:
        return self.lower <= self.upper and (self.constructed is None or self.constructed == self.upper)


# -- C_q(6,3,2) and the (2n,3,2) recursion ---------------------------------


def size_632(q: int) -> int:
    return q**6 + q**4 + 2 * q**3 + 2 * q**2 + q - 1


def split_2n32(n: int, q: int) -> tuple[int, int]:
    """(blocks outside, blocks inside) the distinguished hyperplane."""
    if n < 3:
        raise ValueError("n >= 3 required")
    outside = q ** (2 * n - 3) + sum(q ** (2 * (n + j - 1)) for j in range(n - 1))
    inside = (q + 1) * sum(
        q ** (2 * i - 3) + sum(q ** (2 * (i + j - 1)) for j in range(i - 1)) for i in range(2, n)
    ) - 1
    return outside, inside


def size_2n32(n: int, q: int) -> int:
    return sum(split_2n32(n, q))


def bounds_2n32(n: int, q: int) -> BoundsRow:
    if n < 3:
        raise ValueError("n >= 3 required")
    lower = _ceil_div(theta(n - 1, q * q) * theta(2 * n - 2, q), q * q + q + 1)
    upper = (
        q ** (2 * n - 2) * theta(n - 2, q * q)
        + q ** (2 * n - 3)
        - 1
        + sum(theta(4 * i - 5, q) - theta(2 * i - 4, q) + q ** (2 * i - 2) for i in range(2, n))
    )
    return BoundsRow("2n32", n, q, lower, upper, constructed=size_2n32(n, q))


# -- C_q(8,4,2) and the (3n+8,4,2) recursion -------------------------------


def size_842(q: int) -> int:
    return q**8 + q * (q + 1) ** 2 * (q * q + 1)


def census_842(q: int) -> int:
    """Blocks of the (8,4,2) design inside a hyperplane through Sigma.

    The star of the distinguished spread line gives q(q+1)^2 and each of
    the other q^2 spread lines gives q(q+1): through each of the q+1 planes
    of Sigma on that line there are q solids of <Sigma, R> other than Sigma.
    """
    return q * (q + 1) * (q * q + q + 1)


def census_842_naive(q: int) -> int:
    """The smaller count q(q+1)(2q+1) that the recursion bounds were derived from."""
    return q * (q + 1) * (2 * q + 1)


def _split_3n8_42(n: int, q: int, base_inside: int) -> tuple[int, int]:
    if n < 0:
        raise ValueError("n >= 0 required")
    outside = size_842(q) - base_inside
    inside = base_inside
    for m in range(1, n + 1):
        inside += (q * q + q + 1) * outside
        outside = q ** (6 * m + 8) + q**3 * outside
    return outside, inside


def split_3n8_42(n: int, q: int) -> tuple[int, int]:
    """(outside, inside) the distinguished hyperplane for the built designs."""
    return _split_3n8_42(n, q, census_842(q))


def split_3n8_42_naive(n: int, q: int) -> tuple[int, int]:
    """The same split in the closed forms that assume the smaller base census."""
    if n < 0:
        raise ValueError("n >= 0 required")

    def outside(i):
        return q ** (3 * i + 2) * (2 * q * q - 1) + sum(q ** (3 * (i + j) + 5) for j in range(i + 2))

    inside = (q * q + q + 1) * sum(outside(i) for i in range(n)) + census_842_naive(q)
    return outside(n), inside


def size_3n8_42(n: int, q: int) -> int:
    return sum(split_3n8_42(n, q))


def size_3n8_42_naive(n: int, q: int) -> int:
    return sum(split_3n8_42_naive(n, q))


def upper_3n8_42_closed_form(n: int, q: int) -> int:
    s = q ** (3 * n + 5) * theta(n + 1, q**3)
    s += sum(theta(6 * i + 10, q) - theta(3 * i + 4, q) for i in range(n))
    s += sum(q ** (3 * i + 2) * (2 * q * q - 1) for i in range(n + 1))
    return s + census_842_naive(q)


def bounds_3n8_42(n: int, q: int) -> BoundsRow:
    """``upper`` is the size the recursion really attains; ``upper_closed_form``
    is the closed-form bound as usually quoted (they agree at q = 2 only)."""
    if n < 0:
        raise ValueError("n >= 0 required")
    lower = _ceil_div(theta(3 * n + 7, q) * theta(3 * n + 6, q), (q + 1) * (q * q + 1) * (q * q + q + 1))
    size = size_3n8_42(n, q)
    return BoundsRow("3n8_42", n, q, lower, size, constructed=size, upper_closed_form=upper_3n8_42_closed_form(n, q))


# -- C_q(2n,4,3) ---------------------------------------------------------


def size_843(q: int) -> int:
    return q**12 + q**4 * (q * q + 1) ** 2 * (q * q + q + 1) + 1


def census_843(q: int) -> tuple[int, int]:
    """(blocks in the 5-space Lambda, blocks in each hyperplane through it)."""
    return q**4 * (q * q + 1) + 1, q**4 * (q * q + 1) * (q * q + q + 1) + 1


def step_2n43(n: int, q: int, size: int, alpha: int, beta: int) -> tuple[int, int, int]:
    """One recursion step (n -> n+1) of (size, alpha, beta)."""
    t = q * q + q + 1
    new_size = q ** (6 * (n - 1)) + (q * q + 1) * t * size - q * (q + 1) ** 2 * (q * q + 1) * beta + q**3 * t * alpha
    new_beta = t * size - q * t * beta + q**3 * alpha
    return new_size, size, new_beta


def beta_minus_variant(q: int, size: int, alpha: int, beta: int) -> int:
    return (q * q + q + 1) * size - (q**3 + q**2 + q) * beta - q * q * alpha


def sequence_2n43(n: int, q: int) -> tuple[int, int, int]:
    """(size, alpha, beta) of the n-th design, n >= 4."""
    if n < 4:
        raise ValueError("n >= 4 required")
    s = (size_843(q), *census_843(q))
    for m in range(4, n):
        s = step_2n43(m, q, *s)
    return s


def size_2n43(n: int, q: int) -> int:
    return sequence_2n43(n, q)[0]


def bounds_43(target: str, q: int) -> BoundsRow:
    if target == "c843":
        lower = q**12 + q * q * (q**4 + 1) * (q * q + 1) * (q * q + q + 1) + 1
        upper = size_843(q)
        return BoundsRow("c843", 4, q, lower, upper, constructed=sequence_2n43(4, q)[0])
    if target == "c1043":
        lower = (q**4 + 1) * (q**6 + q**3 + 1) * (q**8 + q**6 + q**4 + q**2 + 1)
        upper = q**18 + q**4 * (q * q + 1) * (q * q + q + 1) * (q**8 + q**6 + q**4 + q**3 + q**2 + 1) + 1
        return BoundsRow("c1043", 5, q, lower, upper, constructed=sequence_2n43(5, q)[0])
    raise ValueError(f"unknown target {target!r}")


def trivial_lower(n: int, k: int, r: int, q: int) -> int:
    """Counting bound: blocks needed when each holds gaussian(k, r) targets."""
    return _ceil_div(gaussian(n, r, q), gaussian(k, r, q))


def metsch_spread_count(q: int) -> int:
    """Size of the covering of PG(7,q) lines by solids from a Desarguesian line-spread."""
    return (q**4 + 1) * (q**4 + q * q + 1)
