"""Linear Gabidulin MRD codes and their lifting to subspaces.

A (n x m, delta)_q Gabidulin code is the set of n x m matrices whose
i-th row is the GF(q)-expansion of f(y^i), where f runs over the
linearized polynomials a_0 x + a_1 x^q + ... + a_{t-1} x^{q^{t-1}},
t = n - delta + 1, a_i in GF(q^m).  It has q^{m t} codewords.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, ResourceLimitError
from .gfq import ExtFieldSpec, FieldSpec, ext_field
from .projgeom import (
    Subspace,
    _digits_table,
    gaussian,
    internal_keys,
    rref_batch,
    subspace_key_blocks,
    unit_span,
)

LIFT_CASES = {"i": (3, 2, 2), "ii": (4, 3, 2), "iii": (4, 2, 3)}  # case -> (n, delta, r)


@dataclass
class RankCode:
    field: FieldSpec
    n: int
    m: int
    delta: int
    ext: ExtFieldSpec = field(repr=False)

    @property
    def t(self) -> int:
        return self.n - self.delta + 1

    @property
    def size(self) -> int:
        return self.field.q ** (self.m * self.t)

    def __len__(self) -> int:
        return self.size

    def evaluate(self, coeffs) -> np.ndarray:
        """Codeword of the linearized polynomial with coefficients ``coeffs``."""
        E = self.ext
        rows = []
        for i in range(self.n):
            g = E.basis[i]
            val = 0
            for s, a in enumerate(coeffs):
                val = E.add(val, E.mul(a, E.frobenius(g, s)))
            rows.append(E.expand(val))
        return np.array(rows, dtype=np.int64)

    def generator_matrices(self) -> np.ndarray:
        """GF(q)-basis of the code, shape (m t, n, m).

        Basis element ``s*m + j`` comes from the monomial y^j x^{q^s}.
        """
        E = self.ext
        out = []
        for s in range(self.t):
            for j in range(self.m):
                coeffs = [0] * self.t
                coeffs[s] = E.basis[j]
                out.append(self.evaluate(coeffs))
        return np.array(out, dtype=np.int64)

    def codewords(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Codewords ``start..stop-1`` in lexicographic coefficient order.

        Codeword number c has base-q digits (most significant first) equal
        to the expansions of a_0, ..., a_{t-1}.
        """
        F = self.field
        stop = self.size if stop is None else min(stop, self.size)
        basis = self.generator_matrices().reshape(self.m * self.t, self.n * self.m)
        dim = basis.shape[0]
        idx = np.arange(start, stop, dtype=np.int64)
        digits = np.empty((idx.size, dim), dtype=np.int64)
        for s in range(dim):
            digits[:, s] = (idx // F.q ** (dim - 1 - s)) % F.q
        words = F.matmul(digits, basis)
        return words.reshape(-1, self.n, self.m)

    def iter_chunks(self, chunk: int = 1 << 16):
        for s in range(0, self.size, chunk):
            yield self.codewords(s, s + chunk)

    def min_rank(self) -> int:
        """Minimum rank over nonzero codewords (= minimum distance, by linearity)."""
        best = self.n
        for chunk in self.iter_chunks():
            _, rk = rref_batch(self.field, chunk)
            nz = rk[rk > 0]
            if nz.size:
                best = min(best, int(nz.min()))
        return best

    def min_pairwise_distance(self) -> int:
        """Brute-force minimum of rank(A - B) over distinct pairs."""
        if self.size > 4096:
            raise ResourceLimitError("pairwise distance check limited to 4096 codewords")
        W = self.codewords()
        F = self.field
        best = self.n
        for i in range(W.shape[0] - 1):
            diff = F.vsub(W[i + 1 :], W[i][None])
            _, rk = rref_batch(F, diff)
            best = min(best, int(rk.min()))
        return best


def gabidulin(n: int, m: int, delta: int, F: FieldSpec) -> RankCode:
    if not 1 <= n <= m:
        raise GeometryError(f"need 1 <= n <= m, got n={n}, m={m}")
    if not 1 <= delta <= n:
        raise GeometryError(f"need 1 <= delta <= n, got delta={delta}")
    return RankCode(F, n, m, delta, ext_field(F, m))


def lift(A) -> np.ndarray:
    """Generator matrix (I_n | A); already in RREF."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[-2]
    eye = np.broadcast_to(np.eye(n, dtype=np.int64), A.shape[:-2] + (n, n))
    return np.concatenate([eye, A], axis=-1)


def lift_subspace(F: FieldSpec, A) -> Subspace:
    return Subspace.from_array(F, lift(A))


def sigma(F: FieldSpec, n: int, m: int) -> Subspace:
    """The (m-1)-space <U_{n+1}, ..., U_{n+m}> every lifted block avoids."""
    return unit_span(F, n + m, range(n + 1, n + m + 1))


@dataclass
class LiftedSet:
    field: FieldSpec
    n: int
    m: int
    blocks: np.ndarray  # (N, n, n+m)

    @property
    def ambient_n(self) -> int:
        return self.n + self.m

    @property
    def sigma(self) -> Subspace:
        return sigma(self.field, self.n, self.m)

    def __len__(self) -> int:
        return self.blocks.shape[0]


def lifted_set(code: RankCode) -> LiftedSet:
    return LiftedSet(code.field, code.n, code.m, lift(code.codewords()))


def lifting_report(code: RankCode, r: int, cap: int = 20_000_000) -> dict:
    """Multiplicities of Sigma-disjoint r-spaces in the lifted blocks.

    A target is Sigma-disjoint iff all its RREF pivots fall in the first n
    columns, so the target stream is the pivot-restricted enumeration.
    """
    F, n, m = code.field, code.n, code.m
    total = F.q ** (r * m) * gaussian(n, r, F.q)
    if total > cap:
        raise ResourceLimitError(f"{total} targets exceed cap {cap}")
    targets = np.concatenate(
        [keys for _, keys in subspace_key_blocks(F, n + m, r, pivot_within=range(n), cap=None)]
    )
    inner = np.concatenate([internal_keys(F, lift(c), r).ravel() for c in code.iter_chunks()])
    targets.sort()
    uniq, counts = np.unique(inner, return_counts=True)
    pos = np.searchsorted(uniq, targets)
    pos = np.minimum(pos, max(uniq.size - 1, 0))
    hit = uniq[pos] == targets
    mult = np.where(hit, counts[pos], 0)
    return {
        "blocks": code.size,
        "targets": int(targets.size),
        "internal": int(inner.size),
        "stray": int(np.setdiff1d(uniq, targets, assume_unique=True).size),
        "min_mult": int(mult.min()) if mult.size else 0,
        "max_mult": int(mult.max()) if mult.size else 0,
    }


def check_lifting_case(code: RankCode, case: str) -> bool:
    """Every r-space disjoint from Sigma lies in exactly one lifted block."""
    if case not in LIFT_CASES:
        raise ValueError(f"unknown lifting case {case!r}")
    n, delta, r = LIFT_CASES[case]
    if (code.n, code.delta) != (n, delta) or code.m < n:
        raise GeometryError(f"case {case} needs a ({n} x m, {delta}) code with m >= {n}")
    rep = lifting_report(code, r)
    return rep["min_mult"] == 1 and rep["max_mult"] == 1 and rep["stray"] == 0
