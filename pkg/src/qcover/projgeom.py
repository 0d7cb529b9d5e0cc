"""Linear algebra over GF(q) and subspaces of PG(n-1, q).

A subspace is identified by the reduced row echelon form (RREF) of any
generator matrix.  Batched routines work on integer arrays of shape
``(N, k, n)`` holding N generator matrices at once; that is how designs
are stored and verified.

Packed keys
-----------
A k x n RREF matrix ``M`` packs into the integer
``sum(M[i, j] * q**(i*n + j))``: row-major, little-endian digit order.
Row ``i`` on its own packs as ``sum(M[i, j] * q**j)``; file formats write
those row keys in hex.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterator, Sequence

import numpy as np

from .errors import GeometryError, ResourceLimitError
from .gfq import FieldSpec

DEFAULT_CAP = 20_000_000
_CHUNK_ELEMS = 6_000_000  # int64 elements per working chunk


# -- counting --------------------------------------------------------------


def theta(n: int, q: int) -> int:
    """Number of points of PG(n, q): q^n + ... + q + 1."""
    if n < 0:
        return 0
    return (q ** (n + 1) - 1) // (q - 1)


def gaussian(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of GF(q)^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def count_disjoint_lines(m: int, q: int) -> int:
    """Lines of PG(m+2, q) disjoint from a fixed (m-1)-space.

    Counted as (theta_{m+2} - theta_{m-1}) (theta_{m+1} - theta_{m-1}) / (q+1).
    """
    if m < 1:
        raise GeometryError("m must be >= 1")
    return (theta(m + 2, q) - theta(m - 1, q)) * (theta(m + 1, q) - theta(m - 1, q)) // (q + 1)


# -- packing ---------------------------------------------------------------


def key_weights(q: int, k: int, n: int) -> np.ndarray:
    if k * n * math.log2(q) >= 63:
        raise ResourceLimitError(f"packed keys for {k}x{n} over GF({q}) exceed 63 bits")
    return (np.int64(q) ** np.arange(k * n, dtype=np.int64)).reshape(k, n)


def pack_keys(F: FieldSpec, gens: np.ndarray) -> np.ndarray:
    """Packed keys of a batch of RREF matrices, shape (..., k, n) -> (...)."""
    gens = np.asarray(gens)
    k, n = gens.shape[-2:]
    w = key_weights(F.q, k, n).reshape(-1)
    flat = gens.reshape(gens.shape[:-2] + (k * n,)).astype(np.int64)
    return flat @ w


def pack_rows(F: FieldSpec, rows) -> int:
    q = F.q
    key = 0
    for i, row in enumerate(rows):
        key += row_key(q, row) * q ** (i * len(row))
    return key


def row_key(q: int, row) -> int:
    out = 0
    for j in reversed(range(len(row))):
        out = out * q + int(row[j])
    return out


def unpack_row(q: int, key: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        key, d = divmod(key, q)
        out.append(d)
    if key:
        raise GeometryError("row key has digits beyond the ambient dimension")
    return tuple(out)


def unpack_key(F: FieldSpec, key: int, k: int, n: int) -> np.ndarray:
    q = F.q
    out = np.zeros((k, n), dtype=np.int64)
    key = int(key)
    for i in range(k):
        for j in range(n):
            key, out[i, j] = divmod(key, q)
    return out


# -- elimination -----------------------------------------------------------


def rref_batch(F: FieldSpec, M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Canonical RREF of every matrix in a (N, k, n) batch.

    Returns ``(R, ranks)``; zero rows of R are moved to the bottom.
    """
    M = np.array(M, dtype=np.int64, copy=True)
    if M.ndim != 3:
        raise GeometryError("rref_batch expects a 3-d array")
    N, k, n = M.shape
    prow = np.zeros(N, dtype=np.int64)
    row_ids = np.arange(k)
    for c in range(n):
        nz = (M[:, :, c] != 0) & (row_ids[None, :] >= prow[:, None])
        has = nz.any(axis=1)
        if not has.any():
            continue
        sel = np.nonzero(has)[0]
        src = nz[sel].argmax(axis=1)
        dst = prow[sel]
        row_src = M[sel, src].copy()
        M[sel, src] = M[sel, dst]
        piv = row_src[:, c]
        pivrow = F.vmul(row_src, F.np_inv[piv][:, None])
        M[sel, dst] = pivrow
        factors = M[sel, :, c].copy()
        factors[np.arange(sel.size), dst] = 0
        M[sel] = F.vsub(M[sel], F.vmul(factors[:, :, None], pivrow[:, None, :]))
        prow[sel] += 1
        if (prow >= k).all():
            break
    return M, prow


def rref(F: FieldSpec, M) -> tuple[np.ndarray, int]:
    """RREF of one matrix with zero rows dropped, plus its rank."""
    M = np.asarray(M, dtype=np.int64)
    if M.ndim != 2:
        raise GeometryError("rref expects a matrix")
    if M.shape[0] == 0:
        return M.reshape(0, M.shape[1]), 0
    R, rk = rref_batch(F, M[None])
    r = int(rk[0])
    return R[0, :r], r


def rank(F: FieldSpec, M) -> int:
    return rref(F, M)[1]


def ranks(F: FieldSpec, M: np.ndarray) -> np.ndarray:
    return rref_batch(F, M)[1]


def null_space(F: FieldSpec, M) -> np.ndarray:
    """Basis (as rows) of {x : M x = 0}."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[1]
    R, r = rref(F, M)
    pivots = [int(np.nonzero(R[i])[0][0]) for i in range(r)]
    free = [j for j in range(n) if j not in pivots]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for t, j in enumerate(free):
        basis[t, j] = 1
        for i, pc in enumerate(pivots):
            basis[t, pc] = F.neg(int(R[i, j]))
    return basis


def mat_inverse(F: FieldSpec, M) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64)
    d = M.shape[0]
    R, r = rref(F, np.hstack([M, np.eye(d, dtype=np.int64)]))
    if r < d or not (R[:, :d] == np.eye(d, dtype=np.int64)).all():
        raise GeometryError("matrix is singular")
    return R[:, d:]


# -- subspaces -------------------------------------------------------------


class Subspace:
    """A subspace of GF(q)^n held as its canonical RREF generator matrix.

    ``k`` is the vector dimension; the projective dimension is ``k - 1``.
    Two values are equal iff their RREF matrices agree entry-wise.
    """

    __slots__ = ("field", "n", "rows", "_key")

    def __init__(self, field: FieldSpec, n: int, rows, _canonical: bool = False):
        self.field = field
        self.n = n
        if _canonical:
            self.rows = tuple(tuple(int(x) for x in r) for r in rows)
        else:
            arr = np.asarray(rows, dtype=np.int64).reshape(-1, n)
            R, _ = rref(field, arr)
            self.rows = tuple(tuple(int(x) for x in r) for r in R)
        self._key = None

    @classmethod
    def span(cls, field: FieldSpec, vectors, n: int | None = None) -> "Subspace":
        vectors = [tuple(v) for v in vectors]
        if n is None:
            if not vectors:
                raise GeometryError("ambient dimension needed for an empty span")
            n = len(vectors[0])
        return cls(field, n, vectors if vectors else np.zeros((0, n)))

    @classmethod
    def from_array(cls, field: FieldSpec, arr) -> "Subspace":
        """Wrap an array that is already canonical RREF (no re-reduction)."""
        arr = np.asarray(arr)
        return cls(field, arr.shape[1], arr, _canonical=True)

    @classmethod
    def from_key(cls, field: FieldSpec, key: int, k: int, n: int) -> "Subspace":
        return cls.from_array(field, unpack_key(field, key, k, n))

    @classmethod
    def whole(cls, field: FieldSpec, n: int) -> "Subspace":
        return cls.from_array(field, np.eye(n, dtype=np.int64))

    @property
    def k(self) -> int:
        return len(self.rows)

    @property
    def pdim(self) -> int:
        return self.k - 1

    @property
    def key(self) -> int:
        if self._key is None:
            self._key = pack_rows(self.field, self.rows)
        return self._key

    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64).reshape(self.k, self.n)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(r) if x) for r in self.rows)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.n == other.n
            and self.rows == other.rows
            and self.field == other.field
        )

    def __hash__(self) -> int:
        return hash((self.n, self.rows))

    def __lt__(self, other: "Subspace") -> bool:
        return (self.k, self.key) < (other.k, other.key)

    def __repr__(self) -> str:
        body = "; ".join("".join(str(x) for x in r) for r in self.rows)
        return f"Subspace(q={self.field.q}, n={self.n}, k={self.k}: [{body}])"

    def _check(self, other: "Subspace") -> None:
        if self.n != other.n or self.field != other.field:
            raise GeometryError("subspaces live in different ambient spaces")

    def join(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace(self.field, self.n, np.vstack([self.array(), other.array()]))

    def meet(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.k == 0 or other.k == 0:
            return Subspace(self.field, self.n, np.zeros((0, self.n)))
        # (S^perp + T^perp)^perp
        dual = np.vstack([null_space(self.field, self.array()), null_space(self.field, other.array())])
        if dual.shape[0] == 0:
            return Subspace.whole(self.field, self.n)
        return Subspace(self.field, self.n, null_space(self.field, dual))

    def contains(self, other: "Subspace") -> bool:
        """True iff ``other`` is a subspace of ``self``."""
        self._check(other)
        if other.k > self.k:
            return False
        if other.k == 0:
            return True
        return rank(self.field, np.vstack([self.array(), other.array()])) == self.k

    def contains_vector(self, v) -> bool:
        return rank(self.field, np.vstack([self.array(), np.asarray(v)[None]])) == self.k

    def is_disjoint(self, other: "Subspace") -> bool:
        """Projectively disjoint: the vector spaces meet only in 0."""
        self._check(other)
        return rank(self.field, np.vstack([self.array(), other.array()])) == self.k + other.k

    def dual_basis(self) -> np.ndarray:
        """Rows spanning the annihilator under the standard dot product."""
        if self.k == 0:
            return np.eye(self.n, dtype=np.int64)
        return null_space(self.field, self.array())

    def points(self) -> list[tuple[int, ...]]:
        """Normalised vectors of the points of this subspace."""
        if self.k == 0:
            return []
        coeffs = subspace_array(self.field, self.k, 1)[:, 0, :]
        vecs = self.field.matmul(coeffs, self.array())
        return [tuple(int(x) for x in v) for v in vecs]

    def subspaces(self, r: int) -> list["Subspace"]:
        """All r-dimensional subspaces of this one."""
        if r > self.k:
            return []
        coeffs = subspace_array(self.field, self.k, r)
        gens = self.field.matmul(coeffs, self.array()[None])
        return [Subspace.from_array(self.field, g) for g in gens]


def unit_span(F: FieldSpec, n: int, indices: Sequence[int]) -> Subspace:
    """Span of the unit points U_i (1-based indices, as in PG notation)."""
    rows = np.zeros((len(indices), n), dtype=np.int64)
    for t, i in enumerate(sorted(indices)):
        rows[t, i - 1] = 1
    return Subspace.from_array(F, rows)


# -- enumeration -----------------------------------------------------------


def _free_positions(pivots: Sequence[int], n: int) -> list[tuple[int, int]]:
    pset = set(pivots)
    return [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, n) if j not in pset]


def _digits_table(q: int, f: int) -> np.ndarray:
    """All vectors of GF(q)^f in itertools.product order (first entry slowest)."""
    idx = np.arange(q**f, dtype=np.int64)
    out = np.empty((q**f, f), dtype=np.int64)
    for t in range(f):
        out[:, t] = (idx // q ** (f - 1 - t)) % q
    return out


def pivot_sets(n: int, k: int, within: Sequence[int] | None = None) -> Iterator[tuple[int, ...]]:
    cols = range(n) if within is None else sorted(within)
    return itertools.combinations(cols, k)


def _guard(n: int, k: int, q: int, cap: int | None) -> None:
    if cap is not None and gaussian(n, k, q) > cap:
        raise ResourceLimitError(
            f"{gaussian(n, k, q)} subspaces of dimension {k} in GF({q})^{n} exceed the cap {cap}"
        )


def subspace_blocks(
    F: FieldSpec, n: int, k: int, pivot_within: Sequence[int] | None = None, cap: int | None = DEFAULT_CAP
) -> Iterator[tuple[tuple[int, ...], np.ndarray]]:
    """Yield ``(pivots, gens)`` per pivot set; gens has shape (G, k, n).

    Order is pivot-set lexicographic, then free entries in product order
    over the row-major free positions.  ``pivot_within`` restricts pivots
    to the given columns.
    """
    if not 0 <= k <= n:
        raise GeometryError(f"need 0 <= k <= n, got k={k}, n={n}")
    _guard(n, k, F.q, cap)
    q = F.q
    for piv in pivot_sets(n, k, pivot_within):
        free = _free_positions(piv, n)
        combos = _digits_table(q, len(free))
        gens = np.zeros((combos.shape[0], k, n), dtype=np.int64)
        for i, p in enumerate(piv):
            gens[:, i, p] = 1
        for t, (i, j) in enumerate(free):
            gens[:, i, j] = combos[:, t]
        yield piv, gens


def subspace_key_blocks(
    F: FieldSpec, n: int, k: int, pivot_within: Sequence[int] | None = None, cap: int | None = DEFAULT_CAP
) -> Iterator[tuple[tuple[int, ...], np.ndarray]]:
    """Like :func:`subspace_blocks` but yields packed keys only (same order)."""
    if not 0 <= k <= n:
        raise GeometryError(f"need 0 <= k <= n, got k={k}, n={n}")
    _guard(n, k, F.q, cap)
    q = F.q
    w = key_weights(q, k, n)
    vals = np.arange(q, dtype=np.int64)
    for piv in pivot_sets(n, k, pivot_within):
        base = sum(int(w[i, p]) for i, p in enumerate(piv))
        keys = np.array([base], dtype=np.int64)
        for i, j in _free_positions(piv, n):
            keys = (keys[:, None] + vals[None, :] * w[i, j]).reshape(-1)
        yield piv, keys


def subspace_array(F: FieldSpec, n: int, k: int, cap: int | None = DEFAULT_CAP) -> np.ndarray:
    """All k-subspaces of GF(q)^n as one (G, k, n) array, enumeration order."""
    blocks = [g for _, g in subspace_blocks(F, n, k, cap=cap)]
    if not blocks:
        return np.zeros((0, k, n), dtype=np.int64)
    return np.concatenate(blocks)


def subspace_keys(F: FieldSpec, n: int, k: int, cap: int | None = DEFAULT_CAP) -> np.ndarray:
    return np.concatenate([keys for _, keys in subspace_key_blocks(F, n, k, cap=cap)])


def enumerate_subspaces(F: FieldSpec, n: int, k: int, cap: int | None = DEFAULT_CAP) -> Iterator[Subspace]:
    """Every k-dimensional subspace of GF(q)^n exactly once, in canonical RREF."""
    for _, gens in subspace_blocks(F, n, k, cap=cap):
        for g in gens:
            yield Subspace.from_array(F, g)


def points_array(F: FieldSpec, n: int) -> np.ndarray:
    """Normalised point vectors of PG(n-1, q), shape (theta, n)."""
    return subspace_array(F, n, 1)[:, 0, :]


# -- batched incidence -----------------------------------------------------


def internal_keys(F: FieldSpec, gens: np.ndarray, r: int) -> np.ndarray:
    """Packed keys of all r-subspaces inside each block; shape (N, G).

    For RREF ``C`` (r x k) and RREF ``B`` (k x n) the product ``C @ B`` is
    again in RREF, so no re-reduction is needed.
    """
    gens = np.asarray(gens, dtype=np.int64)
    N, k, n = gens.shape
    coeffs = subspace_array(F, k, r)
    G = coeffs.shape[0]
    w = key_weights(F.q, r, n).reshape(-1)
    out = np.empty((N, G), dtype=np.int64)
    step = max(1, _CHUNK_ELEMS // max(1, G * r * n))
    for s in range(0, N, step):
        part = F.matmul(coeffs[None], gens[s : s + step, None])
        out[s : s + step] = part.reshape(part.shape[0], G, r * n) @ w
    return out


def contained_mask(F: FieldSpec, gens: np.ndarray, container: Subspace) -> np.ndarray:
    """Boolean mask: which blocks lie inside ``container``."""
    gens = np.asarray(gens, dtype=np.int64)
    dual = container.dual_basis()
    if dual.shape[0] == 0:
        return np.ones(gens.shape[0], dtype=bool)
    out = np.empty(gens.shape[0], dtype=bool)
    step = max(1, _CHUNK_ELEMS // max(1, gens.shape[1] * dual.shape[0]))
    for s in range(0, gens.shape[0], step):
        prod = F.matmul(gens[s : s + step], dual.T)
        out[s : s + step] = ~prod.any(axis=(1, 2))
    return out


def meet_ranks(F: FieldSpec, gens: np.ndarray, other: Subspace) -> np.ndarray:
    """Vector dimension of block ∩ other for each block."""
    gens = np.asarray(gens, dtype=np.int64)
    N, k, n = gens.shape
    o = other.array()
    out = np.empty(N, dtype=np.int64)
    step = max(1, _CHUNK_ELEMS // max(1, (k + o.shape[0]) * n * 4))
    for s in range(0, N, step):
        part = gens[s : s + step]
        stacked = np.concatenate([part, np.broadcast_to(o, (part.shape[0],) + o.shape)], axis=1)
        out[s : s + step] = k + o.shape[0] - ranks(F, stacked)
    return out


def projection_ranks(F: FieldSpec, gens: np.ndarray, cols: Sequence[int]) -> np.ndarray:
    """Rank of each block restricted to the given coordinate columns."""
    sub = np.asarray(gens, dtype=np.int64)[:, :, list(cols)]
    return ranks(F, sub)
