"""Line-spreads and 1-parallelisms of PG(3, q).

The built-in parallelism source is an exact-cover search: first all
spreads are enumerated (exact covers of the points by lines), then the
lines are exactly covered by spreads.  Parallelisms found elsewhere can be
loaded from ``.qps`` files.
"""

from __future__ import annotations

import gzip
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import FormatError, GeometryError, SearchUnsolvable
from .exactcover import ExactCover
from .gfq import FieldSpec, ext_field
from .projgeom import Subspace, points_array, subspace_array, unpack_row


@dataclass(frozen=True)
class LineSpread:
    field: FieldSpec
    lines: tuple[Subspace, ...]

    def __len__(self) -> int:
        return len(self.lines)

    def sorted(self) -> "LineSpread":
        return LineSpread(self.field, tuple(sorted(self.lines, key=lambda s: s.key)))

    def embed(self, n: int, coords: Sequence[int]) -> "LineSpread":
        return LineSpread(self.field, tuple(embed_subspace(s, n, coords) for s in self.lines))

    def line_containing(self, point) -> Subspace:
        hits = [s for s in self.lines if s.contains_vector(point)]
        if len(hits) != 1:
            raise GeometryError(f"point lies on {len(hits)} spread lines")
        return hits[0]


@dataclass(frozen=True)
class Parallelism:
    field: FieldSpec
    spreads: tuple[LineSpread, ...]

    def __len__(self) -> int:
        return len(self.spreads)

    def sorted(self) -> "Parallelism":
        spreads = [s.sorted() for s in self.spreads]
        spreads.sort(key=lambda s: tuple(l.key for l in s.lines))
        return Parallelism(self.field, tuple(spreads))

    def embed(self, n: int, coords: Sequence[int]) -> "Parallelism":
        return Parallelism(self.field, tuple(s.embed(n, coords) for s in self.spreads))

    def index_of(self, line: Subspace) -> int:
        for i, s in enumerate(self.spreads):
            if line in s.lines:
                return i
        raise GeometryError("line is in no spread of the parallelism")


def embed_subspace(s: Subspace, n: int, coords: Sequence[int]) -> Subspace:
    """Place a subspace of GF(q)^d on the 1-based coordinates ``coords`` of GF(q)^n."""
    arr = np.zeros((s.k, n), dtype=np.int64)
    src = s.array()
    for t, c in enumerate(coords):
        arr[:, c - 1] = src[:, t]
    return Subspace(s.field, n, arr)


def regular_spread(F: FieldSpec) -> LineSpread:
    """Field-reduction spread: the points of PG(1, q^2) read over GF(q).

    GF(q)^4 is identified with GF(q^2)^2 via (x1, x2, x3, x4) <-> (x1 + x2 w, x3 + x4 w).
    """
    E = ext_field(F, 2)
    reps = [(0, 1)] + [(1, lam) for lam in range(E.q)]
    lines = []
    w = E.basis[1]
    for z1, z2 in reps:
        v1 = E.expand(z1) + E.expand(z2)
        v2 = E.expand(E.mul(w, z1)) + E.expand(E.mul(w, z2))
        lines.append(Subspace(F, 4, [v1, v2]))
    return LineSpread(F, tuple(lines)).sorted()


def _point_index(F: FieldSpec):
    pts = points_array(F, 4)
    return {tuple(int(x) for x in p): i for i, p in enumerate(pts)}


def verify_spread(s: LineSpread) -> bool:
    F = s.field
    q = F.q
    if len(s.lines) != q * q + 1 or any(l.k != 2 or l.n != 4 for l in s.lines):
        return False
    index = _point_index(F)
    seen = np.zeros(len(index), dtype=np.int64)
    for l in s.lines:
        for p in l.points():
            seen[index[p]] += 1
    return bool((seen == 1).all())


def verify_parallelism(par: Parallelism) -> bool:
    F = par.field
    q = F.q
    if len(par.spreads) != q * q + q + 1:
        return False
    if not all(verify_spread(s) for s in par.spreads):
        return False
    lines = [l for s in par.spreads for l in s.lines]
    all_lines = {Subspace.from_array(F, g) for g in subspace_array(F, 4, 2)}
    return len(lines) == len(set(lines)) and set(lines) == all_lines


def all_spreads(F: FieldSpec) -> list[tuple[int, ...]]:
    """Every line-spread of PG(3, q), each as a sorted tuple of line indices.

    Line indices refer to ``subspace_array(F, 4, 2)``.
    """
    lines = subspace_array(F, 4, 2)
    index = _point_index(F)
    rows = {}
    for li, g in enumerate(lines):
        rows[li] = [index[p] for p in Subspace.from_array(F, g).points()]
    ec = ExactCover(rows, columns=range(len(index)))
    return [tuple(sorted(sol)) for sol in ec.solve()]


def find_parallelism(F: FieldSpec, budget: int | None = 10_000_000) -> Parallelism:
    """Deterministic exact-cover search for a 1-parallelism of PG(3, q)."""
    lines = subspace_array(F, 4, 2)
    spreads = all_spreads(F)
    ec = ExactCover(dict(enumerate(spreads)), columns=range(lines.shape[0]))
    sol = ec.first(budget)
    if sol is None:
        raise SearchUnsolvable(f"no parallelism of PG(3,{F.q}) found")
    par = Parallelism(
        F,
        tuple(
            LineSpread(F, tuple(Subspace.from_array(F, lines[i]) for i in spreads[s])) for s in sorted(sol)
        ),
    )
    return par.sorted()


# -- .qps files ------------------------------------------------------------


def _open(path, mode):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, mode + "t", encoding="ascii")
    return open(path, mode, encoding="ascii")


def write_parallelism(par: Parallelism, path) -> None:
    """Header ``q n_spreads``; then one block per spread, one packed line key
    (hex) per row; blocks are separated by blank lines."""
    q = par.field.q
    with _open(path, "w") as fh:
        fh.write(f"# 1-parallelism of PG(3,{q}); rows are packed RREF line keys\n")
        fh.write(f"{q} {len(par.spreads)}\n")
        for s in par.spreads:
            fh.write("\n")
            for l in s.lines:
                fh.write(f"{l.key:x}\n")


def read_parallelism(path, F: FieldSpec | None = None) -> Parallelism:
    from .gfq import field_of_order

    with _open(path, "r") as fh:
        raw = [ln.split("#", 1)[0].strip() for ln in fh]
    it = iter(raw)
    header = None
    for ln in it:
        if ln:
            header = ln.split()
            break
    if header is None or len(header) != 2:
        raise FormatError("missing 'q n_spreads' header")
    try:
        q, count = int(header[0]), int(header[1])
    except ValueError as exc:
        raise FormatError(f"bad header {header}") from exc
    F = F or field_of_order(q)
    if F.q != q:
        raise FormatError(f"file is over GF({q}), expected GF({F.q})")
    blocks: list[list[Subspace]] = []
    current: list[Subspace] = []
    for ln in it:
        if not ln:
            if current:
                blocks.append(current)
                current = []
            continue
        try:
            key = int(ln, 16)
        except ValueError as exc:
            raise FormatError(f"bad line key {ln!r}") from exc
        arr = np.array([unpack_row(q, key % q**4, 4), unpack_row(q, key // q**4, 4)], dtype=np.int64)
        sub = Subspace(F, 4, arr)
        if sub.k != 2 or sub.key != key:
            raise FormatError(f"key {ln} is not a canonical line of PG(3,{q})")
        current.append(sub)
    if current:
        blocks.append(current)
    if len(blocks) != count:
        raise FormatError(f"header announces {count} spreads, found {len(blocks)}")
    return Parallelism(F, tuple(LineSpread(F, tuple(b)) for b in blocks))

