"""Klein quadric Q+(5, q) and the C_q(6,3,2) design X ∪ Y ∪ Z ∪ T.

Coordinates: a line <u, v> of PG(3, q) maps to the Plücker vector
(p12, p34, p13, p42, p14, p23), p_ij = u_i v_j - u_j v_i, so the image
satisfies X1 X2 + X3 X4 + X5 X6 = 0.  Greek planes are the images of the
line sets of planes of PG(3, q), Latin planes those of the line stars of
points.  The distinguished Greek plane g is the image of the plane x1 = 0,
that is g = <U2, U4, U6>, so the hyperplane X1 = 0 contains g.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .design import Design, assemble
from .errors import ConstructionError, GeometryError, SearchBudgetExceeded, SearchUnsolvable
from .exactcover import ExactCover
from .gfq import FieldSpec, ext_field
from .projgeom import (
    Subspace,
    _digits_table,
    contained_mask,
    meet_ranks,
    pack_keys,
    points_array,
    rref_batch,
    subspace_array,
    theta,
    unit_span,
)

PLUCKER_PAIRS = ((0, 1), (2, 3), (0, 2), (3, 1), (0, 3), (1, 2))

KINDS = ("empty", "single-point", "nondegenerate-conic", "single-line", "two-lines", "full-plane")


def plucker_vec(F: FieldSpec, u, v) -> np.ndarray:
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    out = np.empty(u.shape[:-1] + (6,), dtype=np.int64)
    for s, (a, b) in enumerate(PLUCKER_PAIRS):
        out[..., s] = F.vsub(F.vmul(u[..., a], v[..., b]), F.vmul(u[..., b], v[..., a]))
    return out


def _normalise(F: FieldSpec, vecs: np.ndarray) -> np.ndarray:
    vecs = np.asarray(vecs, dtype=np.int64)
    lead = vecs[np.arange(vecs.shape[0]), (vecs != 0).argmax(axis=1)]
    return F.vmul(vecs, F.np_inv[lead][:, None])


def plucker(line: Subspace) -> tuple[int, ...]:
    """Normalised Plücker point of a line of PG(3, q)."""
    if line.n != 4 or line.k != 2:
        raise GeometryError("plucker() needs a line of PG(3,q)")
    F = line.field
    p = plucker_vec(F, *line.array())
    return tuple(int(x) for x in _normalise(F, p[None])[0])


def quad_form(F: FieldSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    t = F.vadd(F.vmul(x[..., 0], x[..., 1]), F.vmul(x[..., 2], x[..., 3]))
    return F.vadd(t, F.vmul(x[..., 4], x[..., 5]))


def wedge2(F: FieldSpec, M) -> np.ndarray:
    """6 x 6 matrix induced on Plücker coordinates by a 4 x 4 matrix.

    Acts on column vectors; row vectors transform by ``x @ W.T``.
    """
    M = np.asarray(M, dtype=np.int64)
    W = np.empty((6, 6), dtype=np.int64)
    for s, (a, b) in enumerate(PLUCKER_PAIRS):
        W[:, s] = plucker_vec(F, M[:, a], M[:, b])
    return W


def apply_collineation(F: FieldSpec, gens: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Images of a batch of subspaces (rows) under x -> W x; re-canonicalised."""
    img = F.matmul(np.asarray(gens, dtype=np.int64), np.asarray(W, dtype=np.int64).T)
    return rref_batch(F, img)[0]


@dataclass(frozen=True)
class PlaneSection:
    kind: str
    points: tuple[tuple[int, ...], ...]


class KleinCtx:
    """Q+(5, q) with its plane families and the distinguished Greek plane g."""

    def __init__(self, F: FieldSpec):
        self.field = F
        self.q = F.q
        self.g = unit_span(F, 6, [2, 4, 6])

    @cached_property
    def lines3(self) -> np.ndarray:
        return subspace_array(self.field, 4, 2)

    @cached_property
    def line_images(self) -> np.ndarray:
        """Plücker points of all lines of PG(3, q), enumeration order."""
        L = self.lines3
        return _normalise(self.field, plucker_vec(self.field, L[:, 0], L[:, 1]))

    @cached_property
    def quadric_points(self) -> np.ndarray:
        pts = points_array(self.field, 6)
        return pts[quad_form(self.field, pts) == 0]

    def _family(self, members: list[np.ndarray]) -> list[Subspace]:
        return [Subspace(self.field, 6, m) for m in members]

    @cached_property
    def greek(self) -> list[Subspace]:
        F = self.field
        out = []
        for plane in subspace_array(F, 4, 3):
            Pi = Subspace.from_array(F, plane)
            idx = [i for i, l in enumerate(self.lines3) if Pi.contains(Subspace.from_array(F, l))]
            out.append(Subspace(F, 6, self.line_images[idx]))
        return out

    @cached_property
    def latin(self) -> list[Subspace]:
        F = self.field
        out = []
        for pt in points_array(F, 4):
            idx = [i for i, l in enumerate(self.lines3) if Subspace.from_array(F, l).contains_vector(pt)]
            out.append(Subspace(F, 6, self.line_images[idx]))
        return out

    def plane_families(self) -> tuple[list[Subspace], list[Subspace]]:
        return self.greek, self.latin

    def latin_through(self, line: Subspace) -> Subspace:
        hits = [p for p in self.latin if p.contains(line)]
        if len(hits) != 1:
            raise GeometryError(f"line lies in {len(hits)} Latin planes")
        return hits[0]

    # -- sections ------------------------------------------------------------
    def section_counts(self, gens: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per plane: number of quadric points and the section kind index."""
        F, q = self.field, self.q
        gens = np.asarray(gens, dtype=np.int64)
        coeffs = points_array(F, 3)  # (theta2, 3)
        pts = F.matmul(coeffs[None], gens)  # (N, theta2, 6)
        zero = quad_form(F, pts) == 0
        cnt = zero.sum(axis=1)
        kind = np.full(cnt.shape, -1, dtype=np.int64)
        kind[cnt == 0] = 0
        kind[cnt == 1] = 1
        kind[cnt == 2 * q + 1] = 4
        kind[cnt == theta(2, q)] = 5
        sel = np.nonzero(cnt == q + 1)[0]
        if sel.size:
            cz = np.broadcast_to(coeffs, (sel.size,) + coeffs.shape)[zero[sel]].reshape(sel.size, q + 1, 3)
            _, rk = rref_batch(F, cz)
            kind[sel] = np.where(rk == 2, 3, 2)
        if (kind < 0).any():
            raise ConstructionError("plane section with an impossible point count")
        return cnt, kind

    def classify_plane_section(self, plane: Subspace) -> PlaneSection:
        if plane.n != 6 or plane.k != 3:
            raise GeometryError("need a plane of PG(5,q)")
        _, kind = self.section_counts(plane.array()[None])
        pts = [p for p in plane.points() if quad_form(self.field, p) == 0]
        return PlaneSection(KINDS[int(kind[0])], tuple(pts))

    def is_singular_line(self, gens: np.ndarray) -> np.ndarray:
        F = self.field
        coeffs = points_array(F, 2)
        pts = F.matmul(coeffs[None], np.asarray(gens, dtype=np.int64))
        return (quad_form(F, pts) == 0).all(axis=1)

    # -- groups ------------------------------------------------------------
    @cached_property
    def cubic_field(self):
        return ext_field(self.field, 3, primitive=True)

    def singer_matrix(self) -> np.ndarray:
        """diag(1, C^(q-1)) with C the companion matrix of the least primitive cubic.

        The power q-1 makes the matrix itself (not only its projective
        image on g) have order q^2+q+1.
        """
        F, E = self.field, self.cubic_field
        C = E.mul_matrix(E.basis[1])
        Cp = np.eye(3, dtype=np.int64)
        for _ in range(self.q - 1):
            Cp = F.matmul(Cp, C)
        M = np.eye(4, dtype=np.int64)
        M[1:, 1:] = Cp
        return wedge2(F, M)

    def agl1_generators(self) -> list[np.ndarray]:
        """x1 fixed, v -> a v + x1 b on v = (x2, x3, x4) read in GF(q^3)."""
        F, E = self.field, self.cubic_field
        mats = []
        M = np.eye(4, dtype=np.int64)
        M[1:, 1:] = E.mul_matrix(E.basis[1])
        mats.append(M)
        for j in range(3):
            T = np.eye(4, dtype=np.int64)
            T[1 + j, 0] = 1
            mats.append(T)
        return [wedge2(F, m) for m in mats]

    def translation_generators(self) -> list[np.ndarray]:
        return self.agl1_generators()[1:]


def orbit_labels(F: FieldSpec, gens: np.ndarray, mats: list[np.ndarray]) -> np.ndarray:
    """Orbit label (smallest member index) of each block under the group
    generated by ``mats``; the block set must be invariant."""
    keys = pack_keys(F, gens)
    order = np.argsort(keys)
    skeys = keys[order]
    perms = []
    for W in mats:
        img = pack_keys(F, apply_collineation(F, gens, W))
        pos = np.searchsorted(skeys, img)
        if (pos >= skeys.size).any() or (skeys[np.minimum(pos, skeys.size - 1)] != img).any():
            raise GeometryError("block set is not invariant under the group")
        perm = order[pos]
        inv = np.empty_like(perm)
        inv[perm] = np.arange(perm.size)
        perms += [perm, inv]
    label = np.arange(keys.size)
    while True:
        new = label
        for p in perms:
            new = np.minimum(new, new[p])
        if (new == label).all():
            return label
        label = new


@dataclass
class Design632:
    field: FieldSpec
    g: Subspace
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    T: np.ndarray
    stats: dict = field(default_factory=dict)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def parts(self) -> dict[str, np.ndarray]:
        return {"X": self.X, "Y": self.Y, "Z": self.Z, "T": self.T}

    def design(self) -> Design:
        meta = {"parts": {part: int(arr.shape[0]) for part, arr in self.parts.items()}}
        return assemble(self.field, 6, 3, 2, list(self.parts.values()), "632", meta)

    @property
    def size(self) -> int:
        return sum(int(a.shape[0]) for a in self.parts.values())


def size_632(q: int) -> int:
    return q**6 + q**4 + 2 * q**3 + 2 * q**2 + q - 1


def census_632(q: int) -> int:
    return q**3 + 2 * q**2 + q - 1


def build_Y(ctx: KleinCtx) -> np.ndarray:
    return np.array([p.array() for p in ctx.greek if p != ctx.g], dtype=np.int64)


def build_Z(ctx: KleinCtx) -> np.ndarray:
    """For each line of g, the q-1 planes meeting the quadric exactly in it."""
    F = ctx.field
    pts6 = points_array(F, 6)
    out = []
    for line in ctx.g.subspaces(2):
        la = line.array()
        cand = np.concatenate([np.broadcast_to(la, (pts6.shape[0], 2, 6)), pts6[:, None, :]], axis=1)
        R, rk = rref_batch(F, cand)
        R = R[rk == 3]
        keys, first = np.unique(pack_keys(F, R), return_index=True)
        planes = R[np.sort(first)]
        cnt, kind = ctx.section_counts(planes)
        sel = planes[(kind == 3)]
        if sel.shape[0] != ctx.q - 1:
            raise ConstructionError(f"found {sel.shape[0]} planes meeting the quadric exactly in a line of g")
        out.append(sel)
    return np.concatenate(out)


def build_T(ctx: KleinCtx) -> tuple[np.ndarray, dict]:
    """Orbit of the q^2 seed planes S under the Singer group on g."""
    F, q, g = ctx.field, ctx.q, ctx.g
    lines_g = sorted(g.subspaces(2), key=lambda s: s.key)
    ell = lines_g[0]
    P = min((Subspace(F, 6, [p]) for p in ell.points()), key=lambda s: s.key)
    pi = ctx.latin_through(ell)
    through = lambda plane: sorted(
        (l for l in plane.subspaces(2) if l.contains(P) and l != ell), key=lambda s: s.key
    )
    seeds = [a.join(b).array() for a in through(pi) for b in through(g)]
    S = np.array(seeds, dtype=np.int64)
    W = ctx.singer_matrix()
    # generator order check on the points of g
    gp = np.array(g.points(), dtype=np.int64)
    cur, order = gp[:1], 0
    start = pack_keys(F, rref_batch(F, cur[:, None, :])[0])
    while True:
        cur = rref_batch(F, F.matmul(cur, W.T)[:, None, :])[0][:, 0, :]
        order += 1
        if pack_keys(F, cur[:, None, :])[0] == start[0] or order > theta(2, q):
            break
    if order != theta(2, q):
        raise ConstructionError(f"Singer generator has order {order} on g, expected {theta(2, q)}")
    orbit = [S]
    cur = S
    for _ in range(theta(2, q) - 1):
        cur = apply_collineation(F, cur, W)
        orbit.append(cur)
    T = np.concatenate(orbit)
    keys = pack_keys(F, T)
    if np.unique(keys).size != T.shape[0]:
        raise ConstructionError("Singer orbit of the seed planes is not of full size")
    return T, {"ell": ell, "P": P, "pi": pi}


def x_targets(ctx: KleinCtx) -> np.ndarray:
    """Non-singular lines disjoint from g (gens)."""
    F = ctx.field
    lines = subspace_array(F, 6, 2)
    lines = lines[meet_ranks(F, lines, ctx.g) == 0]
    return lines[~ctx.is_singular_line(lines)]


def x_candidates(ctx: KleinCtx) -> np.ndarray:
    """Planes disjoint from g meeting the quadric in a nondegenerate conic."""
    F = ctx.field
    planes = subspace_array(F, 6, 3)
    planes = planes[meet_ranks(F, planes, ctx.g) == 0]
    _, kind = ctx.section_counts(planes)
    return planes[kind == 2]


def _line_keys_of_planes(F: FieldSpec, planes: np.ndarray) -> np.ndarray:
    from .projgeom import internal_keys

    return internal_keys(F, planes, 2)


SYMMETRIES = ("agl1", "translations", "none")


def build_X_exact_cover(
    ctx: KleinCtx, symmetry: str = "agl1", budget: int | None = 2_000_000, time_budget: float | None = None
) -> tuple[np.ndarray, dict]:
    """Exact cover of the non-singular g-disjoint lines by conic planes.

    Rows of the search are orbits of candidate planes under the chosen
    group (``agl1``: x1 fixed, v -> a v + x1 b; ``translations``: the
    b-part only; ``none``: single planes).  Orbits that cover some line
    twice are discarded before the search.
    """
    if symmetry not in SYMMETRIES:
        raise ValueError(f"symmetry must be one of {SYMMETRIES}")
    F, q = ctx.field, ctx.q
    t0 = time.perf_counter()
    targets = x_targets(ctx)
    tkeys = np.sort(pack_keys(F, targets))
    cand = x_candidates(ctx)
    lkeys = _line_keys_of_planes(F, cand)
    col = np.searchsorted(tkeys, lkeys)
    if symmetry == "none":
        labels = np.arange(cand.shape[0])
    else:
        mats = ctx.agl1_generators() if symmetry == "agl1" else ctx.translation_generators()
        labels = orbit_labels(F, cand, mats)
    rows = {}
    members = {}
    for lab in np.unique(labels):
        idx = np.nonzero(labels == lab)[0]
        cols = col[idx].ravel()
        if np.unique(cols).size != cols.size:
            continue
        rows[int(lab)] = cols.tolist()
        members[int(lab)] = idx
    stats = {
        "targets": int(tkeys.size),
        "candidates": int(cand.shape[0]),
        "rows": len(rows),
        "symmetry": symmetry,
    }
    ec = ExactCover(rows, columns=range(tkeys.size))
    try:
        sol = ec.first(budget)
    except SearchBudgetExceeded as exc:
        exc.stats.update(stats)
        raise
    stats["nodes"] = ec.nodes
    stats["seconds"] = time.perf_counter() - t0
    if time_budget is not None and stats["seconds"] > time_budget:
        raise SearchBudgetExceeded("X search exceeded its time budget", stats)
    if sol is None:
        raise SearchUnsolvable(f"no exact cover with symmetry {symmetry!r}: {stats}")
    X = cand[np.sort(np.concatenate([members[s] for s in sol]))]
    return X, stats


def find_X(ctx: KleinCtx, budget: int | None = 2_000_000) -> tuple[np.ndarray, dict]:
    """Try the symmetric searches first, then fall back to smaller groups."""
    last = None
    for sym in SYMMETRIES:
        try:
            return build_X_exact_cover(ctx, sym, budget)
        except SearchUnsolvable as exc:
            last = exc
    raise last  # type: ignore[misc]


def check_X(ctx: KleinCtx, X: np.ndarray) -> None:
    """Validate an X set: conic planes disjoint from g, exact cover of targets."""
    F, q = ctx.field, ctx.q
    X = np.asarray(X, dtype=np.int64)
    if X.ndim != 3 or X.shape[1:] != (3, 6):
        raise GeometryError("X must be a set of planes of PG(5,q)")
    if (meet_ranks(F, X, ctx.g) != 0).any():
        raise ConstructionError("an X plane meets g")
    _, kind = ctx.section_counts(X)
    if (kind != 2).any():
        raise ConstructionError("an X plane is not a conic plane")
    tkeys = np.sort(pack_keys(F, x_targets(ctx)))
    lk = np.sort(_line_keys_of_planes(F, X).ravel())
    if lk.size != tkeys.size or not (lk == tkeys).all():
        raise ConstructionError("X does not cover the g-disjoint non-singular lines exactly once")


def build_design_632(F: FieldSpec, X: np.ndarray | None = None, budget: int | None = 2_000_000) -> Design632:
    ctx = KleinCtx(F)
    stats = {}
    if X is None:
        X, stats = find_X(ctx, budget)
    else:
        check_X(ctx, X)
        stats = {"source": "import"}
    Y = build_Y(ctx)
    Z = build_Z(ctx)
    T, tinfo = build_T(ctx)
    d = Design632(F, ctx.g, np.asarray(X), Y, Z, T, stats)
    d.stats["T_seed"] = {k: v.rows for k, v in tinfo.items()}
    if d.size != size_632(F.q) or d.design().duplicate_count():
        raise ConstructionError(f"632 design has {d.size} blocks, expected {size_632(F.q)}")
    return d


def gamma_632(F: FieldSpec) -> Subspace:
    """The hyperplane X1 = 0, which contains g."""
    return unit_span(F, 6, range(2, 7))


def hyperplane_census_632(d: Design632) -> tuple[Subspace, int, dict]:
    F, q = d.field, d.q
    gamma = gamma_632(F)
    breakdown = {name: int(contained_mask(F, arr, gamma).sum()) for name, arr in d.parts.items()}
    expected = {"X": 0, "Y": q, "Z": q * q - 1, "T": q * q * (q + 1)}
    total = sum(breakdown.values())
    if breakdown != expected or total != census_632(q):
        raise ConstructionError(f"census breakdown {breakdown} differs from {expected}")
    return gamma, total, breakdown
