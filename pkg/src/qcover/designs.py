"""Base designs C_q(8,4,2), C_q(8,4,3) and the three recursive families.

Coordinate frames (1-based unit points U_i):

* 8-dimensional bases: Sigma = <U5..U8> (the lifting complement),
  Sigma' = <U1..U4>.  The (8,4,2) census hyperplane is X1 = 0; the (8,4,3)
  5-space is <U3..U8>.
* (2n,3,2): Lambda = <U4..U2n>, copies over the points of <U1,U2,U3>.
* (3n+8,4,2): Lambda = <U5..U3n+8>, copies over the points of <U1..U4>.
* (2n,4,3): Lambda_n = <U5..U2n+2>, copies over the lines of <U1..U4>.

With these choices every recursion level uses X1 = 0 (respectively
<U3..>) as its distinguished subspace, so a built design is directly the
model for the next level.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import bounds
from .design import Design, RecursionTrace, assemble
from .errors import ConstructionError, GeometryError, ResourceLimitError
from .gfq import FieldSpec
from .mrdlift import gabidulin, lift
from .projgeom import (
    Subspace,
    _digits_table,
    contained_mask,
    pack_keys,
    points_array,
    projection_ranks,
    rref_batch,
    unit_span,
)
from .spreads import LineSpread, Parallelism, find_parallelism, regular_spread, verify_parallelism, verify_spread

DEFAULT_BLOCK_CAP = 20_000_000


def _guard(count: int, cap: int | None) -> None:
    if cap is not None and count > cap:
        raise ResourceLimitError(f"construction would produce {count} blocks (cap {cap})")


def part_slices(design: Design) -> dict[str, slice]:
    """Index ranges of the named parts recorded in ``meta['parts']``."""
    out, start = {}, 0
    for name, count in design.meta.get("parts", {}).items():
        out[name] = slice(start, start + count)
        start += count
    return out


def lifted_blocks(F: FieldSpec, n: int, m: int, delta: int) -> np.ndarray:
    """Lifts (I_n | A) of every codeword of an (n x m, delta) Gabidulin code."""
    code = gabidulin(n, m, delta, F)
    return lift(code.codewords())


def map_blocks(F: FieldSpec, gens: np.ndarray, images: np.ndarray, chunk: int = 1 << 17) -> np.ndarray:
    """Image of each block under the linear map sending model basis vector i
    to row i of ``images``; re-canonicalised."""
    gens = np.asarray(gens, dtype=np.int64)
    images = np.asarray(images, dtype=np.int64)
    out = np.empty(gens.shape[:2] + (images.shape[1],), dtype=np.int64)
    for s in range(0, gens.shape[0], chunk):
        out[s : s + chunk] = rref_batch(F, F.matmul(gens[s : s + chunk], images))[0]
    return out


def embedding_matrix(model_hplane: Subspace, lam: Subspace, point) -> np.ndarray:
    """Map of the model space onto <lam, point>: the RREF basis of the
    model hyperplane goes to the RREF basis of ``lam``, and the unit vector
    at the non-pivot column goes to ``point``.  The restriction to the
    hyperplane does not depend on ``point``."""
    F = lam.field
    d = model_hplane.n
    if model_hplane.k != d - 1 or lam.k != d - 1:
        raise GeometryError("flag dimensions do not match the model")
    point = np.asarray(point, dtype=np.int64).reshape(-1)
    if lam.contains_vector(point):
        raise GeometryError("the extra point lies in Lambda")
    free = next(c for c in range(d) if c not in model_hplane.pivots)
    c = np.zeros(d, dtype=np.int64)
    c[free] = 1
    B = np.vstack([c[None], model_hplane.array()])
    Y = np.vstack([point[None], lam.array()])
    from .projgeom import mat_inverse

    return F.matmul(mat_inverse(F, B), Y)


def embed_design(model: Design, model_hplane: Subspace, lam: Subspace, point) -> Design:
    E = embedding_matrix(model_hplane, lam, point)
    gens = map_blocks(model.field, model.gens, E)
    return Design(model.field, lam.n, model.k, model.r, gens, model.family, dict(model.meta))


def _gamma(F: FieldSpec, n: int) -> Subspace:
    """The hyperplane X1 = 0."""
    return unit_span(F, n, range(2, n + 1))


# -- C_q(8,4,2) -------------------------------------------------------------


def build_842(
    F: FieldSpec,
    spread_pair: tuple[LineSpread, LineSpread] | None = None,
    mu: Sequence[int] | None = None,
) -> tuple[Design, RecursionTrace]:
    """Lifted (4x4,3) code plus, for each line l'_i of the Sigma' spread,
    the q(q+1)^2 solids of <Sigma, l'_i> meeting Sigma in a plane through
    mu(l'_i)."""
    q = F.q
    base_s, base_t = spread_pair or (regular_spread(F), regular_spread(F))
    for s in (base_s, base_t):
        if s.field != F or not verify_spread(s):
            raise GeometryError("invalid line-spread")
    S_prime = base_s.sorted().embed(8, [1, 2, 3, 4]).lines
    S = base_t.sorted().embed(8, [5, 6, 7, 8]).lines
    mu = list(range(len(S))) if mu is None else list(mu)
    if sorted(mu) != list(range(len(S))):
        raise GeometryError("mu must be a bijection between spread indices")
    sig = unit_span(F, 8, [5, 6, 7, 8])
    X = lifted_blocks(F, 4, 4, 3)
    Y = []
    for i, lp in enumerate(S_prime):
        ell = S[mu[i]]
        for gamma in sig.subspaces(3):
            if not gamma.contains(ell):
                continue
            free = next(c for c in range(4, 8) if c not in gamma.pivots)
            t = np.zeros(8, dtype=np.int64)
            t[free] = 1
            for P in lp.points():
                for c in range(q):
                    v = F.vadd(np.array(P, dtype=np.int64), F.vmul(np.full(8, c), t))
                    Y.append(np.vstack([gamma.array(), v[None]]))
    Y = rref_batch(F, np.array(Y, dtype=np.int64))[0]
    if Y.shape[0] != q * (q + 1) ** 2 * (q * q + 1):
        raise ConstructionError(f"Y has {Y.shape[0]} solids")
    d = assemble(F, 8, 4, 2, [X, Y], "842", {"parts": {"X": X.shape[0], "Y": Y.shape[0]}, "mu": mu})
    d.meta["spreads"] = {"sigma_prime": [l.key for l in S_prime], "sigma": [l.key for l in S]}
    gamma = _gamma(F, 8)
    census = census_842(d)
    trace = RecursionTrace(census, census, gamma, d.size, gamma, {"outside": d.size - census, "inside": census})
    return d, trace


def census_842(design: Design) -> int:
    """Blocks inside X1 = 0, a hyperplane through Sigma.

    Checked part by part: none of the lifted solids, q(q+1)^2 from the
    spread line whose star lies in the hyperplane, q(q+1) from each other.
    """
    F, q = design.field, design.q
    mask = contained_mask(F, design.gens, _gamma(F, 8))
    sl = part_slices(design)
    if mask[sl["X"]].any():
        raise ConstructionError("a lifted solid lies in the census hyperplane")
    per_line = mask[sl["Y"]].reshape(q * q + 1, -1).sum(axis=1)
    want = sorted([q * (q + 1)] * (q * q) + [q * (q + 1) ** 2])
    if sorted(per_line.tolist()) != want:
        raise ConstructionError(f"census breakdown {per_line.tolist()} differs from {want}")
    total = int(mask.sum())
    if total != bounds.census_842(q):
        raise ConstructionError(f"census {total} != {bounds.census_842(q)}")
    return total


# -- C_q(8,4,3) -------------------------------------------------------------


def build_843(
    F: FieldSpec,
    parallelism_pair: tuple[Parallelism, Parallelism] | None = None,
    mu: Sequence[int] | None = None,
) -> tuple[Design, RecursionTrace]:
    """Lifted (4x4,2) code, Sigma, and for every line l' of Sigma' the q^4
    solids <l, u1+s1, u2+s2> for each line l of the spread mu(S'_j) that
    contains l' (u1, u2 span l', s1, s2 run over a complement of l in Sigma)."""
    q = F.q
    if parallelism_pair is None:
        par = find_parallelism(F)
        parallelism_pair = (par, par)
    for p in parallelism_pair:
        if p.field != F or not verify_parallelism(p):
            raise GeometryError("invalid parallelism")
    Pp = parallelism_pair[0].sorted().embed(8, [1, 2, 3, 4])
    P = parallelism_pair[1].sorted().embed(8, [5, 6, 7, 8])
    mu = list(range(len(P))) if mu is None else list(mu)
    if sorted(mu) != list(range(len(P))):
        raise GeometryError("mu must be a bijection between parallelism indices")
    sig = unit_span(F, 8, [5, 6, 7, 8])
    X = lifted_blocks(F, 4, 4, 2)
    coeffs = _digits_table(q, 4)  # (q^4, 4): s1, s2 coordinates in the complement
    Z = []
    for j, spread_p in enumerate(Pp.spreads):
        for lp in spread_p.lines:
            u = lp.array()
            for ell in P.spreads[mu[j]].lines:
                comp = [c for c in range(4, 8) if c not in ell.pivots]
                s = np.zeros((q**4, 2, 8), dtype=np.int64)
                s[:, 0, comp] = coeffs[:, :2]
                s[:, 1, comp] = coeffs[:, 2:]
                top = F.vadd(np.broadcast_to(u, s.shape), s)
                block = np.concatenate([np.broadcast_to(ell.array(), (q**4, 2, 8)), top], axis=1)
                Z.append(block)
    Z = rref_batch(F, np.concatenate(Z))[0]
    d = assemble(
        F, 8, 4, 3, [X, Z, sig.array()[None]], "843", {"parts": {"X": X.shape[0], "Z": Z.shape[0], "Sigma": 1}, "mu": mu}
    )
    alpha, beta = census_843(d)
    lam = unit_span(F, 8, range(3, 9))
    trace = RecursionTrace(alpha, beta, lam, d.size, None, {"alpha": alpha, "beta": beta})
    return d, trace


def lambda_2n43(F: FieldSpec, n: int) -> Subspace:
    """Distinguished codimension-2 space <U3..U2n> of the (2n,4,3) designs."""
    return unit_span(F, 2 * n, range(3, 2 * n + 1))


def hyperplanes_through(lam: Subspace) -> list[Subspace]:
    """Hyperplanes <lam, P> for the points P of the coordinate line U1U2."""
    F, n = lam.field, lam.n
    out = []
    for p in points_array(F, 2):
        v = np.zeros(n, dtype=np.int64)
        v[:2] = p
        out.append(lam.join(Subspace(F, n, [v])))
    return out


def measure_alpha_beta(design: Design, lam: Subspace) -> tuple[int, list[int]]:
    F = design.field
    alpha = int(contained_mask(F, design.gens, lam).sum())
    betas = [int(contained_mask(F, design.gens, h).sum()) for h in hyperplanes_through(lam)]
    return alpha, betas


def census_843(design: Design) -> tuple[int, int]:
    q = design.q
    alpha, betas = measure_alpha_beta(design, lambda_2n43(design.field, 4))
    want = bounds.census_843(q)
    if len(set(betas)) != 1 or (alpha, betas[0]) != want:
        raise ConstructionError(f"census alpha={alpha}, betas={betas}, expected {want}")
    return alpha, betas[0]


# -- recursions -------------------------------------------------------------


def _shift_images(F: FieldSpec, d_model: int, n: int, point, shift: int) -> np.ndarray:
    """Model e1 -> point, model e_j -> big e_{j+shift} for j >= 2."""
    E = np.zeros((d_model, n), dtype=np.int64)
    E[0] = point
    for j in range(1, d_model):
        E[j, j + shift] = 1
    return E


def _copies_over_points(model: Design, n: int, apex_dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Blocks of the model outside X1 = 0 copied over every point of
    <U1..U_apex_dim>; plus the shared blocks inside X1 = 0."""
    F = model.field
    inside = ~model.gens[:, :, 0].any(axis=1)
    outside_gens = model.gens[~inside]
    shift = apex_dim - 1
    V = []
    for p in points_array(F, apex_dim):
        pt = np.zeros(n, dtype=np.int64)
        pt[:apex_dim] = p
        V.append(map_blocks(F, outside_gens, _shift_images(F, model.n, n, pt, shift)))
    W = map_blocks(F, model.gens[inside], _shift_images(F, model.n, n, np.eye(n, dtype=np.int64)[0], shift))
    return np.concatenate(V), W


def _hyperplane_trace(d: Design) -> RecursionTrace:
    gamma = _gamma(d.field, d.n)
    inside = d.census(gamma)
    return RecursionTrace(inside, inside, gamma, d.size, gamma, {"outside": d.size - inside, "inside": inside})


def build_2n32(n: int, F: FieldSpec, cap: int | None = DEFAULT_BLOCK_CAP, xset: np.ndarray | None = None) -> tuple[Design, RecursionTrace]:
    """C_q(2n,3,2) for n >= 3; the base is the Klein-quadric design."""
    from .quadrics import build_design_632

    if n < 3:
        raise GeometryError("n >= 3 required")
    q = F.q
    _guard(bounds.size_2n32(n, q), cap)
    d = build_design_632(F, X=xset).design()
    d.family = "2n32"
    d.meta["n"] = 3
    trace = _hyperplane_trace(d)
    _check_split(trace, bounds.split_2n32(3, q))
    for m in range(4, n + 1):
        N = 2 * m
        U = lifted_blocks(F, 3, N - 3, 2)
        V, W = _copies_over_points(d, N, 3)
        d = assemble(F, N, 3, 2, [U, V, W], "2n32", {"n": m, "parts": {"U": U.shape[0], "V": V.shape[0], "W": W.shape[0]}})
        trace = _hyperplane_trace(d)
        _check_split(trace, bounds.split_2n32(m, q))
    return d, trace


def build_3n8_42(
    n: int, F: FieldSpec, cap: int | None = DEFAULT_BLOCK_CAP, spread_pair=None, mu=None
) -> tuple[Design, RecursionTrace]:
    """C_q(3n+8,4,2) for n >= 0; the base is the (8,4,2) design."""
    if n < 0:
        raise GeometryError("n >= 0 required")
    q = F.q
    _guard(bounds.size_3n8_42(n, q), cap)
    d, trace = build_842(F, spread_pair, mu)
    d.family = "3n8_42"
    d.meta["n"] = 0
    _check_split(trace, bounds.split_3n8_42(0, q))
    for m in range(1, n + 1):
        N = 3 * m + 8
        U = lifted_blocks(F, 4, N - 4, 3)
        V, W = _copies_over_points(d, N, 4)
        d = assemble(F, N, 4, 2, [U, V, W], "3n8_42", {"n": m, "parts": {"U": U.shape[0], "V": V.shape[0], "W": W.shape[0]}})
        trace = _hyperplane_trace(d)
        _check_split(trace, bounds.split_3n8_42(m, q))
    return d, trace


def _check_split(trace: RecursionTrace, want: tuple[int, int]) -> None:
    got = (trace.parts["outside"], trace.parts["inside"])
    if got != want:
        raise ConstructionError(f"hyperplane split {got} differs from the closed form {want}")


def step_2n43(model: Design, alpha: int, beta: int) -> tuple[Design, RecursionTrace]:
    """One level of the (2n,4,3) recursion.

    Copies of the model are placed in <Lambda, l> for every line l of the
    solid <U1..U4>: blocks projecting onto the model's U1U2 with rank 2
    go in for every line, rank-1 blocks only for lines of the regular
    spread of the solid, rank-0 blocks once.
    """
    F, q = model.field, model.q
    n_model = model.n // 2
    N = model.n + 2
    U = lifted_blocks(F, 4, N - 4, 2)
    prank = projection_ranks(F, model.gens, [0, 1])
    solid = unit_span(F, N, [1, 2, 3, 4])
    spread = {l.key for l in regular_spread(F).embed(N, [1, 2, 3, 4]).lines}
    E = np.zeros((model.n, N), dtype=np.int64)
    for j in range(2, model.n):
        E[j, j + 2] = 1
    V, Wp = [], []
    for line in solid.subspaces(2):
        E[:2] = line.array()
        V.append(map_blocks(F, model.gens[prank == 2], E))
        if line.key in spread:
            Wp.append(map_blocks(F, model.gens[prank == 1], E))
    # rank-0 blocks never touch the first two model coordinates
    Wbar = map_blocks(F, model.gens[prank == 0], E)
    V, Wp = np.concatenate(V), np.concatenate(Wp)
    d = assemble(
        F,
        N,
        4,
        3,
        [U, V, Wp, Wbar],
        "2n43",
        {"n": n_model + 1, "parts": {"U": U.shape[0], "V": V.shape[0], "W": Wp.shape[0], "Wbar": Wbar.shape[0]}},
    )
    lam = lambda_2n43(F, n_model + 1)
    a, betas = measure_alpha_beta(d, lam)
    if len(set(betas)) != 1:
        raise ConstructionError(f"hyperplanes through Lambda hold different counts {betas}")
    want = bounds.step_2n43(n_model, q, model.size, alpha, beta)
    got = (d.size, a, betas[0])
    if got != want:
        raise ConstructionError(f"(size, alpha, beta) = {got}, recurrence gives {want}")
    return d, RecursionTrace(a, betas[0], lam, d.size, None, {"alpha": a, "beta": betas[0], "betas": betas})


def build_2n43(n: int, F: FieldSpec, cap: int | None = DEFAULT_BLOCK_CAP, parallelism_pair=None, mu=None) -> tuple[Design, RecursionTrace]:
    """C_q(2n,4,3) for n >= 4; the base is the (8,4,3) design."""
    if n < 4:
        raise GeometryError("n >= 4 required")
    _guard(bounds.size_2n43(n, F.q), cap)
    d, trace = build_843(F, parallelism_pair, mu)
    d.family = "2n43"
    d.meta["n"] = 4
    for _ in range(4, n):
        d, trace = step_2n43(d, trace.alpha, trace.beta)
    return d, trace
