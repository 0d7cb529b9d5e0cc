"""Exhaustive covering verification.

Every block contributes the packed keys of its internal r-spaces; these
are sorted once into runs of (unique key, multiplicity).  The target
stream (all r-spaces, one pivot set at a time) is then looked up in the
runs with ``searchsorted``.  Runs live in memory unless they exceed the
byte budget, in which case they are spilled to sorted ``.npy`` files and
memory-mapped.
"""

from __future__ import annotations

import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .design import Design
from .errors import ResourceLimitError
from .projgeom import (
    DEFAULT_CAP,
    Subspace,
    contained_mask,
    gaussian,
    internal_keys,
    key_weights,
    subspace_blocks,
    subspace_key_blocks,
)

MODES = ("mark", "count")
DEFAULT_MEM_BUDGET = 2 << 30
MEM_ENV = "QCOVER_MEM_BUDGET"
SAMPLE = 10


def mem_budget() -> int:
    raw = os.environ.get(MEM_ENV)
    if not raw:
        return DEFAULT_MEM_BUDGET
    units = {"k": 1 << 10, "m": 1 << 20, "g": 1 << 30}
    raw = raw.strip().lower().rstrip("b")
    mult = units.get(raw[-1:], 1)
    if raw[-1:] in units:
        raw = raw[:-1]
    try:
        return int(float(raw) * mult)
    except ValueError as exc:
        raise ValueError(f"bad {MEM_ENV} value {os.environ[MEM_ENV]!r}") from exc


@dataclass
class CoverageReport:
    total_targets: int
    covered: int
    min_mult: int
    max_mult: int
    histogram: dict[int, int] = field(default_factory=dict)
    uncovered_sample: list[Subspace] = field(default_factory=list)
    wall_time: float = 0.0
    mode: str = "mark"

    @property
    def complete(self) -> bool:
        return self.covered == self.total_targets

    def comparable(self) -> tuple:
        """Everything except the wall time."""
        return (
            self.total_targets,
            self.covered,
            self.min_mult,
            self.max_mult,
            tuple(sorted(self.histogram.items())),
            tuple(s.key for s in self.uncovered_sample),
            self.mode,
        )

    def as_kv(self) -> str:
        lines = [
            f"mode={self.mode}",
            f"total_targets={self.total_targets}",
            f"covered={self.covered}",
            f"uncovered={self.total_targets - self.covered}",
            f"min_mult={self.min_mult}",
            f"max_mult={self.max_mult}",
        ]
        if self.histogram:
            lines.append("histogram=" + ",".join(f"{m}:{c}" for m, c in sorted(self.histogram.items())))
        for s in self.uncovered_sample:
            lines.append("uncovered_key=" + format(s.key, "x"))
        lines.append(f"wall_time={self.wall_time:.3f}")
        return "\n".join(lines)

    def as_table(self) -> str:
        rows = [
            ("targets", self.total_targets),
            ("covered", self.covered),
            ("uncovered", self.total_targets - self.covered),
            ("min multiplicity", self.min_mult),
            ("max multiplicity", self.max_mult),
        ]
        width = max(len(r[0]) for r in rows)
        out = [f"{name:<{width}}  {val}" for name, val in rows]
        if self.histogram:
            out.append("multiplicity histogram:")
            out += [f"  {m:>4}  {c}" for m, c in sorted(self.histogram.items())]
        for s in self.uncovered_sample:
            out.append("uncovered: " + repr(s))
        out.append(f"{'time':<{width}}  {self.wall_time:.2f}s")
        return "\n".join(out)


class KeyRuns:
    """Sorted runs of (key, multiplicity), in memory or spilled to disk."""

    def __init__(self, runs: list[tuple[np.ndarray, np.ndarray]], tmpdir: tempfile.TemporaryDirectory | None = None):
        self.runs = runs
        self._tmpdir = tmpdir

    @property
    def spilled(self) -> bool:
        return self._tmpdir is not None

    def close(self) -> None:
        self.runs = []
        if self._tmpdir is not None:
            self._tmpdir.cleanup()
            self._tmpdir = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def lookup(self, keys: np.ndarray) -> np.ndarray:
        mult = np.zeros(keys.shape, dtype=np.int64)
        for uniq, counts in self.runs:
            if uniq.size == 0:
                continue
            pos = np.searchsorted(uniq, keys)
            pos = np.minimum(pos, uniq.size - 1)
            hit = np.asarray(uniq[pos]) == keys
            mult += np.where(hit, np.asarray(counts[pos]), 0)
        return mult


def build_key_runs(design: Design, budget: int | None = None, chunk_blocks: int = 1 << 16) -> KeyRuns:
    """Internal r-space keys of all blocks, grouped into sorted runs."""
    budget = mem_budget() if budget is None else budget
    F, r = design.field, design.r
    per_block = gaussian(design.k, r, F.q)
    total_bytes = design.size * per_block * 8
    if total_bytes <= budget:
        parts = [internal_keys(F, design.gens[s : s + chunk_blocks], r).ravel() for s in range(0, design.size, chunk_blocks)]
        flat = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
        return KeyRuns([np.unique(flat, return_counts=True)])
    # spill: each run holds at most a quarter of the budget
    tmp = tempfile.TemporaryDirectory(prefix="qcover-runs-")
    run_blocks = max(1, (budget // 4) // (per_block * 8))
    runs = []
    for i, s in enumerate(range(0, design.size, run_blocks)):
        keys = internal_keys(F, design.gens[s : s + run_blocks], r).ravel()
        uniq, counts = np.unique(keys, return_counts=True)
        ku = os.path.join(tmp.name, f"run{i:05d}.keys.npy")
        kc = os.path.join(tmp.name, f"run{i:05d}.mult.npy")
        np.save(ku, uniq)
        np.save(kc, counts)
        del keys, uniq, counts
        runs.append((np.load(ku, mmap_mode="r"), np.load(kc, mmap_mode="r")))
    return KeyRuns(runs, tmp)


def iter_target_multiplicities(
    design: Design, pivot_within: Sequence[int] | None = None, cap: int | None = DEFAULT_CAP, runs: KeyRuns | None = None
) -> Iterator[tuple[tuple[int, ...], np.ndarray, np.ndarray]]:
    """Yield (pivot set, target generators, multiplicities) block by block."""
    own = runs is None
    runs = runs or build_key_runs(design)
    try:
        w = key_weights(design.q, design.r, design.n).reshape(-1)
        for piv, gens in subspace_blocks(design.field, design.n, design.r, pivot_within, cap):
            keys = gens.reshape(gens.shape[0], -1) @ w
            yield piv, gens, runs.lookup(keys)
    finally:
        if own:
            runs.close()


def verify_covering(
    design: Design,
    mode: str = "mark",
    workers: int = 1,
    pivot_within: Sequence[int] | None = None,
    cap: int | None = DEFAULT_CAP,
    mem_budget_bytes: int | None = None,
) -> CoverageReport:
    """Check that every r-space (optionally only those whose pivots lie in
    ``pivot_within``) lies in some block.  Exact and deterministic; the
    report does not depend on ``workers``."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    t0 = time.perf_counter()
    F, n, r = design.field, design.n, design.r
    if pivot_within is None and cap is not None and gaussian(n, r, F.q) > cap:
        raise ResourceLimitError(f"{gaussian(n, r, F.q)} targets exceed cap {cap}")
    with build_key_runs(design, mem_budget_bytes) as runs:

        def scan(item):
            _, keys = item
            mult = runs.lookup(keys)
            miss = keys[np.nonzero(mult == 0)[0][:SAMPLE]]
            hist = np.bincount(mult) if mode == "count" else None
            return keys.size, int((mult > 0).sum()), hist, miss

        blocks = subspace_key_blocks(F, n, r, pivot_within, cap)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(scan, blocks))
        else:
            results = [scan(b) for b in blocks]

    total = sum(r_[0] for r_ in results)
    covered = sum(r_[1] for r_ in results)
    sample: list[Subspace] = []
    for r_ in results:
        for key in r_[3]:
            if len(sample) < SAMPLE:
                sample.append(Subspace.from_key(F, int(key), r, n))
    histogram: dict[int, int] = {}
    if mode == "count":
        acc = np.zeros(1, dtype=np.int64)
        for r_ in results:
            h = r_[2]
            if h.size > acc.size:
                acc = np.pad(acc, (0, h.size - acc.size))
            acc[: h.size] += h
        histogram = {i: int(c) for i, c in enumerate(acc) if c}
        min_mult = min(histogram) if histogram else 0
        max_mult = max(histogram) if histogram else 0
    else:
        # mark mode only knows covered / not covered
        min_mult = 1 if total and covered == total else 0
        max_mult = 1 if covered else 0
    return CoverageReport(total, covered, min_mult, max_mult, histogram, sample, time.perf_counter() - t0, mode)


def census(design: Design, container: Subspace) -> int:
    """Number of blocks contained in ``container``."""
    if container.n != design.n:
        raise ValueError("container lives in a different ambient space")
    return int(contained_mask(design.field, design.gens, container).sum())
