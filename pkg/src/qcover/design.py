"""Design container shared by the builders, the verifier and the file layer."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import ConstructionError, GeometryError
from .gfq import FieldSpec
from .projgeom import Subspace, contained_mask, pack_keys, ranks


@dataclass
class Design:
    """A set of k-dimensional blocks of GF(q)^n meant to cover all r-spaces.

    ``gens`` holds the canonical RREF generator matrices, shape (N, k, n).
    """

    field: FieldSpec
    n: int
    k: int
    r: int
    gens: np.ndarray
    family: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.gens = np.asarray(self.gens, dtype=np.int64).reshape(-1, self.k, self.n)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def size(self) -> int:
        return int(self.gens.shape[0])

    def __len__(self) -> int:
        return self.size

    @property
    def blocks(self) -> Iterator[Subspace]:
        for g in self.gens:
            yield Subspace.from_array(self.field, g)

    def keys(self) -> np.ndarray:
        return pack_keys(self.field, self.gens)

    def duplicate_count(self) -> int:
        keys = self.keys()
        return int(keys.size - np.unique(keys).size)

    def check(self) -> None:
        """Raise if a block is not of rank k or keys repeat."""
        rk = ranks(self.field, self.gens) if self.size else np.zeros(0)
        if (rk != self.k).any():
            raise GeometryError("design has blocks of the wrong rank")
        dup = self.duplicate_count()
        if dup:
            raise ConstructionError(f"design assembly produced {dup} duplicate blocks")

    def census(self, container: Subspace) -> int:
        return int(contained_mask(self.field, self.gens, container).sum())


def assemble(field: FieldSpec, n: int, k: int, r: int, parts, family: str, meta: dict | None = None) -> Design:
    """Concatenate block arrays; duplicates are a construction bug, not merged."""
    arrays = [np.asarray(p, dtype=np.int64).reshape(-1, k, n) for p in parts]
    d = Design(field, n, k, r, np.concatenate(arrays) if arrays else np.zeros((0, k, n)), family, dict(meta or {}))
    dup = d.duplicate_count()
    if dup:
        raise ConstructionError(f"{family}: {dup} duplicate blocks on assembly")
    return d


@dataclass
class RecursionTrace:
    """Census data the recursive constructions feed on.

    ``alpha`` blocks lie inside ``lam``; ``beta`` blocks lie inside each
    hyperplane through ``lam`` (when ``lam`` is itself a hyperplane the
    two coincide).
    """

    alpha: int
    beta: int
    lam: Subspace
    size: int
    model_hyperplane: Subspace | None = None
    parts: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "size": self.size,
            "lambda": [list(r) for r in self.lam.rows],
            "parts": dict(self.parts),
        }
