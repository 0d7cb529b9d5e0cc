"""Exact cover by Knuth's Algorithm X on dict-of-sets links.

Column choice is deterministic: fewest remaining rows, ties broken by the
smallest column label.  Rows are tried in sorted order.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Iterator, Mapping

from .errors import SearchBudgetExceeded


class ExactCover:
    def __init__(self, rows: Mapping[Hashable, Iterable[Hashable]], columns: Iterable[Hashable] | None = None):
        self.rows = {r: tuple(sorted(set(cols))) for r, cols in rows.items()}
        cols = set(columns) if columns is not None else {c for cs in self.rows.values() for c in cs}
        self.cols: dict[Hashable, set] = {c: set() for c in cols}
        for r, cs in self.rows.items():
            for c in cs:
                if c not in self.cols:
                    # row touches a column outside the universe: never usable
                    break
            else:
                for c in cs:
                    self.cols[c].add(r)
        self.nodes = 0

    def _select(self, r):
        removed = []
        for j in self.rows[r]:
            for i in self.cols[j]:
                for k in self.rows[i]:
                    if k != j:
                        self.cols[k].discard(i)
            removed.append(self.cols.pop(j))
        return removed

    def _deselect(self, r, removed):
        for j in reversed(self.rows[r]):
            self.cols[j] = removed.pop()
            for i in self.cols[j]:
                for k in self.rows[i]:
                    if k != j:
                        self.cols[k].add(i)

    def solve(self, budget: int | None = None) -> Iterator[list]:
        """Yield solutions (lists of row labels); ``budget`` caps search nodes."""
        partial: list = []

        def search():
            if not self.cols:
                yield list(partial)
                return
            c = min(self.cols, key=lambda col: (len(self.cols[col]), col))
            for r in sorted(self.cols[c]):
                self.nodes += 1
                if budget is not None and self.nodes > budget:
                    raise SearchBudgetExceeded(
                        "exact-cover node budget exhausted",
                        {"nodes": self.nodes, "depth": len(partial), "open_columns": len(self.cols)},
                    )
                partial.append(r)
                removed = self._select(r)
                yield from search()
                self._deselect(r, removed)
                partial.pop()

        yield from search()

    def first(self, budget: int | None = None) -> list | None:
        for sol in self.solve(budget):
            return sol
        return None
