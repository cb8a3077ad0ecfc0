"""Exact sparse matrices: a plain coordinate-format container.

A SparseMatrix stores only nonzero entries, with no duplicate positions.
It is the carrier for degree slices of differentials; all elimination
lives in pfk.linalg.  Instances are immutable by convention: nothing in
the package mutates one after construction.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable


class SparseMatrix:
    __slots__ = ("rows", "cols", "_d")

    def __init__(self, rows: int, cols: int, entries: Iterable = ()):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        self.rows = rows
        self.cols = cols
        d = {}
        for r, c, v in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ValueError(f"entry position ({r}, {c}) out of range")
            if (r, c) in d:
                raise ValueError(f"duplicate entry at ({r}, {c})")
            if v:
                d[(r, c)] = v
        self._d = d

    @property
    def entries(self) -> list[tuple[int, int, object]]:
        """Sorted (row, col, value) triples."""
        return [(r, c, self._d[(r, c)]) for r, c in sorted(self._d)]

    @property
    def nnz(self) -> int:
        return len(self._d)

    def get(self, r: int, c: int, default=0):
        return self._d.get((r, c), default)

    def row_dicts(self) -> dict[int, dict[int, object]]:
        """{row: {col: value}} view; safe to mutate (a fresh copy)."""
        out: dict[int, dict[int, object]] = {}
        for (r, c), v in self._d.items():
            out.setdefault(r, {})[c] = v
        return out

    def col_dicts(self) -> dict[int, dict[int, object]]:
        out: dict[int, dict[int, object]] = {}
        for (r, c), v in self._d.items():
            out.setdefault(c, {})[r] = v
        return out

    def column(self, c: int) -> dict[int, object]:
        return {r: v for (r, cc), v in self._d.items() if cc == c}

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(
            self.cols, self.rows, ((c, r, v) for (r, c), v in self._d.items())
        )

    def to_dense(self) -> list[list[object]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self._d.items():
            out[r][c] = v
        return out

    @classmethod
    def from_dense(cls, rows: list[list]) -> "SparseMatrix":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        ent = [
            (r, c, v) for r, row in enumerate(rows) for c, v in enumerate(row) if v
        ]
        return cls(nr, nc, ent)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, ((i, i, 1) for i in range(n)))

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        """Exact product; intended for small matrices in tests and checks."""
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in matrix product")
        by_row: dict[int, dict[int, object]] = {}
        for (r, k), v in self._d.items():
            by_row.setdefault(r, {})[k] = v
        by_k: dict[int, list[tuple[int, object]]] = {}
        for (k, c), w in other._d.items():
            by_k.setdefault(k, []).append((c, w))
        acc: dict[tuple[int, int], object] = {}
        for r, rowd in by_row.items():
            for k, v in rowd.items():
                for c, w in by_k.get(k, ()):
                    key = (r, c)
                    acc[key] = acc.get(key, 0) + v * w
        return SparseMatrix(
            self.rows, other.cols, ((r, c, v) for (r, c), v in acc.items() if v)
        )

    def hstack(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch in hstack")
        ent = list(self._d.items()) + [
            ((r, c + self.cols), v) for (r, c), v in other._d.items()
        ]
        return SparseMatrix(
            self.rows, self.cols + other.cols, ((r, c, v) for (r, c), v in ent)
        )

    def is_zero(self) -> bool:
        return not self._d

    def __eq__(self, other):
        return (
            isinstance(other, SparseMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._d == other._d
        )

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self._d.items())))

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

    # Text exchange format: first line "rows cols nnz", then one 1-indexed
    # "row col value" triple per line, all decimal integers.
    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols} {self.nnz}"]
        for r, c, v in self.entries:
            if isinstance(v, Fraction):
                if v.denominator != 1:
                    raise ValueError("text export requires integer entries")
                v = v.numerator
            lines.append(f"{r + 1} {c + 1} {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SparseMatrix":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        rows, cols, nnz = map(int, lines[0].split())
        if len(lines) - 1 != nnz:
            raise ValueError(f"expected {nnz} entries, found {len(lines) - 1}")
        ent = []
        for ln in lines[1:]:
            r, c, v = ln.split()
            ent.append((int(r) - 1, int(c) - 1, int(v)))
        return cls(rows, cols, ent)
