"""Graded free modules with labeled generators and complexes of polynomial
matrices: symbolic composition checks, degree slicing, dualization, and
Euler-characteristic Hilbert functions.

Twists are stored as written in the usual shift notation: a generator of
A(-3) carries twist (-3,) and sits in internal degree 3.  Every entry of a
differential must be homogeneous of degree twist(row) - twist(col); this is
validated at construction time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from pfk.exterior import IndexSet, subsets_lex
from pfk.poly import (
    Multidegree,
    PolyRing,
    Polynomial,
    mdeg_neg,
    mdeg_sub,
)
from pfk.rings import CoeffDomain, ZZ
from pfk.sparsemat import SparseMatrix


@dataclass(frozen=True)
class GeneratorLabel:
    """Equivariant bookkeeping: functor piece, det-power, and degree twist.

    functor is ("ext", k, N) for the k-th exterior power of a rank-N free
    module with subset-indexed basis, or ("scalar",) for a rank-1 piece.
    """

    functor: tuple
    det_power: int
    twist: Multidegree

    def __post_init__(self):
        if self.functor[0] not in ("ext", "scalar"):
            raise ValueError(f"unknown functor {self.functor!r}")


@dataclass(frozen=True)
class Generator:
    label: GeneratorLabel
    subset: IndexSet | None

    @property
    def degree(self) -> Multidegree:
        return mdeg_neg(self.label.twist)


class GradedFreeModule:
    """Finite free module with an ordered list of labeled generators."""

    def __init__(self, ring: PolyRing, generators: list[Generator]):
        self.ring = ring
        self.generators = tuple(generators)
        for g in self.generators:
            if len(g.label.twist) != ring.arity:
                raise ValueError("twist arity does not match the ring grading")
            if g.label.functor[0] == "ext":
                if g.subset is None or len(g.subset) != g.label.functor[1]:
                    raise ValueError("exterior generator needs a subset of size k")
            elif g.subset is not None:
                raise ValueError("scalar generator carries no subset")
        self._offsets_cache: dict[Multidegree, tuple[list[int], int]] = {}

    @classmethod
    def from_block(
        cls, ring: PolyRing, label: GeneratorLabel
    ) -> "GradedFreeModule":
        """Expand one label over its full lex-ordered subset basis."""
        if label.functor[0] == "scalar":
            return cls(ring, [Generator(label, None)])
        _, k, ground = label.functor
        return cls(ring, [Generator(label, s) for s in subsets_lex(k, ground)])

    @property
    def rank(self) -> int:
        return len(self.generators)

    def slice_offsets(self, d: Multidegree) -> tuple[list[int], int]:
        """Per-generator starting offsets of the degree-d slice basis, and
        its total dimension."""
        hit = self._offsets_cache.get(d)
        if hit is not None:
            return hit
        offsets = []
        total = 0
        for g in self.generators:
            offsets.append(total)
            total += self.ring.monomial_count(mdeg_sub(d, g.degree))
        result = (offsets, total)
        self._offsets_cache[d] = result
        return result

    def slice_dim(self, d: Multidegree) -> int:
        return self.slice_offsets(d)[1]

    def __eq__(self, other):
        return (
            isinstance(other, GradedFreeModule)
            and self.ring == other.ring
            and self.generators == other.generators
        )

    def __repr__(self):
        return f"GradedFreeModule(rank {self.rank})"


Differential = dict[tuple[int, int], Polynomial]


class FreeComplex:
    """Chain complex of graded free modules over one ring.

    modules[t] sits in homological degree lo + t; diffs[t] maps
    modules[t+1] -> modules[t].  Entry homogeneity is enforced here; the
    composition condition d*d = 0 is established by verify_complex and the
    outcome cached.
    """

    def __init__(
        self,
        ring: PolyRing,
        lo: int,
        modules: list[GradedFreeModule],
        diffs: list[Differential],
    ):
        if len(diffs) != max(len(modules) - 1, 0):
            raise ValueError("need exactly one differential between consecutive modules")
        self.ring = ring
        self.lo = lo
        self.modules = list(modules)
        self.diffs = [dict(d) for d in diffs]
        self._verified: bool | None = None
        for t, diff in enumerate(self.diffs):
            tgt, src = self.modules[t], self.modules[t + 1]
            for (r, c), poly in diff.items():
                if not (0 <= r < tgt.rank and 0 <= c < src.rank):
                    raise ValueError(f"entry ({r}, {c}) outside differential {t}")
                if poly.is_zero():
                    raise ValueError("stored differential entries must be nonzero")
                if not poly.is_homogeneous():
                    raise ValueError(
                        f"inhomogeneous entry in d_{lo + t + 1} at ({r}, {c})"
                    )
                want = mdeg_sub(
                    tgt.generators[r].label.twist, src.generators[c].label.twist
                )
                if poly.degree() != want:
                    raise ValueError(
                        f"entry degree {poly.degree()} != {want} in d_{lo + t + 1}"
                        f" at ({r}, {c})"
                    )

    @property
    def hi(self) -> int:
        return self.lo + len(self.modules) - 1

    def module(self, j: int) -> GradedFreeModule | None:
        if self.lo <= j <= self.hi:
            return self.modules[j - self.lo]
        return None

    def diff(self, j: int) -> Differential | None:
        """The differential leaving homological degree j (into j-1)."""
        if self.lo + 1 <= j <= self.hi:
            return self.diffs[j - self.lo - 1]
        return None

    def module_dim(self, j: int, d: Multidegree) -> int:
        mod = self.module(j)
        return mod.slice_dim(d) if mod is not None else 0

    # -- symbolic verification -------------------------------------------

    def compose(self, j: int) -> Differential:
        """Symbolic product d_j * d_(j+1); empty dict means zero.

        Exponent vectors are packed into single integers (7 bits per
        variable) so monomial multiplication is integer addition; total
        degrees here stay far below the 128-per-variable packing bound.
        """
        dj, djj = self.diff(j), self.diff(j + 1)
        if dj is None or djj is None:
            return {}
        nv = self.ring.nvars

        def pack(poly: Polynomial) -> dict[int, int]:
            out = {}
            for e, c in poly.terms.items():
                code = 0
                for k in range(nv - 1, -1, -1):
                    code = (code << 7) | e[k]
                out[code] = c
            return out

        def unpack(code: int) -> tuple[int, ...]:
            return tuple((code >> (7 * k)) & 127 for k in range(nv))

        packed1: dict[tuple[int, int], dict[int, int]] = {
            k: pack(p) for k, p in dj.items()
        }
        packed2: dict[tuple[int, int], dict[int, int]] = {
            k: pack(p) for k, p in djj.items()
        }
        by_mid: dict[int, list[tuple[int, dict[int, int]]]] = {}
        for (r, mid), terms in packed1.items():
            by_mid.setdefault(mid, []).append((r, terms))
        acc: dict[tuple[int, int], dict[int, int]] = {}
        for (mid, c), terms2 in packed2.items():
            for r, terms1 in by_mid.get(mid, ()):
                bucket = acc.setdefault((r, c), {})
                small, big = terms1, terms2
                if len(small) > len(big):
                    small, big = big, small
                for e1, c1 in small.items():
                    for e2, c2 in big.items():
                        e = e1 + e2
                        s = bucket.get(e, 0) + c1 * c2
                        if s:
                            bucket[e] = s
                        else:
                            del bucket[e]
        out: Differential = {}
        for key, bucket in acc.items():
            if bucket:
                out[key] = Polynomial(
                    self.ring, {unpack(e): c for e, c in bucket.items()}
                )
        return out

    # -- slicing -----------------------------------------------------------

    def slice(
        self, j: int, d: Multidegree, domain: CoeffDomain = ZZ
    ) -> SparseMatrix:
        """Degree-d matrix of d_j in the monomial-by-generator bases.

        Rows are indexed by (generator of module j-1, monomial of degree
        d - generator degree), columns likewise for module j, both in the
        fixed global order.  An empty slice (either side out of range or
        dimension zero) is a matrix with zero rows or columns.
        """
        ring = self.ring
        tgt, src = self.module(j - 1), self.module(j)
        nrows = tgt.slice_dim(d) if tgt is not None else 0
        ncols = src.slice_dim(d) if src is not None else 0
        diff = self.diff(j)
        if diff is None or nrows == 0 or ncols == 0:
            return SparseMatrix(nrows, ncols, ())
        p = domain.p if domain.kind == "prime_field" else None
        row_offsets, _ = tgt.slice_offsets(d)
        col_offsets, _ = src.slice_offsets(d)
        by_col: dict[int, list] = {}
        for (r, c), poly in diff.items():
            by_col.setdefault(c, []).append((r, poly))
        entries: dict[tuple[int, int], int] = {}
        for c, items in by_col.items():
            cdeg = mdeg_sub(d, src.generators[c].degree)
            basis = ring.monomial_basis(cdeg)
            if not basis:
                continue
            cbase = col_offsets[c]
            for r, poly in items:
                rdeg = mdeg_sub(d, tgt.generators[r].degree)
                rbase = row_offsets[r]
                terms = list(poly.terms.items())
                for mi, mono in enumerate(basis):
                    col = cbase + mi
                    for e, coef in terms:
                        tgt_exp = tuple(a + b for a, b in zip(e, mono))
                        row = rbase + ring.monomial_rank(rdeg, tgt_exp)
                        key = (row, col)
                        s = entries.get(key, 0) + coef
                        if s:
                            entries[key] = s
                        else:
                            del entries[key]
        if p is not None:
            out = []
            for (r, c), v in entries.items():
                v %= p
                if v:
                    out.append((r, c, v))
        else:
            out = [(r, c, v) for (r, c), v in entries.items()]
        return SparseMatrix(nrows, ncols, out)

    # -- dualization ---------------------------------------------------------

    def dualize(self, twist: Multidegree) -> "FreeComplex":
        """Transpose all differentials, reverse the indexing, and send each
        generator twist t to (given twist) - t."""
        twist = tuple(twist)
        new_modules = []
        for mod in reversed(self.modules):
            gens = [
                Generator(
                    GeneratorLabel(
                        g.label.functor,
                        -g.label.det_power,
                        mdeg_sub(twist, g.label.twist),
                    ),
                    g.subset,
                )
                for g in mod.generators
            ]
            new_modules.append(GradedFreeModule(self.ring, gens))
        new_diffs = []
        for t in range(len(self.modules) - 1):
            old = self.diffs[len(self.diffs) - 1 - t]
            new_diffs.append({(c, r): poly for (r, c), poly in old.items()})
        return FreeComplex(self.ring, self.lo, new_modules, new_diffs)

    # -- Euler characteristic ------------------------------------------------

    def euler_hf(self, d: Multidegree) -> int:
        """Alternating sum of slice dimensions at degree d."""
        total = 0
        for t, mod in enumerate(self.modules):
            j = self.lo + t
            dim = mod.slice_dim(d)
            total += dim if j % 2 == 0 else -dim
        return total

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        mods = []
        for mod in self.modules:
            out = []
            for g in mod.generators:
                if g.label.functor[0] == "ext":
                    functor = {
                        "k": g.label.functor[1],
                        "N": g.label.functor[2],
                        "subset": list(g.subset),
                    }
                else:
                    functor = "scalar"
                out.append(
                    {
                        "functor": functor,
                        "det_power": g.label.det_power,
                        "twist": list(g.label.twist),
                    }
                )
            mods.append(out)
        diffs = []
        for t, diff in enumerate(self.diffs):
            diffs.append(
                {
                    "rows": self.modules[t].rank,
                    "cols": self.modules[t + 1].rank,
                    "entries": [
                        {"r": r, "c": c, "poly": poly.to_json()}
                        for (r, c), poly in sorted(diff.items())
                    ],
                }
            )
        return {
            "ring": {
                "vars": list(self.ring.names),
                "degrees": [list(d) for d in self.ring.degrees],
            },
            "lo": self.lo,
            "modules": mods,
            "differentials": diffs,
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, data: dict) -> "FreeComplex":
        ring = PolyRing(
            data["ring"]["vars"], [tuple(d) for d in data["ring"]["degrees"]]
        )
        modules = []
        for mod in data["modules"]:
            gens = []
            for item in mod:
                f = item["functor"]
                if f == "scalar":
                    functor, subset = ("scalar",), None
                else:
                    functor, subset = ("ext", f["k"], f["N"]), tuple(f["subset"])
                gens.append(
                    Generator(
                        GeneratorLabel(functor, item["det_power"], tuple(item["twist"])),
                        subset,
                    )
                )
            modules.append(GradedFreeModule(ring, gens))
        diffs = []
        for dd in data["differentials"]:
            diff = {}
            for e in dd["entries"]:
                diff[(e["r"], e["c"])] = Polynomial.from_json(ring, e["poly"])
            diffs.append(diff)
        return cls(ring, data.get("lo", 0), modules, diffs)

    @classmethod
    def from_json_text(cls, text: str) -> "FreeComplex":
        return cls.from_json(json.loads(text))

    def __eq__(self, other):
        return (
            isinstance(other, FreeComplex)
            and self.ring == other.ring
            and self.lo == other.lo
            and self.modules == other.modules
            and all(
                set(a) == set(b) and all(a[k] == b[k] for k in a)
                for a, b in zip(self.diffs, other.diffs)
            )
        )


@dataclass
class ComplexCheck:
    """Outcome of a symbolic d*d = 0 verification."""

    status: str  # "pass" | "fail"
    failures: list[tuple[int, int, int]]  # (j, row, col) of nonzero composites
    degrees_checked: list[int]

    @property
    def ok(self) -> bool:
        return self.status == "pass"


def verify_complex(c: FreeComplex) -> ComplexCheck:
    """Check symbolically that every consecutive composition vanishes.

    Entry homogeneity is already enforced by the FreeComplex constructor;
    this walks every pair (d_j, d_{j+1}) and records any nonzero entry of
    the product with its position.
    """
    failures = []
    degrees = []
    for j in range(c.lo + 1, c.hi):
        degrees.append(j)
        bad = c.compose(j)
        for (r, col), poly in sorted(bad.items()):
            if not poly.is_zero():
                failures.append((j, r, col))
    c._verified = not failures
    return ComplexCheck("pass" if not failures else "fail", failures, degrees)


def subset_position(module: GradedFreeModule, subset: IndexSet) -> int:
    """Index of the generator with the given subset (single-block modules)."""
    for i, g in enumerate(module.generators):
        if g.subset == subset:
            return i
    raise KeyError(f"no generator with subset {subset}")
