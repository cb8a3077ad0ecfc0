"""Exact sparse linear algebra: rank, kernel bases, Smith normal form.

Two elimination styles are used.  Rank-only computations run a destructive
sparse elimination with min-fill pivoting (and a dense numpy finish once the
live block gets small or dense).  Kernel bases use a fixed left-to-right
pivot order so the output basis is deterministic and stable across runs.

Over the rationals, rows are kept as integer vectors and renormalized by
their content; row scaling never changes rank or kernel.  Over a prime
field all values live in [0, p).  Smith normal form works directly on
integer rows and columns with unit-pivot preference.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd

import numpy as np

from pfk.rings import CoeffDomain, QQ, ZZ
from pfk.sparsemat import SparseMatrix

# Live-block thresholds for switching a sparse elimination to dense numpy.
_DENSE_CELLS = 4_000_000
_DENSE_MIN_DENSITY = 0.04
_DENSE_ALWAYS = 240_000

# Dense Smith normal form is only attempted below this size (rows * cols).
SNF_CELL_LIMIT = 4_200_000


class SNFTooLarge(Exception):
    """Raised when a matrix exceeds the supported Smith normal form size."""


def _require_field(domain: CoeffDomain, what: str) -> None:
    if not domain.is_field:
        raise ValueError(f"{what} requires a field; use SNF")


# ---------------------------------------------------------------------------
# dense finishes
# ---------------------------------------------------------------------------


def _rank_fp_dense(a: np.ndarray, p: int) -> int:
    """In-place row reduction of an int64 array mod p; returns the rank."""
    m, n = a.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i0 = r + int(nz[0])
        if i0 != r:
            a[[r, i0]] = a[[i0, r]]
        inv = pow(int(a[r, c]), -1, p)
        if inv != 1:
            a[r, c:] = a[r, c:] * inv % p
        below = a[r + 1 :, c:]
        if below.size:
            f = below[:, 0]
            hit = np.flatnonzero(f)
            if hit.size:
                below[hit] = (below[hit] - f[hit, None] * a[r, c:]) % p
        r += 1
    return r


def _rank_int_dense(rows: list[dict[int, int]], cols: list[int]) -> int:
    """Fraction-free dense rank of integer rows restricted to given columns.

    Works in int64 with a growth guard; rows are renormalized by their gcd
    after each update.  Falls back to exact Python integers if entries
    outgrow the guard.
    """
    colpos = {c: i for i, c in enumerate(cols)}
    a = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for i, rd in enumerate(rows):
        for c, v in rd.items():
            if abs(v) > 1 << 40:
                return _rank_fraction_dense(rows, cols)
            a[i, colpos[c]] = v
    m, n = a.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        col = a[r:, c]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        sub = np.abs(col[nz])
        i0 = r + int(nz[int(np.argmin(sub))])
        if i0 != r:
            a[[r, i0]] = a[[i0, r]]
        piv = int(a[r, c])
        below = a[r + 1 :, c:]
        if below.size:
            f = below[:, 0]
            hit = np.flatnonzero(f)
            if hit.size:
                blk = below[hit]
                mx = abs(piv) * int(np.abs(blk).max()) + int(
                    np.abs(f[hit]).max()
                ) * int(np.abs(a[r, c:]).max())
                if mx > (1 << 61):
                    live = [
                        {cols[j]: int(a[i, j]) for j in range(c, n) if a[i, j]}
                        for i in range(r, m)
                    ]
                    return r + _rank_fraction_dense(live, cols[c:])
                blk = blk * piv - f[hit, None] * a[r, c:]
                g = np.gcd.reduce(np.abs(blk), axis=1)
                g[g == 0] = 1
                below[hit] = blk // g[:, None]
        r += 1
    return r


def _rank_fraction_dense(rows: list[dict[int, int]], cols: list[int]) -> int:
    """Exact big-integer fallback for pathological growth (rare)."""
    colpos = {c: i for i, c in enumerate(cols)}
    mat = []
    for rd in rows:
        row = [0] * len(cols)
        for c, v in rd.items():
            row[colpos[c]] = v
        mat.append(row)
    m, n = len(mat), len(cols)
    r = 0
    for c in range(n):
        piv_i = None
        best = None
        for i in range(r, m):
            v = mat[i][c]
            if v and (best is None or abs(v) < best):
                best, piv_i = abs(v), i
        if piv_i is None:
            continue
        mat[r], mat[piv_i] = mat[piv_i], mat[r]
        prow = mat[r]
        piv = prow[c]
        for i in range(r + 1, m):
            f = mat[i][c]
            if not f:
                continue
            row = [piv * a - f * b for a, b in zip(mat[i], prow)]
            g = 0
            for x in row:
                g = gcd(g, x)
            if g > 1:
                row = [x // g for x in row]
            mat[i] = row
        r += 1
    return r


# ---------------------------------------------------------------------------
# sparse rank (destructive, pivot order free)
# ---------------------------------------------------------------------------


def _sparse_rank(rows: list[dict[int, int]], ncols: int, p: int | None) -> int:
    """Markowitz-style sparse elimination; p=None means exact over Q.

    Rows are integer dicts (over Q, content-normalized as needed).  Switches
    to a dense numpy finish when the live block is small or has filled in.
    """
    live: dict[int, dict[int, int]] = {}
    colrows: dict[int, set[int]] = {}
    nnz = 0
    for rid, rd in enumerate(rows):
        if rd:
            live[rid] = rd
            for c in rd:
                colrows.setdefault(c, set()).add(rid)
            nnz += len(rd)
    rank = 0
    steps = 0
    while live:
        heap = [(len(s), c) for c, s in colrows.items() if s]
        heapq.heapify(heap)
        progressed = False
        while heap:
            cnt, c = heapq.heappop(heap)
            s = colrows.get(c)
            if not s:
                continue
            if len(s) != cnt:
                heapq.heappush(heap, (len(s), c))
                continue
            progressed = True
            if p is None:
                pr = min(
                    s, key=lambda r: (abs(live[r][c]) != 1, len(live[r]), r)
                )
            else:
                pr = min(s, key=lambda r: (len(live[r]), r))
            prow = live.pop(pr)
            for cc in prow:
                ss = colrows.get(cc)
                if ss is not None:
                    ss.discard(pr)
            nnz -= len(prow)
            targets = colrows.pop(c)
            piv = prow[c]
            if p is not None and piv != 1:
                inv = pow(piv, p - 2, p)
                for cc in prow:
                    prow[cc] = prow[cc] * inv % p
                piv = 1
            pitems = [(cc, w) for cc, w in prow.items() if cc != c]
            for r2 in targets:
                row2 = live[r2]
                f = row2.pop(c)
                nnz -= 1
                if p is not None:
                    fneg = p - f
                    for cc, w in pitems:
                        x = row2.get(cc)
                        if x is None:
                            ss = colrows.setdefault(cc, set())
                            ss.add(r2)
                            row2[cc] = fneg * w % p
                            nnz += 1
                        else:
                            x = (x + fneg * w) % p
                            if x:
                                row2[cc] = x
                            else:
                                del row2[cc]
                                colrows[cc].discard(r2)
                                nnz -= 1
                elif piv == 1 or piv == -1:
                    fs = f * piv
                    for cc, w in pitems:
                        x = row2.get(cc, 0) - fs * w
                        if x:
                            if cc not in row2:
                                colrows.setdefault(cc, set()).add(r2)
                                nnz += 1
                            row2[cc] = x
                        elif cc in row2:
                            del row2[cc]
                            colrows[cc].discard(r2)
                            nnz -= 1
                else:
                    for cc in row2:
                        row2[cc] *= piv
                    for cc, w in pitems:
                        x = row2.get(cc, 0) - f * w
                        if x:
                            if cc not in row2:
                                colrows.setdefault(cc, set()).add(r2)
                                nnz += 1
                            row2[cc] = x
                        elif cc in row2:
                            del row2[cc]
                            colrows[cc].discard(r2)
                            nnz -= 1
                    g = 0
                    for cc in row2:
                        g = gcd(g, row2[cc])
                    if g > 1:
                        for cc in row2:
                            row2[cc] //= g
                if not row2:
                    del live[r2]
            rank += 1
            steps += 1
            if steps % 128 == 0 and live:
                nr = len(live)
                ncl = sum(1 for s in colrows.values() if s)
                cells = nr * ncl
                if cells and (
                    cells <= _DENSE_ALWAYS
                    or (cells <= _DENSE_CELLS and nnz >= _DENSE_MIN_DENSITY * cells)
                ):
                    return rank + _dense_finish(live, colrows, p)
        if not progressed:
            break
    return rank


def _dense_finish(
    live: dict[int, dict[int, int]], colrows: dict[int, set[int]], p: int | None
) -> int:
    cols = sorted(c for c, s in colrows.items() if s)
    rows = [live[r] for r in sorted(live)]
    if p is None:
        return _rank_int_dense(rows, cols)
    colpos = {c: i for i, c in enumerate(cols)}
    a = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for i, rd in enumerate(rows):
        for c, v in rd.items():
            a[i, colpos[c]] = v
    return _rank_fp_dense(a, p)


# ---------------------------------------------------------------------------
# deterministic echelon + kernel
# ---------------------------------------------------------------------------


def _echelon_pivots(
    rows: list[dict[int, int]], ncols: int, p: int | None
) -> tuple[list[tuple[dict[int, int], int]], list[int]]:
    """Forward elimination with natural column order.

    Returns (pivots, free_cols) where pivots is a list of (row, pivot_col)
    in elimination order.  Over Q rows stay integer (content-normalized);
    over F_p values live in [0, p).  Deterministic for a given matrix.
    """
    live: dict[int, dict[int, int]] = {}
    colrows: dict[int, set[int]] = {}
    for rid, rd in enumerate(rows):
        if rd:
            live[rid] = rd
            for c in rd:
                colrows.setdefault(c, set()).add(rid)
    pivots: list[tuple[dict[int, int], int]] = []
    free_cols: list[int] = []
    for c in range(ncols):
        s = colrows.get(c)
        if not s:
            free_cols.append(c)
            continue
        if p is None:
            pr = min(s, key=lambda r: (abs(live[r][c]) != 1, len(live[r]), r))
        else:
            pr = min(s, key=lambda r: (len(live[r]), r))
        prow = live.pop(pr)
        for cc in prow:
            ss = colrows.get(cc)
            if ss is not None:
                ss.discard(pr)
        targets = list(colrows.pop(c))
        piv = prow[c]
        if p is not None and piv != 1:
            inv = pow(piv, p - 2, p)
            for cc in prow:
                prow[cc] = prow[cc] * inv % p
            piv = 1
        pitems = [(cc, w) for cc, w in prow.items() if cc != c]
        for r2 in targets:
            row2 = live[r2]
            f = row2.pop(c)
            if p is not None:
                fneg = p - f
                for cc, w in pitems:
                    x = (row2.get(cc, 0) + fneg * w) % p
                    if x:
                        if cc not in row2:
                            colrows.setdefault(cc, set()).add(r2)
                        row2[cc] = x
                    elif cc in row2:
                        del row2[cc]
                        colrows[cc].discard(r2)
            else:
                if piv in (1, -1):
                    fs = f * piv
                    mult = 1
                else:
                    fs = f
                    mult = piv
                g = 0
                if mult != 1:
                    for cc in row2:
                        row2[cc] *= mult
                for cc, w in pitems:
                    x = row2.get(cc, 0) - fs * w
                    if x:
                        if cc not in row2:
                            colrows.setdefault(cc, set()).add(r2)
                        row2[cc] = x
                    elif cc in row2:
                        del row2[cc]
                        colrows[cc].discard(r2)
                if mult != 1:
                    for cc in row2:
                        g = gcd(g, row2[cc])
                    if g > 1:
                        for cc in row2:
                            row2[cc] //= g
            if not row2:
                del live[r2]
        pivots.append((prow, c))
    return pivots, free_cols


def _kernel_from_echelon(
    pivots: list[tuple[dict[int, int], int]],
    free_cols: list[int],
    ncols: int,
    p: int | None,
) -> list[dict[int, object]]:
    """Back-substitute one kernel vector per free column."""
    out = []
    for fc in free_cols:
        if p is None:
            x: dict[int, Fraction] = {fc: Fraction(1)}
            for prow, pc in reversed(pivots):
                acc = Fraction(0)
                for cc, w in prow.items():
                    if cc != pc and cc in x:
                        acc += w * x[cc]
                if acc:
                    x[pc] = -acc / prow[pc]
            # clear denominators, divide by content, keep the free coord positive
            den = 1
            for v in x.values():
                den = den * v.denominator // gcd(den, v.denominator)
            ints = {c: int(v * den) for c, v in x.items() if v}
            g = 0
            for v in ints.values():
                g = gcd(g, v)
            if g > 1:
                ints = {c: v // g for c, v in ints.items()}
            out.append(ints)
        else:
            x: dict[int, int] = {fc: 1}
            for prow, pc in reversed(pivots):
                acc = 0
                for cc, w in prow.items():
                    if cc != pc and cc in x:
                        acc += w * x[cc]
                acc %= p
                if acc:
                    x[pc] = (p - acc) % p
            out.append({c: v for c, v in x.items() if v})
    return out


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def rank(m: SparseMatrix, domain: CoeffDomain) -> int:
    """Exact rank over the rationals or a prime field."""
    _require_field(domain, "rank")
    rows = [None] * m.rows
    rd = m.row_dicts()
    p = domain.p
    prepared: list[dict[int, int]] = []
    for r in range(m.rows):
        d = rd.get(r)
        if not d:
            continue
        if p is not None:
            d2 = {}
            for c, v in d.items():
                v = _as_int_mod(v, p)
                if v:
                    d2[c] = v
            if d2:
                prepared.append(d2)
        else:
            prepared.append(_as_int_row(d))
    return _sparse_rank(prepared, m.cols, p)


def kernel_basis(m: SparseMatrix, domain: CoeffDomain) -> SparseMatrix:
    """Deterministic basis of the right null space, as matrix columns.

    Over the rationals the basis vectors are scaled to primitive integer
    vectors; over F_p values lie in [0, p).  m * result = 0 exactly, and
    the number of columns is cols(m) - rank(m).
    """
    _require_field(domain, "kernel_basis")
    p = domain.p
    rd = m.row_dicts()
    prepared = []
    for r in sorted(rd):
        d = rd[r]
        if p is not None:
            d2 = {}
            for c, v in d.items():
                v = _as_int_mod(v, p)
                if v:
                    d2[c] = v
            if d2:
                prepared.append(d2)
        else:
            prepared.append(_as_int_row(d))
    pivots, free_cols = _echelon_pivots(prepared, m.cols, p)
    vecs = _kernel_from_echelon(pivots, free_cols, m.cols, p)
    ent = []
    for j, vec in enumerate(vecs):
        for r, v in vec.items():
            ent.append((r, j, v))
    return SparseMatrix(m.cols, len(vecs), ent)


def image_contains(m: SparseMatrix, v, domain: CoeffDomain) -> bool:
    """True iff the column vector v lies in the column span of m."""
    _require_field(domain, "image membership")
    if isinstance(v, dict):
        vd = dict(v)
        if vd and max(vd) >= m.rows:
            raise ValueError("vector has entries beyond the row count")
    else:
        if len(v) != m.rows:
            raise ValueError(
                f"vector length {len(v)} does not match row count {m.rows}"
            )
        vd = {i: x for i, x in enumerate(v) if x}
    aug = SparseMatrix(
        m.rows,
        m.cols + 1,
        list(m.entries) + [(r, m.cols, x) for r, x in vd.items()],
    )
    return rank(aug, domain) == rank(m, domain)


def _as_int_mod(v, p: int) -> int:
    if isinstance(v, Fraction):
        return v.numerator * pow(v.denominator, -1, p) % p
    return v % p


def _as_int_row(d: dict[int, object]) -> dict[int, int]:
    """Scale a rational row to a primitive integer row (rank-safe)."""
    if all(isinstance(v, int) for v in d.values()):
        row = dict(d)
    else:
        den = 1
        for v in d.values():
            f = Fraction(v)
            den = den * f.denominator // gcd(den, f.denominator)
        row = {c: int(Fraction(v) * den) for c, v in d.items()}
    g = 0
    for v in row.values():
        g = gcd(g, v)
    if g > 1:
        row = {c: v // g for c, v in row.items()}
    return row


def solve_columns(m: SparseMatrix, v, domain: CoeffDomain) -> dict[int, object] | None:
    """Coefficients x with m x = v, or None when v is outside the span.

    Intended for small systems (pairing projections); x is any solution,
    deterministic for a fixed matrix.
    """
    _require_field(domain, "solving")
    vd = dict(v) if isinstance(v, dict) else {i: x for i, x in enumerate(v) if x}
    aug = SparseMatrix(
        m.rows,
        m.cols + 1,
        list(m.entries) + [(r, m.cols, x) for r, x in vd.items()],
    )
    kern = kernel_basis(aug, domain)
    p = domain.p
    for j in range(kern.cols):
        col = kern.column(j)
        last = col.get(m.cols)
        if not last:
            continue
        if p is not None:
            inv = pow(p - last, -1, p)
            return {r: x * inv % p for r, x in col.items() if r < m.cols}
        return {r: Fraction(x, -last) for r, x in col.items() if r < m.cols}
    return None


class IncrementalRank:
    """Maintains an echelon basis of a growing set of vectors over a field.

    add(vec) reduces the coordinate dict against the stored pivots and
    returns True when the vector enlarges the span.  Over the rationals,
    vectors are kept as content-normalized integer rows.
    """

    def __init__(self, domain: CoeffDomain):
        _require_field(domain, "incremental rank")
        self.p = domain.p
        self.pivots: dict[int, dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: dict[int, object]) -> dict[int, int]:
        p = self.p
        if p is not None:
            row = {}
            for c, v in vec.items():
                v = _as_int_mod(v, p)
                if v:
                    row[c] = v
        else:
            row = _as_int_row({c: v for c, v in vec.items() if v})
        while row:
            lead = min(row)
            piv = self.pivots.get(lead)
            if piv is None:
                return row
            if p is not None:
                f = row[lead] * pow(piv[lead], p - 2, p) % p
                for c, w in piv.items():
                    x = (row.get(c, 0) - f * w) % p
                    if x:
                        row[c] = x
                    else:
                        row.pop(c, None)
            else:
                a, b = piv[lead], row[lead]
                g = gcd(a, b)
                ma, mb = a // g, b // g
                if ma != 1:
                    for c in row:
                        row[c] *= ma
                for c, w in piv.items():
                    x = row.get(c, 0) - mb * w
                    if x:
                        row[c] = x
                    else:
                        row.pop(c, None)
                if row and ma != 1:
                    g = 0
                    for v in row.values():
                        g = gcd(g, v)
                    if g > 1:
                        row = {c: v // g for c, v in row.items()}
        return row

    def add(self, vec: dict[int, object]) -> bool:
        row = self.reduce(vec)
        if not row:
            return False
        self.pivots[min(row)] = row
        return True


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


def smith_normal_form(m: SparseMatrix) -> list[int]:
    """Nonzero elementary divisors of an integer matrix, in divisibility order."""
    if m.rows * m.cols > SNF_CELL_LIMIT:
        raise SNFTooLarge(
            f"{m.rows}x{m.cols} exceeds the Smith normal form size limit"
        )
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, dict[int, int]] = {}
    for r, c, v in m.entries:
        if isinstance(v, Fraction):
            if v.denominator != 1:
                raise ValueError("Smith normal form requires integer entries")
            v = v.numerator
        if not isinstance(v, int):
            raise ValueError("Smith normal form requires integer entries")
        rows.setdefault(r, {})[c] = v
        cols.setdefault(c, {})[r] = v
    diag: list[int] = []

    def row_op(r2: int, r1: int, f: int) -> None:
        # row r2 -= f * row r1
        row1 = rows.get(r1, {})
        row2 = rows.setdefault(r2, {})
        for c, w in list(row1.items()):
            x = row2.get(c, 0) - f * w
            if x:
                row2[c] = x
                cols[c][r2] = x
            else:
                row2.pop(c, None)
                cols[c].pop(r2, None)
        if not row2:
            del rows[r2]

    def col_op(c2: int, c1: int, f: int) -> None:
        col1 = cols.get(c1, {})
        col2 = cols.setdefault(c2, {})
        for r, w in list(col1.items()):
            x = col2.get(r, 0) - f * w
            if x:
                col2[r] = x
                rows[r][c2] = x
            else:
                col2.pop(r, None)
                rows[r].pop(c2, None)
        if not col2:
            del cols[c2]

    while rows:
        # pick pivot inside the sparsest columns: units first, then small values
        cand = sorted(cols, key=lambda c: (len(cols[c]), c))[:32]
        best = None
        for c in cand:
            for r, v in cols[c].items():
                key = (abs(v) != 1, abs(v), len(cols[c]) + len(rows[r]), r, c)
                if best is None or key < best[0]:
                    best = (key, r, c)
        _, pr, pc = best
        while True:
            piv = rows[pr][pc]
            # reduce pivot column by row ops
            moved = False
            for r in list(cols[pc]):
                if r == pr:
                    continue
                v = cols[pc][r]
                q = v // piv
                if q:
                    row_op(r, pr, q)
                if rows.get(r, {}).get(pc):
                    # remainder smaller than pivot: swap pivot there
                    pr = r
                    moved = True
                    break
            if moved:
                continue
            # reduce pivot row by column ops
            moved = False
            for c in list(rows[pr]):
                if c == pc:
                    continue
                v = rows[pr][c]
                q = v // piv
                if q:
                    col_op(c, pc, q)
                if cols.get(c, {}).get(pr):
                    pc = c
                    moved = True
                    break
            if moved:
                continue
            break
        piv = rows[pr][pc]
        diag.append(abs(piv))
        del rows[pr][pc]
        if not rows[pr]:
            del rows[pr]
        del cols[pc][pr]
        if not cols[pc]:
            del cols[pc]
        # pivot row and column are now clear of other entries
    return _divisor_chain(diag)


def _divisor_chain(diag: list[int]) -> list[int]:
    """Normalize a diagonal to the divisibility chain d1 | d2 | ..."""
    d = [abs(x) for x in diag if x]
    changed = True
    while changed:
        changed = False
        d.sort()
        for i in range(len(d) - 1):
            a, b = d[i], d[i + 1]
            if b % a:
                g = gcd(a, b)
                d[i], d[i + 1] = g, a * b // g
                changed = True
    return d


def homology_summands(
    out_slice: SparseMatrix, in_slice: SparseMatrix
) -> tuple[int, list[int]]:
    """Free rank and torsion of ker(out_slice) / im(in_slice) over Z.

    Both slices must compose to zero (out_slice * in_slice = 0).  The
    torsion subgroup is read off the Smith normal form of the incoming
    boundary matrix: its image is a finite-index sublattice of a saturated
    sublattice of the ambient lattice, so the nontrivial elementary
    divisors of in_slice are exactly the torsion coefficients.
    """
    divisors = smith_normal_form(in_slice)
    rank_in = len(divisors)
    rank_out = rank(out_slice, QQ) if out_slice.nnz else 0
    free = (out_slice.cols - rank_out) - rank_in
    return free, [d for d in divisors if d != 1]
