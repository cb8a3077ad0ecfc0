"""Generic skew-symmetric matrices and their sub-Pfaffians.

The Pfaffian of an even skew-symmetric matrix is computed by recursive
expansion along the first row,

    Pf(M) = sum_{j>1} (-1)^j m_{1j} Pf(M with rows/cols 1 and j removed),

with Pf of the empty matrix equal to 1.  Sub-Pfaffians of a generic matrix
are memoized on their index set, because the comultiplication formulas
re-request the same submatrices many times.
"""

from __future__ import annotations

from pfk.exterior import IndexSet, check_index_set
from pfk.poly import PolyRing, Polynomial


def pfaffian(entries: list[list[Polynomial]], ring: PolyRing | None = None) -> Polynomial:
    """Pfaffian of an explicit skew-symmetric matrix of polynomials.

    The empty matrix has Pfaffian 1; pass the ring explicitly in that case.
    """
    m = len(entries)
    if m % 2:
        raise ValueError("Pfaffian undefined for odd size")
    for row in entries:
        if len(row) != m:
            raise ValueError("matrix must be square")
    if m == 0:
        if ring is None:
            raise ValueError("empty matrix needs an explicit ring")
        return ring.one()
    ring = entries[0][0].ring
    for i in range(m):
        if not entries[i][i].is_zero():
            raise ValueError(f"diagonal entry ({i}, {i}) is nonzero")
        for j in range(i + 1, m):
            if not (entries[i][j] + entries[j][i]).is_zero():
                raise ValueError(f"entries ({i}, {j}) and ({j}, {i}) are not opposite")

    def pf(idx: tuple[int, ...]) -> Polynomial:
        if not idx:
            return ring.one()
        i0 = idx[0]
        rest = idx[1:]
        acc = ring.zero()
        for pos, j in enumerate(rest):
            # column j is the (pos+2)-nd index, so the expansion sign is (-1)^(pos+2)
            term = entries[i0][j] * pf(tuple(x for x in rest if x != j))
            acc = acc + (term if pos % 2 == 0 else -term)
        return acc

    return pf(tuple(range(m)))


class GenericSkewMatrix:
    """Size-m skew matrix whose above-diagonal entries are distinct variables.

    var_of(i, j) gives the ring variable index of the (i, j) entry for
    1 <= i < j <= m; entries are exact: entry(j, i) = -entry(i, j) and the
    diagonal is zero.  Sub-Pfaffians share a memo table keyed on the index
    set; inserts are idempotent, so concurrent reuse is safe.
    """

    def __init__(self, ring: PolyRing, size: int, var_index: dict[tuple[int, int], int]):
        self.ring = ring
        self.size = size
        self.var_index = dict(var_index)
        for i in range(1, size + 1):
            for j in range(i + 1, size + 1):
                if (i, j) not in self.var_index:
                    raise ValueError(f"missing variable for entry ({i}, {j})")
        self._pf_memo: dict[IndexSet, Polynomial] = {}

    def entry(self, i: int, j: int) -> Polynomial:
        if i == j:
            return self.ring.zero()
        if i < j:
            return self.ring.variable(self.var_index[(i, j)])
        return -self.ring.variable(self.var_index[(j, i)])

    def entry_sign_var(self, i: int, j: int) -> tuple[int, int]:
        """(sign, variable index) for the (i, j) entry; i != j."""
        if i < j:
            return 1, self.var_index[(i, j)]
        return -1, self.var_index[(j, i)]

    def pf(self, ind: IndexSet) -> Polynomial:
        """Pfaffian of the submatrix on rows/columns ind (sorted, even size)."""
        ind = tuple(ind)
        check_index_set(ind, self.size)
        if len(ind) % 2:
            raise ValueError("Pfaffian undefined for odd size")
        memo = self._pf_memo
        hit = memo.get(ind)
        if hit is not None:
            return hit
        if not ind:
            result = self.ring.one()
        else:
            i0 = ind[0]
            rest = ind[1:]
            result = self.ring.zero()
            for pos, j in enumerate(rest):
                sub = self.pf(tuple(x for x in rest if x != j))
                term = self.entry(i0, j) * sub
                result = result + (term if pos % 2 == 0 else -term)
        memo[ind] = result
        return result


def pf_sub(phi: GenericSkewMatrix, ind: IndexSet) -> Polynomial:
    """Pf of the submatrix of phi on the index set, Pf(empty) = 1."""
    return phi.pf(tuple(ind))


def pf_union(phi: GenericSkewMatrix, i2: IndexSet, j: IndexSet) -> Polynomial:
    """Pf of the sorted union, 0 when the sets overlap.

    No reordering sign is applied here; the caller folds in the shuffle
    sign required by the comultiplication formula.
    """
    if set(i2) & set(j):
        return phi.ring.zero()
    union = tuple(sorted(set(i2) | set(j)))
    if len(union) % 2:
        raise ValueError("Pfaffian undefined for odd size")
    return phi.pf(union)


def skew_variable_ring(m: int, prefix: str = "x") -> tuple[PolyRing, dict]:
    """Ring with one degree-1 variable per above-diagonal position of size m."""
    names = []
    var_index = {}
    k = 0
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            names.append(f"{prefix}{i}_{j}")
            var_index[(i, j)] = k
            k += 1
    ring = PolyRing(names, [(1,)] * len(names))
    return ring, var_index


def generic_skew_matrix(m: int) -> GenericSkewMatrix:
    ring, var_index = skew_variable_ring(m)
    return GenericSkewMatrix(ring, m, var_index)


def pfaffian_generators(n: int) -> tuple[GenericSkewMatrix, list[Polynomial]]:
    """The 2n+1 signed maximal sub-Pfaffians of a generic (2n+1) skew matrix.

    Generator i is (-1)^(i+1) times the Pfaffian of the matrix with row and
    column i removed; each is homogeneous of degree n.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    m = 2 * n + 1
    phi = generic_skew_matrix(m)
    gens = []
    for i in range(1, m + 1):
        ind = tuple(x for x in range(1, m + 1) if x != i)
        pf = phi.pf(ind)
        gens.append(pf if i % 2 == 1 else -pf)
    return phi, gens


def hu_ring(n: int) -> tuple[PolyRing, dict]:
    """Bigraded ring for the deviation-2 setup: skew variables (1,0), vector
    coordinates (0,1)."""
    m = 2 * n
    names = []
    var_index = {}
    k = 0
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            names.append(f"x{i}_{j}")
            var_index[(i, j)] = k
            k += 1
    nx = k
    for i in range(1, m + 1):
        names.append(f"y{i}")
    degrees = [(1, 0)] * nx + [(0, 1)] * m
    ring = PolyRing(names, degrees)
    return ring, var_index


def hu_generators(n: int) -> tuple[GenericSkewMatrix, list[Polynomial]]:
    """Generators of the deviation-2 ideal: the 2n entries of Phi*v in row
    order (bidegree (1,1) each), then Pf(Phi) (bidegree (n,0))."""
    if n < 2:
        raise ValueError("n must be at least 2")
    m = 2 * n
    ring, var_index = hu_ring(n)
    phi = GenericSkewMatrix(ring, m, var_index)
    nx = len(var_index)
    y = [ring.variable(nx + i) for i in range(m)]
    gens = []
    for i in range(1, m + 1):
        acc = ring.zero()
        for j in range(1, m + 1):
            if j != i:
                acc = acc + phi.entry(i, j) * y[j - 1]
        gens.append(acc)
    gens.append(phi.pf(tuple(range(1, m + 1))))
    return phi, gens
