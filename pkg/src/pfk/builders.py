"""Constructors for every named complex and element.

* Koszul complexes on an arbitrary list of homogeneous generators.
* The four-term complexes C^i resolving the pure modules supported in the
  maximal-Pfaffian locus, with comultiplication-plus-Pfaffian differentials.
* The deviation-2 setup: generic skew matrix times generic vector, the
  explicit top-homology cycle, and the predicted resolution-head and
  first-homology presentation shapes.
"""

from __future__ import annotations

import itertools
from math import comb, gcd, lcm

from pfk.exterior import comultiply, shuffle_sign, subset_rank, subsets_lex
from pfk.freecomplex import (
    FreeComplex,
    GeneratorLabel,
    GradedFreeModule,
    Generator,
)
from pfk.pfaffian import (
    GenericSkewMatrix,
    hu_generators,
    pfaffian_generators,
)
from pfk.poly import Multidegree, Polynomial, mdeg_neg


class PfaffianContext:
    """Everything attached to the ideal of 2n-Pfaffians of a generic
    skew-symmetric matrix of odd size 2n+1."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be at least 1")
        self.n = n
        self.m = 2 * n + 1
        self.phi, self.gens = pfaffian_generators(n)
        self.ring = self.phi.ring
        for g in self.gens:
            assert g.degree() == (n,)

    def __repr__(self):
        return f"PfaffianContext(n={self.n})"


class HUContext:
    """Deviation-2 context: generic skew matrix of size 2n and generic
    vector, over the bigraded polynomial ring."""

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("n must be at least 2")
        self.n = n
        self.m = 2 * n
        self.phi, self.gens = hu_generators(n)
        self.ring = self.phi.ring
        for g in self.gens[:-1]:
            assert g.degree() == (1, 1)
        assert self.gens[-1].degree() == (n, 0)

    def __repr__(self):
        return f"HUContext(n={self.n})"


def build_koszul(
    gens: list[Polynomial], twists: list[Multidegree] | None = None
) -> FreeComplex:
    """Koszul complex on a list of homogeneous generators.

    Module k has one generator e_S per size-k subset S of the generator
    slots, in lex order, with twist minus the sum of the slot twists; the
    differential contracts e_S against the generators with alternating
    signs.
    """
    if not gens:
        raise ValueError("need at least one generator")
    ring = gens[0].ring
    for g in gens:
        if g.ring != ring:
            raise ValueError("generators live in different rings")
        if not g.is_homogeneous() or g.is_zero():
            raise ValueError("Koszul generators must be nonzero homogeneous")
    if twists is None:
        twists = [g.degree() for g in gens]
    mu = len(gens)
    zero = ring.zero_degree()
    modules = []
    subsets_by_k = [subsets_lex(k, mu) for k in range(mu + 1)]
    for k in range(mu + 1):
        gen_list = []
        for s in subsets_by_k[k]:
            tw = zero
            for t in s:
                tw = tuple(a + b for a, b in zip(tw, twists[t - 1]))
            gen_list.append(
                Generator(GeneratorLabel(("ext", k, mu), 0, mdeg_neg(tw)), s)
            )
        modules.append(GradedFreeModule(ring, gen_list))
    diffs = []
    for k in range(1, mu + 1):
        diff = {}
        rank_cache = {s: i for i, s in enumerate(subsets_by_k[k - 1])}
        for ci, s in enumerate(subsets_by_k[k]):
            for pos, slot in enumerate(s):
                rest = s[:pos] + s[pos + 1 :]
                poly = gens[slot - 1] if pos % 2 == 0 else -gens[slot - 1]
                diff[(rank_cache[rest], ci)] = poly
        diffs.append(diff)
    return FreeComplex(ring, 0, modules, diffs)


def build_pfaffian_koszul(ctx: PfaffianContext) -> FreeComplex:
    return build_koszul(ctx.gens)


def build_hu_koszul(ctx: HUContext) -> FreeComplex:
    return build_koszul(ctx.gens)


def _middle_map_column(
    phi: GenericSkewMatrix, n: int, i: int, j_set: tuple[int, ...]
) -> dict[tuple[int, ...], Polynomial]:
    """One column of the middle differential of C^i.

    The map is the unique (up to scalar) combination of the contraction
    candidates

        D_b = wedge of (Pfaffian contraction^(i+1-b) of the top form)
              with (Pfaffian contraction^b of the column subset),

    namely sum_b (-1)^b * (L / (q+b)) * D_b with q = n-i and
    L = lcm(q, ..., q+B), B = floor((i+1)/2).  For b = 0 this reproduces
    the sub-Pfaffians Pf(I'' u J) over complements I'' disjoint from J;
    the b > 0 terms are products of smaller Pfaffians that are forced by
    the condition that consecutive maps compose to zero (for even i they
    vanish identically, since odd-size Pfaffians are zero).
    """
    m = 2 * n + 1
    ring = phi.ring
    full = tuple(range(1, m + 1))
    q = n - i
    cap = (i + 1) // 2
    scale = lcm(*range(q, q + cap + 1)) if cap else 1
    col: dict[tuple[int, ...], Polynomial] = {}
    for b in range(cap + 1):
        coeff = (scale // (q + b)) * (-1) ** b
        for part in itertools.combinations(j_set, 2 * b):
            j_rem = tuple(x for x in j_set if x not in part)
            pf_part = phi.pf(part)
            if pf_part.is_zero():
                continue
            sgn_split = shuffle_sign(part, j_rem)
            j_mem = set(j_rem)
            pool = tuple(x for x in full if x not in j_mem)
            for extra in itertools.combinations(pool, 2 * (i + 1 - b) - len(j_rem)):
                k_set = tuple(sorted(j_rem + extra))
                rest = tuple(x for x in full if x not in k_set)
                sign = (
                    coeff
                    * sgn_split
                    * shuffle_sign(k_set, rest)
                    * shuffle_sign(rest, j_rem)
                )
                target = tuple(sorted(rest + j_rem))
                term = sign * (pf_part * phi.pf(k_set))
                prev = col.get(target)
                col[target] = term if prev is None else prev + term
    col = {k: v for k, v in col.items() if not v.is_zero()}
    content = 0
    for poly in col.values():
        for c in poly.terms.values():
            content = gcd(content, c)
    if content > 1:
        col = {
            k: Polynomial(v.ring, {e: c // content for e, c in v.terms.items()})
            for k, v in col.items()
        }
    return col


def build_C(ctx: PfaffianContext, i: int) -> FreeComplex:
    """The four-term complex C^i, i = 0..n-1.

    Homological degrees 0..3 carry exterior powers of ranks
    C(2n+1, i), C(2n+1, i+1), C(2n+1, i+1), C(2n+1, i) and twists
    0, -(n-i), -(n+1), -(2n+1-i).  The outer maps comultiply an index set
    and take the sub-Pfaffian of the complementary part; the middle map is
    the contraction combination described in _middle_map_column.
    """
    n, m = ctx.n, ctx.m
    if not 0 <= i <= n - 1:
        raise ValueError(f"i must satisfy 0 <= i <= n-1, got {i}")
    phi = ctx.phi
    ring = ctx.ring

    labels = [
        GeneratorLabel(("ext", i, m), 0, (0,)),
        GeneratorLabel(("ext", 2 * n - i, m), 0, (-(n - i),)),
        GeneratorLabel(("ext", i + 1, m), 1, (-(n + 1),)),
        GeneratorLabel(("ext", 2 * n + 1 - i, m), 1, (-(2 * n + 1 - i),)),
    ]
    modules = [GradedFreeModule.from_block(ring, lab) for lab in labels]

    # d1: comultiply a (2n-i)-set into (i, rest) and take Pf of the rest
    d1 = {}
    for ci, s in enumerate(subsets_lex(2 * n - i, m)):
        for first, rest, sign in comultiply(s, i):
            poly = phi.pf(rest)
            d1[(subset_rank(first, m), ci)] = poly if sign > 0 else -poly

    d2 = {}
    for ci, j_set in enumerate(subsets_lex(i + 1, m)):
        for target, poly in _middle_map_column(phi, n, i, j_set).items():
            d2[(subset_rank(target, m), ci)] = poly

    # d3: same comultiplication pattern as d1, one exterior step higher
    d3 = {}
    for ci, s in enumerate(subsets_lex(2 * n + 1 - i, m)):
        for first, rest, sign in comultiply(s, i + 1):
            poly = phi.pf(rest)
            d3[(subset_rank(first, m), ci)] = poly if sign > 0 else -poly

    return FreeComplex(ring, 0, modules, [d1, d2, d3])


def build_hu_h2_cycle(ctx: HUContext) -> list[Polynomial]:
    """The explicit cycle generating the top homology of the deviation-2
    Koszul complex, as a coordinate vector over the degree-2 module.

    On e_i ^ e_j (both slots among the 2n matrix rows) the coordinate is
    -(-1)^(i+j) Pf of the matrix with rows/columns i and j removed; on
    e_i ^ f (f the Pfaffian slot) it is the i-th vector coordinate.  The
    vector is homogeneous of bidegree (n+1, 2).
    """
    n, m = ctx.n, ctx.m
    ring = ctx.ring
    nx = m * (m - 1) // 2
    mu = m + 1
    coords = []
    for s in subsets_lex(2, mu):
        a, b = s
        if b <= m:
            pf = ctx.phi.pf(tuple(x for x in range(1, m + 1) if x not in (a, b)))
            coords.append(-pf if (a + b) % 2 == 0 else pf)
        else:
            coords.append(ring.variable(nx + a - 1))
    return coords


def predicted_kustin_shape(n: int) -> dict[int, dict[Multidegree, int]]:
    """Bidegree-to-multiplicity tables of the first three terms of the
    minimal free resolution of the deviation-2 quotient (n >= 3; the
    exterior-cube term drops out when n = 3)."""
    if n < 3:
        raise ValueError("n=2 is covered by the odd-size Pfaffian family via specialization")
    m = 2 * n
    f1 = {(1, 1): m, (n, 0): 1}
    f2 = {(2, 2): comb(m, 2), (n, 1): m, (1, 2): 1}
    f3 = {(n, 2): comb(m, 2), (2, 3): m, (n + 1, 2): 1}
    if n > 3:
        f3[(3, 3)] = comb(m, 3)
    return {1: f1, 2: f2, 3: f3}


def predicted_h1_presentation_shape(n: int) -> dict[int, dict[Multidegree, int]]:
    """Generator and relation bidegree tables of the first Koszul homology
    of the deviation-2 ideal (n >= 3).

    beta_0 = {(1,2): 1, (n,1): 2n}; beta_1 = {(2,3): 2n, (n,2): C(2n,2),
    (n+1,1): 2n}.  The redundant relation block {(n+1,2): 1} is dropped.
    """
    if n < 3:
        raise ValueError("n=2 is covered by the odd-size Pfaffian family via specialization")
    m = 2 * n
    return {
        0: {(1, 2): 1, (n, 1): m},
        1: {(2, 3): m, (n, 2): comb(m, 2), (n + 1, 1): m},
    }


def hu_h2_hf_shift(n: int) -> Multidegree:
    """Internal bidegree shift of the top homology relative to the quotient."""
    return (n + 1, 2)
