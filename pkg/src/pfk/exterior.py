"""Index-subset combinatorics for exterior powers.

Basis elements of an exterior power are strictly increasing tuples of
integers drawn from the ground set [1, N].  Everything here is a pure
function of such tuples: shuffle signs, comultiplication splittings, and
the lex rank/unrank bijection used for stable basis indexing.
"""

from __future__ import annotations

import itertools
from math import comb

IndexSet = tuple[int, ...]


def check_index_set(ind: IndexSet, ground: int | None = None) -> None:
    """Raise ValueError unless ind is strictly increasing inside [1, ground]."""
    for a, b in zip(ind, ind[1:]):
        if a >= b:
            raise ValueError(f"index set {ind} is not strictly increasing")
    if ind and ind[0] < 1:
        raise ValueError(f"index set {ind} has entries below 1")
    if ground is not None and ind and ind[-1] > ground:
        raise ValueError(f"index set {ind} exceeds ground set [1, {ground}]")


def shuffle_sign(i1: IndexSet, i2: IndexSet) -> int:
    """Sign of the permutation sorting the concatenation (i1, i2).

    Both arguments must be strictly increasing and disjoint; the sign is
    (-1)^(number of inversions between the two blocks).
    """
    if set(i1) & set(i2):
        raise ValueError(f"index sets {i1} and {i2} overlap")
    inversions = 0
    for a in i1:
        for b in i2:
            if a > b:
                inversions += 1
    return -1 if inversions % 2 else 1


def comultiply(ind: IndexSet, k: int) -> list[tuple[IndexSet, IndexSet, int]]:
    """All splittings of ind into (first, rest) with len(first) = k.

    Returns triples (first, rest, sign) where rest = ind minus first, both
    sorted, and sign = shuffle_sign(first, rest).  Order is lex on first.
    """
    if k < 0 or k > len(ind):
        raise ValueError(f"cannot split {len(ind)} indices into a block of {k}")
    out = []
    for first in itertools.combinations(ind, k):
        chosen = set(first)
        rest = tuple(x for x in ind if x not in chosen)
        out.append((first, rest, shuffle_sign(first, rest)))
    return out


def subset_rank(ind: IndexSet, ground: int) -> int:
    """Lex rank of a k-subset of [1, ground] among all k-subsets."""
    check_index_set(ind, ground)
    k = len(ind)
    rank = 0
    prev = 0
    for pos, c in enumerate(ind):
        for v in range(prev + 1, c):
            rank += comb(ground - v, k - pos - 1)
        prev = c
    return rank


def subset_unrank(rank: int, k: int, ground: int) -> IndexSet:
    """Inverse of subset_rank: the rank-th k-subset of [1, ground] in lex order."""
    total = comb(ground, k)
    if rank < 0 or rank >= total:
        raise ValueError(f"rank {rank} out of range [0, {total}) for k={k}, N={ground}")
    out = []
    prev = 0
    for pos in range(k):
        v = prev + 1
        while True:
            block = comb(ground - v, k - pos - 1)
            if rank < block:
                break
            rank -= block
            v += 1
        out.append(v)
        prev = v
    return tuple(out)


def subsets_lex(k: int, ground: int) -> list[IndexSet]:
    """All k-subsets of [1, ground] in lex order."""
    return list(itertools.combinations(range(1, ground + 1), k))
