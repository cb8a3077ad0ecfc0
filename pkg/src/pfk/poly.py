"""Sparse multivariate polynomials with single or double grading.

Exponent vectors are dense tuples of small nonnegative integers; terms map
exponent tuples to nonzero integer (or Fraction) coefficients.  The global
term order is lex ascending on exponent tuples, fixed once so that every
serialized object is deterministic and diffable.

Monomial enumeration, counting, ranking and unranking of a degree slice
are closed-form (binomial prefix sums) for rings whose variables split
into contiguous blocks of unit multidegree -- which covers the symmetric
algebras used here -- with a generic recursive fallback otherwise.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from pfk.rings import CoeffDomain, ZZ

Multidegree = tuple[int, ...]


def mdeg_add(a: Multidegree, b: Multidegree) -> Multidegree:
    return tuple(x + y for x, y in zip(a, b))


def mdeg_sub(a: Multidegree, b: Multidegree) -> Multidegree:
    return tuple(x - y for x, y in zip(a, b))


def mdeg_neg(a: Multidegree) -> Multidegree:
    return tuple(-x for x in a)


def mdeg_is_nonneg(a: Multidegree) -> bool:
    return all(x >= 0 for x in a)


def _compositions(total: int, k: int) -> list[tuple[int, ...]]:
    """All k-tuples of nonnegatives summing to total, lex ascending."""
    if k == 0:
        return [()] if total == 0 else []
    if k == 1:
        return [(total,)]
    out = []
    for first in range(total + 1):
        for rest in _compositions(total - first, k - 1):
            out.append((first,) + rest)
    return out


class PolyRing:
    """A graded polynomial ring over an exact coefficient domain."""

    def __init__(
        self,
        names: list[str] | tuple[str, ...],
        degrees: list[Multidegree] | tuple[Multidegree, ...],
        domain: CoeffDomain = ZZ,
    ):
        names = tuple(names)
        degrees = tuple(tuple(d) for d in degrees)
        if len(names) != len(degrees):
            raise ValueError("one multidegree per variable is required")
        if len(set(names)) != len(names):
            raise ValueError("variable names must be distinct")
        arities = {len(d) for d in degrees}
        if len(arities) > 1:
            raise ValueError("all variable degrees must share one arity")
        self.names = names
        self.degrees = degrees
        self.domain = domain
        self.arity = arities.pop() if arities else 1
        self._blocks = self._unit_blocks()
        self._basis_cache: dict[Multidegree, list[tuple[int, ...]]] = {}
        self._comb_ok = self._blocks is not None

    def _unit_blocks(self):
        """Contiguous runs of variables with unit degree, one run per component."""
        blocks = []
        i = 0
        n = len(self.degrees)
        while i < n:
            d = self.degrees[i]
            j = i
            while j < n and self.degrees[j] == d:
                j += 1
            if sum(d) != 1 or min(d) < 0:
                return None
            blocks.append((i, j - i, d.index(1)))
            i = j
        comps = [b[2] for b in blocks]
        if len(set(comps)) != len(comps) or len(comps) != self.arity:
            return None
        return blocks

    @property
    def nvars(self) -> int:
        return len(self.names)

    def zero_degree(self) -> Multidegree:
        return (0,) * self.arity

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c) -> "Polynomial":
        if not c:
            return self.zero()
        return Polynomial(self, {(0,) * self.nvars: c})

    def variable(self, i: int) -> "Polynomial":
        exp = [0] * self.nvars
        exp[i] = 1
        return Polynomial(self, {tuple(exp): 1})

    def var_by_name(self, name: str) -> "Polynomial":
        return self.variable(self.names.index(name))

    def exp_degree(self, exp: tuple[int, ...]) -> Multidegree:
        out = [0] * self.arity
        for e, dv in zip(exp, self.degrees):
            if e:
                for t in range(self.arity):
                    out[t] += e * dv[t]
        return tuple(out)

    # -- degree-slice combinatorics ------------------------------------------

    def monomial_count(self, d: Multidegree) -> int:
        d = tuple(d)
        if len(d) != self.arity:
            raise ValueError("multidegree arity mismatch")
        if not mdeg_is_nonneg(d):
            return 0
        if self._comb_ok:
            total = 1
            for _, length, comp in self._blocks:
                total *= comb(d[comp] + length - 1, length - 1)
            return total
        return len(self.monomial_basis(d))

    def monomial_basis(self, d: Multidegree) -> list[tuple[int, ...]]:
        """All exponent tuples of multidegree exactly d, lex ascending."""
        d = tuple(d)
        if len(d) != self.arity:
            raise ValueError("multidegree arity mismatch")
        if not mdeg_is_nonneg(d):
            return []
        cached = self._basis_cache.get(d)
        if cached is not None:
            return cached
        if self._comb_ok:
            parts = [_compositions(d[comp], length) for _, length, comp in self._blocks]
            out = parts[0]
            for extra in parts[1:]:
                out = [a + b for a in out for b in extra]
        else:
            out = [
                exp
                for exp in self._enumerate_generic(d, 0)
            ]
        self._basis_cache[d] = out
        return out

    def _enumerate_generic(self, d: Multidegree, i: int):
        if i == self.nvars:
            if all(x == 0 for x in d):
                yield ()
            return
        dv = self.degrees[i]
        e = 0
        rem = d
        while mdeg_is_nonneg(rem):
            for tail in self._enumerate_generic(rem, i + 1):
                yield (e,) + tail
            e += 1
            rem = mdeg_sub(rem, dv)

    def monomial_rank(self, d: Multidegree, exp: tuple[int, ...]) -> int:
        """Position of exp in monomial_basis(d), without materializing it."""
        if self._comb_ok:
            rank = 0
            stride = self.monomial_count(d)
            for start, length, comp in self._blocks:
                block_exp = exp[start : start + length]
                cnt = comb(d[comp] + length - 1, length - 1)
                stride //= cnt
                rank += self._block_rank(block_exp, d[comp], length) * stride
            return rank
        return self.monomial_basis(d).index(exp)

    def monomial_unrank(self, d: Multidegree, rank: int) -> tuple[int, ...]:
        if self._comb_ok:
            pieces = []
            stride = self.monomial_count(d)
            for start, length, comp in self._blocks:
                cnt = comb(d[comp] + length - 1, length - 1)
                stride //= cnt
                idx, rank = divmod(rank, stride)
                pieces.append(self._block_unrank(idx, d[comp], length))
            return tuple(x for piece in pieces for x in piece)
        return self.monomial_basis(d)[rank]

    @staticmethod
    def _block_rank(exp: tuple[int, ...], d: int, k: int) -> int:
        rank = 0
        rem = d
        for i, e in enumerate(exp):
            if e:
                kk = k - i - 1
                rank += comb(rem + kk, kk) - comb(rem - e + kk, kk)
                rem -= e
        return rank

    @staticmethod
    def _block_unrank(rank: int, d: int, k: int) -> tuple[int, ...]:
        out = []
        rem = d
        for i in range(k - 1):
            kk = k - i - 1
            e = 0
            while True:
                block = comb(rem - e + kk - 1, kk - 1)
                if rank < block:
                    break
                rank -= block
                e += 1
            out.append(e)
            rem -= e
        out.append(rem)
        return tuple(out)

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.names == other.names
            and self.degrees == other.degrees
            and self.domain == other.domain
        )

    def __hash__(self):
        return hash((self.names, self.degrees, self.domain))

    def __repr__(self):
        return f"PolyRing({len(self.names)} vars, arity {self.arity}, {self.domain})"


class Polynomial:
    """Immutable sparse polynomial; terms: exponent tuple -> nonzero coeff."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms

    def _check_ring(self, other: "Polynomial") -> None:
        if self.ring != other.ring:
            raise ValueError("polynomials belong to different rings")

    def __add__(self, other):
        if isinstance(other, int):
            other = self.ring.constant(other)
        self._check_ring(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.ring.zero()
            return Polynomial(self.ring, {e: c * other for e, c in self.terms.items()})
        self._check_ring(other)
        out: dict = {}
        small, big = self.terms, other.terms
        if len(small) > len(big):
            small, big = big, small
        for e1, c1 in small.items():
            for e2, c2 in big.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not defined")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        degs = {self.ring.exp_degree(e) for e in self.terms}
        return len(degs) <= 1

    def degree(self) -> Multidegree:
        """Multidegree of a homogeneous polynomial (zero degree for 0)."""
        degs = {self.ring.exp_degree(e) for e in self.terms}
        if len(degs) > 1:
            raise ValueError("polynomial is not homogeneous")
        return degs.pop() if degs else self.ring.zero_degree()

    def evaluate(self, point, domain: CoeffDomain | None = None):
        """Exact evaluation at a point with coordinates in the target domain."""
        if len(point) != self.ring.nvars:
            raise ValueError(
                f"point has {len(point)} coordinates, ring has {self.ring.nvars}"
            )
        dom = domain or self.ring.domain
        p = dom.p if dom.kind == "prime_field" else None
        total = 0
        for e, c in self.terms.items():
            if p is not None:
                v = c % p
                for x, ee in zip(point, e):
                    if ee:
                        v = v * pow(x, ee, p) % p
                total = (total + v) % p
            else:
                v = c
                for x, ee in zip(point, e):
                    if ee:
                        v = v * x**ee
                total = total + v
        return dom.normalize(total)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], object]]:
        return [(e, self.terms[e]) for e in sorted(self.terms)]

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = [str(c)]
            for name, ee in zip(self.ring.names, e):
                if ee == 1:
                    factors.append(name)
                elif ee > 1:
                    factors.append(f"{name}^{ee}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    __repr__ = to_text

    def to_json(self) -> list[dict]:
        return [{"coeff": str(c), "exp": list(e)} for e, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, ring: PolyRing, data: list[dict]) -> "Polynomial":
        terms = {}
        for item in data:
            e = tuple(item["exp"])
            if len(e) != ring.nvars:
                raise ValueError("exponent length does not match variable count")
            c = item["coeff"]
            c = Fraction(c) if "/" in c else int(c)
            if c:
                terms[e] = c
        return cls(ring, terms)
