"""Exact coefficient domains: integers, rationals, and prime fields.

Domain elements are plain Python objects: int for the integers and prime
fields (prime-field values normalized to [0, p)), Fraction or int for the
rationals.  No floating point is used anywhere.
"""

from __future__ import annotations

from fractions import Fraction

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin, exact for p < 3.3e24 (covers p < 2^31)."""
    if p < 2:
        return False
    for q in _SMALL_PRIMES:
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


class CoeffDomain:
    """One of: integers, rationals, or the prime field F_p with p < 2^31."""

    __slots__ = ("kind", "p")

    def __init__(self, kind: str, p: int | None = None):
        if kind not in ("integers", "rationals", "prime_field"):
            raise ValueError(f"unknown coefficient domain kind {kind!r}")
        if kind == "prime_field":
            if p is None or p >= 1 << 31 or not is_prime(p):
                raise ValueError(f"prime_field modulus must be a prime < 2^31, got {p}")
        elif p is not None:
            raise ValueError(f"{kind} takes no modulus")
        self.kind = kind
        self.p = p

    @property
    def is_field(self) -> bool:
        return self.kind != "integers"

    def normalize(self, x):
        """Coerce an integer or Fraction into this domain's canonical form."""
        if self.kind == "prime_field":
            if isinstance(x, Fraction):
                return x.numerator * pow(x.denominator, -1, self.p) % self.p
            return x % self.p
        if self.kind == "rationals":
            return x if isinstance(x, Fraction) else Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return x.numerator
        return x

    def __eq__(self, other):
        return (
            isinstance(other, CoeffDomain)
            and self.kind == other.kind
            and self.p == other.p
        )

    def __hash__(self):
        return hash((self.kind, self.p))

    def __repr__(self):
        if self.kind == "prime_field":
            return f"GF({self.p})"
        return "ZZ" if self.kind == "integers" else "QQ"


ZZ = CoeffDomain("integers")
QQ = CoeffDomain("rationals")

_gf_cache: dict[int, CoeffDomain] = {}


def GF(p: int) -> CoeffDomain:
    """The prime field with p elements."""
    dom = _gf_cache.get(p)
    if dom is None:
        dom = _gf_cache[p] = CoeffDomain("prime_field", p)
    return dom


DEFAULT_PRIMES = (32003, 65521)
