"""Exact integer polynomials and the bookkeeping built on them."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .bitwindow import BitWindow
from .errors import InputError, PolyOverflowError, PreconditionError

_I64 = 2**63
_I128 = 2**127


class Poly:
    """Polynomial with 64-bit integer coefficients, constant term first.

    Values are computed exactly and must fit in a signed 128-bit integer;
    anything larger raises :class:`PolyOverflowError` instead of wrapping.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [int(c) for c in coeffs]
        for c in cs:
            if not -_I64 <= c < _I64:
                raise PolyOverflowError(f"coefficient {c} does not fit in 64 bits")
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs) if cs else (0,)

    @classmethod
    def parse(cls, text: str) -> Poly:
        """Parse ``"c0,c1,...,cd"``."""
        try:
            return cls(int(t) for t in text.split(","))
        except ValueError as exc:
            raise InputError(f"cannot parse polynomial {text!r}: {exc}") from None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs != (0,) else 0

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    def __call__(self, n: int) -> int:
        return eval_poly(self, n)

    def values(self, ns) -> np.ndarray:
        """Exact values at many points, as int64 (overflow beyond 2^63 raises)."""
        out = [eval_poly(self, int(n)) for n in ns]
        if out and (max(out) >= _I64 or min(out) < -_I64):
            raise PolyOverflowError("polynomial values exceed the 64-bit index range")
        return np.array(out, dtype=np.int64)

    def shifted(self, h: int) -> Poly:
        """The polynomial n -> p(n + h)."""
        # Taylor shift by repeated synthetic division
        cs = list(self.coeffs)
        d = len(cs) - 1
        for i in range(d):
            for k in range(d - 1, i - 1, -1):
                cs[k] += h * cs[k + 1]
        return Poly(cs)

    def __sub__(self, other: Poly) -> Poly:
        a, b = self.coeffs, other.coeffs
        m = max(len(a), len(b))
        return Poly((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(m))

    def __add__(self, other: Poly) -> Poly:
        a, b = self.coeffs, other.coeffs
        m = max(len(a), len(b))
        return Poly((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(m))

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)})"

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coeffs)

    def tends_to_infinity(self) -> bool:
        return self.degree >= 1 and self.leading > 0

    def increasing_from(self) -> int:
        """Some ``n0 >= 0`` with ``p(n + 1) > p(n)`` for every ``n >= n0``.

        Requires positive leading coefficient and degree >= 1.  Uses the
        Cauchy root bound on the forward difference ``p(n+1) - p(n)``.
        """
        if not self.tends_to_infinity():
            raise PreconditionError(f"{self!r} does not tend to +infinity")
        diff = self.shifted(1) - self
        cs = diff.coeffs
        if diff.degree == 0:
            return 0
        bound = 1 + max(abs(c) for c in cs[:-1]) // cs[-1] + 1
        # walk back while the difference stays positive, for a tighter start
        n0 = bound
        while n0 > 0 and eval_poly(diff, n0 - 1) > 0:
            n0 -= 1
        return n0


def eval_poly(p: Poly, n: int) -> int:
    """Horner evaluation with an explicit 128-bit range check."""
    n = int(n)
    acc = 0
    for c in reversed(p.coeffs):
        acc = acc * n + c
    if not -_I128 <= acc < _I128:
        raise PolyOverflowError(f"{p!r} at n={n} does not fit in 128 bits")
    return acc


def essentially_distinct(family) -> bool:
    """All pairwise differences are non-constant."""
    family = list(family)
    if len(family) < 2:
        raise InputError("essential distinctness needs at least two polynomials")
    return all((p - q).degree >= 1 for p, q in combinations(family, 2))


@dataclass(frozen=True)
class CharVector:
    """Number of distinct leading coefficients at each degree 1..d."""

    counts: tuple

    @property
    def degree(self) -> int:
        return len(self.counts)


def characteristic_vector(family) -> CharVector:
    family = list(family)
    if not family:
        raise InputError("empty polynomial family")
    if len(family) > 1 and not essentially_distinct(family):
        raise PreconditionError("family is not essentially distinct")
    d = max(p.degree for p in family)
    if d < 1:
        raise PreconditionError("family has no non-constant member")
    groups = [set() for _ in range(d)]
    for p in family:
        if p.degree >= 1:
            groups[p.degree - 1].add(p.leading)
    return CharVector(tuple(len(g) for g in groups))


def value_set(p: Poly, lo: int, hi: int) -> BitWindow:
    """Window marking ``{p(n) : n >= 0} ∩ [lo, hi)``."""
    n0 = p.increasing_from()
    bools = np.zeros(hi - lo, dtype=bool)
    n = 0
    while True:
        v = eval_poly(p, n)
        if lo <= v < hi:
            bools[v - lo] = True
        elif n >= n0 and v >= hi:
            break
        n += 1
    return BitWindow.from_bools(lo, bools)


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Obstruction:
    image: tuple
    surjective: bool
    pair: tuple | None


def residue_obstruction(p: Poly, q: int) -> Obstruction:
    """Image of ``p`` modulo the prime ``q`` and a residue pair whose sum it misses.

    The pair is the lexicographically smallest ``(a, b)`` over nonzero
    residues with ``a + b`` outside the image; residue 0 is only used when
    no nonzero pair exists.  ``A = a mod q``, ``B = b mod q`` then give
    ``(A + B) ∩ p(N) = ∅``.
    """
    if not 2 <= q <= 10**6 or not is_prime(q):
        raise InputError(f"{q} is not a prime in [2, 10^6]")
    image = sorted({eval_poly(p, n) % q for n in range(q)})
    if len(image) == q:
        return Obstruction(tuple(image), True, None)
    img = set(image)
    for residues in (range(1, q), range(q)):
        for a in residues:
            for b in residues:
                if (a + b) % q not in img:
                    return Obstruction(tuple(image), False, (a, b))
    raise AssertionError("unreachable: a non-surjective image always misses some sum")
