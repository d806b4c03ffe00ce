"""Word-parallel set algebra on bit windows, with scalar reference versions.

``r_p`` and ``r_multi`` never build the sumset.  For each ``n`` they walk
``b`` upward through B's words and AND against A read backwards (A's
bit order is reversed once up front, so ``p(n) - b`` walks forward too),
stopping at the first witness.  Memory stays at two windows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bitwindow import MAX_INDEX, BitWindow
from .errors import CoverageError, PolyOverflowError, PreconditionError
from .poly import eval_poly, essentially_distinct
from .stats import banach_lower_density, gap_stats

SUMSET_BLOCK = 4096


def sumset(A: BitWindow, B: BitWindow, lo: int, hi: int) -> BitWindow:
    """``(A + B) ∩ [lo, hi)``."""
    if A.hi - 1 + B.hi - 1 > MAX_INDEX:
        raise PolyOverflowError("a + b may exceed 2^63")
    # shift the larger set by each member of the smaller one
    if B.count() > A.count():
        A, B = B, A
    out = np.zeros((hi - lo + 63) >> 6, dtype=np.uint64)
    members = B.members()
    if members.size:
        _kernels.sumset_or(A.words, A.size, members, A.lo - lo, out, hi - lo, SUMSET_BLOCK)
    return BitWindow(lo, hi, out)


def sumset_reference(A: BitWindow, B: BitWindow, lo: int, hi: int) -> BitWindow:
    """O(|A||B|) oracle for :func:`sumset`."""
    hits = {a + b for a in A.members().tolist() for b in B.members().tolist()}
    return BitWindow.from_members(lo, hi, [m for m in hits if lo <= m < hi])


@dataclass
class HitSet:
    """Hits ``n`` in ``[1, nmax]`` with the smallest witness ``b`` for each.

    ``witness[n - 1]`` is -1 for non-hits.  ``truncated`` counts candidate
    ``(n, b)`` pairs skipped because a window did not reach them; it is
    nonzero only in edge-accounting mode.
    """

    hits: BitWindow
    witness: np.ndarray
    nmax: int
    truncated: int = 0

    def hit_fraction(self, a: int, b: int) -> float:
        """Fraction of ``n`` in the closed range ``[a, b]`` that are hits."""
        return self.hits.count(a, b + 1) / (b - a + 1)

    def sidecar(self, L: int) -> dict:
        count = self.hits.count()
        return {
            "nmax": self.nmax,
            "hit_count": count,
            "max_gap": gap_stats(self.hits).max_gap if count else None,
            "window_min_density_at_L": str(banach_lower_density(self.hits, L)) if L <= self.hits.size else None,
            "L": L,
        }

    def save(self, path, L: int = 100) -> None:
        self.hits.save(path)
        with open(f"{path}.json", "w") as fh:
            json.dump(self.sidecar(L), fh, indent=2)


def _check_family(polys, require_same_degree: bool):
    for p in polys:
        if not p.tends_to_infinity():
            raise PreconditionError(f"{p!r} needs degree >= 1 and positive leading coefficient")
    if len(polys) > 1:
        if not essentially_distinct(polys):
            raise PreconditionError("polynomials are not essentially distinct")
        if require_same_degree and len({p.degree for p in polys}) > 1:
            raise PreconditionError("polynomials must share one degree")


def _values(polys, nmax):
    P = np.empty((nmax, len(polys)), dtype=np.int64)
    for i, p in enumerate(polys):
        for n in range(1, nmax + 1):
            v = eval_poly(p, n)
            if v > MAX_INDEX:
                raise PolyOverflowError(f"{p!r}({n}) exceeds 2^63")
            P[n - 1, i] = v
    return P


def r_multi(A: BitWindow, B: BitWindow, polys, nmax: int, edge: bool = False,
            require_same_degree: bool = True) -> HitSet:
    """``{n <= nmax : exists b in B with p_i(n) - b in A for every i}``.

    Without ``edge`` both windows must cover ``[0, max p_i(n)]``.  With
    ``edge`` uncovered candidates are skipped and counted in ``truncated``.
    """
    polys = list(polys)
    _check_family(polys, require_same_degree)
    P = _values(polys, nmax)
    top = int(P.max())
    if not edge and not (A.lo == 0 and B.lo == 0 and A.hi > top and B.hi > top):
        raise CoverageError(f"A and B must cover [0, {top}]; got A=[{A.lo},{A.hi}) B=[{B.lo},{B.hi})")
    # b ranges: 0 <= b <= min_i p_i(n), b in B, p_i(n) - b in A for every i
    pmin = P.min(axis=1)
    b_lo = np.maximum(B.lo, (P - (A.hi - 1)).max(axis=1))
    b_hi = np.minimum(np.minimum(B.hi - 1, pmin), (P - A.lo).min(axis=1))
    truncated = int(np.maximum(pmin + 1, 0).sum() - np.maximum(b_hi - b_lo + 1, 0).sum())
    s_lo = b_lo - B.lo
    s_hi = np.where(pmin < 0, -1, b_hi - B.lo)
    # Arev bit t is A's member test for A.hi - 1 - t; b = B.lo + s  maps to  t = s + delta
    deltas = np.ascontiguousarray((A.hi - 1 - P + B.lo).astype(np.int64))
    s = _kernels.multi_hit_all(B.words, A.reversed_words(), s_lo.astype(np.int64),
                               s_hi.astype(np.int64), deltas)
    witness = np.where(s >= 0, s + B.lo, -1)
    hits = BitWindow.from_bools(1, witness >= 0)
    return HitSet(hits, witness, nmax, truncated)


def r_p(A: BitWindow, B: BitWindow, p, nmax: int, edge: bool = False) -> HitSet:
    """``R_p = {n <= nmax : p(n) in A + B}``."""
    return r_multi(A, B, [p], nmax, edge=edge)


def r_multi_reference(A: BitWindow, B: BitWindow, polys, nmax: int) -> set:
    """Scalar oracle: direct search over b for every n (treats uncovered as absent)."""
    a_set = set(A.members().tolist())
    b_list = B.members().tolist()
    out = set()
    for n in range(1, nmax + 1):
        vals = [eval_poly(p, n) for p in polys]
        if any(all(v - b in a_set for v in vals) for b in b_list):
            out.add(n)
    return out


def verify_witnesses(hs: HitSet, A: BitWindow, B: BitWindow, polys, ns) -> bool:
    """Recheck recorded witnesses at the given ``n`` by direct membership tests."""
    for n in ns:
        b = int(hs.witness[n - 1])
        if b < 0:
            continue
        if b not in B:
            return False
        for p in polys:
            a = eval_poly(p, n) - b
            if not (A.lo <= a < A.hi) or a not in A:
                return False
    return True


def _counterexample_ranges(p_lo, p_hi, lo, hi):
    """Closed ranges ``[p_hi(n) - p_lo(n), p_hi(n)]`` meeting ``[lo, hi)``, n >= 0."""
    if p_lo.degree > p_hi.degree - 2:
        raise PreconditionError("degrees must differ by at least two (deg p_lo <= deg p_hi - 2)")
    diff = p_hi - p_lo
    n0 = max(p_hi.increasing_from(), diff.increasing_from())
    n = 0
    while True:
        top, small = eval_poly(p_hi, n), eval_poly(p_lo, n)
        start = top - small
        if n >= n0 and start >= hi:
            return
        # p_lo(n) < 0 leaves no solution x in [0, p_lo(n)] to block
        if small >= 0 and top >= lo and start < hi:
            yield max(start, lo), min(top, hi - 1)
        n += 1


def counterexample_mask(p_lo, p_hi, lo: int, hi: int) -> BitWindow:
    """Positions of ``[lo, hi)`` covered by some ``[p_hi(n) - p_lo(n), p_hi(n)]``."""
    diff = np.zeros(hi - lo + 1, dtype=np.int32)
    for a, b in _counterexample_ranges(p_lo, p_hi, lo, hi):
        diff[a - lo] += 1
        diff[b - lo + 1] -= 1
    return BitWindow.from_bools(lo, np.cumsum(diff[:-1]) > 0)


def remove_counterexample(A: BitWindow, p_lo, p_hi) -> BitWindow:
    """``A`` minus every interval ``[p_hi(n) - p_lo(n), p_hi(n)]``.

    Any solution of ``x + y_i = p_i(n)`` with ``x, y_i >= 0`` has
    ``x <= p_lo(n)``, so ``y`` for ``p_hi`` falls in a cleared interval.
    """
    return A - counterexample_mask(p_lo, p_hi, A.lo, A.hi)


def counterexample_mask_reference(p_lo, p_hi, lo: int, hi: int, nmax: int) -> BitWindow:
    """Scalar loop over ``n = 0..nmax`` marking each position of each interval."""
    marks = np.zeros(hi - lo, dtype=bool)
    for n in range(nmax + 1):
        x_max = eval_poly(p_lo, n)
        top = eval_poly(p_hi, n)
        if x_max < 0:
            continue
        for m in range(top - x_max, top + 1):
            if lo <= m < hi:
                marks[m - lo] = True
    return BitWindow.from_bools(lo, marks)
