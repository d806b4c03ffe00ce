"""Finite L^2(N) averages of polynomially shifted normalized sequences.

Every shift average here is a sum over ``(j, n)`` of products of factors
``xi(arg)`` and ``1_A(arg)`` with ``arg = base_j ± n``.  Each factor of
``xi`` reads ``1 - d`` or ``-d``, so a summand is determined by how many of
its ``xi`` factors hit ``A``.  The kernel counts summands per ``n`` in
each such class with exact integers; norms and averages are then exact
rational combinations of those counts.  Float mode (``d`` a float) uses
the exact binary value of ``d`` and rounds once at the end, so the two
modes run the same code and differ only in what they report.

An argument ``<= 0`` reads 0 (sequences live on N).  An argument ``>= 1``
outside the window also reads 0, and the summand is counted in
``edge_terms``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from . import _kernels
from .bitwindow import BitWindow
from .errors import CoverageError, InputError, PreconditionError
from .poly import Poly, eval_poly, essentially_distinct
from .seqgen import NormalizedSeq


@dataclass
class Measurement:
    """One evaluated quantity, as emitted in JSON reports.

    ``exact`` holds the exact rational result in exact mode; for norms it
    is the squared norm.
    """

    op: str
    params: dict
    value: float
    edge_terms: int
    mode: str
    exact: Fraction | None = None

    def __float__(self) -> float:
        return self.value

    def to_json(self) -> dict:
        out = {"op": self.op, "params": self.params, "value": self.value,
               "edge_terms": self.edge_terms, "mode": self.mode}
        if self.exact is not None:
            out["exact"] = str(self.exact)
        return out


class VecN:
    """Element of L^2(N): values indexed 1..N, float64 or exact rationals."""

    __slots__ = ("values", "exact")

    def __init__(self, values, exact: bool = False):
        if exact:
            self.values = [Fraction(v) for v in values]
        else:
            self.values = np.asarray(values, dtype=np.float64)
        if len(self.values) < 1:
            raise InputError("VecN needs N >= 1")
        self.exact = exact

    @property
    def N(self) -> int:
        return len(self.values)


def inner(u: VecN, v: VecN):
    """``<u, v>_N = (1/N) sum u(n) v(n)``; exact when both vectors are exact."""
    if u.N != v.N:
        raise InputError(f"length mismatch: {u.N} vs {v.N}")
    if u.exact and v.exact:
        return sum((a * b for a, b in zip(u.values, v.values)), Fraction(0)) / u.N
    a = np.asarray(u.values, dtype=np.float64)
    b = np.asarray(v.values, dtype=np.float64)
    return math.fsum(a * b) / u.N


def norm(u: VecN) -> float:
    return math.sqrt(inner(u, u))


# ---------------------------------------------------------------------------
# shift-sum engine


@dataclass
class _Factor:
    bases: np.ndarray  # one base per j
    step: int  # +1: base + n, -1: base - n
    indicator: bool = False


@dataclass
class _Counts:
    H: np.ndarray  # H[c, n]: summands at n whose xi factors hit A c times
    n_xi: int
    edge_terms: int
    P: int
    J: int
    weights: dict = field(default_factory=dict)


def _n_range(base: int, step: int, lo: int, hi: int):
    """n with lo <= base + step * n <= hi."""
    if step > 0:
        return lo - base, hi - base
    return base - hi, base - lo


def _shift_counts(xi: NormalizedSeq, factors, aw, P: int) -> _Counts:
    if P < 1:
        raise PreconditionError("norm length must be >= 1")
    J = len(aw)
    vlo, vhi = xi.valid_range()
    n_lo = np.ones(J, dtype=np.int64)
    n_hi = np.full(J, P, dtype=np.int64)
    pos_lo = np.ones(J, dtype=np.int64)
    pos_hi = np.full(J, P, dtype=np.int64)
    for f in factors:
        for j in range(J):
            base = int(f.bases[j])
            a, b = _n_range(base, f.step, vlo, vhi)
            n_lo[j] = max(n_lo[j], a)
            n_hi[j] = min(n_hi[j], b)
            a, b = _n_range(base, f.step, 1, 2**62)
            pos_lo[j] = max(pos_lo[j], a)
            pos_hi[j] = min(pos_hi[j], b)
    live = np.asarray(aw, dtype=bool)
    n_hi[~live] = 0
    n_lo[~live] = 1
    valid = np.maximum(n_hi - n_lo + 1, 0)
    positive = np.maximum(pos_hi - pos_lo + 1, 0)
    edge = int((positive - valid)[live].sum())
    # dense slice of A over every argument the kernel will touch
    m_lo, m_hi = None, None
    for f in factors:
        for j in np.flatnonzero(valid > 0):
            base = int(f.bases[j])
            v1, v2 = base + f.step * int(n_lo[j]), base + f.step * int(n_hi[j])
            lo_, hi_ = min(v1, v2), max(v1, v2)
            m_lo = lo_ if m_lo is None else min(m_lo, lo_)
            m_hi = hi_ if m_hi is None else max(m_hi, hi_)
    n_xi = sum(1 for f in factors if not f.indicator)
    if m_lo is None:
        return _Counts(np.zeros((n_xi + 1, P + 1), dtype=np.int64), n_xi, edge, P, J)
    bits = xi.window.dense(m_lo, m_hi + 1)
    bases = np.empty((J, len(factors)), dtype=np.int64)
    for i, f in enumerate(factors):
        bases[:, i] = np.asarray(f.bases, dtype=np.int64) - m_lo
    steps = np.array([f.step for f in factors], dtype=np.int64)
    is_ind = np.array([f.indicator for f in factors], dtype=np.uint8)
    H = _kernels.shift_histogram(bits, bases, steps, is_ind, n_lo, n_hi, P, n_xi + 1)
    return _Counts(H, n_xi, edge, P, J)


def _class_values(d: Fraction, n_xi: int):
    return [(1 - d) ** c * (-d) ** (n_xi - c) for c in range(n_xi + 1)]


def _norm_sq(counts: _Counts, d: Fraction) -> Fraction:
    """``(1/P) sum_n ((1/J) sum_j summand)^2`` exactly."""
    H = counts.H[:, 1:]
    G = H @ H.T
    v = _class_values(d, counts.n_xi)
    total = sum((v[a] * v[b] * int(G[a, b]) for a in range(len(v)) for b in range(len(v))), Fraction(0))
    return total / (counts.P * counts.J**2)


def _mean(counts: _Counts, d: Fraction, w=None) -> Fraction:
    """``(1/P) sum_n w(n) (1/J) sum_j summand`` exactly."""
    H = counts.H[:, 1:]
    L = H.sum(axis=1) if w is None else H @ np.asarray(w, dtype=np.int64)
    v = _class_values(d, counts.n_xi)
    return sum((v[c] * int(L[c]) for c in range(len(v))), Fraction(0)) / (counts.P * counts.J)


def _measure_norm(op, params, xi, counts) -> Measurement:
    sq = _norm_sq(counts, xi.d_exact)
    params = dict(params, d=str(xi.d), d_source=xi.d_source)
    exact = sq if xi.mode == "exact" else None
    return Measurement(op, params, math.sqrt(float(sq)), counts.edge_terms, xi.mode, exact)


def _measure_mean(op, params, xi, counts, w=None) -> Measurement:
    m = _mean(counts, xi.d_exact, w)
    params = dict(params, d=str(xi.d), d_source=xi.d_source)
    exact = m if xi.mode == "exact" else None
    return Measurement(op, params, float(m), counts.edge_terms, xi.mode, exact)


def _poly_values(p: Poly, N: int, J: int, shift: int = 0) -> np.ndarray:
    return np.array([eval_poly(p, N + j + shift) for j in range(1, J + 1)], dtype=object).astype(np.int64)


def _weights(a: BitWindow | None, N: int, J: int) -> np.ndarray:
    if a is None:
        return np.ones(J, dtype=np.int64)
    if not a.covers(N + 1, N + J):
        raise CoverageError(f"weight sequence must cover [{N + 1}, {N + J}]")
    return a.to_bools(N + 1, N + J + 1).astype(np.int64)


def _positive_length(p: Poly, N: int) -> int:
    P = eval_poly(p, N)
    if P <= 0:
        raise PreconditionError(f"{p!r}({N}) = {P} must be positive")
    return P


# ---------------------------------------------------------------------------
# public operations


def backward_shift_norm(xi: NormalizedSeq, p: Poly, N: int, J: int) -> Measurement:
    """``|| (1/J) sum_{j<=J} xi(p(N+j) - n) ||`` over ``n = 1..p(N)``."""
    P = _positive_length(p, N)
    counts = _shift_counts(xi, [_Factor(_poly_values(p, N, J), -1)], np.ones(J, dtype=np.int64), P)
    return _measure_norm("backward_shift_norm", {"p": str(p), "N": N, "J": J}, xi, counts)


def forward_shift_norm(xi: NormalizedSeq, q: Poly, p: Poly, N: int, J: int) -> Measurement:
    """``|| (1/J) sum_{j<=J} xi(n + q(N+j)) ||`` over ``n = 1..p(N)``; needs deg q < deg p."""
    for poly in (q, p):
        if not poly.tends_to_infinity():
            raise PreconditionError(f"{poly!r} needs degree >= 1 and positive leading coefficient")
    if q.degree >= p.degree:
        raise PreconditionError("forward shift needs deg q < deg p")
    P = _positive_length(p, N)
    counts = _shift_counts(xi, [_Factor(_poly_values(q, N, J), +1)], np.ones(J, dtype=np.int64), P)
    return _measure_norm("forward_shift_norm", {"q": str(q), "p": str(p), "N": N, "J": J}, xi, counts)


def _grows_faster(q: Poly, p: Poly) -> bool:
    return q.degree > p.degree or (q.degree == p.degree and q.leading > p.leading)


def weighted_product_norm(xi: NormalizedSeq, polys, a: BitWindow | None, q: Poly | None,
                          N: int, J: int, direction: str = "backward") -> Measurement:
    """Norm of ``(1/J) sum_j a_{N+j} prod_i xi(±(n - p_i(N+j)))``.

    ``forward``: factors ``xi(n - p_i(N+j))``, norm over ``n <= q(N)``, with
    ``q`` growing faster than every ``p_i``.  ``backward``: factors
    ``xi(p_i(N+j) - n)``, norm over ``n <= p_1(N)``, all ``p_i`` of one
    degree and ``p_1`` eventually the largest.  ``a=None`` means all ones.
    """
    polys = list(polys)
    if not polys:
        raise InputError("need at least one polynomial")
    for p in polys:
        if not p.tends_to_infinity():
            raise PreconditionError(f"{p!r} needs degree >= 1 and positive leading coefficient")
    if len(polys) > 1 and not essentially_distinct(polys):
        raise PreconditionError("family is not essentially distinct")
    aw = _weights(a, N, J)
    params = {"polys": [str(p) for p in polys], "N": N, "J": J, "direction": direction,
              "weights": "ones" if a is None else "given"}
    if direction == "forward":
        if q is None or not all(_grows_faster(q, p) for p in polys):
            raise PreconditionError("q must grow faster than every p_i")
        P = _positive_length(q, N)
        factors = [_Factor(-_poly_values(p, N, J), +1) for p in polys]
        params["q"] = str(q)
    elif direction == "backward":
        if len({p.degree for p in polys}) > 1:
            raise PreconditionError("backward product needs polynomials of equal degree")
        if any((polys[0] - p).leading <= 0 for p in polys[1:]):
            raise PreconditionError("p_1 must eventually dominate every other p_i")
        P = _positive_length(polys[0], N)
        factors = [_Factor(_poly_values(p, N, J), -1) for p in polys]
    else:
        raise InputError(f"direction must be forward or backward, not {direction!r}")
    counts = _shift_counts(xi, factors, aw, P)
    return _measure_norm("weighted_product_norm", params, xi, counts)


def cube_average(xi: NormalizedSeq, h, N: int) -> Measurement:
    """``(1/N) sum_{n<=N} prod_{eps in {0,1}^k} xi(n + eps . h)``."""
    h = [int(x) for x in h]
    factors = [_Factor(np.array([sum(e * x for e, x in zip(eps, h))]), +1)
               for eps in product((0, 1), repeat=len(h))]
    counts = _shift_counts(xi, factors, np.ones(1, dtype=np.int64), N)
    return _measure_mean("cube_average", {"h": h, "N": N}, xi, counts)


def autocorr(xi: NormalizedSeq, lag: int, N: int) -> Measurement:
    """``(1/N) sum_{n<=N} xi(n) xi(n + lag)``."""
    m = cube_average(xi, (lag,), N)
    m.op = "autocorr"
    return m


def autocorr_cesaro(xi: NormalizedSeq, N: int, H: int) -> Measurement:
    """``(1/H) sum_{h<=H} |autocorr(h)|``: near 0 for weakly mixing sets."""
    vals = [autocorr(xi, h, N) for h in range(1, H + 1)]
    edges = sum(v.edge_terms for v in vals)
    if xi.mode == "exact":
        exact = sum((abs(v.exact) for v in vals), Fraction(0)) / H
        value = float(exact)
    else:
        exact = None
        value = math.fsum(abs(v.value) for v in vals) / H
    params = {"N": N, "H": H, "d": str(xi.d), "d_source": xi.d_source}
    return Measurement("autocorr_cesaro", params, value, edges, xi.mode, exact)


@dataclass
class WitnessResult:
    witness: Measurement
    no_hit: bool
    b_count: int
    identity: Fraction  # -d |B ∩ [1, p(N)]| / p(N), the no-hit value

    def to_json(self) -> dict:
        return {"witness": self.witness.to_json(), "no_hit": self.no_hit,
                "b_count": self.b_count, "identity": str(self.identity)}


def theorem1_witness(A: BitWindow, B: BitWindow, p: Poly, N: int, J: int, d) -> WitnessResult:
    """``<1_B, (1/J) sum_j xi(p(N+j) - .)>_{p(N)}`` and whether any ``p(N+j) - b`` lands in A.

    When no ``b in B ∩ [1, p(N)]`` and ``j <= J`` have ``p(N+j) - b in A``,
    every ``xi`` factor reads ``-d`` and the average equals ``identity``.
    """
    P = _positive_length(p, N)
    pv = _poly_values(p, N, J)
    if not B.covers(1, P):
        raise CoverageError(f"B must cover [1, {P}]")
    if not A.covers(1, int(pv.max())):
        raise CoverageError(f"A must cover [1, {int(pv.max())}]")
    if int(pv.min()) <= P:
        raise PreconditionError("need p(N+j) > p(N) for every j, so all shifts stay positive")
    xi = NormalizedSeq(A, d, "given")
    counts = _shift_counts(xi, [_Factor(pv, -1)], np.ones(J, dtype=np.int64), P)
    b_bits = B.to_bools(1, P + 1)
    m = _measure_mean("theorem1_witness", {"p": str(p), "N": N, "J": J}, xi, counts, w=b_bits)
    # direct hit test: A read backwards from p(N+j) - 1 down to p(N+j) - P
    no_hit = True
    for top in pv.tolist():
        if np.any(b_bits & A.to_bools(top - P, top)[::-1]):
            no_hit = False
            break
    b_count = int(b_bits.sum())
    return WitnessResult(m, no_hit, b_count, -Fraction(d) * b_count / P)


def b_nj(A: BitWindow, a: BitWindow | None, polys, N: int, J: int, d) -> Measurement:
    """``(1/p_1(N)) sum_n (1/J) sum_j a_{N+j} 1_A(n) prod_{i<k} 1_A(p_i(N+j)-n) xi(p_k(N+j)-n)``."""
    polys = list(polys)
    if not polys:
        raise InputError("need at least one polynomial")
    for p in polys:
        if not p.tends_to_infinity():
            raise PreconditionError(f"{p!r} needs degree >= 1 and positive leading coefficient")
    if len(polys) > 1:
        if not essentially_distinct(polys):
            raise PreconditionError("family is not essentially distinct")
        if len({p.degree for p in polys}) > 1:
            raise PreconditionError("polynomials must share one degree")
        if any((polys[0] - p).leading <= 0 for p in polys[1:]):
            raise PreconditionError("p_1 must eventually dominate every other p_i")
    P = _positive_length(polys[0], N)
    top = max(eval_poly(p, N + J) for p in polys)
    if not A.covers(1, max(top, P)):
        raise CoverageError(f"A must cover [1, {max(top, P)}]")
    aw = _weights(a, N, J)
    xi = NormalizedSeq(A, d, "given")
    factors = [_Factor(np.zeros(J, dtype=np.int64), +1, indicator=True)]
    factors += [_Factor(_poly_values(p, N, J), -1, indicator=True) for p in polys[:-1]]
    factors.append(_Factor(_poly_values(polys[-1], N, J), -1))
    counts = _shift_counts(xi, factors, aw, P)
    params = {"polys": [str(p) for p in polys], "N": N, "J": J,
              "weights": "ones" if a is None else "given"}
    return _measure_mean("b_nj", params, xi, counts)


# ---------------------------------------------------------------------------
# van der Corput


@dataclass
class VdcReport:
    eps: float
    I: int
    J: int
    hyp_fraction: float
    avg_norm: float
    conclusion_holds: bool
    counterexample_candidate: bool
    regime: str = "unverified"  # the lemma's thresholds I'(eps), J'(I, eps) are not effective

    def to_json(self) -> dict:
        return dict(self.__dict__)


def lag_correlations(U: np.ndarray, J: int, I: int, block: int = 64) -> np.ndarray:
    """``(1/J) sum_{j<J} <u_j, u_{j+i}>_N`` for ``i = 1..I`` (rows of U are the u_j).

    Rows are processed in blocks of ``block``: one GEMM per block gives
    every needed inner product, and lag ``i`` is the sum of the ``i``-th
    superdiagonal.  All full blocks are stacked into a single GEMM.
    """
    Nlen = U.shape[1]
    U = np.ascontiguousarray(U)
    total = np.zeros(I)
    nb = J // block
    if nb:
        rows = U[:nb * block].reshape(nb, block, Nlen).transpose(1, 0, 2).reshape(block, nb * Nlen)
        width = block + I - 1
        s0, s1 = U.strides
        win = np.lib.stride_tricks.as_strided(U[1:], shape=(nb, width, Nlen), strides=(block * s0, s0, s1))
        cols = win.transpose(1, 0, 2).reshape(width, nb * Nlen)
        G = rows @ cols.T
        for i in range(1, I + 1):
            total[i - 1] += np.trace(G, offset=i - 1, dtype=np.float64)
    for j in range(nb * block, J):
        total += (U[j + 1:j + I + 1] @ U[j]).astype(np.float64)
    return total / (J * Nlen)


def vdc_check(u, eps: float, I: int) -> VdcReport:
    """Test both sides of the finitary van der Corput implication for ``J = len(u) - I``.

    Records, never asserts: a family with ``hyp_fraction >= 1 - eps/3`` and
    ``avg_norm >= eps`` is flagged as a counterexample candidate.
    """
    if isinstance(u, np.ndarray):
        U = u if u.dtype in (np.float32, np.float64) else u.astype(np.float64)
    else:
        U = np.array([np.asarray(v.values, dtype=np.float64) for v in u])
    J = U.shape[0] - I
    if J < 1 or I < 1:
        raise InputError("need I >= 1 and at least I + 1 vectors")
    norms = np.sqrt(np.einsum("ij,ij->i", U, U, dtype=np.float64) / U.shape[1])
    tol = 1e-12 if U.dtype == np.float64 else 1e-6
    if np.any(norms > 1 + tol):
        raise PreconditionError(f"vector norm {norms.max():.6g} exceeds 1")
    # float32 GEMM: rounding is ~1e-6, far below the eps/2 threshold scale
    corr = lag_correlations(U.astype(np.float32, copy=False), J, I)
    hyp = float(np.mean(np.abs(corr) < eps / 2))
    avg = U[:J].mean(axis=0, dtype=np.float64)
    avg_norm = float(np.sqrt(np.mean(avg * avg)))
    holds = avg_norm < eps
    candidate = hyp >= 1 - eps / 3 and not holds
    return VdcReport(eps, I, J, hyp, avg_norm, holds, candidate)
