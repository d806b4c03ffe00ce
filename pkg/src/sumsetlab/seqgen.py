"""Generators for the example classes of subsets of N, and normalized sequences.

Every generator is a pure function of its spec and of the integer ``n``:
generating ``[lo, mid)`` and ``[mid, hi)`` separately and concatenating
gives the same bits as generating ``[lo, hi)`` in one go.

Rotation and quadratic-Weyl codings are computed exactly.  A float
``alpha`` is taken at its exact binary value ``m / 2^e``; a rational
``p/q`` is used as is.  ``frac(n * alpha)`` is then a residue computed
with integer arithmetic, and the interval test compares integers, so no
floating-point drift accumulates along the window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bitwindow import BitWindow, decode, encode  # noqa: F401  (re-exported)
from .errors import InputError

CHUNK = 1 << 22
_TWO64 = 1 << 64

__all__ = [
    "BitWindow", "GeneratorSpec", "NormalizedSeq", "encode", "decode",
    "gen_periodic", "gen_rotation", "gen_weyl2", "gen_bernoulli",
    "generate", "normalize", "parse_spec", "prefix_fraction", "philox",
]


def philox(seed: int, stream: int = 0) -> np.random.Philox:
    """Counter-based generator keyed by (seed, stream); streams are independent."""
    if not 0 <= seed < _TWO64 or not 0 <= stream < _TWO64:
        raise InputError("seed and stream must be 64-bit unsigned integers")
    return np.random.Philox(key=(stream << 64) | seed)


def _check_window(lo, hi):
    if lo >= hi:
        raise InputError(f"empty window [{lo}, {hi})")
    if lo < 0:
        raise InputError("windows index N and must start at lo >= 0")


def _check_interval(a, b):
    if not 0 <= a < b <= 1:
        raise InputError(f"degenerate interval [{a}, {b})")


def _as_ratio(alpha) -> tuple[int, int]:
    """Exact (numerator, denominator) of alpha, reduced into [0, 1)."""
    if isinstance(alpha, tuple):
        num, den = (int(x) for x in alpha)
    else:
        fr = Fraction(alpha)
        num, den = fr.numerator, fr.denominator
    if den <= 0:
        raise InputError("alpha denominator must be positive")
    return num % den, den


def _ceil_scaled(x, q: int) -> int:
    """ceil(x * q) for float or Fraction x, exactly."""
    fr = Fraction(x) * q
    return -((-fr.numerator) // fr.denominator)


def _coded_window(alpha, a, b, lo, hi, square: bool) -> BitWindow:
    _check_window(lo, hi)
    _check_interval(a, b)
    num, den = _as_ratio(alpha)
    # den a power of two <= 2^64: scale to 2^64 and let uint64 arithmetic wrap
    pow2 = den & (den - 1) == 0 and den <= _TWO64
    q = _TWO64 if pow2 else den
    mult = num * (q // den) if pow2 else num
    t_lo = _ceil_scaled(a, q)
    t_hi = _ceil_scaled(b, q)
    parts = []
    for start in range(lo, hi, CHUNK):
        n = np.arange(start, min(hi, start + CHUNK), dtype=np.uint64)
        if pow2:
            x = n * n if square else n
            r = x * np.uint64(mult)
        elif q * q < 2**63:
            qq = np.int64(q)
            m = n.astype(np.int64) % qq
            x = (m * m) % qq if square else m
            r = (x * np.int64(mult)) % qq
        else:
            r = np.array([((int(k) ** 2 if square else int(k)) * mult) % q for k in n], dtype=object)
        if t_hi >= q:
            inside = r >= t_lo
        else:
            inside = (r >= t_lo) & (r < t_hi)
        parts.append(np.asarray(inside, dtype=bool))
    return BitWindow.from_bools(lo, np.concatenate(parts))


def gen_periodic(m: int, residues, lo: int, hi: int) -> BitWindow:
    """``{n in [lo, hi) : n mod m in residues}``."""
    _check_window(lo, hi)
    if m < 1:
        raise InputError("modulus must be >= 1")
    residues = sorted(set(int(r) for r in residues))
    if any(not 0 <= r < m for r in residues):
        raise InputError(f"residue out of range for modulus {m}")
    pattern = np.zeros(m, dtype=bool)
    pattern[residues] = True
    parts = [pattern[np.arange(s, min(hi, s + CHUNK), dtype=np.int64) % m] for s in range(lo, hi, CHUNK)]
    return BitWindow.from_bools(lo, np.concatenate(parts))


def gen_rotation(alpha, a: float, b: float, lo: int, hi: int) -> BitWindow:
    """``{n : frac(n * alpha) in [a, b)}``, the coding of an irrational rotation."""
    return _coded_window(alpha, a, b, lo, hi, square=False)


def gen_weyl2(alpha, a: float, b: float, lo: int, hi: int) -> BitWindow:
    """``{n : frac(n^2 * alpha) in [a, b)}``."""
    return _coded_window(alpha, a, b, lo, hi, square=True)


def gen_bernoulli(p: float, seed: int, lo: int, hi: int) -> BitWindow:
    """i.i.d. membership with probability ``p``; bit ``n`` uses Philox draw ``n``."""
    _check_window(lo, hi)
    if not 0 < p < 1:
        raise InputError("probability must lie in (0, 1)")
    threshold = np.uint64(_ceil_scaled(p, _TWO64))
    parts = []
    for start in range(lo, hi, CHUNK):
        stop = min(hi, start + CHUNK)
        bg = philox(seed)
        # Philox4x64 yields 4 words per counter step
        bg.advance(start // 4)
        raw = bg.random_raw(stop - (start // 4) * 4)[start % 4:]
        parts.append(raw < threshold)
    return BitWindow.from_bools(lo, np.concatenate(parts))


@dataclass(frozen=True)
class GeneratorSpec:
    """``kind`` in {periodic, rotation, weyl2, bernoulli} plus its parameters."""

    kind: str
    params: tuple
    text: str = field(default="", compare=False)

    def __post_init__(self):
        k, ps = self.kind, self.params
        if k == "periodic":
            if ps[0] < 1 or any(not 0 <= r < ps[0] for r in ps[1]):
                raise InputError("periodic spec needs m >= 1 and residues in [0, m)")
        elif k in ("rotation", "weyl2"):
            _check_interval(ps[1], ps[2])
        elif k == "bernoulli":
            if not 0 < ps[0] < 1:
                raise InputError("probability must lie in (0, 1)")
        else:
            raise InputError(f"unknown generator kind {k!r}")

    def density(self) -> Fraction:
        """Analytic density of the generated set."""
        k, ps = self.kind, self.params
        if k == "periodic":
            return Fraction(len(set(ps[1])), ps[0])
        if k in ("rotation", "weyl2"):
            return Fraction(ps[2]) - Fraction(ps[1])
        return Fraction(ps[0])

    def build(self, lo: int, hi: int) -> BitWindow:
        return generate(self, lo, hi)

    def __str__(self) -> str:
        return self.text or f"{self.kind}:{self.params}"


def _parse_alpha(tok: str):
    if "/" in tok:
        num, den = tok.split("/")
        return (int(num), int(den))
    return float(tok)


def parse_spec(text: str) -> GeneratorSpec:
    """Parse ``mod:<m>,<r>...`` | ``rot:<alpha>,<a>,<b>`` | ``weyl2:...`` | ``bern:<p>,<seed>``.

    ``alpha`` may be a decimal or a rational ``p/q`` (e.g. a convergent).
    """
    try:
        head, _, body = text.partition(":")
        toks = body.split(",")
        if head == "mod":
            m = int(toks[0])
            return GeneratorSpec("periodic", (m, tuple(int(t) for t in toks[1:])), text)
        if head in ("rot", "weyl2"):
            if len(toks) != 3:
                raise ValueError("expected alpha,a,b")
            kind = "rotation" if head == "rot" else "weyl2"
            return GeneratorSpec(kind, (_parse_alpha(toks[0]), float(toks[1]), float(toks[2])), text)
        if head == "bern":
            if len(toks) != 2:
                raise ValueError("expected p,seed")
            return GeneratorSpec("bernoulli", (float(toks[0]), int(toks[1])), text)
    except (ValueError, IndexError) as exc:
        raise InputError(f"cannot parse generator spec {text!r}: {exc}") from None
    raise InputError(f"unknown generator spec {text!r}")


def generate(spec: GeneratorSpec, lo: int, hi: int) -> BitWindow:
    k, ps = spec.kind, spec.params
    if k == "periodic":
        return gen_periodic(ps[0], ps[1], lo, hi)
    if k == "rotation":
        return gen_rotation(ps[0], ps[1], ps[2], lo, hi)
    if k == "weyl2":
        return gen_weyl2(ps[0], ps[1], ps[2], lo, hi)
    return gen_bernoulli(ps[0], ps[1], lo, hi)


def prefix_fraction(A: BitWindow, N: int | None = None) -> Fraction:
    """``|A ∩ [1, N]| / N`` as an exact fraction (default ``N = hi - 1``)."""
    N = A.hi - 1 if N is None else N
    if A.lo > 1 or N >= A.hi or N < 1:
        raise InputError(f"[1, {N}] not inside window [{A.lo}, {A.hi})")
    return Fraction(A.count(1, N + 1), N)


class NormalizedSeq:
    """``xi(n) = 1_A(n) - d`` on the window of ``A``, and exactly 0 elsewhere.

    ``xi(n)`` is 0 for every ``n <= 0`` as well.  ``d`` is a float (float
    mode) or a Fraction (exact mode); ``d_source`` records where it came
    from: ``"analytic"``, ``"measured"`` or ``"given"``.
    """

    __slots__ = ("window", "d", "d_source")

    def __init__(self, window: BitWindow, d, d_source: str = "given"):
        if not 0 <= d <= 1:
            raise InputError("density parameter must lie in [0, 1]")
        self.window = window
        self.d = d
        self.d_source = d_source

    @property
    def mode(self) -> str:
        return "exact" if isinstance(self.d, (Fraction, int)) else "float"

    @property
    def d_exact(self) -> Fraction:
        return Fraction(self.d)

    @property
    def values(self) -> np.ndarray:
        """xi over the window as float64."""
        return self.window.to_bools().astype(np.float64) - float(self.d)

    def valid_range(self) -> tuple[int, int]:
        """Closed range of arguments where xi reads the window (n >= 1 and inside)."""
        return max(1, self.window.lo), self.window.hi - 1

    def __call__(self, n: int):
        n = int(n)
        lo, hi = self.valid_range()
        if not lo <= n <= hi:
            return 0
        return (1 if n in self.window else 0) - self.d

    def exact_sum(self, a: int, b: int) -> Fraction:
        """Exact ``sum_{n=a}^{b} xi(n)``."""
        lo, hi = self.valid_range()
        a, b = max(a, lo), min(b, hi)
        if a > b:
            return Fraction(0)
        return self.window.count(a, b + 1) - (b - a + 1) * self.d_exact


def normalize(A: BitWindow, d=None, d_source: str | None = None) -> NormalizedSeq:
    """Normalized sequence of ``A``; ``d=None`` uses the measured prefix density."""
    if d is None:
        return NormalizedSeq(A, prefix_fraction(A), "measured")
    return NormalizedSeq(A, d, d_source or "given")


def known_density(spec: GeneratorSpec):
    """Analytic density, as float (rotation/weyl2/bernoulli) or Fraction (periodic)."""
    fr = spec.density()
    return fr if spec.kind == "periodic" else float(fr)

