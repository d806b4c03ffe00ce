"""Densities, finite lower Banach density and gap statistics of bit windows."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .bitwindow import BitWindow
from .errors import InputError, OutOfWindowError


def prefix_density(S: BitWindow, N: int) -> Fraction:
    """``|S ∩ [1, N]| / N``.

    When the window starts above 1 the count runs over ``[lo, N]`` and the
    denominator is ``N - lo + 1``.
    """
    start = max(1, S.lo)
    if N < start or N >= S.hi:
        raise OutOfWindowError(f"N={N} outside window [{S.lo}, {S.hi})")
    return Fraction(S.count(start, N + 1), N - start + 1)


def banach_lower_density(S: BitWindow, L: int) -> Fraction:
    """Minimum density over every length-``L`` sub-window ``[a, a + L)``."""
    if L <= 0:
        raise InputError("window length L must be positive")
    if L > S.size:
        raise InputError(f"L={L} exceeds window length {S.size}")
    return Fraction(int(_kernels.sliding_min_count(S.words, S.size, L)), L)


@dataclass(frozen=True)
class GapStats:
    max_gap: int
    mean_gap: float
    histogram: dict

    def to_json(self) -> dict:
        return {"max_gap": self.max_gap, "mean_gap": self.mean_gap,
                "histogram": {str(k): v for k, v in sorted(self.histogram.items())}}


def gap_stats(S: BitWindow) -> GapStats:
    """Differences of consecutive members.  A single member has no gaps (max_gap 0)."""
    m = S.members()
    if m.size == 0:
        raise InputError("gap statistics of an empty set")
    gaps = np.diff(m)
    if gaps.size == 0:
        return GapStats(0, 0.0, {})
    vals, counts = np.unique(gaps, return_counts=True)
    return GapStats(int(gaps.max()), float(gaps.mean()),
                    {int(v): int(c) for v, c in zip(vals, counts)})


@dataclass(frozen=True)
class DensityStats:
    prefix_density: Fraction
    window_min_density: Fraction
    window_len: int
    max_gap: int
    mean_gap: float

    def to_json(self) -> dict:
        out = asdict(self)
        for k in ("prefix_density", "window_min_density"):
            out[k] = str(out[k])
        return out


def density_stats(S: BitWindow, N: int | None = None, L: int = 100) -> DensityStats:
    N = S.hi - 1 if N is None else N
    g = gap_stats(S) if S.count() else GapStats(0, 0.0, {})
    return DensityStats(prefix_density(S, N), banach_lower_density(S, L), L, g.max_gap, g.mean_gap)
