"""Named experiments: generator specs in, one JSON-ready report out.

Thresholds are finite stand-ins for asymptotic statements.  Each one is an
explicit argument and is echoed in ``params``, so every pass/fail verdict
can be traced to a number on the command line.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.signal import lfilter

from . import corr
from .bitwindow import BitWindow
from .errors import InputError
from .poly import Poly, eval_poly, residue_obstruction
from .seqgen import NormalizedSeq, gen_periodic, known_density, parse_spec, philox, prefix_fraction
from .setops import counterexample_mask, r_multi, r_p, remove_counterexample
from .stats import banach_lower_density, density_stats, gap_stats


@dataclass
class ExperimentReport:
    experiment: str
    params: dict
    metrics: dict
    passed: bool
    runtime_ms: int
    mode: str

    def to_json(self) -> dict:
        return {"experiment": self.experiment, "params": self.params, "metrics": self.metrics,
                "pass": self.passed, "runtime_ms": self.runtime_ms, "mode": self.mode}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False)

    def write(self, path) -> None:
        # atomic: readers never see a half-written report
        d = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(self.dumps() + "\n")
        os.replace(tmp, path)


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = int(round((time.perf_counter() - self.t0) * 1000))


def _report(name, params, metrics, passed, timer, mode="exact"):
    return ExperimentReport(name, params, metrics, bool(passed), timer.ms, mode)


def parse_density(text: str | None, spec=None):
    """``None``/``"analytic"`` -> the generator's known density; ``"measured"``; ``"p/q"`` exact; else float."""
    if text is None or text == "analytic":
        if spec is None:
            raise InputError("analytic density needs a generator spec")
        return known_density(spec), "analytic"
    if text == "measured":
        return None, "measured"
    try:
        return (Fraction(text) if "/" in text else float(text)), "given"
    except (ValueError, ZeroDivisionError):
        raise InputError(f"cannot parse density {text!r}") from None


def _window_top(polys, nmax: int) -> int:
    return max(eval_poly(p, n) for p in polys for n in (1, nmax))


# ---------------------------------------------------------------------------


def run_gen(spec: str, lo: int, hi: int, out: str | None = None) -> ExperimentReport:
    with _Timer() as t:
        gs = parse_spec(spec)
        A = gs.build(lo, hi)
        if out:
            A.save(out)
        count = A.count()
    metrics = {"count": count, "density": count / A.size, "analytic_density": str(gs.density())}
    return _report("gen", {"spec": spec, "lo": lo, "hi": hi, "out": out}, metrics, True, t)


def run_stats(spec: str | None, lo: int, hi: int, L: int = 100, N: int | None = None,
              path: str | None = None, max_gap: int | None = None) -> ExperimentReport:
    with _Timer() as t:
        if path:
            S = BitWindow.load(path)
        elif spec:
            S = parse_spec(spec).build(lo, hi)
        else:
            raise InputError("stats needs --spec or --input")
        ds = density_stats(S, N, L)
    passed = max_gap is None or ds.max_gap <= max_gap
    params = {"spec": spec, "input": path, "lo": S.lo, "hi": S.hi, "L": L, "N": N, "max_gap": max_gap}
    return _report("stats", params, ds.to_json(), passed, t)


def run_obstruction(p: Poly, q: int, nmax: int = 1000) -> ExperimentReport:
    """Residue image of ``p`` mod ``q``; with ``nmax`` > 0 also scans ``R_p`` for the residue sets."""
    with _Timer() as t:
        ob = residue_obstruction(p, q)
        metrics = {"image": list(ob.image), "surjective": ob.surjective,
                   "pair": list(ob.pair) if ob.pair else None}
        passed = not ob.surjective
        if passed and nmax > 0:
            top = _window_top([p], nmax)
            A = gen_periodic(q, [ob.pair[0]], 0, top + 1)
            B = gen_periodic(q, [ob.pair[1]], 0, top + 1)
            hits = r_p(A, B, p, nmax).hits.count()
            metrics["r_p_hits"] = hits
            passed = hits == 0
    return _report("obstruction", {"poly": str(p), "prime": q, "nmax": nmax}, metrics, passed, t)


def _hit_run(A_spec, B_spec, polys, nmax):
    """Build A and B on ``[0, max p_i(nmax)]`` and compute the hit set."""
    top = _window_top(polys, nmax)
    A = parse_spec(A_spec).build(0, top + 1)
    B = parse_spec(B_spec).build(0, top + 1)
    return A, B, r_multi(A, B, polys, nmax)


def run_theorem1(A_spec, B_spec, p: Poly, nmax: int, start: int = 100, max_gap: int = 20) -> ExperimentReport:
    """``R_p`` should be syndetic: largest gap on ``[start, nmax]`` within ``max_gap``.

    The gap count includes the stretches before the first and after the last hit.
    """
    with _Timer() as t:
        _, _, hs = _hit_run(A_spec, B_spec, [p], nmax)
        members = hs.hits.slice(start, nmax + 1).members()
        if members.size:
            edges = np.concatenate(([start - 1], members, [nmax + 1]))
            gap = int(np.diff(edges).max())
        else:
            gap = None
        metrics = {"hit_count": hs.hits.count(), "max_gap": gap,
                   "hit_fraction": hs.hit_fraction(start, nmax)}
    passed = gap is not None and gap <= max_gap
    params = {"A": A_spec, "B": B_spec, "poly": str(p), "nmax": nmax, "from": start, "max_gap": max_gap}
    return _report("theorem1", params, metrics, passed, t)


def run_theorem2(A_spec, B_spec, p: Poly, nmax: int, start: int = 100, minfrac: float = 0.999,
                 L: int = 500, min_window: float = 0.99) -> ExperimentReport:
    """``R_p`` should have lower Banach density 1."""
    with _Timer() as t:
        _, _, hs = _hit_run(A_spec, B_spec, [p], nmax)
        frac = hs.hit_fraction(start, nmax)
        wmin = banach_lower_density(hs.hits.slice(start, nmax + 1), L)
        metrics = {"hit_fraction": frac, "window_min_density": float(wmin),
                   "window_min_density_exact": str(wmin), "hit_count": hs.hits.count()}
    passed = frac >= minfrac and wmin >= min_window
    params = {"A": A_spec, "B": B_spec, "poly": str(p), "nmax": nmax, "from": start,
              "minfrac": minfrac, "L": L, "min_window_density": min_window}
    return _report("theorem2", params, metrics, passed, t)


def run_theorem3(A_spec, B_spec, polys, nmax: int, start: int = 100, minfrac: float = 0.99) -> ExperimentReport:
    """Common-``b`` hits for a family of equal-degree polynomials."""
    with _Timer() as t:
        _, _, hs = _hit_run(A_spec, B_spec, polys, nmax)
        frac = hs.hit_fraction(start, nmax)
        metrics = {"hit_fraction": frac, "hit_count": hs.hits.count()}
    params = {"A": A_spec, "B": B_spec, "polys": [str(p) for p in polys], "nmax": nmax,
              "from": start, "minfrac": minfrac}
    return _report("theorem3", params, metrics, frac >= minfrac, t)


def run_counterexample(A_spec, p_lo: Poly, p_hi: Poly, nmax: int = 100, lo: int = 0, hi: int = 10**6,
                       max_removed: float = 0.1) -> ExperimentReport:
    """Clear the blocking intervals from A, then check that no ``n <= nmax`` solves the system.

    A is the finite set generated on ``[lo, hi)``; candidates reaching past
    ``hi`` involve non-members and are reported as ``truncated``.
    """
    with _Timer() as t:
        A = parse_spec(A_spec).build(lo, hi)
        cleared = counterexample_mask(p_lo, p_hi, A.lo, A.hi).count()
        A2 = remove_counterexample(A, p_lo, p_hi)
        removed_members = A.count() - A2.count()
        hs = r_multi(A2, A2, [p_lo, p_hi], nmax, edge=True, require_same_degree=False)
        metrics = {"removed_fraction": cleared / A.size, "cleared_positions": cleared,
                   "removed_members": removed_members,
                   "removed_member_fraction": removed_members / max(A.count(), 1),
                   "hit_count": hs.hits.count(), "truncated": hs.truncated}
    passed = metrics["removed_fraction"] <= max_removed and metrics["hit_count"] == 0
    params = {"A": A_spec, "plo": str(p_lo), "phi": str(p_hi), "nmax": nmax, "lo": lo, "hi": hi,
              "max_removed": max_removed}
    return _report("counterexample", params, metrics, passed, t)


NORM_OPS = ("backward", "forward", "product", "cube", "autocorr", "cesaro", "b_nj")


def _norm_top(op, polys, q, N, J, h, H):
    if op in ("backward", "b_nj") or (op == "product" and q is None):
        return max(eval_poly(p, N + J) for p in polys)
    if op == "forward":
        return eval_poly(q, N + J) + eval_poly(polys[0], N)
    if op == "product":
        return eval_poly(q, N)
    if op == "cube":
        return N + sum(h)
    return N + H


def run_norms(op: str, A_spec: str, polys=(), q: Poly | None = None, N: int = 2000, Js=(200,),
              d_text: str | None = None, exact: bool = False, h=(), H: int = 200,
              direction: str = "backward", hi: int | None = None,
              max_value: float | None = None, min_value: float | None = None) -> ExperimentReport:
    """Evaluate one averaged-shift quantity over a sweep of ``J``.

    ``max_value`` / ``min_value`` bound every value of the sweep; with
    neither given the report always passes.
    """
    if op not in NORM_OPS:
        raise InputError(f"unknown norm op {op!r}; choose from {', '.join(NORM_OPS)}")
    polys = list(polys)
    if op in ("backward", "forward", "product", "b_nj") and not polys:
        raise InputError(f"{op} needs at least one --poly")
    if op == "forward" and q is None:
        raise InputError("forward needs --q")
    with _Timer() as t:
        spec = parse_spec(A_spec)
        d, source = parse_density(d_text, spec)
        Js = [int(J) for J in Js]
        top = _norm_top(op, polys, q, N, max(Js), h, H) if hi is None else hi - 1
        A = spec.build(0, top + 1)
        if d is None:
            d = prefix_fraction(A)
        if exact:
            d = Fraction(d)
        elif isinstance(d, Fraction):
            d = float(d)
        xi = NormalizedSeq(A, d, source)
        rows = []
        for J in Js:
            if op == "backward":
                m = corr.backward_shift_norm(xi, polys[0], N, J)
            elif op == "forward":
                m = corr.forward_shift_norm(xi, q, polys[0], N, J)
            elif op == "product":
                m = corr.weighted_product_norm(xi, polys, None, q, N, J, direction)
            elif op == "b_nj":
                m = corr.b_nj(A, None, polys, N, J, d)
            elif op == "cube":
                m = corr.cube_average(xi, h, N)
            elif op == "autocorr":
                m = corr.autocorr(xi, J, N)
            else:
                m = corr.autocorr_cesaro(xi, N, H)
            rows.append({"J": J, **m.to_json()})
        values = [r["value"] for r in rows]
    passed = (max_value is None or max(values) < max_value) and (min_value is None or min(values) >= min_value)
    params = {"op": op, "A": A_spec, "polys": [str(p) for p in polys], "q": str(q) if q else None,
              "N": N, "J": Js, "d": str(d), "d_source": source, "h": list(h), "H": H,
              "direction": direction, "hi": top + 1, "max_value": max_value, "min_value": min_value}
    metrics = {"values": values, "edge_terms": [r["edge_terms"] for r in rows], "records": rows}
    return _report("norms", params, metrics, passed, t, "exact" if exact else "float")


VDC_KINDS = ("signs", "scaled_signs", "gaussian", "ar1", "sparse")


def _signs(rng, shape):
    return rng.integers(0, 2, size=shape, dtype=np.int8).astype(np.float32) * 2 - 1


def random_family(kind: str, rng: np.random.Generator, N: int, count: int) -> np.ndarray:
    """``count`` vectors in L^2(N) with norm at most 1, as float32 rows."""
    if kind == "signs":
        return _signs(rng, (count, N))
    if kind == "scaled_signs":
        return _signs(rng, (count, N)) / np.float32(np.sqrt(N))
    if kind == "gaussian":
        U = rng.standard_normal((count, N), dtype=np.float32)
        U /= np.sqrt(np.mean(U * U, axis=1, keepdims=True))
        return U * rng.uniform(0, 1, size=(count, 1)).astype(np.float32)
    if kind == "ar1":
        # u_{j+1} = rho u_j + sqrt(1 - rho^2) g_j: lag correlations near rho^i
        rho = rng.uniform(0, 0.9)
        G = rng.standard_normal((N, count))
        U = np.ascontiguousarray(lfilter([np.sqrt(1 - rho * rho)], [1, -rho], G, axis=1).T, dtype=np.float32)
        return U / np.sqrt(np.mean(U * U, axis=1, keepdims=True))
    if kind == "sparse":
        s = rng.uniform(0.01, 1)
        return _signs(rng, (count, N)) * (rng.random((count, N), dtype=np.float32) < s)
    raise InputError(f"unknown family kind {kind!r}")


def run_vdc(families: int = 1000, N: int = 256, J: int = 4096, I: int = 64, eps: float = 0.2,
            seed: int = 0, kinds=VDC_KINDS) -> ExperimentReport:
    """Random bounded families through vdc_check; passes with zero candidate records.

    Family ``i`` draws from Philox stream ``i`` of ``seed``.  The all-equal
    family is run as a control and must fail the hypothesis.
    """
    with _Timer() as t:
        candidates, hyp, avg = [], [], []
        for i in range(families):
            kind = kinds[i % len(kinds)]
            rng = np.random.Generator(philox(seed, i))
            rep = corr.vdc_check(random_family(kind, rng, N, J + I), eps, I)
            hyp.append(rep.hyp_fraction)
            avg.append(rep.avg_norm)
            if rep.counterexample_candidate:
                candidates.append({"family": i, "kind": kind, **rep.to_json()})
        control = corr.vdc_check(np.ones((J + I, N)), eps, I)
        control_fails = control.hyp_fraction < 1 - eps / 3
        metrics = {"candidates": len(candidates), "candidate_records": candidates,
                   "hyp_fraction_min": min(hyp), "hyp_fraction_mean": float(np.mean(hyp)),
                   "avg_norm_max": max(avg), "hyp_holding": int(sum(h >= 1 - eps / 3 for h in hyp)),
                   "control": control.to_json(), "control_fails_hypothesis": control_fails,
                   "regime": "unverified"}
    params = {"families": families, "N": N, "J": J, "I": I, "eps": eps, "seed": seed, "kinds": list(kinds)}
    return _report("vdc", params, metrics, not candidates and control_fails, t, "float")
