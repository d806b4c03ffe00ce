"""Numba kernels over packed bit windows.

Bit ``i`` of a window lives in word ``i >> 6`` at position ``i & 63``
(little-endian), and bits past the logical end are always zero.  All
shift amounts are cast to uint64 explicitly: numba promotes mixed
int64/uint64 arithmetic to float64.
"""

import numba
import numpy as np

_U0 = np.uint64(0)
_U1 = np.uint64(1)
_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)


@numba.njit(cache=True, inline="always")
def load64(words, t):
    """The 64 bits starting at bit ``t``; positions off the array read as 0."""
    nw = words.size
    if t >= 0:
        q = t >> 6
        r = t & 63
        lo = words[q] if q < nw else _U0
        if r == 0:
            return lo
        hi = words[q + 1] if q + 1 < nw else _U0
        return (lo >> np.uint64(r)) | (hi << np.uint64(64 - r))
    if t <= -64 or nw == 0:
        return _U0
    return words[0] << np.uint64(-t)


@numba.njit(cache=True, inline="always")
def _low_mask(nbits):
    # bits 0..nbits-1 set, 0 <= nbits <= 64
    if nbits >= 64:
        return _ONES
    return (_U1 << np.uint64(nbits)) - _U1


@numba.njit(cache=True, inline="always")
def _ctz(x):
    i = 0
    while (x & _U1) == _U0:
        x >>= _U1
        i += 1
    return i


@numba.njit(cache=True)
def popcount_range(words, a, b):
    """Number of set bits with index in ``[a, b)``."""
    total = 0
    if b <= a:
        return 0
    wa = a >> 6
    wb = (b - 1) >> 6
    for w in range(wa, wb + 1):
        x = words[w]
        if w == wa:
            x &= ~_low_mask(a & 63)
        if w == wb:
            x &= _low_mask(((b - 1) & 63) + 1)
        # SWAR popcount
        x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
        x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
        x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
        total += int((x * np.uint64(0x0101010101010101)) >> np.uint64(56))
    return total


@numba.njit(cache=True)
def reverse_bits(words, nbits):
    """Packed window whose bit ``t`` is bit ``nbits - 1 - t`` of the input."""
    nw = words.size
    out = np.zeros(nw, dtype=np.uint64)
    for w in range(nw):
        # output word w holds input bits nbits-1-64w down to nbits-64-64w
        start = nbits - 64 - 64 * w
        x = load64(words, start)
        y = _U0
        for _ in range(64):
            y = (y << _U1) | (x & _U1)
            x >>= _U1
        out[w] = y
    tail = nbits & 63
    if tail and nw:
        out[nw - 1] &= _low_mask(tail)
    return out


@numba.njit(cache=True)
def sliding_min_count(words, nbits, L):
    """Minimum popcount over all length-``L`` runs ``[a, a+L)``, 0 <= a <= nbits-L."""
    c = 0
    for i in range(L):
        c += int((words[i >> 6] >> np.uint64(i & 63)) & _U1)
    best = c
    for a in range(1, nbits - L + 1):
        c += int((words[(a + L - 1) >> 6] >> np.uint64((a + L - 1) & 63)) & _U1)
        c -= int((words[(a - 1) >> 6] >> np.uint64((a - 1) & 63)) & _U1)
        if c < best:
            best = c
    return best


@numba.njit(cache=True)
def sumset_or(a_words, a_nbits, b_members, off0, out_words, out_nbits, block):
    """OR ``A`` shifted by ``off0 + b`` into ``out`` for each ``b``.

    Positions are relative: bit ``i`` of A lands on output bit ``i + off0 + b``.
    The output is processed in blocks of ``block`` words so one block stays
    hot in cache while every shift visits it.
    """
    out_nw = out_words.size
    nb = b_members.size
    for w0 in range(0, out_nw, block):
        w1 = min(out_nw, w0 + block)
        for k in range(nb):
            off = off0 + b_members[k]
            # output words touched by A's image [off, off + a_nbits)
            first = off >> 6 if off >= 0 else 0
            last = (off + a_nbits - 1) >> 6 if off + a_nbits - 1 >= 0 else -1
            lo = max(first, w0)
            hi = min(last + 1, w1)
            for w in range(lo, hi):
                out_words[w] |= load64(a_words, 64 * w - off)
    tail = out_nbits & 63
    if tail and out_nw:
        out_words[out_nw - 1] &= _low_mask(tail)


@numba.njit(cache=True, inline="always")
def _edge_word(b_words, arev_words, w, s_lo, s_hi, deltas):
    x = b_words[w]
    if w == s_lo >> 6:
        x &= ~_low_mask(s_lo & 63)
    if w == s_hi >> 6:
        x &= _low_mask((s_hi & 63) + 1)
    for i in range(deltas.size):
        if x == _U0:
            break
        x &= load64(arev_words, 64 * w + deltas[i])
    return x


@numba.njit(cache=True)
def multi_hit_scan(b_words, arev_words, s_lo, s_hi, deltas):
    """First ``s`` in ``[s_lo, s_hi]`` with B[s] and Arev[s + delta_i] for all i.

    Returns -1 when no such ``s`` exists.  ``s`` indexes B's bits, Arev is A
    with its bit order reversed so that every constraint walks forward.
    Interior words read Arev at a fixed word offset and funnel shift, with
    no range checks: the caller guarantees ``s + delta_i`` stays inside Arev
    for every ``s`` in range.
    """
    if s_hi < s_lo:
        return -1
    k = deltas.size
    w_lo = s_lo >> 6
    w_hi = s_hi >> 6
    x = _edge_word(b_words, arev_words, w_lo, s_lo, s_hi, deltas)
    if x != _U0:
        return 64 * w_lo + _ctz(x)
    if w_hi == w_lo:
        return -1
    if k == 1:
        w0 = w_lo + 1
        m = w_hi - w0
        q0 = w0 + (deltas[0] >> 6)
        bb = b_words[w0:w_hi]
        a0 = arev_words[q0:q0 + m]
        r0 = np.uint64(deltas[0] & 63)
        l0 = np.uint64(64 - (deltas[0] & 63))
        # sliced views let LLVM vectorize the OR-reduction over each block
        a1 = arev_words[q0 + 1:q0 + 1 + m] if r0 != _U0 else a0
        u = 0
        while u < m:
            e = min(m, u + 256)
            acc = _U0
            if r0 != _U0:
                for t in range(u, e):
                    acc |= bb[t] & ((a0[t] >> r0) | (a1[t] << l0))
            else:
                for t in range(u, e):
                    acc |= bb[t] & a0[t]
            if acc != _U0:
                for t in range(u, e):
                    x = bb[t] & (((a0[t] >> r0) | (a1[t] << l0)) if r0 != _U0 else a0[t])
                    if x != _U0:
                        return 64 * (w0 + t) + _ctz(x)
            u = e
    else:
        dq = np.empty(k, dtype=np.int64)
        rs = np.empty(k, dtype=np.uint64)
        ls = np.empty(k, dtype=np.uint64)
        for i in range(k):
            dq[i] = deltas[i] >> 6
            rs[i] = np.uint64(deltas[i] & 63)
            ls[i] = np.uint64(64 - (deltas[i] & 63))
        for w in range(w_lo + 1, w_hi):
            x = b_words[w]
            for i in range(k):
                if x == _U0:
                    break
                q = w + dq[i]
                if rs[i] == _U0:
                    x &= arev_words[q]
                else:
                    x &= (arev_words[q] >> rs[i]) | (arev_words[q + 1] << ls[i])
            if x != _U0:
                return 64 * w + _ctz(x)
    x = _edge_word(b_words, arev_words, w_hi, s_lo, s_hi, deltas)
    if x != _U0:
        return 64 * w_hi + _ctz(x)
    return -1


@numba.njit(cache=True)
def multi_hit_all(b_words, arev_words, s_lo, s_hi, deltas, group=16, block=8192):
    """``multi_hit_scan`` for a batch: row ``n`` of ``deltas`` and ``s_lo[n]..s_hi[n]``.

    Consecutive ``n`` read nearly the same Arev words, so a group of rows
    is scanned together one block of B words at a time; that keeps the B
    block in L1 and the overlapping Arev stretches in L2.
    """
    m = s_lo.size
    out = np.full(m, -1, dtype=np.int64)
    span = 64 * block
    for g0 in range(0, m, group):
        g1 = min(m, g0 + group)
        top = -1
        for n in range(g0, g1):
            if s_hi[n] > top:
                top = s_hi[n]
        lo = top
        for n in range(g0, g1):
            if s_hi[n] >= s_lo[n] and s_lo[n] < lo:
                lo = s_lo[n]
        if top < 0:
            continue
        start = (lo // span) * span
        done = np.zeros(g1 - g0, dtype=np.bool_)
        for b0 in range(start, top + 1, span):
            b1 = b0 + span - 1
            for n in range(g0, g1):
                if done[n - g0]:
                    continue
                a = max(s_lo[n], b0)
                b = min(s_hi[n], b1)
                if a > b:
                    if s_hi[n] < b0:
                        done[n - g0] = True
                    continue
                r = multi_hit_scan(b_words, arev_words, a, b, deltas[n])
                if r >= 0:
                    out[n] = r
                    done[n - g0] = True
    return out


@numba.njit(cache=True)
def shift_histogram(bits, bases, steps, is_ind, n_lo, n_hi, P, ncls):
    """Per-``n`` class counts for products of shifted indicator / normalized factors.

    Summand ``(j, n)`` has factors at ``bases[j, i] + steps[i] * n``.  It is
    counted when ``n_lo[j] <= n <= n_hi[j]`` (the caller's validity range)
    and every indicator factor reads 1; its class is the number of
    normalized factors reading 1.  ``H[c, n]`` counts summands of class c.
    """
    J, F = bases.shape
    H = np.zeros((ncls, P + 1), dtype=np.int64)
    if F == 1 and is_ind[0] == 0:
        # hot path: one normalized factor; class 0 follows from the valid count
        step = steps[0]
        ones = np.zeros(P + 1, dtype=np.int32)
        live = np.zeros(P + 2, dtype=np.int64)
        for j in range(J):
            lo = n_lo[j]
            hi = n_hi[j]
            if lo > hi:
                continue
            live[lo] += 1
            live[hi + 1] -= 1
            base = bases[j, 0]
            for n in range(lo, hi + 1):
                ones[n] += bits[base + step * n]
        run = 0
        for n in range(P + 1):
            run += live[n]
            H[1, n] = ones[n]
            H[0, n] = run - ones[n]
        return H
    row = np.zeros(F, dtype=np.int64)
    for j in range(J):
        for i in range(F):
            row[i] = bases[j, i]
        for n in range(n_lo[j], n_hi[j] + 1):
            c = 0
            ok = 1
            for i in range(F):
                b = bits[row[i] + steps[i] * n]
                # branchless: membership bits are close to coin flips
                ok &= b | (1 - is_ind[i])
                c += b & (1 - is_ind[i])
            H[c, n] += ok
    return H
