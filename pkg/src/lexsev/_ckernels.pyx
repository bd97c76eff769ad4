# cython: language_level=3
"""Compiled kernels: the hot twin of `_pykernels`.

Same three functions over the same flat-array layouts; see `_pykernels` for
the layout contract. Behavior must stay in lockstep (tests/test_kernels.py
enforces parity on random inputs).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def match_many(const cnp.int32_t[::1] tokens, const cnp.int64_t[::1] line_off,
               const cnp.int32_t[::1] cand_off, const cnp.int32_t[::1] cand_pat,
               const cnp.int32_t[::1] pat_off, const cnp.int32_t[::1] pat_toks):
    """Greedy longest-match-first, leftmost-first term matching.

    Returns (line_idx, pat_idx, start) int32 arrays, in scan order; start is
    relative to the line start.
    """
    cdef Py_ssize_t n_lines = line_off.shape[0] - 1
    cdef Py_ssize_t vocab_size = cand_off.shape[0] - 1
    # a match consumes at least one token, so token count bounds match count
    cdef Py_ssize_t cap = tokens.shape[0]
    out_line_arr = np.empty(cap, dtype=np.int32)
    out_pat_arr = np.empty(cap, dtype=np.int32)
    out_start_arr = np.empty(cap, dtype=np.int32)
    cdef cnp.int32_t[::1] out_line = out_line_arr
    cdef cnp.int32_t[::1] out_pat = out_pat_arr
    cdef cnp.int32_t[::1] out_start = out_start_arr

    cdef Py_ssize_t n_out = 0
    cdef Py_ssize_t li, i, base, end, c, ps, plen, k, p
    cdef cnp.int32_t t
    cdef bint advanced, matched
    for li in range(n_lines):
        base = line_off[li]
        end = line_off[li + 1]
        i = base
        while i < end:
            t = tokens[i]
            advanced = False
            if 0 <= t < vocab_size:
                for c in range(cand_off[t], cand_off[t + 1]):
                    p = cand_pat[c]
                    ps = pat_off[p]
                    plen = pat_off[p + 1] - ps
                    if i + plen <= end:
                        matched = True
                        for k in range(plen):
                            if tokens[i + k] != pat_toks[ps + k]:
                                matched = False
                                break
                        if matched:
                            out_line[n_out] = <cnp.int32_t> li
                            out_pat[n_out] = <cnp.int32_t> p
                            out_start[n_out] = <cnp.int32_t> (i - base)
                            n_out += 1
                            i += plen
                            advanced = True
                            break
            if not advanced:
                i += 1
    return (out_line_arr[:n_out].copy(), out_pat_arr[:n_out].copy(),
            out_start_arr[:n_out].copy())


cdef inline Py_ssize_t _find(const cnp.int32_t[::1] items, Py_ssize_t lo,
                             Py_ssize_t hi, cnp.int32_t target) noexcept:
    # binary search in items[lo:hi]; -1 when absent
    cdef Py_ssize_t mid
    cdef cnp.int32_t v
    while lo < hi:
        mid = (lo + hi) // 2
        v = items[mid]
        if v == target:
            return mid
        if v < target:
            lo = mid + 1
        else:
            hi = mid
    return -1


def count_ordered(const cnp.int32_t[::1] seq_sel, const cnp.int32_t[::1] ant,
                  const cnp.int32_t[::1] cons, const cnp.int64_t[::1] item_off,
                  const cnp.int32_t[::1] items, const cnp.int32_t[::1] firsts,
                  const cnp.int32_t[::1] lasts):
    """Count selected sequences where every antecedent item occurs and every
    consequent item still occurs strictly after the antecedent completes
    (completion = max over antecedent items of first occurrence)."""
    cdef Py_ssize_t si, s, lo, hi, j, xi
    cdef long done
    cdef bint ok
    cdef long count = 0
    for si in range(seq_sel.shape[0]):
        s = seq_sel[si]
        lo = item_off[s]
        hi = item_off[s + 1]
        done = -1
        ok = True
        for xi in range(ant.shape[0]):
            j = _find(items, lo, hi, ant[xi])
            if j < 0:
                ok = False
                break
            if firsts[j] > done:
                done = firsts[j]
        if not ok:
            continue
        for xi in range(cons.shape[0]):
            j = _find(items, lo, hi, cons[xi])
            if j < 0 or lasts[j] <= done:
                ok = False
                break
        if ok:
            count += 1
    return count


def count_antecedent_qualified(const cnp.int32_t[::1] seq_sel,
                               const cnp.int32_t[::1] ant,
                               const cnp.int64_t[::1] item_off,
                               const cnp.int32_t[::1] items,
                               const cnp.int32_t[::1] firsts,
                               const cnp.int32_t[::1] seq_len):
    """Count selected sequences where the antecedent itemset completes before
    the final position, i.e. at least one token follows it."""
    cdef Py_ssize_t si, s, lo, hi, j, xi
    cdef long done
    cdef bint ok
    cdef long count = 0
    for si in range(seq_sel.shape[0]):
        s = seq_sel[si]
        lo = item_off[s]
        hi = item_off[s + 1]
        done = -1
        ok = True
        for xi in range(ant.shape[0]):
            j = _find(items, lo, hi, ant[xi])
            if j < 0:
                ok = False
                break
            if firsts[j] > done:
                done = firsts[j]
        if ok and done < seq_len[s] - 1:
            count += 1
    return count
