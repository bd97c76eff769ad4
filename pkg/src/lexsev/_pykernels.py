"""Pure-Python kernels: the fallback twin of the compiled `_ckernels`.

Both backends expose the same three functions over the same flat-array
layouts; `lexsev.kernels` picks one at import time. Keep the semantics here
and in `_ckernels.pyx` in lockstep (tests/test_kernels.py enforces parity).

Array layouts:
  matching    tokens: concatenated encoded lines (-1 = token outside the term
              vocabulary); line_off[i]..line_off[i+1] delimits line i.
              cand_off/cand_pat: CSR of candidate pattern ids per first-token
              id, longest pattern first. pat_off/pat_toks: CSR of pattern
              token ids.
  occurrence  item_off[s]..item_off[s+1] delimits sequence s's distinct item
              ids (sorted) in `items`, with aligned first/last positions in
              `firsts`/`lasts`; seq_len[s] is the sequence length.
"""

from __future__ import annotations

import numpy as np


def match_many(tokens, line_off, cand_off, cand_pat, pat_off, pat_toks):
    """Greedy longest-match-first, leftmost-first term matching.

    Returns (line_idx, pat_idx, start) int32 arrays, in scan order (line by
    line, left to right); start is relative to the line start.
    """
    tok = tokens.tolist()
    loff = line_off.tolist()
    coff = cand_off.tolist()
    cpat = cand_pat.tolist()
    poff = pat_off.tolist()
    ptok = pat_toks.tolist()
    vocab_size = len(coff) - 1

    out_line: list[int] = []
    out_pat: list[int] = []
    out_start: list[int] = []
    for li in range(len(loff) - 1):
        base = loff[li]
        end = loff[li + 1]
        i = base
        while i < end:
            t = tok[i]
            advanced = False
            if 0 <= t < vocab_size:
                for c in range(coff[t], coff[t + 1]):
                    p = cpat[c]
                    ps = poff[p]
                    plen = poff[p + 1] - ps
                    if i + plen <= end and tok[i:i + plen] == ptok[ps:ps + plen]:
                        out_line.append(li)
                        out_pat.append(p)
                        out_start.append(i - base)
                        i += plen
                        advanced = True
                        break
            if not advanced:
                i += 1
    return (np.asarray(out_line, dtype=np.int32),
            np.asarray(out_pat, dtype=np.int32),
            np.asarray(out_start, dtype=np.int32))


def _find(items, lo, hi, target):
    # binary search in items[lo:hi]; -1 when absent
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


def count_ordered(seq_sel, ant, cons, item_off, items, firsts, lasts):
    """Count selected sequences where every antecedent item occurs and every
    consequent item still occurs strictly after the antecedent completes
    (completion = max over antecedent items of first occurrence)."""
    sel = seq_sel.tolist()
    a_items = ant.tolist()
    c_items = cons.tolist()
    ioff = item_off.tolist()
    it = items.tolist()
    fi = firsts.tolist()
    la = lasts.tolist()

    count = 0
    for s in sel:
        lo, hi = ioff[s], ioff[s + 1]
        done = -1
        ok = True
        for x in a_items:
            j = _find(it, lo, hi, x)
            if j < 0:
                ok = False
                break
            if fi[j] > done:
                done = fi[j]
        if not ok:
            continue
        for y in c_items:
            j = _find(it, lo, hi, y)
            if j < 0 or la[j] <= done:
                ok = False
                break
        if ok:
            count += 1
    return count


def count_antecedent_qualified(seq_sel, ant, item_off, items, firsts, seq_len):
    """Count selected sequences where the antecedent itemset completes before
    the final position, i.e. at least one token follows it."""
    sel = seq_sel.tolist()
    a_items = ant.tolist()
    ioff = item_off.tolist()
    it = items.tolist()
    fi = firsts.tolist()
    ln = seq_len.tolist()

    count = 0
    for s in sel:
        lo, hi = ioff[s], ioff[s + 1]
        done = -1
        ok = True
        for x in a_items:
            j = _find(it, lo, hi, x)
            if j < 0:
                ok = False
                break
            if fi[j] > done:
                done = fi[j]
        if ok and done < ln[s] - 1:
            count += 1
    return count
