"""Benchmark the compiled kernels against the pure-Python fallback.

Times the three kernels on synthetic workloads sized like a real run
(tens of thousands of corpus lines, thousands of rule-support queries)
and prints per-kernel wall times plus the speedup.

    python3 benchmarks/bench_kernels.py [--scale 2]
"""

import argparse
import random
import time

import numpy as np

from lexsev import _pykernels

try:
    from lexsev import _ckernels
except ImportError:
    _ckernels = None


def build_matching_workload(rng, scale):
    vocab_size = 400
    patterns = set()
    while len(patterns) < 300:
        length = rng.choice([1, 1, 1, 2, 2, 3])
        patterns.add(tuple(rng.randrange(vocab_size) for _ in range(length)))
    patterns = sorted(patterns)
    pat_off = [0]
    pat_toks = []
    for pattern in patterns:
        pat_toks.extend(pattern)
        pat_off.append(len(pat_toks))
    by_first = {}
    for idx, pattern in enumerate(patterns):
        by_first.setdefault(pattern[0], []).append(idx)
    cand_off = [0]
    cand_pat = []
    for token in range(vocab_size):
        ids = sorted(by_first.get(token, ()), key=lambda i: -len(patterns[i]))
        cand_pat.extend(ids)
        cand_off.append(len(cand_pat))

    tokens = []
    line_off = [0]
    for _ in range(20000 * scale):
        for _ in range(rng.randint(4, 18)):
            # roughly one token in three is inside the term vocabulary
            tokens.append(rng.randrange(vocab_size) if rng.random() < 0.35
                          else -1)
        line_off.append(len(tokens))
    return (np.asarray(tokens, dtype=np.int32),
            np.asarray(line_off, dtype=np.int64),
            np.asarray(cand_off, dtype=np.int32),
            np.asarray(cand_pat, dtype=np.int32),
            np.asarray(pat_off, dtype=np.int32),
            np.asarray(pat_toks, dtype=np.int32))


def build_occurrence_workload(rng, scale):
    alphabet = 50
    sequences = [tuple(rng.randrange(alphabet)
                       for _ in range(rng.randint(2, 10)))
                 for _ in range(15000 * scale)]
    item_off = [0]
    items = []
    firsts = []
    lasts = []
    seq_len = []
    for seq in sequences:
        positions = {}
        for pos, item in enumerate(seq):
            first, _ = positions.get(item, (pos, pos))
            positions[item] = (first, pos)
        for item in sorted(positions):
            items.append(item)
            firsts.append(positions[item][0])
            lasts.append(positions[item][1])
        item_off.append(len(items))
        seq_len.append(len(seq))
    sel = np.arange(len(sequences), dtype=np.int32)
    queries = [(np.asarray([rng.randrange(alphabet)], dtype=np.int32),
                np.asarray([rng.randrange(alphabet)], dtype=np.int32))
               for _ in range(300)]
    return (sel,
            np.asarray(item_off, dtype=np.int64),
            np.asarray(items, dtype=np.int32),
            np.asarray(firsts, dtype=np.int32),
            np.asarray(lasts, dtype=np.int32),
            np.asarray(seq_len, dtype=np.int32),
            queries)


def timed(fn, *args, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scale", type=int, default=1,
                        help="workload multiplier (default 1)")
    args = parser.parse_args()

    if _ckernels is None:
        print("compiled extension not available; timing the fallback only")
    rng = random.Random(7)
    match_args = build_matching_workload(rng, args.scale)
    sel, item_off, items, firsts, lasts, seq_len, queries = \
        build_occurrence_workload(rng, args.scale)

    def run_ordered(impl):
        return sum(impl.count_ordered(sel, ant, cons, item_off, items,
                                      firsts, lasts)
                   for ant, cons in queries)

    def run_qualified(impl):
        return sum(impl.count_antecedent_qualified(sel, ant, item_off, items,
                                                   firsts, seq_len)
                   for ant, _ in queries)

    rows = []
    for name, fn in [
        ("match_many", lambda impl: impl.match_many(*match_args)),
        ("count_ordered x300", run_ordered),
        ("count_antecedent_qualified x300", run_qualified),
    ]:
        py_time, py_result = timed(fn, _pykernels)
        row = [name, f"{py_time * 1000:9.1f}"]
        if _ckernels is not None:
            c_time, c_result = timed(fn, _ckernels)
            if name == "match_many":
                same = all(np.array_equal(a, b)
                           for a, b in zip(py_result, c_result))
            else:
                same = py_result == c_result
            row += [f"{c_time * 1000:9.1f}", f"{py_time / c_time:7.1f}x",
                    "ok" if same else "MISMATCH"]
        rows.append(row)

    header = ["kernel", "python ms"]
    if _ckernels is not None:
        header += ["c ms", "speedup", "agree"]
    widths = [max(len(str(r[i])) for r in rows + [header])
              for i in range(len(header))]
    for line in [header] + rows:
        print("  ".join(str(cell).ljust(width)
                        for cell, width in zip(line, widths)))


if __name__ == "__main__":
    main()
