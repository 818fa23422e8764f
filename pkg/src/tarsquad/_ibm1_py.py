"""Pure-Python EM step for IBM Model 1; fallback for ``_ibm1_kernel``.

Same signature and summation order as the compiled kernel.
"""

import math


def em_step(pair_ids, src_lens, tgt_lens, pair_src, t, n_src):
    pids = pair_ids.tolist()
    srcs = pair_src.tolist()
    tv = t.tolist()
    counts = [0.0] * len(tv)
    totals = [0.0] * n_src
    log = math.log
    ll = 0.0
    base = 0
    for m, n in zip(src_lens.tolist(), tgt_lens.tolist()):
        for _ in range(n):
            row = pids[base : base + m]
            z = 0.0
            for p in row:
                z += tv[p]
            ll += log(z / m)
            for p in row:
                counts[p] += tv[p] / z
            base += m
    for p, c in enumerate(counts):
        totals[srcs[p]] += c
    t[:] = [c / totals[srcs[p]] for p, c in enumerate(counts)]
    return ll


def log_likelihood(pair_ids, src_lens, tgt_lens, t):
    pids = pair_ids.tolist()
    tv = t.tolist()
    log = math.log
    ll = 0.0
    base = 0
    for m, n in zip(src_lens.tolist(), tgt_lens.tolist()):
        for _ in range(n):
            z = 0.0
            for p in pids[base : base + m]:
                z += tv[p]
            ll += log(z / m)
            base += m
    return ll
