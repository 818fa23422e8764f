"""Compare the compiled and pure-Python IBM-1 EM kernels.

    python benchmarks/bench_ibm1.py --pairs 2000 --vocab 500 --iters 5
"""

import argparse
import random
import time

from tarsquad.ibm1 import KERNELS, train_ibm1


def synthetic_corpus(n_pairs, vocab, max_len, seed):
    rng = random.Random(seed)
    src_v = [f"s{i}" for i in range(vocab)]
    tgt_v = [f"t{i}" for i in range(vocab)]
    corpus = []
    for _ in range(n_pairs):
        n = rng.randint(3, max_len)
        src = rng.choices(src_v, k=n)
        # noisy word-for-word translation so EM has something to find
        tgt = [tgt_v[int(w[1:])] if rng.random() < 0.8 else rng.choice(tgt_v) for w in src]
        rng.shuffle(tgt)
        corpus.append((src, tgt))
    return corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=2000)
    ap.add_argument("--vocab", type=int, default=500)
    ap.add_argument("--max-len", type=int, default=25)
    ap.add_argument("--iters", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=3, help="best of N runs")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    corpus = synthetic_corpus(args.pairs, args.vocab, args.max_len, args.seed)
    links = sum(len(s) * len(t) for s, t in corpus)
    print(f"{args.pairs} pairs, {links} src-tgt links per iteration, {args.iters} iterations")

    results = {}
    for name in sorted(KERNELS):
        best = float("inf")
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            table = train_ibm1(corpus, args.iters, kernel=name)
            best = min(best, time.perf_counter() - t0)
        results[name] = (best, table)
        print(f"{name:>8}: {best:.3f} s")

    if len(results) == 2:
        (tc, a), (tp, b) = results["cython"], results["python"]
        print(f"speedup: {tp / tc:.1f}x, identical tables: {a.probs == b.probs}")
    else:
        print("compiled kernel not built; only the fallback was timed")


if __name__ == "__main__":
    main()
