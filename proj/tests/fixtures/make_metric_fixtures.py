"""Writes metric_fixtures.json: BLEU and CIDEr-D values for small corpora,
computed here with plain Python (no dependency on the C++ code)."""

import json
import math
from collections import Counter


def grams(tokens, n):
    return [" ".join(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


def bleu(cands, refsets, n_max):
    matched = [0] * n_max
    total = [0] * n_max
    c_len = r_len = 0
    for cand, refs in zip(cands, refsets):
        for n in range(1, n_max + 1):
            ceiling = Counter()
            for r in refs:
                for g, c in Counter(grams(r, n)).items():
                    ceiling[g] = max(ceiling[g], c)
            for g, c in Counter(grams(cand, n)).items():
                matched[n - 1] += min(c, ceiling[g])
                total[n - 1] += c
        c_len += len(cand)
        r_len += min((abs(len(r) - len(cand)), len(r)) for r in refs)[1]
    if any(m == 0 for m in matched):
        return 0.0
    log_p = sum(math.log(m / t) for m, t in zip(matched, total)) / n_max
    bp = 1.0 if c_len > r_len else math.exp(1 - r_len / c_len)
    return bp * math.exp(log_p)


def cider_d(cands, refsets, sigma=6.0):
    df = Counter()
    for refs in refsets:
        df.update({g for r in refs for n in range(1, 5) for g in grams(r, n)})
    log_n = math.log(len(refsets))

    def vec(tokens):
        out = []
        for n in range(1, 5):
            w = {g: tf * (log_n - math.log(max(1.0, df[g]))) for g, tf in Counter(grams(tokens, n)).items()}
            out.append((w, math.sqrt(sum(v * v for v in w.values()))))
        return out, len(tokens)

    scores = []
    for cand, refs in zip(cands, refsets):
        cv, cl = vec(cand)
        per_ref = []
        for r in refs:
            rv, rl = vec(r)
            pen = math.exp(-((cl - rl) ** 2) / (2 * sigma ** 2))
            s = 0.0
            for (cw, cn), (rw, rn) in zip(cv, rv):
                val = sum(min(w, rw[g]) * rw[g] for g, w in cw.items() if g in rw)
                if cn != 0 and rn != 0:
                    val /= cn * rn
                s += val * pen
            per_ref.append(s / 4)
        scores.append(10 * sum(per_ref) / len(per_ref))
    return sum(scores) / len(scores)


def split(texts):
    return [t.split() for t in texts]


CORPORA = {
    "toy": {
        "candidates": ["a red cube sits near a blue ball", "the dog jumps", "two cats sleep on a mat"],
        "references": [
            ["a red cube near a blue ball", "a blue ball and a red cube", "there is a red cube"],
            ["a dog jumps", "the puppy hops over the box", "the dog jumps high"],
            ["two cats sleep", "a pair of cats rest on a mat", "two kittens sleep on the mat"],
        ],
    },
    "short": {
        "candidates": ["a cube", "a ball rolls", "the lamp"],
        "references": [
            ["a green cube on the left"],
            ["a ball rolls", "the sphere tumbles"],
            ["a lamp", "the light"],
        ],
    },
}


def main():
    out = {}
    for name, corpus in CORPORA.items():
        cands = split(corpus["candidates"])
        refs = [split(r) for r in corpus["references"]]
        out[name] = {
            "candidates": corpus["candidates"],
            "references": corpus["references"],
            "bleu": [bleu(cands, refs, n) for n in range(1, 5)],
            "cider_d": cider_d(cands, refs),
        }
    with open("metric_fixtures.json", "w") as f:
        json.dump(out, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
